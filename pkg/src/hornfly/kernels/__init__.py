"""Kernel selection: compiled extension when built, pure Python otherwise.

Set HORNFLY_PURE=1 to force the pure-Python kernels (used by the parity
tests and the kernel benchmark).
"""

import os

from . import pykernels

if os.environ.get("HORNFLY_PURE"):
    impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        impl = pykernels
        BACKEND = "python"

GROUND = pykernels.GROUND
FREE = pykernels.FREE
NONVAR = pykernels.NONVAR
ANY = pykernels.ANY

modes_lub = impl.modes_lub
modes_glb = impl.modes_glb
modes_leq = impl.modes_leq
modes_unify_codes = impl.modes_unify_codes
sh_normalize = impl.sh_normalize
sh_lub = impl.sh_lub
sh_glb = impl.sh_glb
sh_leq = impl.sh_leq
sh_amgu = impl.sh_amgu
