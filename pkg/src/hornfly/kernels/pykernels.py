"""Pure-Python lattice kernels for the finite domains.

These are the fixpoint engine's innermost operations, so they work on
flat data: mode vectors are ``bytes`` (one code per variable) and
sharing/groundness states are integer bitmasks plus a per-variable
adjacency mask tuple. The compiled extension in ``_ckernels`` implements
the same functions; ``hornfly.kernels`` picks one at import time.
"""

from __future__ import annotations

# mode codes
GROUND, FREE, NONVAR, ANY = 0, 1, 2, 3

# lub/glb/leq/unify tables, indexed [a*4+b]
_LUB = bytes(
    [
        GROUND, ANY, NONVAR, ANY,  # ground v *
        ANY, FREE, ANY, ANY,  # var v *
        NONVAR, ANY, NONVAR, ANY,  # nonvar v *
        ANY, ANY, ANY, ANY,  # any v *
    ]
)
# 255 encodes the per-variable empty meet (ground-and-free is impossible)
_GLB = bytes(
    [
        GROUND, 255, GROUND, GROUND,
        255, FREE, 255, FREE,
        GROUND, 255, NONVAR, NONVAR,
        GROUND, FREE, NONVAR, ANY,
    ]
)
_LEQ = bytes(
    [
        1, 0, 1, 1,
        0, 1, 0, 1,
        0, 0, 1, 1,
        0, 0, 0, 1,
    ]
)
# abstract unification of two aliased variables
_UNIFY = bytes(
    [
        GROUND, GROUND, GROUND, GROUND,
        GROUND, FREE, NONVAR, ANY,
        GROUND, NONVAR, NONVAR, ANY,
        GROUND, ANY, ANY, ANY,
    ]
)


def modes_lub(a: bytes, b: bytes) -> bytes:
    return bytes(_LUB[x * 4 + y] for x, y in zip(a, b))


def modes_glb(a: bytes, b: bytes) -> bytes | None:
    """None when some variable's meet is empty (the value is bottom)."""
    out = bytearray(len(a))
    for i, (x, y) in enumerate(zip(a, b)):
        m = _GLB[x * 4 + y]
        if m == 255:
            return None
        out[i] = m
    return bytes(out)


def modes_leq(a: bytes, b: bytes) -> bool:
    return all(_LEQ[x * 4 + y] for x, y in zip(a, b))


def modes_unify_codes(x: int, y: int) -> int:
    return _UNIFY[x * 4 + y]


# -- pair sharing + groundness + freeness ------------------------------
#
# State: (ground mask, may-be-free mask, share) where share[i] is the
# bitmask of variables that may share with variable i. The relation is
# kept symmetric and irreflexive, and rows of ground variables are zero.


def sh_normalize(n: int, ground: int, free: int, share: tuple[int, ...]) -> tuple[int, int, tuple[int, ...]]:
    free &= ~ground
    mask = ~ground
    out = []
    for i in range(n):
        row = share[i] & mask & ~(1 << i)
        if ground >> i & 1:
            row = 0
        out.append(row)
    return ground, free, tuple(out)


def sh_lub(n: int, a: tuple[int, int, tuple[int, ...]], b: tuple[int, int, tuple[int, ...]]):
    g = a[0] & b[0]
    f = a[1] | b[1]
    share = tuple(a[2][i] | b[2][i] for i in range(n))
    return sh_normalize(n, g, f, share)


def sh_glb(n: int, a, b):
    g = a[0] | b[0]
    f = a[1] & b[1]
    share = tuple(a[2][i] & b[2][i] for i in range(n))
    return sh_normalize(n, g, f, share)


def sh_leq(n: int, a, b) -> bool:
    if a[0] & b[0] != b[0]:  # a must ground at least b's vars
        return False
    if a[1] & ~b[1]:
        return False
    return all(a[2][i] & ~b[2][i] == 0 for i in range(n))


def sh_amgu(n: int, state, x: int, tvars: int, t_is_var: bool, t_has_structure: bool):
    """Abstract unification x = t.

    tvars: mask of variables occurring in t. t_is_var: t is exactly one
    variable. t_has_structure: t contains at least one function symbol.
    """
    g, f, share = state
    xbit = 1 << x

    if t_is_var:
        y = tvars.bit_length() - 1
        ybit = 1 << y
        if y == x:
            return state
        if g & xbit:
            return _ground_vars(n, g, f, share, ybit)
        if g & ybit:
            return _ground_vars(n, g, f, share, xbit)
        sx = xbit | share[x]
        sy = ybit | share[y]
        share = _add_pairs(n, g, share, sx, sy)
        both_free = (f & xbit != 0) and (f & ybit != 0)
        if not both_free:
            f &= ~(xbit | ybit)
        return sh_normalize(n, g, f, share)

    live = tvars & ~g
    if live == 0:
        # t is ground under the current state: so is x afterwards
        return _ground_vars(n, g, f, share, xbit)
    if g & xbit:
        return _ground_vars(n, g, f, share, tvars)

    sx = xbit | share[x]
    st = live
    for i in _bits(live):
        st |= share[i]
    share = _add_pairs(n, g, share, sx, st)
    share = _add_pairs(n, g, share, st, st)
    if t_has_structure:
        f &= ~xbit
    return sh_normalize(n, g, f, share)


def _ground_vars(n: int, g: int, f: int, share: tuple[int, ...], mask: int):
    g |= mask
    return sh_normalize(n, g, f & ~mask, share)


def _add_pairs(n: int, g: int, share: tuple[int, ...], left: int, right: int) -> tuple[int, ...]:
    left &= ~g
    right &= ~g
    out = list(share)
    for i in _bits(left):
        out[i] |= right & ~(1 << i)
    for i in _bits(right):
        out[i] |= left & ~(1 << i)
    return tuple(out)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
