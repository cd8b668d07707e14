"""Synthetic workspace generator and the incremental-vs-scratch benchmark.

The workspace mimics a mid-sized modular program: per module, many small
predicate families (shallow call chains over list walkers) with pred
assertions, one utility predicate reached from the neighbouring module,
and a root module whose exported mains drive one family chain per
module. Edits touch single clauses (or only assertions), so repair
should stay local; the harness reports recompute shares and wall-clock
ratios per domain.
"""

from __future__ import annotations

import os
import random
import statistics
import time
from dataclasses import dataclass, field

from ..checker import CheckerConfig
from ..engine import analyze
from .session import Session

PROPS_MODULE = """\
:- module(benchprops, _, [assertions]).
:- regtype list/1.
list([]).
list([_|T]) :- list(T).
:- regtype list/2.
list(_, []).
list(T, [X|Xs]) :- call(T, X), list(T, Xs).
"""


def gen_module(i: int, n_modules: int, families: int, props: str = "benchprops") -> str:
    name = f"bm{i}"
    nxt = f"bm{(i + 1) % n_modules}"
    exports = [f"f{i}_{f}_p0/2" for f in range(families)] + [f"u{i}/1"]
    lines = [f":- module({name}, [{','.join(exports)}], [assertions])."]
    lines.append(f":- use_module({props}).")
    if n_modules > 1:
        lines.append(f":- use_module({nxt}, [u{(i + 1) % n_modules}/1]).")
    for f in range(families):
        base = f"f{i}_{f}"
        lines.append(f":- pred {base}_p0(A, B) : list(A) => list(B).")
        for k in range(3):
            lines.append(f"{base}_p{k}([], []).")
            lines.append(f"{base}_p{k}([X|Xs], [X|Ys]) :- {base}_p{k + 1}(Xs, Ys).")
        lines.append(f"{base}_p3([], []).")
        if n_modules > 1:
            lines.append(
                f"{base}_p3([X|Xs], [X|Ys]) :- u{(i + 1) % n_modules}(X), {base}_p3(Xs, Ys)."
            )
        else:
            lines.append(f"{base}_p3([X|Xs], [X|Ys]) :- {base}_p3(Xs, Ys).")
    lines.append(f"u{i}(_).")
    return "\n".join(lines) + "\n"


def gen_root(n_modules: int, families: int) -> str:
    chain = min(3, families)
    exports = [f"main{i}/2" for i in range(n_modules)]
    lines = [f":- module(bench_root, [{','.join(exports)}], [assertions])."]
    lines.append(":- use_module(benchprops).")
    for i in range(n_modules):
        lines.append(f":- use_module(bm{i}).")
    for i in range(n_modules):
        lines.append(f":- entry main{i}/2 : {{list, ground}} * var.")
        lines.append(f":- pred main{i}(A, B) : list(A) => list(B).")
        calls = []
        prev = "A"
        for f in range(chain):
            nxt = f"T{f}" if f < chain - 1 else "B"
            calls.append(f"f{i}_{f}_p0({prev}, {nxt})")
            prev = nxt
        lines.append(f"main{i}(A, B) :- {', '.join(calls)}.")
    return "\n".join(lines) + "\n"


def gen_workspace(n_modules: int = 25, target_clauses: int = 5000) -> dict[str, str]:
    """filename -> text. Clause count scales with the families parameter."""
    # per family: 8 clauses; plus one util clause and the root mains
    families = max(1, round((target_clauses / max(1, n_modules) - 1) / 8))
    files = {"benchprops.pl": PROPS_MODULE}
    for i in range(n_modules):
        files[f"bm{i}.pl"] = gen_module(i, n_modules, families)
    files["bench_root.pl"] = gen_root(n_modules, families)
    return files


def count_clauses(files: dict[str, str]) -> int:
    from ..frontend import parse_module

    total = 0
    for name, text in files.items():
        total += len(parse_module(text, name).clauses)
    return total


@dataclass
class EditOutcome:
    kind: str
    ms: float
    nodes_recomputed: int
    nodes_total: int

    @property
    def share(self) -> float:
        return self.nodes_recomputed / self.nodes_total if self.nodes_total else 0.0


@dataclass
class BenchReport:
    domain: str
    scratch_ms: float
    total_nodes: int
    clause_edits: list[EditOutcome] = field(default_factory=list)
    assertion_edits: list[EditOutcome] = field(default_factory=list)

    @property
    def median_clause_ms(self) -> float:
        return statistics.median(e.ms for e in self.clause_edits) if self.clause_edits else 0.0

    @property
    def median_assertion_ms(self) -> float:
        return (
            statistics.median(e.ms for e in self.assertion_edits)
            if self.assertion_edits
            else 0.0
        )

    @property
    def speedup(self) -> float:
        m = self.median_clause_ms
        return self.scratch_ms / m if m else float("inf")

    @property
    def max_share(self) -> float:
        return max((e.share for e in self.clause_edits), default=0.0)


def clause_edit(files: dict[str, str], rng: random.Random) -> tuple[str, str]:
    """Toggle a harmless extra literal on one leaf clause."""
    modules = [f for f in files if f.startswith("bm")]
    fname = rng.choice(modules)
    lines = files[fname].split("\n")
    idx = [
        i
        for i, line in enumerate(lines)
        if "_p3([X|Xs], [X|Ys]) :- " in line
    ]
    i = rng.choice(idx)
    if ":- true, " in lines[i]:
        lines[i] = lines[i].replace(":- true, ", ":- ", 1)
    else:
        lines[i] = lines[i].replace(":- ", ":- true, ", 1)
    return fname, "\n".join(lines)


def assertion_edit(files: dict[str, str], rng: random.Random) -> tuple[str, str]:
    """Toggle a comp property on one pred assertion (analysis-neutral)."""
    modules = [f for f in files if f.startswith("bm")]
    fname = rng.choice(modules)
    lines = files[fname].split("\n")
    idx = [i for i, line in enumerate(lines) if line.startswith(":- pred ")]
    i = rng.choice(idx)
    if "+ is_det" in lines[i]:
        lines[i] = lines[i].replace(" + is_det", "")
    else:
        lines[i] = lines[i][:-1] + " + is_det."
    return fname, "\n".join(lines)


def run_bench(
    workdir: str,
    n_modules: int = 25,
    target_clauses: int = 5000,
    edits: int = 20,
    domains: tuple[str, ...] = ("modes", "pairsh", "regtypes"),
    seed: int = 7,
    out=print,
) -> dict[str, BenchReport]:
    files = gen_workspace(n_modules, target_clauses)
    os.makedirs(workdir, exist_ok=True)
    for name, text in files.items():
        with open(os.path.join(workdir, name), "w") as f:
            f.write(text)
    root_file = os.path.join(workdir, "bench_root.pl")
    n_clauses = count_clauses(files)
    out(f"workspace: {n_modules} modules, {n_clauses} clauses")

    reports: dict[str, BenchReport] = {}
    for domain in domains:
        session = Session(workdir, CheckerConfig(domains=(domain,)))
        t0 = time.perf_counter()
        _, stats = session.check(root_file)
        scratch_ms = (time.perf_counter() - t0) * 1000
        total_nodes = len(session.results[domain].nodes)
        rep = BenchReport(domain, scratch_ms, total_nodes)
        reports[domain] = rep

        rng = random.Random(seed)
        current = dict(files)
        for _ in range(edits):
            fname, text = clause_edit(current, rng)
            current[fname] = text
            with open(os.path.join(workdir, fname), "w") as f:
                f.write(text)
            t0 = time.perf_counter()
            _, stats = session.check(root_file)
            ms = (time.perf_counter() - t0) * 1000
            rep.clause_edits.append(
                EditOutcome("clause", ms, stats["nodesRecomputed"], total_nodes)
            )
        for _ in range(edits):
            fname, text = assertion_edit(current, rng)
            current[fname] = text
            with open(os.path.join(workdir, fname), "w") as f:
                f.write(text)
            t0 = time.perf_counter()
            _, stats = session.check(root_file)
            ms = (time.perf_counter() - t0) * 1000
            rep.assertion_edits.append(
                EditOutcome("assertion", ms, stats["nodesRecomputed"], total_nodes)
            )
        out(
            f"{domain:9} scratch {scratch_ms:8.1f} ms | clause edit median "
            f"{rep.median_clause_ms:7.1f} ms (x{rep.speedup:.1f}, max {rep.max_share:.1%} nodes) | "
            f"assertion edit median {rep.median_assertion_ms:7.1f} ms"
        )
    return reports


def run_kernel_bench(out=print, iterations: int = 20000) -> dict:
    """Compare the pure-Python and compiled kernels on hot operations."""
    import importlib
    import timeit

    from .. import kernels
    from ..kernels import pykernels

    impls = {"python": pykernels}
    if kernels.BACKEND == "c":
        impls["c"] = kernels.impl
    else:
        try:
            impls["c"] = importlib.import_module("hornfly.kernels._ckernels")
        except ImportError:
            pass

    n = 12
    a = bytes([i % 4 for i in range(n)])
    b = bytes([(i + 1) % 4 for i in range(n)])
    share = tuple((1 << n) - 1 & ~(1 << i) for i in range(n))
    state = (0b1010, (1 << n) - 1, share)

    results: dict = {}
    for name, impl in impls.items():
        t_modes = timeit.timeit(lambda: impl.modes_lub(a, b), number=iterations)
        t_glb = timeit.timeit(lambda: impl.modes_glb(a, b), number=iterations)
        t_amgu = timeit.timeit(
            lambda: impl.sh_amgu(n, state, 0, 0b0110, False, True), number=iterations
        )
        results[name] = {
            "modes_lub_us": t_modes / iterations * 1e6,
            "modes_glb_us": t_glb / iterations * 1e6,
            "sh_amgu_us": t_amgu / iterations * 1e6,
        }
        out(
            f"{name:7} modes_lub {results[name]['modes_lub_us']:7.2f} us | "
            f"modes_glb {results[name]['modes_glb_us']:7.2f} us | "
            f"sh_amgu {results[name]['sh_amgu_us']:7.2f} us"
        )
    if "c" in results and "python" in results:
        ratio = results["python"]["sh_amgu_us"] / results["c"]["sh_amgu_us"]
        out(f"compiled sh_amgu speedup: x{ratio:.1f}")
        results["speedup_sh_amgu"] = ratio
    return results
