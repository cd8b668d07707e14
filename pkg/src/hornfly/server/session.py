"""Workspace sessions: cached parses and analyses behind check requests.

One session per workspace root. A check request resolves shadow content,
reparses changed files only, diffs them into deltas, repairs each
domain's analysis incrementally (or from scratch), re-runs the checker,
and answers with diagnostics plus timing/recompute stats.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass
from typing import Callable

from ..checker import CheckerConfig, check_workspace, report
from ..diags import Diagnostic
from ..engine import (
    AnalysisResult,
    StaleDb,
    Workspace,
    analyze,
    incremental_update,
    load_db,
    save_db,
)
from ..frontend import Delta, diff_modules, normalize, parse_module
from ..frontend.ast import HcModule, SourceModule
from ..frontend.lexer import ZERO_SPAN

LIBDB_PATH = os.path.join(os.path.dirname(__file__), "libdb.pl")


def load_libdb(path: str | None = None) -> dict[str, HcModule]:
    p = path or LIBDB_PATH
    with open(p, encoding="utf-8") as f:
        text = f.read()
    src = parse_module(text, p)
    hard = [d for d in src.parse_errors if d.severity == "error"]
    if hard:
        raise RuntimeError(f"library DB {p} does not parse: {hard[0].message}")
    m = normalize(src)
    return {m.name: m}


@dataclass
class ModuleState:
    path: str
    text_hash: str
    source: SourceModule
    hc: HcModule


def _text_hash(text: str) -> str:
    return hashlib.sha1(text.encode("utf-8")).hexdigest()


def _header_fingerprint(m: HcModule) -> tuple:
    return (
        tuple(m.exports),
        tuple((n, tuple(r) if r is not None else None) for n, r in m.imports),
        tuple((pd.pred, pd.is_regtype) for pd in m.prop_decls),
    )


class Session:
    def __init__(
        self,
        root: str,
        config: CheckerConfig | None = None,
        libdb_path: str | None = None,
    ):
        self.root = os.path.abspath(root)
        self.config = config or CheckerConfig()
        self.lib_modules = load_libdb(libdb_path)
        self.modules: dict[str, ModuleState] = {}
        self.results: dict[str, AnalysisResult] = {}
        self.workspace: Workspace | None = None
        self.root_module: str = ""
        self.shadow_map: dict[str, str] = {}
        self.checks_served = 0
        self.last_verdicts: list = []
        self.extra_entries: tuple = ()  # EntryDecls appended to the root module

    # -- file loading -----------------------------------------------------

    def _read(self, path: str, inline: str | None = None) -> str:
        if inline is not None:
            return inline
        real = os.path.abspath(path)
        shadow = self.shadow_map.get(real)
        with open(shadow or real, encoding="utf-8") as f:
            return f.read()

    def _module_file(self, name: str) -> str | None:
        candidate = os.path.join(self.root, f"{name}.pl")
        if os.path.exists(candidate) or os.path.abspath(candidate) in self.shadow_map:
            return candidate
        return None

    def _prev_state_for(self, apath: str) -> ModuleState | None:
        for st in self.modules.values():
            if os.path.abspath(st.path) == apath:
                return st
        return None

    def _load_workspace(self, file_path: str, inline: str | None):
        parse_errors: list[Diagnostic] = []
        new_states: dict[str, ModuleState] = {}
        deltas: list[Delta] = []
        structural = False

        root_text = self._read(file_path, inline)
        queue: list[tuple[str, str]] = [(file_path, root_text)]
        root_name: str | None = None
        seen_files: set[str] = set()

        while queue:
            path, text = queue.pop(0)
            apath = os.path.abspath(path)
            if apath in seen_files:
                continue
            seen_files.add(apath)
            h = _text_hash(text)
            prev = self._prev_state_for(apath)
            if prev is not None and prev.text_hash == h:
                state = prev
            else:
                src = parse_module(text, path)
                hc = normalize(src)
                state = ModuleState(path, h, src, hc)
                if prev is not None and prev.hc.name == hc.name:
                    if _header_fingerprint(prev.hc) != _header_fingerprint(hc):
                        structural = True
                    else:
                        deltas.append(diff_modules(prev.hc, hc))
                else:
                    structural = True
            if root_name is None:
                root_name = state.hc.name
            if state.hc.name in new_states:
                parse_errors.append(
                    Diagnostic(
                        path, ZERO_SPAN, "warning", f"duplicate module name {state.hc.name}", "module"
                    )
                )
                continue
            new_states[state.hc.name] = state
            parse_errors.extend(state.source.parse_errors)
            for imp_name, _restriction in state.hc.imports:
                if imp_name in new_states or imp_name in self.lib_modules:
                    continue
                f = self._module_file(imp_name)
                if f is None:
                    continue  # the engine warns about unresolved predicates
                try:
                    queue.append((f, self._read(f)))
                except OSError as e:
                    parse_errors.append(
                        Diagnostic(f, ZERO_SPAN, "error", f"cannot read module: {e}", "io")
                    )

        removed = set(self.modules) - set(new_states)
        added = set(new_states) - set(self.modules)
        if removed or (added and self.modules):
            structural = True
        if self.extra_entries and root_name in new_states:
            hc = new_states[root_name].hc
            extra = tuple(e for e in self.extra_entries if e not in hc.entries)
            if extra:
                hc.entries = hc.entries + extra
        return root_name or "", new_states, deltas, parse_errors, structural

    # -- the check pipeline -------------------------------------------------

    def check(
        self,
        file_path: str,
        shadow: str | None = None,
        shadow_inline: str | None = None,
        domains: tuple[str, ...] | None = None,
        incremental: bool | None = None,
        should_abort: Callable[[], bool] | None = None,
    ) -> tuple[list[Diagnostic], dict]:
        t0 = time.perf_counter()
        domains = tuple(domains) if domains else self.config.domains
        inc = self.config.incremental if incremental is None else incremental

        if shadow is not None:
            self.shadow_map[os.path.abspath(file_path)] = shadow
        elif shadow_inline is None:
            self.shadow_map.pop(os.path.abspath(file_path), None)

        root_name, new_states, deltas, parse_errors, structural = self._load_workspace(
            file_path, shadow_inline
        )
        w = Workspace(
            {name: st.hc for name, st in new_states.items()},
            lib_modules=self.lib_modules,
            root=root_name,
        )
        t_parse = time.perf_counter()

        recomputed = 0
        per_domain_stats: dict[str, dict] = {}
        fresh_needed = structural or self.workspace is None
        for d in domains:
            prev = self.results.get(d)
            if prev is None and self.config.db_dir:
                try:
                    prev = load_db(self.config.db_dir, w, d)
                    fresh_for_d = False
                except StaleDb:
                    fresh_for_d = True
            else:
                fresh_for_d = fresh_needed or prev is None
            if not fresh_for_d and inc and prev is not None:
                result = prev
                for delta in deltas:
                    result = incremental_update(result, w, delta, should_abort)
                if not deltas:
                    result = incremental_update(result, w, Delta(root_name, ()), should_abort)
            else:
                result = analyze(w, d, should_abort)
            self.results[d] = result
            recomputed += result.stats.nodes_recomputed
            per_domain_stats[d] = result.stats.to_json()
        t_analysis = time.perf_counter()

        cfg = CheckerConfig(
            domains=domains,
            incremental=inc,
            strict_false=self.config.strict_false,
            entry_policy=self.config.entry_policy,
            db_dir=self.config.db_dir,
            oracle_evidence=self.config.oracle_evidence,
            oracle_depth=self.config.oracle_depth,
            inactivity_debounce_ms=self.config.inactivity_debounce_ms,
        )
        results = {d: self.results[d] for d in domains}
        verdicts = check_workspace(w, results, cfg)
        self.last_verdicts = verdicts
        engine_warnings: list[Diagnostic] = []
        for d in domains:
            engine_warnings.extend(self.results[d].warnings)
        diags = report(w, results, verdicts, parse_errors + _dedup(engine_warnings))
        t_check = time.perf_counter()

        self.modules = new_states
        self.workspace = w
        self.root_module = root_name
        self.checks_served += 1

        if self.config.db_dir:
            for d in domains:
                save_db(self.results[d], w, self.config.db_dir)

        stats = {
            "nodesRecomputed": recomputed,
            "parseMs": round((t_parse - t0) * 1000, 2),
            "analysisMs": round((t_analysis - t_parse) * 1000, 2),
            "checkMs": round((t_check - t_analysis) * 1000, 2),
            "perDomain": per_domain_stats,
        }
        return diags, stats


def _dedup(diags: list[Diagnostic]) -> list[Diagnostic]:
    seen = set()
    out = []
    for d in diags:
        k = (d.file, d.message, d.code)
        if k not in seen:
            seen.add(k)
            out.append(d)
    return out
