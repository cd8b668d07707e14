"""Analysis DB: the graph made persistent.

Layout: one manifest (format version, domain, per-module fingerprints)
plus one graph file per module holding the nodes of predicates that live
there. Everything is canonical JSON (sorted keys) so DB files diff
cleanly. Any mismatch, truncation, or version skew loads as StaleDb and
callers fall back to a fresh analysis.
"""

from __future__ import annotations

import hashlib
import json
import os

from ..adomains import get_domain
from ..frontend.ast import HcModule
from .graph import COMPLETE, AnalysisNode, AnalysisResult, CallKey, Stats
from .workspace import Workspace, split_qkey

FORMAT_VERSION = 2


class StaleDb(Exception):
    pass


def module_fingerprint(m: HcModule) -> str:
    h = hashlib.sha1()
    h.update(m.name.encode())
    for pred in sorted(m.preds):
        for c in m.preds[pred]:
            h.update(str(c.id).encode())
    for a in m.assertions:
        h.update(a.content_key().encode())
        h.update(a.status.encode())
    for e in m.entries:
        h.update(e.content_key().encode())
    for pd in m.prop_decls:
        h.update(f"{pd.pred}:{pd.is_regtype}".encode())
    h.update(",".join(m.exports).encode())
    h.update(repr(m.imports).encode())
    return h.hexdigest()[:16]


def _graph_filename(module: str) -> str:
    safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in module)
    return f"graph-{safe}.json"


def save_db(result: AnalysisResult, w: Workspace, dirpath: str) -> None:
    os.makedirs(dirpath, exist_ok=True)
    domain = get_domain(result.domain_id, w.prop_table)

    def payload_json(payload, arity: int):
        if payload == "bottom":
            return "bottom"
        names = [f"$c{i}" for i in range(arity)]
        return domain.value_to_json(domain.from_key(payload, names))

    by_module: dict[str, list[dict]] = {}
    for key in sorted(result.nodes, key=CallKey.sort_form):
        node = result.nodes[key]
        module, pred = split_qkey(key.pred)
        arity = key.arity()
        per_clause = {
            cid: [domain.value_to_json(v) for v in states]
            for cid, states in sorted(node.per_clause.items())
        }
        by_module.setdefault(module, []).append(
            {
                "pred": key.pred,
                "lambdaC": payload_json(key.payload, arity),
                "lambdaS": payload_json(node.lambda_s, arity),
                "perClause": per_clause,
            }
        )

    edges = [
        {
            "caller": {"pred": e[0].pred, "lambdaC": payload_json(e[0].payload, e[0].arity())},
            "clause": e[1],
            "pos": e[2],
            "callee": {"pred": c.pred, "lambdaC": payload_json(c.payload, c.arity())},
        }
        for e, c in sorted(result.edges.items(), key=lambda item: (item[0][0].sort_form(), item[0][1], item[0][2]))
    ]
    entries = [
        {"pred": k.pred, "lambdaC": payload_json(k.payload, k.arity())}
        for k in result.entry_keys
    ]

    manifest = {
        "formatVersion": FORMAT_VERSION,
        "domain": result.domain_id,
        "modules": {name: module_fingerprint(m) for name, m in w.all_modules().items()},
        "entryKeys": entries,
        "edges": edges,
        "stats": result.stats.to_json(),
    }
    _write_json(os.path.join(dirpath, f"manifest-{result.domain_id}.json"), manifest)
    for module, nodes in sorted(by_module.items()):
        _write_json(
            os.path.join(dirpath, f"{result.domain_id}-{_graph_filename(module)}"),
            {"module": module, "nodes": nodes},
        )


def load_db(dirpath: str, w: Workspace, domain_id: str) -> AnalysisResult:
    manifest_path = os.path.join(dirpath, f"manifest-{domain_id}.json")
    manifest = _read_json(manifest_path)
    if manifest.get("formatVersion") != FORMAT_VERSION:
        raise StaleDb(f"format version mismatch in {manifest_path}")
    if manifest.get("domain") != domain_id:
        raise StaleDb("domain mismatch")
    current = {name: module_fingerprint(m) for name, m in w.all_modules().items()}
    if manifest.get("modules") != current:
        raise StaleDb("workspace contents changed since the DB was written")

    domain = get_domain(domain_id, w.prop_table)

    def payload_from(data, arity: int):
        if data == "bottom":
            return "bottom"
        names = [f"$c{i}" for i in range(arity)]
        return domain.to_key(domain.value_from_json(data), names)

    def key_from(data) -> CallKey:
        pred = data["pred"]
        arity = int(pred.rsplit("/", 1)[1])
        return CallKey(pred, payload_from(data["lambdaC"], arity))

    result = AnalysisResult(domain_id)
    for module in manifest["modules"]:
        path = os.path.join(dirpath, f"{domain_id}-{_graph_filename(module)}")
        if not os.path.exists(path):
            continue
        data = _read_json(path)
        for nd in data.get("nodes", []):
            pred = nd["pred"]
            arity = int(pred.rsplit("/", 1)[1])
            key = CallKey(pred, payload_from(nd["lambdaC"], arity))
            node = AnalysisNode(
                key,
                payload_from(nd["lambdaS"], arity),
                {
                    cid: tuple(domain.value_from_json(v) for v in states)
                    for cid, states in nd.get("perClause", {}).items()
                },
                COMPLETE,
            )
            result.nodes[key] = node
    for ed in manifest.get("edges", []):
        caller = key_from(ed["caller"])
        callee = key_from(ed["callee"])
        result.edges[(caller, ed["clause"], ed["pos"])] = callee
    result.entry_keys = [key_from(d) for d in manifest.get("entryKeys", [])]
    for key in result.entry_keys + [c for c in result.edges.values()]:
        if key not in result.nodes:
            raise StaleDb(f"dangling node reference {key.pred}")
    result.stats = Stats()
    return result


def _write_json(path: str, data) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(data, f, sort_keys=True, indent=1)
        f.write("\n")
    os.replace(tmp, path)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise StaleDb(f"missing DB file: {path}") from e
    except (json.JSONDecodeError, OSError, UnicodeDecodeError) as e:
        raise StaleDb(f"unreadable DB file {path}: {e}") from e
