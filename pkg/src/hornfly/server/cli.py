"""Command line interface.

Subcommands: check (one-shot batch), daemon, client, annotate, bench.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from ..checker import CheckerConfig
from .batch import annotate_file, check_file, entry_error_text
from .client import client_check
from .daemon import Daemon, default_port
from .session import Session

ALL_DOMAINS = ("modes", "pairsh", "regtypes")


def _domains_arg(value: str) -> tuple[str, ...]:
    out = tuple(d.strip() for d in value.split(",") if d.strip())
    for d in out:
        if d not in ALL_DOMAINS:
            raise argparse.ArgumentTypeError(f"unknown domain {d!r} (choose from {', '.join(ALL_DOMAINS)})")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hornfly", description="Incremental assertion checking for Horn-clause programs")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check one file (batch mode)")
    c.add_argument("file")
    c.add_argument("--domains", type=_domains_arg, default=ALL_DOMAINS)
    c.add_argument("--no-incremental", action="store_true")
    c.add_argument("--strict-false", action="store_true")
    c.add_argument("--db", metavar="DIR", default=None)
    c.add_argument("--entry", action="append", default=[], metavar="DECL", help="extra entry, e.g. 'p(+list, -)'")
    c.add_argument("--json", action="store_true", help="emit diagnostics as a JSON array")
    c.add_argument("--oracle", action="store_true", help="enable concrete evidence for false success verdicts")
    c.add_argument("--libdb", metavar="FILE", default=None)

    d = sub.add_parser("daemon", help="run the background daemon")
    d.add_argument("--port", type=int, default=None)
    d.add_argument("--db", metavar="DIR", default=None)
    d.add_argument("--assets", metavar="DIR", default=None)
    d.add_argument("--libdb", metavar="FILE", default=None)

    cl = sub.add_parser("client", help="check via a running daemon (spawning one if needed)")
    cl.add_argument("file")
    cl.add_argument("--shadow", metavar="PATH", default=None)
    cl.add_argument("--port", type=int, default=None)
    cl.add_argument("--root", metavar="DIR", default=None)
    cl.add_argument("--no-spawn", action="store_true")
    cl.add_argument("--domains", type=_domains_arg, default=None)

    a = sub.add_parser("annotate", help="rewrite unresolved checks into run-time checks")
    a.add_argument("file")
    a.add_argument("-o", "--output", required=True)
    a.add_argument("--libdb", metavar="FILE", default=None)

    b = sub.add_parser("bench", help="synthetic incremental-vs-scratch benchmark")
    b.add_argument("--modules", type=int, default=25)
    b.add_argument("--clauses", type=int, default=5000)
    b.add_argument("--edits", type=int, default=20)
    b.add_argument("--domains", type=_domains_arg, default=ALL_DOMAINS)
    b.add_argument("--seed", type=int, default=7)
    b.add_argument("--workdir", default=None)
    b.add_argument("--kernels", action="store_true", help="benchmark pure vs compiled kernels instead")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "check":
        bad = entry_error_text(tuple(args.entry))
        if bad:
            print(bad, file=sys.stderr)
            return 2
        config = CheckerConfig(
            domains=args.domains,
            incremental=not args.no_incremental,
            strict_false=args.strict_false,
            db_dir=args.db,
            oracle_evidence=args.oracle,
        )
        try:
            diags, stats, _session = check_file(
                args.file, config, args.libdb, tuple(args.entry)
            )
        except OSError as e:
            print(f"cannot read {args.file}: {e}", file=sys.stderr)
            return 2
        if args.json:
            print(json.dumps([d.to_json() for d in diags], indent=1, sort_keys=True))
        else:
            for d in diags:
                print(d.render_line())
        return 1 if any(d.severity == "error" for d in diags) else 0

    if args.command == "daemon":
        config = CheckerConfig(db_dir=args.db)
        Daemon(config, port=args.port, assets_dir=args.assets, libdb_path=args.libdb).run()
        return 0

    if args.command == "client":
        return client_check(
            args.file,
            shadow=args.shadow,
            port=args.port,
            root=args.root,
            spawn=not args.no_spawn,
            domains=args.domains,
        )

    if args.command == "annotate":
        root = os.path.dirname(os.path.abspath(args.file)) or "."
        session = Session(root, CheckerConfig(), args.libdb)
        try:
            text = annotate_file(session, args.file)
        except OSError as e:
            print(f"cannot read {args.file}: {e}", file=sys.stderr)
            return 2
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"wrote {args.output}")
        return 0

    if args.command == "bench":
        from .bench import run_bench, run_kernel_bench

        if args.kernels:
            run_kernel_bench()
            return 0
        workdir = args.workdir or tempfile.mkdtemp(prefix="hornfly-bench-")
        run_bench(
            workdir,
            n_modules=args.modules,
            target_clauses=args.clauses,
            edits=args.edits,
            domains=args.domains,
            seed=args.seed,
        )
        print(f"workspace kept at {workdir}")
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
