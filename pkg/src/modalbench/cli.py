"""Command-line interface.

Subcommands mirror the workbench stages: ``generate`` datasets, ``prove``
one sequent, ``audit-catalog`` to re-verify every built-in form, ``eval``
a model, ``analyze`` results into CSVs, and ``serve`` the keypress study.
Failures print a single machine-parsable line ``error: <category>:
<detail>`` on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import sys
import threading
from pathlib import Path

from .catalog import audit_catalog, format_audit
from .clients import (
    BackendError,
    HttpBackend,
    OfflineBackend,
    OracleBackend,
    UniformBackend,
)
from .dataset import DatasetError, generate_dataset, read_items
from .formulas import FormulaError
from .kripke import FrameClass, Mode, parse_sequent
from .lexicon import LexiconError
from .metrics import DEFAULT_CANDIDATES
from .reports import ReportError, analyze
from .runner import run_evaluation
from .stats import StatsError
from .tableau import SearchLimitExceeded, decide
from .study import StudyStore, start_study_server

__all__ = ["main"]


class CliError(Exception):
    def __init__(self, category: str, detail: str) -> None:
        super().__init__(f"{category}: {detail}")
        self.category = category
        self.detail = detail


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalbench",
        description="Synthesize modal-logic questions, score models, analyze results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a question dataset as JSON lines")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument(
        "--families",
        default="main24",
        help="comma-separated: main24, necessitation, distribution",
    )
    p.add_argument("--n", type=int, default=1000, help="interpretations per form")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--lexicon", choices=("natural", "nonsense"), default="natural")

    p = sub.add_parser("prove", help="decide one sequent, e.g. 'p | q; ~p |- q'")
    p.add_argument("sequent")
    p.add_argument("--mode", choices=("local", "global"), default="local")
    p.add_argument("--frames", choices=("k", "t"), default="t")
    p.add_argument("--node-limit", type=int, default=None)

    sub.add_parser("audit-catalog", help="re-prove every built-in form's label")

    p = sub.add_parser("eval", help="score a dataset with a model backend")
    p.add_argument("--items", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--endpoint", help="scoring service URL")
    src.add_argument("--offline", type=Path, help="JSONL of precomputed scores")
    src.add_argument(
        "--builtin",
        choices=("uniform", "oracle"),
        help="synthetic backend, for pipeline checks",
    )
    p.add_argument("--model", default=None, help="model name sent to the endpoint")
    p.add_argument("--yes-candidate", default=DEFAULT_CANDIDATES[0])
    p.add_argument("--no-candidate", default=DEFAULT_CANDIDATES[1])
    p.add_argument("--no-echo", action="store_true", help="skip prompt perplexity")
    p.add_argument("--no-resume", action="store_true", help="ignore an existing journal")
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--limit", type=int, default=None, help="score only the first N items")

    p = sub.add_parser("analyze", help="write analysis CSVs from results files")
    p.add_argument("--items", required=True, type=Path)
    p.add_argument("--results", required=True, nargs="+", type=Path)
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--human", type=Path, default=None, help="keypress-study export")

    p = sub.add_parser("serve", help="run the keypress-study HTTP service")
    p.add_argument("--items", required=True, type=Path)
    p.add_argument("--journal", required=True, type=Path, help="append-only state file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=24)
    p.add_argument("--static", type=Path, default=None, help="directory with the browser UI")
    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    families = tuple(f.strip() for f in args.families.split(",") if f.strip())
    try:
        meta = generate_dataset(
            args.out, families=families, n=args.n, seed=args.seed, lexicon_kind=args.lexicon
        )
    except ValueError as exc:  # unknown family name reaches here via enum lookup
        raise CliError("data", str(exc)) from exc
    print(
        f"wrote {meta.item_count} items ({meta.yes_count} Yes) to {args.out} "
        f"[families={','.join(meta.families)} n={meta.n_interpretations} "
        f"seed={meta.seed} lexicon={meta.lexicon_kind}]"
    )
    return 0


def _cmd_prove(args: argparse.Namespace) -> int:
    mode = Mode.LOCAL if args.mode == "local" else Mode.GLOBAL
    frames = FrameClass.K if args.frames == "k" else FrameClass.REFLEXIVE
    try:
        sequent = parse_sequent(args.sequent, mode=mode, frames=frames)
    except FormulaError as exc:
        raise CliError("parse", str(exc)) from exc
    try:
        if args.node_limit is not None:
            verdict = decide(sequent, node_limit=args.node_limit)
        else:
            verdict = decide(sequent)
    except SearchLimitExceeded as exc:
        raise CliError("prover", f"search limit exceeded after {exc.nodes} nodes") from exc
    if verdict.valid:
        print("valid")
    else:
        print("invalid")
        assert verdict.countermodel is not None
        print(verdict.countermodel.describe())
    return 0


def _cmd_audit_catalog(_: argparse.Namespace) -> int:
    rows = audit_catalog()
    print(format_audit(rows))
    return 0 if all(r.label_ok for r in rows) else 1


def _cmd_eval(args: argparse.Namespace) -> int:
    try:
        items = read_items(args.items)
    except FileNotFoundError as exc:
        raise CliError("io", str(exc)) from exc
    except DatasetError as exc:
        raise CliError("data", str(exc)) from exc
    if args.limit is not None:
        items = items[: args.limit]
    if not items:
        raise CliError("data", f"no items in {args.items}")
    if args.endpoint:
        if not args.model:
            raise CliError("usage", "--endpoint requires --model")
        backend = HttpBackend(endpoint=args.endpoint, model=args.model, timeout=args.timeout)
    elif args.offline:
        try:
            backend = OfflineBackend(args.offline, model=args.model or "offline")
        except FileNotFoundError as exc:
            raise CliError("io", str(exc)) from exc
        except BackendError as exc:
            raise CliError("backend", str(exc)) from exc
    else:
        backend = (
            UniformBackend(model=args.model or "uniform")
            if args.builtin == "uniform"
            else OracleBackend(model=args.model or "oracle")
        )

    def progress(done: int, total: int) -> None:
        if done % 200 == 0 or done == total:
            print(f"  scored {done}/{total}", file=sys.stderr)

    try:
        summary = run_evaluation(
            items,
            backend,
            args.out,
            candidates=(args.yes_candidate, args.no_candidate),
            echo_prompt=not args.no_echo,
            resume=not args.no_resume,
            progress=progress,
        )
    except BackendError as exc:
        raise CliError("backend", str(exc)) from exc
    ppl = (
        f"{summary.mean_prompt_perplexity:.3f}"
        if summary.mean_prompt_perplexity is not None
        else "n/a"
    )
    print(
        f"model={summary.model} items={summary.n_items} "
        f"soft_accuracy={summary.mean_soft_accuracy:.4f} "
        f"greedy_accuracy={summary.greedy_accuracy:.4f} mean_perplexity={ppl} "
        f"-> {args.out}"
    )
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    try:
        written = analyze(
            args.items, list(args.results), args.out_dir, human_export_path=args.human
        )
    except FileNotFoundError as exc:
        raise CliError("io", str(exc)) from exc
    except (ReportError, DatasetError) as exc:
        raise CliError("analysis", str(exc)) from exc
    except StatsError as exc:
        raise CliError("analysis", str(exc)) from exc
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    try:
        items = read_items(args.items)
        store = StudyStore(items, args.journal, n_trials=args.trials, seed=args.seed)
    except FileNotFoundError as exc:
        raise CliError("io", str(exc)) from exc
    except (DatasetError, ValueError) as exc:
        raise CliError("data", str(exc)) from exc
    server, thread, base = start_study_server(
        store, host=args.host, port=args.port, static_dir=args.static
    )
    print(f"study service at {base} (journal: {args.journal})")
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        print("shutting down")
    finally:
        server.shutdown()
        store.close()
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "prove": _cmd_prove,
    "audit-catalog": _cmd_audit_catalog,
    "eval": _cmd_eval,
    "analyze": _cmd_analyze,
    "serve": _cmd_serve,
}

_CATEGORY_BY_TYPE = [
    (FormulaError, "parse"),
    (SearchLimitExceeded, "prover"),
    (BackendError, "backend"),
    ((DatasetError, LexiconError), "data"),
    ((StatsError, ReportError), "analysis"),
    ((FileNotFoundError, PermissionError, OSError), "io"),
]


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc.category}: {exc.detail}", file=sys.stderr)
        return 1
    except Exception as exc:  # uniform one-line reporting for known categories
        for types, category in _CATEGORY_BY_TYPE:
            if isinstance(exc, types):
                print(f"error: {category}: {exc}", file=sys.stderr)
                return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
