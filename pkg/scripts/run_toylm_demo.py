#!/usr/bin/env python3
"""End-to-end demo against the built-in character-trigram model.

Generates a small natural dataset and its nonsense mirror, serves the
toy model over HTTP, scores both datasets through the real client/runner
path, and writes the analysis CSVs — a full dry run of the pipeline with
no external model service.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from modalbench.clients import HttpBackend
from modalbench.dataset import generate_dataset, read_items
from modalbench.reports import analyze
from modalbench.runner import run_evaluation
from modalbench.toylm import build_default_lm, start_server


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("toylm_demo"))
    parser.add_argument("--n", type=int, default=10, help="interpretations per form")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    generate_dataset(out / "natural.jsonl", families=("main24",), n=args.n, seed=args.seed)
    generate_dataset(
        out / "nonsense.jsonl",
        families=("main24",),
        n=args.n,
        seed=args.seed,
        lexicon_kind="nonsense",
    )

    print("training toy model...")
    server, _, endpoint = start_server(build_default_lm())
    try:
        backend = HttpBackend(endpoint=endpoint, model="toy-trigram")
        for name in ("natural", "nonsense"):
            items = read_items(out / f"{name}.jsonl")
            summary = run_evaluation(items, backend, out / f"results_{name}.jsonl")
            print(
                f"{name}: soft_accuracy={summary.mean_soft_accuracy:.4f} "
                f"greedy={summary.greedy_accuracy:.4f} "
                f"perplexity={summary.mean_prompt_perplexity:.3f}"
            )
    finally:
        server.shutdown()

    written = analyze(
        out / "natural.jsonl", [out / "results_natural.jsonl"], out / "reports"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
