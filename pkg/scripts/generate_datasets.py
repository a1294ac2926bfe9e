#!/usr/bin/env python3
"""Generate the standard datasets: natural items plus the nonsense mirror.

Writes four files into --out-dir: the main natural dataset, its
pseudo-word mirror (same forms and seed, nonsense activities), and the
two auxiliary families rendered with the natural lexicon.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from modalbench.dataset import generate_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("data"))
    parser.add_argument("--n", type=int, default=1000, help="interpretations per form")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [
        ("main_natural.jsonl", ("main24",), "natural"),
        ("main_nonsense.jsonl", ("main24",), "nonsense"),
        ("necessitation.jsonl", ("necessitation",), "natural"),
        ("distribution.jsonl", ("distribution",), "natural"),
    ]
    for filename, families, lexicon in jobs:
        out = args.out_dir / filename
        meta = generate_dataset(
            out, families=families, n=args.n, seed=args.seed, lexicon_kind=lexicon
        )
        print(f"{out}: {meta.item_count} items, {meta.yes_count} Yes")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
