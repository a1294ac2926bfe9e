#!/usr/bin/env python3
"""Run the keypress-study service with sensible defaults.

Generates a default item set next to the journal if --items is omitted,
then serves the study API (and the browser UI when --static points at a
built bundle).
"""

from __future__ import annotations

import argparse
import threading
from pathlib import Path

from modalbench.dataset import generate_dataset, read_items
from modalbench.study import StudyStore, start_study_server


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--items", type=Path, default=None)
    parser.add_argument("--journal", type=Path, default=Path("study_journal.jsonl"))
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--trials", type=int, default=24)
    parser.add_argument("--static", type=Path, default=None)
    args = parser.parse_args()

    items_path = args.items
    if items_path is None:
        items_path = args.journal.parent / "study_items.jsonl"
        if not items_path.exists():
            meta = generate_dataset(
                items_path, families=("main24",), n=50, seed=args.seed
            )
            print(f"generated {meta.item_count} items at {items_path}")

    store = StudyStore(
        read_items(items_path), args.journal, n_trials=args.trials, seed=args.seed
    )
    server, _, base = start_study_server(
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


if __name__ == "__main__":
    raise SystemExit(main())
