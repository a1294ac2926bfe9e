"""Dataset generation and JSONL round-tripping.

A dataset is the cross product of catalog forms with sampled
interpretations, written one item per line in catalog-major order (all
interpretations of the first form, then the second, ...).  Output is a
pure function of (families, n, seed, lexicon kind): the items file and its
meta sidecar contain no timestamps or machine state, so reruns are
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .catalog import entries_for_families
from .lexicon import make_nonsense_lexicon, natural_lexicon, sample_interpretations
from .realize import QuestionItem, realize_question

__all__ = [
    "DatasetError",
    "DatasetMeta",
    "generate_dataset",
    "meta_path_for",
    "read_items",
    "write_items",
]

LEXICON_KINDS = ("natural", "nonsense")


class DatasetError(ValueError):
    """Raised for invalid generation parameters or malformed item files."""


@dataclass(frozen=True)
class DatasetMeta:
    """Reproducibility sidecar: everything needed to regenerate the file."""

    families: tuple[str, ...]
    n_interpretations: int
    seed: int
    lexicon_kind: str
    item_count: int
    yes_count: int


def meta_path_for(items_path: str | Path) -> Path:
    return Path(f"{items_path}.meta.json")


def read_meta(items_path: str | Path) -> DatasetMeta:
    path = meta_path_for(items_path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        return DatasetMeta(
            families=tuple(raw["families"]),
            n_interpretations=raw["n_interpretations"],
            seed=raw["seed"],
            lexicon_kind=raw["lexicon_kind"],
            item_count=raw["item_count"],
            yes_count=raw["yes_count"],
        )
    except (OSError, ValueError, KeyError) as exc:
        raise DatasetError(f"cannot read dataset meta {path}: {exc}") from exc


_ITEM_KEYS = (
    "item_id",
    "form_id",
    "family",
    "modality",
    "arg_form",
    "ground_truth",
    "prompt",
    "lexicon_kind",
    "subjects",
    "verb_phrases",
)


def write_items(items: list[QuestionItem], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            record = {key: getattr(item, key) for key in _ITEM_KEYS}
            record["subjects"] = list(item.subjects)
            record["verb_phrases"] = list(item.verb_phrases)
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def read_items(path: str | Path) -> list[QuestionItem]:
    items: list[QuestionItem] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                items.append(
                    QuestionItem(
                        item_id=raw["item_id"],
                        form_id=raw["form_id"],
                        family=raw["family"],
                        modality=raw["modality"],
                        arg_form=raw["arg_form"],
                        ground_truth=raw["ground_truth"],
                        prompt=raw["prompt"],
                        lexicon_kind=raw["lexicon_kind"],
                        subjects=tuple(raw["subjects"]),
                        verb_phrases=tuple(raw["verb_phrases"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DatasetError(f"{path}:{lineno}: bad item line ({exc})") from exc
    return items


def generate_dataset(
    out_path: str | Path,
    families: tuple[str, ...] = ("main24",),
    n: int = 1000,
    seed: int = 42,
    lexicon_kind: str = "natural",
) -> DatasetMeta:
    """Generate the item file plus its meta sidecar; returns the meta."""
    if lexicon_kind not in LEXICON_KINDS:
        raise DatasetError(f"unknown lexicon kind {lexicon_kind!r}")
    entries = entries_for_families(list(families))
    if not entries:
        raise DatasetError(f"no catalog entries for families {families!r}")
    if lexicon_kind == "natural":
        lexicon = natural_lexicon()
    else:
        lexicon = make_nonsense_lexicon(seed=seed)
    interps = sample_interpretations(lexicon, n, seed=seed)
    items = [
        realize_question(entry, interp, index, lexicon_kind)
        for entry in entries
        for index, interp in enumerate(interps)
    ]
    out_path = Path(out_path)
    if out_path.parent != Path(""):
        out_path.parent.mkdir(parents=True, exist_ok=True)
    write_items(items, out_path)
    meta = DatasetMeta(
        families=tuple(families),
        n_interpretations=n,
        seed=seed,
        lexicon_kind=lexicon_kind,
        item_count=len(items),
        yes_count=sum(item.ground_truth == "Yes" for item in items),
    )
    with open(meta_path_for(out_path), "w", encoding="utf-8") as fh:
        json.dump(asdict(meta), fh, indent=2)
        fh.write("\n")
    return meta
