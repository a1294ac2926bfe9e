"""Evaluation runner: journaled scoring with resume.

Every scored item is appended to the results file before the next request
is issued, so an interrupted run loses at most the in-flight item.  On
resume, journal lines whose content hash still matches the current item
(same model, prompt, candidates, echo setting) are trusted and skipped;
stale lines are re-scored.  When the run completes, the file is rewritten
with responses sorted by item id followed by a single aggregate line.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

from .clients import ScoringBackend
from .metrics import (
    DEFAULT_CANDIDATES,
    greedy_answer,
    mean,
    perplexity,
    soft_accuracy,
)
from .realize import QuestionItem

__all__ = ["EvalSummary", "Response", "content_hash", "run_evaluation", "read_results"]


def content_hash(
    model: str, prompt: str, candidates: tuple[str, ...], echo_prompt: bool
) -> str:
    blob = json.dumps(
        {"model": model, "prompt": prompt, "candidates": list(candidates), "echo": echo_prompt},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Response:
    """One scored item as recorded in the results journal."""

    item_id: str
    model: str
    logp_yes: float
    logp_no: float
    prompt_perplexity: float | None
    soft_accuracy: float
    greedy: str
    greedy_correct: bool
    content_hash: str

    def to_json(self) -> dict:
        return {"kind": "response", **self.__dict__}

    @classmethod
    def from_json(cls, raw: dict) -> "Response":
        return cls(
            item_id=raw["item_id"],
            model=raw["model"],
            logp_yes=float(raw["logp_yes"]),
            logp_no=float(raw["logp_no"]),
            prompt_perplexity=(
                float(raw["prompt_perplexity"])
                if raw.get("prompt_perplexity") is not None
                else None
            ),
            soft_accuracy=float(raw["soft_accuracy"]),
            greedy=raw["greedy"],
            greedy_correct=bool(raw["greedy_correct"]),
            content_hash=raw["content_hash"],
        )


@dataclass(frozen=True)
class EvalSummary:
    model: str
    n_items: int
    n_scored: int  # freshly scored this run (rest came from the journal)
    mean_soft_accuracy: float
    greedy_accuracy: float
    mean_prompt_perplexity: float | None

    def to_json(self) -> dict:
        return {"kind": "aggregate", **self.__dict__}


def _yes_no_logps(
    candidates: tuple[str, ...], logps: tuple[float, ...]
) -> tuple[float, float]:
    logp_yes = logp_no = None
    for cand, logp in zip(candidates, logps):
        stripped = cand.strip().lower()
        if stripped == "yes" and logp_yes is None:
            logp_yes = logp
        elif stripped == "no" and logp_no is None:
            logp_no = logp
    if logp_yes is None or logp_no is None:
        raise ValueError(f"candidates {candidates!r} must include a Yes and a No reading")
    return logp_yes, logp_no


def _load_journal(path: Path) -> list[Response]:
    responses: list[Response] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError:
                continue  # torn tail write from an interrupted run
            if raw.get("kind") != "response":
                continue
            try:
                responses.append(Response.from_json(raw))
            except (KeyError, TypeError, ValueError):
                continue
    return responses


def run_evaluation(
    items: Sequence[QuestionItem],
    backend: ScoringBackend,
    out_path: str | Path,
    candidates: tuple[str, ...] = DEFAULT_CANDIDATES,
    echo_prompt: bool = True,
    resume: bool = True,
    progress: Callable[[int, int], None] | None = None,
) -> EvalSummary:
    """Score every item, journaling as it goes; returns the aggregate.

    ``progress`` (if given) is called as ``progress(done, total)`` after
    each item.
    """
    out_path = Path(out_path)
    if out_path.parent != Path(""):
        out_path.parent.mkdir(parents=True, exist_ok=True)

    hashes = {
        item.item_id: content_hash(backend.model, item.prompt, candidates, echo_prompt)
        for item in items
    }
    done: dict[str, Response] = {}
    if resume and out_path.exists():
        for resp in _load_journal(out_path):
            if hashes.get(resp.item_id) == resp.content_hash:
                done[resp.item_id] = resp

    n_scored = 0
    mode = "a" if done else "w"
    with open(out_path, mode, encoding="utf-8") as fh:
        for idx, item in enumerate(items):
            if item.item_id in done:
                if progress:
                    progress(idx + 1, len(items))
                continue
            result = backend.score_item(item, candidates, echo_prompt)
            logp_yes, logp_no = _yes_no_logps(candidates, result.candidate_logprobs)
            ppl = None
            if result.prompt_token_logprobs:
                ppl = perplexity(result.prompt_token_logprobs)
            answer = greedy_answer(logp_yes, logp_no)
            resp = Response(
                item_id=item.item_id,
                model=backend.model,
                logp_yes=logp_yes,
                logp_no=logp_no,
                prompt_perplexity=ppl,
                soft_accuracy=soft_accuracy(logp_yes, logp_no, item.ground_truth),
                greedy=answer,
                greedy_correct=answer == item.ground_truth,
                content_hash=hashes[item.item_id],
            )
            fh.write(json.dumps(resp.to_json(), ensure_ascii=False))
            fh.write("\n")
            fh.flush()
            done[item.item_id] = resp
            n_scored += 1
            if progress:
                progress(idx + 1, len(items))

    ordered = [done[item.item_id] for item in items]
    ppls = [r.prompt_perplexity for r in ordered if r.prompt_perplexity is not None]
    summary = EvalSummary(
        model=backend.model,
        n_items=len(ordered),
        n_scored=n_scored,
        mean_soft_accuracy=mean([r.soft_accuracy for r in ordered]),
        greedy_accuracy=mean([1.0 if r.greedy_correct else 0.0 for r in ordered]),
        mean_prompt_perplexity=mean(ppls) if ppls else None,
    )
    with open(out_path, "w", encoding="utf-8") as fh:
        for resp in sorted(ordered, key=lambda r: r.item_id):
            fh.write(json.dumps(resp.to_json(), ensure_ascii=False))
            fh.write("\n")
        fh.write(json.dumps(summary.to_json(), ensure_ascii=False))
        fh.write("\n")
    return summary


def read_results(path: str | Path) -> tuple[list[Response], EvalSummary | None]:
    """Load a results file: responses plus the aggregate line if present."""
    responses: list[Response] = []
    summary: EvalSummary | None = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            if raw.get("kind") == "response":
                responses.append(Response.from_json(raw))
            elif raw.get("kind") == "aggregate":
                summary = EvalSummary(
                    model=raw["model"],
                    n_items=int(raw["n_items"]),
                    n_scored=int(raw["n_scored"]),
                    mean_soft_accuracy=float(raw["mean_soft_accuracy"]),
                    greedy_accuracy=float(raw["greedy_accuracy"]),
                    mean_prompt_perplexity=(
                        float(raw["mean_prompt_perplexity"])
                        if raw.get("mean_prompt_perplexity") is not None
                        else None
                    ),
                )
    return responses, summary
