"""Scoring backends: where answer-token log-probabilities come from.

Every backend answers the same question — "given this prompt, how likely
is each candidate continuation, and (optionally) how surprising was the
prompt itself" — so the runner and all downstream analysis are agnostic
to whether scores come from a live HTTP endpoint, a precomputed file, or
a synthetic source used in tests.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import requests

from .realize import QuestionItem

__all__ = [
    "BackendError",
    "HttpBackend",
    "OfflineBackend",
    "OracleBackend",
    "ScoreResult",
    "ScoringBackend",
    "UniformBackend",
]


class BackendError(RuntimeError):
    """A backend could not produce scores for an item."""


@dataclass(frozen=True)
class ScoreResult:
    """Log-probabilities for each candidate, plus prompt tokens if echoed."""

    candidate_logprobs: tuple[float, ...]
    prompt_token_logprobs: tuple[float, ...] | None = None


class ScoringBackend(Protocol):
    model: str

    def score_item(
        self, item: QuestionItem, candidates: tuple[str, ...], echo_prompt: bool
    ) -> ScoreResult: ...


@dataclass
class UniformBackend:
    """Every candidate equally likely; every prompt token has probability 1/2.

    The degenerate no-signal reference point: renormalized answer
    probability is exactly 0.5 and prompt perplexity is exactly 2.
    """

    model: str = "uniform"

    def score_item(
        self, item: QuestionItem, candidates: tuple[str, ...], echo_prompt: bool
    ) -> ScoreResult:
        logp = math.log(1.0 / len(candidates))
        prompt_logps = None
        if echo_prompt:
            n_tokens = max(1, len(item.prompt.split()))
            prompt_logps = (-math.log(2.0),) * n_tokens
        return ScoreResult((logp,) * len(candidates), prompt_logps)


@dataclass
class OracleBackend:
    """Answers from the verified label at a fixed confidence.

    A synthetic "model" for pipeline tests: it knows the ground truth and
    assigns ``confidence`` to it, so accuracy metrics have a known target.
    """

    confidence: float = 0.9
    model: str = "oracle"

    def __post_init__(self) -> None:
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must be strictly between 0 and 1")

    def score_item(
        self, item: QuestionItem, candidates: tuple[str, ...], echo_prompt: bool
    ) -> ScoreResult:
        right = math.log(self.confidence)
        wrong = math.log(1.0 - self.confidence)
        logps = []
        for cand in candidates:
            is_yes = cand.strip().lower() == "yes"
            hit = (item.ground_truth == "Yes") == is_yes
            logps.append(right if hit else wrong)
        prompt_logps = None
        if echo_prompt:
            n_tokens = max(1, len(item.prompt.split()))
            prompt_logps = (-1.0,) * n_tokens
        return ScoreResult(tuple(logps), prompt_logps)


class OfflineBackend:
    """Scores precomputed elsewhere, keyed by item id.

    File format: JSON lines with ``item_id``, ``logp_yes``, ``logp_no``,
    and optional ``prompt_token_logps``.  Candidate order is mapped by
    Yes/No membership, so the file never needs to know the exact candidate
    strings used at runtime.
    """

    def __init__(self, path: str | Path, model: str = "offline") -> None:
        self.model = model
        self._scores: dict[str, tuple[float, float, tuple[float, ...] | None]] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    toks = raw.get("prompt_token_logps")
                    self._scores[raw["item_id"]] = (
                        float(raw["logp_yes"]),
                        float(raw["logp_no"]),
                        tuple(float(t) for t in toks) if toks is not None else None,
                    )
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise BackendError(f"{path}:{lineno}: bad score line ({exc})") from exc

    def score_item(
        self, item: QuestionItem, candidates: tuple[str, ...], echo_prompt: bool
    ) -> ScoreResult:
        try:
            logp_yes, logp_no, prompt_logps = self._scores[item.item_id]
        except KeyError:
            raise BackendError(f"no offline score for item {item.item_id}") from None
        logps = tuple(
            logp_yes if cand.strip().lower() == "yes" else logp_no for cand in candidates
        )
        return ScoreResult(logps, prompt_logps if echo_prompt else None)


@dataclass
class HttpBackend:
    """Scores from a JSON-over-HTTP completion-scoring endpoint.

    Request: ``{"model", "prompt", "candidates", "echo_prompt"}``.
    Response: ``{"candidate_logprobs": [...]}`` plus
    ``"prompt_token_logprobs"`` when the prompt was echoed.  Transient
    failures (connection errors, 5xx, 429) are retried with exponential
    backoff; anything else fails fast.
    """

    endpoint: str
    model: str
    timeout: float = 30.0
    max_retries: int = 4
    backoff: float = 0.5
    session: requests.Session = field(default_factory=requests.Session, repr=False)

    def score_item(
        self, item: QuestionItem, candidates: tuple[str, ...], echo_prompt: bool
    ) -> ScoreResult:
        payload = {
            "model": self.model,
            "prompt": item.prompt,
            "candidates": list(candidates),
            "echo_prompt": echo_prompt,
        }
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.session.post(self.endpoint, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 500 or resp.status_code == 429:
                last_error = BackendError(f"HTTP {resp.status_code} from {self.endpoint}")
                continue
            if resp.status_code != 200:
                raise BackendError(
                    f"HTTP {resp.status_code} from {self.endpoint}: {resp.text[:200]}"
                )
            return self._parse(resp, candidates, echo_prompt)
        raise BackendError(
            f"endpoint {self.endpoint} failed after {self.max_retries + 1} attempts: {last_error}"
        )

    def _parse(
        self, resp: requests.Response, candidates: tuple[str, ...], echo_prompt: bool
    ) -> ScoreResult:
        try:
            body = resp.json()
            logps = tuple(float(x) for x in body["candidate_logprobs"])
        except (ValueError, KeyError, TypeError) as exc:
            raise BackendError(f"malformed response from {self.endpoint}: {exc}") from exc
        if len(logps) != len(candidates):
            raise BackendError(
                f"endpoint returned {len(logps)} candidate scores, expected {len(candidates)}"
            )
        prompt_logps = None
        if echo_prompt:
            raw = body.get("prompt_token_logprobs")
            if raw is not None:
                try:
                    prompt_logps = tuple(float(x) for x in raw)
                except (TypeError, ValueError) as exc:
                    raise BackendError(
                        f"malformed prompt_token_logprobs from {self.endpoint}: {exc}"
                    ) from exc
        return ScoreResult(logps, prompt_logps)
