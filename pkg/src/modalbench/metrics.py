"""Scoring metrics over answer-token log-probabilities.

All metrics treat the answer distribution as the two-way renormalization
of p(Yes) and p(No) given the prompt, so models are never penalized for
probability mass spent on other continuations.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

__all__ = [
    "DEFAULT_CANDIDATES",
    "greedy_answer",
    "mean",
    "normalized_yes_probability",
    "perplexity",
    "soft_accuracy",
]

# Leading space: the answer continues the prompt right after "Answer:",
# and causal tokenizers fold the space into the word token.
DEFAULT_CANDIDATES = (" Yes", " No")


def normalized_yes_probability(logp_yes: float, logp_no: float) -> float:
    """p(Yes) / (p(Yes) + p(No)), computed stably in log space."""
    m = max(logp_yes, logp_no)
    wy = math.exp(logp_yes - m)
    wn = math.exp(logp_no - m)
    return wy / (wy + wn)


def soft_accuracy(logp_yes: float, logp_no: float, ground_truth: str) -> float:
    """Probability assigned to the verified answer after renormalization."""
    p_yes = normalized_yes_probability(logp_yes, logp_no)
    if ground_truth == "Yes":
        return p_yes
    if ground_truth == "No":
        return 1.0 - p_yes
    raise ValueError(f"ground truth must be 'Yes' or 'No', got {ground_truth!r}")


def greedy_answer(logp_yes: float, logp_no: float) -> str:
    """Argmax answer; exact ties resolve to "Yes"."""
    return "Yes" if logp_yes >= logp_no else "No"


def perplexity(token_logps: Sequence[float]) -> float:
    """exp(-mean(log p)) over the prompt's token log-probabilities."""
    if len(token_logps) == 0:
        raise ValueError("perplexity needs at least one token log-probability")
    return math.exp(-sum(token_logps) / len(token_logps))


def mean(values: Sequence[float]) -> float:
    if len(values) == 0:
        raise ValueError("mean of empty sequence")
    return sum(values) / len(values)
