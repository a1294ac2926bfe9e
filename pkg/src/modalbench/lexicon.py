"""Lexicons of subjects and activities, and interpretation sampling.

An *interpretation* assigns a concrete (subject, ongoing-activity) pair to
each of the two atoms appearing in a question form.  The natural lexicon is
a bundled list of common first names and everyday progressive verb phrases;
the nonsense lexicon keeps real names but swaps the activities for
pronounceable pseudo-word phrases, so that surface plausibility is removed
while sentence structure stays intact.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

__all__ = [
    "Interpretation",
    "Lexicon",
    "LexiconError",
    "make_nonsense_lexicon",
    "natural_lexicon",
    "sample_interpretations",
]


class LexiconError(ValueError):
    """Raised for malformed lexicon data or unsatisfiable sampling requests."""


@dataclass(frozen=True)
class Interpretation:
    """Concrete readings for the two atoms of a question form.

    ``first`` interprets atom ``p`` and ``second`` interprets atom ``q``;
    each is a ``(subject, verb_phrase)`` pair.  Subjects and verb phrases
    must be pairwise distinct so the two clauses of a question never
    collapse into one another.
    """

    first: tuple[str, str]
    second: tuple[str, str]

    def __post_init__(self) -> None:
        if self.first[0] == self.second[0]:
            raise LexiconError(f"interpretation reuses subject {self.first[0]!r}")
        if self.first[1] == self.second[1]:
            raise LexiconError(f"interpretation reuses verb phrase {self.first[1]!r}")

    @property
    def subjects(self) -> tuple[str, str]:
        return (self.first[0], self.second[0])

    @property
    def verb_phrases(self) -> tuple[str, str]:
        return (self.first[1], self.second[1])


@dataclass(frozen=True)
class Lexicon:
    names: tuple[str, ...]
    verb_phrases: tuple[str, ...]
    kind: str = "natural"

    def __post_init__(self) -> None:
        if len(self.names) < 2:
            raise LexiconError("lexicon needs at least two names")
        if len(self.verb_phrases) < 2:
            raise LexiconError("lexicon needs at least two verb phrases")
        if len(set(self.names)) != len(self.names):
            raise LexiconError("lexicon names contain duplicates")
        if len(set(self.verb_phrases)) != len(self.verb_phrases):
            raise LexiconError("lexicon verb phrases contain duplicates")

    @classmethod
    def load(cls, path: str | Path) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        try:
            return cls(
                names=tuple(raw["names"]),
                verb_phrases=tuple(raw["verb_phrases"]),
                kind=raw.get("kind", "natural"),
            )
        except KeyError as exc:
            raise LexiconError(f"lexicon file missing key {exc}") from exc

    def save(self, path: str | Path) -> None:
        payload = {
            "kind": self.kind,
            "names": list(self.names),
            "verb_phrases": list(self.verb_phrases),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2)
            fh.write("\n")


def natural_lexicon() -> Lexicon:
    """Load the bundled natural lexicon."""
    data = resources.files("modalbench.data").joinpath("natural_lexicon.json")
    raw = json.loads(data.read_text(encoding="utf-8"))
    return Lexicon(
        names=tuple(raw["names"]),
        verb_phrases=tuple(raw["verb_phrases"]),
        kind="natural",
    )


# Building blocks for pronounceable pseudo-words: simple onset+vowel
# syllables, so stems read like "balar" or "sweel" rather than random
# letter soup.
_ONSETS = (
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
    "bl", "br", "cl", "cr", "dr", "fl", "fr", "gl", "gr", "pl", "pr",
    "sk", "sl", "sm", "sn", "sp", "st", "sw", "tr",
)
_VOWELS = ("a", "e", "i", "o", "u", "ee", "oo", "ai", "ea")
_CODAS = ("", "l", "n", "r", "m", "t", "s")


def _pseudo_stem(rng: random.Random, syllables: int) -> str:
    parts = []
    for _ in range(syllables):
        parts.append(rng.choice(_ONSETS) + rng.choice(_VOWELS))
    return "".join(parts) + rng.choice(_CODAS)


def make_nonsense_lexicon(n_phrases: int = 216, seed: int = 42) -> Lexicon:
    """Build a lexicon of pseudo-word activities attached to real names.

    Verb stems are generated from CV syllables and suffixed with ``-ing``;
    objects are pseudo-nouns, singular with an article or bare plural.  Any
    stem whose gerund collides with a verb used by the natural lexicon is
    rejected, so "nonsense" phrases never accidentally read as natural ones.
    Deterministic for a given ``seed``.
    """
    if n_phrases < 2:
        raise LexiconError("nonsense lexicon needs at least two phrases")
    base = natural_lexicon()
    real_gerunds = {vp.split()[0] for vp in base.verb_phrases}
    rng = random.Random(seed)
    phrases: list[str] = []
    seen: set[str] = set()
    while len(phrases) < n_phrases:
        stem = _pseudo_stem(rng, 2)
        gerund = stem + "ing"
        if gerund in real_gerunds:
            continue
        noun = _pseudo_stem(rng, rng.choice((2, 3)))
        if rng.random() < 0.5:
            article = "an" if noun[0] in "aeiou" else "a"
            phrase = f"{gerund} {article} {noun}"
        else:
            plural = noun + ("es" if noun.endswith("s") else "s")
            phrase = f"{gerund} {plural}"
        if phrase in seen:
            continue
        seen.add(phrase)
        phrases.append(phrase)
    return Lexicon(names=base.names, verb_phrases=tuple(phrases), kind="nonsense")


def sample_interpretations(
    lexicon: Lexicon, n: int, seed: int = 42
) -> list[Interpretation]:
    """Draw ``n`` interpretations without within-item repetition.

    Each draw picks two distinct names and two distinct verb phrases
    uniformly from the lexicon.  Draws are independent across items, so
    the same subject may recur in different items.  Deterministic for a
    given ``seed``.
    """
    if n <= 0:
        raise LexiconError(f"number of interpretations must be positive, got {n}")
    rng = random.Random(seed)
    out: list[Interpretation] = []
    for _ in range(n):
        name_a, name_b = rng.sample(lexicon.names, 2)
        vp_a, vp_b = rng.sample(lexicon.verb_phrases, 2)
        out.append(Interpretation(first=(name_a, vp_a), second=(name_b, vp_b)))
    return out
