"""Rendering logical forms as English questions.

Every formula shape used by the built-in catalog maps to a fixed clause
template; templates are byte-exact contracts, covered by golden tests, so
any edit here is a dataset-breaking change.  Clauses are lowercase;
sentence casing and the final period are added only when a clause becomes
a premise line.  The question clause stays lowercase because it is spliced
mid-sentence into the question line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import CatalogEntry, Modality
from .formulas import Atom, Box, Diamond, Formula, Implies, Not, Or, render, substitute
from .lexicon import Interpretation

__all__ = [
    "QuestionItem",
    "RealizationError",
    "build_prompt",
    "clause",
    "realize_question",
    "realize_statement",
    "sentence",
]


class RealizationError(ValueError):
    """Raised when a formula has no English template."""


def realize_statement(modality: Modality, negated: bool, subject: str, verb_phrase: str) -> str:
    """The six base clause templates: modality x polarity over one atom."""
    if modality is Modality.NONE:
        if negated:
            return f"{subject} isn't {verb_phrase}"
        return f"{subject} is {verb_phrase}"
    if modality is Modality.NECESSITY:
        if negated:
            return f"it's uncertain whether {subject} is {verb_phrase}"
        return f"it's certain that {subject} is {verb_phrase}"
    if negated:
        return f"it's impossible that {subject} is {verb_phrase}"
    return f"it's possible that {subject} is {verb_phrase}"


def _reading(atom: Atom, interp: Interpretation) -> tuple[str, str]:
    if atom.name == "p":
        return interp.first
    if atom.name == "q":
        return interp.second
    raise RealizationError(f"no interpretation for atom {atom.name!r}")


def clause(f: Formula, interp: Interpretation) -> str:
    """Render a formula as a lowercase English clause.

    Modal operators scoped over a bare negation keep an inner "is not"
    ("it's certain that X is not ..."), unlike the contracted propositional
    "isn't"; a modal scoped over a disjunction is read as the conditional
    "if not-left, then right" to keep the scope unambiguous in English.
    """
    if isinstance(f, Atom):
        s, vp = _reading(f, interp)
        return realize_statement(Modality.NONE, False, s, vp)
    if isinstance(f, Not):
        inner = f.sub
        if isinstance(inner, Atom):
            s, vp = _reading(inner, interp)
            return realize_statement(Modality.NONE, True, s, vp)
        if isinstance(inner, Box) and isinstance(inner.sub, Atom):
            s, vp = _reading(inner.sub, interp)
            return realize_statement(Modality.NECESSITY, True, s, vp)
        if isinstance(inner, Diamond) and isinstance(inner.sub, Atom):
            s, vp = _reading(inner.sub, interp)
            return realize_statement(Modality.POSSIBILITY, True, s, vp)
    if isinstance(f, (Box, Diamond)):
        head = "it's certain that" if isinstance(f, Box) else "it's possible that"
        inner = f.sub
        if isinstance(inner, Atom):
            s, vp = _reading(inner, interp)
            return f"{head} {s} is {vp}"
        if isinstance(inner, Not) and isinstance(inner.sub, Atom):
            s, vp = _reading(inner.sub, interp)
            return f"{head} {s} is not {vp}"
        if isinstance(inner, Or) and isinstance(inner.left, Atom) and isinstance(inner.right, Atom):
            s1, vp1 = _reading(inner.left, interp)
            s2, vp2 = _reading(inner.right, interp)
            return f"{head} if {s1} is not {vp1}, then {s2} is {vp2}"
    if isinstance(f, Or):
        return f"{clause(f.left, interp)} or {clause(f.right, interp)}"
    if isinstance(f, Implies):
        return f"if {clause(f.left, interp)}, then {clause(f.right, interp)}"
    raise RealizationError(f"no clause template for {render(f)}")


def sentence(f: Formula, interp: Interpretation) -> str:
    """A premise line: the clause with sentence casing and a period."""
    text = clause(f, interp)
    return text[0].upper() + text[1:] + "."


_HEADER = "Consider the following statements:"
_QUESTION_PREFIX = "Question: Based on these statements, can we infer that "
_ANSWER_CUE = "Answer:"


def build_prompt(premises: list[str], conclusion_clause: str) -> str:
    """Assemble the full prompt; no trailing newline after the answer cue."""
    lines = [_HEADER, *premises]
    lines.append(f"{_QUESTION_PREFIX}{conclusion_clause}?")
    lines.append(_ANSWER_CUE)
    return "\n".join(lines)


@dataclass(frozen=True)
class QuestionItem:
    """One rendered question with its provenance and verified answer."""

    item_id: str
    form_id: str
    family: str
    modality: str
    arg_form: str
    ground_truth: str
    prompt: str
    lexicon_kind: str
    subjects: tuple[str, str]
    verb_phrases: tuple[str, str]

    @property
    def statements(self) -> list[str]:
        lines = self.prompt.split("\n")
        return lines[1:-2]

    @property
    def question(self) -> str:
        return self.prompt.split("\n")[-2]


def realize_question(
    entry: CatalogEntry,
    interp: Interpretation,
    index: int = 0,
    lexicon_kind: str = "natural",
) -> QuestionItem:
    """Instantiate a catalog form with an interpretation and build the item."""
    premise_formulas = [substitute(t, entry.phi, entry.psi) for t in entry.premises]
    conclusion_formula = substitute(entry.conclusion, entry.phi, entry.psi)
    prompt = build_prompt(
        [sentence(f, interp) for f in premise_formulas],
        clause(conclusion_formula, interp),
    )
    return QuestionItem(
        item_id=f"{entry.entry_id}.{index:04d}",
        form_id=entry.entry_id,
        family=entry.family.value,
        modality=entry.modality.value,
        arg_form=entry.arg_form.merged,
        ground_truth=entry.label,
        prompt=prompt,
        lexicon_kind=lexicon_kind,
        subjects=interp.subjects,
        verb_phrases=interp.verb_phrases,
    )
