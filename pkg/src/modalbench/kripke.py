"""Kripke models, satisfaction, and sequents for two consequence relations."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .formulas import And, Atom, Box, Diamond, Formula, FormulaError, Implies, Not, Or, parse


class Mode(enum.Enum):
    """Consequence relation: premises at one world vs at every world."""

    LOCAL = "local"
    GLOBAL = "global"


class FrameClass(enum.Enum):
    K = "k"            # no frame conditions
    REFLEXIVE = "t"    # every world accesses itself


@dataclass(frozen=True)
class KripkeModel:
    """Finite pointed model: world indices, edge set, per-world valuations."""

    worlds: tuple[int, ...]
    accessibility: frozenset[tuple[int, int]]
    valuation: dict[tuple[int, str], bool]
    designated: int

    def __post_init__(self) -> None:
        if self.designated not in self.worlds:
            raise ValueError("designated world not in model")
        for u, v in self.accessibility:
            if u not in self.worlds or v not in self.worlds:
                raise ValueError("accessibility edge outside worlds")

    def successors(self, w: int) -> list[int]:
        return [v for u, v in sorted(self.accessibility) if u == w]

    def is_reflexive(self) -> bool:
        return all((w, w) in self.accessibility for w in self.worlds)

    def describe(self) -> str:
        """Human-readable world/edge/valuation listing."""
        names = sorted({a for (_, a) in self.valuation})
        lines = []
        for w in self.worlds:
            true_atoms = [a for a in names if self.valuation.get((w, a), False)]
            mark = "*" if w == self.designated else " "
            succ = ",".join(f"w{v}" for v in self.successors(w)) or "-"
            lines.append(f"{mark}w{w}: {{{', '.join(true_atoms) or ''}}} -> {succ}")
        return "\n".join(lines)


def eval_at_world(model: KripkeModel, world: int, f: Formula) -> bool:
    """Standard Kripke satisfaction; atoms missing from the valuation are false."""
    if isinstance(f, Atom):
        return model.valuation.get((world, f.name), False)
    if isinstance(f, Not):
        return not eval_at_world(model, world, f.sub)
    if isinstance(f, Box):
        return all(eval_at_world(model, v, f.sub) for v in model.successors(world))
    if isinstance(f, Diamond):
        return any(eval_at_world(model, v, f.sub) for v in model.successors(world))
    if isinstance(f, Or):
        return eval_at_world(model, world, f.left) or eval_at_world(model, world, f.right)
    if isinstance(f, And):
        return eval_at_world(model, world, f.left) and eval_at_world(model, world, f.right)
    if isinstance(f, Implies):
        return (not eval_at_world(model, world, f.left)) or eval_at_world(model, world, f.right)
    raise FormulaError(f"cannot evaluate node {f!r}")


@dataclass(frozen=True)
class Sequent:
    premises: tuple[Formula, ...]
    conclusion: Formula
    mode: Mode = Mode.LOCAL
    frames: FrameClass = FrameClass.REFLEXIVE

    def atoms(self) -> frozenset[str]:
        from .formulas import atoms

        names: frozenset[str] = atoms(self.conclusion)
        for p in self.premises:
            names |= atoms(p)
        return names


@dataclass(frozen=True)
class Verdict:
    valid: bool
    countermodel: KripkeModel | None = None

    def __post_init__(self) -> None:
        if self.valid and self.countermodel is not None:
            raise ValueError("valid verdicts carry no countermodel")


def check_countermodel(sequent: Sequent, model: KripkeModel) -> bool:
    """Re-derive that a model refutes the sequent under its mode and frames."""
    if sequent.frames is FrameClass.REFLEXIVE and not model.is_reflexive():
        return False
    if sequent.mode is Mode.LOCAL:
        premises_ok = all(eval_at_world(model, model.designated, p) for p in sequent.premises)
    else:
        premises_ok = all(
            eval_at_world(model, w, p) for w in model.worlds for p in sequent.premises
        )
    return premises_ok and not eval_at_world(model, model.designated, sequent.conclusion)


def parse_sequent(
    text: str,
    mode: Mode = Mode.LOCAL,
    frames: FrameClass = FrameClass.REFLEXIVE,
) -> Sequent:
    """Parse `premise; premise |- conclusion` (premise list may be empty)."""
    if "|-" not in text:
        raise FormulaError("sequent must contain '|-'")
    left, _, right = text.partition("|-")
    if "|-" in right:
        raise FormulaError("sequent contains more than one '|-'")
    premises = tuple(parse(part) for part in left.split(";") if part.strip())
    return Sequent(premises, parse(right), mode, frames)
