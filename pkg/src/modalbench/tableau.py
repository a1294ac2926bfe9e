"""Tableau decision procedure for local and global consequence over K and T."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .formulas import And, Atom, Box, Diamond, Formula, FormulaError, Implies, Not, Or, render
from .kripke import FrameClass, KripkeModel, Mode, Sequent, Verdict, check_countermodel

DEFAULT_NODE_LIMIT = 200_000


class SearchLimitExceeded(RuntimeError):
    """The tableau exceeded its node budget; no verdict was reached."""

    def __init__(self, nodes: int):
        super().__init__(f"tableau search exceeded {nodes} nodes")
        self.nodes = nodes


def nnf(f: Formula) -> Formula:
    """Negation normal form: negation pushed to atoms, implication eliminated."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Box):
        return Box(nnf(f.sub))
    if isinstance(f, Diamond):
        return Diamond(nnf(f.sub))
    if isinstance(f, Or):
        return Or(nnf(f.left), nnf(f.right))
    if isinstance(f, And):
        return And(nnf(f.left), nnf(f.right))
    if isinstance(f, Implies):
        return Or(nnf(Not(f.left)), nnf(f.right))
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, Atom):
            return f
        if isinstance(g, Not):
            return nnf(g.sub)
        if isinstance(g, Box):
            return Diamond(nnf(Not(g.sub)))
        if isinstance(g, Diamond):
            return Box(nnf(Not(g.sub)))
        if isinstance(g, Or):
            return And(nnf(Not(g.left)), nnf(Not(g.right)))
        if isinstance(g, And):
            return Or(nnf(Not(g.left)), nnf(Not(g.right)))
        if isinstance(g, Implies):
            return And(nnf(g.left), nnf(Not(g.right)))
    raise FormulaError(f"cannot normalize node {f!r}")


def _complement(lit: Formula) -> Formula:
    return lit.sub if isinstance(lit, Not) else Not(lit)


def _is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.sub, Atom))


def _saturations(seed: frozenset[Formula], reflexive: bool) -> Iterator[frozenset[Formula]]:
    """All fully expanded, clash-free extensions of an NNF formula set.

    Conjunctions are unpacked, disjunctions branch (depth-first, left branch
    first), and under reflexive frames every boxed formula also asserts its
    body locally. Order is deterministic: the worklist is seeded in render
    order and processed last-in-first-out.
    """

    def go(done: frozenset[Formula], todo: tuple[Formula, ...]) -> Iterator[frozenset[Formula]]:
        current = set(done)
        work = list(todo)
        while work:
            f = work.pop()
            if f in current:
                continue
            if _is_literal(f):
                if _complement(f) in current:
                    return  # clash: dead branch
                current.add(f)
            elif isinstance(f, And):
                current.add(f)
                work.append(f.left)
                work.append(f.right)
            elif isinstance(f, Box):
                current.add(f)
                if reflexive:
                    work.append(f.sub)
            elif isinstance(f, Diamond):
                current.add(f)
            elif isinstance(f, Or):
                current.add(f)
                if f.left not in current and f.right not in current:
                    for disjunct in (f.left, f.right):
                        yield from go(frozenset(current), tuple(work) + (disjunct,))
                    return
            else:
                raise FormulaError(f"non-NNF node in tableau: {f!r}")
        yield frozenset(current)

    return go(frozenset(), tuple(sorted(seed, key=render, reverse=True)))


@dataclass
class _Tree:
    """One open tableau world: its saturated label and a child per diamond."""

    label: frozenset[Formula]
    children: list["_Tree | int"]  # int = depth of a blocking ancestor


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise SearchLimitExceeded(self.limit)


def _sat(
    seed: frozenset[Formula],
    global_assumptions: frozenset[Formula],
    ancestors: tuple[frozenset[Formula], ...],
    reflexive: bool,
    budget: _Budget,
) -> _Tree | int | None:
    """Search for a satisfying world for `seed` (plus the global assumptions).

    Returns a _Tree on success, an ancestor depth when this world is blocked
    by a superset ancestor (the model construction redirects the incoming
    edge there), or None when every saturation closes. Ancestor-subset
    blocking keeps the search finite in the presence of global assumptions;
    soundness rests on labels being closed under the same saturation rules,
    so a blocked world's requirements all hold at its blocker.
    """
    for label in _saturations(seed | global_assumptions, reflexive):
        budget.spend()
        blocked = next((d for d, anc in enumerate(ancestors) if label <= anc), None)
        if blocked is not None:
            return blocked
        boxes = frozenset(f.sub for f in label if isinstance(f, Box))
        diamonds = sorted((f for f in label if isinstance(f, Diamond)), key=render)
        children: list[_Tree | int] = []
        for d in diamonds:
            child = _sat(
                frozenset((d.sub,)) | boxes,
                global_assumptions,
                ancestors + (label,),
                reflexive,
                budget,
            )
            if child is None:
                break
            children.append(child)
        else:
            return _Tree(label, children)
    return None


def _assemble(root: _Tree, atom_names: frozenset[str], reflexive: bool) -> KripkeModel:
    labels: list[frozenset[Formula]] = []
    edges: set[tuple[int, int]] = set()

    def walk(node: _Tree, path: list[int]) -> int:
        wid = len(labels)
        labels.append(node.label)
        below = path + [wid]  # the ancestor path as a child of this node sees it
        for child in node.children:
            if isinstance(child, int):
                edges.add((wid, below[child]))
            else:
                edges.add((wid, walk(child, below)))
        return wid

    walk(root, [])
    worlds = tuple(range(len(labels)))
    if reflexive:
        edges |= {(w, w) for w in worlds}
    valuation = {
        (w, name): Atom(name) in labels[w] for w in worlds for name in sorted(atom_names)
    }
    return KripkeModel(worlds, frozenset(edges), valuation, designated=0)


def decide(sequent: Sequent, node_limit: int = DEFAULT_NODE_LIMIT) -> Verdict:
    """Decide a sequent; invalid verdicts carry a re-checked countermodel.

    Local mode refutes by satisfying premises plus the negated conclusion at
    one world; global mode seeds only the negated conclusion and injects the
    premises into every world label as global assumptions.
    """
    reflexive = sequent.frames is FrameClass.REFLEXIVE
    neg_conclusion = nnf(Not(sequent.conclusion))
    if sequent.mode is Mode.LOCAL:
        seed = frozenset(nnf(p) for p in sequent.premises) | {neg_conclusion}
        global_assumptions: frozenset[Formula] = frozenset()
    else:
        seed = frozenset((neg_conclusion,))
        global_assumptions = frozenset(nnf(p) for p in sequent.premises)

    tree = _sat(seed, global_assumptions, (), reflexive, _Budget(node_limit))
    if tree is None:
        return Verdict(True)
    if isinstance(tree, int):  # the root has no ancestors to block it
        raise RuntimeError("root world reported as blocked")
    model = _assemble(tree, sequent.atoms(), reflexive)
    if not check_countermodel(sequent, model):
        raise RuntimeError("extracted countermodel failed re-checking")
    return Verdict(False, model)
