"""Independent validity oracle by exhaustive enumeration of bounded models.

Formulas of modal depth <= 1 are decided by enumerating evaluation profiles
rather than raw (valuation, relation) tables: at that depth a world sees only
its own valuation and the *set* of successor valuations, and every profile is
realizable within the stated world bound (designated world plus one world per
extra successor valuation). Over two atoms the bound 5 makes this exhaustive
search complete for both consequence modes. Deeper formulas fall back to
literal enumeration over at most min(max_worlds, 3) worlds and carry
valid-up-to-bound semantics.
"""

from __future__ import annotations

import itertools

from .formulas import And, Atom, Box, Diamond, Formula, FormulaError, Implies, Not, Or, modal_depth
from .kripke import FrameClass, KripkeModel, Mode, Sequent, Verdict, check_countermodel

Valuation = tuple[bool, ...]


def _eval_flat(f: Formula, val: Valuation, index: dict[str, int]) -> bool:
    """Evaluate a purely propositional formula under one valuation."""
    if isinstance(f, Atom):
        return val[index[f.name]]
    if isinstance(f, Not):
        return not _eval_flat(f.sub, val, index)
    if isinstance(f, Or):
        return _eval_flat(f.left, val, index) or _eval_flat(f.right, val, index)
    if isinstance(f, And):
        return _eval_flat(f.left, val, index) and _eval_flat(f.right, val, index)
    if isinstance(f, Implies):
        return not _eval_flat(f.left, val, index) or _eval_flat(f.right, val, index)
    raise FormulaError(f"formula deeper than its declared modal depth: {f!r}")


def _eval_profile(
    f: Formula, val: Valuation, succ: frozenset[Valuation], index: dict[str, int]
) -> bool:
    """Evaluate a depth-<=1 formula given a world valuation and successor set."""
    if isinstance(f, Atom):
        return val[index[f.name]]
    if isinstance(f, Not):
        return not _eval_profile(f.sub, val, succ, index)
    if isinstance(f, Box):
        return all(_eval_flat(f.sub, v, index) for v in succ)
    if isinstance(f, Diamond):
        return any(_eval_flat(f.sub, v, index) for v in succ)
    if isinstance(f, Or):
        return _eval_profile(f.left, val, succ, index) or _eval_profile(f.right, val, succ, index)
    if isinstance(f, And):
        return _eval_profile(f.left, val, succ, index) and _eval_profile(f.right, val, succ, index)
    if isinstance(f, Implies):
        return not _eval_profile(f.left, val, succ, index) or _eval_profile(
            f.right, val, succ, index
        )
    raise FormulaError(f"unknown node {f!r}")


def _subsets(items: list):
    """Subsets in canonical order: by size, then by element order."""
    return itertools.chain.from_iterable(
        itertools.combinations(items, size) for size in range(len(items) + 1)
    )


def brute_force_oracle(sequent: Sequent, max_worlds: int = 5) -> Verdict:
    """First countermodel in canonical enumeration order, else valid-up-to-bound."""
    if max_worlds < 1:
        raise ValueError("max_worlds must be positive")
    names = sorted(sequent.atoms())
    index = {name: i for i, name in enumerate(names)}
    depth = max(
        [modal_depth(sequent.conclusion)] + [modal_depth(p) for p in sequent.premises]
    )
    if depth <= 1:
        if sequent.mode is Mode.LOCAL:
            return _profile_search_local(sequent, names, index, max_worlds)
        return _profile_search_global(sequent, names, index, max_worlds)
    return _literal_search(sequent, names, min(max_worlds, 3))


def _profile_search_local(
    sequent: Sequent, names: list[str], index: dict[str, int], max_worlds: int
) -> Verdict:
    reflexive = sequent.frames is FrameClass.REFLEXIVE
    all_vals: list[Valuation] = list(itertools.product((False, True), repeat=len(names)))
    for v0 in all_vals:
        for succ_tuple in _subsets(all_vals):
            succ = frozenset(succ_tuple)
            if reflexive and v0 not in succ:
                continue
            if 1 + len(succ - {v0}) > max_worlds:
                continue
            premises_ok = all(
                _eval_profile(p, v0, succ, index) for p in sequent.premises
            )
            if premises_ok and not _eval_profile(sequent.conclusion, v0, succ, index):
                model = _realize_local(v0, succ, names, reflexive)
                assert check_countermodel(sequent, model)
                return Verdict(False, model)
    return Verdict(True)


def _realize_local(
    v0: Valuation, succ: frozenset[Valuation], names: list[str], reflexive: bool
) -> KripkeModel:
    others = sorted(succ - {v0})
    vals = [v0] + others
    worlds = tuple(range(len(vals)))
    edges: set[tuple[int, int]] = {(0, 1 + i) for i in range(len(others))}
    if v0 in succ:
        edges.add((0, 0))
    if reflexive:
        edges |= {(w, w) for w in worlds}
    valuation = {
        (w, name): vals[w][i] for w in worlds for i, name in enumerate(names)
    }
    return KripkeModel(worlds, frozenset(edges), valuation, designated=0)


def _profile_search_global(
    sequent: Sequent, names: list[str], index: dict[str, int], max_worlds: int
) -> Verdict:
    """Enumerate realized-valuation sets with compliant successor assignments.

    A global countermodel is rebuilt from: the set T of valuations appearing in
    the model, one premise-compliant successor set per member of T, and one
    falsifying world whose profile satisfies the premises but not the
    conclusion. Any countermodel projects onto such a shape, and the shape
    re-materializes with at most |T| + 1 worlds.
    """
    reflexive = sequent.frames is FrameClass.REFLEXIVE
    all_vals: list[Valuation] = list(itertools.product((False, True), repeat=len(names)))
    for t_tuple in _subsets(all_vals):
        t_set = list(t_tuple)
        if not t_set or len(t_set) + 1 > max_worlds:
            continue
        compliant: dict[Valuation, frozenset[Valuation]] = {}
        for v in t_set:
            for s_tuple in _subsets(t_set):
                s = frozenset(s_tuple)
                if reflexive and v not in s:
                    continue
                if all(_eval_profile(p, v, s, index) for p in sequent.premises):
                    compliant[v] = s
                    break
        if len(compliant) < len(t_set):
            continue
        for v0 in t_set:
            for s_tuple in _subsets(t_set):
                s0 = frozenset(s_tuple)
                if reflexive and v0 not in s0:
                    continue
                premises_ok = all(
                    _eval_profile(p, v0, s0, index) for p in sequent.premises
                )
                if premises_ok and not _eval_profile(sequent.conclusion, v0, s0, index):
                    model = _realize_global(v0, s0, t_set, compliant, names, reflexive)
                    assert check_countermodel(sequent, model)
                    return Verdict(False, model)
    return Verdict(True)


def _realize_global(
    v0: Valuation,
    s0: frozenset[Valuation],
    t_set: list[Valuation],
    compliant: dict[Valuation, frozenset[Valuation]],
    names: list[str],
    reflexive: bool,
) -> KripkeModel:
    ordered = sorted(t_set)
    wid = {v: i for i, v in enumerate(ordered)}
    vals = list(ordered)
    designated = len(vals)  # separate falsifying world, possibly redundant but simple
    vals.append(v0)
    worlds = tuple(range(len(vals)))
    edges: set[tuple[int, int]] = set()
    for v in ordered:
        for u in compliant[v]:
            edges.add((wid[v], wid[u]))
    for u in s0:
        edges.add((designated, wid[u]))
    if reflexive:
        # compliant worlds loop through v in compliant[v]; the falsifying world
        # gets an explicit loop, which leaves its successor valuations unchanged
        # because it shares a valuation with wid[v0]
        edges.add((designated, designated))
    valuation = {
        (w, name): vals[w][i] for w in worlds for i, name in enumerate(names)
    }
    return KripkeModel(worlds, frozenset(edges), valuation, designated=designated)


def _literal_search(sequent: Sequent, names: list[str], max_worlds: int) -> Verdict:
    """Raw enumeration of valuations, relations, and designated worlds."""
    from .kripke import eval_at_world

    reflexive = sequent.frames is FrameClass.REFLEXIVE
    all_vals: list[Valuation] = list(itertools.product((False, True), repeat=len(names)))
    for n in range(1, max_worlds + 1):
        worlds = tuple(range(n))
        pairs = [(u, v) for u in worlds for v in worlds if not (reflexive and u == v)]
        base = frozenset((w, w) for w in worlds) if reflexive else frozenset()
        for assignment in itertools.product(all_vals, repeat=n):
            valuation = {
                (w, name): assignment[w][i] for w in worlds for i, name in enumerate(names)
            }
            for extra in _subsets(pairs):
                edges = base | frozenset(extra)
                for designated in worlds:
                    model = KripkeModel(worlds, edges, valuation, designated)
                    if check_countermodel(sequent, model):
                        return Verdict(False, model)
    return Verdict(True)
