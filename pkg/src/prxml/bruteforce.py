"""Brute-force solvers for the source problems of the reductions (small inputs only)."""

from __future__ import annotations

import itertools

from .gen import CnfFormula, ExactCoverInstance
from .matching import BipartiteGraph

LIMIT = 12


def _check(size: int, what: str) -> None:
    if size > LIMIT:
        raise ValueError(f"brute force over {what} is capped at {LIMIT}, got {size}")


def count_models(f: CnfFormula) -> int:
    _check(f.n_vars, "variables")
    return sum(
        1 for bits in itertools.product((False, True), repeat=f.n_vars) if f.satisfied_by(bits)
    )


def exact_covers(inst: ExactCoverInstance) -> list[tuple[int, ...]]:
    """Index tuples of every subfamily covering each element exactly once."""
    _check(len(inst.sets), "sets")
    universe = sorted(inst.universe)
    out = []
    for r in range(len(inst.sets) + 1):
        for pick in itertools.combinations(range(len(inst.sets)), r):
            elems = [x for i in pick for x in inst.sets[i]]
            if sorted(elems) == universe:
                out.append(pick)
    return out


def count_perfect_matchings(g: BipartiteGraph) -> int:
    """Permanent of the biadjacency matrix by expansion over permutations."""
    if g.n_left != g.n_right:
        return 0
    _check(g.n_left, "vertices per part")
    return sum(
        1
        for perm in itertools.permutations(range(g.n_right))
        if all((i, j) in g.edges for i, j in enumerate(perm))
    )
