"""Brute-force reference solver.

No cleverness on purpose: enumerate candidate sets, apply the definitions.
This is the correctness anchor for the dynamic-programming pipelines; it
refuses instances above a configurable atom limit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import Program, cost, is_answer_set

DEFAULT_ATOM_LIMIT = 20


class OracleLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleReport:
    answer_sets: frozenset
    optimum: int | None
    optimal_count: int


def _check_limit(program: Program, limit: int) -> None:
    if program.atom_count > limit:
        raise OracleLimitError(
            f"oracle refuses {program.atom_count} atoms (limit {limit}); "
            "it is a test fixture, not a solver")


def enumerate_answer_sets(program: Program, limit: int = DEFAULT_ATOM_LIMIT):
    """All answer sets, by checking every subset of the atom universe."""
    _check_limit(program, limit)
    atoms = sorted(program.universe)
    found = []
    for k in range(len(atoms) + 1):
        for subset in itertools.combinations(atoms, k):
            m = frozenset(subset)
            if is_answer_set(program, m):
                found.append(m)
    return frozenset(found)


def count_optimal(program: Program, limit: int = DEFAULT_ATOM_LIMIT):
    """(optimum, number of optimum-cost answer sets), or None when inconsistent."""
    answer_sets = enumerate_answer_sets(program, limit)
    if not answer_sets:
        return None
    universe = program.universe
    costs = [cost(program, m, universe) for m in answer_sets]
    optimum = min(costs)
    return optimum, costs.count(optimum)


def report(program: Program, limit: int = DEFAULT_ATOM_LIMIT) -> OracleReport:
    answer_sets = enumerate_answer_sets(program, limit)
    if not answer_sets:
        return OracleReport(answer_sets, None, 0)
    universe = program.universe
    costs = [cost(program, m, universe) for m in answer_sets]
    optimum = min(costs)
    return OracleReport(answer_sets, optimum, costs.count(optimum))
