"""Instance generators: triangle-grid programs and graph-problem encodings."""

from __future__ import annotations

import random

from .graphs import Graph
from .model import (
    Program, ProgramBuilder, choice_rule, disjunctive_rule, optimization_rule,
)


def generate_tgrid(k: int, l: int, p: float, seed: int) -> Program:
    """Random triangle-grid program over a k×l variable grid.

    One choice rule per variable; for each eligible grid cell, with
    probability ``p``, three ternary clauses with uniformly random signs,
    each encoded as the integrity constraint forbidding its unique
    falsifying assignment.  Answer sets are in bijection with satisfying
    assignments of the clause set.  Deterministic for a fixed seed.
    """
    if k < 2 or l < 2:
        raise ValueError("tgrid needs k >= 2 and l >= 2")
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    rng = random.Random(seed)
    builder = ProgramBuilder()
    var = {}
    for i in range(1, k + 1):
        for j in range(1, l + 1):
            var[i, j] = builder.atom(f"v{i}_{j}")
            builder.add(choice_rule([var[i, j]]))
    for i in range(2, k + 1):
        for j in range(2, l + 1):
            if rng.random() >= p:
                continue
            triangles = (
                ((i, j), (i - 1, j), (i, j - 1)),
                ((i, j), (i - 1, j), (i - 1, j - 1)),
                ((i, j), (i - 1, j - 1), (i, j - 1)),
            )
            for cells in triangles:
                signs = [rng.random() < 0.5 for _ in cells]
                # Clause l1 ∨ l2 ∨ l3 fails exactly when every literal is
                # false: forbid that assignment.
                pos = [var[c] for c, s in zip(cells, signs) if not s]
                neg = [var[c] for c, s in zip(cells, signs) if s]
                builder.add(disjunctive_rule((), pos, neg))
    return builder.build()


def tgrid_clauses(program: Program):
    """Recover the clause view of a tgrid program: (variables, clauses).

    Each clause is a tuple of signed atom ids; the sign says how the literal
    appears in the clause (the constraints forbid the falsifying pattern).
    """
    variables = []
    clauses = []
    for r in program.rules:
        if r.kind == "choice":
            variables.extend(r.head)
        elif r.kind == "disjunctive" and not r.head:
            clause = [(a, True) for a in sorted(r.neg_body)]
            clause += [(a, False) for a in sorted(r.pos_body)]
            clauses.append(tuple(clause))
    return sorted(variables), clauses


GRAPH_PROBLEMS = ("threecol", "twocol", "svc", "cvc", "ds")


def encode_graph_problem(graph: Graph, problem: str) -> Program:
    """ASP encodings of counting problems on a simple undirected graph.

    threecol: proper 3-colorings; svc (and its alias twocol): subset-minimal
    vertex covers; cvc: cardinality-minimal vertex covers (count optimal
    answer sets); ds: minimal dominating sets via closed-neighborhood
    disjunctions.
    """
    if problem not in GRAPH_PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}")
    builder = ProgramBuilder()
    vertices = sorted(graph.vertices)
    if problem == "threecol":
        color = {(v, c): builder.atom(f"{c}{v}") for v in vertices for c in "rgb"}
        for v in vertices:
            atoms = [color[v, c] for c in "rgb"]
            builder.add(choice_rule(atoms))
            builder.add(disjunctive_rule((), (), atoms))  # at least one color
            for i in range(3):
                for j in range(i + 1, 3):
                    builder.add(disjunctive_rule((), (atoms[i], atoms[j]), ()))
        for u, v in graph.edges():
            for c in "rgb":
                builder.add(disjunctive_rule((), (color[u, c], color[v, c]), ()))
    elif problem in ("svc", "twocol"):
        ids = {v: builder.atom(f"n{v}") for v in vertices}
        for u, v in graph.edges():
            builder.add(disjunctive_rule((ids[u], ids[v])))
    elif problem == "cvc":
        ids = {v: builder.atom(f"n{v}") for v in vertices}
        for v in vertices:
            builder.add(choice_rule([ids[v]]))
        for u, v in graph.edges():
            builder.add(disjunctive_rule((), (), (ids[u], ids[v])))
        for v in vertices:
            builder.add(optimization_rule(ids[v], 1))
    elif problem == "ds":
        ids = {v: builder.atom(f"n{v}") for v in vertices}
        for v in vertices:
            closed = [ids[v]] + [ids[u] for u in sorted(graph.neighbors(v))]
            builder.add(disjunctive_rule(closed))
    return builder.build()
