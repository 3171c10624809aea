"""Primal and incidence graph representations of a program.

Vertices are integers: atom vertices reuse atom ids, rule vertices are
``atom_count + rule_index``.  Optimization rules contribute neither edges nor
rule vertices; their atoms still appear as (possibly isolated) vertices.
"""

from __future__ import annotations

import itertools

from .model import OPTIMIZATION, Program


class Graph:
    """Simple undirected graph over integer vertices."""

    def __init__(self, vertices=()):
        self.adj: dict[int, set[int]] = {v: set() for v in vertices}

    @property
    def vertices(self):
        return self.adj.keys()

    def add_vertex(self, v: int) -> None:
        self.adj.setdefault(v, set())

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("self-loop")
        self.add_vertex(u)
        self.add_vertex(v)
        self.adj[u].add(v)
        self.adj[v].add(u)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def neighbors(self, v: int) -> set[int]:
        return self.adj[v]

    def edges(self):
        return [(u, v) for u in sorted(self.adj) for v in sorted(self.adj[u]) if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(n) for n in self.adj.values()) // 2

    def __len__(self):
        return len(self.adj)


class ProgramGraph(Graph):
    """A graph representation that knows which vertices are rules."""

    def __init__(self, program: Program, kind: str):
        super().__init__()
        self.program = program
        self.kind = kind
        self.atom_vertices = range(program.atom_count)

    def rule_vertex(self, rule_index: int) -> int:
        return self.program.atom_count + rule_index

    def is_rule_vertex(self, v: int) -> bool:
        return v >= self.program.atom_count

    def rule_index(self, v: int) -> int:
        return v - self.program.atom_count


def primal_graph(program: Program) -> ProgramGraph:
    """Atoms as vertices; atoms co-occurring in a non-optimization rule are adjacent."""
    g = ProgramGraph(program, "primal")
    for a in range(program.atom_count):
        g.add_vertex(a)
    for r in program.rules:
        if r.kind == OPTIMIZATION:
            continue
        for u, v in itertools.combinations(sorted(r.atoms), 2):
            g.add_edge(u, v)
    return g


def incidence_graph(program: Program) -> ProgramGraph:
    """Bipartite graph on atoms and non-optimization rules; edges for membership."""
    g = ProgramGraph(program, "incidence")
    for a in range(program.atom_count):
        g.add_vertex(a)
    for i, r in enumerate(program.rules):
        if r.kind == OPTIMIZATION:
            continue
        rv = g.rule_vertex(i)
        g.add_vertex(rv)
        for a in r.atoms:
            g.add_edge(a, rv)
    return g


def export_edge_list(graph: Graph) -> str:
    """Edge-list text for external decomposers: ``p tw n m`` header, 1-based pairs."""
    index = {v: i + 1 for i, v in enumerate(sorted(graph.vertices))}
    lines = [f"p tw {len(graph)} {graph.edge_count}"]
    for u, v in graph.edges():
        lines.append(f"{index[u]} {index[v]}")
    return "\n".join(lines) + "\n"
