"""Tree decompositions: validation, greedy heuristics, nice normalization.

A decomposition is a rooted tree of integer node ids with one bag (a
frozenset of graph vertices) per node.  Nice decompositions additionally
carry a node kind (leaf / int / rem / join) and, for int and rem nodes, the
affected vertex.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .graphs import Graph

LEAF = "leaf"
INTRODUCE = "int"
REMOVE = "rem"
JOIN = "join"


class TreeDecomposition:
    def __init__(self, bags, children, root, kinds=None, vertices=None):
        self.bags: dict[int, frozenset[int]] = {t: frozenset(b) for t, b in bags.items()}
        self.children: dict[int, tuple[int, ...]] = {t: tuple(c) for t, c in children.items()}
        self.root: int = root
        self.parent: dict[int, int | None] = {root: None}
        for t, cs in self.children.items():
            for c in cs:
                self.parent[c] = t
        # Only set for nice decompositions.
        self.kinds: dict[int, str] | None = kinds
        self.vertices: dict[int, int] | None = vertices

    @property
    def nodes(self):
        return self.bags.keys()

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    @property
    def is_nice(self) -> bool:
        return self.kinds is not None

    def kind(self, t: int) -> str:
        return self.kinds[t]

    def affected_vertex(self, t: int) -> int:
        return self.vertices[t]

    def __len__(self):
        return len(self.bags)


def post_order(td: TreeDecomposition, t: int | None = None):
    """Nodes of the subtree rooted at ``t`` (default: the root), children first."""
    if t is None:
        t = td.root
    order = []
    stack = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
        else:
            stack.append((node, True))
            for c in reversed(td.children.get(node, ())):
                stack.append((c, False))
    return order


@dataclass
class TDValidation:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_td(graph: Graph, td: TreeDecomposition) -> TDValidation:
    """Check the three decomposition conditions; violations are reported, not raised."""
    report = TDValidation()
    nodes_with = {}
    for t in td.nodes:
        for v in td.bags[t]:
            nodes_with.setdefault(v, set()).add(t)
    for v in graph.vertices:
        if v not in nodes_with:
            report.violations.append(f"vertex {v} occurs in no bag")
    for u, v in graph.edges():
        if not any(u in td.bags[t] and v in td.bags[t] for t in nodes_with.get(u, ())):
            report.violations.append(f"edge {{{u}, {v}}} is contained in no bag")
    # Connectedness: the nodes holding v must form one subtree.
    for v, holders in nodes_with.items():
        start = next(iter(holders))
        seen = {start}
        frontier = [start]
        while frontier:
            t = frontier.pop()
            for nb in (*td.children.get(t, ()), td.parent.get(t)):
                if nb is not None and nb in holders and nb not in seen:
                    seen.add(nb)
                    frontier.append(nb)
        if seen != holders:
            report.violations.append(f"bags containing vertex {v} are not connected")
    return report


MIN_FILL = "min-fill"
MIN_DEGREE = "min-degree"


def heuristic_td(graph: Graph, heuristic: str = MIN_FILL, seed: int = 0) -> TreeDecomposition:
    """Greedy elimination-ordering decomposition, deterministic per (heuristic, seed)."""
    if heuristic not in (MIN_FILL, MIN_DEGREE):
        raise ValueError(f"unknown heuristic {heuristic!r}")
    rng = random.Random(seed)
    adj = {v: set(graph.neighbors(v)) for v in graph.vertices}
    if not adj:
        return TreeDecomposition({0: frozenset()}, {0: ()}, 0)

    def fill_in(v) -> int:
        nbs = sorted(adj[v])
        return sum(1 for i, x in enumerate(nbs) for y in nbs[i + 1:] if y not in adj[x])

    score_of = fill_in if heuristic == MIN_FILL else (lambda v: len(adj[v]))
    scores = {v: score_of(v) for v in adj}

    bags: dict[int, frozenset[int]] = {}
    children: dict[int, list[int]] = {}
    node_of_vertex: dict[int, int] = {}
    elim_pos: dict[int, int] = {}
    pending: list[tuple[int, set[int]]] = []  # (node, neighbors at elimination)
    order = 0
    while adj:
        best = min(scores[v] for v in adj)
        cands = sorted(v for v in adj if scores[v] == best)
        v = cands[rng.randrange(len(cands))]
        nbs = set(adj[v])
        node = order
        bags[node] = frozenset(nbs | {v})
        children[node] = []
        node_of_vertex[v] = node
        elim_pos[v] = order
        pending.append((node, nbs))
        for x in nbs:
            adj[x].discard(v)
        touched = set(nbs)
        for i, x in enumerate(sorted(nbs)):
            for y in sorted(nbs):
                if x < y and y not in adj[x]:
                    adj[x].add(y)
                    adj[y].add(x)
                    touched.add(x)
                    touched.add(y)
        del adj[v], scores[v]
        if heuristic == MIN_FILL:
            # Fill counts change only near the eliminated vertex.
            for x in touched:
                touched_2 = adj.get(x)
                if touched_2 is not None:
                    scores[x] = fill_in(x)
            for x in set().union(*(adj.get(t, set()) for t in touched)) if touched else ():
                if x in adj:
                    scores[x] = fill_in(x)
        else:
            for x in touched:
                if x in adj:
                    scores[x] = len(adj[x])
        order += 1

    roots = []
    for node, nbs in pending:
        if nbs:
            first = min(nbs, key=lambda u: elim_pos[u])
            children[node_of_vertex[first]].append(node)
        else:
            roots.append(node)
    root = roots[-1]
    for other in roots[:-1]:
        children[root].append(other)
    return TreeDecomposition(bags, children, root)


class _NiceBuilder:
    def __init__(self):
        self.bags: dict[int, frozenset] = {}
        self.children: dict[int, list[int]] = {}
        self.kinds: dict[int, str] = {}
        self.vertices: dict[int, int] = {}

    def node(self, bag, kind, children=(), vertex=None) -> int:
        t = len(self.bags)
        self.bags[t] = frozenset(bag)
        self.children[t] = list(children)
        self.kinds[t] = kind
        if vertex is not None:
            self.vertices[t] = vertex
        return t

    def chain_to(self, below: int, frm: frozenset, to: frozenset) -> int:
        """Removal then introduce steps turning bag ``frm`` into ``to``."""
        cur, bag = below, set(frm)
        for v in sorted(frm - to):
            bag.discard(v)
            cur = self.node(bag, REMOVE, (cur,), v)
        for v in sorted(to - frm):
            bag.add(v)
            cur = self.node(bag, INTRODUCE, (cur,), v)
        return cur

    def leaf_chain(self, bag: frozenset) -> int:
        cur = self.node((), LEAF)
        return self.chain_to(cur, frozenset(), bag)


def make_nice(td: TreeDecomposition) -> TreeDecomposition:
    """Nice normalization: same width, empty leaf and root bags, four node kinds."""
    b = _NiceBuilder()
    result: dict[int, int] = {}
    for t in post_order(td):
        bag = td.bags[t]
        kids = td.children.get(t, ())
        if not kids:
            result[t] = b.leaf_chain(bag)
            continue
        tops = [b.chain_to(result[c], td.bags[c], bag) for c in kids]
        top = tops[0]
        for other in tops[1:]:
            top = b.node(bag, JOIN, (top, other))
        result[t] = top
    root = b.chain_to(result[td.root], td.bags[td.root], frozenset())
    nice = TreeDecomposition(b.bags, b.children, root, kinds=b.kinds, vertices=b.vertices)
    return nice


def write_pace(td: TreeDecomposition, vertices) -> str:
    """PACE-style text; graph vertices are numbered 1..n following ``vertices``."""
    index = {v: i + 1 for i, v in enumerate(vertices)}
    ids = {t: i + 1 for i, t in enumerate(sorted(td.nodes))}
    lines = [f"s td {len(td)} {td.width + 1} {len(index)}"]
    for t in sorted(td.nodes):
        entries = " ".join(str(index[v]) for v in sorted(td.bags[t]))
        lines.append(f"b {ids[t]} {entries}".rstrip())
    for t in sorted(td.nodes):
        for c in td.children.get(t, ()):
            lines.append(f"{ids[t]} {ids[c]}")
    return "\n".join(lines) + "\n"


def read_pace(text: str, vertices) -> TreeDecomposition:
    """Parse PACE-style text; bag entries are mapped back through ``vertices``."""
    vertex_list = list(vertices)
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    declared = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            declared = int(parts[2])
        elif parts[0] == "b":
            bag_id = int(parts[1])
            bags[bag_id] = frozenset(vertex_list[int(v) - 1] for v in parts[2:])
        else:
            edges.append((int(parts[0]), int(parts[1])))
    if declared is not None and declared != len(bags):
        raise ValueError("bag count does not match the header")
    if not bags:
        raise ValueError("no bags")
    adj: dict[int, list[int]] = {t: [] for t in bags}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    root = min(bags)
    children: dict[int, list[int]] = {t: [] for t in bags}
    seen = {root}
    frontier = [root]
    while frontier:
        t = frontier.pop()
        for nb in adj[t]:
            if nb not in seen:
                seen.add(nb)
                children[t].append(nb)
                frontier.append(nb)
    if seen != set(bags):
        raise ValueError("decomposition tree is not connected")
    return TreeDecomposition(bags, children, root)
