"""Generic dynamic programming over a nice tree decomposition.

The driver walks the decomposition in post-order, hands each node's context
(bag, bag rules, atoms seen below) plus the child tables to a table
algorithm, and stores the resulting table.  Tables map a structural tuple
key to a ``(cost, count)`` pair; consistency-only runs simply ignore the
pair.  Merging is uniform: colliding derivations keep the cheaper cost and
sum counts at equal cost, which realizes the kmin/cnt multiset operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .decomposition import INTRODUCE, JOIN, LEAF, REMOVE, TreeDecomposition, post_order
from .graphs import ProgramGraph
from .model import OPTIMIZATION, Program


def bag_rules(program: Program, graph: ProgramGraph, bag: frozenset[int]):
    """Rule indices local to a bag, per graph representation.

    Primal: rules whose atoms are fully covered by the bag.  Incidence:
    rules whose rule vertex is in the bag.
    """
    if graph.kind == "primal":
        return tuple(i for i, r in enumerate(program.rules) if r.atoms <= bag)
    return tuple(sorted(graph.rule_index(v) for v in bag if graph.is_rule_vertex(v)))


@dataclass
class NodeContext:
    node: int
    kind: str
    vertex: int | None
    bag: frozenset[int]
    bag_atoms: frozenset[int]
    bag_rules: tuple[int, ...]
    program: Program
    graph: ProgramGraph
    atom_below: object = None  # callable: is this atom introduced at or below the node?
    cache: dict = field(default_factory=dict)

    def rules_below_complete(self, rule_index: int) -> bool:
        """Whether every atom of the rule has been seen at or below this node."""
        r = self.program.rules[rule_index]
        return all(self.atom_below(a) for a in r.atoms)


@dataclass
class TableStore:
    algorithm: object
    td: TreeDecomposition
    program: Program
    tables: dict[int, dict]
    provenance: dict[int, dict] | None

    @property
    def root_table(self) -> dict:
        return self.tables[self.td.root]


class _BelowIndex:
    """O(1) "is node x at-or-below node t" via DFS intervals, plus removal nodes.

    In a nice decomposition every vertex is removed exactly once (the root
    bag is empty), so "v was seen at or below t" is equivalent to
    "v is in the bag of t, or v's removal node lies at or below t".
    """

    def __init__(self, td: TreeDecomposition):
        self.tin: dict[int, int] = {}
        self.tout: dict[int, int] = {}
        clock = 0
        stack = [(td.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                self.tout[node] = clock
                continue
            self.tin[node] = clock
            clock += 1
            stack.append((node, True))
            for c in td.children.get(node, ()):
                stack.append((c, False))
        self.removed_at: dict[int, int] = {}
        for t in td.nodes:
            if td.kind(t) == REMOVE:
                self.removed_at[td.affected_vertex(t)] = t

    def below(self, x: int, t: int) -> bool:
        return self.tin[t] <= self.tin[x] and self.tout[x] <= self.tout[t]

    def vertex_below(self, v: int, t: int, bag: frozenset[int]) -> bool:
        if v in bag:
            return True
        rem = self.removed_at.get(v)
        return rem is not None and self.below(rem, t)


def run_dp(algorithm, td: TreeDecomposition, program: Program, *,
           record_provenance: bool = False, table_callback=None) -> TableStore:
    """Evaluate the table algorithm over every node in post-order.

    Single-threaded reference implementation; table algorithms are pure
    functions of the node context and child tables, so sibling subtrees
    could be evaluated concurrently without changing any table.
    """
    if not td.is_nice:
        raise ValueError("run_dp requires a nice tree decomposition")
    graph = algorithm.graph
    below = _BelowIndex(td)
    tables: dict[int, dict] = {}
    provenance: dict[int, dict] | None = {} if record_provenance else None
    remaining_uses = {t: len(td.children.get(t, ())) for t in td.nodes}

    for t in post_order(td):
        bag = td.bags[t]
        kind = td.kind(t)
        bag_atoms = frozenset(v for v in bag if not graph.is_rule_vertex(v))
        ctx = NodeContext(
            node=t,
            kind=kind,
            vertex=td.vertices.get(t) if td.vertices else None,
            bag=bag,
            bag_atoms=bag_atoms,
            bag_rules=bag_rules(program, graph, bag),
            program=program,
            graph=graph,
            atom_below=lambda v, _t=t, _bag=bag: below.vertex_below(v, _t, _bag),
        )
        children = [(c, tables[c]) for c in td.children.get(t, ())]
        table, links = algorithm.table(ctx, children, record_provenance)
        tables[t] = table
        if provenance is not None:
            provenance[t] = links
        if table_callback is not None:
            table_callback(ctx, table)
        if provenance is None:
            for c in td.children.get(t, ()):
                del tables[c]

    return TableStore(algorithm, td, program, tables, provenance)


def root_consistent(store: TableStore) -> bool:
    """True iff the designated all-empty tuple is present at the root."""
    return store.algorithm.root_key() in store.root_table


def root_optimum(store: TableStore):
    """(optimum, count) at the root, or None when inconsistent."""
    entry = store.root_table.get(store.algorithm.root_key())
    if entry is None:
        return None
    return entry


def extract_answer_set(store: TableStore):
    """One answer set, reconstructed by walking provenance links from the root.

    Requires ``record_provenance=True``; returns None when inconsistent.
    """
    if store.provenance is None:
        raise ValueError("extraction needs a run with record_provenance=True")
    root_key = store.algorithm.root_key()
    if root_key not in store.root_table:
        return None
    atoms: set[int] = set()
    stack = [(store.td.root, root_key)]
    while stack:
        node, key = stack.pop()
        atoms |= store.algorithm.witness_of(key)
        stack.extend(store.provenance[node].get(key, ()))
    return frozenset(atoms)


def merge_entry(table: dict, links: dict | None, key, cost: int, count: int, parents) -> None:
    """Insert a derivation, keeping min cost and summing counts at equal cost."""
    entry = table.get(key)
    if entry is None or cost < entry[0]:
        table[key] = (cost, count)
        if links is not None:
            links[key] = parents
    elif cost == entry[0]:
        table[key] = (cost, entry[1] + count)
