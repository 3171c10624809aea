"""Table algorithm over primal-graph decompositions.

Tuples pair a bag-local witness set with a family of counterwitness sets;
a witness survives introduction only if it satisfies all bag rules, and a
counterwitness survives only while it models the GL reduct of the bag rules
with respect to the witness.  The counting variant threads (cost, count)
through every case, mirroring the incidence counting algorithm.
"""

from __future__ import annotations

from .dp import merge_entry
from .graphs import primal_graph
from .model import Program, rule_reduct, satisfies


def mod_filter(family, rules):
    """The subfamily of sets that are models of all given (reduct) rules."""
    rules = tuple(rules.rules) if isinstance(rules, Program) else tuple(rules)
    return frozenset(c for c in family if all(satisfies(c, r) for r in rules))


class PrimAlgorithm:
    """Witness/counterwitness DP tables for primal-graph decompositions."""

    name = "prim"

    def __init__(self, program: Program, graph=None):
        self.program = program
        self.graph = graph if graph is not None else primal_graph(program)
        if self.graph.kind != "primal":
            raise ValueError("PrimAlgorithm expects the primal graph")
        self._cost_true = [0] * program.atom_count
        self._cost_false = [0] * program.atom_count
        for r in program.optimization_rules:
            (atom, w), = r.weights
            if r.pos_body:
                self._cost_true[atom] += w
            else:
                self._cost_false[atom] += w

    def root_key(self):
        return (frozenset(), frozenset())

    def witness_of(self, key):
        return key[0]

    def _bag_cost(self, bag_atoms, m) -> int:
        return sum(self._cost_true[a] if a in m else self._cost_false[a]
                   for a in bag_atoms)

    def _bag_reduct(self, ctx, m):
        cache = ctx.cache.setdefault("reducts", {})
        red = cache.get(m)
        if red is None:
            red = tuple(out for i in ctx.bag_rules
                        for out in rule_reduct(self.program.rules[i], m))
            cache[m] = red
        return red

    def table(self, ctx, children, record_provenance=False):
        table: dict = {}
        links: dict = {} if record_provenance else None
        rules = ctx.bag_rules
        bag_rule_objs = tuple(self.program.rules[i] for i in rules)

        if ctx.kind == "leaf":
            merge_entry(table, links, (frozenset(), frozenset()), 0, 1, ())
            return table, links

        if ctx.kind == "int":
            a = ctx.vertex
            (child_node, child_table), = children
            for key, (c, n) in child_table.items():
                m, cws = key
                parents = ((child_node, key),)
                with_a = m | {a}
                if all(satisfies(with_a, r) for r in bag_rule_objs):
                    candidates = {m} | {cw | {a} for cw in cws} | set(cws)
                    kept = mod_filter(candidates, self._bag_reduct(ctx, with_a))
                    merge_entry(table, links, (with_a, kept),
                                c + self._cost_true[a], n, parents)
                if all(satisfies(m, r) for r in bag_rule_objs):
                    kept = mod_filter(cws, self._bag_reduct(ctx, m))
                    merge_entry(table, links, (m, kept),
                                c + self._cost_false[a], n, parents)
            return table, links

        if ctx.kind == "rem":
            a = ctx.vertex
            (child_node, child_table), = children
            for key, (c, n) in child_table.items():
                m, cws = key
                projected = (m - {a}, frozenset(cw - {a} for cw in cws))
                merge_entry(table, links, projected, c, n, ((child_node, key),))
            return table, links

        if ctx.kind == "join":
            (left_node, left_table), (right_node, right_table) = children
            by_witness: dict = {}
            for key in right_table:
                by_witness.setdefault(key[0], []).append(key)
            correction = {m: self._bag_cost(ctx.bag_atoms, m)
                          for m in {key[0] for key in left_table}}
            for lkey, (lc, ln) in left_table.items():
                m, lcws = lkey
                for rkey in by_witness.get(m, ()):
                    rc, rn = right_table[rkey]
                    rcws = rkey[1]
                    combined = (lcws & rcws) | (lcws & {m}) | ({m} & rcws)
                    merge_entry(table, links, (m, combined),
                                lc + rc - correction[m], ln * rn,
                                ((left_node, lkey), (right_node, rkey)))
            return table, links

        raise ValueError(f"unexpected node kind {ctx.kind!r}")


def prim_table(ctx, children):
    """Structural table (set of ⟨witness, counterwitness family⟩ tuples)."""
    table, _ = PrimAlgorithm(ctx.program, ctx.graph).table(ctx, children)
    return set(table)


def prim_count_table(ctx, children):
    """Counting table: structural tuples with (cost, count) annotations."""
    table, _ = PrimAlgorithm(ctx.program, ctx.graph).table(ctx, children)
    return table


def prim_table_bound(width: int) -> int:
    """Worst-case tuple count per node for bag size ``width + 1``."""
    bag = width + 1
    return 2 ** bag * 2 ** (2 ** bag)
