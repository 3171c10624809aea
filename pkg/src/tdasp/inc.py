"""Table algorithm over incidence-graph decompositions.

Rules live in bags as vertices, so a rule's atoms are in general not all
visible at once.  Tuples therefore carry rule states: per bag rule either
"settled" (satisfied no matter how the interpretation is completed, written
as infinity) or a finite progress counter (accumulated fired body weight for
weight rules, removed chosen-head count for counterwitnesses of choice
rules).  Counterwitness pairs carry their own states against the GL reduct
under the witness.

The stored finite values are capped: weight-rule states at the rule bound,
choice counterstates at 1.  Values beyond the caps are semantically
equivalent (the residual bound floors at zero; only "counter is positive"
matters), and capping keeps the table-size bound honest.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dp import merge_entry
from .graphs import incidence_graph
from .model import CHOICE, DISJUNCTIVE, OPTIMIZATION, WEIGHT, Program

INF = float("inf")


def _cap(rule, value):
    if value == INF:
        return INF
    if rule.kind == WEIGHT:
        return min(value, rule.bound)
    if rule.kind == CHOICE:
        return min(value, 1)
    return value


@dataclass(frozen=True)
class _RuleInfo:
    """Bag-projected view of one rule at one decomposition node."""
    index: int
    rule: object
    head_bag: frozenset
    pos_bag: frozenset
    neg_bag: frozenset
    unseen_weight: int
    head_complete: bool


def _rule_info(ctx, index) -> _RuleInfo:
    r = ctx.program.rules[index]
    bag = ctx.bag_atoms
    unseen = [a for a in r.atoms if not ctx.atom_below(a)]
    return _RuleInfo(
        index=index,
        rule=r,
        head_bag=r.head & bag,
        pos_bag=r.pos_body & bag,
        neg_bag=r.neg_body & bag,
        unseen_weight=r.weight_sum(unseen),
        head_complete=all(ctx.atom_below(a) for a in r.head),
    )


def _infos(ctx):
    infos = ctx.cache.get("rinfo")
    if infos is None:
        infos = tuple(_rule_info(ctx, i) for i in ctx.bag_rules)
        ctx.cache["rinfo"] = infos
    return infos


def _settled(info: _RuleInfo, m, c, fin) -> bool:
    """Whether the rule's residual (reduct) program is satisfied by every
    completion of the chain: witness form with ``c = m``, counterwitness
    form with ``c ⊆ m``.  Equivalent to evaluating the satisfied-rules map
    over the per-rule state programs; inlined on bag-projected sets.
    """
    r = info.rule
    if r.kind == DISJUNCTIVE:
        return bool(info.neg_bag & m) or not info.pos_bag <= c or bool(info.head_bag & c)
    if r.kind == WEIGHT:
        if info.head_bag & c:
            return True
        potential = fin + info.unseen_weight \
            + r.weight_sum(info.pos_bag & c) + r.weight_sum(info.neg_bag - m)
        return potential < r.bound
    if r.kind == CHOICE:
        return bool(info.neg_bag & m) or not info.pos_bag <= c \
            or (info.head_complete and fin == 0 and not info.head_bag & (m - c))
    return True  # optimization rules never occur as incidence vertices


def _refresh(infos, m, c, state):
    """Re-evaluate settledness for every non-settled entry of a state tuple."""
    return tuple(
        INF if v == INF or _settled(info, m, c, v) else v
        for info, v in zip(infos, state)
    )


class IncAlgorithm:
    """Rule-state DP tables for incidence-graph decompositions."""

    name = "inc"

    def __init__(self, program: Program, graph=None):
        self.program = program
        self.graph = graph if graph is not None else incidence_graph(program)
        if self.graph.kind != "incidence":
            raise ValueError("IncAlgorithm expects the incidence graph")
        self._cost_true = [0] * program.atom_count
        self._cost_false = [0] * program.atom_count
        for r in program.optimization_rules:
            (atom, w), = r.weights
            if r.pos_body:
                self._cost_true[atom] += w
            else:
                self._cost_false[atom] += w

    def root_key(self):
        return (frozenset(), (), frozenset())

    def witness_of(self, key):
        return key[0]

    def _bag_cost(self, bag_atoms, m) -> int:
        return sum(self._cost_true[a] if a in m else self._cost_false[a]
                   for a in bag_atoms)

    def table(self, ctx, children, record_provenance=False):
        table: dict = {}
        links: dict = {} if record_provenance else None

        if ctx.kind == "leaf":
            merge_entry(table, links, (frozenset(), (), frozenset()), 0, 1, ())
            return table, links
        if ctx.kind == "join":
            self._join(ctx, children, table, links)
            return table, links
        is_rule = self.graph.is_rule_vertex(ctx.vertex)
        if ctx.kind == "int":
            if is_rule:
                self._introduce_rule(ctx, children, table, links)
            else:
                self._introduce_atom(ctx, children, table, links)
        elif ctx.kind == "rem":
            if is_rule:
                self._remove_rule(ctx, children, table, links)
            else:
                self._remove_atom(ctx, children, table, links)
        else:
            raise ValueError(f"unexpected node kind {ctx.kind!r}")
        return table, links

    def _introduce_atom(self, ctx, children, table, links):
        a = ctx.vertex
        infos = _infos(ctx)
        (child_node, child_table), = children
        add_true = self._cost_true[a]
        add_false = self._cost_false[a]
        for key, (c, n) in child_table.items():
            m, sigma, cws = key
            parents = ((child_node, key),)
            # Branch with the atom set to true.  The old witness becomes a
            # counterwitness seed of the extended one.
            m1 = m | {a}
            sigma1 = _refresh(infos, m1, m1, sigma)
            new_cws = {(m, _refresh(infos, m1, m, sigma))}
            for cw, rho in cws:
                cw1 = cw | {a}
                new_cws.add((cw1, _refresh(infos, m1, cw1, rho)))
                new_cws.add((cw, _refresh(infos, m1, cw, rho)))
            merge_entry(table, links, (m1, sigma1, frozenset(new_cws)),
                        c + add_true, n, parents)
            # Branch with the atom set to false.
            sigma0 = _refresh(infos, m, m, sigma)
            cws0 = frozenset((cw, _refresh(infos, m, cw, rho)) for cw, rho in cws)
            merge_entry(table, links, (m, sigma0, cws0), c + add_false, n, parents)

    def _introduce_rule(self, ctx, children, table, links):
        index = self.graph.rule_index(ctx.vertex)
        pos = ctx.bag_rules.index(index)
        info = _infos(ctx)[pos]
        (child_node, child_table), = children

        def extend(state, m, c):
            value = INF if _settled(info, m, c, 0) else 0
            return state[:pos] + (value,) + state[pos:]

        for key, (c, n) in child_table.items():
            m, sigma, cws = key
            new_key = (
                m,
                extend(sigma, m, m),
                frozenset((cw, extend(rho, m, cw)) for cw, rho in cws),
            )
            merge_entry(table, links, new_key, c, n, ((child_node, key),))

    def _remove_atom(self, ctx, children, table, links):
        a = ctx.vertex
        rules = [self.program.rules[i] for i in ctx.bag_rules]
        (child_node, child_table), = children

        def bump(rule, v, m, c):
            # For the witness state c equals m, so the choice-head count stays 0.
            if v == INF:
                return INF
            if rule.kind == WEIGHT:
                if (a in rule.neg_body and a not in m) or (a in rule.pos_body and a in c):
                    return _cap(rule, v + rule.weight(a))
            elif rule.kind == CHOICE:
                if a in rule.head and a in m and a not in c:
                    return _cap(rule, v + 1)
            return v

        for key, (c, n) in child_table.items():
            m, sigma, cws = key
            sigma1 = tuple(bump(r, v, m, m) for r, v in zip(rules, sigma))
            cws1 = frozenset(
                (cw - {a}, tuple(bump(r, v, m, cw) for r, v in zip(rules, rho)))
                for cw, rho in cws
            )
            merge_entry(table, links, (m - {a}, sigma1, cws1), c, n,
                        ((child_node, key),))

    def _remove_rule(self, ctx, children, table, links):
        index = self.graph.rule_index(ctx.vertex)
        child_rules = tuple(sorted(set(ctx.bag_rules) | {index}))
        pos = child_rules.index(index)
        (child_node, child_table), = children

        def drop(state):
            return state[:pos] + state[pos + 1:]

        for key, (c, n) in child_table.items():
            m, sigma, cws = key
            if sigma[pos] != INF:
                continue
            kept = frozenset((cw, drop(rho)) for cw, rho in cws if rho[pos] == INF)
            merge_entry(table, links, (m, drop(sigma), kept), c, n,
                        ((child_node, key),))

    def _join(self, ctx, children, table, links):
        infos = _infos(ctx)
        rules = [info.rule for info in infos]
        (left_node, left_table), (right_node, right_table) = children

        def fuse(s1, s2):
            return tuple(
                INF if v1 == INF or v2 == INF else _cap(r, v1 + v2)
                for r, v1, v2 in zip(rules, s1, s2)
            )

        by_witness: dict = {}
        for key in right_table:
            by_witness.setdefault(key[0], []).append(key)
        for lkey, (lc, ln) in left_table.items():
            m, lsigma, lcws = lkey
            correction = self._bag_cost(ctx.bag_atoms, m)
            for rkey in by_witness.get(m, ()):
                rc, rn = right_table[rkey]
                _, rsigma, rcws = rkey
                # Seen-below grows at a join, so settledness is re-checked.
                sigma = _refresh(infos, m, m, fuse(lsigma, rsigma))
                new_cws = set()
                rho_by_cw: dict = {}
                for cw, rho in rcws:
                    rho_by_cw.setdefault(cw, []).append(rho)
                for cw, lrho in lcws:
                    for rrho in rho_by_cw.get(cw, ()):
                        new_cws.add((cw, _refresh(infos, m, cw, fuse(lrho, rrho))))
                    if cw == m:
                        new_cws.add((m, _refresh(infos, m, m, fuse(lrho, rsigma))))
                for cw, rrho in rcws:
                    if cw == m:
                        new_cws.add((m, _refresh(infos, m, m, fuse(lsigma, rrho))))
                merge_entry(table, links, (m, sigma, frozenset(new_cws)),
                            lc + rc - correction, ln * rn,
                            ((left_node, lkey), (right_node, rkey)))


def inc_table(ctx, children):
    """Structural table (set of ⟨witness, state, counterwitness pairs⟩)."""
    table, _ = IncAlgorithm(ctx.program, ctx.graph).table(ctx, children)
    return set(table)


def oinc_table(ctx, children):
    """Counting table: structural tuples with (cost, count) annotations."""
    table, _ = IncAlgorithm(ctx.program, ctx.graph).table(ctx, children)
    return table


# --- Rule-state operations (reference formulation over state programs) ---

def combine_states(program: Program, sigma: dict, rho: dict) -> dict:
    """Pointwise sum of two rule states; settled absorbs, caps applied."""
    out = {}
    for index in set(sigma) | set(rho):
        total = sigma.get(index, 0) + rho.get(index, 0)
        out[index] = _cap(program.rules[index], total)
    return out


@dataclass(frozen=True)
class StateProgram:
    """Per-rule residual programs over bag atoms.

    Reduced rules are lightweight tuples: ("choice"|"disj", head, pos, neg)
    or ("weight", head, bound, pos_weights, neg_weights).
    """
    entries: tuple

    def rules_for(self, index):
        for i, reduced in self.entries:
            if i == index:
                return reduced
        raise KeyError(index)

    def all_rules(self):
        return tuple(r for _, reduced in self.entries for r in reduced)


def reduced_satisfies(m, reduced) -> bool:
    kind = reduced[0]
    if kind == "choice":
        return True
    if kind == "disj":
        _, head, pos, neg = reduced
        return bool((head | neg) & m) or not pos <= m
    _, head, bound, pos_w, neg_w = reduced
    if head & m:
        return True
    fired = sum(w for a, w in pos_w if a in m) + sum(w for a, w in neg_w if a not in m)
    return fired < bound


def _project_rule(rule, bag, sigma_value, unseen_weight, head_complete):
    """Def.-4 transformation of a single rule (already known unsettled)."""
    head, pos, neg = rule.head & bag, rule.pos_body & bag, rule.neg_body & bag
    out = []
    if rule.kind == CHOICE:
        if head:
            out.append(("choice", head, pos, neg))
        if not head_complete:
            out.append(("disj", frozenset(), pos, neg))
    elif rule.kind == DISJUNCTIVE:
        out.append(("disj", head, pos, neg))
    elif rule.kind == WEIGHT:
        residual = max(0, rule.bound - sigma_value - unseen_weight)
        pos_w = tuple((a, w) for a, w in rule.weights if a in pos)
        neg_w = tuple((a, w) for a, w in rule.weights if a in neg)
        out.append(("weight", head, residual, pos_w, neg_w))
    return tuple(out)


def state_program(ctx, rule_indices, sigma: dict) -> StateProgram:
    """Residual programs deciding rule satisfaction for witnesses (Def.-4 form)."""
    entries = []
    for index in rule_indices:
        if sigma[index] == INF:
            entries.append((index, ()))
            continue
        info = _rule_info(ctx, index)
        entries.append((index, _project_rule(
            info.rule, ctx.bag_atoms, sigma[index],
            info.unseen_weight, info.head_complete)))
    return StateProgram(tuple(entries))


def _reduce_wrt(reduced, m):
    """GL reduct of one projected rule with respect to the witness."""
    kind = reduced[0]
    if kind == "choice":
        _, head, pos, neg = reduced
        if neg & m:
            return ()
        return tuple(("disj", frozenset({h}), pos, frozenset()) for h in sorted(head & m))
    if kind == "disj":
        _, head, pos, neg = reduced
        if neg & m:
            return ()
        return (("disj", head, pos, frozenset()),)
    _, head, bound, pos_w, neg_w = reduced
    lowered = max(0, bound - sum(w for a, w in neg_w if a not in m))
    return (("weight", head, lowered, pos_w, ()),)


def state_program_reduct(ctx, rule_indices, rho: dict, m) -> StateProgram:
    """Residual reduct programs deciding counterwitness satisfaction (Def.-5 form)."""
    entries = []
    for index in rule_indices:
        if rho[index] == INF:
            entries.append((index, ()))
            continue
        info = _rule_info(ctx, index)
        projected = list(_project_rule(
            info.rule, ctx.bag_atoms, rho[index],
            info.unseen_weight, info.head_complete))
        if info.rule.kind == CHOICE and rho[index] > 0:
            projected.append(("disj", frozenset(), info.pos_bag, info.neg_bag))
        reduced = tuple(r for p in projected for r in _reduce_wrt(p, m))
        entries.append((index, reduced))
    return StateProgram(tuple(entries))


def ssr(sp: StateProgram, m) -> dict:
    """Satisfied-rules map: settled where the set models the residual program."""
    return {
        index: INF if all(reduced_satisfies(m, r) for r in reduced) else 0
        for index, reduced in sp.entries
    }


def update_states(program: Program, rule_indices, m, atom) -> dict:
    """Progress contributed by a removed atom to witness states."""
    out = {}
    for index in rule_indices:
        r = program.rules[index]
        if r.kind == WEIGHT and (
                (atom in r.neg_body and atom not in m)
                or (atom in r.pos_body and atom in m)):
            out[index] = r.weight(atom)
        else:
            out[index] = 0
    return out


def update_red_states(program: Program, rule_indices, m, c, atom) -> dict:
    """Progress contributed by a removed atom to counterwitness states."""
    out = {}
    for index in rule_indices:
        r = program.rules[index]
        if r.kind == WEIGHT and (
                (atom in r.neg_body and atom not in m)
                or (atom in r.pos_body and atom in c)):
            out[index] = r.weight(atom)
        elif r.kind == CHOICE:
            out[index] = len({atom} & r.head & (m - c))
        else:
            out[index] = 0
    return out


def kmin(items):
    """Keep, per structural key, exactly the minimum-cost tuples (multiset)."""
    best: dict = {}
    for key, c, n in items:
        if key not in best or c < best[key]:
            best[key] = c
    return [(key, c, n) for key, c, n in items if c == best[key]]


def cnt(items):
    """Merge equal (key, cost) tuples, summing their counts."""
    out: dict = {}
    for key, c, n in items:
        out[(key, c)] = out.get((key, c), 0) + n
    return [(key, c, n) for (key, c), n in out.items()]


def inc_table_bound(width: int, max_weight_bound: int):
    """Worst-case tuple count per node, or None when astronomically large."""
    bag = width + 1
    states = max(3, max_weight_bound)
    exponent = 2 ** bag * states ** bag
    if exponent > 64:
        return None
    return 2 ** bag * states ** bag * 2 ** exponent
