"""Ground answer-set programs: rules, satisfaction, reducts and costs.

Atoms are interned to dense integer ids so that the DP tables can hash and
compare sets of atoms cheaply.  Interpretations are plain ``frozenset[int]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

DISJUNCTIVE = "disjunctive"
CHOICE = "choice"
WEIGHT = "weight"
OPTIMIZATION = "optimization"

RULE_KINDS = (DISJUNCTIVE, CHOICE, WEIGHT, OPTIMIZATION)


class ProgramError(ValueError):
    """Raised when a rule or program violates a structural invariant."""


@dataclass(frozen=True)
class Rule:
    """One ground rule over integer atom ids.

    ``weights`` holds the per-literal weights of weight rules (keyed by the
    atom of the literal; atoms within a rule are distinct, so this is
    unambiguous) and the single cost of optimization rules.
    """

    kind: str
    head: frozenset[int]
    pos_body: frozenset[int]
    neg_body: frozenset[int]
    bound: int = 0
    weights: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ProgramError(f"unknown rule kind {self.kind!r}")
        if self.head & self.pos_body or self.head & self.neg_body \
                or self.pos_body & self.neg_body:
            raise ProgramError("head and body atoms of a rule must be distinct")
        if self.bound < 0:
            raise ProgramError("negative bound")
        if any(w < 0 for _, w in self.weights):
            raise ProgramError("negative weight")
        if self.kind == CHOICE and not self.head:
            raise ProgramError("choice rule needs a non-empty head")
        if self.kind == WEIGHT and len(self.head) != 1:
            raise ProgramError("weight rule head must be a single atom")
        if self.kind == OPTIMIZATION:
            if self.head or len(self.pos_body | self.neg_body) != 1:
                raise ProgramError("optimization rule carries exactly one literal")
            if len(self.weights) != 1:
                raise ProgramError("optimization rule needs exactly one cost")

    @property
    def atoms(self) -> frozenset[int]:
        return self.head | self.pos_body | self.neg_body

    @property
    def cost(self) -> int:
        """Cost of an optimization rule."""
        return self.weights[0][1]

    def weight(self, atom: int) -> int:
        for a, w in self.weights:
            if a == atom:
                return w
        return 0

    def weight_sum(self, atoms) -> int:
        return sum(w for a, w in self.weights if a in atoms)


def disjunctive_rule(head, pos_body=(), neg_body=()) -> Rule:
    return Rule(DISJUNCTIVE, frozenset(head), frozenset(pos_body), frozenset(neg_body))


def choice_rule(head, pos_body=(), neg_body=()) -> Rule:
    return Rule(CHOICE, frozenset(head), frozenset(pos_body), frozenset(neg_body))


def weight_rule(head_atom: int, bound: int, pos_weights=(), neg_weights=()) -> Rule:
    """``head ← bound ≤ {a=w, ..., ¬b=v, ...}``; weights given as (atom, w) pairs."""
    pos = frozenset(a for a, _ in pos_weights)
    neg = frozenset(a for a, _ in neg_weights)
    weights = tuple(sorted(itertools.chain(pos_weights, neg_weights)))
    if len(weights) != len(pos) + len(neg):
        raise ProgramError("duplicate atom in weight rule body")
    return Rule(WEIGHT, frozenset({head_atom}), pos, neg, bound, weights)


def optimization_rule(atom: int, cost: int, negated: bool = False) -> Rule:
    pos = frozenset() if negated else frozenset({atom})
    neg = frozenset({atom}) if negated else frozenset()
    return Rule(OPTIMIZATION, frozenset(), pos, neg, 0, ((atom, cost),))


class Program:
    """An immutable set of ground rules plus the atom name table.

    The atom universe ``at(Π)`` is every interned atom, including isolated
    atoms that occur in no rule (they matter for I/O fidelity, never for
    answer sets).
    """

    def __init__(self, atom_names, rules):
        self._names = tuple(atom_names)
        self._ids = {n: i for i, n in enumerate(self._names)}
        if len(self._ids) != len(self._names):
            raise ProgramError("duplicate atom name")
        self.rules = tuple(rules)
        bad = [r for r in self.rules for a in r.atoms if a >= len(self._names) or a < 0]
        if bad:
            raise ProgramError("rule references unknown atom id")

    @property
    def atom_count(self) -> int:
        return len(self._names)

    @property
    def universe(self) -> frozenset[int]:
        return frozenset(range(len(self._names)))

    def atom_name(self, atom: int) -> str:
        return self._names[atom]

    def atom_id(self, name: str) -> int:
        return self._ids[name]

    @property
    def atom_names(self) -> tuple[str, ...]:
        return self._names

    def rules_of_kind(self, kind) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind == kind)

    @property
    def optimization_rules(self) -> tuple[Rule, ...]:
        return self.rules_of_kind(OPTIMIZATION)

    def __eq__(self, other):
        if isinstance(other, Program):
            return self._names == other._names and \
                sorted(self.rules, key=_rule_key) == sorted(other.rules, key=_rule_key)
        return NotImplemented

    def __repr__(self):
        return f"Program({len(self._names)} atoms, {len(self.rules)} rules)"


def _rule_key(r: Rule):
    return (r.kind, sorted(r.head), sorted(r.pos_body), sorted(r.neg_body),
            r.bound, r.weights)


class ProgramBuilder:
    """Incremental construction with atom interning by name."""

    def __init__(self):
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        self._rules: list[Rule] = []

    def atom(self, name: str) -> int:
        if name not in self._ids:
            self._ids[name] = len(self._names)
            self._names.append(name)
        return self._ids[name]

    def add(self, rule: Rule) -> None:
        self._rules.append(rule)

    def build(self) -> Program:
        return Program(self._names, self._rules)


def satisfies(m: frozenset, rule: Rule) -> bool:
    """Whether the interpretation ``m`` satisfies one rule.

    Choice and optimization rules are satisfied by every interpretation;
    only their reducts / costs carry meaning.
    """
    if rule.kind == DISJUNCTIVE:
        return bool((rule.head | rule.neg_body) & m) or not rule.pos_body <= m
    if rule.kind == WEIGHT:
        if rule.head & m:
            return True
        fired = sum(w for a, w in rule.weights
                    if (a in rule.pos_body and a in m)
                    or (a in rule.neg_body and a not in m))
        return fired < rule.bound
    return True


def is_model(m: frozenset, program: Program) -> bool:
    return all(satisfies(m, r) for r in program.rules)


def reduct(program: Program, m: frozenset) -> Program:
    """The GL reduct of ``program`` with respect to ``m``.

    The result contains only disjunctive and weight rules with empty
    negative bodies; weight bounds are floored at zero.
    """
    out = []
    for r in program.rules:
        out.extend(rule_reduct(r, m))
    return Program(program.atom_names, out)


def rule_reduct(rule: Rule, m: frozenset) -> list[Rule]:
    """The reduct of one rule: zero or more negation-free rules."""
    if rule.kind == CHOICE:
        if rule.neg_body & m:
            return []
        return [Rule(DISJUNCTIVE, frozenset({a}), rule.pos_body, frozenset())
                for a in sorted(rule.head & m)]
    if rule.kind == DISJUNCTIVE:
        if rule.neg_body & m:
            return []
        return [Rule(DISJUNCTIVE, rule.head, rule.pos_body, frozenset())]
    if rule.kind == WEIGHT:
        lowered = max(0, rule.bound - rule.weight_sum(rule.neg_body - m))
        pos_weights = tuple((a, w) for a, w in rule.weights if a in rule.pos_body)
        return [Rule(WEIGHT, rule.head, rule.pos_body, frozenset(), lowered, pos_weights)]
    return []


def cost(program: Program, m: frozenset, atoms: frozenset) -> int:
    """Summed cost of optimization rules triggered by ``m``, restricted to ``atoms``."""
    total = 0
    for r in program.optimization_rules:
        if atoms & ((r.pos_body & m) | (r.neg_body - m)):
            total += r.cost
    return total


def is_answer_set(program: Program, m: frozenset) -> bool:
    """Definition-level check: model of the program, subset-minimal for its reduct.

    Exponential in ``|m|``; meant for the oracle and desk-scale checks.
    """
    if not is_model(m, program):
        return False
    red = reduct(program, m)
    members = sorted(m)
    for k in range(len(members)):
        for sub in itertools.combinations(members, k):
            if is_model(frozenset(sub), red):
                return False
    return True
