"""End-to-end solving pipelines: program → graph → nice TD → DP → readout."""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle as oracle_mod
from .decomposition import TreeDecomposition, heuristic_td, make_nice, validate_td
from .dp import extract_answer_set, root_optimum, run_dp
from .graphs import incidence_graph, primal_graph
from .inc import IncAlgorithm
from .model import Program
from .prim import PrimAlgorithm

TASKS = ("consistency", "count-optimal", "extract")


@dataclass
class PipelineResult:
    consistent: bool
    optimum: int | None
    count: int | None
    answer_set: frozenset | None
    width: int
    nodes: int


def build_graph(program: Program, kind: str):
    if kind == "primal":
        return primal_graph(program)
    if kind == "incidence":
        return incidence_graph(program)
    raise ValueError(f"unknown graph kind {kind!r}")


def make_algorithm(program: Program, graph):
    if graph.kind == "primal":
        return PrimAlgorithm(program, graph)
    return IncAlgorithm(program, graph)


def run_pipeline(program: Program, *, graph_kind: str = "incidence",
                 algorithm: str | None = None, task: str = "count-optimal",
                 heuristic: str = "min-fill", seed: int = 0,
                 td: TreeDecomposition | None = None,
                 table_callback=None) -> PipelineResult:
    """Solve one instance.  ``algorithm`` defaults to the graph's native one.

    A caller-provided ``td`` (for the chosen graph) bypasses the heuristic;
    it is validated and normalized here either way.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if algorithm == "oracle":
        rep = oracle_mod.report(program)
        best = next(iter(rep.answer_sets), None) if rep.answer_sets else None
        return PipelineResult(rep.optimum is not None, rep.optimum,
                              rep.optimal_count if rep.optimum is not None else None,
                              best, -1, 0)
    expected = {"prim": "primal", "inc": "incidence", None: graph_kind}[algorithm]
    if expected != graph_kind:
        raise ValueError(f"algorithm {algorithm!r} needs the {expected} graph")
    graph = build_graph(program, graph_kind)
    if td is None:
        td = heuristic_td(graph, heuristic, seed)
    check = validate_td(graph, td)
    if not check.ok:
        raise ValueError("invalid tree decomposition: " + "; ".join(check.violations))
    nice = td if td.is_nice else make_nice(td)
    algo = make_algorithm(program, graph)
    store = run_dp(algo, nice, program,
                   record_provenance=(task == "extract"),
                   table_callback=table_callback)
    readout = root_optimum(store)
    consistent = readout is not None
    answer_set = extract_answer_set(store) if task == "extract" else None
    optimum, count = readout if consistent else (None, None)
    return PipelineResult(consistent, optimum, count, answer_set,
                          nice.width, len(nice))
