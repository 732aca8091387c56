"""Random DAG builder shared by the reactive engine tests.

The same node specs drive both the engine under test and the naive
full-recompute oracle, so any divergence is the engine's fault, not the
harness's.  The "switch" kind exercises dynamic dependency capture: which
branch a node reads depends on the live value of its first dependency.
"""

from __future__ import annotations

import random

from oracles import NaiveGraph
from statbench.reactive import Graph

NodeSpec = tuple[str, str, list[str]]


def make_compute(kind: str, deps: list[str]):
    if kind == "sum":
        return lambda read: sum(read(d) for d in deps) + 1
    if kind == "max":
        return lambda read: max(read(d) for d in deps)
    if kind == "mul":
        return lambda read: _bounded_product(read(d) for d in deps)
    if kind == "switch":
        a, b, c = deps
        return lambda read: read(b) - 1 if read(a) % 2 == 0 else read(c) * 2
    raise ValueError(kind)


def _bounded_product(values) -> int:
    out = 1
    for v in values:
        out = (out * v) % 9973
    return out


def build_random_dag(rng: random.Random, max_nodes: int = 50):
    """Return (input_values, specs): inputs i0..iK hold small ints, computed
    nodes c0..cM each read one to three earlier nodes."""
    n_inputs = rng.randint(1, max(1, max_nodes // 3))
    n_computed = rng.randint(1, max_nodes - n_inputs)
    input_ids = [f"i{k}" for k in range(n_inputs)]
    input_values = {nid: rng.randint(-5, 5) for nid in input_ids}

    specs: list[NodeSpec] = []
    pool = list(input_ids)
    for k in range(n_computed):
        nid = f"c{k}"
        arity = rng.randint(1, min(3, len(pool)))
        deps = rng.sample(pool, arity)
        kinds = ["sum", "max", "mul"] + (["switch"] if arity == 3 else [])
        specs.append((nid, rng.choice(kinds), deps))
        pool.append(nid)
    return input_values, specs


def instrumented_graph(input_values: dict[str, int], specs: list[NodeSpec]):
    """Engine graph with per-node evaluation counters, plus one observer that
    demands every computed node so each transaction pulls the whole graph."""
    graph = Graph()
    counts: dict[str, int] = {}
    for nid, value in input_values.items():
        graph.add_input(nid, value)
    for nid, kind, deps in specs:
        fn = make_compute(kind, deps)

        def counted(read, fn=fn, nid=nid):
            counts[nid] = counts.get(nid, 0) + 1
            return fn(read)

        graph.add_computed(nid, counted)
    observed: dict[str, int] = {}

    def watch_all(read):
        for nid, _, _ in specs:
            observed[nid] = read(nid)

    graph.add_observer("watch", watch_all)
    return graph, counts, observed


def naive_graph(input_values: dict[str, int], specs: list[NodeSpec]) -> NaiveGraph:
    naive = NaiveGraph()
    for nid, value in input_values.items():
        naive.add_input(nid, value)
    for nid, kind, deps in specs:
        naive.add_computed(nid, make_compute(kind, deps))
    return naive


def run_comparison(seed: int, n_transactions: int, max_nodes: int = 50):
    """Drive the same random writes through both graphs.

    Returns (mismatched node ids, at-most-once violations observed).
    """
    rng = random.Random(seed)
    input_values, specs = build_random_dag(rng, max_nodes=max_nodes)
    graph, counts, _ = instrumented_graph(input_values, specs)
    naive = naive_graph(input_values, specs)

    input_ids = list(input_values)
    violations: list[str] = []
    for _ in range(n_transactions):
        nid = rng.choice(input_ids)
        value = rng.randint(-5, 5)
        counts.clear()
        graph.set_input(nid, value)
        naive.set_input(nid, value)
        violations.extend(k for k, c in counts.items() if c > 1)

    mismatches = [
        nid
        for nid, _, _ in specs
        if graph.peek(nid) != naive.value(nid)
    ]
    return mismatches, violations
