"""Demand-driven reactive graph with dynamic dependency capture.

Inputs hold values; computed nodes derive values through a compute function
whose reads are logged, so the dependency graph always reflects the last
evaluation.  Writing an input marks the downstream subgraph dirty and then
pulls exactly the nodes the affected observers demand, each at most once per
transaction.  Observers fire in registration order and may write inputs;
such writes queue as follow-up transactions that merge into one report.

Compute errors do not tear the graph down: the node's value becomes an
error marker and reads of it raise PropagatedError, which downstream
computes may catch or let turn themselves into the same marker.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import CycleError, EngineError
from .values import values_equal


@dataclass(frozen=True)
class ErrorValue:
    """Cached result of a compute that raised; holds the original error."""

    error: Exception

    def __repr__(self):
        return f"ErrorValue({self.error!r})"


class PropagatedError(Exception):
    """Raised when a read touches a node whose compute failed."""

    def __init__(self, original: Exception, source: str):
        super().__init__(f"upstream node {source!r} failed: {original}")
        self.original = original
        self.source = source


@dataclass
class TransactionReport:
    """What one set_input call did, follow-up transactions included."""

    recomputed: list[str] = field(default_factory=list)
    effects_run: list[str] = field(default_factory=list)
    transactions: list["TransactionReport"] = field(default_factory=list)

    def merge(self, sub: "TransactionReport"):
        self.recomputed.extend(sub.recomputed)
        self.effects_run.extend(sub.effects_run)
        self.transactions.append(sub)


class _Input:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class _Computed:
    __slots__ = ("fn", "value", "dirty", "deps")

    def __init__(self, fn):
        self.fn = fn
        self.value = None
        self.dirty = True
        self.deps: set[str] = set()


class _Observer:
    __slots__ = ("effect", "deps")

    def __init__(self, effect):
        self.effect = effect
        self.deps: set[str] = set()


ReadFn = Callable[[str], Any]


class Graph:
    def __init__(self):
        self._inputs: dict[str, _Input] = {}
        self._computed: dict[str, _Computed] = {}
        self._observers: dict[str, _Observer] = {}
        self._observer_order: list[str] = []
        # reverse adjacency: node id -> ids of computeds/observers that read it
        self._dependents: dict[str, set[str]] = {}
        self._eval_stack: list[str] = []
        self._current_reader: str | None = None
        self._in_transaction = False
        self._in_compute = False
        self._pending_writes: list[tuple[str, Any]] = []
        self._report: TransactionReport | None = None
        # counts sub-transactions that actually changed an input
        self.epoch = 0

    # -- construction --------------------------------------------------

    def add_input(self, node_id: str, value: Any):
        self._check_fresh(node_id)
        self._inputs[node_id] = _Input(value)

    def add_computed(self, node_id: str, fn: Callable[[ReadFn], Any]):
        self._check_fresh(node_id)
        self._computed[node_id] = _Computed(fn)

    def add_observer(self, observer_id: str, effect: Callable[[ReadFn], None]):
        """Register an effect; it runs once now and again whenever a node it
        read is invalidated by a later transaction.
        """
        self._check_fresh(observer_id)
        obs = _Observer(effect)
        self._observers[observer_id] = obs
        self._observer_order.append(observer_id)
        self._run_observer(observer_id)

    def _check_fresh(self, node_id: str):
        if node_id in self._inputs or node_id in self._computed or node_id in self._observers:
            raise EngineError(f"node id {node_id!r} already registered")

    def has_node(self, node_id: str) -> bool:
        return node_id in self._inputs or node_id in self._computed

    # -- reading -------------------------------------------------------

    def peek(self, node_id: str) -> Any:
        """Read without recording a dependency edge.  Still evaluates dirty
        nodes and still raises PropagatedError for errored ones.
        """
        saved = self._current_reader
        self._current_reader = None
        try:
            return self._read(node_id)
        finally:
            self._current_reader = saved

    def _read(self, node_id: str) -> Any:
        if node_id in self._inputs:
            self._record_edge(node_id)
            return self._inputs[node_id].value
        node = self._computed.get(node_id)
        if node is None:
            raise EngineError(f"unknown node {node_id!r}")
        if node.dirty:
            self._evaluate(node_id, node)
        self._record_edge(node_id)
        if isinstance(node.value, ErrorValue):
            raise PropagatedError(node.value.error, node_id)
        return node.value

    def _record_edge(self, node_id: str):
        if self._current_reader is not None:
            reader = self._current_reader
            if reader in self._computed:
                self._computed[reader].deps.add(node_id)
            else:
                self._observers[reader].deps.add(node_id)
            self._dependents.setdefault(node_id, set()).add(reader)

    def _evaluate(self, node_id: str, node: _Computed):
        if node_id in self._eval_stack:
            path = self._eval_stack[self._eval_stack.index(node_id):] + [node_id]
            raise CycleError(path)
        self._drop_edges(node_id, node.deps)
        node.deps = set()
        self._eval_stack.append(node_id)
        saved_reader = self._current_reader
        saved_in_compute = self._in_compute
        self._current_reader = node_id
        self._in_compute = True
        try:
            node.value = node.fn(self._read)
        except PropagatedError as e:
            node.value = ErrorValue(e.original)
        except CycleError:
            raise
        except Exception as e:
            node.value = ErrorValue(e)
        finally:
            self._eval_stack.pop()
            self._current_reader = saved_reader
            self._in_compute = saved_in_compute
        node.dirty = False
        if self._report is not None:
            self._report.recomputed.append(node_id)

    def _drop_edges(self, reader: str, deps: set[str]):
        for dep in deps:
            dependents = self._dependents.get(dep)
            if dependents is not None:
                dependents.discard(reader)

    # -- writing -------------------------------------------------------

    def set_input(self, node_id: str, value: Any) -> TransactionReport | None:
        """Write an input and run the consequences.

        Inside an observer effect the write is queued and folded into the
        enclosing transaction; the outer call returns the merged report.
        Compute functions must stay pure and may not write.
        """
        if node_id not in self._inputs:
            raise EngineError(f"unknown input {node_id!r}")
        if self._in_compute:
            raise EngineError("compute functions may not write inputs")
        if self._in_transaction:
            self._pending_writes.append((node_id, value))
            return None

        outer = TransactionReport()
        self._in_transaction = True
        self._pending_writes = [(node_id, value)]
        try:
            while self._pending_writes:
                nid, val = self._pending_writes.pop(0)
                sub = self._run_transaction(nid, val)
                if sub is not None:
                    outer.merge(sub)
        finally:
            self._in_transaction = False
            self._pending_writes = []
        return outer

    def _run_transaction(self, node_id: str, value: Any) -> TransactionReport | None:
        node = self._inputs[node_id]
        if values_equal(node.value, value):
            return None
        node.value = value
        self.epoch += 1

        touched = self._invalidate(node_id)
        report = TransactionReport()
        self._report = report
        try:
            for obs_id in self._observer_order:
                if obs_id in touched:
                    self._run_observer(obs_id)
                    report.effects_run.append(obs_id)
        finally:
            self._report = None
        return report

    def _invalidate(self, root: str) -> set[str]:
        """Mark every computed reachable from root dirty; return the set of
        reachable observer ids.
        """
        touched_observers: set[str] = set()
        frontier = [root]
        seen = {root}
        while frontier:
            current = frontier.pop()
            for dep_id in self._dependents.get(current, ()):
                if dep_id in self._observers:
                    touched_observers.add(dep_id)
                    continue
                if dep_id in seen:
                    continue
                seen.add(dep_id)
                self._computed[dep_id].dirty = True
                frontier.append(dep_id)
        return touched_observers

    def _run_observer(self, observer_id: str):
        obs = self._observers[observer_id]
        self._drop_edges(observer_id, obs.deps)
        obs.deps = set()
        saved = self._current_reader
        self._current_reader = observer_id
        try:
            obs.effect(self._read)
        finally:
            self._current_reader = saved
