"""Live sessions: the reactive graph behind one user's workbench.

A session owns a graph with a single dataset input node plus, per wired
module, input nodes for its widgets, choice-list nodes and refresh
observers for its variable selects, one computed node per output that
interpolates the module's code template, and a store observer that
appends the latest statement to the script when the store button fires.

Every output recompute goes through interpolate: the statement text the
code panel shows is exactly what ran, so replaying the script later
reproduces the panel results.
"""

from __future__ import annotations

import math
import secrets
import threading
import time

from . import results
from .dataset import parse_csv
from .dsl.ast import Arg, Call, ColumnRef, Str, print_value
from .dsl.evaluator import (
    COLUMN_KINDS,
    CommandRegistry,
    EvalEnv,
    default_registry,
    eval_call,
)
from .dsl.parser import parse_script
from .dsl.script import Script, store_statement, with_preamble
from .dsl.template import Binding, RenderedStatement, interpolate
from .errors import DomainError, ScriptEvalError, SessionError
from .reactive import Graph, PropagatedError
from .registry import InputDescriptor, ModuleManifest, Registry
from .report import render_report, report_markdown

DATASET_NODE = "dataset"
VARIABLE_SOURCES = ("NumericVariables", "CategoricalVariables", "AllVariables")


def load_statement(filename: str) -> RenderedStatement:
    call = Call("load_data", (Arg(None, Str(filename)),))
    return RenderedStatement(text=print_value(call), module_id="data/sources", produced_at=0)


def _pick(choices: list[str], ordinal: int) -> str:
    if not choices:
        return ""
    return choices[min(ordinal, len(choices) - 1)]


def _widget_json(d: InputDescriptor):
    if d.widget == "Slider":
        s = d.slider
        return {
            "Slider": {
                "min": s.minimum,
                "max": s.maximum,
                "step": s.step,
                "default": s.default,
            }
        }
    return d.widget


class Session:
    """One user's state.  All public methods expect the caller to hold
    self.lock; the HTTP layer serializes per-session access through it."""

    def __init__(
        self,
        session_id: str,
        registry: Registry,
        commands: CommandRegistry,
        filename: str,
        data: bytes,
        dataset=None,
        preamble: tuple[RenderedStatement, ...] | None = None,
        stored: tuple[RenderedStatement, ...] = (),
    ):
        self.id = session_id
        self.registry = registry
        self.commands = commands
        self.lock = threading.Lock()
        self.created_at = time.monotonic()
        self.last_used = time.monotonic()
        self.code_visible = True

        self.uploaded_bytes = bytes(data)
        self.data_filename = filename
        if dataset is None:
            dataset = parse_csv(self.uploaded_bytes)
        if preamble is None:
            preamble = (load_statement(filename),)
        self.script = Script(preamble=tuple(preamble), stored=tuple(stored))

        self.graph = Graph()
        self.graph.add_input(DATASET_NODE, dataset)

        # latest statement per module and latest payload per output node
        self.module_code: dict[str, RenderedStatement] = {}
        self.output_payloads: dict[str, dict] = {}
        # per-request change collectors, filled by render observers
        self._changed_outputs: dict[str, dict] = {}
        self._changed_code: dict[str, str] = {}
        # input node id -> (manifest, descriptor), for validation and UI
        self._input_meta: dict[str, tuple[ModuleManifest, InputDescriptor]] = {}
        self._wired: set[str] = set()

        for manifest in registry.modules:
            self.wire_module(manifest)
        self._changed_outputs = {}
        self._changed_code = {}

    # -- wiring ----------------------------------------------------------

    def _loader(self, filename: str):
        # replay always reads the retained bytes, whatever name the script uses
        return parse_csv(self.uploaded_bytes)

    def wire_module(self, m: ModuleManifest) -> set[str]:
        if m.module_id in self._wired:
            raise SessionError(f"module {m.module_id} is already wired")
        self._wired.add(m.module_id)
        dot = f"{m.category}.{m.name}"
        created: set[str] = set()

        # input nodes, seeded so the registration runs below are no-ops
        dataset = self.graph.peek(DATASET_NODE)
        ordinals = self._source_ordinals(m)
        for d in m.inputs:
            node = f"{dot}.in.{d.id}"
            self.graph.add_input(node, self._initial_value(d, dataset, ordinals.get(d.id, 0)))
            self._input_meta[node] = (m, d)
            created.add(node)

        # choice lists recompute from the dataset; the observer keeps each
        # selection valid, resetting to the ordinal-th name when it vanishes
        for d in m.inputs:
            if d.choice_source is None or d.choice_source.kind == "Static":
                continue
            input_node = f"{dot}.in.{d.id}"
            choices_node = f"{dot}.choices.{d.id}"
            self.graph.add_computed(
                choices_node,
                lambda read, src=d.choice_source: src.choices(read(DATASET_NODE)),
            )
            created.add(choices_node)
            ordinal = ordinals.get(d.id, 0)

            def refresh(read, node=input_node, choices_node=choices_node,
                        multi=d.widget == "MultiSelect", ordinal=ordinal):
                choices = read(choices_node)
                current = self.graph.peek(node)
                if multi:
                    kept = [v for v in current if v in choices]
                    if kept != list(current):
                        self.graph.set_input(node, kept)
                elif current not in choices:
                    self.graph.set_input(node, _pick(choices, ordinal))

            self.graph.add_observer(f"{dot}.obs.{d.id}", refresh)

        for out in m.outputs:
            out_node = f"{dot}.out.{out.id}"
            self.graph.add_computed(out_node, self._make_output_fn(m, dot, out.id))
            created.add(out_node)
            self.graph.add_observer(
                f"{dot}.render.{out.id}", self._make_render_effect(m, out_node)
            )

        button_node = f"{dot}.in.{m.store_button}"
        self.graph.add_observer(f"{dot}.store", self._make_store_effect(m, button_node))
        return created

    def _source_ordinals(self, m: ModuleManifest) -> dict[str, int]:
        """Position of each variable-choice input among the module's inputs
        sharing its source kind: first gets the first name, second the second."""
        counters: dict[str, int] = {}
        ordinals: dict[str, int] = {}
        for d in m.inputs:
            if d.choice_source is not None and d.choice_source.kind in VARIABLE_SOURCES:
                kind = d.choice_source.kind
                ordinals[d.id] = counters.get(kind, 0)
                counters[kind] = ordinals[d.id] + 1
        return ordinals

    def _initial_value(self, d: InputDescriptor, dataset, ordinal: int):
        if d.widget == "Slider":
            return d.slider.default
        if d.widget == "ActionButton":
            return 0
        if d.widget == "Checkbox":
            return bool(d.default) if d.default is not None else False
        if d.widget == "NumericField":
            return d.default if d.default is not None else 0
        if d.widget == "MultiSelect":
            return []
        source = d.choice_source
        if source.kind == "Static":
            return d.default if d.default is not None else source.static[0]
        choices = source.choices(dataset)
        if d.default is not None and d.default in choices:
            return d.default
        return _pick(choices, ordinal)

    def _make_output_fn(self, m: ModuleManifest, dot: str, output_id: str):
        candidates = m.bindings_for(output_id)

        def compute(read):
            dataset = read(DATASET_NODE)
            binding = None
            for b in candidates:
                if all(read(f"{dot}.in.{k}") == v for k, v in b.when.items()):
                    binding = b
                    break
            if binding is None:
                return None, results.error_payload(
                    "no computation matches the current options"
                )
            bound = [
                Binding(param, self._binding_value(binding.kernel, param,
                                                   read(f"{dot}.in.{input_id}")))
                for input_id, param in binding.param_map.items()
            ]
            env = EvalEnv(dataset=dataset, loader=self._loader, registry=self.commands)
            try:
                return interpolate(
                    binding.template,
                    bound,
                    lambda call: eval_call(env, call),
                    module_id=m.module_id,
                    produced_at=self.graph.epoch,
                )
            except ScriptEvalError as e:
                # stale selection against a replaced dataset; the choice
                # observers reset it in a follow-up transaction
                return None, results.error_payload(str(e))

        return compute

    def _binding_value(self, kernel: str, param_name: str, raw):
        command = self.commands.get(kernel)
        param = next(p for p in command.params if p.name == param_name)
        if param.kind in COLUMN_KINDS:
            return ColumnRef(str(raw))
        return raw

    def _make_render_effect(self, m: ModuleManifest, out_node: str):
        def render(read):
            try:
                stmt, payload = read(out_node)
            except PropagatedError as e:
                stmt, payload = None, results.error_payload(str(e.original))
            self.output_payloads[out_node] = payload
            self._changed_outputs[out_node] = payload
            if stmt is not None:
                self.module_code[m.module_id] = stmt
                self._changed_code[m.module_id] = stmt.text

        return render

    def _make_store_effect(self, m: ModuleManifest, button_node: str):
        def store(read):
            clicks = read(button_node)
            if not clicks:
                return  # registration run
            stmt = self.module_code.get(m.module_id)
            if stmt is None:
                raise SessionError(f"nothing to store for {m.module_id}")
            before = self.graph.peek(DATASET_NODE)
            env = EvalEnv(dataset=before, loader=self._loader, registry=self.commands)
            # commit first: transforms mutate the dataset; a statement that
            # no longer evaluates must not enter the script
            eval_call(env, stmt.parsed())
            self.script = store_statement(self.script, stmt)
            if env.dataset is not before:
                self.graph.set_input(DATASET_NODE, env.dataset)

        return store

    # -- operations --------------------------------------------------------

    def touch(self):
        self.last_used = time.monotonic()

    def upload_data(self, filename: str, data: bytes) -> dict:
        dataset = parse_csv(data)  # DataError propagates with detail
        self.uploaded_bytes = bytes(data)
        self.data_filename = filename
        self.script = with_preamble(self.script, [load_statement(filename)])
        self._changed_outputs = {}
        self._changed_code = {}
        self.graph.set_input(DATASET_NODE, dataset)
        return results.dataset_info_payload(dataset, source=filename)

    def set_input_value(self, input_node: str, raw) -> dict:
        meta = self._input_meta.get(input_node)
        if meta is None:
            raise SessionError(f"unknown input {input_node!r}")
        m, d = meta
        value = self._coerce(m, d, input_node, raw)
        self._changed_outputs = {}
        self._changed_code = {}
        self.graph.set_input(input_node, value)
        return {
            "outputs": dict(self._changed_outputs),
            "code_panel": dict(self._changed_code),
        }

    def _live_choices(self, m: ModuleManifest, d: InputDescriptor) -> list[str]:
        if d.choice_source is None:
            return []
        if d.choice_source.kind == "Static":
            return list(d.choice_source.static)
        return list(self.graph.peek(f"{m.category}.{m.name}.choices.{d.id}"))

    def _coerce(self, m: ModuleManifest, d: InputDescriptor, node: str, raw):
        if d.widget == "Select":
            if not isinstance(raw, str):
                raise DomainError(f"{d.id} takes a string")
            if raw not in self._live_choices(m, d):
                raise DomainError(f"{raw!r} is not an available choice for {d.id}")
            return raw
        if d.widget == "MultiSelect":
            if not isinstance(raw, list) or not all(isinstance(v, str) for v in raw):
                raise DomainError(f"{d.id} takes a list of strings")
            if len(set(raw)) != len(raw):
                raise DomainError(f"{d.id}: duplicate selections")
            choices = self._live_choices(m, d)
            for v in raw:
                if v not in choices:
                    raise DomainError(f"{v!r} is not an available choice for {d.id}")
            return raw
        if d.widget == "NumericField":
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise DomainError(f"{d.id} takes a number")
            if isinstance(raw, float) and not math.isfinite(raw):
                raise DomainError(f"{d.id} takes a finite number")
            return raw
        if d.widget == "Slider":
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise DomainError(f"{d.id} takes a number")
            s = d.slider
            if raw < s.minimum - 1e-9 or raw > s.maximum + 1e-9:
                raise DomainError(
                    f"{d.id} must lie within [{s.minimum}, {s.maximum}]"
                )
            return s.snap(float(raw))
        if d.widget == "Checkbox":
            if not isinstance(raw, bool):
                raise DomainError(f"{d.id} takes a boolean")
            return raw
        # ActionButton: a click counter; the store endpoint is the normal path
        if isinstance(raw, bool) or not isinstance(raw, int) or raw < 0:
            raise DomainError(f"{d.id} takes a non-negative click count")
        return raw

    def store(self, category: str, name: str) -> int:
        m = self.registry.get(category, name)
        if m is None:
            raise SessionError(f"no module {category}/{name}")
        if m.module_id not in self.module_code:
            raise DomainError(f"nothing to store for {m.module_id}")
        button = f"{category}.{name}.in.{m.store_button}"
        self._changed_outputs = {}
        self._changed_code = {}
        self.graph.set_input(button, int(self.graph.peek(button)) + 1)
        return len(self.script.stored)

    def module_ui(self, category: str, name: str) -> dict:
        m = self.registry.get(category, name)
        if m is None:
            raise SessionError(f"no module {category}/{name}")
        dot = f"{category}.{name}"
        inputs = []
        for d in m.inputs:
            node = f"{dot}.in.{d.id}"
            entry = {
                "id": node,
                "input_id": d.id,
                "label": d.label,
                "widget": _widget_json(d),
                "value": self.graph.peek(node),
            }
            if d.choice_source is not None:
                entry["choices"] = self._live_choices(m, d)
            inputs.append(entry)
        outputs = []
        for out in m.outputs:
            out_node = f"{dot}.out.{out.id}"
            outputs.append(
                {
                    "id": out_node,
                    "output_id": out.id,
                    "kind": out.kind,
                    "title": out.title,
                    "result": self.output_payloads.get(out_node),
                }
            )
        stmt = self.module_code.get(m.module_id)
        return {
            "module_id": m.module_id,
            "category": category,
            "name": name,
            "title": m.title,
            "layout": {"options_width": 4, "results_width": 8},
            "store_button": m.store_button,
            "inputs": inputs,
            "outputs": outputs,
            "statement": stmt.text if stmt is not None else None,
        }

    def script_text(self) -> str:
        return self.script.text()

    def set_code_visibility(self, visible: bool):
        self.code_visible = bool(visible)

    def report_bundle(self) -> dict:
        env = EvalEnv(dataset=None, loader=self._loader, registry=self.commands)
        doc = render_report(self.script, env, include_code=self.code_visible)
        markdown, images = report_markdown(doc)
        return {
            "markdown": markdown,
            "images": images,
            "include_code": doc.include_code,
            "blocks": [{"code": b.code, "result": b.result} for b in doc.blocks],
        }


class SessionManager:
    """Holds live sessions; idle ones are evicted lazily on access."""

    def __init__(
        self,
        registry: Registry,
        filename: str,
        data: bytes,
        commands: CommandRegistry | None = None,
        ttl_seconds: float = 1800.0,
    ):
        self.registry = registry
        self.commands = commands if commands is not None else default_registry()
        self.demo_filename = filename
        self.demo_bytes = bytes(data)
        self.ttl_seconds = ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _evict(self):
        now = time.monotonic()
        dead = [
            sid
            for sid, s in self._sessions.items()
            if now - s.last_used > self.ttl_seconds
        ]
        for sid in dead:
            del self._sessions[sid]

    def create(self) -> Session:
        session = Session(
            session_id=secrets.token_urlsafe(16),
            registry=self.registry,
            commands=self.commands,
            filename=self.demo_filename,
            data=self.demo_bytes,
        )
        with self._lock:
            self._evict()
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._evict()
            session = self._sessions.get(session_id)
            if session is None:
                raise SessionError(f"no session {session_id!r}")
            session.touch()
            return session

    def resume(self, script_text: str, data: bytes, filename: str = "data.csv") -> Session:
        """Seed a session by replaying a script against the given CSV.

        Structural replay failures raise ScriptEvalError naming the
        statement; statements whose result is a domain error are kept,
        matching what the original session stored.
        """
        statements = parse_script(script_text)
        env = EvalEnv(
            dataset=None,
            loader=lambda _name: parse_csv(data),
            registry=self.commands,
        )

        n_pre = 0
        while n_pre < len(statements) and statements[n_pre].call.name == "load_data":
            n_pre += 1
        pre_calls = [s.call for s in statements[:n_pre]]
        if not pre_calls:
            pre_calls = [Call("load_data", (Arg(None, Str(filename)),))]
            payload = eval_call(env, pre_calls[0])
            if payload.get("type") == "error":
                raise ScriptEvalError(f"cannot load data: {payload['message']}")
        else:
            for stmt in statements[:n_pre]:
                payload = eval_call(env, stmt.call, stmt.line)
                if payload.get("type") == "error":
                    raise ScriptEvalError(
                        f"setup failed: {payload['message']}", stmt.line
                    )
            last = pre_calls[-1].args
            if last and isinstance(last[0].value, Str):
                filename = last[0].value.value

        for stmt in statements[n_pre:]:
            eval_call(env, stmt.call, stmt.line)

        session = Session(
            session_id=secrets.token_urlsafe(16),
            registry=self.registry,
            commands=self.commands,
            filename=filename,
            data=data,
            dataset=env.dataset,
            preamble=tuple(
                RenderedStatement(print_value(c), "data/sources", 0) for c in pre_calls
            ),
            stored=tuple(
                RenderedStatement(print_value(s.call), "", i + 1)
                for i, s in enumerate(statements[n_pre:])
            ),
        )
        with self._lock:
            self._evict()
            self._sessions[session.id] = session
        return session
