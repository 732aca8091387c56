"""Module manifests: schema, validation, discovery, navigation.

A module is one JSON file declaring its widgets, its outputs, and the
bindings that connect widget values to a kernel command through a code
template.  Everything here is declarative and immutable; wiring a
manifest into a live session happens in the session layer.

Validation failures carry one of four codes:

  SCHEMA                malformed JSON, wrong types, unknown fields,
                        widget or slider rule violations
  STORE_BUTTON_MISSING  no store_button, or it names no ActionButton
  LAYOUT_WIDTHS         layout widths other than 4 and 8
  DANGLING_REF          a binding references an input, output, kernel,
                        or kernel parameter that does not exist
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import Dataset, categorical_names, numeric_names
from .dsl.evaluator import CommandRegistry, default_registry
from .dsl.template import CodeTemplate
from .errors import ManifestError, TemplateError

CATEGORIES = ("data", "summaries", "inference")
SIMPLE_WIDGETS = ("Select", "MultiSelect", "NumericField", "Checkbox", "ActionButton")
OUTPUT_KINDS = ("Text", "Table", "Plot")
VARIABLE_SOURCES = ("NumericVariables", "CategoricalVariables", "AllVariables")

OPTIONS_WIDTH = 4
RESULTS_WIDTH = 8

REQUIRED_MODULE = "data/sources"


def _schema(message: str) -> ManifestError:
    return ManifestError("SCHEMA", message)


def _dangling(message: str) -> ManifestError:
    return ManifestError("DANGLING_REF", message)


@dataclass(frozen=True)
class SliderSpec:
    minimum: float
    maximum: float
    step: float
    default: float

    @property
    def decimals(self) -> int:
        """Digits after the point in the step, for grid snapping."""
        text = repr(float(self.step))
        if "e" in text or "E" in text:
            return 12
        return len(text.split(".", 1)[1]) if "." in text else 0

    def snap(self, value: float) -> float:
        """Round value onto the min + k*step grid and clamp to the range."""
        k = round((value - self.minimum) / self.step)
        snapped = round(self.minimum + k * self.step, self.decimals)
        return min(self.maximum, max(self.minimum, snapped))


@dataclass(frozen=True)
class ChoiceSource:
    kind: str  # NumericVariables | CategoricalVariables | AllVariables | Static
    static: tuple[str, ...] = ()

    def choices(self, ds: Dataset | None) -> list[str]:
        if self.kind == "Static":
            return list(self.static)
        if ds is None:
            return []
        if self.kind == "NumericVariables":
            return numeric_names(ds)
        if self.kind == "CategoricalVariables":
            return categorical_names(ds)
        return list(ds.column_names())


@dataclass(frozen=True)
class InputDescriptor:
    id: str
    label: str
    widget: str  # Select | MultiSelect | NumericField | Slider | Checkbox | ActionButton
    slider: SliderSpec | None = None
    choice_source: ChoiceSource | None = None
    default: object = None


@dataclass(frozen=True)
class OutputDescriptor:
    id: str
    kind: str  # Text | Table | Plot
    title: str


@dataclass(frozen=True)
class ComputeBinding:
    kernel: str
    param_map: dict[str, str]  # input id -> kernel parameter
    template: CodeTemplate
    output_id: str
    # optional guard: binding applies only while each named input holds
    # the given value; lets one output switch kernels on a Select
    when: dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class ModuleManifest:
    category: str
    name: str
    title: str
    inputs: tuple[InputDescriptor, ...]
    outputs: tuple[OutputDescriptor, ...]
    bindings: tuple[ComputeBinding, ...]
    store_button: str

    @property
    def module_id(self) -> str:
        return f"{self.category}/{self.name}"

    def input(self, input_id: str) -> InputDescriptor:
        for d in self.inputs:
            if d.id == input_id:
                return d
        raise KeyError(input_id)

    def bindings_for(self, output_id: str) -> list[ComputeBinding]:
        return [b for b in self.bindings if b.output_id == output_id]


@dataclass(frozen=True)
class Registry:
    modules: tuple[ModuleManifest, ...]

    def module_ids(self) -> list[str]:
        return [m.module_id for m in self.modules]

    def get(self, category: str, name: str) -> ModuleManifest | None:
        for m in self.modules:
            if m.category == category and m.name == name:
                return m
        return None


# -- schema checks -------------------------------------------------------


def _expect_dict(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise _schema(f"{where} must be an object")
    return value


def _expect_str(value, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise _schema(f"{where} must be a non-empty string")
    return value


def _expect_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _schema(f"{where} must be a number")
    return float(value)


def _check_keys(obj: dict, required: tuple, optional: tuple, where: str):
    for key in required:
        if key not in obj:
            raise _schema(f"{where} is missing {key!r}")
    for key in obj:
        if key not in required and key not in optional:
            raise _schema(f"{where} has unknown field {key!r}")


def _parse_slider(raw, where: str) -> SliderSpec:
    obj = _expect_dict(raw, where)
    _check_keys(obj, ("min", "max", "step", "default"), (), where)
    lo = _expect_number(obj["min"], f"{where}.min")
    hi = _expect_number(obj["max"], f"{where}.max")
    step = _expect_number(obj["step"], f"{where}.step")
    default = _expect_number(obj["default"], f"{where}.default")
    if not lo < hi:
        raise _schema(f"{where}: min must be less than max")
    if step <= 0:
        raise _schema(f"{where}: step must be positive")
    if not lo <= default <= hi:
        raise _schema(f"{where}: default must lie within [min, max]")
    return SliderSpec(minimum=lo, maximum=hi, step=step, default=default)


def _parse_choice_source(raw, where: str) -> ChoiceSource:
    if isinstance(raw, str):
        if raw not in VARIABLE_SOURCES:
            raise _schema(f"{where}: unknown choice_source {raw!r}")
        return ChoiceSource(kind=raw)
    obj = _expect_dict(raw, where)
    _check_keys(obj, ("Static",), (), where)
    items = obj["Static"]
    if not isinstance(items, list) or not items:
        raise _schema(f"{where}: Static choices must be a non-empty list")
    for item in items:
        if not isinstance(item, str):
            raise _schema(f"{where}: Static choices must be strings")
    return ChoiceSource(kind="Static", static=tuple(items))


def _is_scalar(value) -> bool:
    return isinstance(value, (str, int, float, bool)) and value is not None


def _parse_input(raw, where: str) -> InputDescriptor:
    obj = _expect_dict(raw, where)
    _check_keys(obj, ("id", "label", "widget"), ("choice_source", "default"), where)
    input_id = _expect_str(obj["id"], f"{where}.id")
    label = _expect_str(obj["label"], f"{where}.label")

    raw_widget = obj["widget"]
    slider = None
    if isinstance(raw_widget, str):
        if raw_widget not in SIMPLE_WIDGETS:
            raise _schema(f"{where}: unknown widget {raw_widget!r}")
        widget = raw_widget
    else:
        widget_obj = _expect_dict(raw_widget, f"{where}.widget")
        _check_keys(widget_obj, ("Slider",), (), f"{where}.widget")
        widget = "Slider"
        slider = _parse_slider(widget_obj["Slider"], f"{where}.widget.Slider")

    source = None
    if "choice_source" in obj:
        if widget not in ("Select", "MultiSelect"):
            raise _schema(f"{where}: {widget} takes no choice_source")
        source = _parse_choice_source(obj["choice_source"], f"{where}.choice_source")
    elif widget in ("Select", "MultiSelect"):
        raise _schema(f"{where}: {widget} requires a choice_source")

    default = obj.get("default")
    if "default" in obj:
        if widget == "ActionButton" or widget == "Slider":
            raise _schema(f"{where}: {widget} takes no default field")
        if widget == "NumericField":
            default = _expect_number(default, f"{where}.default")
        elif widget == "Checkbox":
            if not isinstance(default, bool):
                raise _schema(f"{where}.default must be a boolean")
        elif widget == "Select":
            default = _expect_str(default, f"{where}.default")
            if source.kind == "Static" and default not in source.static:
                raise _schema(f"{where}: default {default!r} is not a Static choice")
        elif widget == "MultiSelect":
            raise _schema(f"{where}: MultiSelect takes no default field")

    return InputDescriptor(
        id=input_id,
        label=label,
        widget=widget,
        slider=slider,
        choice_source=source,
        default=default,
    )


def _parse_output(raw, where: str) -> OutputDescriptor:
    obj = _expect_dict(raw, where)
    _check_keys(obj, ("id", "kind", "title"), (), where)
    kind = _expect_str(obj["kind"], f"{where}.kind")
    if kind not in OUTPUT_KINDS:
        raise _schema(f"{where}: unknown output kind {kind!r}")
    return OutputDescriptor(
        id=_expect_str(obj["id"], f"{where}.id"),
        kind=kind,
        title=_expect_str(obj["title"], f"{where}.title"),
    )


def _parse_binding(raw, where: str) -> ComputeBinding:
    obj = _expect_dict(raw, where)
    _check_keys(obj, ("kernel", "param_map", "template", "output_id"), ("when",), where)
    kernel = _expect_str(obj["kernel"], f"{where}.kernel")
    raw_map = _expect_dict(obj["param_map"], f"{where}.param_map")
    param_map: dict[str, str] = {}
    for key, value in raw_map.items():
        param_map[_expect_str(key, f"{where}.param_map key")] = _expect_str(
            value, f"{where}.param_map[{key!r}]"
        )
    if len(set(param_map.values())) != len(param_map):
        raise _schema(f"{where}: two inputs map to the same kernel parameter")
    try:
        template = CodeTemplate.from_skeleton(_expect_str(obj["template"], f"{where}.template"))
    except TemplateError as e:
        raise _schema(f"{where}.template: {e}") from None
    when: dict[str, object] = {}
    if "when" in obj:
        for key, value in _expect_dict(obj["when"], f"{where}.when").items():
            if not _is_scalar(value):
                raise _schema(f"{where}.when[{key!r}] must be a scalar")
            when[key] = value
    return ComputeBinding(
        kernel=kernel,
        param_map=param_map,
        template=template,
        output_id=_expect_str(obj["output_id"], f"{where}.output_id"),
        when=when,
    )


def _check_binding_refs(
    manifest: ModuleManifest, binding: ComputeBinding, commands: CommandRegistry, where: str
):
    input_ids = {d.id for d in manifest.inputs}
    output_ids = {o.id for o in manifest.outputs}
    if binding.output_id not in output_ids:
        raise _dangling(f"{where}: output_id {binding.output_id!r} matches no output")
    for input_id in binding.param_map:
        if input_id not in input_ids:
            raise _dangling(f"{where}: param_map names unknown input {input_id!r}")
    for input_id in binding.when:
        if input_id not in input_ids:
            raise _dangling(f"{where}: when names unknown input {input_id!r}")

    command = commands.get(binding.kernel)
    if command is None:
        raise _dangling(f"{where}: unknown kernel {binding.kernel!r}")
    declared = {p.name: p for p in command.params}
    mapped = set(binding.param_map.values())
    for param in mapped:
        if param not in declared:
            raise _dangling(
                f"{where}: kernel {binding.kernel!r} has no parameter {param!r}"
            )
    for param in command.params:
        if param.required and param.name not in mapped:
            raise _dangling(
                f"{where}: required parameter {param.name!r} of {binding.kernel!r} is not mapped"
            )
    placeholders = set(binding.template.placeholder_order)
    if placeholders != mapped:
        raise _dangling(
            f"{where}: template placeholders {sorted(placeholders)} do not match "
            f"mapped parameters {sorted(mapped)}"
        )


def load_manifest(data: bytes | str | dict, commands: CommandRegistry | None = None) -> ModuleManifest:
    """Parse and fully validate one manifest.  Raises ManifestError."""
    if commands is None:
        commands = default_registry()
    if isinstance(data, (bytes, str)):
        try:
            obj = json.loads(data)
        except json.JSONDecodeError as e:
            raise _schema(f"not valid JSON: {e}") from None
    else:
        obj = data
    obj = _expect_dict(obj, "manifest")
    _check_keys(
        obj,
        ("category", "name", "title", "inputs", "outputs", "bindings", "layout", "store_button"),
        (),
        "manifest",
    )

    category = _expect_str(obj["category"], "category")
    if category not in CATEGORIES:
        raise _schema(f"category must be one of {', '.join(CATEGORIES)}")
    name = _expect_str(obj["name"], "name")
    if "/" in name or name.strip() != name:
        raise _schema("name may not contain slashes or surrounding whitespace")
    title = _expect_str(obj["title"], "title")

    layout = _expect_dict(obj["layout"], "layout")
    _check_keys(layout, ("options_width", "results_width"), (), "layout")
    if layout["options_width"] != OPTIONS_WIDTH or layout["results_width"] != RESULTS_WIDTH:
        raise ManifestError(
            "LAYOUT_WIDTHS",
            f"layout widths must be {OPTIONS_WIDTH} and {RESULTS_WIDTH}, "
            f"got {layout['options_width']} and {layout['results_width']}",
        )

    if not isinstance(obj["inputs"], list) or not obj["inputs"]:
        raise _schema("inputs must be a non-empty list")
    inputs = tuple(
        _parse_input(raw, f"inputs[{i}]") for i, raw in enumerate(obj["inputs"])
    )
    if len({d.id for d in inputs}) != len(inputs):
        raise _schema("input ids must be unique")

    if not isinstance(obj["outputs"], list):
        raise _schema("outputs must be a list")
    outputs = tuple(
        _parse_output(raw, f"outputs[{i}]") for i, raw in enumerate(obj["outputs"])
    )
    if len({o.id for o in outputs}) != len(outputs):
        raise _schema("output ids must be unique")

    if not isinstance(obj["bindings"], list):
        raise _schema("bindings must be a list")
    bindings = tuple(
        _parse_binding(raw, f"bindings[{i}]") for i, raw in enumerate(obj["bindings"])
    )

    store_button = obj["store_button"]
    if not isinstance(store_button, str) or not any(
        d.id == store_button and d.widget == "ActionButton" for d in inputs
    ):
        raise ManifestError(
            "STORE_BUTTON_MISSING",
            "store_button must name an ActionButton input",
        )

    manifest = ModuleManifest(
        category=category,
        name=name,
        title=title,
        inputs=inputs,
        outputs=outputs,
        bindings=bindings,
        store_button=store_button,
    )
    for i, binding in enumerate(bindings):
        _check_binding_refs(manifest, binding, commands, f"bindings[{i}]")
    for output in outputs:
        for_output = manifest.bindings_for(output.id)
        if not for_output:
            raise _dangling(f"output {output.id!r} has no binding")
        unguarded = [b for b in for_output if not b.when]
        if len(for_output) > 1 and unguarded:
            raise _schema(
                f"output {output.id!r} has multiple bindings; all must carry a when guard"
            )
    return manifest


# -- discovery ------------------------------------------------------------


def discover(
    modules_dir: str | Path,
    enabled: list[str] | None = None,
    commands: CommandRegistry | None = None,
) -> Registry:
    """Scan modules/<category>/<name>/manifest.json and build the registry.

    Any unreadable or invalid manifest aborts discovery naming its path.
    When an enabled list is given the registry keeps those modules plus
    data/sources, which is always on.
    """
    root = Path(modules_dir)
    if not root.is_dir():
        raise ManifestError("DISCOVERY", f"modules directory not found: {root}")
    if commands is None:
        commands = default_registry()

    found: dict[str, ModuleManifest] = {}
    for category_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        if category_dir.name not in CATEGORIES:
            raise ManifestError(
                "DISCOVERY", f"unexpected category directory: {category_dir}"
            )
        for module_dir in sorted(p for p in category_dir.iterdir() if p.is_dir()):
            path = module_dir / "manifest.json"
            if not path.is_file():
                raise ManifestError("DISCOVERY", f"missing manifest: {path}")
            try:
                manifest = load_manifest(path.read_bytes(), commands)
            except ManifestError as e:
                raise ManifestError(e.code, f"{path}: {e}") from None
            if manifest.category != category_dir.name or manifest.name != module_dir.name:
                raise ManifestError(
                    "DISCOVERY",
                    f"{path}: manifest says {manifest.module_id!r} but lives in "
                    f"{category_dir.name}/{module_dir.name}",
                )
            found[manifest.module_id] = manifest

    if enabled is not None:
        wanted = set(enabled) | {REQUIRED_MODULE}
        for module_id in sorted(wanted):
            if module_id not in found:
                raise ManifestError(
                    "UNKNOWN_MODULE", f"cannot enable {module_id}: no such module"
                )
    else:
        wanted = set(found)

    ordered = [
        m
        for category in CATEGORIES
        for m in sorted(
            (m for m in found.values() if m.category == category),
            key=lambda m: m.name,
        )
        if m.module_id in wanted
    ]
    return Registry(modules=tuple(ordered))


def nav_structure(reg: Registry) -> list[dict]:
    """Sidebar skeleton: one heading per nonempty category, in registry
    order, entries are module titles."""
    sections = []
    for category in CATEGORIES:
        titles = [m.title for m in reg.modules if m.category == category]
        if titles:
            sections.append({"heading": category.capitalize(), "entries": titles})
    return sections
