"""Command line entry points: serve the app, validate a manifest, or
render a report headlessly."""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .dsl.ast import Arg, Call, Str, print_value
from .dsl.evaluator import EvalEnv, default_registry
from .dsl.parser import parse_script
from .dsl.script import Script
from .dsl.template import RenderedStatement
from .dataset import parse_csv
from .errors import DataError, ManifestError, ScriptEvalError, ScriptSyntaxError
from .registry import load_manifest
from .report import render_report, report_markdown
from .server import DEFAULT_MODULES_DIR, ServerConfig, create_app


def _parse_ttl(text: str) -> float:
    m = re.fullmatch(r"(\d+)([smh]?)", text.strip())
    if m is None:
        raise argparse.ArgumentTypeError(
            f"bad duration {text!r}; use e.g. 900, 30m, 2h"
        )
    scale = {"": 1, "s": 1, "m": 60, "h": 3600}[m.group(2)]
    return float(m.group(1)) * scale


def _cmd_serve(args) -> int:
    enabled = None
    if args.enable:
        enabled = [part.strip() for part in args.enable.split(",") if part.strip()]
    config = ServerConfig(
        modules_dir=Path(args.modules_dir),
        enabled=enabled,
        theme=args.theme,
        port=args.port,
        session_ttl_seconds=args.session_ttl,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
    )
    try:
        app = create_app(config)
    except (ValueError, ManifestError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    import uvicorn

    uvicorn.run(app, host=args.host, port=config.port, log_level="info")
    return 0


def _cmd_validate(args) -> int:
    path = Path(args.manifest)
    try:
        manifest = load_manifest(path.read_bytes())
    except OSError as e:
        print(f"error: cannot read {path}: {e}", file=sys.stderr)
        return 1
    except ManifestError as e:
        print(f"invalid: {e}", file=sys.stderr)
        return 1
    print(f"ok: {manifest.module_id} ({len(manifest.inputs)} inputs, "
          f"{len(manifest.outputs)} outputs, {len(manifest.bindings)} bindings)")
    return 0


def _split_script(text: str, data_name: str) -> Script:
    """Leading load_data statements form the preamble; when absent, one is
    synthesized so replay has a data source."""
    statements = parse_script(text)
    n_pre = 0
    while n_pre < len(statements) and statements[n_pre].call.name == "load_data":
        n_pre += 1
    pre_calls = [s.call for s in statements[:n_pre]]
    if not pre_calls:
        pre_calls = [Call("load_data", (Arg(None, Str(data_name)),))]
    return Script(
        preamble=tuple(
            RenderedStatement(print_value(c), "data/sources", 0) for c in pre_calls
        ),
        stored=tuple(
            RenderedStatement(print_value(s.call), "", i + 1)
            for i, s in enumerate(statements[n_pre:])
        ),
    )


def _cmd_report(args) -> int:
    script_path = Path(args.script)
    csv_path = Path(args.csv)
    out_dir = Path(args.out)
    try:
        script_text = script_path.read_text(encoding="utf-8")
        csv_bytes = csv_path.read_bytes()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    try:
        script = _split_script(script_text, csv_path.name)
        env = EvalEnv(
            dataset=None,
            loader=lambda _name: parse_csv(csv_bytes),
            registry=default_registry(),
        )
        doc = render_report(script, env, include_code=not args.no_code)
    except (ScriptSyntaxError, ScriptEvalError, DataError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    markdown, images = report_markdown(doc)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.md"
    report_path.write_text(markdown, encoding="utf-8")
    for name, svg in images.items():
        (out_dir / name).write_text(svg, encoding="utf-8")
    print(f"wrote {report_path}" + (f" and {len(images)} figure(s)" if images else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statbench",
        description="Statistical analysis workbench: GUI actions in, replayable script out.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the web service")
    serve.add_argument("--modules-dir", default=str(DEFAULT_MODULES_DIR))
    serve.add_argument("--enable", default=None,
                       help="comma-separated category/name list; data/sources is always on")
    serve.add_argument("--theme", default="default")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--session-ttl", type=_parse_ttl, default=1800.0,
                       help="idle session lifetime, e.g. 900, 30m, 2h")
    serve.add_argument("--ui-dir", default=None,
                       help="directory with a built web UI (index.html)")
    serve.set_defaults(func=_cmd_serve)

    validate = sub.add_parser("validate", help="validate a module manifest")
    validate.add_argument("manifest")
    validate.set_defaults(func=_cmd_validate)

    report = sub.add_parser("report", help="replay a script against a CSV and write a report")
    report.add_argument("script")
    report.add_argument("csv")
    report.add_argument("--out", default="report")
    report.add_argument("--no-code", action="store_true",
                        help="omit code blocks from the report")
    report.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
