"""Command-line driver.

Exit codes: 0 satisfiable, 1 unsatisfiable, 2 unknown, 3 usage or input
error, 4 transformation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .core import ParseError, print_program
from .pipeline import (
    STEPS,
    Settings,
    StepFailure,
    check_sat,
    load_config,
    load_program,
    replay_history,
    run_pipeline,
    settings_from,
)
from .transform import TransformError

EXIT = {"sat": 0, "unsat": 1, "unknown": 2}
EXIT_INPUT = 3
EXIT_TRANSFORM = 4


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hornkit", description="Constrained Horn clause toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, steps: bool = False) -> None:
        p.add_argument("file", help="clause file, or imperative source (.c/.imp)")
        p.add_argument("--mode", choices=("rat", "int"), help="arithmetic domain (overrides the file)")
        p.add_argument("--style", choices=("bigstep", "reach"), default=None, help="translation for imperative input")
        p.add_argument("--config", help="key=value settings file; flags take precedence")
        p.add_argument("--method", choices=("auto", "bu", "td", "cpa"))
        p.add_argument("--depth", type=int, help="top-down derivation depth bound")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if steps:
            p.add_argument("--steps", help=f"comma-separated steps from: {', '.join(STEPS)}")
            p.add_argument("--emit-history", metavar="PATH", help="write the replayable rule history")
            p.add_argument("--replay", metavar="PATH", help="replay a history instead of running steps")

    common(sub.add_parser("parse", help="parse and print clauses"))
    common(sub.add_parser("sat", help="check satisfiability"))
    common(sub.add_parser("transform", help="apply transformation steps and print the result"), steps=True)
    common(sub.add_parser("imp2chc", help="translate imperative source to clauses"))
    common(sub.add_parser("pipeline", help="run steps with satisfiability checks and report"), steps=True)
    return ap


def _settings(args) -> tuple[Settings, dict]:
    cfg = load_config(Path(args.config).read_text()) if args.config else {}
    s = settings_from(cfg)
    over = {}
    if args.mode:
        over["mode"] = args.mode
    if args.method:
        over["method"] = args.method
    if args.depth is not None:
        over["depth"] = args.depth
    if over:
        s = settings_from({k: str(v) for k, v in over.items()}, s)
    return s, cfg


def _steps(args, cfg: dict) -> list[str]:
    raw = getattr(args, "steps", None) or cfg.get("steps", "")
    return [x.strip() for x in raw.split(",") if x.strip()]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        settings, cfg = _settings(args)
        style = args.style or cfg.get("style", "bigstep")
        path = args.file
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        program = load_program(text, path, settings.mode, style)
    except (OSError, ValueError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    want_json = args.json or cfg.get("format") == "json"
    cmd = args.command
    if cmd in ("parse", "imp2chc"):
        sys.stdout.write(print_program(program))
        return 0
    if cmd == "sat":
        res = check_sat(program, settings)
        if want_json:
            out = {"final_verdict": res.verdict.value, "method": res.method}
            if res.model is not None:
                out["model"] = res.model
            if res.witness is not None:
                out["witness"] = res.witness
            print(json.dumps(out, indent=2))
        else:
            print(res.verdict.value)
            if res.witness:
                print(f"witness: clauses {res.witness['clauses']} with {res.witness['constraint']}")
        return EXIT[res.verdict.value]

    steps = _steps(args, cfg)
    try:
        if cmd == "transform":
            if args.replay:
                out_p = replay_history(program, Path(args.replay).read_text(), settings)
            else:
                rep = run_pipeline(program, steps, Settings(**{**settings.__dict__, "check_each": False}))
                out_p = rep.program
                if args.emit_history:
                    Path(args.emit_history).write_text(rep.history)
            sys.stdout.write(print_program(out_p))
            return 0
        rep = run_pipeline(program, steps, settings)
    except StepFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TRANSFORM
    except (TransformError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TRANSFORM
    if args.emit_history:
        Path(args.emit_history).write_text(rep.history)
    if want_json:
        print(json.dumps(rep.to_json(), indent=2))
    else:
        for st in rep.steps:
            print(f"{st['name']}: {st['clauses_in']} -> {st['clauses_out']} clauses, {st['verdict']} ({st['millis']} ms)")
        print(rep.final_verdict)
    return EXIT[rep.final_verdict]


if __name__ == "__main__":
    sys.exit(main())
