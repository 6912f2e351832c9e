"""Satisfiability checks and transformation pipelines."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from . import linarith as la
from .analyze import AnalysisConfig, check_goals, cpa_lfp
from .core import Program, parse_program, print_program
from .evaluate import _bodies, kleene_lfp, td_derive
from .linarith import Verdict
from .transform import (
    TransformError,
    TransformState,
    control_flow_refinement,
    far,
    predicate_pair_state,
    qa_transform,
    raf,
    replay,
    reverse,
    specialise_state,
    strengthen,
)

STEPS = (
    "specialise",
    "qa",
    "reverse",
    "raf",
    "far",
    "strengthen",
    "pair",
    "cfr",
    "delete-unsat",
    "delete-useless",
)


@dataclass
class Settings:
    mode: Optional[str] = None
    method: str = "auto"  # auto, bu, td, cpa
    depth: int = 32
    kleene_iters: int = 64
    budget: int = la.DEFAULT_BUDGET
    widening_delay: int = 1
    max_iters: int = 100
    max_unfold: int = 3
    check_each: bool = True

    @property
    def analysis(self) -> AnalysisConfig:
        return AnalysisConfig(widening_delay=self.widening_delay, max_iters=max(self.max_iters, self.widening_delay))


@dataclass
class SatResult:
    verdict: Verdict
    method: str
    model: Optional[list] = None
    witness: Optional[dict] = None


def _check_td(p: Program, s: Settings) -> SatResult:
    undecided = False
    for i, g in enumerate(p.goals):
        out = td_derive(p, g, s.depth, s.budget)
        if out.successful:
            witness = {
                "goal": i,
                "clauses": list(out.path),
                "constraint": str(out.answer),
                "point": {k: str(v) for k, v in (out.point or {}).items()},
            }
            return SatResult(Verdict.UNSAT, "td", witness=witness)
        if out.kind != "finitely_failed":
            undecided = True
    return SatResult(Verdict.UNKNOWN if undecided else Verdict.SAT, "td")


def _check_cpa(p: Program, s: Settings) -> SatResult:
    res = cpa_lfp(p, s.analysis)
    verdicts = check_goals(res.model, p.goals, p.mode)
    if all(v is Verdict.SAT for v in verdicts):
        return SatResult(Verdict.SAT, "cpa", model=res.model.to_json())
    return SatResult(Verdict.UNKNOWN, "cpa")


def _check_bu(p: Program, s: Settings) -> SatResult:
    res = kleene_lfp(p, s.kleene_iters)
    interp = res.interpretation
    for g in p.goals:
        for parts in _bodies(g, interp):
            c = g.constraint
            for x in parts:
                c = c & x
            if la.is_sat(c, p.mode, s.budget):
                return SatResult(Verdict.UNSAT, "bu")
    if res.converged:
        model = [{"predicate": f.head.pred, "fact": str(f)} for f in interp]
        return SatResult(Verdict.SAT, "bu", model=model)
    return SatResult(Verdict.UNKNOWN, "bu")


_METHODS: dict[str, Callable[[Program, Settings], SatResult]] = {
    "td": _check_td,
    "cpa": _check_cpa,
    "bu": _check_bu,
}


def check_sat(p: Program, settings: Settings = Settings()) -> SatResult:
    """Decide satisfiability where the engines can.

    ``auto`` tries a bounded top-down search (which can refute), then the
    polyhedral analysis (which can prove), then bottom-up iteration.
    """
    if settings.method != "auto":
        return _METHODS[settings.method](p, settings)
    for m in ("td", "cpa", "bu"):
        r = _METHODS[m](p, settings)
        if r.verdict is not Verdict.UNKNOWN:
            return r
    return SatResult(Verdict.UNKNOWN, "auto")


# ------------------------------------------------------------- pipeline


@dataclass
class StepOutcome:
    program: Program
    script: Optional[str] = None  # kernel rule script when the step used one


def _kernel(st: TransformState) -> StepOutcome:
    return StepOutcome(st.program(), st.script())


def _delete(p: Program, mode: str) -> StepOutcome:
    st = TransformState(p)
    st.delete_clauses(mode)
    return _kernel(st)


def apply_step(name: str, p: Program, s: Settings = Settings()) -> StepOutcome:
    if name == "specialise":
        return _kernel(specialise_state(p, max_unfold=s.max_unfold))
    if name == "pair":
        return _kernel(predicate_pair_state(p, max_unfold=s.max_unfold))
    if name == "qa":
        return StepOutcome(qa_transform(p))
    if name == "reverse":
        return StepOutcome(reverse(p))
    if name == "raf":
        return StepOutcome(raf(p))
    if name == "far":
        return StepOutcome(far(p))
    if name == "strengthen":
        return StepOutcome(strengthen(p, s.analysis))
    if name == "cfr":
        return StepOutcome(control_flow_refinement(p))
    if name == "delete-unsat":
        return _delete(p, "unsat")
    if name == "delete-useless":
        return _delete(p, "useless")
    raise TransformError(f"unknown step {name!r}; known steps: {', '.join(STEPS)}")


class StepFailure(TransformError):
    def __init__(self, index: int, name: str, cause: Exception):
        super().__init__(f"step {index} ({name}) failed: {cause}")
        self.index = index
        self.name = name
        self.cause = cause


@dataclass
class Report:
    steps: list[dict] = field(default_factory=list)
    final_verdict: str = "unknown"
    model: Optional[list] = None
    witness: Optional[dict] = None
    program: Optional[Program] = None
    history: str = ""

    def to_json(self) -> dict:
        out: dict = {"steps": self.steps, "final_verdict": self.final_verdict}
        if self.model is not None:
            out["model"] = self.model
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _combine(prev: Optional[str], new: Verdict) -> str:
    # every shipped step preserves satisfiability, so a decided verdict stays
    if prev in ("sat", "unsat"):
        if new.value not in ("unknown", prev):
            raise RuntimeError(f"verdicts disagree across steps: {prev} then {new.value}")
        return prev
    return new.value


def run_pipeline(p: Program, steps: list[str], settings: Settings = Settings()) -> Report:
    """Apply ``steps`` in order, checking satisfiability along the way."""
    if settings.mode:
        p = Program(p.clauses, settings.mode)
    for name in steps:
        if name not in STEPS:
            raise TransformError(f"unknown step {name!r}; known steps: {', '.join(STEPS)}")
    report = Report()
    verdict: Optional[str] = None
    last: Optional[SatResult] = None
    history: list[str] = []
    for i, name in enumerate(steps):
        t0 = time.perf_counter()
        n_in = len(p.clauses)
        try:
            out = apply_step(name, p, settings)
        except TransformError as e:
            raise StepFailure(i, name, e) from e
        p = out.program
        history.append(f"step {name}\n")
        if out.script is not None:
            history.append(out.script)
            history.append("end\n")
        entry = {"name": name, "clauses_in": n_in, "clauses_out": len(p.clauses), "verdict": "skipped"}
        if settings.check_each:
            last = check_sat(p, settings)
            entry["verdict"] = last.verdict.value
            verdict = _combine(verdict, last.verdict)
        entry["millis"] = round((time.perf_counter() - t0) * 1000, 3)
        report.steps.append(entry)
    if last is None:
        last = check_sat(p, settings)
        verdict = _combine(verdict, last.verdict)
    report.final_verdict = verdict or "unknown"
    report.model = last.model
    report.witness = last.witness
    report.program = p
    report.history = "".join(history)
    return report


def replay_history(p: Program, script: str, settings: Settings = Settings()) -> Program:
    """Re-run a pipeline history: kernel scripts are replayed rule by rule."""
    if settings.mode:
        p = Program(p.clauses, settings.mode)
    lines = script.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        if not line.startswith("step "):
            raise TransformError(f"expected 'step <name>' in history, found {line!r}")
        name = line.split(None, 1)[1]
        body = []
        if i < len(lines) and lines[i].strip() and not lines[i].startswith("step "):
            while i < len(lines) and lines[i].strip() != "end":
                body.append(lines[i])
                i += 1
            i += 1
            p = replay(p, "\n".join(body)).program()
        else:
            p = apply_step(name, p, settings).program
    return p


def load_config(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {no}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def settings_from(cfg: dict[str, str], base: Settings = Settings()) -> Settings:
    kw = {}
    for k, v in cfg.items():
        if k in ("steps", "format", "style"):
            continue
        if k not in Settings.__dataclass_fields__:
            raise ValueError(f"unknown config key {k!r}")
        cur = getattr(base, k)
        if isinstance(cur, bool):
            kw[k] = v.lower() in ("1", "true", "yes", "on")
        elif isinstance(cur, int):
            kw[k] = int(v)
        else:
            kw[k] = v
    return replace(base, **kw)


def load_program(text: str, path: str = "", mode: Optional[str] = None, style: str = "bigstep") -> Program:
    """CHC text, or imperative source when ``path`` ends in ``.c`` or ``.imp``."""
    if path.endswith((".c", ".imp")):
        from .imp2chc import compile_source

        p = compile_source(text, style)
        return Program(p.clauses, mode) if mode else p
    return parse_program(text, mode)


__all__ = [
    "STEPS",
    "Report",
    "SatResult",
    "Settings",
    "StepFailure",
    "apply_step",
    "check_sat",
    "load_config",
    "load_program",
    "print_program",
    "replay_history",
    "run_pipeline",
    "settings_from",
]
