#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
qsv command line

  eval        valuate one formula in one state under one semantics
  demo        stern-gerlach: the spin-1/2 walk-through (z+ prepared, x measured next)
  check-laws  excluded middle / non-contradiction / distributivity over random samples

Exit codes: 0 answer produced (gap / no-value included), 2 parse/bind/input
errors, 3 I/O or numeric failure, 4 law violation in check-laws.

ENV: QSV_SEED, QSV_EPS_ALG, QSV_EPS_MEMBER, QSV_MAX_DIM
"""

import argparse
import json
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .config import Tolerances, resolve_seed, tolerances_from_env
from .errors import (
    EXIT_LAW,
    EXIT_NUMERIC,
    EXIT_OK,
    BindingFileError,
    ConfigError,
    FormulaSyntaxError,
    InvalidState,
    QsvError,
)
from .hilbert import StateVector, make_state
from .logic import Binding, parse_entry, bind, load_binding, make_binding, parse
from .sampling import random_projector, random_state
from .spin import BUILTIN_NAMES, builtin_state, expansion_coefficients, spin_atoms
from .valuation import (
    EQUIVALENT,
    MEANINGLESS,
    NOT_EQUIVALENT,
    Kind,
    Law,
    check_law,
    valuate,
    valuate_bivalent_formula,
    valuate_degree,
    valuate_super,
    vector_to_json,
)

SEMANTICS_CHOICES = ("bivalent", "degree", "super")
SCENARIOS = ("stern-gerlach",)
AUDIT_DIMS = (2, 3, 4)


# -----------------------------
# Config
# -----------------------------
@dataclass(frozen=True)
class StateSource:
    kind: str  # "builtin" | "amps" | "file"
    value: str

    def describe(self) -> str:
        return self.value if self.kind == "builtin" else f"{self.kind}:{self.value}"


@dataclass(frozen=True)
class RunConfig:
    command: str
    tol: Tolerances
    seed: int
    json_output: bool = False
    semantics: str = "super"
    state: Optional[StateSource] = None
    binding_path: Optional[str] = None
    out_path: Optional[str] = None
    quiet: bool = False
    trials: int = 1000
    dims: Sequence[int] = AUDIT_DIMS

    def meta(self) -> dict:
        out = {"command": self.command, "seed": self.seed, "tolerances": self.tol.as_dict()}
        if self.command == "eval":
            out["semantics"] = self.semantics
            out["state"] = self.state.describe() if self.state else None
        if self.command != "check-laws":
            out["binding"] = self.binding_path or "builtin spin-1/2"
        return out


@dataclass
class CommandResult:
    exit_code: int
    payload: dict
    text: str
    warnings: List[str] = field(default_factory=list)


def log(cfg: Optional[RunConfig], tag: str, msg: str) -> None:
    if cfg is not None and cfg.quiet and tag != "ERR":
        return
    print(f"[{tag}] {msg}", file=sys.stderr, flush=True)


# -----------------------------
# Inputs
# -----------------------------
def parse_amps(text: str) -> np.ndarray:
    """ "re,im;re,im" -> complex vector (a bare "re" means im = 0). """
    out = []
    for k, chunk in enumerate(s for s in (text or "").split(";") if s.strip()):
        parts = [x.strip() for x in chunk.split(",")]
        if len(parts) not in (1, 2):
            raise InvalidState(f"amplitude {k}: expected 're,im', got {chunk.strip()!r}")
        try:
            re_, im_ = float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0
        except ValueError:
            raise InvalidState(f"amplitude {k}: not a number: {chunk.strip()!r}") from None
        out.append(complex(re_, im_))
    if not out:
        raise InvalidState("--amps is empty")
    return np.array(out, dtype=np.complex128)


def _normalized(cfg: RunConfig, amps: np.ndarray, where: str) -> StateVector:
    v = make_state(amps, cfg.tol, normalize=True)
    n = float(np.linalg.norm(amps))
    if abs(n - 1.0) > cfg.tol.alg:
        log(cfg, "STATE", f"{where}: normalized amplitudes (norm was {n:.12g})")
    return v


def load_state(cfg: RunConfig) -> StateVector:
    src = cfg.state
    if src is None:
        raise InvalidState("no state given (use --state, --amps or --state-file)")
    if src.kind == "builtin":
        return builtin_state(src.value, cfg.tol)
    if src.kind == "amps":
        return _normalized(cfg, parse_amps(src.value), "--amps")

    doc = json.loads(Path(src.value).read_text(encoding="utf-8"))
    raw = doc.get("amplitudes") if isinstance(doc, dict) else doc
    if not isinstance(raw, list) or not raw:
        raise InvalidState(f'{src.value}: expected {{"amplitudes": [[re, im], ...]}}')
    try:
        amps = np.array([parse_entry(a, f"amplitudes[{k}]") for k, a in enumerate(raw)], dtype=np.complex128)
    except BindingFileError as e:
        raise InvalidState(f"{src.value}: {e}") from None
    return _normalized(cfg, amps, src.value)


def load_binding_for(cfg: RunConfig) -> Binding:
    if cfg.binding_path:
        b = load_binding(cfg.binding_path, cfg.tol)
        log(cfg, "BIND", f"{cfg.binding_path}: {len(b.atoms)} atoms, dim {b.ambient_dim}")
        return b
    return make_binding(spin_atoms(cfg.tol))


# -----------------------------
# Rendering
# -----------------------------
def _table(rows: List[Dict]) -> str:
    if not rows:
        return "(empty)"
    return pd.DataFrame(rows).to_string(index=False)


def _header(title: str) -> str:
    return title + "\n" + "-" * len(title)


def _fmt_c(z: complex) -> str:
    return f"{z.real:+.6f}{z.imag:+.6f}i"


# -----------------------------
# eval
# -----------------------------
def cmd_eval(cfg: RunConfig, formula_text: str) -> CommandResult:
    formula = parse(formula_text)
    binding = load_binding_for(cfg)
    bf = bind(formula, binding)
    v = load_state(cfg)
    if v.dim != binding.ambient_dim:
        raise InvalidState(f"state has dim {v.dim}, binding has dim {binding.ambient_dim}")

    report = valuate(cfg.semantics, v, bf, cfg.tol)
    payload = {"meta": cfg.meta(), "report": report.to_dict()}

    title = f"[EVAL] {cfg.semantics} | state {cfg.state.describe()} | {report.formula}"
    rows = [{"subformula": t.subformula, "status": t.status.label(), "justification": t.justification}
            for t in report.trace]
    text = _header(title) + f"\nstatus: {report.status.label()}\n\n" + _table(rows)
    return CommandResult(EXIT_OK, payload, text)


# -----------------------------
# demo stern-gerlach
# -----------------------------
DEMO_PROPOSITIONS = ("Z+", "Z-", "X+", "X-", "X+ ^ X-", "X+ | X-", "X+ & X-", "Z+ & X+")


def cmd_demo_stern_gerlach(cfg: RunConfig) -> CommandResult:
    tol = cfg.tol
    binding = make_binding(spin_atoms(tol))
    v = builtin_state("z+", tol)
    c1, c2 = expansion_coefficients(v, "x", tol)

    rows = []
    statuses: Dict[str, Dict[str, str]] = {}
    for text in DEMO_PROPOSITIONS:
        bf = bind(parse(text), binding)
        biv = valuate_bivalent_formula(v, bf, tol).status
        sup = valuate_super(v, bf, tol).status
        deg = valuate_degree(v, bf, tol).status
        statuses[text] = {"bivalent": biv.label(), "super": sup.label()}
        rows.append({
            "proposition": text,
            "bivalent": biv.label(),
            "super": sup.label(),
            "degree": round(deg.degree, 12) if deg.kind is Kind.DEGREE else deg.label(),
        })

    conj = statuses["X+ & X-"]["super"]
    readings = [
        {
            "reading": "Z+ = X+ & X-",
            "formula": "X+ & X-",
            "super": conj,
            "verdict": "fails",
            "note": f"X+ & X- compiles to 0 and is {conj}, yet Z+ is {statuses['Z+']['super']}",
        },
        {
            "reading": "Z+ = X+ ^ X-",
            "formula": "X+ ^ X-",
            "super": statuses["X+ ^ X-"]["super"],
            "verdict": "fails",
            "note": ("X+ ^ X- is super-true in every state, but reading it as Z+ would make the spin "
                     f"known along z and x at once; Z+ & X+ is {statuses['Z+ & X+']['super']}"),
        },
    ]

    laws = [
        check_law(Law.EXCLUDED_MIDDLE, v, binding, ["X+"], tol),
        check_law(Law.NON_CONTRADICTION, v, binding, ["X+"], tol),
        check_law(Law.DISTRIBUTIVITY, v, binding, ["Z+", "X+"], tol),
    ]

    payload = {
        "meta": {**cfg.meta(), "scenario": "stern-gerlach"},
        "state": {"name": "z+", "amplitudes": vector_to_json(v.amplitudes)},
        "expansion": {
            "axis": "x",
            "c1": [c1.real, c1.imag],
            "c2": [c2.real, c2.imag],
            "norm": abs(c1) ** 2 + abs(c2) ** 2,
        },
        "propositions": rows,
        "classical_readings": readings,
        "laws": [law.to_dict() for law in laws],
    }

    law_rows = [{
        "law": law.law.value,
        "atoms": ", ".join(law.atoms),
        "sides": " / ".join(r.status.label() for r in law.reports),
        "verdict": law.verdict,
    } for law in laws]

    text = "\n".join([
        _header("[DEMO] stern-gerlach | state z+ = c1 |x+> + c2 |x->"),
        f"c1 = {_fmt_c(c1)}  c2 = {_fmt_c(c2)}  |c1|^2 + |c2|^2 = {abs(c1) ** 2 + abs(c2) ** 2:.12g}",
        "",
        _table(rows),
        "",
        "classical readings of the superposition:",
        *[f"- {r['reading']}: {r['verdict']} ({r['note']})" for r in readings],
        "",
        _table(law_rows),
    ])
    return CommandResult(EXIT_OK, payload, text)


# -----------------------------
# check-laws
# -----------------------------
def _audit_dim(dim: int, trials: int, seed: int, tol: Tolerances) -> Dict:
    rng = np.random.default_rng([seed, dim])
    em_true = nc_false = 0
    verdicts: Counter = Counter()
    failures: List[Dict] = []
    for t in range(trials):
        p = random_projector(dim, rng, tol)
        q = random_projector(dim, rng, tol)
        v = random_state(dim, rng, tol)
        b = make_binding({"a": p, "b": q})

        em = check_law(Law.EXCLUDED_MIDDLE, v, b, ["a"], tol)
        nc = check_law(Law.NON_CONTRADICTION, v, b, ["a"], tol)
        dist = check_law(Law.DISTRIBUTIVITY, v, b, ["a", "b"], tol)

        em_true += int(em.holds)
        nc_false += int(nc.holds)
        verdicts[dist.verdict] += 1
        for rep in (em, nc):
            if not rep.holds and len(failures) < 5:
                failures.append({"dim": dim, "trial": t, "law": rep.law.value,
                                 "status": rep.reports[0].status.label()})
    return {
        "dim": dim,
        "trials": trials,
        "excluded_middle_true": em_true,
        "non_contradiction_false": nc_false,
        "distributivity": {k: verdicts.get(k, 0) for k in (EQUIVALENT, NOT_EQUIVALENT, MEANINGLESS)},
        "failures": failures,
    }


def cmd_check_laws(cfg: RunConfig, trials: int) -> CommandResult:
    if trials < 1:
        raise ConfigError(f"--trials must be >= 1 (got {trials})")

    results = []
    for dim in cfg.dims:
        log(cfg, "AUDIT", f"dim {dim}: {trials} trials (seed {cfg.seed})")
        results.append(_audit_dim(dim, trials, cfg.seed, cfg.tol))

    spin = make_binding(spin_atoms(cfg.tol))
    spin_dist = check_law(Law.DISTRIBUTIVITY, builtin_state("z+", cfg.tol), spin, ["Z+", "X+"], cfg.tol)

    violated = any(r["excluded_middle_true"] < r["trials"] or r["non_contradiction_false"] < r["trials"]
                   for r in results)
    payload = {
        "meta": {**cfg.meta(), "trials": trials, "dims": list(cfg.dims)},
        "results": results,
        "spin_distributivity": spin_dist.to_dict(),
        "violated": violated,
    }

    rows = [{
        "dim": r["dim"],
        "excluded_middle": f"{r['excluded_middle_true']}/{r['trials']} true",
        "non_contradiction": f"{r['non_contradiction_false']}/{r['trials']} false",
        **{f"dist:{k}": n for k, n in r["distributivity"].items()},
    } for r in results]
    lhs, rhs = (rep.status.label() for rep in spin_dist.reports)
    text = "\n".join([
        _header(f"[LAWS] {trials} trials per dim | seed {cfg.seed}"),
        _table(rows),
        "",
        f"distributivity (Z+, X+) at z+: lhs {lhs}, rhs {rhs} -> {spin_dist.verdict}",
    ])

    result = CommandResult(EXIT_LAW if violated else EXIT_OK, payload, text)
    if violated:
        result.warnings.append("excluded middle / non-contradiction violated: see failures in the report")
    return result


# -----------------------------
# argparse
# -----------------------------
def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return x


def _dims(text: str) -> List[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None
    if not out or any(d < 2 for d in out):
        raise argparse.ArgumentTypeError("dims must be integers >= 2")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON report on stdout")
    common.add_argument("--out", type=str, default=None, help="also write the JSON report to this file")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (fallback: QSV_SEED)")
    common.add_argument("--eps-alg", type=_positive_float, default=None, help="algebraic tolerance")
    common.add_argument("--eps-member", type=_positive_float, default=None, help="membership tolerance")
    common.add_argument("--quiet", action="store_true", help="no informational stderr lines")

    ap = argparse.ArgumentParser(prog="qsv", description="Quantum supervaluation over projector lattices")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="valuate a formula")
    src = ev.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", choices=BUILTIN_NAMES, help="builtin spin-1/2 state")
    src.add_argument("--amps", type=str, help='inline amplitudes "re,im;re,im"')
    src.add_argument("--state-file", type=str, help='JSON file {"amplitudes": [[re, im], ...]}')
    ev.add_argument("--bind", type=str, default=None, help="binding JSON file (default: spin-1/2 atoms)")
    ev.add_argument("--semantics", choices=SEMANTICS_CHOICES, default="super")
    ev.add_argument("formula", type=str)

    demo = sub.add_parser("demo", parents=[common], help="worked scenarios")
    demo.add_argument("scenario", choices=SCENARIOS)

    laws = sub.add_parser("check-laws", parents=[common], help="law audit over random samples")
    laws.add_argument("--trials", type=int, default=1000)
    laws.add_argument("--dims", type=_dims, default=list(AUDIT_DIMS), help="comma-separated, default 2,3,4")
    return ap


def build_config(args: argparse.Namespace) -> RunConfig:
    tol = tolerances_from_env().with_overrides(alg=args.eps_alg, member=args.eps_member)
    state = None
    if args.command == "eval":
        if args.state:
            state = StateSource("builtin", args.state)
        elif args.amps:
            state = StateSource("amps", args.amps)
        else:
            state = StateSource("file", args.state_file)
    return RunConfig(
        command=args.command,
        tol=tol,
        seed=resolve_seed(args.seed),
        json_output=args.json,
        semantics=getattr(args, "semantics", "super"),
        state=state,
        binding_path=getattr(args, "bind", None),
        out_path=args.out,
        quiet=args.quiet,
        trials=getattr(args, "trials", 1000),
        dims=tuple(getattr(args, "dims", AUDIT_DIMS)),
    )


def emit(cfg: RunConfig, result: CommandResult) -> None:
    doc = json.dumps(result.payload, ensure_ascii=False, indent=2)
    if cfg.out_path:
        out = Path(cfg.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(doc + "\n", encoding="utf-8")
        log(cfg, "INFO", f"report written to {out}")
    print(doc if cfg.json_output else result.text, flush=True)
    for w in result.warnings:
        log(cfg, "ERR", w)


def _explain_syntax(text: str, e: FormulaSyntaxError) -> str:
    lines = text.splitlines() or [""]
    src = lines[e.line - 1] if 0 < e.line <= len(lines) else ""
    return f"{src}\n{' ' * (e.column - 1)}^"


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    cfg = None
    try:
        cfg = build_config(args)
        if cfg.command == "eval":
            try:
                result = cmd_eval(cfg, args.formula)
            except FormulaSyntaxError as e:
                log(cfg, "ERR", f"{e}\n{_explain_syntax(args.formula, e)}")
                return e.exit_code
        elif cfg.command == "demo":
            result = cmd_demo_stern_gerlach(cfg)
        else:
            result = cmd_check_laws(cfg, cfg.trials)
        emit(cfg, result)
        return result.exit_code
    except QsvError as e:
        log(cfg, "ERR", str(e))
        return e.exit_code
    except json.JSONDecodeError as e:
        log(cfg, "ERR", f"malformed JSON: {e}")
        return EXIT_NUMERIC
    except OSError as e:
        log(cfg, "ERR", f"I/O error: {e}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
