"""Command-line front end: ``ssdse run|scan|oracle``.

Configuration is a plain-text file of ``key = value`` lines (``#`` starts a
comment).  Output goes to ``--out`` / ``output.path`` or to stdout, as CSV or
JSON.  Exit codes: 0 ok, 1 check failure, 2 configuration error, 3 infeasible
witness-driven schedule (the partial trace is still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import analysis, entanglement, protocol
from .measurement import unsharp_general_povm, unsharp_special_povm
from .states import (
    EnsembleSpec,
    GeneralFamilyParams,
    ParameterError,
    SpecialFamilyParams,
    general_pair,
    special_pair,
)

log = logging.getLogger("ssdse")

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

TWO_PI = 2.0 * math.pi

RUN_COLUMNS = ("k", "lambda", "success", "E1", "E2", "W1", "W2", "g2")
SPECIAL_EXTRA = ("S_k",)
ORACLE_COLUMNS = ("check", "max_deviation", "tolerance", "passed")

KNOWN_KEYS = {
    "family", "mu1", "mu2", "theta", "gamma1", "gamma2",
    "schedule.mode", "schedule.lambdas", "schedule.lambda1", "schedule.epsilon0",
    "schedule.margin", "rounds", "schmidt_basis", "output.path", "output.format", "seed",
    "oracle.samples", "oracle.rounds", "oracle.tolerance", "oracle.recursion",
}


class ConfigError(ValueError):
    """Bad configuration file or flag value (exit status 2)."""


def parse_config_text(text: str) -> dict:
    out = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _float(raw: dict, key: str, default=None) -> float:
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        v = float(raw[key])
    except ValueError:
        raise ConfigError(f"{key}: not a number: {raw[key]!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite")
    return v


def _int(raw: dict, key: str, default=None) -> int:
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(raw[key])
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {raw[key]!r}") from None


def _bool(raw: dict, key: str, default: bool) -> bool:
    if key not in raw:
        return default
    v = raw[key].lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: not a boolean: {raw[key]!r}")


def check_angle(name: str, value: float) -> float:
    if value > TWO_PI:
        raise ConfigError(
            f"{name} = {value} exceeds 2*pi; angles are in radians (did you mean {math.radians(value):.6g}?)"
        )
    return value


def _float_list(text: str, key: str) -> tuple:
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ConfigError(f"{key}: empty list")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{key}: not a list of numbers: {text!r}") from None
    return vals


@dataclass
class RunConfig:
    ensemble: EnsembleSpec
    schedule: protocol.SharpnessSchedule
    out_path: Optional[str] = None
    out_format: str = "csv"
    seed: int = 0
    raw: dict = field(default_factory=dict)


def build_ensemble(raw: dict) -> EnsembleSpec:
    family = raw.get("family")
    if family not in ("general", "special"):
        raise ConfigError("family must be 'general' or 'special'")
    try:
        if family == "special":
            params = SpecialFamilyParams(_float(raw, "gamma1"), _float(raw, "gamma2"))
        else:
            theta = check_angle("theta", _float(raw, "theta"))
            params = GeneralFamilyParams(_float(raw, "mu1"), _float(raw, "mu2"), theta)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None
    return EnsembleSpec(params)


def build_schedule(raw: dict) -> protocol.SharpnessSchedule:
    mode = raw.get("schedule.mode", "fixed").lower().replace("-", "").replace("_", "")
    schmidt = _bool(raw, "schmidt_basis", mode != "fixed")
    try:
        if mode == "fixed":
            if "schedule.lambdas" not in raw:
                raise ConfigError("fixed schedule needs schedule.lambdas")
            lambdas = _float_list(raw["schedule.lambdas"], "schedule.lambdas")
            for lam in lambdas:
                if not 0.0 <= lam <= 1.0:
                    raise ConfigError(f"schedule.lambdas: {lam} outside [0, 1]")
            rounds = _int(raw, "rounds", len(lambdas))
            if rounds != len(lambdas):
                raise ConfigError(f"rounds = {rounds} but {len(lambdas)} lambdas given")
            return protocol.SharpnessSchedule.fixed(lambdas, schmidt_basis=schmidt)
        if mode in ("witness", "witnessdriven"):
            rounds = _int(raw, "rounds")
            if rounds < 1:
                raise ConfigError("rounds must be positive")
            return protocol.SharpnessSchedule.witness_driven(
                rounds,
                lambda1=_float(raw, "schedule.lambda1", 1e-3),
                epsilon0=_float(raw, "schedule.epsilon0", 0.1),
                margin=_float(raw, "schedule.margin", 0.01),
                schmidt_basis=schmidt,
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"schedule.mode must be 'fixed' or 'witness', got {raw['schedule.mode']!r}")


def output_settings(raw: dict, args) -> tuple:
    path = args.out if args.out is not None else raw.get("output.path")
    fmt = args.format or raw.get("output.format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
    return path, fmt


def build_run_config(raw: dict, args) -> RunConfig:
    path, fmt = output_settings(raw, args)
    return RunConfig(
        ensemble=build_ensemble(raw),
        schedule=build_schedule(raw),
        out_path=path,
        out_format=fmt,
        seed=_int(raw, "seed", 0),
        raw=raw,
    )


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


_fmt = analysis.format_float


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def trace_rows(trace: protocol.ProtocolTrace) -> tuple:
    special = trace.ensemble.family == "special"
    header = RUN_COLUMNS + (SPECIAL_EXTRA if special else ())
    rows = []
    for rec in trace.records:
        row = {
            "k": rec.k,
            "lambda": rec.lam,
            "success": rec.success_prob,
            "E1": rec.negativities[0],
            "E2": rec.negativities[1],
            "W1": rec.witness_values[0],
            "W2": rec.witness_values[1],
            "g2": rec.witness_g2,
        }
        if special:
            row["S_k"] = rec.s_k
        rows.append(row)
    return header, rows


def render_trace(cfg: RunConfig, trace: protocol.ProtocolTrace, status: str,
                 message: Optional[str]) -> str:
    header, rows = trace_rows(trace)
    if cfg.out_format == "csv":
        return _csv(header, [[r["k"]] + [_fmt(r[c]) for c in header[1:]] for r in rows])
    check = analysis.increasing_schedule_check(trace)
    summary = {
        "status": status,
        "rounds_completed": len(rows),
        "increasing_schedule": check.passed,
        "first_violation": check.first_violation,
    }
    if message:
        summary["message"] = message
    for r in rows:
        for c in header[1:]:
            _fmt(r[c])  # refuses NaN/Inf
    doc = {"schema": 1, "config": cfg.raw, "rows": rows, "summary": summary}
    return json.dumps(doc, indent=1) + "\n"


def cmd_run(args) -> int:
    raw = load_config(args.config)
    cfg = build_run_config(raw, args)
    status, message, code = "ok", None, EXIT_OK
    try:
        trace = protocol.run(cfg.ensemble, cfg.schedule)
    except protocol.ScheduleInfeasible as exc:
        trace, status, message, code = exc.trace, "infeasible", str(exc), EXIT_INFEASIBLE
        log.error("schedule infeasible: %s", exc)
    _emit(render_trace(cfg, trace, status, message), cfg.out_path)
    if not args.quiet:
        last = trace.records[-1] if trace.records else None
        log.info("%s: %d rounds", status, len(trace.records))
        if last is not None:
            log.info("last round k=%d lambda=%.6g success=%.12g", last.k, last.lam, last.success_prob)
    return code


def _range(text: str, name: str) -> tuple:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"--{name} expects lo:hi, got {text!r}") from None
    if name == "theta":
        check_angle("theta", lo)
        check_angle("theta", hi)
    if not lo < hi:
        raise ConfigError(f"--{name}: lower end must be below upper end")
    return lo, hi


def cmd_scan(args) -> int:
    raw = load_config(args.config)
    path, out_format = output_settings(raw, args)
    k = args.k
    names = ["theta"] + ([f"lambda{k - 1}"] if k >= 2 else []) + [f"lambda{k}"]
    axes = {}
    if args.theta:
        lo, hi = _range(args.theta, "theta")
        axes["theta"] = np.linspace(lo, hi, args.points)
    if args.lam:
        lo, hi = _range(args.lam, "lambda")
        for n in names[1:]:
            axes[n] = np.linspace(lo, hi, args.points)
    prefix = _float_list(args.prefix, "--prefix") if args.prefix else ()
    try:
        grid = analysis.scan_function(args.function, k, axes, points=args.points,
                                      prefix=prefix, mu=args.mu)
    except analysis.AnalysisError as exc:
        raise ConfigError(str(exc)) from None
    text = grid.to_csv() if out_format == "csv" else grid.to_json()
    _emit(text, path)
    if not args.quiet:
        summary = grid.summary()
        log.info("scan %s k=%d: %s", args.function, k,
                 " ".join(f"{key}={val}" for key, val in summary.items()))
    return EXIT_OK


@dataclass(frozen=True)
class OracleCheck:
    name: str
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def oracle_suite(samples: int = 200, rounds: int = 10, seed: int = 0, tol: float = 1e-10,
                 printed: bool = False) -> list:
    """Closed forms against brute-force Lüders evolution.

    Checks: special-family success and negativity closed forms, closed-form
    states, correlators from the R recursion, and the Q decomposition of the
    general-family success probability.
    """
    if samples < 1 or rounds < 1:
        raise ConfigError("oracle needs at least one sample and one round")
    rng = np.random.default_rng(seed)
    dev = {"success_closed_form": 0.0, "negativity_closed_form": 0.0,
           "closed_form_states": 0.0, "correlator_recursion": 0.0, "q_decomposition": 0.0}

    for _ in range(samples):
        params = SpecialFamilyParams(*rng.uniform(0.01, 0.99, 2))
        lambdas = rng.uniform(0.0, 1.0, rounds)
        rho1, rho2 = special_pair(params)
        s_k = 0.0
        for lam in lambdas:
            povm = unsharp_special_povm(lam)
            p = protocol.success_probability(rho1, rho2, povm)
            dev["success_closed_form"] = max(dev["success_closed_form"],
                                             abs(p - protocol.special_success_closed(lam)))
            rho1 = protocol.luders_update(rho1, povm, check=False)
            rho2 = protocol.luders_update(rho2, povm, check=False)
            s_k = lam * lam + s_k * (1.0 - lam * lam)
            c1, c2 = protocol.special_closed_states(params, s_k)
            dev["closed_form_states"] = max(dev["closed_form_states"],
                                            np.linalg.norm(rho1 - c1), np.linalg.norm(rho2 - c2))
            for rho, vt in ((rho1, params.vartheta1), (rho2, params.vartheta2)):
                e = entanglement.log_negativity(rho)
                dev["negativity_closed_form"] = max(
                    dev["negativity_closed_form"],
                    abs(e - entanglement.negativity_special_closed(vt, s_k)))

        theta = rng.uniform(math.pi / 4, math.pi / 2)
        if theta <= math.pi / 4:
            theta = math.pi / 2
        mu1, mu2 = rng.uniform(0.01, 0.99, 2)
        lambdas = rng.uniform(0.0, 1.0, rounds)
        rho1, rho2 = general_pair(GeneralFamilyParams(mu1, mu2, theta))
        init = (analysis.initial_correlators(rho1), analysis.initial_correlators(rho2))
        st = analysis.RState.initial(theta)
        for k, lam in enumerate(lambdas, start=1):
            povm = unsharp_general_povm(theta, lam)
            p = protocol.success_probability(rho1, rho2, povm)
            prev = st
            q = sum(float(sum(analysis.q_terms(mu, theta, lam, prev))) for mu in (mu1, mu2))
            dev["q_decomposition"] = max(dev["q_decomposition"],
                                         abs(p - 0.5 - analysis.SUCCESS_SCALE * q))
            rho1 = protocol.luders_update(rho1, povm, check=False)
            rho2 = protocol.luders_update(rho2, povm, check=False)
            st = analysis.r_step(st, lam, printed)
            for c0, rho in zip(init, (rho1, rho2)):
                got = analysis.correlators_via_r(c0, st)
                want = analysis.initial_correlators(rho)
                dev["correlator_recursion"] = max(dev["correlator_recursion"],
                                                  float(np.max(np.abs(got - want))))
    return [OracleCheck(name, float(v), tol) for name, v in dev.items()]


def cmd_oracle(args) -> int:
    raw = load_config(args.config)
    path, out_format = output_settings(raw, args)
    samples = _int(raw, "oracle.samples", 200)
    rounds = _int(raw, "oracle.rounds", 10)
    tol = _float(raw, "oracle.tolerance", 1e-10)
    seed = _int(raw, "seed", 0)
    recursion = args.recursion or raw.get("oracle.recursion", "corrected")
    if recursion not in ("corrected", "printed"):
        raise ConfigError("oracle.recursion must be 'corrected' or 'printed'")
    if samples < 1:
        raise ConfigError("oracle.samples must be positive")
    if rounds < 1:
        raise ConfigError("oracle.rounds must be positive")
    if not tol > 0:
        raise ConfigError("oracle.tolerance must be positive")
    checks = oracle_suite(samples, rounds, seed, tol, printed=recursion == "printed")
    if out_format == "csv":
        text = _csv(ORACLE_COLUMNS,
                    [[c.name, _fmt(c.max_deviation), _fmt(c.tolerance), str(c.passed).lower()]
                     for c in checks])
    else:
        doc = {
            "schema": 1,
            "config": {"samples": samples, "rounds": rounds, "seed": seed,
                       "tolerance": tol, "recursion": recursion},
            "rows": [{"check": c.name, "max_deviation": c.max_deviation,
                      "tolerance": c.tolerance, "passed": c.passed} for c in checks],
            "summary": {"passed": all(c.passed for c in checks),
                        "failed": [c.name for c in checks if not c.passed]},
        }
        text = json.dumps(doc, indent=1) + "\n"
    _emit(text, path)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        log.error("check %s failed: deviation %.3e > %.1e", c.name, c.max_deviation, c.tolerance)
    if not args.quiet and not failed:
        log.info("all %d oracle checks passed", len(checks))
    return EXIT_CHECK if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssdse", description="Sequential unsharp discrimination of entangled two-qubit states.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--quiet", action="store_true", help="suppress the summary on stderr")

    p_run = sub.add_parser("run", help="run a discrimination chain")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_scan = sub.add_parser("scan", help="evaluate a positivity function on a grid")
    common(p_scan)
    p_scan.add_argument("--function", required=True, choices=analysis.FUNCTION_IDS)
    p_scan.add_argument("--k", type=int, default=2, help="round index of the scanned function")
    p_scan.add_argument("--points", type=int, default=analysis.SCAN_POINTS)
    p_scan.add_argument("--theta", help="theta range lo:hi in radians")
    p_scan.add_argument("--lambda", dest="lam", help="range lo:hi for every lambda axis")
    p_scan.add_argument("--prefix", help="fixed lambda_1..lambda_(k-2), comma separated")
    p_scan.add_argument("--mu", type=float, default=0.5, help="mu_b for the Q scan")
    p_scan.set_defaults(func=cmd_scan)

    p_or = sub.add_parser("oracle", help="cross-check closed forms against brute force")
    common(p_or)
    p_or.add_argument("--recursion", choices=("corrected", "printed"), help=argparse.SUPPRESS)
    p_or.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the config-error code
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
