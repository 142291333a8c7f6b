"""Command-line front end.

    cohtrans <check|synthesize|sequence|locc|verify> --input PATH [--output PATH]
             [--d-prime N] [--tolerance T] [--enumerate-all] [--seed S]

The input is a JSON object with ``source``/``target`` amplitude lists (or
``source_mu``/``target_mu`` with squared amplitudes) and an optional
``options`` object.  ``verify`` instead takes a report written by one of
the other commands and recomputes its residuals.  ``-`` stands for stdin or
stdout.

Reports are written in the canonical (descending) basis; ``order`` maps each
canonical level back to the caller's 1-based position.  Floats carry 17
significant digits so a report round-trips bit for bit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .core import CoherenceVector, canonicalize, majorizes, pure_density
from .errors import (
    CohTransError,
    MajorizationError,
    NoFeasibleSP,
    NoIntermediateFound,
    ParseError,
    VerificationError,
)
from .kraus import (
    IncoherentChannel,
    KrausOperator,
    apply_channel,
    build_kraus,
    build_locc_plan,
    channel_error,
    simulate_locc,
    verify_completeness,
    verify_incoherent,
)
from .permutations import build_table, mandatory_permutations, sign_pattern
from .sampling import random_majorizing_pair
from .sequential import execute_plan, max_steps, plan_sequence
from .solver import feasible_sps, find_feasible_sp

COMMANDS = ("check", "synthesize", "sequence", "locc", "verify")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_MAJORIZATION = 3
EXIT_NO_SP = 4
EXIT_NO_INTERMEDIATE = 5
EXIT_VERIFY = 6

# residuals a fresh report must meet
CHANNEL_TOL = 1e-9
# allowed drift between a stored residual and its recomputation
ROUNDTRIP_TOL = 1e-12


@dataclass
class JobRequest:
    command: str
    source: list | None = None
    target: list | None = None
    source_mu: list | None = None
    target_mu: list | None = None
    d_prime: int = 5
    tolerances: Tolerances = DEFAULT_TOL
    enumerate_all: bool = False
    seed: int | None = None
    report: dict | None = None  # embedded report for ``verify``


@dataclass
class JobReport:
    command: str
    exit_code: int = EXIT_OK
    body: dict = field(default_factory=dict)
    error: dict | None = None

    @property
    def status(self):
        return "ok" if self.error is None else self.error["code"]

    def to_dict(self):
        out = {"command": self.command, "status": self.status, "exit_code": self.exit_code}
        if self.error is not None:
            out["error"] = self.error
        out.update(self.body)
        return out


# ---------------------------------------------------------------- parsing


def _number_list(doc, key):
    val = doc.get(key)
    if val is None:
        return None
    if not isinstance(val, list) or not val:
        raise ParseError(f"'{key}' must be a nonempty list of numbers")
    out = []
    for v in val:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"'{key}' contains a non-numeric entry {v!r}")
        out.append(float(v))
    return out


def parse_request(doc, command, d_prime=None, tolerance=None, enumerate_all=None, seed=None):
    """Build a JobRequest from a decoded document plus command-line overrides."""
    if command not in COMMANDS:
        raise ParseError(f"unknown command {command!r}")
    if not isinstance(doc, dict):
        raise ParseError("input must be a JSON object")
    opts = doc.get("options") or {}
    if not isinstance(opts, dict):
        raise ParseError("'options' must be an object")
    tol = DEFAULT_TOL
    try:
        if opts.get("tolerances"):
            tol = tol.updated(**opts["tolerances"])
        if tolerance is not None:
            tol = tol.updated(res=tolerance)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad tolerances: {exc}") from exc
    req = JobRequest(command, tolerances=tol)
    req.d_prime = d_prime if d_prime is not None else opts.get("d_prime", 5)
    req.enumerate_all = bool(enumerate_all or opts.get("enumerate_all", False))
    req.seed = seed if seed is not None else opts.get("seed")
    if not isinstance(req.d_prime, int) or isinstance(req.d_prime, bool):
        raise ParseError("'d_prime' must be an integer")
    if req.seed is not None and (not isinstance(req.seed, int) or isinstance(req.seed, bool)):
        raise ParseError("'seed' must be an integer")

    if command == "verify" and ("kraus" in doc or "steps" in doc):
        req.report = doc
    for side in ("source", "target"):
        if req.report is not None:
            # a report stores states as objects; read their amplitudes
            state = doc.get(side)
            if not isinstance(state, dict):
                raise ParseError(f"report lacks a '{side}' object")
            amps, mu = _number_list(state, "amplitudes"), None
        else:
            amps = _number_list(doc, side)
            mu = _number_list(doc, f"{side}_mu")
        if amps is not None and mu is not None:
            raise ParseError(f"give either '{side}' or '{side}_mu', not both")
        setattr(req, side, amps)
        setattr(req, f"{side}_mu", mu)
    needs_states = command != "verify" or req.report is not None
    if needs_states:
        for side in ("source", "target"):
            if getattr(req, side) is None and getattr(req, f"{side}_mu") is None:
                raise ParseError(f"missing '{side}' (or '{side}_mu')")
    elif req.seed is None:
        raise ParseError("verify needs an embedded report or a seed")
    return req


def _state(amps, mu, tol):
    if mu is not None:
        if any(m < 0 for m in mu):
            raise ParseError("squared amplitudes must be nonnegative")
        amps = [math.sqrt(m) for m in mu]
    return canonicalize(amps, tol)


# ---------------------------------------------------------------- emission


def _fmt_float(v):
    if math.isnan(v) or math.isinf(v):
        return "null"
    s = format(v, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent=2, _level=0):
    """JSON text with floats at 17 significant digits and stable layout."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return json.dumps(str(obj))


def _state_dict(vec):
    return {
        "amplitudes": [float(a) for a in vec.amps],
        "mu": [float(m) for m in vec.mu],
        "order": [k + 1 for k in vec.order],
    }


def _maj_dict(report):
    return {
        "holds": report.holds,
        "first_violation": report.first_violation,
        "margins": list(report.margins),
    }


def _kraus_list(channel):
    return [op.triples() for op in channel.kraus]


def _channel_residuals(channel, source, target):
    return {
        "completeness": verify_completeness(channel),
        "channel": channel_error(channel, source, target),
        "incoherent": verify_incoherent(channel),
    }


def _check_residuals(res, tol):
    if res["completeness"] > tol.comp or res["channel"] > CHANNEL_TOL or not res["incoherent"]:
        raise VerificationError(
            f"residuals out of bounds: completeness {res['completeness']:.3e}, channel {res['channel']:.3e}"
        )


# ---------------------------------------------------------------- commands


def _cmd_check(req, src, tgt, body):
    tol = req.tolerances
    report = majorizes(tgt, src, tol)
    body["majorization"] = _maj_dict(report)
    if not report.holds:
        return
    pattern = sign_pattern(src, tgt, tol)
    table = build_table(pattern)
    body["pattern"] = [r.value for r in pattern.relations]
    body["table"] = [[t.x, t.y] for t in table.entries]
    body["mandatory"] = [[t.x, t.y] for t in mandatory_permutations(table)]
    if req.enumerate_all:
        body["feasible_sps"] = [
            {"sp": sol.sp.as_pairs(), "probabilities": list(sol.probabilities)}
            for sol in feasible_sps(src, tgt, tol)
        ]


def _require_majorization(src, tgt, tol, body):
    report = majorizes(tgt, src, tol)
    body["majorization"] = _maj_dict(report)
    if not report.holds:
        raise MajorizationError(f"target does not majorize source (k={report.first_violation})")


def _cmd_synthesize(req, src, tgt, body):
    tol = req.tolerances
    _require_majorization(src, tgt, tol, body)
    if req.enumerate_all:
        body["feasible_sps"] = [
            {"sp": sol.sp.as_pairs(), "probabilities": list(sol.probabilities)}
            for sol in feasible_sps(src, tgt, tol)
        ]
    sol = find_feasible_sp(src, tgt, tol)
    channel = build_kraus(sol.sp, sol.probabilities, sol.cmat, src, tol)
    res = _channel_residuals(channel, src, tgt)
    body["steps"] = 1
    body["sp"] = sol.sp.as_pairs()
    body["probabilities"] = list(sol.probabilities)
    body["kraus"] = _kraus_list(channel)
    body["residuals"] = res
    _check_residuals(res, tol)


def _cmd_sequence(req, src, tgt, body):
    tol = req.tolerances
    _require_majorization(src, tgt, tol, body)
    if req.d_prime < 2:
        raise ParseError(f"d_prime must be at least 2, got {req.d_prime}")
    # blocks larger than the state are clamped, so the default works for small d
    d_prime = max(2, min(req.d_prime, src.dim))
    plan = plan_sequence(src, tgt, d_prime, tol)
    steps = []
    current = src
    for step in plan.steps:
        nxt = step.target.state
        res = _channel_residuals(step.channel, current, nxt)
        steps.append(
            {
                "block": list(step.block),
                "block_norm": step.block_norm,
                "intermediate": _state_dict(nxt),
                "balance_level": step.target.balance_level,
                "repaired": step.target.repaired,
                "sp": step.sub_channel.sp.as_pairs(),
                "probabilities": list(step.channel.probabilities),
                "kraus": _kraus_list(step.channel),
                "residuals": res,
            }
        )
        _check_residuals(res, tol)
        current = nxt
    final = execute_plan(plan, pure_density(src))
    body["d_prime"] = d_prime
    body["step_count"] = plan.step_count
    body["max_steps"] = max_steps(src.dim, d_prime)
    body["repaired"] = plan.repaired
    body["fallback"] = plan.fallback
    body["steps"] = steps
    body["residuals"] = {"channel": float(np.max(np.abs(final - pure_density(tgt))))}
    if body["residuals"]["channel"] > CHANNEL_TOL:
        raise VerificationError(f"end-to-end error {body['residuals']['channel']:.3e}")
    if plan.fallback:
        raise NoIntermediateFound("intermediate search failed; remaining levels solved in one step")


def _cmd_locc(req, src, tgt, body):
    tol = req.tolerances
    _require_majorization(src, tgt, tol, body)
    sol = find_feasible_sp(src, tgt, tol)
    plan = build_locc_plan(sol.sp, sol.probabilities, sol.cmat, src, tol)
    body["sp"] = sol.sp.as_pairs()
    body["probabilities"] = list(sol.probabilities)
    body["measurement"] = [list(row) for row in plan.measurement]
    body["corrections"] = [None if t is None else [t.x, t.y] for t in plan.corrections]
    rep = simulate_locc(plan, src, tgt)
    body["outcomes"] = [
        {"index": o.index + 1, "probability": o.probability, "overlap": o.overlap} for o in rep.outcomes
    ]
    body["residuals"] = {
        "completeness": plan.completeness(),
        "total_probability": abs(rep.total_probability - 1.0),
        "probability": rep.max_probability_error,
        "overlap": 1.0 - rep.min_overlap,
    }
    r = body["residuals"]
    if r["completeness"] > tol.comp or r["total_probability"] > tol.prob or r["overlap"] > CHANNEL_TOL:
        raise VerificationError("LOCC simulation residuals out of bounds")


def _channel_from_triples(dim, ops):
    kraus = tuple(KrausOperator.from_triples(dim, triples) for triples in ops)
    return IncoherentChannel(kraus, np.zeros(len(kraus)))


def _compare(name, stored, fresh, mismatches):
    if stored is None:
        return
    if isinstance(stored, bool) or isinstance(fresh, bool):
        if bool(stored) != bool(fresh):
            mismatches.append(name)
    elif abs(float(stored) - float(fresh)) > ROUNDTRIP_TOL:
        mismatches.append(name)


def _verify_report(req, src, tgt, body):
    rep = req.report
    dim = src.dim
    mismatches = []
    try:
        if "kraus" in rep:
            channel = _channel_from_triples(dim, rep["kraus"])
            fresh = _channel_residuals(channel, src, tgt)
            for k, v in fresh.items():
                _compare(k, (rep.get("residuals") or {}).get(k), v, mismatches)
            body["residuals"] = fresh
        else:
            rho = pure_density(src)
            current = src
            per_step = []
            for i, step in enumerate(rep["steps"]):
                nxt = CoherenceVector(np.asarray(step["intermediate"]["amplitudes"]), tol=req.tolerances)
                channel = _channel_from_triples(dim, step["kraus"])
                fresh = _channel_residuals(channel, current, nxt)
                for k, v in fresh.items():
                    _compare(f"step{i + 1}.{k}", (step.get("residuals") or {}).get(k), v, mismatches)
                per_step.append(fresh)
                rho = apply_channel(channel, rho)
                current = nxt
            end = float(np.max(np.abs(rho - pure_density(tgt))))
            _compare("channel", (rep.get("residuals") or {}).get("channel"), end, mismatches)
            body["steps"] = per_step
            body["residuals"] = {"channel": end}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed report: {exc}") from exc
    body["mismatches"] = mismatches
    if mismatches:
        raise VerificationError(f"recomputed residuals differ from the report: {mismatches}")
    res = body["residuals"]
    if res["channel"] > CHANNEL_TOL or res.get("completeness", 0.0) > req.tolerances.comp:
        raise VerificationError("embedded channel does not realise the transformation")


def _verify_suite(req, body):
    """Seeded self-test: synthesize and check random pairs of d = 2..5."""
    rng = np.random.default_rng(req.seed)
    tol = req.tolerances
    rows = []
    failed = 0
    for d in range(2, 6):
        for _ in range(10):
            src, tgt = random_majorizing_pair(d, rng)
            row = {"d": d, "source_mu": list(src.mu), "target_mu": list(tgt.mu)}
            try:
                sol = find_feasible_sp(src, tgt, tol)
                channel = build_kraus(sol.sp, sol.probabilities, sol.cmat, src, tol)
                row["residuals"] = _channel_residuals(channel, src, tgt)
                _check_residuals(row["residuals"], tol)
                row["status"] = "ok"
            except CohTransError as exc:
                row["status"] = exc.code
                failed += 1
            rows.append(row)
    body["seed"] = req.seed
    body["cases"] = rows
    body["failed"] = failed
    if failed:
        raise VerificationError(f"{failed} of {len(rows)} random cases failed")


_HANDLERS = {
    "check": _cmd_check,
    "synthesize": _cmd_synthesize,
    "sequence": _cmd_sequence,
    "locc": _cmd_locc,
    "verify": _verify_report,
}


def _exit_code(exc):
    if isinstance(exc, MajorizationError):
        return EXIT_MAJORIZATION
    if isinstance(exc, NoFeasibleSP):
        return EXIT_NO_SP
    if isinstance(exc, NoIntermediateFound):
        return EXIT_NO_INTERMEDIATE
    if isinstance(exc, VerificationError):
        return EXIT_VERIFY
    # malformed states, bad options and oversize requests are input errors
    return EXIT_PARSE


def run(request):
    """Execute a request; errors are folded into the report, never raised."""
    report = JobReport(request.command)
    body = report.body
    try:
        if request.command == "verify" and request.report is None:
            _verify_suite(request, body)
        else:
            tol = request.tolerances
            src = _state(request.source, request.source_mu, tol)
            tgt = _state(request.target, request.target_mu, tol)
            if src.dim != tgt.dim:
                raise ParseError(f"source has {src.dim} levels, target has {tgt.dim}")
            body["source"] = _state_dict(src)
            body["target"] = _state_dict(tgt)
            _HANDLERS[request.command](request, src, tgt, body)
    except CohTransError as exc:
        report.exit_code = _exit_code(exc)
        report.error = {"code": exc.code, "message": str(exc)}
        if isinstance(exc, NoFeasibleSP):
            report.error["attempts"] = [
                {"sp": sp.as_pairs(), "reason": reason} for sp, reason in exc.attempts
            ]
    return report


# ---------------------------------------------------------------- entry point


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def build_parser():
    p = argparse.ArgumentParser(prog="cohtrans", description="Incoherent-operation synthesis for pure coherent states.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", required=True, help="JSON request (or report for verify); '-' for stdin")
    p.add_argument("--output", default="-", help="where to write the JSON report; '-' for stdout")
    p.add_argument("--d-prime", type=int, default=None, help="block size for 'sequence' (default 5)")
    p.add_argument("--tolerance", type=float, default=None, help="accepted residual of the probability system")
    p.add_argument("--enumerate-all", action="store_true", help="also list every feasible permutation set")
    p.add_argument("--seed", type=int, default=None, help="seed for the randomized self-test of 'verify'")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = _read(args.input)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        req = parse_request(doc, args.command, args.d_prime, args.tolerance, args.enumerate_all, args.seed)
    except (OSError, ParseError) as exc:
        err = exc if isinstance(exc, ParseError) else ParseError(str(exc))
        report = JobReport(args.command, EXIT_PARSE, error={"code": err.code, "message": str(err)})
    else:
        report = run(req)
    _write(args.output, dumps(report.to_dict()) + "\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
