"""Command-line interface.

Every command reads one or two system files (JSON objects with keys ``A``,
``C`` and an optional ``label``) and writes a report to standard output.
Exit status is 0 on success or a positive verdict, 1 on a well-formed
negative verdict and 2 on input or numerical errors.
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .canonical import merged_observable_canonical, topological_canonical
from .catalog import classify_3d_siso
from .config import DEFAULT_CONFIG, ToleranceConfig
from .equivalence import linear_equivalent, topologically_equivalent
from .errors import BorderlineSpectrum, ObsEquivError, ParseError, ShapeError
from .observability import kalman_decompose, observability_matrix
from .report import Report, canonical_to_json, matrix_to_json, signature_to_json, verdict_to_json
from .signature import signature_from_split
from .spectral import spectral_split
from .system import ObservedSystem
from .trajectory import check_linear_witness, default_times, simulate_observation

__all__ = ["parse_system", "parse_matrix", "build_parser", "run", "main"]

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


def parse_matrix(value, name: str) -> np.ndarray:
    """Rectangular nested list of numbers -> 2-D float array."""
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ParseError(f"{name} must be a list of rows")
    widths = {len(r) for r in value}
    if len(widths) > 1:
        raise ParseError(f"{name} has ragged rows (lengths {sorted(widths)})")
    for r in value:
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"{name} contains a non-number: {x!r}")
    width = widths.pop() if widths else 0
    M = np.array(value, dtype=float).reshape(len(value), width)
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains NaN or Inf")
    return M


def _system_from_dict(data, default_label: str) -> ObservedSystem:
    if not isinstance(data, dict):
        raise ParseError("system file must hold a JSON object")
    if "A" not in data:
        raise ParseError("system file is missing key 'A'")
    A = parse_matrix(data["A"], "A")
    if "C" not in data:
        raise ParseError("system file is missing key 'C'")
    C = parse_matrix(data["C"], "C")
    label = data.get("label", default_label)
    if not isinstance(label, str):
        raise ParseError("label must be a string")
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"A must be square, got {A.shape}")
    if C.shape[1] != A.shape[0] and not (C.size == 0 and A.shape[0] == 0):
        raise ShapeError(f"C has {C.shape[1]} columns, A is {A.shape[0]} x {A.shape[0]}")
    return ObservedSystem(A, C, label=label)


def _load_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def parse_system(path) -> ObservedSystem:
    """Read and validate a system file.

    Raises
    ------
    ParseError
        Unreadable file, malformed JSON, missing keys or ragged rows.
    ShapeError
        Non-square ``A`` or a ``C`` whose width does not match ``A``.
    ValueError
        NaN or Inf entries.
    """
    return _system_from_dict(_load_json(path), Path(path).stem)


def _parse_vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ParseError(f"cannot parse vector {text!r}") from exc
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains NaN or Inf")
    return v


def _config(args) -> ToleranceConfig:
    return ToleranceConfig(
        tol_spec=args.tol_spec, tol_rank=args.tol_rank, tol_residual=args.tol_residual,
        tol_cluster=args.tol_cluster, samples=args.samples, seed=args.seed,
    )


# each command returns (payload, exit code)

def _cmd_invariants(systems, args, cfg):
    (S,) = systems
    split = spectral_split(S, cfg)
    return {"status": "ok", "signature": signature_to_json(signature_from_split(S, split, cfg))}, EXIT_OK


def _cmd_split(systems, args, cfg):
    (S,) = systems
    sp = spectral_split(S, cfg)
    payload = {
        "status": "ok",
        "signature": signature_to_json(signature_from_split(S, sp, cfg)),
        "P": matrix_to_json(sp.P),
        "A0": matrix_to_json(sp.A0), "Aplus": matrix_to_json(sp.Aplus), "Aminus": matrix_to_json(sp.Aminus),
        "C0": matrix_to_json(sp.C0), "Cplus": matrix_to_json(sp.Cplus), "Cminus": matrix_to_json(sp.Cminus),
    }
    return payload, EXIT_OK


def _cmd_kalman(systems, args, cfg):
    (S,) = systems
    dec = kalman_decompose(S, cfg)
    payload = {
        "status": "ok",
        "k_obs": dec.k,
        "observability_matrix": matrix_to_json(observability_matrix(S)),
        "T": matrix_to_json(dec.T),
        "Ao": matrix_to_json(dec.Ao), "Am": matrix_to_json(dec.Am), "Au": matrix_to_json(dec.Au),
        "Co": matrix_to_json(dec.Co),
    }
    return payload, EXIT_OK


def _cmd_canonical(systems, args, cfg):
    (S,) = systems
    cf = merged_observable_canonical(S, cfg) if args.merged else topological_canonical(S, cfg)
    return {"status": "ok", "canonical": canonical_to_json(cf)}, EXIT_OK


def _cmd_catalog3d(systems, args, cfg):
    (S,) = systems
    entry = classify_3d_siso(S, cfg)
    rep = entry.representative()
    out = entry.to_dict()
    out["representative"] = {"A": matrix_to_json(rep.A), "C": matrix_to_json(rep.C)}
    return {"status": "ok", "catalog": out}, EXIT_OK


def _cmd_equiv(systems, args, cfg):
    S1, S2 = systems
    if args.mode == "linear":
        v = linear_equivalent(S1, S2, cfg)
    else:
        v = topologically_equivalent(S1, S2, cfg)
    status = "equivalent" if v.equivalent else "not_equivalent"
    return {"status": status, "verdict": verdict_to_json(v)}, EXIT_OK if v.equivalent else EXIT_NEGATIVE


def _cmd_simulate(systems, args, cfg):
    (S,) = systems
    x0 = _parse_vector(args.x0) if args.x0 is not None else np.ones(S.n)
    if args.points < 1 or not math.isfinite(args.t_max) or args.t_max < 0:
        raise ValueError("need --points >= 1 and a finite --t-max >= 0")
    tr = simulate_observation(S, x0, default_times(args.t_max, args.points))
    payload = {
        "status": "ok",
        "x0": [float(v) for v in x0],
        "times": [float(t) for t in tr.times],
        "states": matrix_to_json(tr.states.reshape(len(tr.times), S.n)),
        "outputs": matrix_to_json(tr.outputs.reshape(len(tr.times), S.p)),
    }
    return payload, EXIT_OK


def _cmd_check_witness(systems, args, cfg):
    S1, S2 = systems
    data = _load_json(args.witness)
    if not isinstance(data, dict) or "P" not in data:
        raise ParseError("witness file must hold a JSON object with key 'P'")
    P = parse_matrix(data["P"], "P")
    times = default_times(args.t_max, args.points)
    res = check_linear_witness(S1, S2, P, times=times, cfg=cfg, tolerance=args.tolerance)
    payload = {
        "status": "pass" if res.passed else "fail",
        "witness_check": {
            "passed": res.passed,
            "max_abs_discrepancy": res.max_abs_discrepancy,
            "max_rel_discrepancy": res.max_rel_discrepancy,
            "samples": res.samples,
        },
    }
    return payload, EXIT_OK if res.passed else EXIT_NEGATIVE


_COMMANDS = {
    "invariants": (_cmd_invariants, 1, "invariant signature (n0, n+, n-, k, k0, k+, k-)"),
    "split": (_cmd_split, 1, "block-diagonal center / unstable / stable split"),
    "kalman": (_cmd_kalman, 1, "Kalman observability decomposition"),
    "canonical": (_cmd_canonical, 1, "topological canonical form"),
    "catalog3d": (_cmd_catalog3d, 1, "family and parameters of a 3-D single-output system"),
    "equiv": (_cmd_equiv, 2, "decide linear or topological equivalence of two systems"),
    "simulate": (_cmd_simulate, 1, "sample x(t) and w(t) on a uniform time grid"),
    "check-witness": (_cmd_check_witness, 2, "check a witness P against sampled trajectories"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    d = DEFAULT_CONFIG
    common.add_argument("--tol-spec", type=float, default=d.tol_spec, help="center / hyperbolic threshold (relative)")
    common.add_argument("--tol-rank", type=float, default=d.tol_rank, help="relative singular value cutoff")
    common.add_argument("--tol-residual", type=float, default=d.tol_residual, help="accepted relative residual")
    common.add_argument("--tol-cluster", type=float, default=d.tol_cluster, help="eigenvalue clustering radius")
    common.add_argument("--samples", type=int, default=d.samples, help="random draws in the witness search")
    common.add_argument("--seed", type=int, default=d.seed)
    common.add_argument("--output", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="obsequiv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, arity, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.add_argument("systems", nargs=arity, metavar="SYSTEM.json")
        if name == "equiv":
            p.add_argument("--mode", choices=("linear", "topological"), default="topological")
        if name == "canonical":
            p.add_argument("--merged", action="store_true", help="merge the center and observable hyperbolic blocks")
        if name in ("simulate", "check-witness"):
            p.add_argument("--t-max", type=float, default=2.0)
            p.add_argument("--points", type=int, default=33)
        if name == "simulate":
            p.add_argument("--x0", help="initial state, comma or space separated (default: all ones)")
        if name == "check-witness":
            p.add_argument("--witness", required=True, metavar="P.json", help='JSON object {"P": [[...]]}')
            p.add_argument("--tolerance", type=float, default=None, help="defaults to --tol-residual")
    return parser


def _execute(args) -> Tuple[Report, int]:
    func = _COMMANDS[args.command][0]
    inputs = [str(p) for p in args.systems]
    warnings: List[str] = []
    try:
        cfg = _config(args)
    except ValueError as exc:
        error = {"status": "error", "error": {"type": type(exc).__name__, "message": str(exc)}}
        return Report(args.command, inputs, DEFAULT_CONFIG.to_dict(), warnings, error), EXIT_ERROR
    try:
        systems = [parse_system(p) for p in args.systems]
        inputs = [S.label or p for S, p in zip(systems, inputs)]
        payload, code = func(systems, args, cfg)
    except (ObsEquivError, ValueError, np.linalg.LinAlgError) as exc:
        if isinstance(exc, BorderlineSpectrum):
            warnings.append(f"BorderlineSpectrum: {exc}")
        payload = {"status": "error", "error": {"type": type(exc).__name__, "message": str(exc)}}
        code = EXIT_ERROR
    return Report(args.command, inputs, cfg.to_dict(), warnings, payload), code


def run(argv: Optional[List[str]] = None) -> Tuple[Report, int]:
    """Parse ``argv``, execute the command and return its report and exit code."""
    return _execute(build_parser().parse_args(argv))


def _summary(report: Report) -> str:
    p = report.payload
    if "verdict" in p:
        v = p["verdict"]
        head = "equivalent" if v["equivalent"] else f"not equivalent: {v['reason']['message']}"
        return f"verdict: {head}\n"
    if "error" in p:
        return f"error: {p['error']['type']}: {p['error']['message']}\n"
    return ""


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return EXIT_ERROR if exc.code else EXIT_OK
    report, code = _execute(args)
    if args.output == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(_summary(report) + report.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
