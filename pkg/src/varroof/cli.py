"""Command-line front end.

Matrix problems arrive as JSON files with complex entries encoded as
[re, im] pairs; results leave on standard output as a single JSON document
carrying the command echo, an input digest, the numeric results and a
pass/fail block for every invariant checked.  Exit codes: 0 all checks pass,
2 validation failure, 3 a numerical check failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__, kernels
from .ensembles import (
    averaged_variance,
    maximal_ensemble,
    minimal_ensemble,
    mixture_deviation,
)
from .hermitian import (
    DensityMatrix,
    Observable,
    ValidationError,
    eigh,
    expectation,
)
from .oracle import OracleConfig, oracle_min, oracle_max
from .qfi import build_ZH, qfi, variance
from .sampling import iter_cases
from .sld import DECOMPOSITION_TOL, decompose, named_family, rho_dot, sld

MIXTURE_TOL = 1e-10
ATTAINMENT_TOL = 1e-9
GAMMA_TOL = 1e-10
ORACLE_GAP_TOL = 1e-4
SLD_RESIDUAL_TOL = 1e-8
_MASK64 = (1 << 64) - 1


# --- deterministic JSON writer -------------------------------------------
#
# json.dumps would work, but float formatting must be pinned to 17
# significant digits so a fixed seed yields byte-identical reports.

def _fmt_float(x) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise ValidationError(f"non-finite value {x!r} in result payload")
    return format(x, ".17g")


def _scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _fmt_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _render(value, pretty: bool, level: int = 0) -> str:
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = list(value.items())
        if pretty:
            pad = "  " * (level + 1)
            body = ",\n".join(
                f"{pad}{json.dumps(k)}: {_render(v, True, level + 1)}" for k, v in items
            )
            return "{\n" + body + "\n" + "  " * level + "}"
        return "{" + ",".join(f"{json.dumps(k)}:{_render(v, False)}" for k, v in items) + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if pretty:
            pad = "  " * (level + 1)
            body = ",\n".join(f"{pad}{_render(v, True, level + 1)}" for v in value)
            return "[\n" + body + "\n" + "  " * level + "]"
        return "[" + ",".join(_render(v, False) for v in value) + "]"
    return _scalar(value)


def _pairs(vector) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vector, dtype=complex)]


def _matrix_payload(matrix) -> list:
    return [_pairs(row) for row in np.asarray(matrix, dtype=complex)]


# --- input ----------------------------------------------------------------

def _matrix_from_pairs(node, dim: int, name: str) -> np.ndarray:
    msg = f"{name} must be a {dim}x{dim} array of [re, im] pairs"
    if not isinstance(node, list) or len(node) != dim:
        raise ValidationError(msg)
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(node):
        if not isinstance(row, list) or len(row) != dim:
            raise ValidationError(msg)
        for j, cell in enumerate(row):
            ok = (
                isinstance(cell, list)
                and len(cell) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in cell)
            )
            if not ok:
                raise ValidationError(f"{msg}; offending entry at row {i}, column {j}")
            out[i, j] = complex(cell[0], cell[1])
    return out


_TOLERANCE_KEYS = ("tol_herm", "tol_trace", "tol_psd")


def load_problem(path: str) -> tuple[str, DensityMatrix, Observable]:
    """Read a problem file; returns (sha256 hex digest, rho, H)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ValidationError(f"{path}: not valid UTF-8 ({exc.reason})") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be an object")

    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValidationError(f"{path}: 'dim' must be a positive integer")
    if "rho" not in doc or "H" not in doc:
        raise ValidationError(f"{path}: both 'rho' and 'H' are required")

    tols = doc.get("tolerances", {})
    if not isinstance(tols, dict) or any(k not in _TOLERANCE_KEYS for k in tols):
        raise ValidationError(f"{path}: 'tolerances' may only set {', '.join(_TOLERANCE_KEYS)}")
    for key, val in tols.items():
        if not isinstance(val, (int, float)) or isinstance(val, bool) or val <= 0:
            raise ValidationError(f"{path}: tolerance {key} must be a positive number")

    rho_mat = _matrix_from_pairs(doc["rho"], dim, "rho")
    h_mat = _matrix_from_pairs(doc["H"], dim, "H")
    rho = DensityMatrix(rho_mat, **{k: float(v) for k, v in tols.items()})
    h = Observable(h_mat, tol_herm=float(tols.get("tol_herm", 1e-10)))
    return digest, rho, h


def _family_digest(name: str, theta: float, r: float) -> str:
    canon = f"family={name};theta={_fmt_float(theta)};r={_fmt_float(r)}"
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# --- output ---------------------------------------------------------------

def _check(name: str, value: float, tolerance: float) -> dict:
    return {
        "name": name,
        "pass": bool(value <= tolerance),
        "value": float(value),
        "tolerance": float(tolerance),
    }


def _member_means(ensemble, H: Observable) -> np.ndarray:
    return np.einsum(
        "kd,dc,kc->k", ensemble.states.conj(), H.matrix, ensemble.states
    ).real


def _ensemble_payload(ensemble, H: Observable) -> dict:
    return {
        "size": ensemble.size,
        "weights": [float(w) for w in ensemble.weights],
        "states": [_pairs(s) for s in ensemble.states],
        "member_expectations": [float(m) for m in _member_means(ensemble, H)],
        "averaged_variance": averaged_variance(ensemble, H),
    }


def _finish(args, command: str, digest: str, results: dict, checks: list[dict]) -> int:
    payload = {
        "command": command,
        "input_digest": "sha256:" + digest,
        "tool": {"name": "varroof", "version": __version__, "kernel": kernels.BACKEND},
        "results": results,
        "checks": checks,
    }
    sys.stdout.write(_render(payload, pretty=args.pretty) + "\n")
    return 0 if all(c["pass"] for c in checks) else 3


# --- subcommands ----------------------------------------------------------

def _cmd_qfi(args) -> int:
    digest, rho, h = load_problem(args.input)
    rep = qfi(rho, h)
    results = {
        "F": rep.F,
        "I": rep.I,
        "variance": rep.variance,
        "F_via_Z": rep.F_via_Z,
        "expectation": expectation(rho, h),
    }
    checks = [
        _check("qfi_identity", abs(rep.F - rep.F_via_Z), ATTAINMENT_TOL * max(1.0, abs(rep.F))),
        _check("variance_bound", max(0.0, rep.F - 4.0 * rep.variance), ATTAINMENT_TOL),
    ]
    return _finish(args, "qfi", digest, results, checks)


def _cmd_min_ensemble(args) -> int:
    digest, rho, h = load_problem(args.input)
    rep = qfi(rho, h)
    ensemble, gammas = minimal_ensemble(rho, h)
    means = _member_means(ensemble, h)
    av = averaged_variance(ensemble, h)

    z = build_ZH(eigh(rho), h)
    tr_z2 = float(np.trace(z.matrix @ z.matrix).real)
    gram = np.einsum("kab,jba->kj", gammas.operators, gammas.operators).real
    gamma_defect = float(np.abs(gram - np.diag(gammas.weights)).max())
    moment_defect = abs(float(ensemble.weights @ means**2) - tr_z2)

    results = {
        "I": rep.I,
        "averaged_variance": av,
        "alphas": [float(a) for a in gammas.alphas],
        "ensemble": _ensemble_payload(ensemble, h),
    }
    checks = [
        _check("mixture_reconstruction", mixture_deviation(ensemble, rho), MIXTURE_TOL),
        _check("convex_roof_attainment", abs(av - rep.I), ATTAINMENT_TOL),
        _check("gamma_orthogonality", gamma_defect, GAMMA_TOL),
        _check("moment_identity", moment_defect, ATTAINMENT_TOL),
    ]
    return _finish(args, "min-ensemble", digest, results, checks)


def _cmd_max_ensemble(args) -> int:
    digest, rho, h = load_problem(args.input)
    var = variance(rho, h)
    mean = expectation(rho, h)
    ensemble = maximal_ensemble(rho, h)
    av = averaged_variance(ensemble, h)
    flat = float(np.abs(_member_means(ensemble, h) - mean).max())

    results = {
        "variance": var,
        "expectation": mean,
        "averaged_variance": av,
        "ensemble": _ensemble_payload(ensemble, h),
    }
    checks = [
        _check("mixture_reconstruction", mixture_deviation(ensemble, rho), MIXTURE_TOL),
        _check("concave_roof_attainment", abs(av - var), ATTAINMENT_TOL),
        _check("member_expectation_flatness", flat, ATTAINMENT_TOL),
    ]
    return _finish(args, "max-ensemble", digest, results, checks)


def _oracle_command(args, direction: int) -> int:
    digest, rho, h = load_problem(args.input)
    rep = qfi(rho, h)
    var = variance(rho, h)
    config = OracleConfig(restarts=args.restarts, seed=args.seed)
    if direction > 0:
        res = oracle_min(rho, h, config)
        name, target = "oracle_min_gap", rep.I
    else:
        res = oracle_max(rho, h, config)
        name, target = "oracle_max_gap", var

    results = {
        "value": res.value,
        "target": target,
        "I": rep.I,
        "variance": var,
        "ensemble": _ensemble_payload(res.ensemble, h),
        "diagnostics": {
            "restarts_used": res.restarts_used,
            "iterations_used": res.iterations_used,
            "best_restart_seed": res.best_restart_seed,
            "lowest_value_seen": res.lowest_value_seen,
            "highest_value_seen": res.highest_value_seen,
        },
    }
    checks = [
        _check("mixture_reconstruction", mixture_deviation(res.ensemble, rho), MIXTURE_TOL),
        _check(name, abs(res.value - target), ORACLE_GAP_TOL),
        _check(
            "lower_bound_soundness",
            max(0.0, rep.I - res.lowest_value_seen),
            ATTAINMENT_TOL,
        ),
    ]
    command = "oracle-min" if direction > 0 else "oracle-max"
    return _finish(args, command, digest, results, checks)


def _cmd_oracle_min(args) -> int:
    return _oracle_command(args, +1)


def _cmd_oracle_max(args) -> int:
    return _oracle_command(args, -1)


def _cmd_sld(args) -> int:
    digest = _family_digest(args.family, args.theta, args.r)
    family = named_family(args.family, bloch_r=args.r)
    center = family.density(args.theta)
    d = rho_dot(family, args.theta)
    l = sld(center, d).matrix
    f_total = float(np.trace(center.matrix @ l @ l).real)
    residual = float(np.abs(l @ center.matrix + center.matrix @ l - 2.0 * d).max())

    results = {
        "family": args.family,
        "theta": args.theta,
        "r": args.r,
        "F_total": f_total,
        "rho": _matrix_payload(center.matrix),
        "rho_dot": _matrix_payload(d),
        "L_theta": _matrix_payload(l),
    }
    checks = [
        _check("sld_residual", residual, SLD_RESIDUAL_TOL),
        _check("rho_dot_trace", abs(float(np.trace(d).real)), SLD_RESIDUAL_TOL),
    ]
    return _finish(args, "sld", digest, results, checks)


def _cmd_decompose(args) -> int:
    digest = _family_digest(args.family, args.theta, args.r)
    family = named_family(args.family, bloch_r=args.r)
    # The library gate is lifted so a failed split is reported as a check
    # row (exit 3) instead of aborting before any output.
    dec = decompose(family, args.theta, decomposition_tol=float("inf"))
    gap = abs(dec.F_total - (dec.F_classical + dec.F_quantum))

    results = {
        "family": args.family,
        "theta": args.theta,
        "r": args.r,
        "F_total": dec.F_total,
        "F_classical": dec.F_classical,
        "F_quantum": dec.F_quantum,
        "H_theta": _matrix_payload(dec.H_theta.matrix),
        "L_theta": _matrix_payload(dec.L_theta.matrix),
    }
    checks = [
        _check(
            "decomposition_identity",
            gap,
            DECOMPOSITION_TOL * max(1.0, abs(dec.F_total)),
        ),
        _check("classical_nonnegative", max(0.0, -dec.F_classical), ATTAINMENT_TOL),
        _check("quantum_nonnegative", max(0.0, -dec.F_quantum), ATTAINMENT_TOL),
    ]
    return _finish(args, "decompose", digest, results, checks)


def _parse_dims(text: str) -> list[int]:
    try:
        dims = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValidationError(f"--dims expects a comma-separated integer list, got {text!r}")
    if not dims or any(d < 1 for d in dims):
        raise ValidationError(f"--dims entries must be positive integers, got {text!r}")
    return dims


def _oracle_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence([seed & _MASK64, index])
    return int(ss.generate_state(1, np.uint64)[0])


def _cmd_verify(args) -> int:
    dims = _parse_dims(args.dims)
    if args.cases < 1:
        raise ValidationError("--cases must be at least 1")
    canon = (
        f"dims={','.join(str(d) for d in dims)};cases={args.cases};"
        f"seed={args.seed};restarts={args.restarts}"
    )
    digest = hashlib.sha256(canon.encode("utf-8")).hexdigest()

    worst = {
        "convex_roof_attainment": 0.0,
        "gamma_orthogonality": 0.0,
        "moment_identity": 0.0,
        "concave_roof_attainment": 0.0,
        "member_expectation_flatness": 0.0,
        "oracle_min_gap": 0.0,
        "oracle_max_gap": 0.0,
        "lower_bound_soundness": 0.0,
        "mixture_reconstruction": 0.0,
    }
    rows = []
    for index, dim, rank, rho, h in iter_cases(args.seed, args.cases, dims):
        rep = qfi(rho, h)
        var = variance(rho, h)
        mean = expectation(rho, h)

        emin, gammas = minimal_ensemble(rho, h)
        emax = maximal_ensemble(rho, h)
        z = build_ZH(eigh(rho), h)
        tr_z2 = float(np.trace(z.matrix @ z.matrix).real)
        means_min = _member_means(emin, h)
        gram = np.einsum("kab,jba->kj", gammas.operators, gammas.operators).real

        config = OracleConfig(restarts=args.restarts, seed=_oracle_seed(args.seed, index))
        rmin = oracle_min(rho, h, config)
        rmax = oracle_max(rho, h, config)

        row = {
            "index": index,
            "dim": dim,
            "rank": rank,
            "I": rep.I,
            "variance": var,
            "convex_roof_attainment": abs(averaged_variance(emin, h) - rep.I),
            "gamma_orthogonality": float(np.abs(gram - np.diag(gammas.weights)).max()),
            "moment_identity": abs(float(emin.weights @ means_min**2) - tr_z2),
            "concave_roof_attainment": abs(averaged_variance(emax, h) - var),
            "member_expectation_flatness": float(np.abs(_member_means(emax, h) - mean).max()),
            "oracle_min_gap": abs(rmin.value - rep.I),
            "oracle_max_gap": abs(rmax.value - var),
            "lower_bound_soundness": max(0.0, rep.I - rmin.lowest_value_seen),
            "mixture_reconstruction": max(
                mixture_deviation(e, rho)
                for e in (emin, emax, rmin.ensemble, rmax.ensemble)
            ),
        }
        rows.append(row)
        for key in worst:
            worst[key] = max(worst[key], row[key])

    tolerances = {
        "convex_roof_attainment": ATTAINMENT_TOL,
        "gamma_orthogonality": GAMMA_TOL,
        "moment_identity": ATTAINMENT_TOL,
        "concave_roof_attainment": ATTAINMENT_TOL,
        "member_expectation_flatness": ATTAINMENT_TOL,
        "oracle_min_gap": ORACLE_GAP_TOL,
        "oracle_max_gap": ORACLE_GAP_TOL,
        "lower_bound_soundness": ATTAINMENT_TOL,
        "mixture_reconstruction": MIXTURE_TOL,
    }
    results = {
        "dims": dims,
        "cases": args.cases,
        "seed": args.seed,
        "restarts": args.restarts,
        "case_reports": rows,
    }
    checks = [_check(name, worst[name], tolerances[name]) for name in worst]
    return _finish(args, "verify", digest, results, checks)


# --- argument parsing -----------------------------------------------------

def _add_output_flags(sub) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true", help="compact single-line JSON (default)")
    group.add_argument("--pretty", action="store_true", help="indented JSON")


def _add_input(sub) -> None:
    sub.add_argument("--input", required=True, metavar="FILE", help="problem file (JSON)")


def _add_oracle_flags(sub) -> None:
    sub.add_argument("--seed", type=int, default=0, help="restart stream seed (default 0)")
    sub.add_argument("--restarts", type=int, default=64, help="random restarts (default 64)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varroof",
        description="Quantum Fisher information, extremal pure-state ensembles, "
        "and the classical/quantum Fisher split.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("qfi", help="Fisher information, variance, and identities")
    _add_input(sub)
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_qfi)

    sub = subs.add_parser("min-ensemble", help="closed-form variance-minimizing ensemble")
    _add_input(sub)
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_min_ensemble)

    sub = subs.add_parser("max-ensemble", help="closed-form variance-maximizing ensemble")
    _add_input(sub)
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_max_ensemble)

    sub = subs.add_parser("oracle-min", help="brute-force minimum of the averaged variance")
    _add_input(sub)
    _add_oracle_flags(sub)
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_oracle_min)

    sub = subs.add_parser("oracle-max", help="brute-force maximum of the averaged variance")
    _add_input(sub)
    _add_oracle_flags(sub)
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_oracle_max)

    for name, handler in (("sld", _cmd_sld), ("decompose", _cmd_decompose)):
        sub = subs.add_parser(
            name,
            help="symmetric logarithmic derivative"
            if name == "sld"
            else "classical/quantum Fisher split",
        )
        sub.add_argument(
            "--family",
            required=True,
            choices=("unitary", "linear-classical", "constant"),
            help="built-in parametrized family",
        )
        sub.add_argument("--theta", type=float, required=True, help="evaluation point")
        sub.add_argument("--r", type=float, default=0.5, help="Bloch radius (default 0.5)")
        _add_output_flags(sub)
        sub.set_defaults(handler=handler)

    sub = subs.add_parser("verify", help="seeded self-check sweep over random problems")
    sub.add_argument("--dims", default="2,3", help="comma-separated dimensions (default 2,3)")
    sub.add_argument("--cases", type=int, default=8, help="number of random cases (default 8)")
    _add_oracle_flags(sub)
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage/help; fold its exit into our codes
        return 0 if exc.code in (0, None) else 2
    try:
        return args.handler(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
