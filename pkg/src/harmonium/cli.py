"""Command-line surface: derived constants, spectra, oracle checks, figure data.

Outputs are deterministic for a fixed configuration: every CSV starts with a
``#``-prefixed provenance comment carrying the resolved configuration (no
timestamps), followed by an RFC-4180 header row.  JSON reports use plain
floats.  Exit codes: 0 success, 2 domain/singular errors, 3 convergence
failure, 4 precision failure, 5 oracle tolerance breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import gmpy2

from .boson import boson_spectrum
from .errors import ConvergenceError, DomainError, PrecisionError, SingularModel
from .fermion import fermion_rdo_matrix, h_coefficients, quadrature_rdo_block
from .model import ModelParams, effective_oscillator, from_coupling, gaussian_exponent, rdo_exponent
from .precision import PRECISION_CHOICES, context, decimal_str
from .spectral import (
    alpha_root,
    boltzmann_series,
    exponential_series,
    gaussian_series,
    natural_spectrum,
    running_mean,
    spectrum_csv_rows,
    vectors_csv_rows,
)

ENV_BITS = "HARMONIUM_BITS"
NEAR_UNIT_RATIO = 1e-6

FIGURE_DEFAULTS = {
    1: {"n": 5, "ratios": (0.8, 0.5, 1.0 / 3.0)},
    2: {"n": 3, "l_ratio": 0.8},
    3: {"n": 5, "l_ratio": 1.0 / 3.0, "ks": (30, 100, 250)},
    4: {"n": 3, "l_ratio": 0.8, "ks": (30, 100, 250)},
    5: {"n": 3, "l_ratio": 0.8, "ks": (100, 250)},
}


def _default_bits(fallback: int) -> int:
    env = os.environ.get(ENV_BITS)
    if env is None:
        return fallback
    try:
        bits = int(env)
    except ValueError as exc:
        raise DomainError(f"{ENV_BITS} must be an integer, got {env!r}") from exc
    return bits


def _add_model_args(sub, default_bits: int):
    sub.add_argument("--n", type=int, required=False, help="particle number N")
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--l-ratio", type=float, dest="l_ratio", help="l+/l-")
    group.add_argument(
        "--coupling", type=float, help="coupling ratio N D/(m w^2), > -1"
    )
    sub.add_argument(
        "--bits",
        type=int,
        default=None,
        help=f"mantissa precision bits {PRECISION_CHOICES} (default {default_bits})",
    )
    sub.add_argument("--config", type=str, help="JSON file with default options")
    sub.add_argument("--out", type=str, help="output path (default: stdout)")
    sub.set_defaults(default_bits=default_bits)


def _apply_config(args) -> None:
    """Fill unset options from a JSON config file; explicit flags win."""
    if not getattr(args, "config", None):
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise DomainError(f"unknown config key {key!r}")
        if getattr(args, attr) in (None, False):
            setattr(args, attr, value)


def _or_default(value, fallback):
    return fallback if value is None else value


def _resolve_bits(args) -> int:
    bits = args.bits if args.bits is not None else _default_bits(args.default_bits)
    if bits not in PRECISION_CHOICES:
        raise DomainError(
            f"precision_bits must be one of {PRECISION_CHOICES}, got {bits}"
        )
    return bits


def _resolve_model(args, default_ratio: float | None = None) -> ModelParams:
    if args.n is None:
        raise DomainError("--n is required")
    if args.l_ratio is not None and args.coupling is not None:
        raise DomainError("give exactly one of --l-ratio / --coupling")
    if args.coupling is not None:
        return from_coupling(args.n, args.coupling)
    ratio = args.l_ratio if args.l_ratio is not None else default_ratio
    if ratio is None:
        raise DomainError("give exactly one of --l-ratio / --coupling")
    if not ratio > 0:
        raise DomainError(f"l_ratio must be positive, got {ratio}")
    return ModelParams(args.n, 1.0, ratio)


def _check_fermion_ratio(p: ModelParams) -> None:
    ratio = p.l_ratio()
    if ratio != 1.0 and abs(ratio - 1.0) < NEAR_UNIT_RATIO:
        raise DomainError(
            f"l+/l- = {ratio!r} is too close to 1: the spectrum is numerically a "
            "projector there; use --l-ratio 1.0 (or --coupling 0) for the exact "
            f"zero-coupling case, or keep |l_ratio - 1| >= {NEAR_UNIT_RATIO}"
        )


def _provenance(command: str, settings: dict) -> str:
    return "# harmonium " + command + " " + json.dumps(settings, sort_keys=True)


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# Commands.

def cmd_params(args) -> int:
    bits = _resolve_bits(args)
    p = _resolve_model(args)
    g = gaussian_exponent(p, bits)
    r = rdo_exponent(g, p.n_particles, bits)
    osc = effective_oscillator(p, bits)
    payload = {
        "n": p.n_particles,
        "l_minus": p.l_minus,
        "l_plus": p.l_plus,
        "l_ratio": p.l_ratio(),
        "coupling_ratio": p.coupling_ratio(),
        "A": float(g.a_cap),
        "B_N": float(g.b_cap),
        "a_N": float(r.a_small),
        "b_N": float(r.b_small),
        "c_N": float(r.c_norm),
        "L_N": float(osc.length),
        "beta_homega": None if osc.beta_infinite else float(osc.beta_homega),
        "beta_infinite": osc.beta_infinite,
        "q": float(osc.boltzmann_q),
        "Z_eff": float(osc.z_eff),
        "precision_bits": bits,
    }
    _write_json(args.out, payload)
    return 0


def cmd_boson(args) -> int:
    bits = _resolve_bits(args)
    p = _resolve_model(args)
    kmax = _or_default(args.kmax, 200)
    spec = boson_spectrum(p, kmax, bits)
    settings = {
        "n": p.n_particles,
        "l_ratio": p.l_ratio(),
        "k_max": kmax,
        "precision_bits": bits,
    }
    lines = [_provenance("boson", settings), "k,lambda,lambda_log10,partial_sum"]
    with context(max(64, bits)):
        acc = gmpy2.mpfr(0)
        for k, lam in enumerate(spec.occupations):
            acc += lam
            log10 = f"{float(gmpy2.log10(lam)):.10f}" if lam > 0 else "-inf"
            lines.append(
                f"{k},{decimal_str(lam, bits)},{log10},{decimal_str(acc, bits)}"
            )
    _write_lines(args.out, lines)
    return 0


def _run_fermion_pipeline(p: ModelParams, m_max: int, bits: int):
    started = time.perf_counter()
    mat = fermion_rdo_matrix(p, m_max, bits)
    with context(bits):
        defect = abs(mat.trace() / p.n_particles - 1)
    spectrum = natural_spectrum(mat, p.n_particles)
    elapsed = time.perf_counter() - started
    print(
        f"harmonium: N={p.n_particles} l_ratio={p.l_ratio():.6g} m_max={m_max} "
        f"bits={bits} trace_defect={float(defect):.3e} runtime={elapsed:.1f}s",
        file=sys.stderr,
    )
    return spectrum


def cmd_fermion(args) -> int:
    bits = _resolve_bits(args)
    p = _resolve_model(args)
    _check_fermion_ratio(p)
    mmax = _or_default(args.mmax, 500)
    if mmax < 10 * p.n_particles:
        print(
            f"harmonium: warning: m_max = {mmax} is below the recommended "
            f"10 N = {10 * p.n_particles}",
            file=sys.stderr,
        )
    spectrum = _run_fermion_pipeline(p, mmax, bits)
    settings = {
        "n": p.n_particles,
        "l_ratio": p.l_ratio(),
        "m_max": mmax,
        "precision_bits": bits,
    }
    lines = [_provenance("fermion", settings)] + spectrum_csv_rows(spectrum)
    _write_lines(args.out, lines)
    if args.vectors_out:
        ks = _parse_k_list(args.vectors_k) if args.vectors_k else list(
            range(min(len(spectrum.occupations), mmax // 2))
        )
        vlines = [_provenance("fermion-vectors", settings)] + vectors_csv_rows(
            spectrum, ks
        )
        _write_lines(args.vectors_out, vlines)
    return 0


def _parse_k_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise DomainError(f"bad k list {text!r}") from exc


def _clip_ks(ks, m_max: int) -> list[int]:
    kept = [k for k in ks if k <= m_max // 2]
    dropped = [k for k in ks if k > m_max // 2]
    if dropped:
        print(
            f"harmonium: warning: dropping k = {dropped}; needs m_max >= 2k",
            file=sys.stderr,
        )
    if not kept:
        raise DomainError("no requested orbital index fits the truncation")
    return kept


def cmd_figure(args) -> int:
    fig = args.figure
    defaults = FIGURE_DEFAULTS[fig]
    if args.n is None:
        args.n = defaults["n"]
    bits = _resolve_bits(args)
    m_max = _or_default(args.mmax, 500)
    ks = _parse_k_list(args.k) if args.k else list(defaults.get("ks", ()))
    settings = {"figure": fig, "n": args.n, "m_max": m_max, "precision_bits": bits}

    if fig == 1:
        ratios = (
            [args.l_ratio]
            if args.l_ratio is not None
            else ([from_coupling(args.n, args.coupling).l_plus] if args.coupling is not None
                  else list(defaults["ratios"]))
        )
        rows = []
        for ratio in ratios:
            p = ModelParams(args.n, 1.0, ratio)
            _check_fermion_ratio(p)
            spectrum = _run_fermion_pipeline(p, m_max, bits)
            k_hi = min(len(spectrum.occupations) - 1, 4 * args.n + 10)
            with context(max(64, bits)):
                for k in range(k_hi + 1):
                    lam = spectrum.occupations[k]
                    log10 = f"{float(gmpy2.log10(lam)):.10f}" if lam > 0 else "-inf"
                    rows.append(f"{ratio:.10g},{k},{decimal_str(lam, bits)},{log10}")
        settings["ratios"] = [f"{r:.10g}" for r in ratios]
        lines = [_provenance("figure-1", settings), "l_ratio,k,lambda,lambda_log10"] + rows
        _write_lines(args.out, lines)
        return 0

    p = _resolve_model(args, default_ratio=defaults.get("l_ratio"))
    _check_fermion_ratio(p)
    settings["l_ratio"] = p.l_ratio()
    spectrum = _run_fermion_pipeline(p, m_max, bits)
    osc = effective_oscillator(p, 64)
    beta = float(osc.beta_homega) if not osc.beta_infinite else float("inf")

    if fig == 2:
        series = boltzmann_series(spectrum, p.n_particles, 1, m_max // 2)
        lines = [_provenance("figure-2", settings), "k,estimate,reference"]
        for k, est in series:
            lines.append(f"{k},{est:.12g},{beta:.12g}")
    elif fig == 3:
        ks = _clip_ks(ks, m_max)
        settings["ks"] = ks
        lines = [_provenance("figure-3", settings), "k,m,zeta"]
        for k in ks:
            vec = spectrum.vectors[k]
            lo, hi = max(0, k - 60), min(spectrum.m_max - 1, k + 60)
            for m in range(lo, hi + 1):
                if (m - k) % 2 == 0:
                    lines.append(f"{k},{m},{decimal_str(vec[m], bits)}")
    elif fig == 4:
        ks = _clip_ks(ks, m_max)
        settings["ks"] = ks
        ref = beta / (4 * (p.n_particles - 1)) if p.n_particles > 1 else float("nan")
        lines = [_provenance("figure-4", settings), "k,m,m_minus_k,estimate,reference"]
        for k in ks:
            for m, est in gaussian_series(spectrum, k):
                lines.append(f"{k},{m},{m - k},{est:.12g},{ref:.12g}")
    elif fig == 5:
        ks = _clip_ks(ks, m_max)
        settings["ks"] = ks
        try:
            alpha = alpha_root(h_coefficients(p, bits))
            re_alpha = f"{alpha.real:.12g}"
        except (DomainError, SingularModel):
            re_alpha = "nan"
        lines = [
            _provenance("figure-5", settings),
            "k,m,k_minus_m,exp_estimate,exp_estimate_mean20,caption_estimate,re_alpha",
        ]
        for k in ks:
            series = exponential_series(spectrum, k)
            means = running_mean([v for _, v in series], 20)
            for (m, est), mean in zip(series, means):
                caption = est / (k - m)  # the squared-denominator normalization
                lines.append(
                    f"{k},{m},{k - m},{est:.12g},{mean:.12g},{caption:.12g},{re_alpha}"
                )
    else:
        raise DomainError(f"unknown figure id {fig}")
    _write_lines(args.out, lines)
    return 0


def cmd_oracle(args) -> int:
    bits = _resolve_bits(args)
    p = _resolve_model(args)
    if p.n_particles > 3:
        raise DomainError("oracle check supports N <= 3")
    block = _or_default(args.block, 12)
    if block < 1 or block > 21:
        raise DomainError("block size must lie in 1..21")
    max_order = block - 1
    npoints = _or_default(args.npoints, 2 * (2 * max_order + 2 * (p.n_particles - 1)) + 8)
    tol = _or_default(args.tol, 1e-8)
    started = time.perf_counter()
    mat = fermion_rdo_matrix(p, max_order + 1, bits)
    oracle = quadrature_rdo_block(p, max_order, npoints, bits)
    deviation = 0.0
    for m in range(max_order + 1):
        for n in range(m, max_order + 1):
            deviation = max(
                deviation, abs(float(mat.entry(m, n)) - float(oracle[m, n]))
            )
    elapsed = time.perf_counter() - started
    passed = deviation < tol
    payload = {
        "n": p.n_particles,
        "l_ratio": p.l_ratio(),
        "block": block,
        "npoints": npoints,
        "precision_bits": bits,
        "max_abs_deviation": deviation,
        "tolerance": tol,
        "pass": passed,
        "runtime_s": round(elapsed, 3),
    }
    _write_json(args.out, payload)
    return 0 if passed else 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonium",
        description="Natural orbitals and occupation numbers of the N-harmonium "
        "ground state (bosons closed form, fermions high-precision eigenproblem).",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("params", help="derived model constants as JSON")
    _add_model_args(sp, 53)
    sp.set_defaults(func=cmd_params)

    sb = subs.add_parser("boson", help="bosonic occupation numbers as CSV")
    _add_model_args(sb, 53)
    sb.add_argument("--kmax", type=int, default=None)
    sb.set_defaults(func=cmd_boson)

    sf = subs.add_parser("fermion", help="fermionic natural spectrum as CSV")
    _add_model_args(sf, 512)
    sf.add_argument("--mmax", type=int, default=None)
    sf.add_argument("--vectors-out", type=str, dest="vectors_out")
    sf.add_argument("--vectors-k", type=str, dest="vectors_k",
                    help="comma-separated orbital indices for the vector export")
    sf.set_defaults(func=cmd_fermion)

    sg = subs.add_parser("figure", help="dataset matching one of the five figures")
    sg.add_argument("figure", type=int, choices=(1, 2, 3, 4, 5))
    _add_model_args(sg, 512)
    sg.add_argument("--mmax", type=int, default=None)
    sg.add_argument("--k", type=str, help="comma-separated orbital indices")
    sg.set_defaults(func=cmd_figure)

    so = subs.add_parser("oracle", help="ladder assembly vs quadrature oracle")
    _add_model_args(so, 53)
    so.add_argument("--block", type=int, default=None)
    so.add_argument("--npoints", type=int, default=None)
    so.add_argument("--tol", type=float, default=None)
    so.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except (DomainError, SingularModel) as exc:
        print(f"harmonium: error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"harmonium: convergence error: {exc}", file=sys.stderr)
        return 3
    except PrecisionError as exc:
        print(f"harmonium: precision error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
