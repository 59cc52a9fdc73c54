"""Command-line front end.

Subcommands
-----------
classify    print an Existence/Nonexistence/Unknown verdict as JSON
region      write a (p, q) region diagram as CSV + SVG
riesz-eval  evaluate a radial Riesz convolution with error bounds
certify     build the matching candidate profile, tune its amplitude
            and write the resulting certificate

Exit codes: 0 for any mathematical answer (including Divergent),
1 for a certification that ran but did not certify, 2 for invalid
parameters, 3 for I/O failures.

Numbers on the classification side accept fractions ("3/2") and are
handled exactly; the numeric subcommands parse them as floats.  CSV and
JSON outputs are byte-identical across runs with the same arguments;
each file gets a sidecar manifest carrying the run parameters, a config
hash and the timestamp.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from . import classifier as cls
from . import diagrams, profiles, riesz, verifier
from .operators import OperatorSpec, m_laplace, m_mean_curvature


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _operator(args) -> OperatorSpec:
    m = float(args.m)
    if getattr(args, "operator", "m_laplace") == "m_mean_curvature":
        return m_mean_curvature(m)
    return m_laplace(m)


def _threads() -> int:
    raw = os.environ.get("NONLOCAL_SUPERSOL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _write_manifest(path: str, subcommand: str, params: dict) -> None:
    canonical = json.dumps(params, sort_keys=True, default=str)
    manifest = {
        "subcommand": subcommand,
        "parameters": json.loads(canonical),
        "tool_version": __version__,
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_domain(text: str) -> tuple[str, Fraction | None]:
    if text == "exterior":
        return "exterior", None
    if text == "rn":
        return "rn", None
    if text.startswith("bounded:"):
        return "bounded", _fraction(text.split(":", 1)[1])
    raise argparse.ArgumentTypeError("domain must be exterior, rn or bounded:R")


def cmd_classify(args) -> int:
    flags = cls.OperatorClassFlags.from_preset(args.operator_class)
    if args.system:
        missing = [n for n in ("m2", "beta", "r", "s", "shape") if getattr(args, n) is None]
        if missing:
            print(f"system classification needs --{' --'.join(missing)}", file=sys.stderr)
            return 2
        flags_b = cls.OperatorClassFlags.from_preset(args.operator_class2 or args.operator_class)
        params = cls.SystemParams(
            N=args.N, m1=args.m, m2=args.m2, alpha=args.alpha, beta=args.beta,
            p=args.p, q=args.q, r=args.r, s=args.s, shape=args.shape,
            flags_a=flags, flags_b=flags_b,
        )
        verdict = cls.classify_system(params)
    else:
        domain, radius = args.domain
        params = cls.ProblemParams(
            N=args.N, m=args.m, alpha=args.alpha, p=args.p, q=args.q,
            domain=domain, domain_radius=radius, flags=flags,
        )
        verdict = cls.classify_single(params)
    print(verdict.to_json())
    return 0


def cmd_region(args) -> int:
    flags = cls.OperatorClassFlags.from_preset(args.operator_class)
    domain, radius = args.domain
    p_lo, p_hi = args.p_range
    q_lo, q_hi = args.q_range
    base = cls.ProblemParams(
        N=args.N, m=args.m, alpha=args.alpha, p=max(p_hi, 1), q=q_lo,
        domain=domain, domain_radius=radius, flags=flags,
    )
    p_values = cls.lattice(p_lo, p_hi, args.res, include_lo=p_lo > 0)
    q_values = cls.lattice(q_lo, q_hi, args.res)
    matrix = _region_matrix(base, p_values, q_values)

    csv_path, svg_path = args.out + ".csv", args.out + ".svg"
    try:
        with open(csv_path, "w", encoding="utf-8") as fh:
            for row in diagrams.region_csv_rows(p_values, q_values, matrix):
                fh.write(row + "\n")
        with open(svg_path, "w", encoding="utf-8") as fh:
            fh.write(diagrams.region_svg(
                p_values, q_values, matrix, base,
                p_range=(float(p_lo), float(p_hi)), q_range=(float(q_lo), float(q_hi)),
            ))
            fh.write("\n")
        _write_manifest(
            args.out + ".manifest.json", "region",
            {"N": args.N, "m": str(args.m), "alpha": str(args.alpha),
             "p_range": [str(p_lo), str(p_hi)], "q_range": [str(q_lo), str(q_hi)],
             "res": args.res, "operator_class": args.operator_class, "domain": domain},
        )
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {csv_path} and {svg_path}")
    return 0


def _region_matrix(base, p_values, q_values):
    workers = _threads()
    if workers == 1:
        return cls.region_grid(base, p_values, q_values)
    from concurrent.futures import ThreadPoolExecutor

    def one_row(qv):
        return cls.region_grid(base, p_values, [qv])[0]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one_row, q_values))


def cmd_riesz_eval(args) -> int:
    tail = args.tail
    if tail is not None and tail != "compact":
        tail = float(tail)
    try:
        density = riesz.RadialFunction.from_expression(args.f, tail)
    except (riesz.TailMetadataInvalid, ValueError) as exc:
        print(f"bad density: {exc}", file=sys.stderr)
        return 2
    cfg = riesz.QuadratureConfig(
        rel_tol=args.rel_tol, abs_tol=args.abs_tol,
        max_subdivisions=args.max_subdivisions,
        truncation_radius=args.truncation_radius,
        angular_nodes=args.angular_nodes,
    )
    value = riesz.riesz_convolve(args.N, args.alpha, density, args.p, args.r, cfg)
    print(json.dumps(value.to_json_dict(), sort_keys=True))
    return 0


_THEOREMS = ("2.3i", "2.3ii", "2.4", "2.7", "2.8", "2.9", "2.10", "2.12i", "2.12ii", "2.12iii")


def _reject(reason: str) -> int:
    print(f"hypothesis rejected: {reason}", file=sys.stderr)
    return 2


def _single_construction_gate(args) -> str | None:
    """Check the chosen construction's exponent hypotheses; return an
    error string naming the violated condition (and the nonexistence
    rule that covers it, when one does)."""
    N, m, alpha, p, q = args.N, float(args.m), args.alpha, args.p, args.q
    if args.theorem in ("2.3i", "2.3ii", "2.4"):
        if N <= m:
            return f"needs N > m (classifier: Nonexistence [Thm2.1(i)] for N <= m, got N={N}, m={m})"
        a_thr = alpha * (m - 1.0) / (N - m)
        crit = N * (m - 1.0) / (N - m)
        if args.theorem == "2.3i":
            if abs(alpha - (N - m)) > 1e-12 * max(1.0, alpha):
                return f"needs alpha = N - m exactly (got alpha={alpha}, N-m={N - m})"
            if abs(q - (m - 1.0)) > 1e-12 * max(1.0, abs(q)):
                return f"needs q = m - 1 exactly (got q={q})"
            if p <= crit:
                return f"needs p > N(m-1)/(N-m) = {crit:.6g} (got p={p})"
        elif args.theorem == "2.3ii":
            if p < crit:
                return f"needs p >= N(m-1)/(N-m) = {crit:.6g} (got p={p})"
            qline = m - 1.0 - p * (N - alpha - m) / N
            if q <= qline:
                return f"needs q > m-1-p(N-alpha-m)/N = {qline:.6g} (got q={q})"
        else:
            if p <= a_thr:
                return (
                    f"needs p > alpha(m-1)/(N-m) = {a_thr:.6g} (got p={p}); "
                    f"nonexistence rule Thm2.1(ii1) applies at or below this threshold"
                )
            if q <= a_thr:
                return f"needs q > alpha(m-1)/(N-m) = {a_thr:.6g} (got q={q})"
            total = (N + alpha) * (m - 1.0) / (N - m)
            if p + q <= total:
                return (
                    f"needs p+q > (N+alpha)(m-1)/(N-m) = {total:.6g} (got p+q={p + q}); "
                    f"nonexistence rule Thm2.1(ii3) applies at or below this threshold"
                )
        return None
    if args.theorem in ("2.7", "2.8"):
        if p + q <= m - 1.0:
            return f"needs p+q > m-1 = {m - 1.0:.6g} (got p+q={p + q})"
        if args.theorem == "2.7" and N <= 1:
            return "needs N > 1"
        if args.theorem == "2.8" and N != 1:
            return "needs N = 1"
        return None
    if args.theorem in ("2.9", "2.10"):
        if p + q >= m - 1.0:
            return f"needs p+q < m-1 = {m - 1.0:.6g} (got p+q={p + q})"
        if args.theorem == "2.9" and N <= 1:
            return "needs N > 1"
        if args.theorem == "2.10" and N != 1:
            return "needs N = 1"
        return None
    return None


def _certify_single_theorem(args):
    op = _operator(args)
    N, m, alpha, p, q = args.N, float(args.m), args.alpha, args.p, args.q
    grid = None
    if args.grid_points:
        if args.theorem in ("2.7", "2.8", "2.9", "2.10"):
            grid = verifier.GridSpec(0.0, args.R, args.grid_points, "linear")
        else:
            grid = verifier.GridSpec(1e-3, args.r_max, args.grid_points, "log")
    cfg = riesz.QuadratureConfig(rel_tol=args.rel_tol)
    if args.theorem == "2.3i":
        gamma = profiles.select_gamma_case_i(N, m, p)
        profile = profiles.PowerDecay(args.seed, gamma)
        return verifier.tune_amplitude(op, profile, N, alpha, p, q, grid, cfg, "shrink")
    if args.theorem == "2.3ii":
        gamma = profiles.select_gamma_case_ii(N, m, alpha, p, q)
        profile = profiles.PowerDecay(args.seed, gamma)
        return verifier.tune_amplitude(op, profile, N, alpha, p, q, grid, cfg, "shrink")
    if args.theorem == "2.4":
        profile = profiles.make_log_corrected(N, m, args.seed)
        return verifier.tune_amplitude(op, profile, N, alpha, p, q, grid, cfg, "shrink")
    kind = "linear" if args.theorem in ("2.7", "2.9") else "log"
    mode = "small" if args.theorem in ("2.7", "2.8") else "large"
    direction = "shrink" if mode == "small" else "grow"
    profile = profiles.make_bounded(kind, mode, args.R, args.seed)
    return verifier.tune_amplitude(
        op, profile, N, alpha, p, q, grid, cfg, direction,
        domain="bounded", domain_radius=args.R,
    )


def _certify_ad_hoc(args) -> int:
    """Certify a user-supplied profile at its own amplitude; no theorem
    gate, no tuning, no tag."""
    if args.alpha is None:
        return _reject("ad-hoc certification needs --alpha")
    try:
        profile = profiles.profile_from_json(args.profile)
    except (ValueError, KeyError) as exc:
        print(f"bad profile: {exc}", file=sys.stderr)
        return 2
    domain = "bounded" if args.R is not None else "rn"
    grid = None
    if args.grid_points:
        if domain == "bounded":
            grid = verifier.GridSpec(0.0, args.R, args.grid_points, "linear")
        else:
            grid = verifier.GridSpec(1e-3, args.r_max, args.grid_points, "log")
    cert = verifier.certify_single(
        _operator(args), profile, args.N, args.alpha, args.p, args.q,
        grid, riesz.QuadratureConfig(rel_tol=args.rel_tol), domain, args.R,
    )
    _emit_certificate(args, cert)
    return 0 if cert.status in ("Certified", "Divergent") else 1


def cmd_certify(args) -> int:
    if args.profile is not None:
        return _certify_ad_hoc(args)
    if args.theorem is None:
        print("certify needs --theorem or --profile", file=sys.stderr)
        return 2
    if args.theorem not in _THEOREMS:
        print(f"unknown theorem id {args.theorem!r}; choose from {_THEOREMS}", file=sys.stderr)
        return 2

    if args.theorem.startswith("2.12"):
        return _certify_system_theorem(args)

    if args.theorem in ("2.7", "2.8", "2.9", "2.10") and args.R is None:
        return _reject("bounded-domain certification needs --R")
    if args.alpha is None:
        args.alpha = args.N / 2.0  # any admissible order works for bounded domains
    reason = _single_construction_gate(args)
    if reason is not None:
        return _reject(reason)

    try:
        amplitude, cert = _certify_single_theorem(args)
    except profiles.EmptyInterval as exc:
        return _reject(str(exc))
    except verifier.NoAmplitudeFound as exc:
        print(f"no amplitude found: {exc}", file=sys.stderr)
        if exc.certificate is not None:
            _emit_certificate(args, exc.certificate)
        return 1
    _emit_certificate(args, cert)
    if cert.status == "Certified":
        return 0
    if cert.status == "Divergent":
        return 0
    return 1


def _certify_system_theorem(args) -> int:
    shape = {"2.12i": 1, "2.12ii": 2, "2.12iii": 3}[args.theorem]
    for name in ("m2", "beta", "r", "s"):
        if getattr(args, name) is None:
            return _reject(f"system certification needs --{name}")
    flags = cls.OperatorClassFlags.from_preset("hm+upper")
    params = cls.SystemParams(
        N=args.N, m1=args.m, m2=args.m2, alpha=args.alpha, beta=args.beta,
        p=args.p, q=args.q, r=args.r, s=args.s, shape=shape,
        flags_a=flags, flags_b=flags,
    )
    verdict = cls.classify_system(params)
    expected = {1: "Thm2.12(i)", 2: "Thm2.12(ii)", 3: "Thm2.12(iii)"}[shape]
    if expected not in verdict.tags:
        return _reject(
            f"exponents violate the existence conditions for shape {shape} "
            f"(classifier verdict: {verdict.status} {list(verdict.tags)})"
        )
    opA, opB = m_laplace(float(args.m)), m_laplace(float(args.m2))
    grid = None
    if args.grid_points:
        grid = verifier.GridSpec(1e-3, args.r_max, args.grid_points, "log")
    cfg = riesz.QuadratureConfig(rel_tol=args.rel_tol)

    def make_pair(eps):
        return profiles.make_system_pair(args.N, float(args.m), float(args.m2), eps)

    try:
        amplitude, c1, c2 = verifier.tune_system_amplitude(
            opA, opB, make_pair, args.N, args.alpha, args.beta,
            args.p, args.q, args.r, args.s, shape, args.seed, grid, cfg,
        )
    except verifier.NoAmplitudeFound as exc:
        print(f"no amplitude found: {exc}", file=sys.stderr)
        return 1
    payload = {
        "amplitude": amplitude,
        "component_u": json.loads(c1.to_json()),
        "component_v": json.loads(c2.to_json()),
    }
    text = json.dumps(payload, sort_keys=True)
    if args.out:
        try:
            with open(args.out + ".json", "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            _write_manifest(args.out + ".manifest.json", "certify", _cert_params(args))
        except OSError as exc:
            print(f"cannot write output: {exc}", file=sys.stderr)
            return 3
    print(text)
    ok = c1.status == "Certified" and c2.status == "Certified"
    divergent = "Divergent" in (c1.status, c2.status)
    return 0 if ok or divergent else 1


def _cert_params(args) -> dict:
    keys = ("theorem", "N", "m", "m2", "alpha", "beta", "p", "q", "r", "s", "R", "seed")
    return {k: getattr(args, k, None) for k in keys}


def _emit_certificate(args, cert) -> None:
    text = cert.to_json()
    if args.out:
        try:
            with open(args.out + ".json", "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            with open(args.out + ".csv", "w", encoding="utf-8") as fh:
                for row in cert.csv_rows():
                    fh.write(row + "\n")
            _write_manifest(args.out + ".manifest.json", "certify", _cert_params(args))
        except OSError as exc:
            print(f"cannot write output: {exc}", file=sys.stderr)
    print(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocal-supersol",
        description="Radial supersolution certification and parameter classification "
        "for quasilinear inequalities with Riesz-convolution right-hand sides.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_cls = sub.add_parser("classify", help="classify one parameter point")
    p_cls.add_argument("--N", type=int, required=True)
    p_cls.add_argument("--m", type=_fraction, required=True)
    p_cls.add_argument("--alpha", type=_fraction, required=True)
    p_cls.add_argument("--p", type=_fraction, required=True)
    p_cls.add_argument("--q", type=_fraction, required=True)
    p_cls.add_argument("--domain", type=_parse_domain, default=("rn", None))
    p_cls.add_argument("--operator-class", choices=("hm", "hm+upper", "wmc", "smc"), default="hm+upper")
    p_cls.add_argument("--system", action="store_true")
    p_cls.add_argument("--m2", type=_fraction)
    p_cls.add_argument("--beta", type=_fraction)
    p_cls.add_argument("--r", type=_fraction)
    p_cls.add_argument("--s", type=_fraction)
    p_cls.add_argument("--shape", type=int, choices=(1, 2, 3))
    p_cls.add_argument("--operator-class2", choices=("hm", "hm+upper", "wmc", "smc"))
    p_cls.set_defaults(func=cmd_classify)

    p_reg = sub.add_parser(
        "region",
        help="emit a (p, q) region diagram",
        epilog="The CSV has columns p,q,status,tags: lattice point, verdict "
        "status, and the rule tags that fired (joined with '|').",
    )
    p_reg.add_argument("--N", type=int, required=True)
    p_reg.add_argument("--m", type=_fraction, required=True)
    p_reg.add_argument("--alpha", type=_fraction, required=True)
    p_reg.add_argument("--p-range", type=_fraction, nargs=2, required=True)
    p_reg.add_argument("--q-range", type=_fraction, nargs=2, required=True)
    p_reg.add_argument("--res", type=int, default=200)
    p_reg.add_argument("--out", required=True, help="output basename (.csv/.svg/.manifest.json)")
    p_reg.add_argument("--domain", type=_parse_domain, default=("rn", None))
    p_reg.add_argument("--operator-class", choices=("hm", "hm+upper", "wmc", "smc"), default="hm+upper")
    p_reg.set_defaults(func=cmd_region)

    p_rz = sub.add_parser("riesz-eval", help="evaluate a radial Riesz convolution")
    p_rz.add_argument("--N", type=int, required=True)
    p_rz.add_argument("--alpha", type=float, required=True)
    p_rz.add_argument("--f", required=True, help="radial density expression, e.g. '(1+r)^-3'")
    p_rz.add_argument("--p", type=float, required=True)
    p_rz.add_argument("--r", type=float, required=True)
    p_rz.add_argument("--tail", default=None, help="tail exponent or 'compact' (inferred if omitted)")
    p_rz.add_argument("--rel-tol", type=float, default=1e-8)
    p_rz.add_argument("--abs-tol", type=float, default=0.0)
    p_rz.add_argument("--max-subdivisions", type=int, default=10)
    p_rz.add_argument("--truncation-radius", type=float, default=None)
    p_rz.add_argument("--angular-nodes", type=int, default=24)
    p_rz.set_defaults(func=cmd_riesz_eval)

    p_ct = sub.add_parser(
        "certify",
        help="construct, tune and certify a candidate profile",
        epilog="The margin CSV has columns r,lhs,rhs,margin,budget: grid radius, "
        "quasilinear side, nonlocal side, their difference, and the quadrature "
        "error budget the margin must clear.",
    )
    p_ct.add_argument("--theorem", default=None, help="|".join(_THEOREMS))
    p_ct.add_argument("--profile", default=None,
                      help="profile JSON for ad-hoc certification (no theorem tag)")
    p_ct.add_argument("--N", type=int, required=True)
    p_ct.add_argument("--m", type=_fraction, required=True)
    p_ct.add_argument("--alpha", type=float, default=None)
    p_ct.add_argument("--p", type=float, required=True)
    p_ct.add_argument("--q", type=float, required=True)
    p_ct.add_argument("--R", type=float, default=None, help="bounded-domain radius")
    p_ct.add_argument("--m2", type=_fraction)
    p_ct.add_argument("--beta", type=float)
    p_ct.add_argument("--r", type=float)
    p_ct.add_argument("--s", type=float)
    p_ct.add_argument("--seed", type=float, default=0.1, help="starting amplitude")
    p_ct.add_argument("--operator", choices=("m_laplace", "m_mean_curvature"), default="m_laplace")
    p_ct.add_argument("--grid-points", type=int, default=None)
    p_ct.add_argument("--r-max", type=float, default=100.0)
    p_ct.add_argument("--rel-tol", type=float, default=1e-8)
    p_ct.add_argument("--out", default=None, help="output basename for certificate files")
    p_ct.set_defaults(func=cmd_certify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the contract
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, TypeError, riesz.TailMetadataInvalid) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2
    except riesz.BudgetExceeded as exc:
        print(f"quadrature budget exceeded: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
