"""Command-line front end: one subcommand per computation, JSON-lines output.

Exit codes: 0 success, 2 usage or invalid parameters, 3 a certificate or
check failed, 4 a resource cap was hit.  Set DILCONST_THREADS to control
internal parallelism (default: all available cores).
"""
from __future__ import annotations

import argparse
import math
import os
import re
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import dilation, freemodel, mrange, pathext, weylfock
from .certificate import BoundKind, CertifiedValue
from .matcore import DimensionCapError
from .records import ResultRecord, csv_rows
from .rotreps import RationalAngle, ThetaMatrix
from .torus import ResourceCapError

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_CAP = 0, 2, 3, 4
THREADS_ENV = "DILCONST_THREADS"


class ThetaFileError(ValueError):
    pass


_FRACTION = re.compile(r"^([+-]?\d+)/(\d+)$")


def parse_angle_token(token: str, where: str = ""):
    """'m/n' is a multiple of 2 pi (returned as RationalAngle); anything else is radians."""
    m = _FRACTION.match(token)
    if m:
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise ThetaFileError(f"{where}zero denominator in token {token!r}")
        angle = RationalAngle.of(num, den)
        if (angle.m, angle.n) != (num, den):
            warnings.warn(f"{where}normalized {token} to {angle.m}/{angle.n}", stacklevel=2)
        return angle
    try:
        value = float(token)
    except ValueError:
        raise ThetaFileError(f"{where}malformed token {token!r}") from None
    if not math.isfinite(value):
        raise ThetaFileError(f"{where}non-finite token {token!r}")
    return RationalAngle(0, 1) if value == 0 else value


def parse_theta_text(text: str) -> ThetaMatrix:
    """First line d, then the strict upper triangle row by row ('#' starts a comment)."""
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for match in re.finditer(r"\S+", body):
            tokens.append((match.group(), lineno, match.start() + 1))
    if not tokens:
        raise ThetaFileError("empty Theta file: expected the dimension d on the first line")
    head, line, col = tokens[0]
    if not head.isdigit() or int(head) < 1:
        raise ThetaFileError(f"line {line}, column {col}: expected a positive dimension, got {head!r}")
    d = int(head)
    entries = tokens[1:]
    need = d * (d - 1) // 2
    if entries and len(entries) != need:
        raise ThetaFileError(f"expected {need} upper-triangle entries for d={d}, found {len(entries)}")
    theta = ThetaMatrix(d)
    pairs = [(k, l) for k in range(d) for l in range(k + 1, d)]
    for (k, l), (tok, line, col) in zip(pairs, entries):
        theta.set(k, l, parse_angle_token(tok, f"line {line}, column {col}: "))
    return theta


def load_theta_file(path) -> ThetaMatrix:
    return parse_theta_text(Path(path).read_text())


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _angle(args) -> RationalAngle:
    if args.n < 1:
        raise ValueError(f"--n must be positive, got {args.n}")
    return RationalAngle.of(args.m, args.n)


def _positive(name, value):
    if not value > 0:
        raise ValueError(f"--{name} must be positive, got {value}")


class Run:
    """Collects records for one invocation."""

    def __init__(self, command: str, params: dict):
        self.command = command
        self.params = params
        self.records: list[ResultRecord] = []
        self.failed = False
        self._start = time.perf_counter()

    def emit(self, value, error_bound, kind, seed=None, passed=None, details=None, **extra_params):
        ms = int(round((time.perf_counter() - self._start) * 1000))
        kind = kind.value if isinstance(kind, BoundKind) else kind
        self.records.append(ResultRecord(
            command=self.command,
            params={**self.params, **extra_params},
            value=float(value),
            error_bound=float(error_bound),
            bound_kind=kind,
            seed=seed,
            runtime_ms=ms,
            passed=passed,
            details=details or {},
        ))
        if passed is False:
            self.failed = True

    def emit_certified(self, cv: CertifiedValue, passed=None, **extra_params):
        self.emit(cv.value, cv.error_bound, cv.kind, passed=passed, details={"method": cv.method}, **extra_params)


# ---- commands ---------------------------------------------------------------


def cmd_ctheta(args, run: Run):
    workers = _threads()
    _positive("grid", args.grid)
    if args.sweep:
        for n in range(1, args.sweep + 1):
            for m in range(n):
                if math.gcd(m, n) != 1:
                    continue
                angle = RationalAngle(m, n)
                step = min(args.grid, 2 * math.pi / n)
                run.emit_certified(dilation.c_theta_constant(angle, args.d, step, workers=workers),
                                   m=m, n=n, grid=step)
        return
    angle = _angle(args)
    run.emit_certified(dilation.c_theta_constant(angle, args.d, min(args.grid, 2 * math.pi / angle.n),
                                                 workers=workers))


def cmd_ctheta_general(args, run: Run):
    _positive("grid", args.grid)
    theta = load_theta_file(args.theta_file)
    cv = dilation.c_theta_general(theta, args.grid, args.coarse, args.iterations, workers=_threads())
    run.emit_certified(cv)
    if args.tensor_bound:
        bound = dilation.tensor_upper_bound(theta, workers=_threads())
        run.emit(bound, 0.0, BoundKind.CERTIFIED_UPPER, passed=cv.lower <= bound,
                 details={"quantity": "tensor upper bound"}, quantity="tensor_upper_bound")


def cmd_c3_bound(args, run: Run):
    _positive("grid", args.grid)
    angle = _angle(args)
    cv = dilation.c_theta_constant(angle, 3, args.grid, workers=_threads())
    lower = cv.as_lower()
    run.emit(lower.value, lower.error_bound, BoundKind.CERTIFIED_LOWER, passed=lower.value >= args.target,
             details={"method": cv.method, "target": args.target, "h_norm_upper": 6 / lower.value})


def cmd_constants(args, run: Run):
    for d in range(args.d, (args.d_max or args.d) + 1):
        cf = dilation.closed_form_constants(d)
        ok = cf.product_defect <= 1e-12
        for name in ("c_uf", "c_f0_lower", "c_f0_upper", "C_d_upper", "C_d_lower_known"):
            val = getattr(cf, name)
            if val is None:
                continue
            run.emit(val, 0.0, BoundKind.EXACT, passed=ok, details=cf.to_dict(), d=d, constant=name)


def _cfg(args, d=None) -> freemodel.SampleConfig:
    return freemodel.SampleConfig(args.N, args.trials, args.seed, d if d is not None else args.d)


def cmd_free_norms(args, run: Run):
    cfg = _cfg(args)
    w = _threads()
    hf = freemodel.estimate_hf_norm(cfg, w)
    ok = abs(hf.mean - hf.target) <= args.tol
    run.emit(hf.mean, abs(hf.deviation), BoundKind.MONTE_CARLO, seed=args.seed, passed=ok,
             details=hf.to_dict(), quantity="hf_norm")
    if not args.skip_T and cfg.d >= 2:
        tn = freemodel.estimate_T_norm(cfg, w)
        ok = abs(tn.mean - tn.target) <= args.tol
        run.emit(tn.mean, abs(tn.deviation), BoundKind.MONTE_CARLO, seed=args.seed, passed=ok,
                 details=tn.to_dict(), quantity="T_norm")


def cmd_arcsine(args, run: Run):
    cfg = _cfg(args, 2)
    st = freemodel.arcsine_check(cfg, workers=_threads())
    run.emit(st.max, st.max, BoundKind.MONTE_CARLO, seed=args.seed, passed=st.max <= args.ks_tol,
             details=st.to_dict(), quantity="ks_distance")
    sums = st.extra["sum_norm"]
    comm = [x for row in st.extra["twisted_commutator_norm"] for x in row]
    for name, vals in (("sum_norm", sums), ("twisted_commutator_norm", comm)):
        worst = max(abs(v - 2) for v in vals)
        run.emit(float(np.mean(vals)), worst, BoundKind.MONTE_CARLO, seed=args.seed,
                 passed=worst <= args.norm_tol, details={"samples": vals}, quantity=name)


def _random_coeffs(d, dim, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((d, dim, dim)) + 1j * rng.standard_normal((d, dim, dim))


def cmd_lehner(args, run: Run):
    for i in range(args.audits):
        coeffs = _random_coeffs(args.d, args.coeff_dim, [args.coeff_seed, i])
        cfg = freemodel.SampleConfig(args.N, args.trials, args.seed + i, args.d)
        rep = freemodel.lehner_inequality_check(coeffs, cfg, args.allowance, workers=_threads())
        run.emit(rep.slack, args.allowance, BoundKind.MONTE_CARLO, seed=cfg.seed, passed=rep.holds,
                 details=rep.to_dict(), audit=i)


def cmd_cf0_search(args, run: Run):
    cfg = _cfg(args)
    cv = freemodel.cf0_ratio_search(cfg, args.coeff_dim, args.starts, args.steps, workers=_threads())
    cf = dilation.closed_form_constants(cfg.d)
    lo = (cf.c_f0_lower or 1.0) - args.slack
    hi = (cf.c_f0_upper or 1.0) + args.slack
    run.emit(cv.value, cv.error_bound, cv.kind, seed=args.seed, passed=lo <= cv.value <= hi,
             details={"method": cv.method, "bracket": [cf.c_f0_lower, cf.c_f0_upper]})


def _random_antisymmetric(d, rng, max_norm):
    b = np.triu(rng.standard_normal((d, d)), 1)
    b = b - b.T
    nb = np.linalg.norm(b, 2)
    return b * (rng.uniform(0, max_norm) / nb) if nb > 0 else b


def _random_theta_pair(d, rng, max_dist, max_theta):
    """Theta with ||Theta|| <= max_theta and Theta' with ||Theta' - Theta|| <= max_dist."""
    a = _random_antisymmetric(d, rng, max_theta)
    return ThetaMatrix.from_array(a), ThetaMatrix.from_array(a + _random_antisymmetric(d, rng, max_dist))


def cmd_weyl_verify(args, run: Run):
    rng = np.random.default_rng(args.seed)
    for i in range(args.pairs):
        th, thp = _random_theta_pair(args.d, rng, args.max_dist, args.max_theta)
        vs = weylfock.construct_vectors(th, thp)
        rep = weylfock.verify_compression(vs, args.cutoff)
        ok = (vs.max_defect() <= 1e-10 and rep.max_residual <= args.tol
              and rep.phase_defect <= args.phase_tol)
        run.emit(rep.max_residual, 0.0, "check", seed=args.seed, passed=ok,
                 details={"vectors": vs.defects(), "compression": rep.to_dict(),
                          "theta": th.array, "theta_prime": thp.array}, pair=i)


def cmd_vectors(args, run: Run):
    th = load_theta_file(args.theta_file)
    thp = load_theta_file(args.theta_prime_file)
    vs = weylfock.construct_vectors(th, thp)
    defect = vs.max_defect()
    run.emit(defect, 0.0, "check", passed=defect <= 1e-10,
             details={"x": vs.x, "y": vs.y, "z": vs.z, "defects": vs.defects(),
                      "gram_determinant": vs.gram_determinant()})


def _parse_pairs(text: str):
    pairs = []
    for item in text.split(","):
        try:
            a, b = item.split(":")
        except ValueError:
            raise ValueError(f"pair {item!r} must look like m/n:m'/n'") from None
        pa, pb = parse_angle_token(a.strip()), parse_angle_token(b.strip())
        if not isinstance(pa, RationalAngle) or not isinstance(pb, RationalAngle):
            raise ValueError(f"pair {item!r} needs rational angles m/n")
        pairs.append((pa, pb))
    return pairs


def cmd_mrange_audit(args, run: Run):
    rows = mrange.metric_inequality_audit(_parse_pairs(args.pairs), args.d, args.resolution, args.grid)
    for row in rows:
        run.emit(row.lower, 0.0, BoundKind.CERTIFIED_LOWER, passed=row.passes,
                 details=dict(row.__dict__), pair=f"{row.theta[0]}/{row.theta[1]}:{row.theta_prime[0]}/{row.theta_prime[1]}")


def cmd_l1_ball(args, run: Run):
    _positive("spacing", args.spacing)
    fam = mrange.Family.rotation(_angle(args), args.d)
    rep = mrange.l1_ball_containment(fam, spacing=args.spacing, grid_step=args.grid)
    run.emit(rep.delta_verified, 0.0, BoundKind.CERTIFIED_LOWER, passed=rep.passes, details=rep.to_dict())


def _oracle(args) -> pathext.GridPathOracle:
    if args.oracle == "random":
        return pathext.RandomIncrementPath(args.k, args.alpha, args.C1, args.seed).oracle()
    if args.oracle == "power":
        return pathext.power_oracle(args.alpha, args.k)
    if args.oracle == "unitary":
        return pathext.unitary_oracle(args.alpha, args.k, seed=args.seed)
    return pathext.linear_oracle(args.C1, args.k)


def cmd_extend_path(args, run: Run):
    _positive("eps", args.eps)
    oracle = _oracle(args)
    t = Fraction(args.t)
    ext = pathext.extend(oracle, t, args.eps)
    point = ext.point
    value = float(point) if np.isscalar(point) else float(np.linalg.norm(point.matrices[0] - np.eye(point.n), 2))
    run.emit(value, args.eps, BoundKind.TWO_SIDED, seed=args.seed,
             details={"depth": ext.depth, "truncation": str(ext.truncation), "constant": oracle.constant,
                      "point": point if np.isscalar(point) else point.matrices})
    if args.audit:
        aud = pathext.audit_pair_bound(oracle, args.audit, np.random.default_rng(args.seed))
        run.emit(aud.max_ratio, 0.0, "check", seed=args.seed, passed=aud.passes, details=aud.to_dict(),
                 quantity="pair_audit")


# ---- parser -----------------------------------------------------------------


def _add_angle(p, m=None, n=None):
    p.add_argument("--m", type=int, default=m, required=m is None, help="numerator of theta / 2pi")
    p.add_argument("--n", type=int, default=n, required=n is None, help="denominator of theta / 2pi")


def _add_sampling(p, d=2, N=500, trials=3):
    p.add_argument("--N", type=int, default=N, help="matrix size")
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dilconst", description=__doc__.splitlines()[0])
    parser.add_argument("--output", help="append records to this JSON-lines file")
    parser.add_argument("--csv", help="write a CSV summary to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ctheta", help="c_theta for a constant rational angle")
    _add_angle(p, m=0, n=1)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--grid", type=float, default=dilation.DEFAULT_GRID)
    p.add_argument("--sweep", type=int, default=0, help="instead sweep all m/n with n <= SWEEP")
    p.set_defaults(func=cmd_ctheta)

    p = sub.add_parser("ctheta-general", help="c_Theta for a rational Theta file")
    p.add_argument("--theta-file", required=True)
    p.add_argument("--grid", type=float, default=1e-2)
    p.add_argument("--coarse", type=int, default=4)
    p.add_argument("--iterations", type=int, default=40)
    p.add_argument("--tensor-bound", action="store_true", help="also emit the tensor upper bound")
    p.set_defaults(func=cmd_ctheta_general)

    p = sub.add_parser("c3-bound", help="certified lower bound for c at constant angle, d = 3")
    _add_angle(p, m=3, n=7)
    p.add_argument("--grid", type=float, default=dilation.DEFAULT_GRID)
    p.add_argument("--target", type=float, default=1.858)
    p.set_defaults(func=cmd_c3_bound)

    p = sub.add_parser("constants", help="closed-form constants")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--d-max", type=int, default=None)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("free-norms", help="Monte-Carlo norms of free Haar models")
    _add_sampling(p)
    p.add_argument("--tol", type=float, default=0.12)
    p.add_argument("--skip-T", action="store_true")
    p.set_defaults(func=cmd_free_norms)

    p = sub.add_parser("arcsine", help="arcsine law and sum/commutator norms for a Haar pair")
    _add_sampling(p)
    p.add_argument("--ks-tol", type=float, default=0.05)
    p.add_argument("--norm-tol", type=float, default=0.1)
    p.set_defaults(func=cmd_arcsine)

    p = sub.add_parser("lehner", help="free norm inequality audit with random coefficients")
    _add_sampling(p, N=300, trials=1)
    p.add_argument("--coeff-dim", type=int, default=2)
    p.add_argument("--coeff-seed", type=int, default=0)
    p.add_argument("--audits", type=int, default=20)
    p.add_argument("--allowance", type=float, default=0.05)
    p.set_defaults(func=cmd_lehner)

    p = sub.add_parser("cf0-search", help="search for large free/commuting norm ratios")
    _add_sampling(p, N=300, trials=1)
    p.add_argument("--coeff-dim", type=int, default=4)
    p.add_argument("--starts", type=int, default=4)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--slack", type=float, default=0.05)
    p.set_defaults(func=cmd_cf0_search)

    p = sub.add_parser("weyl-verify", help="Weyl compression checks for random Theta pairs")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--max-dist", type=float, default=1.0)
    p.add_argument("--max-theta", type=float, default=1.0,
                   help="bound on ||Theta||; truncation error grows with it")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--phase-tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_weyl_verify)

    p = sub.add_parser("vectors", help="vector system for a pair of Theta files")
    p.add_argument("--theta-file", required=True)
    p.add_argument("--theta-prime-file", required=True)
    p.set_defaults(func=cmd_vectors)

    p = sub.add_parser("mrange-audit", help="level-1 distance against the exponential bound")
    p.add_argument("--pairs", default="0/1:1/2,0/1:1/3", help="comma list of m/n:m'/n'")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--grid", type=float, default=1e-2)
    p.set_defaults(func=cmd_mrange_audit)

    p = sub.add_parser("l1-ball", help="verified inscribed ball of W_1 for a rotation family")
    _add_angle(p, m=0, n=1)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--spacing", type=float, default=0.05)
    p.add_argument("--grid", type=float, default=1e-2)
    p.set_defaults(func=cmd_l1_ball)

    p = sub.add_parser("extend-path", help="Holder extension of a synthetic grid path")
    p.add_argument("--oracle", choices=["random", "power", "unitary", "linear"], default="random")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--C1", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t", default="1/3", help="point in [0, 1], decimal or fraction")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--audit", type=int, default=0, help="also audit this many random grid pairs")
    p.set_defaults(func=cmd_extend_path)
    return parser


def _params(args) -> dict:
    skip = {"func", "output", "csv", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def run_command(argv=None) -> tuple[int, list[ResultRecord]]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), []
    run = Run(args.command, _params(args))
    try:
        args.func(args, run)
    except (DimensionCapError, ResourceCapError) as exc:
        print(f"dilconst: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP, run.records
    except dilation.CertificateError as exc:
        print(f"dilconst: certificate failed: {exc}", file=sys.stderr)
        return EXIT_FAILED, run.records
    except (ValueError, TypeError, OSError) as exc:
        print(f"dilconst: {exc}", file=sys.stderr)
        return EXIT_USAGE, run.records
    code = EXIT_FAILED if run.failed else EXIT_OK
    lines = [r.to_json() for r in run.records]
    for line in lines:
        print(line)
    if args.output:
        with open(args.output, "a") as fh:
            fh.writelines(line + "\n" for line in lines)
    if args.csv:
        Path(args.csv).write_text(csv_rows(run.records))
    return code, run.records


def main(argv=None) -> int:
    code, _ = run_command(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
