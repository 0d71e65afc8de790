"""Command-line front end.

Subcommands:
  walsh     fwht | partial-sums | spectrum
  vp        curve | maximal | weaktype
  blockpoly build | verify | witness
  diverge   plan | certify | membership
  demo      converge | diverge

Exit codes: 0 all requested verifications pass, 1 verification failure,
2 usage/precondition error, 3 budget exceeded.  Artifacts are written
atomically into the configured output directory, each wrapped in the
report envelope.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import blockpoly as bpmod
from . import divergence as dv
from . import vpmeans, walsh
from .config import RunConfig
from .dyadic import DyadicPoint
from .errors import BudgetError, PreconditionError, VerificationError, VpWalshError
from .orlicz import orlicz_from_spec
from .report import make_envelope, write_csv_artifact, write_json_artifact
from .windows import window_from_spec


def _parse_point(text: str) -> DyadicPoint:
    frac = Fraction(text)
    den = frac.denominator
    if den & (den - 1):
        raise PreconditionError(f"point {text} is not dyadic (denominator must be a power of two)")
    if not 0 <= frac < 1:
        raise PreconditionError(f"point {text} must lie in [0, 1)")
    return DyadicPoint(frac.numerator, den.bit_length() - 1)


def _load_grid(path: str, mode: str) -> walsh.GridFunction:
    with open(path, "r", encoding="utf-8") as fh:
        if path.endswith(".csv"):
            return walsh.GridFunction.from_csv(fh.read(), mode)
        obj = json.load(fh)
    if "payload" in obj:
        obj = obj["payload"]
    return walsh.GridFunction.from_json_obj(obj)


def _input_grid(args, config: RunConfig) -> walsh.GridFunction:
    if getattr(args, "input", None):
        return _load_grid(args.input, config.number_mode)
    if getattr(args, "random", None) is not None:
        if args.random > config.max_transform_resolution:
            raise BudgetError(
                f"resolution {args.random} exceeds max_transform_resolution="
                f"{config.max_transform_resolution}"
            )
        return walsh.random_grid(args.random, config.number_mode, config.seed)
    raise PreconditionError("provide --input FILE or --random M")


def _out_path(args, config: RunConfig, default: str) -> str:
    name = getattr(args, "out", None) or default
    if os.path.isabs(name):
        return name
    return os.path.join(config.out_dir, name)


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    return cfg.override(
        number_mode=getattr(args, "number_mode", None),
        seed=getattr(args, "seed", None),
        out_dir=getattr(args, "out_dir", None),
    )


# ---------------------------------------------------------------- walsh --


def _cmd_walsh_fwht(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    if args.bench:
        rows = walsh.fwht_benchmark(args.m_lo, args.m_hi, args.reps, config.seed)
        env = make_envelope(args.command_line, config.override(number_mode="float"), time.perf_counter() - t0)
        path = _out_path(args, config, "fwht_bench.json")
        write_json_artifact(path, env, {"bench": rows})
        print(path)
        return 0
    f = _input_grid(args, config)
    if args.inverse:
        spec = walsh.SpectrumVector.from_coeffs(f.values, f.mode)
        out_obj = walsh.inverse_fwht(spec).to_json_obj()
    else:
        out_obj = walsh.forward_fwht(f).to_json_obj()
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "fwht.json")
    write_json_artifact(path, env, out_obj)
    print(path)
    return 0


def _cmd_walsh_partial_sums(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    f = _input_grid(args, config)
    n_max = args.n_max if args.n_max is not None else (1 << f.resolution)
    rows_mat = walsh.partial_sum_all(f, n_max, args.strategy, config.max_resolution)
    rows = []
    for n, row in enumerate(rows_mat):
        for i, v in enumerate(row):
            rows.append((n, i, walsh._num_to_str(v, f.mode)))
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "partial_sums.csv")
    write_csv_artifact(path, env, ["n", "i", "value"], rows)
    print(path)
    return 0


def _cmd_walsh_spectrum(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    f = _input_grid(args, config)
    spec = sorted(walsh.spectrum(f))
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "spectrum.json")
    write_json_artifact(path, env, {"resolution": f.resolution, "spectrum": spec})
    print(path)
    return 0


# ------------------------------------------------------------------- vp --


def _cmd_vp_curve(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    f = _input_grid(args, config)
    window = window_from_spec(args.window)
    n_max = args.n_max if args.n_max is not None else (1 << f.resolution)
    rows_mat = vpmeans.vp_mean_curve(f, window, n_max, config.max_resolution)
    rows = []
    for n in range(1, n_max + 1):
        for i, v in enumerate(rows_mat[n]):
            rows.append((n, i, walsh._num_to_str(v, f.mode)))
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "vp_curve.csv")
    write_csv_artifact(path, env, ["n", "i", "value"], rows)
    print(path)
    return 0


def _cmd_vp_maximal(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    f = _input_grid(args, config)
    window = window_from_spec(args.window)
    n_max = args.n_max if args.n_max is not None else (1 << f.resolution)
    big = vpmeans.vp_maximal(f, window, n_max, config.max_resolution)
    star = vpmeans.cesaro_maximal(f, n_max, config.max_resolution)
    rows = [
        (i, walsh._num_to_str(a, f.mode), walsh._num_to_str(b, f.mode))
        for i, (a, b) in enumerate(zip(big.values, star.values))
    ]
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "vp_maximal.csv")
    write_csv_artifact(path, env, ["i", "vp_maximal", "cesaro_maximal"], rows)
    print(path)
    return 0


def _cmd_vp_weaktype(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    report = vpmeans.weak_type_experiment(args.count, args.resolution, config.seed)
    cfg = config.override(number_mode="float")
    env = make_envelope(args.command_line, cfg, time.perf_counter() - t0)
    path = _out_path(args, config, "weaktype.csv")
    if args.profile:
        rows = [(repr(t), repr(tm)) for t, tm in report["first_function_profile"]]
        write_csv_artifact(path, env, ["t", "t_measure"], rows)
    else:
        rows = [(i, repr(v)) for i, v in enumerate(report["per_function"])]
        write_csv_artifact(path, env, ["f_index", "weak_type_sup"], rows)
    jpath = _out_path(args, config, "weaktype.json")
    write_json_artifact(jpath, env, {k: v for k, v in report.items() if k != "first_function_profile"})
    print(path)
    print(jpath)
    print(f"empirical weak-type constant: {report['max_constant']:.6g}")
    return 0


# ------------------------------------------------------------ blockpoly --


def _cmd_blockpoly_build(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    bp = bpmod.BlockPolynomial(args.m, args.gamma)
    payload = {
        "log_degree": bp.log_degree,
        "width": bp.width,
        "stride": bp.stride,
        "term_count": bp.term_count,
        "frequencies": bp.frequencies(config.enumerable_width),
    }
    if args.m <= config.max_dense_log_degree:
        grid = bpmod.build(bp, "scaled", config.max_dense_log_degree)
        if args.m <= 16:
            payload["scaled_values"] = [str(v) for v in grid.values]
        payload["scaled_linf"] = str(max(abs(v) for v in grid.values))
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "blockpoly.json")
    write_json_artifact(path, env, payload)
    print(path)
    return 0


def _cmd_blockpoly_verify(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    pairs = []
    if args.all:
        for gamma in range(1, 6):
            for m in range(2 * gamma + 1, 13):
                pairs.append((m, gamma))
    else:
        pairs.append((args.m, args.gamma))
    certs = []
    all_ok = True
    for m, gamma in pairs:
        cert = bpmod.verify_certificate(
            bpmod.BlockPolynomial(m, gamma), config.max_dense_log_degree
        )
        certs.append(cert.to_json_obj())
        all_ok = all_ok and cert.passed
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "block_certificates.json")
    write_json_artifact(path, env, {"passed": all_ok, "certificates": certs})
    print(path)
    print(f"block certificates: {'PASS' if all_ok else 'FAIL'} ({len(certs)} parameter pairs)")
    return 0 if all_ok else 1


def _cmd_blockpoly_witness(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    bp = bpmod.BlockPolynomial(args.m, args.gamma)
    x = _parse_point(args.x)
    w = bpmod.select_order(bp, x)
    payload = {
        "x": str(x),
        "sign": w.sign,
        "agree_bits": sorted(w.agree_bits),
        "block_index": str(w.block_index),
        "order_lo": str(w.order_lo),
        "order_hi": str(w.order_hi),
        "order": str(w.order),
        "scaled_sum_lo": str(w.sum_lo.numerator),
        "scaled_sum_hi": str(w.sum_hi.numerator),
        "width": bp.width,
    }
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "witness.json")
    write_json_artifact(path, env, payload)
    print(path)
    return 0


# -------------------------------------------------------------- diverge --


def _plan_from_args(args, config: RunConfig) -> dv.DivergencePlan:
    if getattr(args, "plan", None):
        with open(args.plan, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        if "payload" in obj:
            obj = obj["payload"]
        return dv.plan_from_json_obj(obj)
    omega = orlicz_from_spec(args.omega)
    window = window_from_spec(getattr(args, "window"))
    margin = Fraction(args.margin) if args.margin else None
    return dv.choose_levels(
        omega,
        window,
        args.mode,
        margin,
        args.levels or 1,
        scan_limit=config.scan_limit,
        bit_budget=config.bit_budget,
        scan_n_budget=config.scan_n_budget,
    )


def _cmd_diverge_plan(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    plan = _plan_from_args(args, config)
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "plan.json")
    write_json_artifact(path, env, plan.to_json_obj())
    print(path)
    for lv in plan.levels:
        print(f"level {lv.index}: width={lv.width} weight={lv.weight} log_degree={lv.log_degree}")
    if plan.size_cap:
        print(f"size cap at level {plan.size_cap['level']}: {plan.size_cap['reason']}")
    return 0


def _cmd_diverge_certify(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    plan = _plan_from_args(args, config)
    trunc = args.levels if args.levels else len(plan.levels)
    cert = dv.certify_divergence(
        plan,
        trunc,
        seed=config.seed,
        exhaustive_resolution=config.exhaustive_resolution,
        sample_count=config.sample_count,
        brute_window=config.brute_window,
        enumerable_width=config.enumerable_width,
    )
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "certificate.json")
    write_json_artifact(path, env, cert.to_json_obj())
    print(path)
    agg = cert.aggregates
    print(
        f"certificates: {'PASS' if cert.passed else 'FAIL'} "
        f"({agg['points']} points x {agg['levels']} levels, "
        f"brute force ran {agg['brute_force_ran']}, matched {agg['brute_force_matched']})"
    )
    return 0 if cert.passed else 1


def _cmd_diverge_membership(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    plan = _plan_from_args(args, config)
    trunc = args.levels if args.levels else len(plan.levels)
    report = dv.membership_report(plan, trunc)
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "membership.json")
    write_json_artifact(path, env, report)
    print(path)
    ok = (
        report["per_term_within_4_pow"]
        and report["bound_below_majorant"]
        and report["majorant_below_third"]
        and report["integral_within_bound"]
    )
    print(f"membership: {'PASS' if ok else 'FAIL'} (bound {report['bound_total']})")
    return 0 if ok else 1


# ----------------------------------------------------------------- demo --


def demo_converge_rows(window_spec: str, degree_log2: int, n_max: int, seed: int):
    """Rows (n, lambda_n, sup_error) for a random polynomial of degree < 2^degree_log2.

    Exact arithmetic: the error column is exactly 0 once the window clears
    the degree.
    """
    window = window_from_spec(window_spec)
    if window.family not in ("proportional", "constant"):
        raise PreconditionError("the convergence demo needs a proportional or constant window")
    M = degree_log2
    f = walsh.random_grid(M, "exact", seed)
    size = 1 << M
    srows = walsh.partial_sum_all(f, size, max_resolution=max(M, 12))
    rows = []
    for n in range(1, n_max + 1):
        lam = window.value(n)
        total = [Fraction(0)] * size
        for k in range(n - lam, n + 1):
            row = srows[min(k, size)]
            total = [t + r for t, r in zip(total, row)]
        err = max(abs(Fraction(t, lam + 1) - v) for t, v in zip(total, f.values))
        rows.append((n, lam, str(err)))
    return rows


def _cmd_demo_converge(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    config = config.override(number_mode="exact")
    rows = demo_converge_rows(args.window, args.degree, args.n_max, config.seed)
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    path = _out_path(args, config, "demo_converge.csv")
    write_csv_artifact(path, env, ["n", "lambda_n", "sup_error"], rows)
    print(path)
    zero_from = next((n for n, _, e in rows if e == "0"), None)
    if zero_from is not None:
        print(f"sup error is exactly 0 from the first full-window order (first zero at n={zero_from})")
    return 0


def _cmd_demo_diverge(args, config: RunConfig) -> int:
    t0 = time.perf_counter()
    omega = orlicz_from_spec("identity")
    window = window_from_spec("root:1/2")
    plan = dv.choose_levels(
        omega,
        window,
        "relaxed",
        Fraction(args.margin),
        args.levels,
        scan_limit=config.scan_limit,
        bit_budget=config.bit_budget,
        scan_n_budget=config.scan_n_budget,
    )
    cert = dv.certify_divergence(
        plan,
        len(plan.levels),
        seed=config.seed,
        exhaustive_resolution=config.exhaustive_resolution,
        sample_count=config.sample_count,
        brute_window=config.brute_window,
        enumerable_width=config.enumerable_width,
    )
    member = dv.membership_report(plan, len(plan.levels))
    env = make_envelope(args.command_line, config, time.perf_counter() - t0)
    write_json_artifact(_out_path(args, config, "demo_plan.json"), env, plan.to_json_obj())
    write_json_artifact(_out_path(args, config, "demo_certificate.json"), env, cert.to_json_obj())
    write_json_artifact(_out_path(args, config, "demo_membership.json"), env, member)
    agg = cert.aggregates
    print(f"plan: widths {[lv.width for lv in plan.levels]}, degrees {[lv.log_degree for lv in plan.levels]}")
    print(
        f"certificates: {'PASS' if cert.passed else 'FAIL'} at {agg['points']} points; "
        f"brute force matched {agg['brute_force_matched']}/{agg['brute_force_ran']}"
    )
    member_ok = member["integral_within_bound"] and member["majorant_below_third"]
    print(f"membership: {'PASS' if member_ok else 'FAIL'} (bound {member['bound_total']} < 1/3)")
    return 0 if (cert.passed and member_ok) else 1


# ---------------------------------------------------------------- parser --


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vpwalsh", description=__doc__)
    p.add_argument("--config", help="JSON config file (RunConfig fields)")
    p.add_argument("--number-mode", dest="number_mode", choices=["exact", "float"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    sub = p.add_subparsers(dest="group", required=True)

    w = sub.add_parser("walsh", help="transforms and partial sums").add_subparsers(
        dest="cmd", required=True
    )
    q = w.add_parser("fwht", help="forward or inverse fast transform")
    q.add_argument("--input")
    q.add_argument("--random", type=int, metavar="M")
    q.add_argument("--inverse", action="store_true")
    q.add_argument("--bench", action="store_true")
    q.add_argument("--m-lo", type=int, default=16)
    q.add_argument("--m-hi", type=int, default=22)
    q.add_argument("--reps", type=int, default=3)
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_walsh_fwht)
    q = w.add_parser("partial-sums", help="full partial-sum matrix")
    q.add_argument("--input")
    q.add_argument("--random", type=int, metavar="M")
    q.add_argument("--n-max", type=int)
    q.add_argument("--strategy", choices=["incremental", "transform"], default="incremental")
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_walsh_partial_sums)
    q = w.add_parser("spectrum", help="support of the coefficient vector")
    q.add_argument("--input")
    q.add_argument("--random", type=int, metavar="M")
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_walsh_spectrum)

    v = sub.add_parser("vp", help="de la Vallee Poussin means").add_subparsers(
        dest="cmd", required=True
    )
    q = v.add_parser("curve", help="V_n at every cell for n up to n-max")
    q.add_argument("--input")
    q.add_argument("--random", type=int, metavar="M")
    q.add_argument("--window", required=True)
    q.add_argument("--n-max", type=int)
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_vp_curve)
    q = v.add_parser("maximal", help="maximal VP and Cesaro operators")
    q.add_argument("--input")
    q.add_argument("--random", type=int, metavar="M")
    q.add_argument("--window", required=True)
    q.add_argument("--n-max", type=int)
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_vp_maximal)
    q = v.add_parser("weaktype", help="empirical weak-type constant")
    q.add_argument("--count", type=int, default=100)
    q.add_argument("--resolution", type=int, default=12)
    q.add_argument("--profile", action="store_true", help="emit (t, t*measure) rows")
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_vp_weaktype)

    b = sub.add_parser("blockpoly", help="block polynomials").add_subparsers(
        dest="cmd", required=True
    )
    q = b.add_parser("build", help="dense values and frequency facts")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--gamma", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_blockpoly_build)
    q = b.add_parser("verify", help="run the exact certificate")
    q.add_argument("--m", type=int)
    q.add_argument("--gamma", type=int)
    q.add_argument("--all", action="store_true", help="the full small-parameter sweep")
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_blockpoly_verify)
    q = b.add_parser("witness", help="order witness at one point")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--gamma", type=int, required=True)
    q.add_argument("--x", required=True, help="dyadic point, e.g. 3/8")
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_blockpoly_witness)

    d = sub.add_parser("diverge", help="divergence plans and certificates").add_subparsers(
        dest="cmd", required=True
    )

    def _plan_flags(q):
        q.add_argument("--plan", help="existing plan JSON")
        q.add_argument("--omega", default="identity")
        q.add_argument("--lambda", dest="window", default="root:1/2")
        q.add_argument("--mode", choices=["strict", "relaxed"], default="strict")
        q.add_argument("--margin", help="relaxed-mode margin, e.g. 1/4")
        q.add_argument("--levels", type=int)
        q.add_argument("--out")

    q = d.add_parser("plan", help="choose widths, weights, and degrees")
    _plan_flags(q)
    q.set_defaults(handler=_cmd_diverge_plan)
    q = d.add_parser("certify", help="pointwise divergence certificates")
    _plan_flags(q)
    q.set_defaults(handler=_cmd_diverge_certify)
    q = d.add_parser("membership", help="Orlicz membership accounting")
    _plan_flags(q)
    q.set_defaults(handler=_cmd_diverge_membership)

    m = sub.add_parser("demo", help="end-to-end demonstrations").add_subparsers(
        dest="cmd", required=True
    )
    q = m.add_parser("converge", help="sup-norm error of VP means on a polynomial")
    q.add_argument("--window", default="prop:1/2")
    q.add_argument("--degree", type=int, default=8, help="log2 of the degree bound")
    q.add_argument("--n-max", type=int, default=1024)
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_demo_converge)
    q = m.add_parser("diverge", help="relaxed plan + certificates + membership")
    q.add_argument(
        "--margin",
        default="1/32",
        help="width-choice margin; 1/32 keeps both levels small enough for "
        "brute-force cross-checks at every sample point",
    )
    q.add_argument("--levels", type=int, default=2)
    q.add_argument("--out")
    q.set_defaults(handler=_cmd_demo_diverge)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    command_line = list(argv) if argv is not None else sys.argv[1:]
    args = parser.parse_args(argv)
    args.command_line = command_line
    try:
        config = _config_from_args(args)
        return args.handler(args, config)
    except (PreconditionError,) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        print(json.dumps({"verification_failure": str(exc)}), file=sys.stdout)
        return 1
    except VpWalshError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
