"""Command-line entry points: simulate, sweep, verify-linear, predict, identities, selftest.

Exit codes: 0 on success, 1 when a verification check fails, 2 on
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .forcing import ForcingSpec
from .grid import l2_norm, make_grid, Field
from .harness import (
    ConfigError,
    InsufficientHorizonError,
    linear_suite,
    load_config,
    persist,
    run_scenario,
    sweep,
    theorem_suite,
)
from .linearized import assemble_Lc, dual_basis, kernel_residuals
from .modulation import (
    K_matrix,
    energy_diagnostics,
    extract,
    modulation_rhs,
    predict_c_limit,
    predictors,
)
from .soliton import phi, phi_field, soliton_invariants, zeta
from .solver import SolverConfig, identity_monitor, simulate
from .weights import WeightSchedule, q_bound_constant, schedule_weights

_PROFILE_ALIASES = {
    "exp-decay": "exp_decay",
    "exp_decay": "exp_decay",
    "const": "const",
    "zero": "zero",
}


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _print_checks(checks: dict) -> bool:
    all_ok = True
    for name, entry in checks.items():
        passed = entry.get("passed")
        value = entry.get("value")
        if passed is None:
            print(f"  --    {name}: {value:.6g} (reported, no threshold)")
            continue
        all_ok = all_ok and passed
        bound = entry.get("threshold", entry.get("window"))
        print(f"  {_status(passed)}  {name}: {value:.6g} (bound {bound})")
    return all_ok


def _cmd_simulate(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        track = run_scenario(config)
        report = theorem_suite(config, track)
    except InsufficientHorizonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = persist(track, report, args.output)
    print(f"run '{config.label}': {track.times.size} records to t = {track.times[-1]:g}")
    print(f"  c(0) = {track.c[0]:.10g}   c(T) = {track.c[-1]:.10g}   "
          f"ratio = {track.c[-1] / track.c[0]:.10g}")
    ok = _print_checks(report.checks)
    print(f"artifacts in {out}")
    return 0 if ok else 1


def _cmd_sweep(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    epsilons = [float(v) for v in args.epsilons.split(",")] if args.epsilons else None
    ps = [float(v) for v in args.ps.split(",")] if args.ps else None
    result = sweep(config, epsilons=epsilons, ps=ps, out_root=args.output,
                   max_workers=args.workers)
    print(f"{'label':>16} {'epsilon':>10} {'p':>6} {'sup|c-c_ap|':>13} "
          f"{'sup|xi-xi_ap|':>14}")
    for row in result["rows"]:
        print(f"{row['label']:>16} {row['epsilon']:>10.3g} {row['p']:>6.3g} "
              f"{row['amplitude_gap_sup']:>13.4e} {row['phase_gap_sup']:>14.4e}")
    ok = all(row["passed"] for row in result["rows"])
    if result["slopes"]:
        for key in ("amplitude_gap_sup", "phase_gap_sup"):
            slope = result["slopes"].get(key)
            if slope is not None:
                good = slope >= args.slope_min
                ok = ok and good
                print(f"  {_status(good)}  log-log slope of {key} vs epsilon: "
                      f"{slope:.3f} (needs >= {args.slope_min})")
        extra = result["slopes"].get("sup_h1w_winf")
        if extra is not None:
            print(f"  --    log-log slope of sup_h1w_winf vs epsilon: {extra:.3f}")
    return 0 if ok else 1


def _cmd_verify_linear(args) -> int:
    result = linear_suite(c=args.c, w=args.w, num_points=args.points,
                          spectrum_half_length=args.spectrum_box,
                          smoothing_half_length=args.smoothing_box)
    ok = _print_checks(result["checks"])
    diag = result["diagnostics"]
    print(f"  essential edge: {diag['essential_edge']:.6g}; projector defect "
          f"{diag['projector_idempotency']:.2e}; commutator {diag['commutator_norm']:.2e}")
    return 0 if ok else 1


def _cmd_predict(args) -> int:
    profile = _PROFILE_ALIASES.get(args.f)
    if profile is None:
        print(f"unknown forcing profile {args.f!r}; choose from "
              f"{sorted(set(_PROFILE_ALIASES))}", file=sys.stderr)
        return 2
    forcing = ForcingSpec(epsilon=args.epsilon, E=args.E, profile=profile)
    if args.t.strip() == "inf":
        print("%.12g" % predict_c_limit(forcing, args.c0))
        return 0
    try:
        times = np.array([float(v) for v in args.t.split(",")])
    except ValueError:
        print(f"--t must be 'inf' or comma-separated numbers, got {args.t!r}",
              file=sys.stderr)
        return 2
    if np.any(times < 0) or not np.all(np.diff(times) > 0):
        print("--t values must be nonnegative and increasing", file=sys.stderr)
        return 2
    c_ap, xi_ap = predictors(forcing, args.c0, args.xi0, times)
    print(f"{'t':>12} {'c_ap':>16} {'xi_ap':>16}")
    for t, c, xi in zip(times, c_ap, xi_ap):
        print(f"{t:>12.6g} {c:>16.10g} {xi:>16.10g}")
    return 0


def _cmd_identities(args) -> int:
    grid = make_grid(args.box, args.points)
    profile = _PROFILE_ALIASES.get(args.f)
    if profile is None:
        print(f"unknown forcing profile {args.f!r}", file=sys.stderr)
        return 2
    forcing = ForcingSpec(epsilon=args.epsilon, E=args.E, profile=profile)
    u0 = phi_field(grid, args.c0)
    config = SolverConfig(dt=args.dt, record_every=args.record_every)
    traj = simulate(u0, args.T, forcing, config)
    monitor = identity_monitor(traj)
    thresholds = {
        "n_law_rel": 1e-7,
        "momentum_law_rel": 1e-7,
        "h_identity_rel": 1e-4,
        "e2_identity_rel": 1e-4,
    }
    ok = True
    for key, value in monitor.items():
        bound = thresholds.get(key)
        if bound is None:
            print(f"  --    {key}: {value:.6g}")
        else:
            good = value <= bound
            ok = ok and good
            print(f"  {_status(good)}  {key}: {value:.6g} (bound {bound:g})")
    return 0 if ok else 1


def _cmd_selftest(args) -> int:
    failures = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        suffix = f" — {detail}" if detail else ""
        print(f"{_status(bool(ok))}  {name}{suffix}")
        if not ok:
            failures.append(name)

    grid = make_grid(30.0, 512)
    x = grid.nodes
    c = 1.3

    from .grid import derivative, inner_product, parseval_coefficient_norm_sq

    rng = np.random.default_rng(7)
    coeffs = rng.standard_normal(8)
    vals = sum(a * np.cos((i + 1) * np.pi * x / 30.0) for i, a in enumerate(coeffs))
    f = Field(grid, vals)
    parseval = abs(parseval_coefficient_norm_sq(f) - l2_norm(f) ** 2)
    check("grid: Parseval identity", parseval < 1e-10, f"defect {parseval:.2e}")

    phi_g = Field(grid, phi(c, x))
    profile_residual = l2_norm(
        Field(grid, derivative(phi_g, 2).values - c * phi_g.values + phi_g.values ** 2)
    )
    check("soliton: profile equation", profile_residual < 1e-8,
          f"residual {profile_residual:.2e}")

    pairing = inner_product(phi_g, Field(grid, zeta(c, x)))
    check("soliton: <phi, zeta> = 9", abs(pairing - 9.0) < 1e-10,
          f"got {pairing:.12g}")
    inv = soliton_invariants(c)
    mass = inner_product(phi_g, phi_g)
    check("soliton: ||phi||^2 = 6 c^{3/2}", abs(mass - inv.N) < 1e-10,
          f"defect {abs(mass - inv.N):.2e}")

    zero = Field(grid, np.zeros(grid.num_points))
    K0 = K_matrix(zero, c)
    expected = np.array([[9.0 * c ** 1.5, 0.0], [9.0, -4.5 * np.sqrt(c)]])
    kdef = float(np.max(np.abs(K0 - expected)))
    check("modulation: K(0) closed form", kdef < 1e-10, f"defect {kdef:.2e}")

    forcing = ForcingSpec(1e-2, 0.75 * np.log(2.0), "exp_decay")
    a_t, o_t = modulation_rhs(0.0, zero, 1.0, forcing, c)
    coeff = forcing.term(0.0)
    rate_def = max(abs(a_t + (2.0 / 3.0) * coeff),
                   abs(o_t - (2.0 / 3.0) * coeff / np.sqrt(c)))
    check("modulation: v = 0 reduction rates", rate_def < 1e-10,
          f"defect {rate_def:.2e}")

    bump = Field(grid, phi(c, x) + 1e-3 * np.exp(-((x - 1.0) ** 2)))
    res = extract(bump)
    diag = energy_diagnostics(Field(grid, bump.values), res.c, res.xi)
    check("energy: two routes to J agree", diag.J_gap < 1e-9,
          f"gap {diag.J_gap:.2e}")

    quiet = ForcingSpec(0.0, 1.0, "zero")
    cfg = SolverConfig(dt=2e-3, record_every=1000)
    traj = simulate(phi_field(grid, 1.0), 2.0, quiet, cfg)
    err = l2_norm(Field(grid, traj.snapshots[-1].values
                        - phi_field(grid, 1.0, 2.0).values)) / np.sqrt(6.0)
    check("solver: unforced transport", err < 1e-8, f"error {err:.2e}")

    cfg2 = SolverConfig(dt=2.5e-3, record_every=200)
    traj2 = simulate(phi_field(grid, 1.0), 5.0, forcing, cfg2)
    model = traj2.N[0] * np.exp(
        2.0 * forcing.E * np.asarray(forcing.F(forcing.gamma * traj2.times))
    )
    n_rel = float(np.max(np.abs(traj2.N - model)) / np.max(model))
    check("solver: L2 growth law", n_rel < 1e-7, f"rel defect {n_rel:.2e}")

    schedule = WeightSchedule(w=0.3, w_min=0.3 / 9.0, w_inf=0.1, gamma=0.019)
    pair0 = schedule_weights(schedule, 0.0)
    pair_inf = schedule_weights(schedule, 1e6)
    sched_ok = (abs(pair0.minus - schedule.w_min) < 1e-12
                and abs(pair0.plus - schedule.w) < 1e-12
                and abs(pair_inf.minus - schedule.w_inf) < 1e-9
                and abs(pair_inf.plus - schedule.w_inf) < 1e-9)
    check("weights: schedule limits", sched_ok)
    consts = [q_bound_constant(schedule, t, 2.5) for t in (1.0, 10.0, 100.0)]
    ratio = max(consts) / min(consts)
    check("weights: q bound constant stable", ratio < 2.0, f"spread {ratio:.3f}")

    small = make_grid(40.0, 256)
    L0 = assemble_Lc(1.0, small)
    resid = kernel_residuals(L0)
    check("linearized: kernel relations",
          max(resid["kernel"], resid["jordan"]) < 1e-8,
          f"kernel {resid['kernel']:.2e}, jordan {resid['jordan']:.2e}")

    basis = dual_basis(1.0, small)
    from .soliton import dphi_dc, dphi_dx

    gram_expected = np.array([
        [inner_product(Field(small, dphi_dx(1.0, small.nodes)), basis.eta1),
         inner_product(Field(small, dphi_dx(1.0, small.nodes)), basis.eta2)],
        [inner_product(Field(small, dphi_dc(1.0, small.nodes)), basis.eta1),
         inner_product(Field(small, dphi_dc(1.0, small.nodes)), basis.eta2)],
    ])
    bio = float(np.max(np.abs(gram_expected - np.eye(2))))
    check("linearized: dual basis biorthogonal", bio < 1e-10, f"defect {bio:.2e}")

    print(f"{len(failures)} failure(s)" if failures else "all selftests passed")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fkdv",
        description="Forced KdV soliton simulator and verification harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configured scenario")
    p_sim.add_argument("--config", required=True, help="TOML configuration file")
    p_sim.add_argument("--output", default=None, help="output directory")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="grid over epsilon and/or p")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--epsilons", default=None,
                         help="comma-separated epsilon values")
    p_sweep.add_argument("--ps", default=None, help="comma-separated p values")
    p_sweep.add_argument("--output", default=None)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--slope-min", type=float, default=0.8)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_lin = sub.add_parser("verify-linear", help="linear-operator suite")
    p_lin.add_argument("--c", type=float, default=1.0)
    p_lin.add_argument("--w", type=float, default=0.25)
    p_lin.add_argument("--points", type=int, default=512)
    p_lin.add_argument("--spectrum-box", type=float, default=64.0)
    p_lin.add_argument("--smoothing-box", type=float, default=25.0)
    p_lin.set_defaults(func=_cmd_verify_linear)

    p_pred = sub.add_parser("predict", help="closed-form amplitude/phase predictors")
    p_pred.add_argument("--f", default="exp-decay", help="forcing profile")
    p_pred.add_argument("--E", type=float, required=True)
    p_pred.add_argument("--c0", type=float, default=1.0)
    p_pred.add_argument("--xi0", type=float, default=0.0)
    p_pred.add_argument("--epsilon", type=float, default=1e-2)
    p_pred.add_argument("--t", required=True,
                        help="'inf' or comma-separated times")
    p_pred.set_defaults(func=_cmd_predict)

    p_id = sub.add_parser("identities", help="conserved-quantity evolution monitors")
    p_id.add_argument("--epsilon", type=float, default=1e-2)
    p_id.add_argument("--E", type=float, default=0.75 * float(np.log(2.0)))
    p_id.add_argument("--f", default="exp-decay")
    p_id.add_argument("--c0", type=float, default=1.0)
    p_id.add_argument("--box", type=float, default=30.0)
    p_id.add_argument("--points", type=int, default=512)
    p_id.add_argument("--dt", type=float, default=1e-3)
    p_id.add_argument("--T", type=float, default=5.0)
    p_id.add_argument("--record-every", type=int, default=50)
    p_id.set_defaults(func=_cmd_identities)

    p_self = sub.add_parser("selftest", help="quick self-contained battery")
    p_self.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
