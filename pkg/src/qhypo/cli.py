"""Command-line interface.

Exit codes: 0 success, 1 I/O error, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .bounds import fig2_bundle
from .errors import NumericalError, ValidationError
from .estimation import GaussianFamily, ParametrizedScenario, fisher_information
from .model import TwoLevelParams, build_two_level
from .scenario import Scenario, load_scenario, time_grid, write_csv
from .spectral import convergence_rate, scan_rate_over_rabi
from .trajectories import EnsembleConfig, build_augmented, run_ensemble
from .twosided import solve_two_sided

log = logging.getLogger("qhypo")

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3

# reproduce grids (part of the CLI contract)
FIG2_RABI = 4.0
FIG2_TIMES = np.linspace(0.0, 5.0, 500)
FIG3_DELTAS = (0.5, 1.0, 1.5, 2.0, 2.5)
FIG3_OMEGAS = np.linspace(0.01, 1.5, 150)

FAMILIES = ("two_level_rabi", "two_level_detuning", "gaussian")


def _grid(args, scn: Scenario) -> np.ndarray:
    t_max = args.t_max if args.t_max is not None else scn.t_max
    steps = args.steps if args.steps is not None else scn.steps
    if t_max is None or steps is None:
        raise ValidationError("time grid missing: pass --t-max/--steps or add 'time' to the scenario")
    return time_grid(t_max, steps)


def cmd_discriminate(args) -> None:
    scn = load_scenario(args.scenario)
    curve = solve_two_sided(scn.pair, _grid(args, scn))
    rows = [
        (t, a.real, a.imag, pe) for t, a, pe in zip(curve.times, curve.overlaps, curve.pe_min)
    ]
    write_csv(args.out, ("t", "re_overlap", "im_overlap", "pe_min"), rows)


def cmd_trajectories(args) -> None:
    scn = load_scenario(args.scenario)
    t = _grid(args, scn)
    cfg = EnsembleConfig(args.n, args.seed, args.dt)
    est = run_ensemble(build_augmented(scn.pair), t, cfg)
    exact = solve_two_sided(scn.pair, t).overlaps
    rows = [
        (ti, m.real, m.imag, se, e.real, e.imag)
        for ti, m, se, e in zip(t, est.mean_overlap, est.std_err, exact)
    ]
    write_csv(args.out, ("t", "re_mean", "im_mean", "std_err", "re_exact", "im_exact"), rows)


def cmd_spectrum(args) -> None:
    scn = load_scenario(args.scenario)
    res = convergence_rate(scn.pair)
    order = np.lexsort((res.eigenvalues.imag, res.eigenvalues.real))
    rows = [(lam.real, lam.imag) for lam in res.eigenvalues[order]]
    write_csv(args.out, ("re_lambda", "im_lambda"), rows)
    log.info("convergence rate %.12g (%d zero modes)", res.rate, res.zero_modes)


def cmd_fisher(args) -> None:
    if args.family == "two_level_rabi":
        fam = ParametrizedScenario(
            lambda th: build_two_level(TwoLevelParams(th, args.delta, args.kappa)), args.t
        )
    elif args.family == "two_level_detuning":
        fam = ParametrizedScenario(
            lambda th: build_two_level(TwoLevelParams(args.rabi, th, args.kappa)), args.t
        )
    elif args.family == "gaussian":
        fam = GaussianFamily(args.k, args.t)
    else:
        raise ValidationError(f"unknown family {args.family!r}")
    if args.t < 0:
        raise ValidationError("--t must be non-negative")
    fr = fisher_information(fam, args.theta, args.h)
    write_csv(
        args.out,
        ("theta", "t", "fisher", "crb", "h", "richardson_error"),
        [(fr.theta, fr.t, fr.fisher, fr.crb, fr.step_h, fr.richardson_error_estimate)],
    )


def cmd_reproduce(args) -> None:
    out = Path(args.out)
    if args.target == "fig2":
        b = fig2_bundle(FIG2_RABI, 1.0, FIG2_TIMES)
        rows = list(zip(b.times, b.pe_min, b.pe_counting, b.pe_counting_atom, b.pe_helstrom))
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "fig2.csv", ("t", "pe_min", "pe_counting", "pe_counting_atom", "pe_helstrom"), rows)
    else:
        scans = [scan_rate_over_rabi(d, FIG3_OMEGAS) for d in FIG3_DELTAS]
        out.mkdir(parents=True, exist_ok=True)
        for s in scans:
            write_csv(out / f"fig3_delta_{s.detuning:g}.csv", ("omega", "rate"), zip(s.omegas, s.rates))
        write_csv(
            out / "fig3_summary.csv",
            ("delta", "argmax_omega", "max_rate"),
            [(s.detuning, s.argmax_omega, s.max_rate) for s in scans],
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhypo",
        description="Limits on discriminating candidate dynamics of open quantum systems.",
        epilog="Environment: QHYPO_THREADS caps internal parallelism.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_flags(p):
        p.add_argument("--t-max", type=float, help="final time kappa*t (overrides the scenario)")
        p.add_argument("--steps", type=int, help="number of time intervals (overrides the scenario)")

    p = sub.add_parser("discriminate", help="overlap and minimal error vs time (t, re_overlap, im_overlap, pe_min)")
    p.add_argument("--scenario", required=True)
    grid_flags(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser(
        "reproduce",
        help="reference figure data as CSV",
        description=(
            "fig2: fig2.csv with t, pe_min, pe_counting, pe_counting_atom, pe_helstrom "
            "for Omega0=0 vs Omega1=4 kappa on 500 points of kappa*t in [0, 5]. "
            "fig3: fig3_delta_<d>.csv (omega, rate) for d in 0.5,1,1.5,2,2.5 on 150 points "
            "of Omega in [0.01, 1.5] kappa, plus fig3_summary.csv (delta, argmax_omega, max_rate)."
        ),
    )
    p.add_argument("target", choices=("fig2", "fig3"))
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("trajectories", help="Monte Carlo wavefunction estimate vs exact overlap")
    p.add_argument("--scenario", required=True)
    grid_flags(p)
    p.add_argument("--n", type=int, default=1000, help="number of trajectories")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=1e-3, help="jump step (grid spacing must be a multiple)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_trajectories)

    p = sub.add_parser("fisher", help="Fisher information and Cramer-Rao bound")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--t", type=float, required=True, help="probing time")
    p.add_argument("--h", type=float, default=1e-3, help="finite-difference step")
    p.add_argument("--kappa", type=float, default=1.0, help="decay rate (two-level families)")
    p.add_argument("--delta", type=float, default=0.0, help="detuning (two_level_rabi)")
    p.add_argument("--rabi", type=float, default=1.0, help="Rabi frequency (two_level_detuning)")
    p.add_argument("--k", type=float, default=1.0, help="probe strength (gaussian)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fisher)

    p = sub.add_parser("spectrum", help="eigenvalues of the vectorized two-sided generator")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="qhypo: %(message)s",
    )
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"qhypo: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"qhypo: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"qhypo: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
