"""Command-line front end.

Subcommands: ``simulate`` (window-count experiment, writes counts.csv +
summary.csv + summary.json), ``density`` (tabulate exact projection
densities as CSV), ``condition`` (pair-separation condition sum), ``df``
(Kolmogorov-Smirnov distance of projections to the standard normal) and
``parity`` (even-count fraction at level 0 on a symmetric window).

Exit codes: 0 success, 1 invalid input, 2 numeric failure (singular Gram
matrix or an enumeration guard).  Reruns with identical flags reproduce
byte-identical CSV payloads.
"""

from __future__ import annotations

import argparse
import sys

from . import conditions, density, directions, experiments, point_configs
from .errors import EnumerationGuardError, InvalidInputError, SingularGramError
from .window_counting import WindowSpec


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the documented contract is exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cube", type=int, metavar="D",
                   help="sign cube {±1/√D}^D with 2^D points")
    g.add_argument("--dup-basis", metavar="D,DELTA",
                   help="standard basis plus floor(DELTA*D) duplicated vectors")
    g.add_argument("--random", metavar="N,D,SEED",
                   help="N uniform random points on S^{D-1}")
    g.add_argument("--points", metavar="PATH", help="plain-text point file")
    p.add_argument("--norm-tolerance", type=float,
                   default=point_configs.STRICT_NORM_TOL,
                   help="allowed | |x|-1 | for loaded points (default strict)")


def _build_config(args) -> point_configs.PointConfig:
    if args.cube is not None:
        return point_configs.cube(args.cube)
    if args.dup_basis is not None:
        return point_configs.make_config(f"dup-basis:{args.dup_basis}")
    if args.random is not None:
        return point_configs.make_config(f"random:{args.random}")
    return point_configs.load_points(args.points, norm_tolerance=args.norm_tolerance)


def _config_descriptor(args) -> str:
    if args.cube is not None:
        return f"cube:{args.cube}"
    if args.dup_basis is not None:
        return f"dup-basis:{args.dup_basis}"
    if args.random is not None:
        return f"random:{args.random}"
    return f"points:{args.points}"


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["uniform", "bernoulli", "perturbed"],
                   default="uniform", help="direction model (default uniform)")
    p.add_argument("--eps-max", type=float, default=0.1,
                   help="perturbed model: eps_i ~ U[0, eps-max] (default 0.1)")
    p.add_argument("--eps-seed", type=int, default=0,
                   help="perturbed model: seed for the frozen eps vector")
    p.add_argument("--eps-file", metavar="PATH",
                   help="perturbed model: load eps from a single-row vector file")


def _build_model(args, d: int) -> directions.DirectionModel:
    if args.model == "uniform":
        return directions.uniform_sphere()
    if args.model == "bernoulli":
        return directions.bernoulli()
    if args.eps_file:
        eps = point_configs.load_vector(args.eps_file)
    else:
        eps = directions.random_perturbation(d, args.eps_max, args.eps_seed)
    return directions.perturbed_bernoulli(eps)


def _model_descriptor(args) -> str:
    if args.model == "perturbed":
        if args.eps_file:
            return f"perturbed:file={args.eps_file}"
        return f"perturbed:eps_max={args.eps_max:.17g}:eps_seed={args.eps_seed}"
    return args.model


def _parse_window(text: str) -> tuple[float, float]:
    try:
        lo_s, hi_s = text.split(",")
        return float(lo_s), float(hi_s)
    except ValueError as exc:
        raise InvalidInputError(f"--window expects 'lo,hi', got {text!r}") from exc


def _csv_out(lines: list[str], out: str | None) -> None:
    payload = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _cmd_simulate(args) -> int:
    cfg = _build_config(args)
    model = _build_model(args, cfg.d)
    lo, hi = _parse_window(args.window)
    win = WindowSpec(level=args.a, lo=lo, hi=hi)
    result = experiments.run_point_process_experiment(
        cfg, model, win, m=args.samples, K=args.kmax,
        master_seed=args.seed, workers=args.workers)
    echo = {"config": _config_descriptor(args), "model": _model_descriptor(args),
            "a": args.a, "lo": lo, "hi": hi}
    experiments.write_experiment_csv(result, args.out, echo)
    return 0


def _cmd_density(args) -> int:
    h1 = [float(t) for t in args.h.split(",")]
    lines = []
    if args.k == 1:
        lines.append("h,density")
        for h in h1:
            lines.append(f"{_fmt(h)},{_fmt(density.finite_d_intensity(h, args.d))}")
    else:
        M = density.pair_correlation(args.rho)
        h2 = [float(t) for t in args.h2.split(",")] if args.h2 else [0.0]
        lines.append("h1,h2,density")
        for a in h1:
            for b in h2:
                v = density.joint_density(M, [a, b], args.d).value
                lines.append(f"{_fmt(a)},{_fmt(b)},{_fmt(v)}")
    _csv_out(lines, args.out)
    return 0


def _cmd_condition(args) -> int:
    if args.cube is not None and not args.brute_force:
        report = conditions.condition_sum_cube(args.cube, args.eps,
                                               exclude_antipodal=args.exclude_antipodal)
    else:
        cfg = _build_config(args)
        if args.pair_samples:
            report = conditions.condition_sum_sampled(cfg, args.eps,
                                                      args.pair_samples, args.seed)
        else:
            report = conditions.condition_sum_exact(cfg, args.eps)
    se = report.standard_error
    lines = [
        "n,epsilon,total,antipodal_part,ratio,exact,se",
        ",".join([str(report.n), _fmt(report.epsilon), _fmt(report.total),
                  _fmt(report.antipodal_part), _fmt(report.ratio),
                  str(report.exact).lower(), _fmt(se) if se is not None else ""]),
    ]
    _csv_out(lines, args.out)
    return 0


def _cmd_df(args) -> int:
    cfg = _build_config(args)
    model = _build_model(args, cfg.d)
    stat = experiments.df_ks(cfg, model, args.sample_size, args.seed)
    lines = [
        "config,n,d,sample_size,ks,seed",
        ",".join([_config_descriptor(args), str(cfg.n), str(cfg.d),
                  str(args.sample_size), _fmt(stat), str(args.seed)]),
    ]
    _csv_out(lines, args.out)
    return 0


def _cmd_parity(args) -> int:
    cfg = _build_config(args)
    model = _build_model(args, cfg.d)
    w = args.half_width
    win = WindowSpec(level=0.0, lo=-w, hi=w)
    result = experiments.run_point_process_experiment(
        cfg, model, win, m=args.samples, K=1,
        master_seed=args.seed, workers=args.workers)
    lines = [
        "config,model,half_width,m,even_fraction,seed",
        ",".join([_config_descriptor(args), _model_descriptor(args), _fmt(w),
                  str(result.m), _fmt(result.even_fraction), str(args.seed)]),
    ]
    _csv_out(lines, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sphereproj",
                     description="Window statistics of random sphere projections")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], help="run a window-count experiment")
    _add_config_flags(p)
    _add_model_flags(p)
    p.add_argument("--a", type=float, required=True, help="window level")
    p.add_argument("--window", required=True, metavar="LO,HI",
                   help="rescaled half-open interval [LO, HI)")
    p.add_argument("--samples", type=int, required=True, help="direction samples m")
    p.add_argument("--kmax", type=int, default=4, help="max factorial-moment order (default 4)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", default=".", help="output directory (default .)")
    p.add_argument("--workers", type=int, default=1,
                   help="worker processes; never changes the output bytes")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("density", help="tabulate exact projection densities")
    p.add_argument("--d", type=int, required=True, help="sphere dimension")
    p.add_argument("--k", type=int, default=1, choices=[1, 2], help="number of points")
    p.add_argument("--h", required=True, metavar="H1,H2,...",
                   help="comma-separated evaluation abscissas")
    p.add_argument("--h2", metavar="H1,H2,...",
                   help="k=2: second-coordinate values (default 0)")
    p.add_argument("--rho", type=float, default=0.0,
                   help="k=2: inner product of the two points (default 0)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("condition", help="pair-separation condition sum")
    _add_config_flags(p)
    p.add_argument("--eps", type=float, required=True, help="threshold in (0,1)")
    p.add_argument("--exclude-antipodal", action="store_true",
                   help="cube closed form: drop the |<x,y>| = 1 class")
    p.add_argument("--brute-force", action="store_true",
                   help="cube: enumerate pairs instead of the closed form")
    p.add_argument("--pair-samples", type=int,
                   help="estimate from this many sampled pairs instead of enumerating")
    p.add_argument("--seed", type=int, default=0, help="seed for pair sampling")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_condition)

    p = sub.add_parser("df", help="KS distance of projections to the standard normal")
    _add_config_flags(p)
    _add_model_flags(p)
    p.add_argument("--sample-size", type=int, required=True,
                   help="vertices to project (>= n uses every point once)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_df)

    p = sub.add_parser("parity", help="even-count fraction at level 0, symmetric window")
    _add_config_flags(p)
    _add_model_flags(p)
    p.add_argument("--half-width", type=float, default=1.0,
                   help="window is [-HALF_WIDTH, HALF_WIDTH) (default 1)")
    p.add_argument("--samples", type=int, required=True, help="direction samples m")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--workers", type=int, default=1,
                   help="worker processes; never changes the output bytes")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_parity)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"sphereproj: invalid input: {exc}", file=sys.stderr)
        return 1
    except (SingularGramError, EnumerationGuardError) as exc:
        print(f"sphereproj: numeric failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"sphereproj: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    entrypoint()
