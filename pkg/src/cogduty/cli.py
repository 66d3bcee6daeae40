"""Command-line front end.

Subcommands: eval, optimize, sweep, simulate, validate, figures-data.
Every output CSV starts with `# key = value` comment lines carrying the
fully resolved configuration and the package version, then the header row.

Column orders are fixed:
    perfect sweep/optimize/eval:
        alpha,objective,rate_s,rate_p,p_free,t_free,p_busy,t_busy,p_ss,mu
    soft sweep/optimize/eval (S thresholds):
        alpha,objective,rate_s,rate_p,thr_1..thr_S,p_1..p_{S+1},t_1..t_{S+1},p_ss,mu
    validate: quantity,analytic,simulated,std_err,z
    simulate: quantity,value,std_err

Exit status: 0 success, 2 configuration errors, 3 numeric or validation
failures (including any |z| > 3 in `validate`).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, parse_config, resolve_config
from .numerics import ConvergenceError
from .optimizer import optimize_perfect, optimize_soft, sweep_alpha
from .sensing import ThresholdSet
from .simulator import simulate, validate_policy
from .throughput import PerfectPolicy, PolicyEvaluation, SoftPolicy, evaluate

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _config_flags(parser: argparse.ArgumentParser):
    g = parser.add_argument_group("experiment configuration")
    g.add_argument("--preset", choices=["channel_a", "channel_b", "tiny_gsp", "custom"])
    g.add_argument("--config", type=Path, help="flat key=value config file")
    for key, help_text in (
        ("t_on", "mean on duration"),
        ("t_off", "mean off duration"),
        ("t_s", "sensing duration"),
        ("r0", "primary rate in nats"),
        ("sigma2_s", "secondary receiver noise variance"),
        ("sigma2_p", "primary receiver noise variance"),
        ("p_p", "primary transmit power"),
        ("p_max", "secondary power cap"),
        ("g_ss", "mean secondary-secondary gain"),
        ("g_pp", "mean primary-primary gain"),
        ("g_ps", "mean primary-secondary gain"),
        ("g_sp", "mean secondary-primary gain"),
        ("gamma0", "soft metric noncentrality"),
        ("t_cap", "transmission time upper bound"),
        ("sensing_lag", "simulator window offset from the sensing instant"),
    ):
        g.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float, help=help_text)
    for key in (
        "power_points",
        "time_points",
        "threshold_points",
        "refine_rounds",
        "max_grid_evals",
        "cycles",
        "seed",
        "replicas",
    ):
        g.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int)
    g.add_argument(
        "--credit-sensing-primary",
        dest="credit_sensing_primary",
        action="store_const",
        const=True,
        default=None,
    )


def _policy_flags(parser: argparse.ArgumentParser):
    g = parser.add_argument_group("policy")
    g.add_argument("--mode", choices=["perfect", "soft"], required=True)
    g.add_argument("--p-free", type=float)
    g.add_argument("--t-free", type=float)
    g.add_argument("--p-busy", type=float)
    g.add_argument("--t-busy", type=float)
    g.add_argument("--thresholds", type=float, nargs="+")
    g.add_argument("--powers", type=float, nargs="+")
    g.add_argument("--durations", type=float, nargs="+")


def _resolve(args) -> ExperimentConfig:
    file_values = parse_config(args.config) if args.config else {}
    override_keys = (
        "t_on t_off t_s r0 sigma2_s sigma2_p p_p p_max g_ss g_pp g_ps g_sp gamma0 t_cap "
        "power_points time_points threshold_points refine_rounds max_grid_evals "
        "cycles seed replicas sensing_lag credit_sensing_primary"
    ).split()
    overrides = {k: getattr(args, k, None) for k in override_keys}
    return resolve_config(args.preset, file_values, overrides)


def _build_policy(args, config: ExperimentConfig):
    if args.mode == "perfect":
        values = [args.p_free, args.t_free, args.p_busy, args.t_busy]
        if any(v is None for v in values):
            raise ConfigError("perfect policies need --p-free --t-free --p-busy --t-busy")
        return PerfectPolicy(*values), None
    if args.thresholds is None or args.powers is None or args.durations is None:
        raise ConfigError("soft policies need --thresholds, --powers and --durations")
    try:
        policy = SoftPolicy(ThresholdSet(args.thresholds), args.powers, args.durations)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return policy, config.metric()


def _parse_alphas(spec: str) -> list[float]:
    """`start:end:step` inclusive of both ends, or a comma-separated list."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--alphas expects start:end:step, got {spec!r}")
        start, end, step = (float(p) for p in parts)
        if step <= 0 or end < start:
            raise ConfigError(f"--alphas range is empty: {spec!r}")
        n = int(round((end - start) / step))
        values = [round(start + i * step, 12) for i in range(n + 1)]
        if values[-1] > end + 1e-12:
            values.pop()
        return values
    return [float(p) for p in spec.split(",")]


def _header_lines(config: ExperimentConfig, extra: dict | None = None) -> list[str]:
    lines = [f"# cogduty_version = {__version__}"]
    for key, value in config.items():
        lines.append(f"# {key} = {value}")
    if config.overridden:
        lines.append(f"# overridden = {','.join(config.overridden)}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key} = {value}")
    return lines


def _write_csv(path, header_lines, columns, rows):
    buf = io.StringIO()
    for line in header_lines:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_csv(path):
    """Read back an emitted CSV: (header dict, column names, rows as floats/str)."""
    meta = {}
    rows = []
    columns = None
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                if "=" in line:
                    key, value = line[1:].split("=", 1)
                    meta[key.strip()] = value.strip()
                continue
            if columns is None:
                columns = line.split(",")
                continue
            if line:
                rows.append(line.split(","))
    return meta, columns, rows


def _policy_columns(policy) -> tuple[list[str], list[float]]:
    if isinstance(policy, PerfectPolicy):
        return (
            ["p_free", "t_free", "p_busy", "t_busy"],
            [policy.p_free, policy.t_free, policy.p_busy, policy.t_busy],
        )
    s = len(policy.thresholds.thresholds)
    cols = (
        [f"thr_{k}" for k in range(1, s + 1)]
        + [f"p_{k}" for k in range(1, s + 2)]
        + [f"t_{k}" for k in range(1, s + 2)]
    )
    vals = list(policy.thresholds.thresholds) + list(policy.powers) + list(policy.durations)
    return cols, vals


def _result_row(alpha: float, ev: PolicyEvaluation, policy):
    cols, vals = _policy_columns(policy)
    columns = ["alpha", "objective", "rate_s", "rate_p"] + cols + ["p_ss", "mu"]
    row = [
        f"{alpha:.10g}",
        f"{ev.objective:.12g}",
        f"{ev.rate_secondary:.12g}",
        f"{ev.rate_primary:.12g}",
        *(f"{v:.12g}" for v in vals),
        f"{ev.p_ss:.12g}",
        f"{ev.mean_cycle:.12g}",
    ]
    return columns, row


def _cmd_eval(args) -> int:
    config = _resolve(args)
    policy, metric = _build_policy(args, config)
    ev = evaluate(config.traffic(), config.link(), config.t_s, args.alpha, policy, metric)
    columns, row = _result_row(args.alpha, ev, policy)
    _write_csv(args.out, _header_lines(config, {"command": "eval"}), columns, [row])
    print(
        f"eval: objective={ev.objective:.6f} rate_s={ev.rate_secondary:.6f} "
        f"rate_p={ev.rate_primary:.6f} p_ss={ev.p_ss:.6f} mu={ev.mean_cycle:.6f}"
    )
    return 0


def _cmd_optimize(args) -> int:
    config = _resolve(args)
    traffic, link = config.traffic(), config.link()
    if args.mode == "perfect":
        res = optimize_perfect(traffic, link, config.t_s, args.alpha, config.grid())
    else:
        res = optimize_soft(
            traffic, link, config.metric(), config.t_s, args.alpha, args.s_levels, config.grid()
        )
    columns, row = _result_row(args.alpha, res.evaluation, res.best_policy)
    extra = {"command": "optimize", "evaluations": res.evaluations_count}
    _write_csv(args.out, _header_lines(config, extra), columns, [row])
    print(
        f"optimize[{args.mode}] alpha={args.alpha:g}: objective={res.evaluation.objective:.6f} "
        f"({res.evaluations_count} evaluations)"
    )
    return 0


def _cmd_sweep(args) -> int:
    config = _resolve(args)
    traffic, link = config.traffic(), config.link()
    alphas = _parse_alphas(args.alphas)
    metric = config.metric() if args.mode == "soft" else None
    results = sweep_alpha(
        args.mode,
        alphas,
        traffic,
        link,
        config.t_s,
        config.grid(),
        metric=metric,
        s_levels=args.s_levels,
    )
    columns = None
    rows = []
    for alpha, res in zip(alphas, results):
        cols, row = _result_row(alpha, res.evaluation, res.best_policy)
        columns = columns or cols
        rows.append(row)
    extra = {"command": "sweep", "mode": args.mode, "s_levels": args.s_levels}
    _write_csv(args.out, _header_lines(config, extra), columns, rows)
    print(f"sweep[{args.mode}] wrote {len(rows)} rows to {args.out or 'stdout'}")
    return 0


def _cmd_simulate(args) -> int:
    config = _resolve(args)
    policy, metric = _build_policy(args, config)
    report = simulate(
        config.traffic(), config.link(), config.t_s, policy, metric, config.sim()
    )
    columns = ["quantity", "value", "std_err"]
    rows = [
        ["rate_s", f"{report.rate_secondary_mean:.12g}", f"{report.rate_secondary_se:.12g}"],
        ["rate_p", f"{report.rate_primary_mean:.12g}", f"{report.rate_primary_se:.12g}"],
        ["p_ss", f"{report.p_ss_empirical:.12g}", ""],
        ["mu", f"{report.mean_cycle_empirical:.12g}", ""],
    ]
    _write_csv(args.out, _header_lines(config, {"command": "simulate"}), columns, rows)
    print(
        f"simulate: rate_s={report.rate_secondary_mean:.6f}±{report.rate_secondary_se:.6f} "
        f"rate_p={report.rate_primary_mean:.6f}±{report.rate_primary_se:.6f} "
        f"({report.cycles_run} cycles)"
    )
    return 0


def _cmd_validate(args) -> int:
    config = _resolve(args)
    policy, metric = _build_policy(args, config)
    record = validate_policy(
        config.traffic(),
        config.link(),
        config.t_s,
        policy,
        metric,
        cycles=config.cycles,
        seed=config.seed,
        replicas=config.replicas,
        sensing_lag=config.sensing_lag,
    )
    columns = ["quantity", "analytic", "simulated", "std_err", "z"]
    rows = [
        [r.quantity, f"{r.analytic:.12g}", f"{r.simulated:.12g}", f"{r.std_err:.12g}", f"{r.z:.6g}"]
        for r in record.rows
    ]
    _write_csv(args.out, _header_lines(config, {"command": "validate"}), columns, rows)
    worst = max(abs(r.z) for r in record.rows)
    if record.flagged:
        print(f"validate: FAILED flags={','.join(record.flagged)} worst |z|={worst:.2f}")
        return EXIT_NUMERIC
    print(f"validate: ok, worst |z|={worst:.2f} over {record.report.cycles_run} cycles")
    return 0


def _cmd_figures_data(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [
        ("sweep_perfect_a.csv", "perfect", "channel_a", None, 1),
        ("sweep_perfect_b.csv", "perfect", "channel_b", None, 1),
        ("sweep_soft_b_g3_s1.csv", "soft", "channel_b", 3.0, 1),
        ("sweep_soft_b_g10_s1.csv", "soft", "channel_b", 10.0, 1),
        ("sweep_soft_b_g3_s2.csv", "soft", "channel_b", 3.0, 2),
    ]
    for name, mode, preset, gamma0, s_levels in jobs:
        sub_args = argparse.Namespace(**vars(args))
        sub_args.mode = mode
        sub_args.preset = preset
        sub_args.s_levels = s_levels
        if gamma0 is not None:
            sub_args.gamma0 = gamma0
        sub_args.out = out_dir / name
        _cmd_sweep(sub_args)
    print(f"figures-data: wrote {len(jobs)} sweep files to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogduty",
        description="Secondary power/duration control over an unslotted on/off primary channel",
    )
    parser.add_argument("--version", action="version", version=f"cogduty {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one policy analytically")
    _config_flags(p_eval)
    _policy_flags(p_eval)
    p_eval.add_argument("--alpha", type=float, required=True)
    p_eval.add_argument("--out", type=Path)
    p_eval.set_defaults(func=_cmd_eval)

    p_opt = sub.add_parser("optimize", help="grid-search the best policy for one alpha")
    _config_flags(p_opt)
    p_opt.add_argument("--mode", choices=["perfect", "soft"], required=True)
    p_opt.add_argument("--alpha", type=float, required=True)
    p_opt.add_argument("--s-levels", type=int, default=1, help="threshold count for soft mode")
    p_opt.add_argument("--out", type=Path)
    p_opt.set_defaults(func=_cmd_optimize)

    p_sweep = sub.add_parser("sweep", help="optimize across a range of alphas")
    _config_flags(p_sweep)
    p_sweep.add_argument("--mode", choices=["perfect", "soft"], required=True)
    p_sweep.add_argument("--alphas", required=True, help="start:end:step or comma list")
    p_sweep.add_argument("--s-levels", type=int, default=1)
    p_sweep.add_argument("--out", type=Path)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_sim = sub.add_parser("simulate", help="Monte Carlo one policy")
    _config_flags(p_sim)
    _policy_flags(p_sim)
    p_sim.add_argument("--out", type=Path)
    p_sim.set_defaults(func=_cmd_simulate)

    p_val = sub.add_parser("validate", help="compare analytic and simulated quantities")
    _config_flags(p_val)
    _policy_flags(p_val)
    p_val.add_argument("--out", type=Path)
    p_val.set_defaults(func=_cmd_validate)

    p_fig = sub.add_parser("figures-data", help="write the standard sweep CSVs for plotting")
    _config_flags(p_fig)
    p_fig.add_argument("--alphas", default="0:1:0.05")
    p_fig.add_argument("--out-dir", type=Path, required=True)
    p_fig.set_defaults(func=_cmd_figures_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
