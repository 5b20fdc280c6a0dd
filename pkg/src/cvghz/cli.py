"""Command-line front end.

Subcommands::

    cvghz criteria --config experiment.config [--csv out.csv] [--gains ...]
    cvghz sample   --config experiment.config [--csv out.csv] [--seed N]
    cvghz fit      --config targets.config    [--csv out.csv] [--seed N]
    cvghz predict  --config experiment.config [--csv out.csv]

Exit status: 0 when the resulting verdict is fully-inseparable, 2 when it
is undetermined, 1 on any error. All numbers are printed with 6
significant digits and CSV uses a dot decimal separator regardless of
locale.
"""

from __future__ import annotations

import argparse
import sys
from typing import IO, Sequence

import numpy as np

from .config import (
    ConfigError,
    ExperimentConfig,
    SamplingConfig,
    StateConfig,
    emit_config,
    parse_config,
)
from .criteria import (
    FULLY_INSEPARABLE,
    UNDETERMINED,
    GainSet,
    UNIT_GAINS,
    evaluate_criteria,
    momentum_sum,
    noise_db,
    optimal_gain_set,
    x_difference,
)
from .fitting import fit as run_fit_op
from .fitting import predict_targets
from .gaussian import (
    GaussianState,
    check_physicality,
    combination_variance,
    vacuum_reference,
)
from .network import ghz_state
from .sampling import format_combination, measurement_series

__all__ = ["main", "entry"]

_EXIT_BY_VERDICT = {FULLY_INSEPARABLE: 0, UNDETERMINED: 2}


def _fmt(value: float) -> str:
    if value == float("-inf"):
        return "-inf"
    return f"{float(value):.6g}"


def _render_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
    return "\n".join(lines)


def _state_lines(state_config: StateConfig) -> list[str]:
    return [
        "state: r = ({}, {}, {})  efficiency = ({}, {}, {})  phase_sigma = ({}, {}, {})".format(
            *(_fmt(v) for v in state_config.r),
            *(_fmt(v) for v in state_config.efficiency),
            *(_fmt(v) for v in state_config.phase_sigma),
        )
    ]


def _resolve_gains(config: ExperimentConfig, state: GaussianState) -> tuple[GainSet, str]:
    if config.gains_mode == "unit":
        return UNIT_GAINS, "unit"
    if config.gains_mode == "optimal":
        return optimal_gain_set(state), "optimal"
    g1, g2, g3 = config.explicit_gains
    return GainSet(g1, g2, g3), "explicit"


def _criteria_rows(state: GaussianState, gains: GainSet) -> list[list[str]]:
    report = evaluate_criteria(state, gains)
    rows = []
    for k, label in enumerate(("I", "II", "III"), start=1):
        xdiff = x_difference(k)
        psum = momentum_sum(k, gains)
        vx = combination_variance(state, xdiff)
        vp = combination_variance(state, psum)
        rows.append(
            [
                label,
                format_combination(xdiff),
                _fmt(vx),
                _fmt(noise_db(vx, vacuum_reference(xdiff))),
                format_combination(psum),
                _fmt(vp),
                _fmt(noise_db(vp, vacuum_reference(psum))),
                _fmt(report.lhs[k - 1]),
                "yes" if report.violated[k - 1] else "no",
            ]
        )
    return rows


_CRITERIA_HEADER = [
    "ineq",
    "x combination",
    "variance",
    "dB",
    "p combination",
    "variance",
    "dB",
    "lhs",
    "violated",
]


def _criteria_block(state: GaussianState, gains: GainSet, gains_label: str) -> tuple[str, str]:
    report = evaluate_criteria(state, gains)
    text = "\n".join(
        [
            f"gains: {gains_label} (g1 = {_fmt(gains.g1)}, g2 = {_fmt(gains.g2)}, g3 = {_fmt(gains.g3)})",
            "",
            _render_table(_CRITERIA_HEADER, _criteria_rows(state, gains)),
            "",
            f"verdict: {report.verdict}",
        ]
    )
    return text, report.verdict


def _write_criteria_csv(out: IO[str], state: GaussianState, gains: GainSet) -> None:
    report = evaluate_criteria(state, gains)
    out.write(
        "inequality,x_combination,x_variance,x_db,p_combination,p_variance,p_db,lhs,violated,verdict\n"
    )
    for k, label in enumerate(("I", "II", "III"), start=1):
        xdiff, psum = x_difference(k), momentum_sum(k, gains)
        vx = combination_variance(state, xdiff)
        vp = combination_variance(state, psum)
        out.write(
            ",".join(
                [
                    label,
                    format_combination(xdiff),
                    _fmt(vx),
                    _fmt(noise_db(vx, vacuum_reference(xdiff))),
                    format_combination(psum),
                    _fmt(vp),
                    _fmt(noise_db(vp, vacuum_reference(psum))),
                    _fmt(report.lhs[k - 1]),
                    "yes" if report.violated[k - 1] else "no",
                    report.verdict,
                ]
            )
            + "\n"
        )


def _build_state(config: ExperimentConfig) -> GaussianState:
    state = ghz_state(config.state.to_params())
    physical = check_physicality(state)
    if not physical.ok:
        raise ValueError(
            f"configured state is unphysical (min eigenvalue {physical.min_eigenvalue:.3e})"
        )
    return state


def _cmd_criteria(config: ExperimentConfig) -> int:
    state = _build_state(config)
    gains, label = _resolve_gains(config, state)
    text, verdict = _criteria_block(state, gains, label)
    print("\n".join(_state_lines(config.state)))
    print(text)
    if config.csv_path:
        with open(config.csv_path, "w", encoding="utf-8", newline="") as out:
            _write_criteria_csv(out, state, gains)
        print(f"csv written to: {config.csv_path}")
    return _EXIT_BY_VERDICT[verdict]


def _cmd_predict(config: ExperimentConfig) -> int:
    state = _build_state(config)
    predicted = predict_targets(config.state.to_params())
    rows = [[name, _fmt(db)] for name, db in predicted.items()]
    print("\n".join(_state_lines(config.state)))
    print("predicted noise levels (dB relative to the vacuum reference):")
    print(_render_table(["target", "dB"], rows))
    print()
    gains, label = _resolve_gains(config, state)
    text, verdict = _criteria_block(state, gains, label)
    print(text)
    if config.csv_path:
        with open(config.csv_path, "w", encoding="utf-8", newline="") as out:
            out.write("target,db\n")
            for name, db in predicted.items():
                out.write(f"{name},{_fmt(db)}\n")
        print(f"csv written to: {config.csv_path}")
    return _EXIT_BY_VERDICT[verdict]


def _cmd_sample(config: ExperimentConfig) -> int:
    state = _build_state(config)
    gains, label = _resolve_gains(config, state)
    sampling: SamplingConfig = config.sampling

    combos = [x_difference(k) for k in (1, 2, 3)]
    p_slot: dict[int, int] = {}
    for k in (1, 2, 3):
        candidate = momentum_sum(k, gains)
        for i, existing in enumerate(combos):
            if np.array_equal(existing.coeffs, candidate.coeffs):
                p_slot[k] = i
                break
        else:
            combos.append(candidate)
            p_slot[k] = len(combos) - 1

    series = measurement_series(state, combos, sampling.n, sampling.runs, sampling.seed)

    print("\n".join(_state_lines(config.state)))
    print(
        f"sampling: n = {sampling.n} per run, runs = {sampling.runs}, seed = {sampling.seed}, gains: {label}"
    )
    print()
    rows = []
    for i, name in enumerate(series.names):
        ref = vacuum_reference(combos[i])
        rows.append(
            [
                name,
                _fmt(series.mean[i]),
                _fmt(series.sd[i]),
                _fmt(noise_db(series.mean[i], ref)),
            ]
        )
    print(_render_table(["combination", "mean variance", "sd", "dB vs ref"], rows))
    print()

    sums = np.empty((series.runs, 3))
    for k in (1, 2, 3):
        sums[:, k - 1] = series.estimates[:, k - 1] + series.estimates[:, p_slot[k]]
    mean_sums = sums.mean(axis=0)
    sd_sums = sums.std(axis=0, ddof=1)
    violated = mean_sums < 1.0
    verdict = FULLY_INSEPARABLE if violated.sum() >= 2 else UNDETERMINED
    rows = [
        [label_k, _fmt(mean_sums[k]), _fmt(sd_sums[k]), "yes" if violated[k] else "no"]
        for k, label_k in enumerate(("I", "II", "III"))
    ]
    print("inequality sums across runs:")
    print(_render_table(["ineq", "mean lhs", "sd", "violated"], rows))
    print()
    print(f"verdict: {verdict}")

    if config.csv_path:
        with open(config.csv_path, "w", encoding="utf-8", newline="") as out:
            out.write("combination,run,variance,se,db\n")
            for i, name in enumerate(series.names):
                ref = vacuum_reference(combos[i])
                for run in range(series.runs):
                    out.write(
                        ",".join(
                            [
                                name,
                                str(run + 1),
                                _fmt(series.estimates[run, i]),
                                _fmt(series.standard_errors[run, i]),
                                _fmt(noise_db(series.estimates[run, i], ref)),
                            ]
                        )
                        + "\n"
                    )
        print(f"csv written to: {config.csv_path}")
    return _EXIT_BY_VERDICT[verdict]


def _cmd_fit(config: ExperimentConfig) -> int:
    result = run_fit_op(
        config.targets,
        search_space=config.fit.search_space(),
        budget=config.fit.budget,
        seed=config.fit.seed,
    )
    params = result.params
    predicted = predict_targets(params, config.targets)

    print(
        f"fit: {len(config.targets.target_names)} targets, budget = {config.fit.budget}, "
        f"seed = {config.fit.seed}"
    )
    print(f"converged: {'yes' if result.converged else 'no'} (evaluations = {result.evaluations})")
    print(f"residual: {_fmt(result.residual)} dB (root weighted mean square)")
    print()
    rows = [
        [
            name,
            _fmt(config.targets.value(name)),
            _fmt(predicted[name]),
            _fmt(result.per_target_residuals[name]),
            _fmt(config.targets.weights[name]),
        ]
        for name in config.targets.target_names
    ]
    print(_render_table(["target", "measured", "predicted", "residual", "weight"], rows))
    print()
    rows = [
        [
            str(m + 1),
            _fmt((params.r1, params.r2, params.r3)[m]),
            _fmt(params.channel.efficiency[m]),
            _fmt(params.channel.phase_sigma[m]),
        ]
        for m in range(3)
    ]
    print("fitted parameters:")
    print(_render_table(["mode", "squeezing_r", "efficiency", "phase_sigma"], rows))
    print()

    state = ghz_state(params)
    gains, label = _resolve_gains(config, state)
    text, verdict = _criteria_block(state, gains, label)
    print(text)

    fitted = ExperimentConfig(
        state=StateConfig(
            r=(params.r1, params.r2, params.r3),
            efficiency=params.channel.efficiency,
            phase_sigma=params.channel.phase_sigma,
        ),
        gains_mode=config.gains_mode,
        explicit_gains=config.explicit_gains,
        sampling=config.sampling,
    )
    out_path = config.fitted_config_path or "fitted.config"
    with open(out_path, "w", encoding="utf-8", newline="") as out:
        out.write(emit_config(fitted))
    print(f"fitted config written to: {out_path}")

    if config.csv_path:
        with open(config.csv_path, "w", encoding="utf-8", newline="") as out:
            out.write("target,measured_db,predicted_db,residual_db,weight\n")
            for name in config.targets.target_names:
                out.write(
                    ",".join(
                        [
                            name,
                            _fmt(config.targets.value(name)),
                            _fmt(predicted[name]),
                            _fmt(result.per_target_residuals[name]),
                            _fmt(config.targets.weights[name]),
                        ]
                    )
                    + "\n"
                )
        print(f"csv written to: {config.csv_path}")
    return _EXIT_BY_VERDICT[verdict]


_REQUIRED_SECTIONS = {
    "criteria": ("mode1", "mode2", "mode3"),
    "predict": ("mode1", "mode2", "mode3"),
    "sample": ("mode1", "mode2", "mode3", "sampling"),
    "fit": ("targets",),
}

_COMMANDS = {
    "criteria": _cmd_criteria,
    "predict": _cmd_predict,
    "sample": _cmd_sample,
    "fit": _cmd_fit,
}


def _parse_gains_flag(raw: str) -> tuple[str, tuple[float, float, float] | None]:
    if raw in ("unit", "optimal"):
        return raw, None
    parts = raw.split(",")
    if len(parts) != 3:
        raise ValueError("--gains expects 'unit', 'optimal' or three comma-separated values")
    try:
        g1, g2, g3 = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"--gains values must be numbers, got '{raw}'") from None
    return "explicit", (g1, g2, g3)


def _apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    updates = {}
    if args.gains is not None:
        mode, explicit = _parse_gains_flag(args.gains)
        updates["gains_mode"] = mode
        updates["explicit_gains"] = explicit
    if args.seed is not None:
        if config.sampling is not None:
            updates["sampling"] = SamplingConfig(
                n=config.sampling.n, runs=config.sampling.runs, seed=args.seed
            )
        updates["fit"] = type(config.fit)(
            **{**config.fit.__dict__, "seed": args.seed}
        )
    if args.csv is not None:
        updates["csv_path"] = args.csv
    if not updates:
        return config
    merged = {**config.__dict__, **updates}
    return ExperimentConfig(**merged)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvghz",
        description="Simulate a three-mode entangled state and test its full inseparability.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("criteria", "evaluate the three sum-variance inequalities analytically"),
        ("sample", "estimate the inequality variances from seeded homodyne records"),
        ("fit", "fit network parameters to measured dB targets"),
        ("predict", "print the dB noise levels the configured state produces"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the experiment config")
        cmd.add_argument("--csv", default=None, help="also write results as CSV")
        cmd.add_argument("--seed", type=int, default=None, help="override the configured seed")
        cmd.add_argument(
            "--gains",
            default=None,
            help="gain choice: unit, optimal, or g1,g2,g3",
        )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = open(args.config, encoding="utf-8").read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        config = parse_config(text, required_sections=_REQUIRED_SECTIONS[args.command])
        config = _apply_overrides(config, args)
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        for lineno, message in exc.errors:
            where = f"{args.config}:{lineno}" if lineno else args.config
            print(f"error: {where}: {message}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
