"""Command-line interface.

Every subcommand prints one unit-annotated table (CSV by default, JSON
with ``--format json``) to stdout or ``--out``.  ``experiment`` produces
several tables and therefore writes files into an output directory.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
non-convergence, 3 physics-domain condition (e.g. the configuration
cannot lase at the requested point).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __about__
from .configio import config_digest, resolve_config, save_config
from .dynamics import ac_response, step_response
from .errors import (ConvergenceError, InvalidConfigError, LtmagError,
                     PhysicsDomainError)
from .experiments import EXPERIMENT_NAMES, experiment
from .model import (b_field_to_detuning, derive_constants,
                    detuning_to_b_field, output_power, PRESET_NAMES)
from .sensitivity import (AcSignalModel, METHOD_AC_QUASISTATIC,
                          METHOD_AC_TIME, ac_sensitivity, dc_sensitivity,
                          dc_sensitivity_curve, optimize_sensitivity,
                          _param_value)
from .steady import find_operating_point, solve_steady_state
from .sweeps import SweepAxis, SweepSpec, run_sweep
from .tables import Column, OutputTable


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems with exit code 2; ours is 1."""

    def error(self, message):
        raise InvalidConfigError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("configuration")
    group.add_argument("--preset", choices=PRESET_NAMES,
                       help="named device configuration "
                            "(default: baseline)")
    group.add_argument("--config", metavar="PATH",
                       help="config file (.ini/.cfg or .json); "
                            "mutually exclusive with --preset")
    group.add_argument("--set", action="append", default=[],
                       metavar="SECTION.FIELD=VALUE", dest="overrides",
                       help="override one config value (repeatable)")
    out = parser.add_argument_group("output")
    out.add_argument("--out", metavar="PATH",
                     help="write the result table here instead of stdout")
    out.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="output format (default csv)")


def _config_from(args) -> "ModelConfig":
    return resolve_config(args.preset, args.config, args.overrides)


def _emit(table: OutputTable, args) -> None:
    text = table.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)


def _provenance(args, config) -> dict[str, str]:
    prov = {"config_digest": config_digest(config)[:12],
            "generator": f"ltmag {__about__.__version__}"}
    if args.preset:
        prov["preset"] = args.preset
    return prov


def _cmd_steady_state(args) -> int:
    config = _config_from(args)
    if args.b_field is not None and args.delta is not None:
        raise InvalidConfigError("give either --delta or --b-field")
    if args.b_field is not None:
        from .model import with_bias_field
        config = with_bias_field(config, args.b_field)
    elif args.delta is not None:
        from .model import with_drive
        config = with_drive(config, delta=args.delta)
    ss = solve_steady_state(config)
    d = derive_constants(config)
    cols = [Column("delta", "rad/s"), Column("b_field", "T"),
            Column("n", "1"), Column("P_out", "W"), Column("branch", ""),
            Column("net_gain", "rad/s"), Column("residual", "1")]
    pops = ss.aligned
    cols += [Column(name, "1") for name in
             ("rho11", "rho22", "rho33", "rho44", "rho55", "rho66",
              "rho77", "rho14_re", "rho14_im")]
    row = (config.drive.delta,
           detuning_to_b_field(config.drive.delta, config.constants),
           ss.n, output_power(ss.n, config, d), ss.branch, ss.net_gain,
           ss.residual, *pops.as_array().tolist())
    _emit(OutputTable(columns=tuple(cols), rows=[row],
                      provenance=_provenance(args, config)), args)
    return 0


def _parse_axis(text: str) -> SweepAxis:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise InvalidConfigError(
            f"axis {text!r} must be path:start:stop:points[:log]")
    scale = "linear"
    if len(parts) == 5:
        scale = parts[4]
    try:
        return SweepAxis(path=parts[0], start=float(parts[1]),
                         stop=float(parts[2]), points=int(parts[3]),
                         scale=scale)
    except ValueError as exc:
        raise InvalidConfigError(f"bad axis {text!r}: {exc}") from exc


def _cmd_sweep(args) -> int:
    config = _config_from(args)
    axis1 = _parse_axis(args.axis1)
    axis2 = _parse_axis(args.axis2) if args.axis2 else None
    outputs = tuple(s.strip() for s in args.outputs.split(",") if s.strip())
    spec = SweepSpec(axis1=axis1, axis2=axis2, outputs=outputs)
    table = run_sweep(config, spec, parallel=not args.serial,
                      provenance=_provenance(args, config))
    _emit(table, args)
    return 0


def _cmd_response(args) -> int:
    config = _config_from(args)
    res = step_response(config, args.delta_before, args.delta_after,
                        seed_n=args.seed_n)
    if args.timeseries:
        with open(args.timeseries, "w", encoding="utf-8") as fp:
            fp.write(res.series.to_csv(config))
    table = OutputTable(
        columns=(Column("delta_before", "rad/s"),
                 Column("delta_after", "rad/s"), Column("seed_n", "1"),
                 Column("n_initial", "1"), Column("n_final", "1"),
                 Column("t_63", "s"), Column("t_90", "s"),
                 Column("settled", "")),
        rows=[(res.delta_before, res.delta_after, res.seed_n,
               res.n_initial, res.n_final, res.t_63, res.t_90,
               "true" if res.settled else "false")],
        provenance=_provenance(args, config))
    _emit(table, args)
    return 0


def _cmd_ac(args) -> int:
    config = _config_from(args)
    hr = ac_response(config, args.bias, args.amplitude, args.omega,
                     periods=args.periods,
                     samples_per_period=args.samples_per_period)
    table = OutputTable(
        columns=(Column("omega", "rad/s"), Column("bias_field", "T"),
                 Column("amplitude_field", "T"), Column("n_mean", "1"),
                 Column("n_signal", "1"), Column("phase", "rad"),
                 Column("distortion", "1"),
                 Column("transient_time", "s")),
        rows=[(hr.omega_signal, hr.bias_field, hr.amplitude_field,
               hr.n_mean, hr.n_signal, hr.phase, hr.distortion,
               hr.transient_time)],
        provenance=_provenance(args, config))
    _emit(table, args)
    return 0


_SENS_COLUMNS = (Column("b_field", "T"), Column("n", "1"),
                 Column("dn_dB", "1/T"), Column("eta", "T/sqrt(Hz)"),
                 Column("diverged", ""), Column("method", ""))


def _sens_row(res) -> tuple:
    return (res.b_field, res.n, res.slope_dn_db, res.eta,
            "true" if res.diverged else "false", res.method)


def _cmd_sensitivity_dc(args) -> int:
    config = _config_from(args)
    if (args.b_field is None) == (args.b_grid is None):
        raise InvalidConfigError("give exactly one of --b-field/--b-grid")
    table = OutputTable(columns=_SENS_COLUMNS,
                        provenance=_provenance(args, config))
    if args.b_field is not None:
        table.append(_sens_row(dc_sensitivity(config, args.b_field)))
    else:
        parts = args.b_grid.split(":")
        if len(parts) != 3:
            raise InvalidConfigError("--b-grid must be lo:hi:points")
        grid = np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
        for b, res in zip(grid, dc_sensitivity_curve(config, grid)):
            if res is None:
                table.append((float(b), None, None, None, None, None))
            else:
                table.append(_sens_row(res))
    _emit(table, args)
    return 0


def _cmd_sensitivity_ac(args) -> int:
    config = _config_from(args)
    signal = AcSignalModel(bias_field=args.bias,
                           amplitude_field=args.amplitude,
                           omega_signal=args.omega,
                           excess_noise=args.excess_noise)
    res = ac_sensitivity(config, signal, method=args.method)
    table = OutputTable(
        columns=_SENS_COLUMNS + (Column("omega", "rad/s"),
                                 Column("n_signal", "1")),
        rows=[_sens_row(res) + (res.omega_signal, res.n_signal)],
        provenance=_provenance(args, config))
    _emit(table, args)
    return 0


def _cmd_operating_point(args) -> int:
    config = _config_from(args)
    pump = find_operating_point(config, omega=args.omega)
    omega = args.omega if args.omega is not None else config.drive.omega
    table = OutputTable(
        columns=(Column("omega", "rad/s"), Column("pump", "rad/s")),
        rows=[(omega, pump)], provenance=_provenance(args, config))
    _emit(table, args)
    return 0


def _cmd_optimize(args) -> int:
    config = _config_from(args)
    vary = tuple(s.strip() for s in args.vary.split(",") if s.strip())
    outcome = optimize_sensitivity(
        config, vary=vary, bounds_decades=args.bounds_decades,
        b_window=(args.b_min, args.b_max),
        max_evaluations=args.max_evaluations)
    cols = [Column("start_eta", "T/sqrt(Hz)"),
            Column("best_eta", "T/sqrt(Hz)"), Column("best_b_field", "T"),
            Column("evaluations", "1"), Column("converged", "")]
    row = [outcome.start_eta, outcome.eta, outcome.b_field,
           outcome.evaluations, "true" if outcome.converged else "false"]
    for name in outcome.varied:
        cols.append(Column(f"best_{name}", "rad/s"))
        row.append(_param_value(outcome.config, name))
    table = OutputTable(columns=tuple(cols), rows=[tuple(row)],
                        provenance=_provenance(args, config))
    _emit(table, args)
    if args.save_config:
        save_config(outcome.config, args.save_config)
    return 0


def _cmd_experiment(args) -> int:
    if args.preset or args.config:
        tables = experiment(args.name, config=_config_from(args))
    else:
        # fall back to the experiment's own preset, overrides still apply
        tables = experiment(args.name, overrides=args.overrides)
    return _emit_experiment(tables, args)


def _emit_experiment(tables, args) -> int:
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for key, table in tables.items():
            path = os.path.join(args.out,
                                f"{args.name}_{key}.{args.format}")
            with open(path, "w", encoding="utf-8") as fp:
                fp.write(table.render(args.format))
            print(path)
    else:
        for key, table in tables.items():
            sys.stdout.write(f"## {key}\n")
            sys.stdout.write(table.render(args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ltmag",
                     description="laser threshold magnetometer simulator")
    parser.add_argument("--version", action="version",
                        version=f"ltmag {__about__.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady-state",
                       help="self-consistent photon number and populations")
    _add_common(p)
    p.add_argument("--delta", type=float, help="detuning override (rad/s)")
    p.add_argument("--b-field", type=float,
                   help="bias field override (T)")
    p.set_defaults(func=_cmd_steady_state)

    p = sub.add_parser("sweep", help="grid over one or two config paths")
    _add_common(p)
    p.add_argument("--axis1", required=True,
                   metavar="PATH:START:STOP:POINTS[:log]")
    p.add_argument("--axis2", metavar="PATH:START:STOP:POINTS[:log]")
    p.add_argument("--outputs", default="n,P_out",
                   help="comma list of n,P_out,branch,net_gain,"
                        "populations,eta_dc")
    p.add_argument("--serial", action="store_true",
                   help="disable parallel evaluation")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("response", help="photon response to a detuning step")
    _add_common(p)
    p.add_argument("--delta-before", type=float, required=True)
    p.add_argument("--delta-after", type=float, required=True)
    p.add_argument("--seed-n", type=float, default=None,
                   help="photon seed for dark starts (default 1e-6)")
    p.add_argument("--timeseries", metavar="PATH",
                   help="also write the sampled trajectory as CSV")
    p.set_defaults(func=_cmd_response)

    p = sub.add_parser("ac", help="demodulated response to a test field")
    _add_common(p)
    p.add_argument("--bias", type=float, required=True, help="T")
    p.add_argument("--amplitude", type=float, required=True, help="T")
    p.add_argument("--omega", type=float, required=True, help="rad/s")
    p.add_argument("--periods", type=int, default=10)
    p.add_argument("--samples-per-period", type=int, default=64)
    p.set_defaults(func=_cmd_ac)

    p = sub.add_parser("sensitivity-dc",
                       help="shot-noise d.c. field sensitivity")
    _add_common(p)
    p.add_argument("--b-field", type=float, help="T")
    p.add_argument("--b-grid", metavar="LO:HI:POINTS",
                   help="curve over a field range (T)")
    p.set_defaults(func=_cmd_sensitivity_dc)

    p = sub.add_parser("sensitivity-ac",
                       help="sensitivity to a sinusoidal test field")
    _add_common(p)
    p.add_argument("--bias", type=float, required=True, help="T")
    p.add_argument("--amplitude", type=float, required=True, help="T")
    p.add_argument("--omega", type=float, required=True, help="rad/s")
    p.add_argument("--method", default=METHOD_AC_TIME,
                   choices=(METHOD_AC_TIME, METHOD_AC_QUASISTATIC))
    p.add_argument("--excess-noise", type=float, default=2.43)
    p.set_defaults(func=_cmd_sensitivity_ac)

    p = sub.add_parser("operating-point",
                       help="pump that parks the resonant system at "
                            "threshold")
    _add_common(p)
    p.add_argument("--omega", type=float, default=None,
                   help="Rabi rate override (rad/s)")
    p.set_defaults(func=_cmd_operating_point)

    p = sub.add_parser("optimize",
                       help="minimize sensitivity over device knobs")
    _add_common(p)
    p.add_argument("--vary", default="kappa,pump,omega",
                   help="comma list of kappa,pump,omega")
    p.add_argument("--bounds-decades", type=float, default=1.0)
    p.add_argument("--b-min", type=float, default=0.0)
    p.add_argument("--b-max", type=float, default=300e-6)
    p.add_argument("--max-evaluations", type=int, default=200)
    p.add_argument("--save-config", metavar="PATH",
                   help="write the optimized config to a file")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("experiment", help="run a pre-registered study")
    _add_common(p)
    p.add_argument("--name", required=True, choices=EXPERIMENT_NAMES)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InvalidConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"error: did not converge: {exc}", file=sys.stderr)
        return 2
    except PhysicsDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except LtmagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
