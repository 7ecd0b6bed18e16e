"""Command-line front end: sweeps, Monte Carlo runs, gate checks, scaling comparison.

Every command writes plain CSV with ``#``-prefixed header comments carrying
the schema version, the tool version, the RNG identifier where randomness is
involved, and the full resolved configuration, so each output file is
self-describing and reruns are byte-identical.

Exit codes: 0 success, 2 usage/configuration parse error, 3 infeasible
configuration, 4 nonconvergence (partial results were still written),
5 validation failure.
"""
from __future__ import annotations

import argparse
import hashlib
import math
import sys

import numpy as np

from . import __version__
from .distributions import AcceptanceWindow, OutcomeModel, PulseConfig, mixture_cdf
from .gate import CORRECTION_TABLE, TwoAtomState, cnot_protocol, cnot_truth_output
from .optimizer import (
    InfeasibleError,
    Mode,
    MonotonicityError,
    OptimizationProblem,
    UnitaryComparisonParams,
    finesse_requirement,
    fit_measurement_scaling,
    optimize,
    sweep_curve,
    unitary_scheme_error,
)
from .protocol import RNG_ALGORITHM, ProtocolConfig, histogram, run_protocol

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NONCONVERGED = 4
EXIT_VALIDATION = 5

SCHEMA_VERSION = 1


def _fmt(value) -> str:
    """Full-precision, round-trippable cell formatting."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part)


def _float_pair(text: str) -> tuple[float, float]:
    parts = _float_list(text)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return parts[0], parts[1]


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


class _Command:
    """One subcommand: its parser plus the dest -> converter map for config files.

    Required values are validated after the config file merges in, so they
    may come from either the command line or the file.
    """

    def __init__(self, subparsers, name: str, help_text: str):
        self.parser = subparsers.add_parser(name, help=help_text)
        self.converters: dict[str, object] = {}
        self.required: list[str] = []
        self.add("--config", type=str, default=None, help="flat key=value file; flags override it")
        self.add("--output", type=str, help="output CSV path")
        self.required.append("output")

    def add(self, flag: str, required: bool = False, **kwargs):
        action = self.parser.add_argument(flag, **kwargs)
        if kwargs.get("action") == "store_true":
            self.converters[action.dest] = _parse_bool
        else:
            self.converters[action.dest] = kwargs.get("type", str)
        if required:
            self.required.append(action.dest)
        return action

    def check_required(self, args: argparse.Namespace) -> None:
        missing = [dest for dest in self.required if getattr(args, dest, None) is None]
        if missing:
            flags = ", ".join("--" + dest.replace("_", "-") for dest in missing)
            raise ValueError(f"missing required settings for {self.parser.prog}: {flags}")


def _apply_config_file(args: argparse.Namespace, path: str, converters: dict, argv: list[str]) -> None:
    """Overlay config-file values onto settings not given explicitly on the command line."""
    explicit = {token.split("=", 1)[0] for token in argv if token.startswith("--")}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in converters:
                raise ValueError(f"{path}:{lineno}: unknown configuration key {key!r}")
            if "--" + key.replace("_", "-") in explicit:
                continue
            convert = converters[key] or str
            setattr(args, key, convert(value.strip()))


def _resolved_config_items(args: argparse.Namespace) -> list[tuple[str, str]]:
    skip = {"command", "func", "config"}
    items = []
    for key in sorted(vars(args)):
        if key in skip:
            continue
        value = getattr(args, key)
        if isinstance(value, (tuple, list)):
            value = ",".join(_fmt(v) for v in value)
        items.append((key, _fmt(value)))
    return items


def _header_lines(args: argparse.Namespace, command: str, extra: list[str] | None = None) -> list[str]:
    lines = [
        f"# schema={SCHEMA_VERSION}",
        f"# tool=cavityqnd {command}",
        f"# version={__version__}",
    ]
    lines.extend(extra or [])
    config = " ".join(f"{k}={v}" for k, v in _resolved_config_items(args))
    lines.append(f"# config: {config}")
    return lines


def _write_sections(path: str, header: list[str], sections) -> None:
    """sections: iterable of (name_or_None, columns, rows, trailing_comments)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in header:
            handle.write(line + "\n")
        for name, columns, rows, comments in sections:
            if name is not None:
                handle.write(f"# section={name}\n")
            handle.write(",".join(columns) + "\n")
            for row in rows:
                handle.write(",".join(_fmt(cell) for cell in row) + "\n")
            for comment in comments:
                handle.write(comment + "\n")


def _cmd_curve(args: argparse.Namespace) -> int:
    if args.cmin <= 0 or args.cmax <= args.cmin or args.points < 2:
        raise InfeasibleError("need 0 < cmin < cmax and at least two points")
    cs = np.geomspace(args.cmin, args.cmax, args.points)
    curves: list[tuple[float, Mode]] = [(ps, Mode.SINGLE_SHOT) for ps in args.ps]
    if args.repeated_bound:
        curves.append((args.bound_ps, Mode.REPEATED_BOUND))

    rows = []
    all_converged = True
    for ps, mode in curves:
        results = sweep_curve(cs, ps, mode)
        for result in results:
            all_converged &= result.converged
            rows.append(
                [
                    result.problem.cooperativity,
                    ps,
                    mode.value,
                    result.theta_opt,
                    result.x_a_opt,
                    result.x_b_opt,
                    result.error,
                    result.converged,
                ]
            )
    columns = ["cooperativity", "target_ps", "mode", "theta_opt", "x_a", "x_b", "error", "converged"]
    _write_sections(args.output, _header_lines(args, "curve"), [(None, columns, rows, [])])
    return EXIT_OK if all_converged else EXIT_NONCONVERGED


def _protocol_config(args: argparse.Namespace) -> ProtocolConfig:
    pulse = PulseConfig(theta=args.theta, cooperativity=args.cooperativity)
    accepted = frozenset(args.accepted) if args.accepted is not None else None
    if args.window is not None:
        window = AcceptanceWindow(*args.window)
    else:
        # Bracket the accepted outcome centers by five noise widths.
        probe = ProtocolConfig(
            n_atoms=args.m_atoms,
            pulse=pulse,
            window=AcceptanceWindow(-math.inf, math.inf),
            accepted_n=accepted,
            seed=args.seed,
        )
        lo = min(probe.accepted_n)
        hi = max(probe.accepted_n)
        window = AcceptanceWindow(pulse.x_center(lo) - 5.0, pulse.x_center(hi) + 5.0)
    return ProtocolConfig(
        n_atoms=args.m_atoms,
        pulse=pulse,
        window=window,
        accepted_n=accepted,
        max_attempts=args.max_attempts,
        seed=args.seed,
    )


def _cmd_montecarlo(args: argparse.Namespace) -> int:
    config = _protocol_config(args)
    stats = run_protocol(config, args.runs)
    stats_columns = [
        "m_atoms",
        "theta",
        "cooperativity",
        "x_a",
        "x_b",
        "runs",
        "attempts_mean",
        "attempts_variance",
        "attempts_mean_3sigma",
        "acceptance_rate",
        "conditional_fidelity",
        "conditional_fidelity_3sigma",
        "censored",
    ]
    stats_row = [
        config.n_atoms,
        config.pulse.theta,
        config.pulse.cooperativity,
        config.window.x_a,
        config.window.x_b,
        stats.n_runs,
        stats.attempts_mean,
        stats.attempts_variance,
        stats.attempts_mean_3sigma,
        stats.acceptance_rate,
        stats.conditional_fidelity,
        stats.conditional_fidelity_3sigma,
        stats.n_censored,
    ]
    comments = []
    censored_fraction = stats.n_censored / stats.n_runs
    if censored_fraction > args.censored_warn:
        comments.append(f"# warning: censored_fraction={_fmt(censored_fraction)} exceeds {_fmt(args.censored_warn)}")

    sections = [(None, stats_columns, [stats_row], comments)]

    if args.histogram:
        lo, hi = args.hist_range if args.hist_range is not None else (-5.0, config.pulse.x_center(config.n_atoms) + 5.0)
        bins = np.linspace(lo, hi, args.bins + 1)
        hist = histogram(config, args.hist_samples, bins)
        hist_rows = [
            [bins[i], bins[i + 1], int(hist.counts[i]), float(hist.density[i]), float(hist.sigma[i])]
            for i in range(args.bins)
        ]
        sections.append(("histogram", ["bin_lo", "bin_hi", "count", "density", "sigma"], hist_rows, []))
        if args.density_output:
            model = OutcomeModel.for_atoms(config.n_atoms, config.pulse)
            cdf = mixture_cdf(bins, model)
            widths = np.diff(bins)
            dens_rows = [
                [bins[i], bins[i + 1], float((cdf[i + 1] - cdf[i]) / widths[i])]
                for i in range(args.bins)
            ]
            _write_sections(
                args.density_output,
                _header_lines(args, "montecarlo density"),
                [("density", ["bin_lo", "bin_hi", "density"], dens_rows, [])],
            )

    _write_sections(args.output, _header_lines(args, "montecarlo", [f"# rng={RNG_ALGORITHM}"]), sections)
    return EXIT_OK


def _table_hash(table) -> str:
    canonical = repr(sorted(table.items()))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _cmd_gate_check(args: argparse.Namespace) -> int:
    table = dict(CORRECTION_TABLE)
    if args.inject_corruption:
        # Negative-test hook: drop the corrections of one branch.
        table[("g", "g")] = ()
    basis_inputs = {
        "00": (1, 0, 0, 0),
        "01": (0, 1, 0, 0),
        "10": (0, 0, 1, 0),
        "11": (0, 0, 0, 1),
    }
    rows = []
    failures = []
    for name, qubits in basis_inputs.items():
        reference = cnot_truth_output(qubits)
        for branch in cnot_protocol(TwoAtomState.from_qubits(qubits), correction_table=table):
            amp_error = float(
                np.max(np.abs(branch.state.amplitudes - reference.amplitudes))
            )
            ok = amp_error < args.amp_tol
            if not ok:
                failures.append(f"{name}/{branch.control_result}{branch.target_result}")
            rows.append(
                [name, branch.control_result, branch.target_result, branch.probability, amp_error, ok]
            )
    header = _header_lines(args, "gate-check", [f"# correction_table_hash={_table_hash(table)}"])
    comments = [f"# correction_table: {key[0]}{key[1]} -> {ops}" for key, ops in sorted(table.items())]
    if failures:
        comments.append("# failing_cases: " + ",".join(failures))
    columns = ["input", "control_result", "target_result", "probability", "amp_error", "pass"]
    _write_sections(args.output, header, [(None, columns, rows, comments)])
    return EXIT_OK if not failures else EXIT_VALIDATION


def _cmd_scaling_compare(args: argparse.Namespace) -> int:
    if args.cmin <= 0 or args.cmax <= args.cmin or args.points < 2:
        raise InfeasibleError("need 0 < cmin < cmax and at least two points")
    cs = np.geomspace(args.cmin, args.cmax, args.points)
    results = sweep_curve(cs, args.ps, Mode.SINGLE_SHOT)
    fit = fit_measurement_scaling(results)

    rows = []
    for result in results:
        c = result.problem.cooperativity
        unitary = unitary_scheme_error(
            UnitaryComparisonParams(cooperativity=c), budget_coefficient=args.budget_coefficient
        ).error
        rows.append([c, result.error, unitary, result.error / unitary])

    finesse_rows = []
    for target in args.target_errors:
        for scheme in ("measurement", "unitary"):
            required = finesse_requirement(
                target,
                scheme,
                amplitude=fit.amplitude,
                budget_coefficient=args.budget_coefficient,
            )
            finesse_rows.append([target, scheme, required])

    header = _header_lines(
        args,
        "scaling-compare",
        [f"# fit_A={_fmt(fit.amplitude)}", f"# fit_max_rel_residual={_fmt(fit.max_rel_residual)}"],
    )
    _write_sections(
        args.output,
        header,
        [
            (None, ["cooperativity", "measurement_error", "unitary_error", "ratio"], rows, []),
            ("finesse", ["target_error", "scheme", "required_cooperativity"], finesse_rows, []),
        ],
    )
    all_converged = all(r.converged for r in results)
    return EXIT_OK if all_converged else EXIT_NONCONVERGED


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cavityqnd",
        description="Homodyne QND atom counting: sweeps, Monte Carlo, gate checks.",
    )
    parser.add_argument("--version", action="version", version=f"cavityqnd {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, _Command] = {}

    curve = _Command(subparsers, "curve", "optimize 1-F over a cooperativity grid")
    curve.add("--cmin", type=float, default=1e2, help="lowest cooperativity")
    curve.add("--cmax", type=float, default=1e5, help="highest cooperativity")
    curve.add("--points", type=int, default=13, help="log-spaced grid size")
    curve.add("--ps", type=_float_list, default=(0.001, 0.3, 0.5), help="success probabilities, comma separated")
    curve.add("--repeated-bound", action="store_true", help="add the repeat-until-success bound curve")
    curve.add("--bound-ps", type=float, default=0.5, help="success probability for the bound curve")
    curve.parser.set_defaults(func=_cmd_curve)
    commands["curve"] = curve

    mc = _Command(subparsers, "montecarlo", "repeat-until-success protocol statistics")
    mc.add("--m-atoms", type=int, default=2, help="number of atoms M")
    mc.add("--theta", type=float, required=True, default=None, help="per-atom scattering probability")
    mc.add("--cooperativity", type=float, required=True, default=None, help="effective g^2/(kappa gamma)")
    mc.add("--window", type=_float_pair, default=None, help="acceptance window x_a,x_b")
    mc.add("--accepted", type=_int_list, default=None, help="atom counts treated as success")
    mc.add("--runs", type=int, default=100000, help="number of protocol runs")
    mc.add("--max-attempts", type=int, default=1000, help="attempt cap per run")
    mc.add("--seed", type=int, default=0, help="reproducibility seed")
    mc.add("--censored-warn", type=float, default=0.01, help="censored-fraction warning threshold")
    mc.add("--histogram", action="store_true", help="append an outcome histogram section")
    mc.add("--bins", type=int, default=200, help="histogram bin count")
    mc.add("--hist-range", type=_float_pair, default=None, help="histogram range lo,hi")
    mc.add("--hist-samples", type=int, default=1000000, help="independent samples for the histogram")
    mc.add("--density-output", type=str, default=None, help="write the analytic bin-averaged density here")
    mc.parser.set_defaults(func=_cmd_montecarlo)
    commands["montecarlo"] = mc

    gate = _Command(subparsers, "gate-check", "exhaustive measurement-based CNOT validation")
    gate.add("--amp-tol", type=float, default=1e-12, help="amplitude error tolerance")
    gate.add("--inject-corruption", action="store_true", help="corrupt the correction table (negative test)")
    gate.parser.set_defaults(func=_cmd_gate_check)
    commands["gate-check"] = gate

    compare = _Command(subparsers, "scaling-compare", "measurement vs controlled-interaction error scaling")
    compare.add("--cmin", type=float, default=1e2)
    compare.add("--cmax", type=float, default=1e5)
    compare.add("--points", type=int, default=13)
    compare.add("--ps", type=float, default=0.3, help="success probability of the measurement curve")
    compare.add("--budget-coefficient", type=float, default=0.5, help="unitary error-budget coefficient")
    compare.add("--target-errors", type=_float_list, default=(0.01, 0.005), help="targets for finesse inversion")
    compare.parser.set_defaults(func=_cmd_scaling_compare)
    commands["scaling-compare"] = compare

    return parser, commands


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser, commands = _build_parser()
    args = parser.parse_args(argv)
    command = commands[args.command]
    try:
        if args.config:
            _apply_config_file(args, args.config, command.converters, list(argv))
        command.check_required(args)
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except MonotonicityError as exc:
        print(f"nonconvergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
