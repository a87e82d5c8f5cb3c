"""Experiment command line: solve, verify, reproduce, montecarlo, bench.

Configuration comes from an optional ``key = value`` text file plus flags;
flags win.  Every command requires an explicit seed (flag or config key);
there is no hidden entropy.  Exit codes are a stable contract:

    0  success
    1  usage or configuration error (also malformed input files)
    2  verification failure (a bound or identity check was violated)
    3  numeric failure (non-finite trace value)

CSV output is locale-independent: decimal points, line-feed newlines, and 17
significant digits (which round-trips float64 exactly).
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticSet
from .errors import ConfigError, KaczmarzError, NumericFailureError
from .problems import PROBLEM_KINDS, RHS_MODES, X0_MODES, ProblemSpec, build_problem
from .rng import derive_run_seed
from .solver import run

#: Additive slack for the bound inequality: lhs <= rhs + TOL*(1 + |rhs|).
INEQUALITY_TOL = 1e-10
#: The exact-identity residual must stay below TOL * ||A x - b||^2.
IDENTITY_TOL = 1e-10

_FIGURES = ("fig1", "fig2", "fig3")


@dataclass
class RunConfig:
    """Everything one command execution needs."""

    problem: ProblemSpec
    steps: int
    seed: int
    record_stride: int = 1
    diagnostics: tuple = ()
    runs: int = 1
    output_path: Path | None = None
    theorem: int = 1
    ells: tuple = (1,)

    def __post_init__(self):
        if self.steps < 0:
            raise ConfigError("steps", "must be non-negative")
        if self.record_stride < 1:
            raise ConfigError("record_stride", "must be at least 1")
        if self.runs < 1:
            raise ConfigError("runs", "must be at least 1")
        if self.theorem not in (1, 2):
            raise ConfigError("theorem", "must be 1 or 2")
        if any(ell < 1 for ell in self.ells):
            raise ConfigError("ell", "powers must be at least 1")


def format_value(v):
    """One CSV cell: integers verbatim, floats with 17 significant digits."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def parse_config_file(path):
    """Read a ``key = value`` file; '#' starts a comment, blanks ignored."""
    values = {}
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    for idx, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError("config", f"line {idx}: expected 'key = value', got {raw!r}")
        values[key.strip()] = value.strip()
    return values


_INT_KEYS = ("n", "m", "steps", "seed", "problem_seed", "record_stride", "runs", "theorem")
_STR_KEYS = ("kind", "rhs", "x0", "matrix_file", "rhs_file", "x0_file", "out", "figure")
_LIST_KEYS = ("diagnostics", "ell")


def _coerce(key, raw):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {raw!r}") from None
    if key in _LIST_KEYS:
        return tuple(tok for tok in raw.replace(",", " ").split() if tok)
    return raw


def merge_config(file_values, args):
    """File values first, then flag overrides; returns a plain dict."""
    merged = {}
    for key, raw in file_values.items():
        if key not in _INT_KEYS + _STR_KEYS + _LIST_KEYS:
            raise ConfigError(key, "unknown configuration key")
        merged[key] = _coerce(key, raw)
    for key in _INT_KEYS + _STR_KEYS + _LIST_KEYS:
        flag = getattr(args, key, None)
        if flag is None:
            continue
        if key in _LIST_KEYS:
            merged[key] = _coerce(key, flag) if isinstance(flag, str) else tuple(flag)
        else:
            merged[key] = flag
    return merged


def build_run_config(merged, *, default_steps=None):
    """Validate the merged mapping into a RunConfig."""
    if "seed" not in merged:
        raise ConfigError("seed", "a seed is required; pass --seed or set it in the config")
    seed = merged["seed"]
    steps = merged.get("steps", default_steps)
    if steps is None:
        raise ConfigError("steps", "a step count is required")
    kind = merged.get("kind", "gaussian_row_normalized")
    spec = ProblemSpec(
        kind=kind,
        n=merged.get("n"),
        m=merged.get("m"),
        seed=merged.get("problem_seed", seed),
        rhs=merged.get("rhs", "ones"),
        x0=merged.get("x0", "zero"),
        matrix_path=merged.get("matrix_file"),
        rhs_path=merged.get("rhs_file"),
        x0_path=merged.get("x0_file"),
    )
    ells = merged.get("ell", (1,))
    try:
        ells = tuple(int(e) for e in ells)
    except ValueError:
        raise ConfigError("ell", f"expected integers, got {ells!r}") from None
    return RunConfig(
        problem=spec,
        steps=int(steps),
        seed=int(seed),
        record_stride=int(merged.get("record_stride", 1)),
        diagnostics=tuple(merged.get("diagnostics", ())),
        runs=int(merged.get("runs", 1)),
        output_path=Path(merged["out"]) if "out" in merged else None,
        theorem=int(merged.get("theorem", 1)),
        ells=ells,
    )


# -- CSV writing ---------------------------------------------------------------


def trace_columns(problem, trace):
    """Column names for one trace in the documented order."""
    columns = ["k", "residual_norm"]
    if problem.x_true is not None:
        columns.append("error_norm")
    columns.append("iterate_norm")
    columns.extend(trace.diagnostic_columns)
    return columns


def write_trace_csv(path, problem, trace):
    columns = trace_columns(problem, trace)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in trace.steps:
            cells = [str(row.k), format_value(row.residual_norm)]
            if problem.x_true is not None:
                cells.append(format_value(row.error_norm))
            cells.append(format_value(row.iterate_norm))
            cells.extend(format_value(row.extras[c]) for c in trace.diagnostic_columns)
            fh.write(",".join(cells) + "\n")


def run_output_path(base, run_index, runs):
    """Per-run file name: `_run<j>` before the suffix when runs > 1."""
    base = Path(base)
    if runs == 1:
        return base
    return base.with_name(f"{base.stem}_run{run_index}{base.suffix or '.csv'}")


# -- commands ------------------------------------------------------------------


def cmd_solve(config):
    problem = build_problem(config.problem)
    diag = DiagnosticSet(problem, config.diagnostics) if config.diagnostics else ()
    if config.output_path is None:
        raise ConfigError("out", "an output path is required")
    for j in range(config.runs):
        seed_j = config.seed if config.runs == 1 else derive_run_seed(config.seed, j)
        trace = run(problem, config.steps, seed_j, config.record_stride, diag)
        path = run_output_path(config.output_path, j, config.runs)
        write_trace_csv(path, problem, trace)
        print(path)
    return 0


def check_violations(trace, columns):
    """Count bound/identity violations among recorded report columns.

    `columns` maps a label to its (lhs, rhs, identity) column names; the
    identity residual is compared against IDENTITY_TOL times the squared
    recorded residual norm.
    """
    violations = 0
    for row in trace.steps:
        base = row.residual_norm**2
        for lhs_col, rhs_col, ident_col in columns:
            lhs = row.extras[lhs_col]
            rhs = row.extras[rhs_col]
            if lhs > rhs + INEQUALITY_TOL * (1.0 + abs(rhs)):
                violations += 1
            if row.extras[ident_col] > IDENTITY_TOL * base:
                violations += 1
    return violations


def cmd_verify(config):
    if config.theorem == 1:
        names = ["theorem1"]
        groups = [("thm1_lhs", "thm1_rhs", "thm1_identity_residual")]
    else:
        names = [f"theorem2:{ell}" for ell in config.ells]
        groups = [
            (f"thm2_l{ell}_lhs", f"thm2_l{ell}_rhs", f"thm2_l{ell}_identity_residual")
            for ell in config.ells
        ]
    problem = build_problem(config.problem)
    trace = run(problem, config.steps, config.seed, config.record_stride, names)
    if config.output_path is not None:
        write_trace_csv(config.output_path, problem, trace)
        print(config.output_path)
    violations = check_violations(trace, groups)
    print(f"checked {len(trace.steps)} recorded steps: {violations} violation(s)")
    return 2 if violations else 0


_FIG_DEFAULTS = {
    # (problem kind parameters, steps, runs, diagnostics)
    "fig1": (dict(kind="gaussian_row_normalized", n=100, rhs="ones", x0="zero"), 20000, 1, ()),
    "fig2": (
        dict(kind="gaussian_row_normalized", n=100, rhs="ones", x0="zero"),
        20000,
        1,
        ("v1_normalized",),
    ),
    "fig3": (
        dict(kind="gaussian_row_normalized", n=500, rhs="ones", x0="gaussian"),
        3000,
        5,
        ("decrement",),
    ),
}


def cmd_reproduce(figure, seed, output_dir, steps=None, runs=None):
    if figure not in _FIGURES:
        raise ConfigError("figure", f"expected one of {_FIGURES}, got {figure!r}")
    spec_kwargs, default_steps, default_runs, diagnostics = _FIG_DEFAULTS[figure]
    steps = default_steps if steps is None else steps
    runs = default_runs if runs is None else runs
    if figure == "fig3" and runs < 5:
        raise ConfigError("runs", "fig3 aggregates at least 5 runs")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)

    problem = build_problem(ProblemSpec(seed=seed, **spec_kwargs))
    if problem.svd_result is not None:
        # audit line: the instance is random, so record how singular it is
        print(
            f"# {figure} seed={seed} sigma_min={problem.svd_result.sigma_min:.6e} "
            f"sigma_max={problem.svd_result.sigma_max:.6e}"
        )
    diag = DiagnosticSet(problem, diagnostics) if diagnostics else ()
    paths = []
    for j in range(runs):
        seed_j = seed if runs == 1 else derive_run_seed(seed, j)
        trace = run(problem, steps, seed_j, 1, diag)
        path = out / (f"{figure}.csv" if runs == 1 else f"{figure}_run{j}.csv")
        write_trace_csv(path, problem, trace)
        paths.append(path)
        print(path)
    return 0


def aggregate_traces(traces, columns):
    """Per-step mean/std/min/max of each column across runs.

    Returns (ks, {column: (mean, std, min, max) arrays}); the sample standard
    deviation (ddof=1) is used.  All traces must share one record grid.
    """
    ks = traces[0].column("k")
    for tr in traces[1:]:
        if not np.array_equal(tr.column("k"), ks):
            raise ConfigError("runs", "runs disagree on the record grid")
    stats = {}
    for col in columns:
        data = np.vstack([tr.column(col) for tr in traces])
        stats[col] = (
            data.mean(axis=0),
            data.std(axis=0, ddof=1),
            data.min(axis=0),
            data.max(axis=0),
        )
    return ks.astype(np.int64), stats


def cmd_montecarlo(config):
    if config.runs < 2:
        raise ConfigError("runs", "montecarlo needs at least 2 runs")
    if config.output_path is None:
        raise ConfigError("out", "an output path is required")
    problem = build_problem(config.problem)
    diag = DiagnosticSet(problem, config.diagnostics) if config.diagnostics else ()
    traces = [
        run(problem, config.steps, derive_run_seed(config.seed, j), config.record_stride, diag)
        for j in range(config.runs)
    ]
    columns = [c for c in trace_columns(problem, traces[0]) if c != "k"]
    ks, stats = aggregate_traces(traces, columns)
    with open(config.output_path, "w", encoding="ascii", newline="\n") as fh:
        header = ["k"]
        for col in columns:
            header.extend([f"{col}_mean", f"{col}_std", f"{col}_min", f"{col}_max"])
        fh.write(",".join(header) + "\n")
        for idx, k in enumerate(ks):
            cells = [str(int(k))]
            for col in columns:
                cells.extend(format_value(stat[idx]) for stat in stats[col])
            fh.write(",".join(cells) + "\n")
    print(config.output_path)
    return 0


def cmd_bench(args):
    from .bench import run_benchmark

    run_benchmark(
        n=args.n or 300,
        steps=args.steps or 100000,
        svd_n=args.svd_n,
        seed=args.seed if args.seed is not None else 1,
    )
    return 0


# -- argument parsing -----------------------------------------------------------


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_common_flags(sub):
    sub.add_argument("--config", type=str, default=None, help="key = value config file")
    sub.add_argument("--seed", type=int, default=None, help="run seed (required)")
    sub.add_argument("--steps", type=int, default=None)
    sub.add_argument("--runs", type=int, default=None)
    sub.add_argument("--out", type=str, default=None, help="output CSV path")
    sub.add_argument("--record-stride", dest="record_stride", type=int, default=None)
    sub.add_argument("--diagnostics", type=str, default=None, help="comma-separated names")
    sub.add_argument("--kind", choices=PROBLEM_KINDS, default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--m", type=int, default=None)
    sub.add_argument("--problem-seed", dest="problem_seed", type=int, default=None)
    sub.add_argument("--rhs", choices=RHS_MODES, default=None)
    sub.add_argument("--x0", choices=X0_MODES, default=None)
    sub.add_argument("--matrix-file", dest="matrix_file", type=str, default=None)
    sub.add_argument("--rhs-file", dest="rhs_file", type=str, default=None)
    sub.add_argument("--x0-file", dest="x0_file", type=str, default=None)


def build_parser():
    parser = _Parser(prog="kaczmarz", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run the solver and write trace CSVs")
    _add_common_flags(solve)

    verify = sub.add_parser("verify", help="check decay bounds along a run")
    _add_common_flags(verify)
    verify.add_argument("--theorem", type=int, choices=(1, 2), default=None)
    verify.add_argument("--ell", type=int, nargs="+", default=None)

    repro = sub.add_parser("reproduce", help="regenerate the reference experiments")
    repro.add_argument("--figure", choices=_FIGURES, required=True)
    repro.add_argument("--seed", type=int, default=None)
    repro.add_argument("--steps", type=int, default=None)
    repro.add_argument("--runs", type=int, default=None)
    repro.add_argument("--out", type=str, default=None, help="output directory")

    mc = sub.add_parser("montecarlo", help="aggregate statistics over repeated runs")
    _add_common_flags(mc)

    bench = sub.add_parser("bench", help="time the compiled and python kernels")
    bench.add_argument("--n", type=int, default=None)
    bench.add_argument("--steps", type=int, default=None)
    bench.add_argument("--svd-n", dest="svd_n", type=int, default=None)
    bench.add_argument("--seed", type=int, default=None)

    return parser


def main(argv=None):
    """Entry point returning the exit code (see module docstring)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "reproduce":
            if args.seed is None:
                raise ConfigError("seed", "a seed is required; pass --seed")
            if args.out is None:
                raise ConfigError("out", "an output directory is required")
            return cmd_reproduce(args.figure, args.seed, args.out, args.steps, args.runs)
        file_values = parse_config_file(args.config) if args.config else {}
        merged = merge_config(file_values, args)
        config = build_run_config(merged)
        if args.command == "solve":
            return cmd_solve(config)
        if args.command == "verify":
            return cmd_verify(config)
        return cmd_montecarlo(config)
    except (_UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except KaczmarzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
