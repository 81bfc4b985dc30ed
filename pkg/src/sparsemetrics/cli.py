"""Command-line front door.

Commands: measure, measure-all, lorenz, check, table, experiment.
Exit codes: 0 success; 1 when `table` finds a non-disputed mismatch against
the expected compliance matrix; 2 on input or parse errors.

Identical argv and input files produce byte-identical output: the default
seed is the fixed constant 0 (overridable with SPARSEMETRICS_SEED or
--seed) and reports carry no timestamps.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .compliance import (
    DISPUTED_CELLS,
    ERRATUM_NOTES,
    EXPECTED_TRUE,
    check_cell,
    full_table,
)
from .errors import SparsemetricsError
from .measures import (
    MEASURE_ORDER,
    CoefficientVector,
    Measure,
    MeasureSpec,
    evaluate,
    lorenz_curve,
)
from .transforms import Criterion
from .experiments import (
    DistributionSpec,
    bernoulli_sweep,
    contribution_curves,
    distributional_gini,
    poisson_convergence,
    sample_gini,
)

SEED_ENV_VAR = "SPARSEMETRICS_SEED"


class InputError(SparsemetricsError):
    """Malformed CLI input (exit code 2)."""


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


def read_vector(path: str, complex_pairs: bool = False) -> CoefficientVector:
    """Read a coefficient vector from a file or '-' (stdin).

    Numbers may be separated by commas, whitespace, or newlines; scientific
    notation is accepted.  In complex mode every non-empty line holds one
    're,im' pair and contributes the magnitude.  Magnitudes are taken
    either way.
    """
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc

    values: list[complex] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = list(re.finditer(r"[^\s,]+", line))
        parsed = []
        for tok in tokens:
            try:
                parsed.append(float(tok.group()))
            except ValueError as exc:
                raise InputError(
                    f"line {lineno}, column {tok.start() + 1}: "
                    f"malformed number {tok.group()!r}"
                ) from exc
        if not parsed:
            continue
        if complex_pairs:
            if len(parsed) != 2:
                raise InputError(
                    f"line {lineno}, column 1: complex mode expects 're,im' "
                    f"pairs, got {len(parsed)} value(s)"
                )
            values.append(complex(parsed[0], parsed[1]))
        else:
            values.extend(parsed)
    if not values:
        raise InputError("input contains no values")
    return CoefficientVector(np.asarray(values))


def _csv(rows, header: tuple[str, ...]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(x) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def write_report(payload: dict, fmt: str, tabular_fn) -> str:
    """Render a report: 'tabular' delegates to tabular_fn, 'structured' is JSON."""
    if fmt == "structured":
        return json.dumps(payload, indent=2) + "\n"
    return tabular_fn()


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            with open(output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {output}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _config_echo(args) -> dict:
    """Full run configuration, defaults included, for structured reports."""
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _document(command: str, config: dict, payload: dict) -> dict:
    return {
        "tool": "sparsemetrics",
        "version": __version__,
        "command": command,
        "config": config,
        **payload,
    }


def _spec_from_args(measure: Measure, args) -> MeasureSpec:
    return MeasureSpec(
        measure,
        epsilon=args.epsilon,
        p_frac=args.p,
        p_neg=args.p_neg,
        a=args.a,
        b=args.b,
        theta=args.theta,
    )


def _spec_params(spec: MeasureSpec) -> dict:
    d = asdict(spec)
    d["id"] = spec.id.value
    return d


def _cmd_measure(args) -> int:
    vec = read_vector(args.input, args.complex)
    spec = _spec_from_args(Measure(args.measure), args)
    value = evaluate(spec, vec)
    if args.format == "structured":
        doc = _document(
            "measure",
            {**_config_echo(args), "spec": _spec_params(spec), "n": len(vec)},
            {"value": value},
        )
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        _emit(f"{value:.{args.precision}f}\n", args.output)
    return 0


def _cmd_measure_all(args) -> int:
    vec = read_vector(args.input, args.complex)
    rows = []
    cells = []
    for m in MEASURE_ORDER:
        spec = _spec_from_args(m, args)
        try:
            value = evaluate(spec, vec)
            rows.append((m.value, f"{value:.{args.precision}f}", "ok"))
            cells.append({"measure": m.value, "value": value, "status": "ok"})
        except SparsemetricsError as exc:
            rows.append((m.value, "", "degenerate"))
            cells.append(
                {"measure": m.value, "value": None, "status": "degenerate", "error": str(exc)}
            )
    doc = _document(
        "measure-all",
        {**_config_echo(args), "n": len(vec)},
        {"values": cells},
    )
    text = write_report(doc, args.format, lambda: _csv(rows, ("measure", "value", "status")))
    _emit(text, args.output)
    return 0


def _cmd_lorenz(args) -> int:
    vec = read_vector(args.input, args.complex)
    curve = lorenz_curve(vec)
    doc = _document(
        "lorenz",
        {**_config_echo(args), "n": len(vec)},
        {
            "points": [[float(x), float(y)] for x, y in curve.points],
            "twice_area_above_diagonal": curve.twice_area_above(),
        },
    )
    text = write_report(
        doc,
        args.format,
        lambda: _csv(((float(x), float(y)) for x, y in curve.points), ("x", "y")),
    )
    _emit(text, args.output)
    return 0


def _cmd_check(args) -> int:
    spec = _spec_from_args(Measure(args.measure), args)
    criterion = Criterion(args.criterion.upper())
    verdict = check_cell(spec, criterion, trials=args.trials, seed=args.seed)
    d = verdict.to_dict()
    doc = _document(
        "check",
        {**_config_echo(args), "params": _spec_params(spec)},
        {"cell": d},
    )
    text = write_report(
        doc,
        args.format,
        lambda: _csv(
            [
                (
                    d["measure"],
                    d["criterion"],
                    d["verdict"],
                    d["trials"],
                    d["skipped"],
                )
            ],
            ("measure", "criterion", "verdict", "trials", "skipped"),
        ),
    )
    _emit(text, args.output)
    return 0


def _cmd_table(args) -> int:
    result = full_table(trials=args.trials, seed=args.seed)
    doc = _document(
        "table",
        _config_echo(args),
        result.to_dict(),
    )

    def tabular() -> str:
        rows = []
        for cell in doc["cells"]:
            rows.append(
                (
                    cell["measure"],
                    cell["criterion"],
                    cell["verdict"],
                    cell["expected"],
                    "disputed" if cell["disputed"] else "",
                    "mismatch" if cell["mismatch"] else "",
                    cell["trials"],
                    cell["skipped"],
                )
            )
        return _csv(
            rows,
            (
                "measure",
                "criterion",
                "verdict",
                "expected",
                "disputed",
                "mismatch",
                "trials",
                "skipped",
            ),
        )

    _emit(write_report(doc, args.format, tabular), args.output)
    mismatches = result.mismatches
    for m, c in mismatches:
        note = ERRATUM_NOTES.get((m, c), "")
        print(
            f"mismatch: ({m.value}, {c.value}) expected "
            f"{'no-violation' if c in EXPECTED_TRUE[m] else 'violated'}"
            + (f" -- {note}" if note else ""),
            file=sys.stderr,
        )
    for m, c in DISPUTED_CELLS:
        print(f"disputed (excluded from diff): ({m.value}, {c.value})", file=sys.stderr)
    return 1 if mismatches else 0


def _parse_grid(text: str) -> list[float]:
    """Parse '0.05:0.95:0.05' ranges or comma-separated lists."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"grid ranges need start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise InputError("grid step must be positive")
        count = int(round((stop - start) / step))
        return [start + k * step for k in range(count + 1) if start + k * step <= stop + 1e-12]
    return [float(p) for p in text.split(",") if p.strip()]


def _cmd_experiment(args) -> int:
    name = args.name
    if name == "poisson-convergence":
        sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else None
        result = poisson_convergence(
            lam=args.lam,
            sizes=sizes or (10, 30, 100, 300, 1000, 3000),
            repeats=args.repeats if args.repeats is not None else 50,
            seed=args.seed,
        )
    elif name == "bernoulli-sweep":
        grid = _parse_grid(args.grid) if args.grid else None
        result = bernoulli_sweep(
            grid=grid or tuple(k / 20 for k in range(1, 20)),
            n=args.n,
            repeats=args.repeats if args.repeats is not None else 20,
            seed=args.seed,
        )
    elif name == "contribution-curves":
        xs = _parse_grid(args.amplitudes) if args.amplitudes else None
        if xs is None:
            xs = [k * 0.01 for k in range(501)]
        table = contribution_curves(xs)
        doc = _document(
            "experiment",
            {**_config_echo(args), "grid_points": len(xs)},
            {
                "rows": [
                    {"measure": m, "x": x, "term": t} for m, x, t in table.rows()
                ]
            },
        )
        text = write_report(
            doc, args.format, lambda: _csv(table.rows(), ("measure", "x", "term"))
        )
        _emit(text, args.output)
        return 0
    elif name == "distributional-gini":
        if args.dist == "uniform":
            dist = DistributionSpec.uniform(args.lo, args.hi)
        elif args.dist == "exponential":
            dist = DistributionSpec.exponential(args.rate)
        else:
            raise InputError(f"unsupported distribution for quadrature: {args.dist!r}")
        quad_value = distributional_gini(dist, tol=args.tol)
        sample_value = sample_gini(dist, args.sample_n, seed=args.seed)
        rows = [
            ("kind", args.dist, ""),
            ("quadrature_gini", repr(quad_value), ""),
            ("sample_n", str(args.sample_n), ""),
            ("sample_gini", repr(sample_value), ""),
            ("abs_difference", repr(abs(quad_value - sample_value)), ""),
        ]
        doc = _document(
            "experiment",
            _config_echo(args),
            {
                "quadrature_gini": quad_value,
                "sample_gini": sample_value,
                "abs_difference": abs(quad_value - sample_value),
            },
        )
        text = write_report(
            doc, args.format, lambda: _csv(rows, ("field", "value", ""))
        )
        _emit(text, args.output)
        return 0
    else:  # pragma: no cover - argparse choices guard this
        raise InputError(f"unknown experiment {name!r}")

    doc = _document(
        "experiment", {**_config_echo(args), **result.metadata}, result.to_dict()
    )
    rows = result.raw_rows() if args.raw else result.summary_rows()
    header = (
        (result.sweep_name, "measure", "repeat", "value")
        if args.raw
        else (result.sweep_name, "measure", "mean", "std", "normalized")
    )
    text = write_report(doc, args.format, lambda: _csv(rows, header))
    _emit(text, args.output)
    return 0


def _add_common(parser: argparse.ArgumentParser, with_params: bool = True) -> None:
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument(
        "--format",
        choices=("tabular", "structured"),
        default="tabular",
        help="tabular (delimiter-separated) or structured (JSON)",
    )
    if with_params:
        parser.add_argument("--epsilon", type=float, default=1.0, help="l0-eps threshold")
        parser.add_argument("--p", type=float, default=0.5, help="neg-lp exponent in (0,1)")
        parser.add_argument("--p-neg", type=float, default=-1.0, help="neg-lp-neg exponent < 0")
        parser.add_argument("--a", type=float, default=1.0, help="neg-tanh scale a > 0")
        parser.add_argument("--b", type=float, default=1.0, help="neg-tanh exponent b > 0")
        parser.add_argument("--theta", type=float, default=0.5, help="u-theta fraction in (0,1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsemetrics",
        description="Sparsity measures, axiomatic criteria checks, and experiments.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    measure_ids = [m.value for m in MEASURE_ORDER]

    p = sub.add_parser("measure", help="evaluate one measure on a vector")
    p.add_argument("--measure", required=True, choices=measure_ids)
    p.add_argument("--input", required=True, help="vector file, or - for stdin")
    p.add_argument("--complex", action="store_true", help="rows are re,im pairs")
    p.add_argument("--precision", type=int, default=6)
    _add_common(p)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("measure-all", help="evaluate all fifteen measures")
    p.add_argument("--input", required=True)
    p.add_argument("--complex", action="store_true")
    p.add_argument("--precision", type=int, default=6)
    _add_common(p)
    p.set_defaults(func=_cmd_measure_all)

    p = sub.add_parser("lorenz", help="emit the Lorenz curve points")
    p.add_argument("--input", required=True)
    p.add_argument("--complex", action="store_true")
    _add_common(p, with_params=False)
    p.set_defaults(func=_cmd_lorenz)

    p = sub.add_parser("check", help="check one (measure, criterion) cell")
    p.add_argument("--measure", required=True, choices=measure_ids)
    p.add_argument(
        "--criterion", required=True, choices=[c.value for c in Criterion]
    )
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=_default_seed())
    _add_common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("table", help="full 15x6 compliance table and diff")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=_default_seed())
    _add_common(p, with_params=False)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("experiment", help="run one of the numerical studies")
    p.add_argument(
        "--name",
        required=True,
        choices=(
            "poisson-convergence",
            "bernoulli-sweep",
            "contribution-curves",
            "distributional-gini",
        ),
    )
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--lambda", dest="lam", type=float, default=5.0)
    p.add_argument("--sizes", help="comma-separated set sizes")
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--n", type=int, default=1000, help="bernoulli set size")
    p.add_argument("--grid", help="p grid: start:stop:step or comma list")
    p.add_argument("--amplitudes", help="amplitude grid: start:stop:step or comma list")
    p.add_argument("--dist", choices=("uniform", "exponential"), default="uniform")
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8, help="quadrature tolerance")
    p.add_argument("--sample-n", type=int, default=100000)
    p.add_argument("--raw", action="store_true", help="emit repeat-level raw rows")
    _add_common(p, with_params=False)
    p.set_defaults(func=_cmd_experiment)

    return parser


def parse_and_dispatch(argv=None) -> int:
    try:
        parser = build_parser()  # reads the seed env var
        args = parser.parse_args(argv)
        return args.func(args)
    except SparsemetricsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:  # console entry point
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
