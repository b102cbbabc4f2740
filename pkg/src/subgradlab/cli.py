"""Command-line experiment harness.

Three subcommands:

``run``      one experiment cell: a method on an instance, reported as one row
``sweep``    a grid of cells over horizons and step sizes
``certify``  randomized verification of the weighted telescoping inequality

Rows are CSV by default (JSON with ``--format json``) and reproduce
byte-for-byte for identical flags and seed.  Exit status: 0 when every
reported slack is above -1e-9, 1 when some bound is violated, 2 for invalid
flags or parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import certify as certify_mod
from . import rates, solver, worstcase
from .core import ProblemInstance, scale_instance
from .errors import SubgradLabError
from .sequences import s

COLUMNS = [
    "method",
    "N",
    "h",
    "B",
    "R",
    "instance",
    "seed",
    "last_gap",
    "best_gap",
    "avg_gap",
    "bound_last",
    "bound_best",
    "slack",
]
SWEEP_COLUMNS = COLUMNS + ["bound_log"]

SLACK_FLOOR = -1e-9

_METHODS = ("constant", "length", "optimal", "optimal-length", "custom")
_INSTANCES = ("abs", "longstep", "lemma-i", "lemma-ii", "random", "worstcase")


class CliError(Exception):
    """Invalid flag combination or parameter value (exit status 2)."""


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_rows(rows: list[dict], columns: list[str], fmt: str, out: str) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
        payload = buf.getvalue()
    else:
        payload = json.dumps(
            [{c: row[c] for c in columns} for row in rows], indent=2
        )
        payload += "\n"
    if out == "-":
        sys.stdout.write(payload)
    else:
        with open(out, "w", newline="") as f:
            f.write(payload)


def _build_schedule(args, N: int, canonical_steps=None) -> solver.StepSchedule:
    method = args.method
    if method == "constant":
        if args.h is None:
            raise CliError("--method constant requires --h")
        return solver.StepSchedule.constant_normalized(args.h)
    if method == "length":
        if args.t is None:
            raise CliError("--method length requires --t")
        return solver.StepSchedule.constant_length(args.t)
    if method == "optimal":
        return solver.StepSchedule.optimal_last_iterate(N)
    if method == "optimal-length":
        return solver.StepSchedule.optimal_length(N)
    if args.steps_file is not None:
        try:
            with open(args.steps_file) as f:
                steps = [float(tok) for tok in f.read().split()]
        except OSError as exc:
            raise CliError(f"cannot read --steps-file: {exc}") from exc
        except ValueError as exc:
            raise CliError(f"--steps-file must hold numbers: {exc}") from exc
        return solver.StepSchedule.custom(steps)
    if canonical_steps is not None:
        return solver.StepSchedule.custom(canonical_steps)
    raise CliError("--method custom requires --steps-file")


def _build_instance(args, N: int) -> tuple[ProblemInstance, list[float] | None]:
    """Returns the instance plus, for the two-step instances, their canonical
    raw steps (scaled to the requested B and R)."""
    B, R = args.B, args.R
    if B <= 0 or R <= 0:
        raise CliError(f"B and R must be positive, got B={B}, R={R}")
    normalized = abs(B - 1.0) <= 1e-15 and abs(R - 1.0) <= 1e-15
    key = args.instance

    if key == "abs":
        return worstcase.abs_instance(B, R), None

    if key == "longstep":
        if args.h is None:
            raise CliError("--instance longstep needs --h to define the construction")
        scripted = args.method == "constant"
        inst = worstcase.long_step_instance(N, args.h, scripted=scripted)
        return (inst if normalized else scale_instance(inst, B, R)), None

    if key in ("lemma-i", "lemma-ii"):
        if args.h2 is None:
            raise CliError(f"--instance {key} requires --h2")
        canonical = [rates.TWO_STEP_FIRST * R / B, args.h2 * R / B]
        scripted = args.method == "custom" and N == 2 and args.steps_file is None
        make = (
            worstcase.two_step_worst_small
            if key == "lemma-i"
            else worstcase.two_step_worst_long
        )
        inst = make(args.h2, scripted=scripted)
        return (inst if normalized else scale_instance(inst, B, R)), canonical

    if key == "random":
        inst = worstcase.random_instance(args.dim, args.directions, seed=args.seed)
        return (inst if normalized else scale_instance(inst, B, R)), None

    raise CliError(f"--instance {key} is not valid here")


def _cell_row(
    method: str,
    N: int,
    param: float | None,
    instance_key: str,
    seed: int,
    p: ProblemInstance,
    schedule: solver.StepSchedule,
    include_log_bound: bool = False,
) -> dict:
    trace = solver.run(p, schedule, N=N)
    BR = p.B * p.R
    lastg = solver.last_gap(trace, p)
    bestg = solver.best_gap(trace, p)
    extended = list(trace.steps) + [float(trace.steps[-1])]
    avgg = solver.avg_gap(trace, p, extended)
    bound_best = solver.best_iterate_bound(extended, p.B, p.R)

    if method == "constant":
        bound_last = BR * rates.constant_step_rate(N, param)
    elif method == "length":
        bound_last = BR * rates.constant_length_rate(N, param)
    elif method in ("optimal", "optimal-length"):
        bound_last = BR * rates.optimal_method_rate(N)
    else:
        bound_last = None

    slacks = [bound_best - bestg]
    if bound_last is not None:
        slacks.append(bound_last - lastg)
    row = {
        "method": method,
        "N": N,
        "h": param,
        "B": p.B,
        "R": p.R,
        "instance": instance_key,
        "seed": seed,
        "last_gap": lastg,
        "best_gap": bestg,
        "avg_gap": avgg,
        "bound_last": bound_last,
        "bound_best": bound_best,
        "slack": min(slacks),
    }
    if include_log_bound:
        if method in ("constant", "length") and N >= 2:
            row["bound_log"] = BR * rates.weakened_rate_bounds(N, param).log_form
        else:
            row["bound_log"] = None
    return row


def _cmd_run(args) -> int:
    N = args.N
    if N < 1:
        raise CliError(f"--N must be >= 1, got {N}")
    p, canonical = _build_instance(args, N)
    schedule = _build_schedule(args, N, canonical_steps=canonical)
    param = args.h if args.method == "constant" else None
    if args.method == "length":
        param = args.t
    row = _cell_row(args.method, N, param, args.instance, args.seed, p, schedule)
    _write_rows([row], COLUMNS, args.format, args.out)
    if row["slack"] < SLACK_FLOOR:
        print(
            f"bound violated: slack={row['slack']!r} below {SLACK_FLOOR}",
            file=sys.stderr,
        )
        return 1
    return 0


def _parse_n_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise CliError(f"--N-list must be comma-separated integers: {exc}") from exc
    if not values or any(n < 1 for n in values):
        raise CliError("--N-list needs integers >= 1")
    return values


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise CliError("--h-grid must look like min:max:step")
    try:
        lo, hi, step = (float(tok) for tok in parts)
    except ValueError as exc:
        raise CliError(f"--h-grid must hold numbers: {exc}") from exc
    if step <= 0 or lo <= 0 or hi < lo:
        raise CliError("--h-grid needs 0 < min <= max and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def _sweep_cell(args, N: int, h: float | None, shared_random) -> dict:
    method = args.method
    if method in ("optimal", "optimal-length"):
        schedule = (
            solver.StepSchedule.optimal_last_iterate(N)
            if method == "optimal"
            else solver.StepSchedule.optimal_length(N)
        )
    elif method == "constant":
        schedule = solver.StepSchedule.constant_normalized(h)
    else:
        schedule = solver.StepSchedule.constant_length(h)

    key = args.instance
    normalized = abs(args.B - 1.0) <= 1e-15 and abs(args.R - 1.0) <= 1e-15
    if key == "worstcase":
        if method in ("optimal", "optimal-length") or h is None:
            p = worstcase.abs_instance(args.B, args.R)
        else:
            knee = 1.0 / s(1.0, N + 1) ** 2
            if h <= knee:
                p = worstcase.abs_instance(args.B, args.R)
            else:
                p = worstcase.long_step_instance(N, h, scripted=(method == "constant"))
                if not normalized:
                    p = scale_instance(p, args.B, args.R)
    elif key == "abs":
        p = worstcase.abs_instance(args.B, args.R)
    elif key == "longstep":
        if h is None:
            raise CliError("--instance longstep needs an h grid")
        p = worstcase.long_step_instance(N, h, scripted=(method == "constant"))
        if not normalized:
            p = scale_instance(p, args.B, args.R)
    elif key == "random":
        p = shared_random if normalized else scale_instance(shared_random, args.B, args.R)
    else:
        raise CliError(f"--instance {key} cannot be swept")

    return _cell_row(
        method, N, h, key, args.seed, p, schedule, include_log_bound=True
    )


def _cmd_sweep(args) -> int:
    n_values = _parse_n_list(args.N_list)
    if args.method in ("optimal", "optimal-length"):
        if args.h_grid is not None:
            raise CliError(f"--h-grid has no effect with --method {args.method}")
        grid: list[float | None] = [None]
    else:
        if args.h_grid is None:
            raise CliError(f"--method {args.method} needs --h-grid")
        grid = _parse_grid(args.h_grid)
    if args.instance in ("lemma-i", "lemma-ii"):
        raise CliError("the two-step instances are fixed-horizon; use run instead")

    shared_random = None
    if args.instance == "random":
        shared_random = worstcase.random_instance(
            args.dim, args.directions, seed=args.seed
        )

    cells = [(N, h) for N in n_values for h in grid]

    def work(cell):
        N, h = cell
        return _sweep_cell(args, N, h, shared_random)

    if args.parallel > 1:
        with ThreadPoolExecutor(max_workers=args.parallel) as pool:
            rows = list(pool.map(work, cells))
    else:
        rows = [work(c) for c in cells]

    _write_rows(rows, SWEEP_COLUMNS, args.format, args.out)
    worst = min(row["slack"] for row in rows)
    if worst < SLACK_FLOOR:
        bad = next(r for r in rows if r["slack"] == worst)
        print(
            f"bound violated: N={bad['N']} h={bad['h']} slack={worst!r}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_certify(args) -> int:
    if args.trials < 1:
        raise CliError(f"--trials must be >= 1, got {args.trials}")
    N = args.N
    if N < 1:
        raise CliError(f"--N must be >= 1, got {N}")

    kinds = ("constant", "length", "optimal", "optimal-length", "custom")
    min_slack = math.inf
    min_trial = -1
    violations: list[tuple[int, float]] = []
    for trial in range(args.trials):
        rng = np.random.default_rng([args.seed, trial])
        dim = int(rng.integers(2, 9))
        directions = int(rng.integers(1, 2 * dim + 1))
        p = worstcase.random_instance(dim, directions, seed=rng)
        kind = kinds[trial % len(kinds)]
        if kind == "constant":
            schedule = solver.StepSchedule.constant_normalized(rng.uniform(0.05, 1.2))
        elif kind == "length":
            schedule = solver.StepSchedule.constant_length(rng.uniform(0.05, 1.0))
        elif kind == "optimal":
            schedule = solver.StepSchedule.optimal_last_iterate(N)
        elif kind == "optimal-length":
            schedule = solver.StepSchedule.optimal_length(N)
        else:
            schedule = solver.StepSchedule.custom(rng.uniform(0.02, 0.8, N))
        trace = solver.run(p, schedule, N=N)

        v = np.sort(rng.uniform(0.05, 2.0, N + 2))
        if args.force_nonmonotone:
            v = v[::-1]
        weights = certify_mod.WeightSequence(v, h_last=float(rng.uniform(0.05, 1.0)))
        x_hat = p.x_star if trial % 2 == 0 else rng.standard_normal(dim)
        check = certify_mod.verify_lemma(trace, p, weights, x_hat)
        if check.slack < min_slack:
            min_slack = check.slack
            min_trial = trial
        if check.slack < SLACK_FLOOR:
            violations.append((trial, check.slack))

    print(f"certify trials={args.trials} N={N} seed={args.seed}")
    print(f"min slack = {min_slack!r} (trial {min_trial})")
    for trial, slack in violations:
        print(f"VIOLATION: trial {trial} (seed [{args.seed}, {trial}]) slack = {slack!r}")
    if violations:
        return 1
    print(f"OK: all slacks >= {SLACK_FLOOR}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subgradlab",
        description="Last-iterate experiments for projected subgradient methods.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--B", type=float, default=1.0, help="subgradient norm bound")
        sp.add_argument("--R", type=float, default=1.0, help="initial distance bound")
        sp.add_argument("--seed", type=int, default=0, help="seed for random instances")
        sp.add_argument("--dim", type=int, default=5, help="dimension of random instances")
        sp.add_argument(
            "--directions",
            type=int,
            default=8,
            help="random slope directions (doubled by antipodes)",
        )
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")

    run_p = sub.add_parser("run", help="run one method on one instance")
    run_p.add_argument("--method", choices=_METHODS, required=True)
    run_p.add_argument("--N", type=int, required=True, help="iteration count")
    run_p.add_argument("--h", type=float, help="normalized step size (constant method)")
    run_p.add_argument("--t", type=float, help="normalized step length (length method)")
    run_p.add_argument("--steps-file", help="file of raw step sizes (custom method)")
    run_p.add_argument("--h2", type=float, help="second step for the two-step instances")
    run_p.add_argument(
        "--instance", choices=("abs", "longstep", "lemma-i", "lemma-ii", "random"),
        required=True,
    )
    common(run_p)
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="sweep a grid of horizons and steps")
    sweep_p.add_argument(
        "--method",
        choices=("constant", "length", "optimal", "optimal-length"),
        default="constant",
    )
    sweep_p.add_argument("--N-list", required=True, help="comma-separated horizons")
    sweep_p.add_argument("--h-grid", help="step grid as min:max:step")
    sweep_p.add_argument(
        "--instance",
        choices=("worstcase", "abs", "longstep", "random"),
        default="worstcase",
        help="'worstcase' picks the tight construction per cell",
    )
    sweep_p.add_argument("--parallel", type=int, default=1, help="worker threads")
    common(sweep_p)
    sweep_p.set_defaults(func=_cmd_sweep)

    cert_p = sub.add_parser("certify", help="randomized inequality verification")
    cert_p.add_argument("--trials", type=int, required=True)
    cert_p.add_argument("--N", type=int, default=10)
    cert_p.add_argument("--seed", type=int, default=0)
    cert_p.add_argument(
        "--force-nonmonotone",
        action="store_true",
        help="debug: feed reversed weights and watch validation reject them",
    )
    cert_p.set_defaults(func=_cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SubgradLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_entry() -> None:
    sys.exit(main())
