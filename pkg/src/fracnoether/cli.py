"""Command-line pipeline: solve problems, evaluate conserved-quantity
candidates, and run symmetry checks, emitting CSV files.

Commands (``fracnoether <command> --config <path> [--out <dir>]``):

* ``solve`` — for each configured order, solve the boundary-value
  problem and write ``solution_alpha<tag>.csv`` (``t,x1,...,xn``) and
  ``residual_alpha<tag>.csv`` (the stationarity residual per node).
* ``noether`` — solve (or take the preset trajectory), evaluate the
  configured quantity series, write ``quantity_alpha<tag>.csv`` and a
  ``drift_summary.csv``; exits 3 when a quantity flagged
  ``expected_conserved`` drifts beyond the configured tolerance.
* ``check`` — run the five structural checks for the configured group
  and Lagrangian and write ``checks.csv``; exits 3 unless all pass.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 check or conservation failure.  Nothing else is ever returned.

Orders in a sweep are solved concurrently (``FRACNOETHER_THREADS`` caps
the pool); files are written serially in ascending order, so output
bytes do not depend on the thread count.  Values are serialized with 17
significant digits and masked nodes as empty fields; every file starts
with ``#`` comment lines recording the problem, the operator
conventions, and the tolerances in force.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import fracops as F
from . import lagrangian as LG
from . import noether as NO
from . import presets as PR
from . import solver as SV
from . import symmetry as SY
from .config import (
    DEFAULT_GROUP_TOLERANCE,
    ConfigError,
    RunConfig,
    load_config,
)

CHAIN_RULE_S = 0.5


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _alpha_tag(alpha: float) -> str:
    return format(float(alpha), "g")


def _comment_lines(config: RunConfig, command: str, alpha=None):
    problem = f"# problem = {config.problem}; interval = [{config.interval[0]:g}, {config.interval[1]:g}]; n_sub = {config.n_sub}"
    if config.problem != "example2":
        problem += f"; kappa = {config.kappa:g}"
    if config.omega is not None:
        problem += f"; omega = {config.omega:g}"
    lines = [
        f"# fracnoether {command}",
        problem,
        f"# conventions: D_a+ = {config.derivative_convention}, D_b- = rl; "
        "classical derivatives by central differences",
        f"# tolerances: drift {config.drift_tolerance:g}; "
        f"group laws {DEFAULT_GROUP_TOLERANCE:g}; "
        "chain rule and invariance 10x composition residual",
    ]
    if alpha is not None:
        lines.append(f"# alpha = {_alpha_tag(alpha)}")
    return lines


def _write_csv(path, comments, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in comments:
            handle.write(line + "\n")
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(row) + "\n")


def _node_rows(grid, values, mask):
    """CSV rows ``t, v1, ..., vk`` with masked nodes left empty."""
    values = np.atleast_2d(values.T).T  # (n_nodes, k)
    rows = []
    for k, t in enumerate(grid.nodes):
        if mask is None or mask[k]:
            fields = [_fmt(v) for v in values[k]]
        else:
            fields = [""] * values.shape[1]
        rows.append([_fmt(t)] + fields)
    return rows


def _thread_count(n_jobs: int) -> int:
    raw = os.environ.get("FRACNOETHER_THREADS")
    if raw is not None:
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(
                f"FRACNOETHER_THREADS must be a positive integer, got {raw!r}"
            ) from None
        if threads < 1:
            raise ConfigError(
                f"FRACNOETHER_THREADS must be a positive integer, got {raw!r}"
            )
    else:
        threads = os.cpu_count() or 1
    return max(1, min(threads, n_jobs))


def _map_alphas(alphas, worker):
    """Run ``worker(alpha)`` for each distinct order, possibly in
    parallel; results come back keyed and iterated in ascending order."""
    ordered = sorted(set(alphas))
    threads = _thread_count(len(ordered))
    if threads == 1:
        return {a: worker(a) for a in ordered}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {a: pool.submit(worker, a) for a in ordered}
        return {a: futures[a].result() for a in ordered}


# ---------------------------------------------------------------------------
# problem realization


def _grid(config: RunConfig):
    return F.make_grid(config.interval[0], config.interval[1], config.n_sub)


def _boundary(config: RunConfig):
    half = config.dim
    head = np.array(config.bc_data[:half])
    tail = np.array(config.bc_data[half:])
    if config.bc_kind == "dirichlet":
        return SV.dirichlet(head, tail)
    return SV.initial(head, tail)


def _lagrangian(config: RunConfig, alpha):
    if config.problem == "oscillator":
        return PR.oscillator_lagrangian(config.omega)
    if config.problem == "example2":
        return PR.example2_lagrangian(alpha)
    return PR.kappa_lagrangian(config.kappa, dim=config.dim)


def _make_group(config: RunConfig):
    params = config.group_params
    if config.group == "time_translation":
        return SY.time_translation()
    if config.group == "dilation":
        return SY.dilation(params[0] if params else 1.0)
    if config.group == "space_only":
        return SY.space_rotation()
    if config.group == "localized_dilation":
        base = params[1] if len(params) > 1 else config.interval[0]
        return SY.localized_dilation(params[0], base)
    return SY.quadratic_time()


def _trajectory(config: RunConfig, alpha):
    grid = _grid(config)
    if config.problem == "example2":
        return PR.example2_trajectory(grid)
    problem = SV.LinearProblem(
        grid=grid,
        alpha=alpha,
        dim=config.dim,
        kappa=config.kappa,
        bc=_boundary(config),
    )
    return SV.solve(problem).solution


# ---------------------------------------------------------------------------
# commands


def cmd_solve(config: RunConfig) -> int:
    if config.problem == "example2":
        raise ConfigError(
            "problem 'example2' has no linear solve; use the noether or check command"
        )
    results = _map_alphas(config.alphas, lambda a: _trajectory(config, a))
    os.makedirs(config.outputs, exist_ok=True)
    names = [f"x{j + 1}" for j in range(config.dim)]
    for alpha, x in results.items():
        tag = _alpha_tag(alpha)
        comments = _comment_lines(config, "solve", alpha)
        _write_csv(
            os.path.join(config.outputs, f"solution_alpha{tag}.csv"),
            comments,
            ["t"] + names,
            _node_rows(x.grid, x.values, None),
        )
        residual = LG.el_residual(_lagrangian(config, alpha), x, alpha)
        _write_csv(
            os.path.join(config.outputs, f"residual_alpha{tag}.csv"),
            comments,
            ["t"] + [f"r{j + 1}" for j in range(config.dim)],
            _node_rows(x.grid, residual.values, residual.mask),
        )
    return 0


def _quantity(config: RunConfig, x, alpha):
    L = _lagrangian(config, alpha)
    if config.quantity == "noether":
        return NO.noether_quantity(
            L,
            _make_group(config),
            x,
            alpha,
            variant=config.conslaw_variant,
            convention=config.derivative_convention,
        )
    if config.quantity == "autonomous":
        return NO.autonomous_quantity(
            L, x, alpha, convention=config.derivative_convention
        )
    if config.quantity == "oscillator":
        return NO.oscillator_quantity(x, config.omega, alpha)
    return LG.second_el_quantity(L, x, alpha)


def cmd_noether(config: RunConfig) -> int:
    def worker(alpha):
        x = _trajectory(config, alpha)
        return _quantity(config, x, alpha)

    results = _map_alphas(config.alphas, worker)
    os.makedirs(config.outputs, exist_ok=True)
    convention = (
        config.derivative_convention
        if config.quantity in ("noether", "autonomous")
        else "caputo"
    )
    summary = []
    offenders = []
    for alpha, series in results.items():
        tag = _alpha_tag(alpha)
        _write_csv(
            os.path.join(config.outputs, f"quantity_alpha{tag}.csv"),
            _comment_lines(config, "noether", alpha),
            ["t", "I"],
            _node_rows(series.grid, series.values[:, None], series.mask),
        )
        report = NO.drift(series)
        summary.append(
            [
                _fmt(alpha),
                _fmt(report.min),
                _fmt(report.max),
                _fmt(report.mean),
                _fmt(report.relative_drift),
                convention,
            ]
        )
        if report.relative_drift > config.drift_tolerance:
            offenders.append((alpha, report.relative_drift))
    _write_csv(
        os.path.join(config.outputs, "drift_summary.csv"),
        _comment_lines(config, "noether"),
        ["alpha", "min", "max", "mean", "relative_drift", "convention"],
        summary,
    )
    if config.expected_conserved and offenders:
        alpha, worst = offenders[0]
        print(
            f"conservation failure: relative drift {worst:.3e} exceeds "
            f"{config.drift_tolerance:g} at alpha = {_alpha_tag(alpha)}",
            file=sys.stderr,
        )
        return 3
    return 0


def _probe_trajectory(grid, dim):
    """Smooth monomial trajectory (t, t^2, ...) anchoring the
    discretization tolerance; solver output at alpha < 1 has boundary
    layers that would inflate it."""
    columns = [grid.nodes ** (j + 1) for j in range(dim)]
    return F.make_trajectory(grid, np.column_stack(columns))


def cmd_check(config: RunConfig) -> int:
    alpha = config.alphas[0]
    group = _make_group(config)
    x = _trajectory(config, alpha)
    L = _lagrangian(config, alpha)
    probe = _probe_trajectory(x.grid, config.dim)

    composition = F.check_composition(x.grid, alpha, probe)
    # floor keeps interpolation rounding from failing structurally
    # commuting groups when the composition residual is itself exact
    tol_discrete = max(
        10.0 * max(composition.caputo_residual, composition.rl_residual),
        1e-9,
    )
    reports = [
        ("group_law", SY.check_group_law(group, tol=DEFAULT_GROUP_TOLERANCE)),
        ("admissible", SY.check_admissible(group, tol=DEFAULT_GROUP_TOLERANCE)),
        (
            "localization",
            SY.check_localization(
                group, config.interval[0], tol=DEFAULT_GROUP_TOLERANCE
            ),
        ),
        (
            "chain_rule",
            SY.check_chain_rule(group, probe, alpha, CHAIN_RULE_S, tol=tol_discrete),
        ),
        (
            "invariance",
            SY.check_invariance(L, group, x, alpha, tol=tol_discrete),
        ),
    ]

    os.makedirs(config.outputs, exist_ok=True)
    comments = _comment_lines(config, "check", alpha)
    comments.append(
        f"# group = {config.group}; chain rule at s = {CHAIN_RULE_S:g}; "
        f"discretization tolerance = {tol_discrete:.17g}"
    )
    rows = [
        [name, "true" if r.passed else "false", _fmt(r.max_violation)]
        for name, r in reports
    ]
    _write_csv(
        os.path.join(config.outputs, "checks.csv"),
        comments,
        ["check", "passed", "max_violation"],
        rows,
    )
    failed = [name for name, r in reports if not r.passed]
    if failed:
        print(f"checks failed: {', '.join(failed)}", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracnoether",
        description="Fractional variational solves and conservation-law checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("solve", "solve the configured boundary-value problem per order"),
        ("noether", "evaluate the configured conserved-quantity series"),
        ("check", "run the structural symmetry checks"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", required=True, help="path to a key = value file")
        cmd.add_argument("--out", default=None, help="override the outputs directory")
    return parser


_COMMANDS = {"solve": cmd_solve, "noether": cmd_noether, "check": cmd_check}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        config = load_config(args.config)
        if args.out is not None:
            config = replace(config, outputs=args.out)
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SV.NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
