"""Command-line front end.

Thin adapters over the library: every command's output is the direct
result of the corresponding library call.  Exit codes: 0 success, 2
configuration or validation error, 3 solver failure.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile

import click
import numpy as np

from . import assemblage as asmmod
from . import filtering, lhs, metrics, tomosim
from .errors import SolverFailure, SteerlabError

EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _fail(code: int, kind: str, message: str):
    json.dump({"error": kind, "message": message}, sys.stderr)
    sys.stderr.write("\n")
    sys.exit(code)


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, data) -> None:
    _write_atomic(path, json.dumps(data, indent=2) + "\n")


def _load_assemblage(path: str) -> asmmod.Assemblage:
    try:
        asm = asmmod.load(path)
    except (OSError, ValueError, KeyError, SteerlabError) as exc:
        _fail(EXIT_CONFIG, "parse-error", f"{path}: {exc}")
    bad = asmmod.validate(asm)
    if bad:
        _fail(EXIT_CONFIG, "invalid-assemblage", "; ".join(bad))
    return asm


seed_option = click.option(
    "--seed", type=int, envvar="STEERLAB_SEED", default=0, show_default=True,
    help="RNG seed (env: STEERLAB_SEED).")


@click.group()
def main():
    """Steering-distillation toolbox: assemblages, filters, metrics,
    robustness and the imbalance sweep.

    \b
    Examples:
      steerlab make alpha --alpha2 0.8 -o alpha.json
      steerlab distill --alpha2 0.8 --copies 2 --mode exact -o report.json
      steerlab fig3 --shots 100000 --out sweep.csv
    """


@main.command()
@click.argument("kind", type=click.Choice(["singlet", "alpha", "from-state-file"]))
@click.option("--alpha2", type=float, help="Schmidt weight for kind=alpha.")
@click.option("--state-file", type=click.Path(exists=True),
              help="JSON density matrix ([[re,im],...] rows) for kind=from-state-file.")
@click.option("-o", "--output", required=True, type=click.Path())
def make(kind, alpha2, state_file, output):
    """Construct a canonical assemblage and write it as JSON."""
    try:
        if kind == "singlet":
            asm = asmmod.singlet_assemblage()
        elif kind == "alpha":
            if alpha2 is None:
                _fail(EXIT_CONFIG, "missing-option", "--alpha2 is required")
            asm = asmmod.alpha_assemblage(alpha2)
        else:
            if state_file is None:
                _fail(EXIT_CONFIG, "missing-option", "--state-file is required")
            with open(state_file) as fh:
                rows = json.load(fh)
            state = np.array([[re + 1j * im for re, im in row]
                              for row in rows])
            asm = asmmod.from_state(state, asmmod.pauli_zx_projectors())
    except SteerlabError as exc:
        _fail(EXIT_CONFIG, type(exc).__name__, str(exc))
    _write_atomic(output, asmmod.dumps(asm))


@main.command("validate")
@click.argument("path", type=click.Path(exists=True))
def validate_cmd(path):
    """Check an assemblage file; nonzero exit on violations."""
    asm = _load_assemblage(path)
    click.echo(json.dumps({"valid": True, "m": asm.m, "o": asm.o,
                           "dim": asm.dim}))


@main.command("filter")
@click.argument("path", type=click.Path(exists=True))
@click.option("--alpha2", type=float, required=True,
              help="Filter parameter (Kraus elements depend on it).")
@click.option("--outcome", type=click.IntRange(0, 1), default=0,
              show_default=True)
@click.option("-o", "--output", required=True, type=click.Path())
def filter_cmd(path, alpha2, outcome, output):
    """Apply the protocol's local filter to an assemblage file."""
    asm = _load_assemblage(path)
    try:
        out, prob = filtering.apply_filter(
            asm, filtering.paper_filter(alpha2), outcome)
    except SteerlabError as exc:
        _fail(EXIT_CONFIG, type(exc).__name__, str(exc))
    _write_atomic(output, asmmod.dumps(out))
    click.echo(json.dumps({"outcome": outcome, "probability": prob}))


@main.command()
@click.option("--alpha2", type=float, required=True)
@click.option("--copies", "n_copies", type=int, required=True)
@click.option("--mode", type=click.Choice(["exact", "sampled"]),
              default="exact", show_default=True)
@click.option("--trials", type=int, default=100000, show_default=True)
@seed_option
@click.option("-o", "--output", required=True, type=click.Path(),
              help="Protocol report (JSON).")
@click.option("--assemblage-out", type=click.Path(),
              help="Write the averaged output assemblage here.")
def distill(alpha2, n_copies, mode, trials, seed, output, assemblage_out):
    """Run the N-copy distillation protocol and report branch statistics."""
    try:
        rate = filtering.rate_report(alpha2, n_copies)
        averaged = filtering.averaged_output(alpha2, n_copies)
        report = {
            "alpha2": alpha2,
            "copies": n_copies,
            "mode": mode,
            "p_success": rate.p_success,
            "p_fail": rate.p_fail,
            "rate": rate.rate,
            "asymptotic_rate": rate.asymptotic_rate,
            "fraction_before": metrics.singlet_fraction(
                asmmod.alpha_assemblage(alpha2)),
            "fraction_after": metrics.singlet_fraction(averaged),
        }
        if mode == "exact":
            branches = filtering.run_protocol_exact(alpha2, n_copies)
            report["branches"] = [
                {"omega": list(b.outcome_string),
                 "kept": list(b.kept_indices),
                 "probability": b.branch_probability}
                for b in branches]
        else:
            sampled = filtering.run_protocol_sampled(
                alpha2, n_copies, trials, seed)
            report["trials"] = trials
            report["seed"] = seed
            report["success_frequency"] = sampled.success_frequency
            report["branch_frequencies"] = [
                {"omega": list(k), "frequency": v}
                for k, v in sorted(sampled.branch_frequencies.items())]
    except SteerlabError as exc:
        _fail(EXIT_CONFIG, type(exc).__name__, str(exc))
    _write_json(output, report)
    if assemblage_out:
        _write_atomic(assemblage_out, asmmod.dumps(averaged))


@main.command("metrics")
@click.argument("paths", nargs=-1, type=click.Path(exists=True))
@click.option("--singlet-fraction", "fraction_path", type=click.Path(exists=True),
              help="Compute the singlet fraction of this single file.")
def metrics_cmd(paths, fraction_path):
    """Assemblage fidelity of two files, or a file's singlet fraction."""
    try:
        if fraction_path:
            asm = _load_assemblage(fraction_path)
            click.echo(json.dumps(
                {"fraction": metrics.singlet_fraction(asm)}))
            return
        if len(paths) != 2:
            _fail(EXIT_CONFIG, "usage",
                  "need two assemblage files or --singlet-fraction")
        a = _load_assemblage(paths[0])
        b = _load_assemblage(paths[1])
        click.echo(json.dumps(
            {"fidelity": metrics.assemblage_fidelity(a, b)}))
    except SteerlabError as exc:
        _fail(EXIT_CONFIG, type(exc).__name__, str(exc))


@main.command()
@click.argument("path", type=click.Path(exists=True))
@click.option("--flavor", type=click.Choice([lhs.FLAVOR_LHS,
                                             lhs.FLAVOR_GENERALIZED]),
              default=lhs.FLAVOR_LHS, show_default=True)
def robustness(path, flavor):
    """LHS-robustness of an assemblage file."""
    asm = _load_assemblage(path)
    try:
        result = lhs.lhs_robustness(asm, flavor)
    except SolverFailure as exc:
        _fail(EXIT_SOLVER, "SolverFailure", str(exc))
    except SteerlabError as exc:
        _fail(EXIT_CONFIG, type(exc).__name__, str(exc))
    click.echo(json.dumps({
        "t_star": result.t_star,
        "flavor": result.flavor,
        "solver_iters": result.solver_iters,
        "residual": result.residual,
    }))


@main.command()
@click.option("--grid", type=str, default=None,
              help="Comma-separated alpha^2 values (default: built-in grid).")
@click.option("--shots", type=int, default=100000, show_default=True)
@click.option("--seeds", "n_seeds", type=int, default=10, show_default=True,
              help="Tomography replicas per grid point.")
@seed_option
@click.option("--no-robustness", is_flag=True,
              help="Skip the robustness columns (faster).")
@click.option("--out", required=True, type=click.Path(),
              help="CSV output path; a .json sibling is written as well.")
@click.option("--svg", type=click.Path(), default=None,
              help="Optional SVG plot of the sweep.")
def fig3(grid, shots, n_seeds, seed, no_robustness, out, svg):
    """Sweep the imbalance axis: original vs. post-selected vs. averaged."""
    try:
        alpha2_grid = ([float(v) for v in grid.split(",")] if grid
                       else tomosim.default_grid())
        rows = tomosim.figure3_sweep(alpha2_grid, shots, seed,
                                     n_replicas=n_seeds,
                                     with_robustness=not no_robustness)
    except SolverFailure as exc:
        _fail(EXIT_SOLVER, "SolverFailure", str(exc))
    except (SteerlabError, ValueError) as exc:
        _fail(EXIT_CONFIG, type(exc).__name__, str(exc))
    tomosim.sweep_to_csv(rows, out)
    tomosim.sweep_to_json(rows, os.path.splitext(out)[0] + ".json")
    if svg:
        _plot_sweep(rows, svg)
    click.echo(json.dumps({"rows": len(rows), "out": out}))


def _plot_sweep(rows, path: str) -> None:
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    metrics_present = sorted({r.metric for r in rows}, reverse=True)
    fig, axes = plt.subplots(len(metrics_present), 1, figsize=(6, 7),
                             sharex=True, squeeze=False)
    styles = {tomosim.CURVE_ORIGINAL: ("o", "tab:red"),
              tomosim.CURVE_POSTSELECTED: ("x", "tab:blue"),
              tomosim.CURVE_AVERAGED: ("^", "tab:orange")}
    for ax, metric in zip(axes[:, 0], metrics_present):
        for curve, (marker, color) in styles.items():
            pts = sorted((r for r in rows
                          if r.metric == metric and r.curve == curve),
                         key=lambda r: r.delta)
            deltas = [p.delta for p in pts]
            ax.plot(deltas, [p.exact for p in pts], "-", color=color,
                    alpha=0.6, label=f"{curve} (exact)")
            ax.errorbar(deltas, [p.mean_reconstructed for p in pts],
                        yerr=[p.stddev_reconstructed for p in pts],
                        fmt=marker, color=color, capsize=3,
                        label=f"{curve} (reconstructed)")
        ax.set_ylabel(metric)
        ax.legend(fontsize=7)
    axes[-1, 0].set_xlabel("imbalance (alpha^2 - beta^2)")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


if __name__ == "__main__":
    main()
