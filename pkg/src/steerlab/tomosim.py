"""Monte-Carlo tomography of assemblages and the distillation sweep.

Simulates finite-count Pauli tomography of every assemblage component,
reconstructs by linear inversion with PSD and no-signalling repair, and
sweeps the imbalance axis to compare original, post-selected and averaged
assemblages on the singlet fraction and LHS-robustness.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import lhs, matcore
from .assemblage import Assemblage, alpha_assemblage, mix, validate
from .errors import DomainError, InsufficientCounts
from .filtering import (apply_filter, averaged_output, paper_filter,
                        run_protocol_sampled)
from .metrics import singlet_fraction

PAULI_SETTINGS = {"X": matcore.PAULI_X, "Y": matcore.PAULI_Y,
                  "Z": matcore.PAULI_Z}


@dataclass(frozen=True)
class TomographyRun:
    """Counts per (outcome a, input x, Pauli setting, detector outcome)."""

    true_assemblage: Assemblage
    shots_per_setting: int
    seed: int
    counts: dict = field(repr=False)
    exact: bool = False


def _rng_for(seed, *indices) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, indices)]))


def simulate_counts(asm: Assemblage, shots: int, seed: int) -> TomographyRun:
    """Draw per-cell counts: for each (x, setting) the outcome a is
    multinomial with P(a|x), the detector click is Bernoulli in the
    conditional state's Pauli expectation."""
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    if asm.dim != 2:
        raise DomainError("tomography model requires a qubit on Bob's side")
    counts = {}
    probs = np.array([[asm.prob(a, x) for a in range(asm.o)]
                      for x in range(asm.m)])
    probs = probs / probs.sum(axis=1, keepdims=True)
    for x in range(asm.m):
        for si, (name, op) in enumerate(PAULI_SETTINGS.items()):
            rng = _rng_for(seed, x, si)
            n_per_a = rng.multinomial(shots, probs[x])
            for a in range(asm.o):
                rho = asm.conditional_state(a, x)
                expect = float(np.trace(rho @ op).real) if asm.prob(a, x) > 0 \
                    else 0.0
                p_plus = min(1.0, max(0.0, 0.5 * (1.0 + expect)))
                n_plus = int(rng.binomial(n_per_a[a], p_plus))
                counts[(a, x, name, +1)] = n_plus
                counts[(a, x, name, -1)] = int(n_per_a[a]) - n_plus
    return TomographyRun(asm, shots, seed, counts)


def exact_statistics_run(asm: Assemblage) -> TomographyRun:
    """Infinite-statistics limit: expected (real-valued) counts per cell."""
    counts = {}
    for x in range(asm.m):
        for name, op in PAULI_SETTINGS.items():
            for a in range(asm.o):
                p = asm.prob(a, x)
                rho = asm.conditional_state(a, x)
                expect = float(np.trace(rho @ op).real) if p > 0 else 0.0
                counts[(a, x, name, +1)] = p * 0.5 * (1.0 + expect)
                counts[(a, x, name, -1)] = p * 0.5 * (1.0 - expect)
    return TomographyRun(asm, 1, 0, counts, exact=True)


def _psd_project_keep_trace(mat: np.ndarray) -> np.ndarray:
    """Clamp negative eigenvalues, rescaling the rest to preserve trace."""
    mat = matcore.hermitianize(mat)
    w, v = np.linalg.eigh(mat)
    tr = float(w.sum())
    w = np.maximum(w, 0.0)
    if w.sum() > 0 and tr > 0:
        w = w * (tr / w.sum())
    return matcore.hermitianize((v * w) @ v.conj().T)


def _nosig_project(comps: np.ndarray) -> np.ndarray:
    """Metric projection onto {no-signalling, unit total trace}."""
    o, m, d, _ = comps.shape
    sums = comps.sum(axis=0)
    rho_bar = sums.mean(axis=0)
    rho_bar = rho_bar + (1.0 - np.trace(rho_bar).real) / d * np.eye(d)
    return comps + (rho_bar[None] - sums)[None] / o


def reconstruct(run: TomographyRun) -> tuple[Assemblage, float]:
    """Linear inversion per component, then PSD projection and
    no-signalling repair (iterated to convergence so the output is a
    valid assemblage).  Returns (assemblage, max projection residual)."""
    asm = run.true_assemblage
    o, m, d = asm.o, asm.m, asm.dim
    raw = np.empty((o, m, d, d), dtype=complex)
    for a in range(o):
        for x in range(m):
            bloch = np.zeros((d, d), dtype=complex)
            p_est = 0.0
            for name, op in PAULI_SETTINGS.items():
                n_plus = run.counts.get((a, x, name, +1), 0)
                n_minus = run.counts.get((a, x, name, -1), 0)
                total = n_plus + n_minus
                if total <= 0:
                    # empty cell: acceptable only for a truly-zero component
                    if asm.prob(a, x) > 1e-12:
                        raise InsufficientCounts(
                            f"no counts for component ({a}|{x}) setting {name}")
                    continue
                bloch += (n_plus - n_minus) / total * op
                # exact runs store expected probabilities, not raw counts
                p_est += total if run.exact else total / run.shots_per_setting
            p_est /= len(PAULI_SETTINGS)
            raw[a, x] = p_est * 0.5 * (np.eye(d) + bloch)
    projected = np.stack([
        np.stack([_psd_project_keep_trace(raw[a, x]) for x in range(m)])
        for a in range(o)])
    # proportional no-signalling redistribution
    sums = projected.sum(axis=0)
    rho_bar = sums.mean(axis=0)
    traces = np.array([[max(np.trace(projected[a, x]).real, 0.0)
                        for x in range(m)] for a in range(o)])
    col = traces.sum(axis=0)
    repaired = projected.copy()
    for x in range(m):
        corr = rho_bar - sums[x]
        for a in range(o):
            share = traces[a, x] / col[x] if col[x] > 0 else 1.0 / o
            repaired[a, x] = projected[a, x] + share * corr
    # iterate PSD / no-signalling projections until both hold
    for _ in range(500):
        if not validate(Assemblage(repaired), tol=1e-10):
            break
        repaired = np.stack([
            np.stack([matcore.psd_clip(repaired[a, x]) for x in range(m)])
            for a in range(o)])
        repaired = _nosig_project(repaired)
    out = Assemblage(repaired)
    residual = float(np.max(np.abs(out.components - raw)))
    return out, residual


def tomography_fraction(asm: Assemblage, shots: int, seed: int) -> float:
    rec, _ = reconstruct(simulate_counts(asm, shots, seed))
    return singlet_fraction(rec)


CURVE_ORIGINAL = "original"
CURVE_POSTSELECTED = "postselected"
CURVE_AVERAGED = "averaged"

CSV_COLUMNS = ("delta", "curve", "metric", "exact", "mean_reconstructed",
               "stddev_reconstructed", "shots", "seed")


@dataclass(frozen=True)
class SweepRow:
    delta: float
    curve: str
    metric: str
    exact: float
    mean_reconstructed: float
    stddev_reconstructed: float
    shots: int
    seed: int


def default_grid() -> list[float]:
    """alpha^2 grid with imbalance delta = 2*alpha^2 - 1 up to 0.81."""
    return [0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90]


def figure3_sweep(alpha2_grid, shots: int, seed: int, n_replicas: int = 10,
                  with_robustness: bool = True,
                  robustness_flavor: str = lhs.FLAVOR_LHS) -> list[SweepRow]:
    """Singlet fraction and LHS-robustness of the original, post-selected
    and two-copy averaged assemblages, exact and tomographically
    reconstructed, across the imbalance grid."""
    rows = []
    for pi, alpha2 in enumerate(alpha2_grid):
        if not 0.5 < alpha2 < 1.0:
            raise DomainError(f"grid point {alpha2} outside (1/2, 1)")
        delta = 2.0 * alpha2 - 1.0
        original = alpha_assemblage(alpha2)
        postselected, _ = apply_filter(original, paper_filter(alpha2), 0)
        exact_asms = {
            CURVE_ORIGINAL: original,
            CURVE_POSTSELECTED: postselected,
            CURVE_AVERAGED: averaged_output(alpha2, 2),
        }
        recon: dict[str, dict[str, list[float]]] = {
            c: {"fraction": [], "robustness": []} for c in exact_asms}
        for rep in range(n_replicas):
            sub = int(np.random.SeedSequence(
                [int(seed), pi, rep]).generate_state(1)[0])
            orig_rec, _ = reconstruct(simulate_counts(original, shots, sub))
            post_rec, _ = reconstruct(
                simulate_counts(postselected, shots, sub + 1))
            sampled = run_protocol_sampled(alpha2, 2, shots, sub)
            avg_rec = mix(post_rec, orig_rec, sampled.success_frequency)
            for curve, rec in ((CURVE_ORIGINAL, orig_rec),
                               (CURVE_POSTSELECTED, post_rec),
                               (CURVE_AVERAGED, avg_rec)):
                recon[curve]["fraction"].append(singlet_fraction(rec))
                if with_robustness:
                    recon[curve]["robustness"].append(
                        lhs.lhs_robustness(rec, robustness_flavor).t_star)
        for curve, asm in exact_asms.items():
            exact_vals = {"fraction": singlet_fraction(asm)}
            if with_robustness:
                exact_vals["robustness"] = lhs.lhs_robustness(
                    asm, robustness_flavor).t_star
            for metric, exact_val in exact_vals.items():
                vals = recon[curve][metric]
                rows.append(SweepRow(
                    delta=delta, curve=curve, metric=metric,
                    exact=exact_val,
                    mean_reconstructed=float(np.mean(vals)) if vals else
                    float("nan"),
                    stddev_reconstructed=float(np.std(vals)) if vals else
                    float("nan"),
                    shots=shots, seed=seed))
    return rows


def sweep_to_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([getattr(row, c) for c in CSV_COLUMNS])


def sweep_to_json(rows, path) -> None:
    data = [{c: getattr(row, c) for c in CSV_COLUMNS} for row in rows]
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
