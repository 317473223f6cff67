"""Assemblage fidelity, singlet-assemblage fraction and their closed forms.

The assemblage fidelity is the worst case over Alice's inputs of the
summed Uhlmann fidelities between corresponding components.  For the
protocol's averaged output it reduces to the closed-form min{F0, F1},
with F1 always attaining the minimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import matcore
from .assemblage import Assemblage, singlet_assemblage
from .errors import DomainError, ShapeMismatch


def _check_shapes(asm1: Assemblage, asm2: Assemblage) -> None:
    if (asm1.m, asm1.o, asm1.dim) != (asm2.m, asm2.o, asm2.dim):
        raise ShapeMismatch(
            f"(m,o,dim) {(asm1.m, asm1.o, asm1.dim)} vs "
            f"{(asm2.m, asm2.o, asm2.dim)}")


def per_input_fidelities(asm1: Assemblage, asm2: Assemblage) -> np.ndarray:
    """Sum_a F(sigma_{a|x}, xi_{a|x}) for each input x."""
    _check_shapes(asm1, asm2)
    return np.array([
        sum(matcore.uhlmann_fidelity(asm1.components[a, x],
                                     asm2.components[a, x])
            for a in range(asm1.o))
        for x in range(asm1.m)])


def assemblage_fidelity(asm1: Assemblage, asm2: Assemblage) -> float:
    """min over x of the per-input summed component fidelities."""
    return float(per_input_fidelities(asm1, asm2).min())


def assemblage_fidelity_dist(asm1: Assemblage, asm2: Assemblage) -> float:
    """Equivalent form: minimize the P_X-average of per-input fidelities
    over input distributions (a linear program over the simplex; the
    optimum sits at a deterministic distribution)."""
    g = per_input_fidelities(asm1, asm2)
    res = linprog(g, A_eq=np.ones((1, len(g))), b_eq=[1.0],
                  bounds=[(0.0, 1.0)] * len(g), method="highs")
    if not res.success:
        raise DomainError(f"simplex minimization failed: {res.message}")
    return float(g @ res.x)


def singlet_fraction(asm: Assemblage) -> float:
    """Assemblage fidelity against the singlet assemblage.

    Cross-checked internally against the pure-target shortcut
    (1/sqrt(2)) min_x sum_a sqrt(<phi_{a,x}| sigma_{a|x} |phi_{a,x}>).
    """
    if (asm.m, asm.o, asm.dim) != (2, 2, 2):
        raise ShapeMismatch("singlet fraction requires m = o = 2, dim = 2")
    target = singlet_assemblage()
    value = assemblage_fidelity(asm, target)
    kets = ((matcore.KET0, matcore.KET1),
            (matcore.KET_PLUS, matcore.KET_MINUS))
    shortcut = min(
        sum(np.sqrt(max(0.0, float(
            (kets[x][a].conj() @ asm.components[a, x] @ kets[x][a]).real)))
            for a in range(2)) / np.sqrt(2.0)
        for x in range(2))
    assert abs(value - shortcut) < 1e-10, \
        f"pure-target shortcut disagrees: {value} vs {shortcut}"
    return value


@dataclass(frozen=True)
class ClosedFormReport:
    """Closed-form singlet fraction of the protocol's averaged output."""

    alpha2: float
    n_copies: int
    delta: float
    f0: float
    f1: float
    u: float
    v: float
    fraction: float


def closed_forms(alpha2: float, n_copies: int) -> ClosedFormReport:
    """F0, F1 and the auxiliary quantities u = 2 F0^2 - 1, v = 2 F1^2 - 1.

    P_fail = delta^(N-1) with delta the reduced-state imbalance; the
    fraction is min{F0, F1}, which always equals F1.
    """
    if not 0.5 < alpha2 < 1.0:
        raise DomainError(f"alpha2 must lie in (1/2, 1), got {alpha2}")
    if n_copies < 1:
        raise DomainError(f"n_copies must be >= 1, got {n_copies}")
    alpha = np.sqrt(alpha2)
    beta = np.sqrt(1.0 - alpha2)
    delta = alpha2 - beta ** 2
    pf = delta ** (n_copies - 1)
    f0 = 0.5 * (np.sqrt(1.0 + pf * delta) + np.sqrt(1.0 - pf * delta))
    f1 = np.sqrt(1.0 - 0.5 * pf * (alpha - beta) ** 2)
    u = np.sqrt(1.0 - delta ** (2 * n_copies))
    v = 1.0 - delta ** (n_copies - 1) * (alpha - beta) ** 2
    return ClosedFormReport(alpha2=alpha2, n_copies=n_copies, delta=delta,
                            f0=float(f0), f1=float(f1), u=float(u),
                            v=float(v), fraction=float(min(f0, f1)))


def bob_unitary_spotcheck(asm: Assemblage, samples: int = 1000,
                          seed: int = 0) -> float:
    """Diagnostic: max singlet fraction over a random grid of Bob-side
    unitaries U applied as sigma -> U sigma U†.

    The fraction itself is defined without this optimization; numerically
    the optimum tends to coincide with the unrotated value.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    best = singlet_fraction(asm)
    for _ in range(samples):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(g)
        u = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        rotated = Assemblage(np.einsum(
            "ij,axjk,lk->axil", u, asm.components, u.conj()))
        best = max(best, singlet_fraction(rotated))
    return best
