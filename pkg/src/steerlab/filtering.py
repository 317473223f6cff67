"""One-sided local filtering and the N-copy distillation protocol.

Bob applies a dichotomic filter {K0, K1} to each of the first N-1 copies
of the shared assemblage; outcome 0 maps the partially entangled
assemblage exactly onto the singlet assemblage with probability 2*beta^2.
The last copy is kept unmeasured only when every filter failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import matcore
from .assemblage import (Assemblage, alpha_assemblage, mix,
                         singlet_assemblage, tensor_power)
from .errors import DimensionMismatch, DomainError, ZeroProbabilityBranch

MAX_EXACT_COPIES = 12


@dataclass(frozen=True)
class KrausFilter:
    """Dichotomic POVM given by Kraus elements, one per outcome."""

    elements: tuple

    def __post_init__(self):
        els = tuple(np.asarray(k, dtype=complex) for k in self.elements)
        for k in els:
            k.setflags(write=False)
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    def povm_element(self, outcome: int) -> np.ndarray:
        k = self.elements[outcome]
        return k.conj().T @ k

    def completeness_error(self) -> float:
        total = sum(self.povm_element(w) for w in range(self.n_outcomes))
        return float(np.max(np.abs(total - np.eye(self.dim))))


def paper_filter(alpha2: float) -> KrausFilter:
    """The protocol's filter: K0 = diag(beta/alpha, 1), K1 = diag(sqrt(alpha^2-beta^2)/alpha, 0)."""
    if not 0.5 < alpha2 < 1.0:
        raise DomainError(f"alpha2 must lie in (1/2, 1), got {alpha2}")
    alpha = np.sqrt(alpha2)
    beta = np.sqrt(1.0 - alpha2)
    k0 = np.diag([beta / alpha, 1.0]).astype(complex)
    k1 = np.diag([np.sqrt(alpha2 - beta ** 2) / alpha, 0.0]).astype(complex)
    return KrausFilter((k0, k1))


def apply_filter(asm: Assemblage, filt: KrausFilter,
                 outcome: int) -> tuple[Assemblage, float]:
    """Update an assemblage on Bob's filter outcome.

    Returns the renormalized post-measurement assemblage and the outcome
    probability Tr[M rho_B].  PSD Kraus elements are applied directly
    (K = sqrt(M) then); for non-PSD elements sqrt(M) is used instead.
    """
    if filt.dim != asm.dim:
        raise DimensionMismatch(
            f"filter dim {filt.dim} vs assemblage dim {asm.dim}")
    k = filt.elements[outcome]
    if matcore.is_hermitian(k) and matcore.min_eig(k) >= -matcore.PSD_TOL:
        op = k
    else:
        op = matcore.sqrtm_psd(k.conj().T @ k)
    rho_b = asm.rho_b()
    prob = float(np.trace(op @ rho_b @ op.conj().T).real)
    if prob < 1e-12:
        raise ZeroProbabilityBranch(
            f"outcome {outcome} has probability {prob:.3e}")
    comps = np.einsum("ij,axjk,lk->axil", op, asm.components, op.conj()) / prob
    return Assemblage(comps), prob


@dataclass(frozen=True)
class ProtocolResult:
    """One enumerated branch of the N-copy protocol."""

    n_copies: int
    outcome_string: tuple
    branch_probability: float
    alpha2: float

    @property
    def kept_indices(self) -> tuple:
        return tuple(i for i, w in enumerate(self.outcome_string) if w == 0)

    @cached_property
    def output(self) -> Assemblage:
        """Tensor product of the kept copies' assemblages (built lazily;
        large success branches are exponentially big in copy count)."""
        n_kept = len(self.kept_indices)
        if self.outcome_string[-1] == 0 and n_kept == 1:
            # every filter failed: the unmeasured last copy survives
            return alpha_assemblage(self.alpha2)
        return tensor_power(singlet_assemblage(), n_kept)

    def first_kept_output(self) -> Assemblage:
        """Single-copy marginal: the assemblage of the first kept copy."""
        if self.outcome_string[-1] == 0 and len(self.kept_indices) == 1:
            return alpha_assemblage(self.alpha2)
        return singlet_assemblage()


@dataclass(frozen=True)
class RateReport:
    n_copies: int
    p_success: float
    p_fail: float
    rate: float
    asymptotic_rate: float


def _check_protocol_args(alpha2: float, n_copies: int) -> float:
    if not 0.5 < alpha2 < 1.0:
        raise DomainError(f"alpha2 must lie in (1/2, 1), got {alpha2}")
    if not isinstance(n_copies, (int, np.integer)) or n_copies < 2:
        raise DomainError(f"protocol requires an integer N >= 2, got {n_copies}")
    return 2.0 * (1.0 - alpha2)  # per-copy success probability 2*beta^2


def run_protocol_exact(alpha2: float, n_copies: int) -> list[ProtocolResult]:
    """Enumerate all 2^(N-1) filter-outcome branches of the protocol.

    The last copy is never measured: its outcome is 0 (kept) only when all
    N-1 filters failed, otherwise 1 (discarded).
    """
    p0 = _check_protocol_args(alpha2, n_copies)
    if n_copies > MAX_EXACT_COPIES:
        raise DomainError(
            f"exact enumeration capped at N = {MAX_EXACT_COPIES}")
    results = []
    for bits in range(2 ** (n_copies - 1)):
        omega = [(bits >> i) & 1 for i in range(n_copies - 1)]
        omega.append(0 if all(w == 1 for w in omega) else 1)
        prob = float(np.prod([p0 if w == 0 else 1.0 - p0
                              for w in omega[:-1]]))
        results.append(ProtocolResult(n_copies, tuple(omega), prob, alpha2))
    return results


def p_fail(alpha2: float, n_copies: int) -> float:
    p0 = _check_protocol_args(alpha2, n_copies)
    return (1.0 - p0) ** (n_copies - 1)


def averaged_output(alpha2: float, n_copies: int) -> Assemblage:
    """Single-copy average over branches (first kept copy per branch):
    a convex mixture of the singlet and the unfiltered input assemblage."""
    pf = p_fail(alpha2, n_copies)
    return mix(singlet_assemblage(), alpha_assemblage(alpha2), 1.0 - pf)


def rate_report(alpha2: float, n_copies: int) -> RateReport:
    pf = p_fail(alpha2, n_copies)
    beta2 = 1.0 - alpha2
    return RateReport(
        n_copies=n_copies,
        p_success=1.0 - pf,
        p_fail=pf,
        rate=2.0 * beta2 * (n_copies - 1) / n_copies,
        asymptotic_rate=2.0 * beta2,
    )


@dataclass(frozen=True)
class SampledRun:
    """Monte-Carlo estimate of the protocol's branch statistics."""

    n_copies: int
    trials: int
    seed: int
    branch_frequencies: dict = field(repr=False)
    success_frequency: float
    averaged: Assemblage = field(repr=False)


def run_protocol_sampled(alpha2: float, n_copies: int, trials: int,
                         seed: int) -> SampledRun:
    """Sample outcome strings from the per-copy Bernoulli success law."""
    p0 = _check_protocol_args(alpha2, n_copies)
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    draws = rng.random((trials, n_copies - 1)) < p0  # True = outcome 0
    freqs: dict[tuple, float] = {}
    n_success = 0
    weight_singlet = 0.0
    for row in draws:
        omega = tuple(0 if hit else 1 for hit in row) + \
            ((0,) if not row.any() else (1,))
        freqs[omega] = freqs.get(omega, 0.0) + 1.0
        if row.any():
            n_success += 1
            weight_singlet += 1.0
    for k in freqs:
        freqs[k] /= trials
    weight_singlet /= trials
    averaged = mix(singlet_assemblage(), alpha_assemblage(alpha2),
                   weight_singlet)
    return SampledRun(n_copies, trials, seed, freqs,
                      n_success / trials, averaged)
