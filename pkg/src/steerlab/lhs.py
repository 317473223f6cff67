"""LHS-model membership and LHS-robustness of steering.

Membership asks whether an assemblage decomposes over deterministic
response strategies with PSD weights; robustness measures how much
unsteerable noise must be mixed in before such a decomposition exists.
Both are semidefinite programs, solved with an interior-point solver;
an independent alternating-projections + bisection oracle cross-checks
the robustness values at coarse tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from .assemblage import Assemblage
from .errors import DomainError, SolverFailure

MEMBERSHIP_GAP = 1e-7
ROBUSTNESS_TOL = 1e-6
ORACLE_TOL = 1e-4
MAX_STRATEGIES = 64

FLAVOR_LHS = "lhs"
FLAVOR_GENERALIZED = "generalized"


def deterministic_strategies(m: int, o: int) -> list[tuple]:
    """All o^m response functions x -> a, as tuples indexed by x."""
    n = o ** m
    if n > MAX_STRATEGIES:
        raise DomainError(f"o^m = {n} exceeds cap {MAX_STRATEGIES}")
    return list(itertools.product(range(o), repeat=m))


@dataclass(frozen=True)
class LhsModel:
    """Decomposition sigma_{a|x} = sum_lambda [lambda(x) == a] * weight_lambda."""

    strategies: tuple
    weights: tuple = field(repr=False)

    def components(self, m: int, o: int) -> np.ndarray:
        d = self.weights[0].shape[0]
        c = np.zeros((o, m, d, d), dtype=complex)
        for lam, w in zip(self.strategies, self.weights):
            for x in range(m):
                c[lam[x], x] += w
        return c

    def residual_against(self, target: np.ndarray) -> float:
        o, m = target.shape[:2]
        return float(np.max(np.abs(self.components(m, o) - target)))

    def total_weight(self) -> float:
        return float(sum(np.trace(w).real for w in self.weights))


@dataclass(frozen=True)
class RobustnessResult:
    t_star: float
    certificate: LhsModel
    noise: Assemblage | None
    flavor: str
    solver_iters: int
    residual: float


def _solve(problem: cp.Problem) -> int:
    """Solve with interior-point solvers, returning the iteration count."""
    last_exc = None
    for solver in (cp.CLARABEL, cp.CVXOPT):
        try:
            problem.solve(solver=solver)
        except cp.error.SolverError as exc:
            last_exc = exc
            continue
        if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            stats = problem.solver_stats
            return int(stats.num_iters or 0) if stats else 0
    raise SolverFailure(f"no solver converged (last status "
                        f"{problem.status!r}): {last_exc}")


def _strategy_sum(variables, strategies, a: int, x: int):
    terms = [v for v, lam in zip(variables, strategies) if lam[x] == a]
    return cp.sum(terms) if terms else None


def lhs_membership(asm: Assemblage) -> tuple[bool, LhsModel | None]:
    """Semidefinite feasibility of an LHS decomposition.

    Minimizes the worst-case reconstruction gap s; the assemblage is a
    member iff the optimal gap is below ``MEMBERSHIP_GAP``.
    """
    strategies = deterministic_strategies(asm.m, asm.o)
    d = asm.dim
    sig = [cp.Variable((d, d), hermitian=True) for _ in strategies]
    s = cp.Variable(nonneg=True)
    eye = np.eye(d)
    cons = [v >> 0 for v in sig]
    for a in range(asm.o):
        for x in range(asm.m):
            expr = _strategy_sum(sig, strategies, a, x)
            if expr is None:
                expr = np.zeros((d, d))
            diff = expr - asm.components[a, x]
            cons += [diff << s * eye, diff >> -s * eye]
    problem = cp.Problem(cp.Minimize(s), cons)
    _solve(problem)
    gap = float(s.value)
    if gap > MEMBERSHIP_GAP:
        return False, None
    model = LhsModel(tuple(strategies),
                     tuple(_psd_clean(v.value) for v in sig))
    return True, model


def _psd_clean(mat: np.ndarray) -> np.ndarray:
    """Hermitize and clip tiny negative eigenvalues from solver output."""
    mat = (mat + mat.conj().T) / 2.0
    w, v = np.linalg.eigh(mat)
    w = np.maximum(w, 0.0)
    return (v * w) @ v.conj().T


def lhs_robustness(asm: Assemblage,
                   flavor: str = FLAVOR_LHS) -> RobustnessResult:
    """Minimal noise weight t such that (sigma + t*xi)/(1+t) is LHS.

    ``flavor="lhs"`` restricts the noise assemblage xi to be LHS itself;
    ``flavor="generalized"`` allows arbitrary noise assemblages.
    """
    if flavor not in (FLAVOR_LHS, FLAVOR_GENERALIZED):
        raise DomainError(f"unknown robustness flavor {flavor!r}")
    strategies = deterministic_strategies(asm.m, asm.o)
    d = asm.dim
    sig = [cp.Variable((d, d), hermitian=True) for _ in strategies]
    cons = [v >> 0 for v in sig]
    xi = None
    if flavor == FLAVOR_LHS:
        xi = [cp.Variable((d, d), hermitian=True) for _ in strategies]
        cons += [v >> 0 for v in xi]
    for a in range(asm.o):
        for x in range(asm.m):
            expr = _strategy_sum(sig, strategies, a, x)
            if expr is None:
                expr = np.zeros((d, d))
            if flavor == FLAVOR_LHS:
                noise_expr = _strategy_sum(xi, strategies, a, x)
                if noise_expr is None:
                    noise_expr = np.zeros((d, d))
                cons.append(expr - noise_expr == asm.components[a, x])
            else:
                cons.append(expr - asm.components[a, x] >> 0)
    objective = cp.Minimize(cp.real(sum(cp.trace(v) for v in sig)) - 1.0)
    problem = cp.Problem(objective, cons)
    iters = _solve(problem)
    t_star = max(0.0, float(problem.value))

    weights = tuple(_psd_clean(v.value) / (1.0 + t_star) for v in sig)
    certificate = LhsModel(tuple(strategies), weights)

    noise = None
    if t_star > ROBUSTNESS_TOL:
        if flavor == FLAVOR_LHS:
            noise_model = LhsModel(
                tuple(strategies), tuple(_psd_clean(v.value) for v in xi))
            noise_comp = noise_model.components(asm.m, asm.o) / t_star
        else:
            slack = np.zeros_like(np.asarray(asm.components))
            sig_comp = LhsModel(
                tuple(strategies),
                tuple(_psd_clean(v.value) for v in sig)).components(asm.m, asm.o)
            slack = sig_comp - asm.components
            noise_comp = np.stack([
                np.stack([_psd_clean(slack[a, x]) for x in range(asm.m)])
                for a in range(asm.o)]) / t_star
        noise = Assemblage(noise_comp)

    mixed = asm.components / (1.0 + t_star)
    if noise is not None:
        mixed = mixed + t_star / (1.0 + t_star) * noise.components
    residual = certificate.residual_against(np.asarray(mixed))
    return RobustnessResult(t_star=t_star, certificate=certificate,
                            noise=noise, flavor=flavor,
                            solver_iters=iters, residual=residual)


# singlet-assemblage LHS-robustness, oracle-established and frozen as a
# regression constant; numerically (sqrt(2) - 1) / 2
SINGLET_ROBUSTNESS = 0.2071067811865475


# --- alternating-projections oracle ------------------------------------

class _HermVec:
    """Batched real vectorization of Hermitian d x d blocks."""

    def __init__(self, d: int):
        self.d = d
        self.iu = np.triu_indices(d, 1)
        self.params = d * d

    def vec(self, blocks: np.ndarray) -> np.ndarray:
        di = np.arange(self.d)
        return np.concatenate([
            blocks[..., di, di].real,
            blocks[..., self.iu[0], self.iu[1]].real,
            blocks[..., self.iu[0], self.iu[1]].imag], axis=-1)

    def unvec(self, vecs: np.ndarray) -> np.ndarray:
        d = self.d
        nb = vecs.shape[0]
        out = np.zeros((nb, d, d), dtype=complex)
        di = np.arange(d)
        out[:, di, di] = vecs[:, :d]
        n_off = len(self.iu[0])
        off = vecs[:, d:d + n_off] + 1j * vecs[:, d + n_off:]
        out[:, self.iu[0], self.iu[1]] = off
        out[:, self.iu[1], self.iu[0]] = off.conj()
        return out


def _psd_project_batch(blocks: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(blocks)
    w = np.maximum(w, 0.0)
    return np.einsum("bij,bj,bkj->bik", v, w, v.conj())


def _oracle_system(m: int, o: int, d: int, flavor: str):
    """Constraint matrix for the fixed-t feasibility problem.

    Unknowns are Hermitian blocks stacked as real vectors: L model blocks
    followed by L noise blocks (lhs flavor) or o*m slack blocks
    (generalized flavor).
    """
    strategies = deterministic_strategies(m, o)
    hv = _HermVec(d)
    p = hv.params
    n_model = len(strategies)
    n_second = n_model if flavor == FLAVOR_LHS else o * m
    nb = n_model + n_second
    rows = []
    for a in range(o):
        for x in range(m):
            for r in range(p):
                row = np.zeros(nb * p)
                for li, lam in enumerate(strategies):
                    if lam[x] == a:
                        row[li * p + r] += 1.0
                        if flavor == FLAVOR_LHS:
                            row[(n_model + li) * p + r] -= 1.0
                if flavor == FLAVOR_GENERALIZED:
                    row[(n_model + a * m + x) * p + r] -= 1.0
                rows.append(row)
    # trace normalization row: pins the noise weight to t
    trace_row = np.zeros(nb * p)
    group = range(n_model, nb) if flavor == FLAVOR_LHS else range(n_model)
    for bi in group:
        trace_row[bi * p:bi * p + d] = 1.0
    rows.append(trace_row)
    mat = np.array(rows)
    return mat, np.linalg.pinv(mat), hv, nb


_ORACLE_CACHE: dict = {}


def _oracle_feasible(amat, apinv, hv, nb, b, tol, max_iter,
                     start=None) -> tuple[bool, np.ndarray]:
    v = apinv @ b if start is None else start - apinv @ (amat @ start - b)
    w = v
    for _ in range(max_iter):
        blocks = hv.unvec(v.reshape(nb, hv.params))
        w = hv.vec(_psd_project_batch(blocks)).reshape(-1)
        gap = float(np.linalg.norm(w - v))
        if gap < tol:
            return True, v
        v = w - apinv @ (amat @ w - b)
    return False, v


def robustness_oracle(asm: Assemblage, flavor: str = FLAVOR_LHS,
                      tol: float = ORACLE_TOL, max_iter: int = 6000,
                      bisect_steps: int = 16) -> float:
    """Coarse robustness value via bisection on t with alternating
    projections (affine constraint set vs. PSD cone) deciding feasibility.

    Deliberately independent of the interior-point path; accurate to
    roughly 1e-3 in t.
    """
    if flavor not in (FLAVOR_LHS, FLAVOR_GENERALIZED):
        raise DomainError(f"unknown robustness flavor {flavor!r}")
    key = (asm.m, asm.o, asm.dim, flavor)
    if key not in _ORACLE_CACHE:
        _ORACLE_CACHE[key] = _oracle_system(asm.m, asm.o, asm.dim, flavor)
    amat, apinv, hv, nb = _ORACLE_CACHE[key]

    target = np.concatenate([
        hv.vec(asm.components[a, x][None])[0]
        for a in range(asm.o) for x in range(asm.m)])

    def b_of(t: float) -> np.ndarray:
        if flavor == FLAVOR_LHS:
            return np.concatenate([target, [t]])
        return np.concatenate([target, [1.0 + t]])

    feas, start = _oracle_feasible(amat, apinv, hv, nb, b_of(0.0),
                                   tol, max_iter)
    if feas:
        return 0.0
    lo, hi = 0.0, 1.0
    feas, start = _oracle_feasible(amat, apinv, hv, nb, b_of(hi),
                                   tol, max_iter, start)
    while not feas and hi < 8.0:
        hi *= 2.0
        feas, start = _oracle_feasible(amat, apinv, hv, nb, b_of(hi),
                                       tol, max_iter, start)
    if not feas:
        raise SolverFailure("oracle found no feasible mixing weight")
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        feas, cand = _oracle_feasible(amat, apinv, hv, nb, b_of(mid),
                                      tol, max_iter, start)
        if feas:
            hi = mid
            start = cand
        else:
            lo = mid
    return hi
