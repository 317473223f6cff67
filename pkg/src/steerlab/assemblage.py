"""Assemblage data model, canonical constructors and serialization.

An assemblage is the family {sigma_{a|x}} of subnormalized conditional
operators on Bob's side: Tr[sigma_{a|x}] is Alice's outcome probability
P(a|x) and sigma_{a|x}/P(a|x) is Bob's conditional state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import DimensionMismatch, DomainError

VALID_TOL = 1e-9
ZERO_TRACE_TOL = 1e-12

JSON_SCHEMA = "assemblage/v1"


@dataclass(frozen=True)
class MeasurementSet:
    """POVMs on Alice's side, one o-outcome POVM per input x.

    ``elements[x][a]`` is the POVM element for outcome a given input x.
    """

    elements: tuple

    @property
    def m(self) -> int:
        return len(self.elements)

    @property
    def o(self) -> int:
        return len(self.elements[0])

    @property
    def dim(self) -> int:
        return self.elements[0][0].shape[0]

    def validate(self, tol: float = VALID_TOL) -> list[str]:
        out = []
        eye = np.eye(self.dim)
        for x, povm in enumerate(self.elements):
            for a, el in enumerate(povm):
                if matcore.min_eig(el) < -tol:
                    out.append(f"element ({a}|{x}) not PSD")
            total = sum(povm)
            err = np.max(np.abs(total - eye))
            if err > tol:
                out.append(f"input {x}: completeness violated by {err:.3e}")
        return out


def pauli_zx_projectors() -> MeasurementSet:
    """Projective Z and X measurements (x=0: Z, x=1: X), outcomes 0 -> +1."""
    return MeasurementSet((
        (matcore.projector(matcore.KET0), matcore.projector(matcore.KET1)),
        (matcore.projector(matcore.KET_PLUS), matcore.projector(matcore.KET_MINUS)),
    ))


@dataclass(frozen=True)
class Assemblage:
    """Indexed family of subnormalized PSD operators, shape (o, m, dim, dim)."""

    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=complex)
        if arr.ndim != 4 or arr.shape[2] != arr.shape[3]:
            raise DimensionMismatch(f"components shape {arr.shape}")
        arr = (arr + arr.conj().transpose(0, 1, 3, 2)) / 2.0
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def o(self) -> int:
        return self.components.shape[0]

    @property
    def m(self) -> int:
        return self.components.shape[1]

    @property
    def dim(self) -> int:
        return self.components.shape[2]

    def component(self, a: int, x: int) -> np.ndarray:
        return self.components[a, x]

    def rho_b(self) -> np.ndarray:
        """Bob's reduced state, summed over outcomes at input x=0."""
        return self.components[:, 0].sum(axis=0)

    def prob(self, a: int, x: int) -> float:
        """P(a|x) = Tr[sigma_{a|x}]."""
        return float(np.trace(self.components[a, x]).real)

    def conditional_state(self, a: int, x: int) -> np.ndarray:
        """Normalized Bob state given (a, x); zero-trace components map to 0."""
        p = self.prob(a, x)
        if p < ZERO_TRACE_TOL:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self.components[a, x] / p

    def allclose(self, other: "Assemblage", tol: float = 1e-12) -> bool:
        return self.components.shape == other.components.shape and \
            bool(np.max(np.abs(self.components - other.components)) <= tol)


def validate(asm: Assemblage, tol: float = VALID_TOL) -> list[str]:
    """Diagnostic check of PSD, no-signalling and unit-trace constraints."""
    violations = []
    for a in range(asm.o):
        for x in range(asm.m):
            lam = matcore.min_eig(asm.components[a, x])
            if lam < -tol:
                violations.append(
                    f"component ({a}|{x}) not PSD: min eigenvalue {lam:.3e}")
    sums = asm.components.sum(axis=0)
    for x in range(1, asm.m):
        err = float(np.max(np.abs(sums[x] - sums[0])))
        if err > tol:
            violations.append(f"no-signalling violated at x={x} by {err:.3e}")
    tr = float(np.trace(sums[0]).real)
    if abs(tr - 1.0) > tol:
        violations.append(f"reduced-state trace {tr:.6f} != 1")
    return violations


def singlet_assemblage() -> Assemblage:
    """2-input/2-output qubit assemblage of the maximally entangled state
    under Z and X measurements."""
    c = np.empty((2, 2, 2, 2), dtype=complex)
    c[0, 0] = 0.5 * matcore.projector(matcore.KET0)
    c[1, 0] = 0.5 * matcore.projector(matcore.KET1)
    c[0, 1] = 0.5 * matcore.projector(matcore.KET_PLUS)
    c[1, 1] = 0.5 * matcore.projector(matcore.KET_MINUS)
    return Assemblage(c)


def alpha_assemblage(alpha2: float) -> Assemblage:
    """Partially entangled pure-state assemblage with Schmidt weight alpha2.

    Built from |psi> = alpha|00> + beta|11> under Z and X measurements,
    with alpha2 restricted to (1/2, 1).
    """
    if not 0.5 < alpha2 < 1.0:
        raise DomainError(f"alpha2 must lie in (1/2, 1), got {alpha2}")
    alpha = np.sqrt(alpha2)
    beta = np.sqrt(1.0 - alpha2)
    ket_p = alpha * matcore.KET0 + beta * matcore.KET1
    ket_m = alpha * matcore.KET0 - beta * matcore.KET1
    c = np.empty((2, 2, 2, 2), dtype=complex)
    c[0, 0] = alpha2 * matcore.projector(matcore.KET0)
    c[1, 0] = (1.0 - alpha2) * matcore.projector(matcore.KET1)
    c[0, 1] = 0.5 * matcore.projector(ket_p)
    c[1, 1] = 0.5 * matcore.projector(ket_m)
    return Assemblage(c)


def from_state(state: np.ndarray, meas: MeasurementSet) -> Assemblage:
    """sigma_{a|x} = Tr_A[(M_{a|x} ⊗ 1_B) rho] for a bipartite state rho."""
    state = np.asarray(state, dtype=complex)
    bad = meas.validate()
    if bad:
        raise DomainError("invalid measurement set: " + "; ".join(bad))
    d_a = meas.dim
    d_total = state.shape[0]
    if state.shape != (d_total, d_total) or d_total % d_a != 0:
        raise DimensionMismatch(
            f"state shape {state.shape} incompatible with Alice dim {d_a}")
    d_b = d_total // d_a
    eye_b = np.eye(d_b)
    c = np.empty((meas.o, meas.m, d_b, d_b), dtype=complex)
    for x in range(meas.m):
        for a in range(meas.o):
            op = matcore.kron(meas.elements[x][a], eye_b) @ state
            c[a, x] = matcore.partial_trace(op, (d_a, d_b), 0)
    return Assemblage(c)


def tensor(asm1: Assemblage, asm2: Assemblage) -> Assemblage:
    """Tensor product; indices flatten row-major: x = x1*m2 + x2, a = a1*o2 + a2."""
    d = asm1.dim * asm2.dim
    c = np.empty((asm1.o * asm2.o, asm1.m * asm2.m, d, d), dtype=complex)
    for a1 in range(asm1.o):
        for a2 in range(asm2.o):
            for x1 in range(asm1.m):
                for x2 in range(asm2.m):
                    c[a1 * asm2.o + a2, x1 * asm2.m + x2] = matcore.kron(
                        asm1.components[a1, x1], asm2.components[a2, x2])
    return Assemblage(c)


def tensor_power(asm: Assemblage, n: int) -> Assemblage:
    if n < 1:
        raise DomainError("tensor power requires n >= 1")
    out = asm
    for _ in range(n - 1):
        out = tensor(out, asm)
    return out


def mix(asm1: Assemblage, asm2: Assemblage, weight1: float) -> Assemblage:
    """Convex combination weight1*asm1 + (1-weight1)*asm2."""
    return Assemblage(weight1 * asm1.components +
                      (1.0 - weight1) * asm2.components)


def to_dict(asm: Assemblage) -> dict:
    comps = []
    for a in range(asm.o):
        for x in range(asm.m):
            mat = [[[float(z.real), float(z.imag)] for z in row]
                   for row in asm.components[a, x]]
            comps.append({"a": a, "x": x, "matrix": mat})
    return {"schema": JSON_SCHEMA, "m": asm.m, "o": asm.o, "dim": asm.dim,
            "components": comps}


def from_dict(data: dict) -> Assemblage:
    m, o, dim = data["m"], data["o"], data["dim"]
    c = np.zeros((o, m, dim, dim), dtype=complex)
    seen = set()
    for entry in data["components"]:
        a, x = entry["a"], entry["x"]
        mat = np.array([[re + 1j * im for re, im in row]
                        for row in entry["matrix"]])
        if mat.shape != (dim, dim):
            raise DimensionMismatch(f"component ({a}|{x}) shape {mat.shape}")
        c[a, x] = mat
        seen.add((a, x))
    if len(seen) != o * m:
        raise DomainError("missing assemblage components in serialized data")
    return Assemblage(c)


def dumps(asm: Assemblage) -> str:
    return json.dumps(to_dict(asm), indent=2)


def loads(text: str) -> Assemblage:
    return from_dict(json.loads(text))


def save(asm: Assemblage, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(asm))


def load(path) -> Assemblage:
    with open(path) as fh:
        return loads(fh.read())
