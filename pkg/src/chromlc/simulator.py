"""State-vector simulation of gate schedules and reference integration of
the continuous dynamics.

Convention: qubit 0 is the most significant bit of the basis index, so a
state reshaped to (2,)*n has qubit q on axis q.  Pair terms and gates are
applied through tensor contractions on the two relevant axes; the full
2^n x 2^n operator is never materialized.

The reference integrator is classic fixed-step RK4 on
d psi/dt = -i H(t) psi, with the step halved until the endpoint moves by
less than a quarter of the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as _iproduct

import numpy as np

from . import linalg
from .compiler import Gate, GateSchedule
from .errors import (
    BadParams,
    DimensionMismatch,
    IndexOutOfRange,
    NormDrift,
    NotUnitary,
    ToleranceUnreachable,
    TooLarge,
)
from .hamiltonian import HamiltonianSchedule

FULL_UNITARY_MAX_QUBITS = 6
NORM_DRIFT_LIMIT = 1e-6
MAX_STEP_HALVINGS = 24
MIXED_BRANCH_CAP = 1024

__all__ = [
    "FULL_UNITARY_MAX_QUBITS",
    "MeanFieldObservable",
    "ProductState",
    "StateVector",
    "apply_gate",
    "evolve_continuous",
    "full_unitary",
    "mixed_variance",
    "run_schedule",
    "variance",
]


class StateVector:
    """2^n complex amplitudes, unit norm; qubit 0 = most significant bit."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.shape != (2**n_qubits,):
            raise DimensionMismatch(
                f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, got {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_DRIFT_LIMIT:
            raise NormDrift(f"state norm {norm} drifted beyond {NORM_DRIFT_LIMIT}")
        self.n_qubits = n_qubits
        self.amplitudes = amps

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        if not 0 <= index < 2**n_qubits:
            raise IndexOutOfRange(f"basis index {index} outside register of {n_qubits} qubits")
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes / self.norm())

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _apply_pair_matrix(mat4, array, n, k, l):
    """Apply a 4x4 operator to axes (k, l); array may carry a column axis."""
    shape = (2,) * n + array.shape[1:]
    tensor = array.reshape(shape)
    u = np.asarray(mat4).reshape(2, 2, 2, 2)
    out = np.tensordot(u, tensor, axes=([2, 3], [k, l]))
    out = np.moveaxis(out, [0, 1], [k, l])
    return out.reshape(array.shape)


def _apply_single_matrix(mat2, array, n, q):
    shape = (2,) * n + array.shape[1:]
    tensor = array.reshape(shape)
    out = np.tensordot(np.asarray(mat2), tensor, axes=([1], [q]))
    out = np.moveaxis(out, 0, q)
    return out.reshape(array.shape)


def apply_gate(psi: StateVector, gate: Gate) -> StateVector:
    k, l = gate.pair
    if l >= psi.n_qubits:
        raise IndexOutOfRange(f"gate pair {gate.pair} outside register of {psi.n_qubits} qubits")
    return StateVector(
        psi.n_qubits, _apply_pair_matrix(gate.unitary, psi.amplitudes, psi.n_qubits, k, l)
    )


def run_schedule(psi: StateVector, g: GateSchedule) -> StateVector:
    """Apply the steps in order; gates within a step commute by disjointness."""
    if g.n_qubits != psi.n_qubits:
        raise DimensionMismatch(f"schedule is on {g.n_qubits} qubits, state on {psi.n_qubits}")
    amps = psi.amplitudes
    for step in g.steps:
        for gate in step.gates:
            amps = _apply_pair_matrix(gate.unitary, amps, psi.n_qubits, *gate.pair)
    return StateVector(psi.n_qubits, amps)


def _derivative(terms, t, array, n):
    out = np.zeros_like(array)
    for k, l, term in terms:
        out += _apply_pair_matrix(term.matrix_at(t), array, n, k, l)
    return -1j * out


def _integrate_fixed(s: HamiltonianSchedule, array, n, counts):
    for seg, steps in zip(s.segments, counts):
        terms = [(t.pair[0], t.pair[1], t) for t in seg.terms]
        h = seg.length / steps
        for i in range(steps):
            t0 = seg.t_start + i * h
            k1 = _derivative(terms, t0, array, n)
            k2 = _derivative(terms, t0 + h / 2, array + (h / 2) * k1, n)
            k3 = _derivative(terms, t0 + h / 2, array + (h / 2) * k2, n)
            k4 = _derivative(terms, t0 + h, array + h * k3, n)
            array = array + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return array


def _integrate_adaptive(s: HamiltonianSchedule, array, tol: float):
    """Halve the RK4 step until the endpoint difference is below tol/4."""
    n = s.n_qubits
    h0 = s.total_time / 16.0
    counts = [max(1, math.ceil(seg.length / h0)) for seg in s.segments]
    prev = _integrate_fixed(s, array, n, counts)
    for _ in range(MAX_STEP_HALVINGS):
        counts = [2 * c for c in counts]
        cur = _integrate_fixed(s, array, n, counts)
        diff = cur - prev
        if diff.ndim == 1:
            err = float(np.linalg.norm(diff))
        else:
            err = float(np.max(np.linalg.norm(diff, axis=0)))
        if err < tol / 4:
            return cur
        prev = cur
    raise ToleranceUnreachable(
        f"step halving cap {MAX_STEP_HALVINGS} reached without meeting tol={tol}"
    )


def evolve_continuous(psi: StateVector, s: HamiltonianSchedule, tol: float = 1e-10) -> StateVector:
    """Integrate the Schrodinger equation for the schedule's full duration.

    The result is renormalized (drift is checked first and must stay below
    ``NORM_DRIFT_LIMIT``, otherwise ``NormDrift`` is raised).
    """
    if s.n_qubits != psi.n_qubits:
        raise DimensionMismatch(f"schedule is on {s.n_qubits} qubits, state on {psi.n_qubits}")
    if tol < 1e-12:
        raise BadParams("tolerances below 1e-12 are not resolvable by this integrator")
    final = _integrate_adaptive(s, psi.amplitudes, tol)
    norm = float(np.linalg.norm(final))
    if abs(norm - 1.0) > NORM_DRIFT_LIMIT:
        raise NormDrift(f"integration drifted the norm to {norm}")
    return StateVector(psi.n_qubits, final / norm)


def full_unitary(x, tol: float = 1e-10) -> np.ndarray:
    """Implemented unitary of a gate or Hamiltonian schedule, n <= 6 qubits."""
    n = x.n_qubits
    if n > FULL_UNITARY_MAX_QUBITS:
        raise TooLarge(f"full unitaries are limited to {FULL_UNITARY_MAX_QUBITS} qubits")
    dim = 2**n
    u = np.eye(dim, dtype=np.complex128)
    if isinstance(x, GateSchedule):
        for step in x.steps:
            for gate in step.gates:
                u = _apply_pair_matrix(gate.unitary, u, n, *gate.pair)
    elif isinstance(x, HamiltonianSchedule):
        if tol < 1e-12:
            raise BadParams("tolerances below 1e-12 are not resolvable by this integrator")
        u = _integrate_adaptive(x, u, tol)
    else:
        raise BadParams(f"cannot extract a unitary from {type(x).__name__}")
    if not linalg.is_unitary(u, max(10 * tol, 1e-12)):
        raise NotUnitary("extracted matrix failed the unitarity check")
    return u


@dataclass(frozen=True)
class MeanFieldObservable:
    """Sum of one single-qubit Hermitian observable of norm 1 per qubit."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(np.asarray(f, dtype=np.complex128) for f in self.factors)
        for f in factors:
            if f.shape != (2, 2) or not linalg.is_hermitian(f, 1e-10):
                raise BadParams("observable factors must be 2x2 Hermitian")
            if abs(linalg.operator_norm(f) - 1.0) > 1e-10:
                raise BadParams("observable factors must have operator norm 1")
        object.__setattr__(self, "factors", factors)

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    @classmethod
    def pauli(cls, n_qubits: int, axis: str = "z") -> "MeanFieldObservable":
        mats = {
            "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
            "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
            "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
        }
        if axis not in mats:
            raise BadParams(f"axis must be one of {sorted(mats)}")
        return cls((mats[axis],) * n_qubits)

    @classmethod
    def random(cls, n_qubits: int, seed: int = 0) -> "MeanFieldObservable":
        rng = np.random.default_rng(seed)
        factors = []
        for _ in range(n_qubits):
            while True:
                h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                h = (h + h.conj().T) / 2
                norm = linalg.operator_norm(h)
                if norm > 1e-3:
                    factors.append(h / norm)
                    break
        return cls(tuple(factors))


def _moments(psi: StateVector, a: MeanFieldObservable):
    """First and second moment of the mean-field observable in a pure state."""
    n = psi.n_qubits
    amps = psi.amplitudes
    images = [_apply_single_matrix(a.factors[j], amps, n, j) for j in range(n)]
    m1 = sum(float(np.vdot(amps, img).real) for img in images)
    m2 = 0.0
    for j in range(n):
        for k in range(n):
            m2 += float(np.vdot(images[j], images[k]).real)
    return m1, m2


def variance(state, a: MeanFieldObservable) -> float:
    """tr(s a^2) - tr(s a)^2 for a pure state or an unevolved product state."""
    if isinstance(state, ProductState):
        return mixed_variance(state, a)
    if state.n_qubits != a.n_qubits:
        raise DimensionMismatch(
            f"observable on {a.n_qubits} qubits, state on {state.n_qubits}"
        )
    m1, m2 = _moments(state, a)
    return m2 - m1 * m1


class ProductState:
    """Per-qubit 2x2 density matrices (pure states are the rank-1 case)."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        fs = tuple(np.asarray(f, dtype=np.complex128) for f in factors)
        for f in fs:
            if f.shape != (2, 2) or not linalg.is_hermitian(f, 1e-10):
                raise BadParams("product-state factors must be 2x2 Hermitian")
            if abs(float(np.trace(f).real) - 1.0) > 1e-12:
                raise BadParams("product-state factors must have unit trace")
            if float(np.min(linalg.hermitian_eig(f).eigenvalues)) < -1e-12:
                raise BadParams("product-state factors must be positive semidefinite")
        self.factors = fs

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    @classmethod
    def pure(cls, vectors) -> "ProductState":
        factors = []
        for v in vectors:
            v = np.asarray(v, dtype=np.complex128)
            v = v / np.linalg.norm(v)
            factors.append(np.outer(v, v.conj()))
        return cls(tuple(factors))

    @classmethod
    def uniform(cls, n_qubits: int, rho) -> "ProductState":
        return cls((np.asarray(rho, dtype=np.complex128),) * n_qubits)

    def branches(self, cutoff: float = 1e-12):
        """Decompose into pure product branches (probability, StateVector)."""
        options = []
        for f in self.factors:
            w, v = linalg.hermitian_eig(f)
            opts = [(float(w[i]), v[:, i]) for i in range(2) if w[i] > cutoff]
            options.append(opts)
        count = 1
        for opts in options:
            count *= len(opts)
        if count > MIXED_BRANCH_CAP:
            raise TooLarge(f"{count} product branches exceed the cap {MIXED_BRANCH_CAP}")
        out = []
        for combo in _iproduct(*options):
            prob = 1.0
            vec = np.array([1.0 + 0.0j])
            for p, v in combo:
                prob *= p
                vec = np.kron(vec, v)
            out.append((prob, StateVector(len(self.factors), vec)))
        return out


def mixed_variance(state: ProductState, a: MeanFieldObservable, evolve=None) -> float:
    """Variance of a mean-field observable in an (optionally evolved) product state.

    ``evolve`` maps a pure StateVector to its evolved image; moments are
    combined across branches before the variance is formed.
    """
    if state.n_qubits != a.n_qubits:
        raise DimensionMismatch(
            f"observable on {a.n_qubits} qubits, state on {state.n_qubits}"
        )
    m1 = 0.0
    m2 = 0.0
    for prob, branch in state.branches():
        psi = evolve(branch) if evolve is not None else branch
        b1, b2 = _moments(psi, a)
        m1 += prob * b1
        m2 += prob * b2
    return m2 - m1 * m1
