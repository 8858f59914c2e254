"""Compile continuous pair-interaction schedules into parallel gate schedules.

The pipeline samples the Hamiltonian at subinterval midpoints, slices the
instantaneous interaction graph into threshold levels, edge-colors every
level into matchings, and emits one step per matching.  For an edge of
norm w the level factors telescope: the product of its gates over one
subinterval of length d equals exp(-i * d * H_kl(mid)) exactly, while the
summed step angles reproduce d * W(mid).  The weighted depth of the
output is therefore the midpoint Riemann sum of the weighted chromatic
index, and converges to the schedule's integrated index as the
subinterval length shrinks.

``trotterize`` is the unparallelized baseline (one gate per step, m
passes over the pair list) and ``rechromatize`` rewrites a schedule so
its instantaneous chromatic index never exceeds a cap, stretching time
by the matching-group count instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BadParams, EpsilonTooLarge, NotConstant, NotUnitary
from .graphs import chromatic_index_exact, level_decompose
from .hamiltonian import (
    ZERO_NORM_TOL,
    HamiltonianSchedule,
    PairTerm,
    Segment,
    _snapshot,
    integrated_chromatic_index,
    pauli_coeffs,
)

__all__ = [
    "CompilationReport",
    "Gate",
    "GateSchedule",
    "IntervalReport",
    "Step",
    "compile",
    "rechromatize",
    "trotterize",
    "weighted_depth",
]


@dataclass(frozen=True, eq=False)
class Gate:
    """Two-qubit gate: a 4x4 unitary on pair (k, l) plus its angle.

    The angle is the smallest norm of a Hermitian generator of the
    unitary; constructors that compute gates from matrices should go
    through :meth:`from_unitary`, which fills it in consistently.
    """

    pair: tuple
    unitary: np.ndarray
    angle: float

    def __post_init__(self):
        k, l = int(self.pair[0]), int(self.pair[1])
        if not 0 <= k < l:
            raise BadParams(f"gate pair ({k},{l}) must satisfy 0 <= k < l")
        object.__setattr__(self, "pair", (k, l))
        u = np.array(self.unitary, dtype=np.complex128)
        if u.shape != (4, 4):
            raise BadParams(f"gate unitary must be 4x4, got {u.shape}")
        if not linalg.is_unitary(u, 1e-10):
            raise NotUnitary("gate matrix is not unitary at tolerance 1e-10")
        u.flags.writeable = False
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "angle", float(self.angle))

    @classmethod
    def from_unitary(cls, pair, unitary) -> "Gate":
        return cls(tuple(pair), unitary, linalg.unitary_angle(unitary))

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return (
            self.pair == other.pair
            and self.angle == other.angle
            and np.array_equal(self.unitary, other.unitary)
        )


@dataclass(frozen=True)
class Step:
    """One parallel layer: gates on mutually disjoint pairs."""

    gates: tuple

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if not self.gates:
            raise BadParams("a step needs at least one gate")
        touched = set()
        for g in self.gates:
            if g.pair[0] in touched or g.pair[1] in touched:
                raise BadParams(f"step gates overlap at pair {g.pair}")
            touched.update(g.pair)

    def max_angle(self) -> float:
        return max(g.angle for g in self.gates)


@dataclass(frozen=True)
class GateSchedule:
    n_qubits: int
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.n_qubits < 2:
            raise BadParams("gate schedules need at least two qubits")
        for step in self.steps:
            for g in step.gates:
                if g.pair[1] >= self.n_qubits:
                    raise BadParams(f"gate pair {g.pair} exceeds register of {self.n_qubits}")

    def n_gates(self) -> int:
        return sum(len(step.gates) for step in self.steps)


def weighted_depth(g: GateSchedule) -> float:
    """Sum over steps of the largest gate angle in the step."""
    return sum(step.max_angle() for step in g.steps)


@dataclass(frozen=True)
class IntervalReport:
    """Diagnostics for one compiled subinterval."""

    t_mid: float
    delta: float
    thresholds: tuple
    chromatic_indices: tuple
    exact: tuple

    def to_dict(self):
        return {
            "t_mid": self.t_mid,
            "delta": self.delta,
            "thresholds": list(self.thresholds),
            "chromatic_indices": list(self.chromatic_indices),
            "exact": list(self.exact),
        }


@dataclass(frozen=True)
class CompilationReport:
    epsilon: float
    n_steps: int
    weighted_depth: float
    source_integrated_index: float
    intervals: tuple = field(default=())

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "n_steps": self.n_steps,
            "weighted_depth": self.weighted_depth,
            "source_integrated_index": self.source_integrated_index,
            "intervals": [iv.to_dict() for iv in self.intervals],
        }


def _subintervals(seg: Segment, epsilon: float):
    """Equal subdivision of a segment into ceil(length/epsilon) parts."""
    count = max(1, math.ceil(seg.length / epsilon - 1e-12))
    delta = seg.length / count
    for i in range(count):
        t_mid = seg.t_start + (i + 0.5) * delta
        yield t_mid, delta


def compile(s: HamiltonianSchedule, epsilon: float):
    """Discretize a continuous schedule into parallel gate steps.

    Returns ``(GateSchedule, CompilationReport)``.  Each subinterval of
    length d contributes, per threshold level j and per matching of that
    level's coloring, one step of gates
    exp(-i * H_kl(mid) * d * (r_j - r_{j-1}) / ||H_kl(mid)||).
    Deterministic: levels ascend, matchings keep color order, pairs are
    lexicographic.
    """
    if not epsilon > 0:
        raise BadParams("epsilon must be positive")
    if epsilon > s.min_segment_length() + 1e-15:
        raise EpsilonTooLarge(
            f"epsilon {epsilon} exceeds the shortest segment length {s.min_segment_length()}"
        )
    steps = []
    intervals = []
    for seg in s.segments:
        for t_mid, delta in _subintervals(seg, epsilon):
            snap = _snapshot(s, t_mid)
            decomp = level_decompose(
                _graph_from_snapshot(s.n_qubits, snap)
            )
            prev_r = 0.0
            for level in decomp.levels:
                width = level.threshold - prev_r
                prev_r = level.threshold
                for matching in level.coloring.classes:
                    gates = []
                    for pair in matching:
                        matrix, norm = snap[pair]
                        gates.append(
                            Gate.from_unitary(pair, linalg.expm_i(matrix, delta * width / norm))
                        )
                    steps.append(Step(tuple(gates)))
            intervals.append(
                IntervalReport(
                    t_mid,
                    delta,
                    decomp.thresholds(),
                    tuple(lv.chromatic_index for lv in decomp.levels),
                    tuple(lv.exact for lv in decomp.levels),
                )
            )
    schedule = GateSchedule(s.n_qubits, tuple(steps))
    report = CompilationReport(
        epsilon=float(epsilon),
        n_steps=len(steps),
        weighted_depth=weighted_depth(schedule),
        source_integrated_index=integrated_chromatic_index(s).integral,
        intervals=tuple(intervals),
    )
    return schedule, report


def _graph_from_snapshot(n_qubits, snap):
    from .graphs import WeightedGraph

    return WeightedGraph(
        n_qubits, tuple((k, l, norm) for (k, l), (_, norm) in snap.items())
    )


def trotterize(s: HamiltonianSchedule, m: int) -> GateSchedule:
    """Sequential product-formula baseline for a constant schedule.

    m passes over the pair list in lexicographic order, one gate
    exp(-i * H_kl * T/m) per step; depth is m times the pair count and no
    parallelization is attempted.
    """
    if m < 1:
        raise BadParams("m must be at least 1")
    if not s.is_constant:
        raise NotConstant("trotterize requires a single constant segment")
    seg = s.segments[0]
    t_total = s.total_time
    pass_gates = []
    for term in sorted(seg.terms, key=lambda tm: tm.pair):
        matrix = term.matrix_at(seg.t_start)
        if linalg.operator_norm(matrix) <= ZERO_NORM_TOL:
            continue
        pass_gates.append(Gate.from_unitary(term.pair, linalg.expm_i(matrix, t_total / m)))
    steps = tuple(Step((g,)) for _ in range(m) for g in pass_gates)
    return GateSchedule(s.n_qubits, steps)


def rechromatize(s: HamiltonianSchedule, m: int, epsilon: float) -> HamiltonianSchedule:
    """Rewrite a schedule so the instantaneous chromatic index stays <= m.

    Every subinterval's edge set is split into groups of at most m
    matchings (taken from an exact coloring); the groups run one after the
    other, each for the full subinterval length, so time stretches by the
    group count while pair strengths are preserved.
    """
    if m < 1:
        raise BadParams("m must be at least 1")
    if not epsilon > 0:
        raise BadParams("epsilon must be positive")
    if epsilon > s.min_segment_length() + 1e-15:
        raise EpsilonTooLarge(
            f"epsilon {epsilon} exceeds the shortest segment length {s.min_segment_length()}"
        )
    out_segments = []
    t_cursor = 0.0
    for seg in s.segments:
        for t_mid, delta in _subintervals(seg, epsilon):
            snap = _snapshot(s, t_mid)
            graph = _graph_from_snapshot(s.n_qubits, snap)
            if not graph.edges:
                out_segments.append(Segment(t_cursor, t_cursor + delta, ()))
                t_cursor += delta
                continue
            coloring = chromatic_index_exact(graph).coloring
            classes = coloring.classes
            groups = [classes[i : i + m] for i in range(0, len(classes), m)]
            for group in groups:
                terms = []
                for matching in group:
                    for pair in matching:
                        matrix, _ = snap[pair]
                        coeffs = pauli_coeffs(matrix)
                        terms.append(
                            PairTerm(pair, tuple((float(c),) if c != 0.0 else () for c in coeffs))
                        )
                terms.sort(key=lambda tm: tm.pair)
                out_segments.append(Segment(t_cursor, t_cursor + delta, tuple(terms)))
                t_cursor += delta
    return HamiltonianSchedule(s.n_qubits, tuple(out_segments))
