"""Piecewise-polynomial pair-interaction Hamiltonian schedules.

A schedule assigns every unordered qubit pair (k, l) a 4x4 Hermitian
matrix H_kl(t), written in the two-qubit Pauli basis with polynomial
time dependence on each segment.  From it derive, at any time t, the
interaction graph (edges where ||H_kl(t)|| exceeds a threshold), the
weighted chromatic index W(t) (threshold integral of the chromatic
index, a finite sum over distinct norms), and the schedule-level
integral I of W over [0, T] -- the running-time measure the compiler
targets.

``embed_discrete`` maps a gate schedule to an equivalent continuous
schedule (one unit-length constant segment per step, generators taken
from the principal logarithm), so that I equals the gate schedule's
weighted depth exactly.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import linalg
from .errors import BadParams, NotHermitian, OutOfRange
from .graphs import WeightedGraph, level_decompose

if TYPE_CHECKING:  # pragma: no cover
    from .compiler import GateSchedule

MAX_POLY_DEGREE = 8
ZERO_NORM_TOL = 1e-12  # pair terms with a smaller norm count as absent

_P1 = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
PAULI_LABELS = tuple(a + b for a in "IXYZ" for b in "IXYZ")
PAULI_PRODUCTS = np.stack([np.kron(_P1[l[0]], _P1[l[1]]) for l in PAULI_LABELS])

__all__ = [
    "PAULI_LABELS",
    "PAULI_PRODUCTS",
    "HamiltonianSchedule",
    "IndexProfile",
    "PairTerm",
    "Segment",
    "ZERO_NORM_TOL",
    "chain",
    "complete_mean_field",
    "disjoint_pairs",
    "embed_discrete",
    "eval_pair",
    "generate",
    "integrated_chromatic_index",
    "interaction_graph",
    "pauli_coeffs",
    "pauli_matrix",
    "random_graph",
    "random_time_varying",
    "scale_schedule",
    "weighted_chromatic_index",
]


def pauli_coeffs(m) -> np.ndarray:
    """Expansion of a Hermitian 4x4 matrix over (I,X,Y,Z) x (I,X,Y,Z).

    Coefficients are tr(m * sigma_a x sigma_b) / 4 and real for Hermitian
    input; reconstruction through :func:`pauli_matrix` round-trips.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (4, 4):
        raise BadParams(f"expected a 4x4 matrix, got {m.shape}")
    if not linalg.is_hermitian(m, 1e-10):
        raise NotHermitian("Pauli coefficients are defined for Hermitian matrices")
    return np.einsum("kij,ji->k", PAULI_PRODUCTS, m).real / 4.0


def pauli_matrix(coeffs) -> np.ndarray:
    """Hermitian 4x4 matrix with the given 16 Pauli coefficients."""
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (16,):
        raise BadParams(f"expected 16 coefficients, got shape {c.shape}")
    return np.tensordot(c, PAULI_PRODUCTS, axes=(0, 0))


def _trim_poly(p):
    p = tuple(float(x) for x in p)
    while p and p[-1] == 0.0:
        p = p[:-1]
    return p


def _poly_eval(p, t: float) -> float:
    acc = 0.0
    for c in reversed(p):
        acc = acc * t + c
    return acc


@dataclass(frozen=True)
class PairTerm:
    """One pair interaction: 16 polynomial coefficient tracks in absolute time."""

    pair: tuple
    coeffs: tuple  # 16 ascending-degree tuples, entry i for PAULI_LABELS[i]

    def __post_init__(self):
        k, l = int(self.pair[0]), int(self.pair[1])
        if k == l or k > l or k < 0:
            raise BadParams(f"pair ({k},{l}) must satisfy 0 <= k < l")
        object.__setattr__(self, "pair", (k, l))
        polys = tuple(_trim_poly(p) for p in self.coeffs)
        if len(polys) != 16:
            raise BadParams("a pair term carries exactly 16 coefficient polynomials")
        for p in polys:
            if len(p) > MAX_POLY_DEGREE + 1:
                raise BadParams(f"polynomial degree exceeds {MAX_POLY_DEGREE}")
            if not all(math.isfinite(c) for c in p):
                raise BadParams("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", polys)

    @property
    def is_constant(self) -> bool:
        return all(len(p) <= 1 for p in self.coeffs)

    def coeffs_at(self, t: float) -> np.ndarray:
        return np.array([_poly_eval(p, t) for p in self.coeffs])

    def matrix_at(self, t: float) -> np.ndarray:
        if self.is_constant:
            cached = getattr(self, "_const_matrix", None)
            if cached is None:
                cached = pauli_matrix(self.coeffs_at(0.0))
                object.__setattr__(self, "_const_matrix", cached)
            return cached
        return pauli_matrix(self.coeffs_at(t))

    def norm_at(self, t: float) -> float:
        return linalg.operator_norm(self.matrix_at(t))


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "t_start", float(self.t_start))
        object.__setattr__(self, "t_end", float(self.t_end))
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.t_start < self.t_end:
            raise BadParams(f"segment [{self.t_start}, {self.t_end}] is empty or reversed")
        pairs = [term.pair for term in self.terms]
        if len(set(pairs)) != len(pairs):
            raise BadParams("segment holds duplicate pair terms")

    @property
    def length(self) -> float:
        return self.t_end - self.t_start

    @property
    def is_constant(self) -> bool:
        return all(term.is_constant for term in self.terms)


@dataclass(frozen=True)
class HamiltonianSchedule:
    """Contiguous segments tiling [0, T] on a register of n_qubits qubits."""

    n_qubits: int
    segments: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.n_qubits < 2:
            raise BadParams("a pair-interaction schedule needs at least two qubits")
        if not self.segments:
            raise BadParams("schedule must cover [0,T]")
        if self.segments[0].t_start != 0.0:
            raise BadParams("schedule must cover [0,T]: first segment starts at "
                            f"{self.segments[0].t_start}, not 0")
        for a, b in zip(self.segments, self.segments[1:]):
            if a.t_end != b.t_start:
                raise BadParams(f"segments must tile exactly: gap at t={a.t_end}")
        for seg in self.segments:
            for term in seg.terms:
                if term.pair[1] >= self.n_qubits:
                    raise BadParams(f"pair {term.pair} exceeds register of {self.n_qubits}")

    @property
    def total_time(self) -> float:
        return self.segments[-1].t_end

    @property
    def is_constant(self) -> bool:
        return len(self.segments) == 1 and self.segments[0].is_constant

    @property
    def is_piecewise_constant(self) -> bool:
        return all(seg.is_constant for seg in self.segments)

    def min_segment_length(self) -> float:
        return min(seg.length for seg in self.segments)

    def segment_at(self, t: float) -> Segment:
        """Segment containing t, right-open except at t = T."""
        if t < 0.0 or t > self.total_time:
            raise OutOfRange(f"t={t} outside [0, {self.total_time}]")
        if t == self.total_time:
            return self.segments[-1]
        starts = [seg.t_start for seg in self.segments]
        return self.segments[bisect_right(starts, t) - 1]


@dataclass(frozen=True)
class IndexProfile:
    """Sampled W(t) values and the resulting integral with an error estimate."""

    times: np.ndarray
    values: np.ndarray
    integral: float
    error_estimate: float


def eval_pair(s: HamiltonianSchedule, pair, t: float) -> np.ndarray:
    """H_kl(t) as a 4x4 Hermitian matrix; zero when the pair is absent."""
    k, l = int(pair[0]), int(pair[1])
    if not 0 <= k < l < s.n_qubits:
        raise OutOfRange(f"pair ({k},{l}) invalid for {s.n_qubits} qubits")
    seg = s.segment_at(t)
    for term in seg.terms:
        if term.pair == (k, l):
            return term.matrix_at(t)
    return np.zeros((4, 4), dtype=np.complex128)


def _snapshot(s: HamiltonianSchedule, t: float):
    """Active pair -> (matrix, norm) at time t, skipping near-zero terms."""
    seg = s.segment_at(t)
    out = {}
    for term in sorted(seg.terms, key=lambda tm: tm.pair):
        m = term.matrix_at(t)
        norm = linalg.operator_norm(m)
        if norm > ZERO_NORM_TOL:
            out[term.pair] = (m, norm)
    return out


def interaction_graph(s: HamiltonianSchedule, t: float, r: float = 0.0) -> WeightedGraph:
    """Graph of pairs whose interaction norm strictly exceeds max(r, zero tol)."""
    if r < 0:
        raise BadParams("threshold r must be non-negative")
    snap = _snapshot(s, t)
    edges = tuple((k, l, norm) for (k, l), (_, norm) in snap.items() if norm > r)
    return WeightedGraph(s.n_qubits, edges)


def weighted_chromatic_index(s: HamiltonianSchedule, t: float) -> float:
    """W(t): the threshold integral of the chromatic index, as a level sum."""
    return level_decompose(interaction_graph(s, t, 0.0)).weighted_sum()


def integrated_chromatic_index(s: HamiltonianSchedule, samples_per_segment: int = 64) -> IndexProfile:
    """Composite midpoint quadrature of W(t) over every segment.

    Constant segments are integrated exactly from a single midpoint sample;
    the error estimate compares the requested resolution against doubled
    sampling and is therefore zero for piecewise-constant schedules.
    """
    if samples_per_segment < 1:
        raise BadParams("samples_per_segment must be at least 1")
    times = []
    values = []
    total = 0.0
    err = 0.0
    for seg in s.segments:
        length = seg.length
        mids = seg.t_start + (np.arange(samples_per_segment) + 0.5) * (length / samples_per_segment)
        if seg.is_constant:
            w = weighted_chromatic_index(s, float(mids[0]))
            times.extend(float(x) for x in mids)
            values.extend([w] * samples_per_segment)
            total += w * length
            continue
        vals = [weighted_chromatic_index(s, float(x)) for x in mids]
        h = length / samples_per_segment
        coarse = h * sum(vals)
        mids2 = seg.t_start + (np.arange(2 * samples_per_segment) + 0.5) * (length / (2 * samples_per_segment))
        fine = (length / (2 * samples_per_segment)) * sum(
            weighted_chromatic_index(s, float(x)) for x in mids2
        )
        times.extend(float(x) for x in mids)
        values.extend(vals)
        total += coarse
        err += abs(fine - coarse)
    return IndexProfile(np.array(times), np.array(values), total, err)


def embed_discrete(g: "GateSchedule") -> HamiltonianSchedule:
    """Continuous schedule equivalent to a gate schedule, step by step.

    Step j becomes the constant segment [j-1, j] whose pair terms generate
    the step's gates over unit time (H = -log(u), so exp(-i*H*1) = u).  An
    empty gate schedule maps to a single zero segment of unit length.
    """
    if not g.steps:
        return HamiltonianSchedule(g.n_qubits, (Segment(0.0, 1.0, ()),))
    segments = []
    for j, step in enumerate(g.steps):
        terms = []
        for gate in sorted(step.gates, key=lambda gt: gt.pair):
            h = -linalg.unitary_log(gate.unitary)
            coeffs = pauli_coeffs(h)
            terms.append(PairTerm(gate.pair, tuple((float(c),) for c in coeffs)))
        segments.append(Segment(float(j), float(j + 1), tuple(terms)))
    return HamiltonianSchedule(g.n_qubits, tuple(segments))


def scale_schedule(s: HamiltonianSchedule, factor: float) -> HamiltonianSchedule:
    """Multiply every pair term by ``factor`` > 0 (W and I scale the same way)."""
    if not factor > 0:
        raise BadParams("scale factor must be positive")
    segments = []
    for seg in s.segments:
        terms = tuple(
            PairTerm(term.pair, tuple(tuple(factor * c for c in p) for p in term.coeffs))
            for term in seg.terms
        )
        segments.append(Segment(seg.t_start, seg.t_end, terms))
    return HamiltonianSchedule(s.n_qubits, tuple(segments))


# ---------------------------------------------------------------------------
# generators


def _const_term(pair, label_coeffs) -> PairTerm:
    coeffs = [()] * 16
    for label, value in label_coeffs.items():
        coeffs[PAULI_LABELS.index(label)] = (float(value),)
    return PairTerm(tuple(pair), tuple(coeffs))


def _heisenberg(pair, strength: float) -> PairTerm:
    # (XX + YY + ZZ)/3 has operator norm 1, so the term's norm is |strength|
    third = strength / 3.0
    return _const_term(pair, {"XX": third, "YY": third, "ZZ": third})


def chain(n: int, t_total: float = 1.0, coupling: float = 1.0) -> HamiltonianSchedule:
    """Nearest-neighbor chain with isotropic exchange of norm ``coupling``."""
    _check_common(n, t_total)
    terms = tuple(_heisenberg((i, i + 1), coupling) for i in range(n - 1))
    return HamiltonianSchedule(n, (Segment(0.0, float(t_total), terms),))


def disjoint_pairs(n: int, t_total: float = 1.0, coupling: float = 1.0) -> HamiltonianSchedule:
    """Matching (0,1), (2,3), ... -- the fully parallel interaction pattern."""
    _check_common(n, t_total)
    terms = tuple(_heisenberg((2 * i, 2 * i + 1), coupling) for i in range(n // 2))
    return HamiltonianSchedule(n, (Segment(0.0, float(t_total), terms),))


def complete_mean_field(n: int, t_total: float = 1.0, coupling: float = 1.0) -> HamiltonianSchedule:
    """All-to-all ZZ couplings of equal strength."""
    _check_common(n, t_total)
    terms = tuple(
        _const_term((i, j), {"ZZ": coupling}) for i in range(n) for j in range(i + 1, n)
    )
    return HamiltonianSchedule(n, (Segment(0.0, float(t_total), terms),))


def _random_pair_coeffs(rng, coupling: float) -> np.ndarray:
    """i.i.d. traceless coefficients rescaled to operator norm ``coupling``."""
    for _ in range(100):
        c = rng.standard_normal(16)
        c[0] = 0.0  # no global-phase component
        norm = linalg.operator_norm(pauli_matrix(c))
        if norm > 1e-9:
            return c * (coupling / norm)
    raise RuntimeError("random coefficient draw degenerated repeatedly")


def random_graph(
    n: int,
    t_total: float = 1.0,
    p: float = 0.5,
    seed: int = 0,
    coupling: float = 1.0,
    segments: int = 1,
) -> HamiltonianSchedule:
    """Piecewise-constant schedule: per segment, an Erdos-Renyi pair set with
    random norm-``coupling`` terms.  Deterministic in ``seed``."""
    _check_common(n, t_total)
    if not 0.0 <= p <= 1.0:
        raise BadParams("edge probability p must lie in [0,1]")
    if segments < 1:
        raise BadParams("segments must be at least 1")
    rng = np.random.default_rng(seed)
    segs = []
    for i in range(segments):
        t0 = (i * t_total) / segments
        t1 = ((i + 1) * t_total) / segments if i + 1 < segments else float(t_total)
        terms = []
        for k in range(n):
            for l in range(k + 1, n):
                if rng.random() < p:
                    c = _random_pair_coeffs(rng, coupling)
                    terms.append(PairTerm((k, l), tuple((float(x),) if x != 0.0 else () for x in c)))
        segs.append(Segment(t0, t1, tuple(terms)))
    return HamiltonianSchedule(n, tuple(segs))


def random_time_varying(
    n: int,
    t_total: float = 1.0,
    p: float = 0.5,
    seed: int = 0,
    coupling: float = 1.0,
    degree: int = 2,
) -> HamiltonianSchedule:
    """Single segment with random polynomial coefficient tracks, rescaled so
    the largest sampled norm over [0,T] equals ``coupling``."""
    _check_common(n, t_total)
    if not 0.0 <= p <= 1.0:
        raise BadParams("edge probability p must lie in [0,1]")
    if not 0 <= degree <= MAX_POLY_DEGREE:
        raise BadParams(f"degree must lie in [0, {MAX_POLY_DEGREE}]")
    rng = np.random.default_rng(seed)
    probe = np.linspace(0.0, t_total, 33)
    terms = []
    for k in range(n):
        for l in range(k + 1, n):
            if rng.random() >= p:
                continue
            polys = rng.standard_normal((16, degree + 1))
            polys[0, :] = 0.0
            term = PairTerm((k, l), tuple(tuple(float(c) for c in row) for row in polys))
            peak = max(term.norm_at(float(t)) for t in probe)
            if peak <= 1e-9:
                continue
            scale = coupling / peak
            terms.append(
                PairTerm((k, l), tuple(tuple(scale * c for c in poly) for poly in term.coeffs))
            )
    return HamiltonianSchedule(n, (Segment(0.0, float(t_total), tuple(terms)),))


def _check_common(n: int, t_total: float):
    if n < 2:
        raise BadParams("need at least two qubits")
    if not t_total > 0:
        raise BadParams("total time must be positive")


_GENERATORS = {
    "chain": chain,
    "disjoint_pairs": disjoint_pairs,
    "complete_mean_field": complete_mean_field,
    "random_graph": random_graph,
    "random_time_varying": random_time_varying,
}


def generate(kind: str, **params) -> HamiltonianSchedule:
    """Dispatch to a named schedule generator; see ``_GENERATORS`` for kinds."""
    try:
        fn = _GENERATORS[kind]
    except KeyError:
        raise BadParams(f"unknown generator kind {kind!r}; choose from {sorted(_GENERATORS)}")
    try:
        return fn(**params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for generator {kind!r}: {exc}") from None
