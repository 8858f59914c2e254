"""Shared test utilities: random ensembles and independent dense oracles.

The oracles here deliberately avoid the package's own code paths: operator
embedding works bit-by-bit on basis indices, the norm oracle goes through
the characteristic polynomial, and the chromatic-index oracle is a plain
depth-first enumeration over edges in natural order.
"""

import numpy as np

from chromlc import linalg
from chromlc.compiler import Gate, GateSchedule, Step
from chromlc.hamiltonian import PAULI_LABELS, HamiltonianSchedule, PairTerm, Segment


def haar_unitary(dim, rng):
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d)).conj()


def random_hermitian(dim, rng, norm=None):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = (m + m.conj().T) / 2.0
    if norm is not None:
        m *= norm / linalg.operator_norm(m)
    return m


def random_gate_schedule(n, rng, max_steps=6, two_gate_prob=0.5):
    """Random gate schedule with Haar gates, at most two disjoint gates per step."""
    steps = []
    for _ in range(int(rng.integers(1, max_steps + 1))):
        if n >= 4 and rng.random() < two_gate_prob:
            perm = list(rng.permutation(n)[:4])
            pairs = [tuple(sorted(perm[:2])), tuple(sorted(perm[2:]))]
        else:
            pairs = [tuple(sorted(rng.choice(n, size=2, replace=False)))]
        gates = [Gate.from_unitary(p, haar_unitary(4, rng)) for p in sorted(pairs)]
        steps.append(Step(tuple(gates)))
    return GateSchedule(n, tuple(steps))


def embed_pair_operator(mat4, n, k, l):
    """Dense 2^n x 2^n embedding of a two-site operator, built bit by bit."""
    dim = 2**n
    u = np.asarray(mat4, dtype=complex).reshape(2, 2, 2, 2)
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        bk, bl = bits[k], bits[l]
        for ok in (0, 1):
            for ol in (0, 1):
                amp = u[ok, ol, bk, bl]
                if amp == 0:
                    continue
                nb = list(bits)
                nb[k], nb[l] = ok, ol
                row = sum(bit << (n - 1 - q) for q, bit in enumerate(nb))
                out[row, col] += amp
    return out


def embed_single_operator(mat2, n, q):
    dim = 2**n
    m = np.asarray(mat2, dtype=complex)
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - j)) & 1 for j in range(n)]
        for o in (0, 1):
            amp = m[o, bits[q]]
            if amp == 0:
                continue
            nb = list(bits)
            nb[q] = o
            row = sum(bit << (n - 1 - j) for j, bit in enumerate(nb))
            out[row, col] += amp
    return out


def dense_hamiltonian(s: HamiltonianSchedule, t):
    """Full-register H(t) assembled from the dense embedding oracle."""
    dim = 2**s.n_qubits
    h = np.zeros((dim, dim), dtype=complex)
    seg = s.segment_at(t)
    for term in seg.terms:
        h += embed_pair_operator(term.matrix_at(t), s.n_qubits, *term.pair)
    return h


def exact_unitary_piecewise_constant(s: HamiltonianSchedule):
    """Product of per-segment matrix exponentials (exact for constant segments)."""
    dim = 2**s.n_qubits
    u = np.eye(dim, dtype=complex)
    for seg in s.segments:
        h = dense_hamiltonian(s, (seg.t_start + seg.t_end) / 2.0)
        u = linalg.expm_i(h, seg.length) @ u
    return u


def dense_schedule_unitary(g: GateSchedule):
    """Gate-schedule unitary via the dense embedding oracle."""
    dim = 2**g.n_qubits
    u = np.eye(dim, dtype=complex)
    for step in g.steps:
        for gate in step.gates:
            u = embed_pair_operator(gate.unitary, g.n_qubits, *gate.pair) @ u
    return u


def charpoly_max_abs_root(a):
    """Largest |root| of det(xI - A) via Faddeev-LeVerrier plus np.roots."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = [1.0 + 0.0j]
    m = np.zeros_like(a)
    c = 1.0 + 0.0j
    for k in range(1, n + 1):
        m = a @ m + c * np.eye(n)
        c = -np.trace(a @ m) / k
        coeffs.append(c)
    return float(np.max(np.abs(np.roots(coeffs))))


def oracle_chromatic_index(pairs, n):
    """Exhaustive enumeration: natural edge order, no ordering heuristics."""
    pairs = sorted(tuple(p) for p in pairs)
    if not pairs:
        return 0
    used = [set() for _ in range(n)]

    def colorable(k, i=0):
        if i == len(pairs):
            return True
        a, b = pairs[i]
        for c in range(k):
            if c not in used[a] and c not in used[b]:
                used[a].add(c)
                used[b].add(c)
                if colorable(k, i + 1):
                    used[a].discard(c)
                    used[b].discard(c)
                    return True
                used[a].discard(c)
                used[b].discard(c)
        return False

    k = 1
    while not colorable(k):
        k += 1
    return k


def single_pair_schedule(coeff_map, t_total=1.0, n=2, pair=(0, 1)):
    """Schedule with one pair term; coeff_map: label -> poly tuple."""
    coeffs = [()] * 16
    for label, poly in coeff_map.items():
        coeffs[PAULI_LABELS.index(label)] = tuple(poly)
    term = PairTerm(pair, tuple(coeffs))
    return HamiltonianSchedule(n, (Segment(0.0, float(t_total), (term,)),))


def two_pair_noncommuting(n=3, t_total=1.0):
    """XX on (0,1) and ZZ on (1,2): shared vertex, non-commuting terms."""
    xx = [()] * 16
    xx[PAULI_LABELS.index("XX")] = (1.0,)
    zz = [()] * 16
    zz[PAULI_LABELS.index("ZZ")] = (1.0,)
    terms = (PairTerm((0, 1), tuple(xx)), PairTerm((1, 2), tuple(zz)))
    return HamiltonianSchedule(n, (Segment(0.0, float(t_total), terms),))


def ghz_amplitudes(n):
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return amps
