"""Dense complex linear-algebra kernel for small operator matrices.

Everything works on plain ``numpy`` arrays of ``complex128``.  The
eigensolver is a hand-rolled cyclic Jacobi iteration with complex
rotations: at the dimensions this package touches (4x4 gate generators up
to 64x64 full-register unitaries) robustness and reproducibility matter
more than speed.

Sign convention, fixed package-wide: evolutions solve du/dt = -i H(t) u,
so ``expm_i(h, s)`` returns exp(-i*s*h), and ``unitary_log(u)`` returns the
Hermitian ``h`` with exp(+i*h) = u.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotUnitary

JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_FACTOR = 1e-14  # off-diagonal stop threshold, relative to Frobenius norm
EIG_CLUSTER_TOL = 1e-8     # eigenvalue spacing below this is treated as degenerate
PHASE_SNAP_TOL = 1e-12     # eigenphases this close to -pi are reported as +pi

__all__ = [
    "EigenDecomposition",
    "expm_i",
    "frobenius_norm",
    "hermitian_eig",
    "is_hermitian",
    "is_unitary",
    "operator_norm",
    "spectral_distance",
    "unitary_angle",
    "unitary_eig",
    "unitary_log",
]


class EigenDecomposition(NamedTuple):
    """Eigenvalues (ascending) and the unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(m, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{what} requires a square matrix, got shape {m.shape}")
    return m


def frobenius_norm(m) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(m)) ** 2)))


def is_hermitian(m, tol: float = 1e-10) -> bool:
    """Max-entry deviation of (M - M^dagger) below ``tol``."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(m - m.conj().T), initial=0.0)) < tol


def is_unitary(m, tol: float = 1e-10) -> bool:
    """Max-entry deviation of (M^dagger M - 1) below ``tol``."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    gram = m.conj().T @ m
    return float(np.max(np.abs(gram - np.eye(m.shape[0])), initial=0.0)) < tol


def hermitian_eig(m, tol: float = 1e-10) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Eigenvalues come back real and ascending; eigenvectors are the columns
    of a unitary matrix, so ``V diag(w) V^dagger`` reconstructs the input.
    Raises ``NotHermitian`` when the input fails :func:`is_hermitian` at
    ``tol`` and ``NoConvergence`` after ``JACOBI_MAX_SWEEPS`` sweeps.
    """
    m = _as_square(m, "hermitian_eig")
    if not is_hermitian(m, tol):
        raise NotHermitian(f"matrix is not Hermitian at tolerance {tol}")
    n = m.shape[0]
    a = (m + m.conj().T) / 2.0
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return EigenDecomposition(np.array([a[0, 0].real]), v)

    stop = JACOBI_OFF_FACTOR * frobenius_norm(a)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = float(np.max(np.abs(np.triu(a, 1)), initial=0.0))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                absb = abs(b)
                if absb <= stop:
                    continue
                # Phase-align the pivot, then a real 2x2 Jacobi rotation.
                phase = b / absb
                tau = (a[q, q].real - a[p, p].real) / (2.0 * absb)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rpp, rpq = c, s
                rqp, rqq = -s * phase.conjugate(), c * phase.conjugate()
                # a <- R^dagger a R, columns first.
                cp = a[:, p] * rpp + a[:, q] * rqp
                cq = a[:, p] * rpq + a[:, q] * rqq
                a[:, p], a[:, q] = cp, cq
                rp = np.conjugate(rpp) * a[p, :] + np.conjugate(rqp) * a[q, :]
                rq = np.conjugate(rpq) * a[p, :] + np.conjugate(rqq) * a[q, :]
                a[p, :], a[q, :] = rp, rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p] * rpp + v[:, q] * rqp
                vq = v[:, p] * rpq + v[:, q] * rqq
                v[:, p], v[:, q] = vp, vq
    else:
        raise NoConvergence(
            f"Jacobi sweep cap {JACOBI_MAX_SWEEPS} exceeded for a {n}x{n} matrix"
        )

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def operator_norm(m) -> float:
    """Largest singular value; for Hermitian input the largest |eigenvalue|."""
    m = _as_square(m, "operator_norm")
    if is_hermitian(m, 1e-10):
        w = hermitian_eig(m).eigenvalues
        return float(np.max(np.abs(w)))
    gram = m.conj().T @ m
    gram = (gram + gram.conj().T) / 2.0
    w = hermitian_eig(gram).eigenvalues
    return float(math.sqrt(max(float(w[-1]), 0.0)))


def expm_i(h, s: float) -> np.ndarray:
    """exp(-i*s*h) for Hermitian ``h``, via the eigendecomposition."""
    h = _as_square(h, "expm_i")
    if not is_hermitian(h, 1e-10):
        raise NotHermitian("expm_i requires a Hermitian generator")
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * s * w)) @ v.conj().T


def unitary_eig(u, tol: float = 1e-10) -> EigenDecomposition:
    """Eigenphases in (-pi, pi] and eigenvectors of a unitary matrix.

    Works through the two commuting Hermitian parts (u + u^dagger)/2 and
    (u - u^dagger)/(2i): degenerate clusters of the first (spacing below
    ``EIG_CLUSTER_TOL``) are resolved by rediagonalizing the second inside
    the cluster.  Phases within ``PHASE_SNAP_TOL`` of -pi snap to +pi so
    the principal branch is closed at the upper end.
    """
    u = _as_square(u, "unitary_eig")
    if not is_unitary(u, tol):
        raise NotUnitary(f"matrix is not unitary at tolerance {tol}")
    h_re = (u + u.conj().T) / 2.0
    h_im = (u - u.conj().T) / 2.0j
    w1, v = hermitian_eig(h_re)
    n = u.shape[0]

    start = 0
    while start < n:
        stop_idx = start + 1
        while stop_idx < n and w1[stop_idx] - w1[stop_idx - 1] < EIG_CLUSTER_TOL:
            stop_idx += 1
        if stop_idx - start > 1:
            block = v[:, start:stop_idx].conj().T @ h_im @ v[:, start:stop_idx]
            block = (block + block.conj().T) / 2.0
            _, rot = hermitian_eig(block)
            v[:, start:stop_idx] = v[:, start:stop_idx] @ rot
        start = stop_idx

    uv = u @ v
    lam = np.einsum("ij,ij->j", v.conj(), uv)
    phases = np.arctan2(lam.imag, lam.real)
    phases[phases <= -math.pi + PHASE_SNAP_TOL] = math.pi
    order = np.argsort(phases, kind="stable")
    return EigenDecomposition(phases[order], v[:, order])


def unitary_angle(u) -> float:
    """Smallest norm of a Hermitian generator: max |principal eigenphase|."""
    phases, _ = unitary_eig(u)
    return float(np.max(np.abs(phases)))


def unitary_log(u) -> np.ndarray:
    """Principal Hermitian logarithm: exp(i * unitary_log(u)) = u."""
    phases, v = unitary_eig(u)
    h = (v * phases) @ v.conj().T
    return (h + h.conj().T) / 2.0


def spectral_distance(a, b) -> float:
    """Operator norm of (a - b)."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    return operator_norm(a - b)
