"""Independent reference implementations used to validate the solver.

Nothing here shares code with the production eigensolver: the dense QR
reference forms full Q and R matrices with explicit products, and the
Aberth-Ehrlich solver is a different algorithm entirely. Keeping the
routes separate is the point; a bug would have to occur twice, in two
formulations, to go unnoticed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import LengthMismatch, NoConvergence
from .polynomial import Polynomial

# Corpus filter used by accuracy assertions: roots pairwise separated by
# at least this distance inside the radius-2 disk. Clustered roots degrade
# any QR/Aberth comparison.
WELL_CONDITIONED_MIN_SEPARATION = 0.1
WELL_CONDITIONED_RADIUS = 2.0


@dataclass(frozen=True)
class RootMatch:
    """Optimal pairing between two equal-length root sets."""

    assignment: tuple
    max_error: float
    mean_error: float


def match_roots(a, b) -> RootMatch:
    """Minimal-max-distance assignment by exhaustive permutation search.

    Exhaustive search is quadratic-factorial but obviously correct, and
    the degrees involved (<= 10) keep it cheap.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"cannot match shapes {a.shape} and {b.shape}")
    n = a.size
    if n > 10:
        raise LengthMismatch("exhaustive matching supports length <= 10")
    dist = np.abs(a[:, None] - b[None, :])
    best_perm = None
    best_max = np.inf
    for perm in permutations(range(n)):
        worst = max(dist[i, perm[i]] for i in range(n))
        if worst < best_max:
            best_max = worst
            best_perm = perm
    mean = float(np.mean([dist[i, best_perm[i]] for i in range(n)]))
    return RootMatch(assignment=best_perm, max_error=float(best_max), mean_error=mean)


def aberth_solve(p: Polynomial, tol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration; independent of the QR path.

    Initial guesses sit on a slightly perturbed circle of radius
    1 + max|a_k|. Convergence requires every residual |p(z_i)| to drop
    below tol times an evaluation-scale bound; multiple roots satisfy the
    relaxed residual check but are not polished further.
    """
    n = p.degree
    coeffs = p.coeffs.astype(np.complex128)
    full = np.concatenate([coeffs, [1.0 + 0j]])          # low-first, incl. leading 1
    deriv = full[1:] * np.arange(1, n + 1)
    abs_high_first = np.abs(full)[::-1]

    radius = 1.0 + float(np.abs(coeffs).max()) if n else 1.0
    # deterministic asymmetric phase offset so no guess starts on a root axis
    angles = 2.0 * np.pi * (np.arange(n) + 0.376) / n
    z = radius * np.exp(1j * angles)

    for _ in range(max_iter):
        pv = np.polyval(full[::-1], z)
        scale = np.polyval(abs_high_first, np.abs(z))
        if np.all(np.abs(pv) <= tol * np.maximum(scale, 1.0)):
            return z
        dv = np.polyval(deriv[::-1], z)
        ratio = pv / np.where(dv == 0, 1e-300, dv)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        correction = 1.0 - ratio * (1.0 / diff).sum(axis=1)
        z = z - ratio / np.where(correction == 0, 1e-300, correction)
    raise NoConvergence(f"Aberth did not converge in {max_iter} iterations")


def _reference_givens(a, b):
    # Same coefficient arithmetic as the production path (including the
    # overflow-safe scaling and the zero-subdiagonal identity convention),
    # written out independently: this reference exists to validate the
    # banded-storage and two-row/two-column update optimizations, so the
    # rotations themselves must match bit for bit.
    if b == 0.0:
        return 1.0 + 0j, 0.0 + 0j
    scale = max(abs(a.real), abs(a.imag), abs(b.real), abs(b.imag))
    a_n = a / scale
    b_n = b / scale
    norm = np.sqrt(abs(a_n) ** 2 + abs(b_n) ** 2)
    return np.conj(a_n) / norm, np.conj(b_n) / norm


def _embedded_rotation(m, i, c, s):
    q_i = np.eye(m, dtype=np.complex128)
    q_i[i - 1, i - 1] = c
    q_i[i - 1, i] = s
    q_i[i, i - 1] = -np.conj(s)
    q_i[i, i] = np.conj(c)
    return q_i


def _naive_matmul(a, b):
    # Schoolbook product via elementwise ufuncs rather than BLAS: fused
    # multiply-adds in BLAS kernels round differently from the production
    # path's updates. The rotation rows contribute only two nonzero
    # products per entry, so this form reproduces them exactly.
    return (a[:, :, None] * b[None, :, :]).sum(axis=1)


def _naive_matmul_right(w, q_dagger):
    # w @ q_dagger with the rotation coefficient as the left multiply
    # operand: complex multiplication is not bitwise commutative under
    # fused SIMD kernels, and the production path multiplies
    # coefficient-first.
    return (q_dagger.T[None, :, :] * w[:, None, :]).sum(axis=2)


def reference_qr_decompose(A: np.ndarray):
    """Explicit (Q, R) of a Hessenberg matrix via full embedded rotations.

    Q is the accumulated product of the rotation embeddings; R is the
    triangularized matrix with eliminated entries written as zero.
    """
    m = A.shape[0]
    r_matrix = np.array(A, dtype=np.complex128)
    q_conj = np.eye(m, dtype=np.complex128)
    for i in range(1, m):
        c, s = _reference_givens(r_matrix[i - 1, i - 1], r_matrix[i, i - 1])
        q_i = _embedded_rotation(m, i, c, s)
        r_matrix = _naive_matmul(q_i, r_matrix)
        r_matrix[i, i - 1] = 0.0
        q_conj = _naive_matmul(q_i, q_conj)
    return q_conj.conj().T, r_matrix


def reference_qr_iteration(A: np.ndarray, m: int) -> np.ndarray:
    """One shifted QR iteration on the leading m x m block, dense and naive.

    Every rotation is a full-size embedded matrix applied by an ordinary
    matrix product (left during triangularization, conjugate-transposed
    from the right afterwards); nothing exploits the band structure. The
    eliminated subdiagonal entry is written as zero after each left
    product, because elimination is what the step means. Entries outside
    the active block pass through unchanged.
    """
    A = np.array(A, dtype=np.complex128)
    shift = A[m - 1, m - 1]
    work = A[:m, :m] - shift * np.eye(m)
    rotations = []
    for i in range(1, m):
        c, s = _reference_givens(work[i - 1, i - 1], work[i, i - 1])
        q_i = _embedded_rotation(m, i, c, s)
        work = _naive_matmul(q_i, work)
        work[i, i - 1] = 0.0
        rotations.append(q_i)
    for q_i in rotations:
        work = _naive_matmul_right(work, q_i.conj().T)
    A[:m, :m] = work + shift * np.eye(m)
    return A


def dense_qr_reference(A: np.ndarray, iterations: int) -> np.ndarray:
    """Full fixed-schedule eigenvalue extraction on a dense square matrix.

    Identical schedule to the production solver (iterations per level,
    trailing-entry extraction, shrink) but with none of the structure
    exploitation.
    """
    A = np.array(A, dtype=np.complex128)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("expected a square matrix")
    eig = np.zeros(n, dtype=np.complex128)
    m = n
    while m >= 2:
        for _ in range(iterations):
            A = reference_qr_iteration(A, m)
        eig[m - 1] = A[m - 1, m - 1]
        m -= 1
    eig[0] = A[0, 0]
    return eig


def random_separated_roots(rng: np.random.RandomState, degree: int,
                           min_separation: float = WELL_CONDITIONED_MIN_SEPARATION,
                           radius: float = WELL_CONDITIONED_RADIUS) -> np.ndarray:
    """Roots drawn uniformly from the disk, rejecting pairs closer than the bound."""
    picked: list[complex] = []
    while len(picked) < degree:
        z = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        if abs(z) > radius:
            continue
        if all(abs(z - w) >= min_separation for w in picked):
            picked.append(z)
    return np.array(picked, dtype=np.complex128)


def random_hessenberg(rng: np.random.RandomState, order: int) -> np.ndarray:
    """Dense random upper Hessenberg matrix with unit-scale complex entries."""
    dense = rng.standard_normal((order, order)) + 1j * rng.standard_normal((order, order))
    return np.triu(dense, -1)
