"""Monic complex polynomials and their Frobenius companion matrices.

Coefficients are stored low-degree-first: ``coeffs[k]`` multiplies ``z**k``
and the leading (degree-n) coefficient is implicitly 1. The companion
first row reverses that order, so both Horner evaluation and the matrix
layout stay index-simple.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLeadingCoefficient

# Normalization thresholds per precision. Near-zero leading coefficients
# are rejected instead of silently amplifying roundoff; reducing the
# degree is the caller's job.
MONIC_EPS = {
    np.dtype(np.complex64): 1e-6,
    np.dtype(np.complex128): 1e-12,
}

PRECISION_DTYPES = {
    "fp32": np.dtype(np.complex64),
    "fp64": np.dtype(np.complex128),
}


def complex_dtype(precision: str) -> np.dtype:
    """Map a precision name ('fp32' or 'fp64') to its complex dtype."""
    try:
        return PRECISION_DTYPES[precision]
    except KeyError:
        raise ValueError(f"unknown precision {precision!r}; expected 'fp32' or 'fp64'")


@dataclass(frozen=True)
class Polynomial:
    """Monic polynomial z**n + coeffs[n-1]*z**(n-1) + ... + coeffs[0].

    ``coeffs`` has length n (the degree); the unit leading coefficient is
    implicit. Values are immutable after construction.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.dtype not in MONIC_EPS:
            c = c.astype(np.complex128)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a 1-D array of length >= 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size

    @property
    def dtype(self) -> np.dtype:
        return self.coeffs.dtype


@dataclass(frozen=True)
class CompanionMatrix:
    """First-row form of the Frobenius companion matrix.

    ``first_row[j]`` holds the negated coefficient of z**(n-1-j); the unit
    subdiagonal is implicit.
    """

    first_row: np.ndarray

    @property
    def order(self) -> int:
        return self.first_row.size

    def to_dense(self) -> np.ndarray:
        n = self.order
        dense = np.zeros((n, n), dtype=self.first_row.dtype)
        dense[0, :] = self.first_row
        for i in range(1, n):
            dense[i, i - 1] = 1.0
        return dense


def make_monic(coeffs, dtype=None) -> Polynomial:
    """Normalize a full coefficient array (length n+1, low-degree-first).

    Divides by the leading coefficient. Raises
    DegenerateLeadingCoefficient when its magnitude is at or below the
    precision's monic threshold, signalling that the caller must reduce
    the degree instead.
    """
    c = np.asarray(coeffs)
    if dtype is not None:
        c = c.astype(dtype)
    elif c.dtype not in MONIC_EPS:
        c = c.astype(np.complex128)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("need at least 2 coefficients (degree >= 1)")
    lead = c[-1]
    if abs(lead) <= MONIC_EPS[c.dtype]:
        raise DegenerateLeadingCoefficient(
            f"|leading|={abs(lead):.3e} <= {MONIC_EPS[c.dtype]:.0e}"
        )
    return Polynomial(c[:-1] / lead)


def companion(p: Polynomial) -> CompanionMatrix:
    """Companion matrix of a monic polynomial; eigenvalues are its roots."""
    return CompanionMatrix(first_row=(-p.coeffs[::-1]).copy())


def evaluate(p: Polynomial, z):
    """Evaluate p at z (scalar or array) via the Horner recurrence."""
    z = np.asarray(z, dtype=p.dtype)
    acc = np.ones_like(z)  # implicit monic leading coefficient
    for k in range(p.degree - 1, -1, -1):
        acc = acc * z + p.coeffs[k]
    return acc if acc.ndim else acc[()]


def from_roots(roots, dtype=np.complex128) -> Polynomial:
    """Monic polynomial with the given roots, by repeated (z - r) products."""
    r = np.asarray(roots, dtype=dtype)
    if r.ndim != 1 or r.size < 1:
        raise ValueError("need at least one root")
    # high-degree-first accumulator, leading coefficient kept at 1
    acc = np.array([1.0], dtype=dtype)
    for rk in r:
        acc = np.convolve(acc, np.array([1.0, -rk], dtype=dtype))
    return Polynomial(acc[::-1][:-1])
