"""Input validation helpers for the estimator layer.

scikit-learn's own validators reject complex data, so the estimators
here use these instead: same spirit (coerce, check shape and finiteness,
fail loudly), complex-aware.
"""

from __future__ import annotations

import numpy as np

from .polynomial import complex_dtype


def check_coefficient_matrix(X, precision: str = "fp64") -> np.ndarray:
    """Coerce X to a finite, 2-D complex (n_samples, degree) array."""
    dtype = complex_dtype(precision)
    X = np.asarray(X)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D coefficient array, got ndim={X.ndim}")
    if X.shape[1] < 1:
        raise ValueError("coefficient rows must have length >= 1 (degree >= 1)")
    X = X.astype(dtype, copy=False)
    if X.size and not np.all(np.isfinite(X)):
        raise ValueError("coefficients must be finite (no NaN/Inf)")
    return X


def check_root_array(R) -> np.ndarray:
    """Coerce roots to a complex array (any shape); non-finite entries allowed
    (the rasterizer counts them as dropped)."""
    R = np.asarray(R)
    if not np.issubdtype(R.dtype, np.complexfloating):
        R = R.astype(np.complex128)
    return R
