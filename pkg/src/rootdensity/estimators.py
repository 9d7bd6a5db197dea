"""scikit-learn compatible facade over the numeric pipeline stages.

The batch data path is transform-shaped (coefficients -> roots -> density
grid), so the solver and rasterizer are exposed as stateless transformers:
``fit`` validates and records the input width, ``transform`` does the
work, and ``get_params``/``set_params``/``clone`` behave as usual. They
compose in an ordinary ``sklearn.pipeline.Pipeline``:

    make_pipeline(CompanionRootSolver(), DensityRasterizer(width=256, height=256))
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import raster
from .eigensolver import SolveConfig, batch_solve
from .oracle import aberth_solve
from .polynomial import Polynomial
from .validation import check_coefficient_matrix, check_root_array


class CompanionRootSolver(TransformerMixin, BaseEstimator):
    """Batch root solver: rows of monic coefficients in, rows of roots out.

    Parameters mirror the solver configuration: ``iterations`` per
    deflation level, ``precision`` ('fp32' or 'fp64'), ``workers`` for
    chunk-parallel solving (output is bit-identical for any worker
    count), and the experimental ``early_deflate``/``deflate_tol`` pair.
    """

    def __init__(self, iterations=10, precision="fp64", workers=1,
                 early_deflate=False, deflate_tol=1e-12):
        self.iterations = iterations
        self.precision = precision
        self.workers = workers
        self.early_deflate = early_deflate
        self.deflate_tol = deflate_tol

    def _config(self) -> SolveConfig:
        return SolveConfig(
            iterations=self.iterations,
            precision=self.precision,
            early_deflate=self.early_deflate,
            deflate_tol=self.deflate_tol,
        )

    def fit(self, X, y=None):
        X = check_coefficient_matrix(X, self.precision)
        self._config()  # validate parameters eagerly
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        X = check_coefficient_matrix(X, self.precision)
        return batch_solve(X, self._config(), worker_count=self.workers)


class AberthRootSolver(TransformerMixin, BaseEstimator):
    """Reference simultaneous-iteration solver with the same array surface.

    Slower than CompanionRootSolver and adaptive rather than fixed-cycle;
    useful as a drop-in cross-check inside the same pipelines.
    """

    def __init__(self, tol=1e-12, max_iter=200):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = check_coefficient_matrix(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        X = check_coefficient_matrix(X)
        out = np.empty_like(X)
        for row_index in range(X.shape[0]):
            out[row_index] = aberth_solve(
                Polynomial(X[row_index]), tol=self.tol, max_iter=self.max_iter
            )
        return out


class DensityRasterizer(TransformerMixin, BaseEstimator):
    """Roots to a density-count image: complex array in, (height, width) uint32 out.

    ``viewport`` is (x_min, x_max, y_min, y_max). Out-of-view roots are
    dropped; per-call totals are available on ``last_grid_`` after a
    transform.
    """

    def __init__(self, viewport=(-2.0, 2.0, -2.0, 2.0), width=256, height=256):
        self.viewport = viewport
        self.width = width
        self.height = height

    def _viewport(self) -> raster.Viewport:
        x0, x1, y0, y1 = self.viewport
        return raster.Viewport(x_min=x0, x_max=x1, y_min=y0, y_max=y1,
                               width=self.width, height=self.height)

    def fit(self, X, y=None):
        self._viewport()  # validate parameters eagerly
        return self

    def transform(self, X) -> np.ndarray:
        roots = check_root_array(X)
        viewport = self._viewport()
        grid = raster.DensityGrid(width=self.width, height=self.height)
        raster.accumulate(grid, viewport, roots)
        self.last_grid_ = grid
        return grid.counts
