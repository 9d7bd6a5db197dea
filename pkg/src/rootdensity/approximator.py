"""Polynomial batch generation: parametric coefficient families and local
least-squares approximation of a function over a partitioned rectangle.

Families are defined by one expression per coefficient over parameters
t1..tk sampled on [0, 1]. The expression grammar is a small, closed
subset of Python syntax (validated against a whitelist, never executed
as code): complex/real literals, parameter names, unary minus, ``+ - *``,
parentheses, and calls to ``sin``, ``cos``, ``exp``.

Enumeration order is fixed: samples walk the parameter grid with t1
varying fastest, so a family is a reproducible stream.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import DegenerateFit, ExpressionEvalError, FamilyFormatError
from .polynomial import MONIC_EPS, Polynomial

_ALLOWED_CALLS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}

# Chunk width for vectorized family evaluation; fixed so that streamed
# results do not depend on consumer batch sizes.
FAMILY_CHUNK = 8192


@dataclass(frozen=True)
class Expression:
    """Validated coefficient expression; evaluate() accepts scalar or array t."""

    source: str
    n_params: int
    _tree: ast.expression

    def evaluate(self, t: np.ndarray):
        """t has shape (n_params,) or (n_params, B); returns complex scalar/array."""
        return _eval_node(self._tree.body, np.asarray(t))


def parse_expression(source: str, n_params: int) -> Expression:
    """Parse and validate one coefficient expression against the grammar."""
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise FamilyFormatError(f"cannot parse expression {source!r}: {exc}") from exc
    _validate_node(tree.body, source, n_params)
    return Expression(source=source, n_params=n_params, _tree=tree)


def _validate_node(node, source, n_params):
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
        _validate_node(node.left, source, n_params)
        _validate_node(node.right, source, n_params)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _validate_node(node.operand, source, n_params)
    elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        pass
    elif isinstance(node, ast.Name):
        if _param_index(node.id, n_params) is None:
            raise FamilyFormatError(
                f"unknown name {node.id!r} in {source!r}; parameters are t1..t{n_params}"
            )
    elif isinstance(node, ast.Call):
        if (not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS
                or len(node.args) != 1 or node.keywords):
            raise FamilyFormatError(
                f"only sin(x), cos(x), exp(x) calls are allowed in {source!r}"
            )
        _validate_node(node.args[0], source, n_params)
    else:
        raise FamilyFormatError(
            f"unsupported syntax {ast.dump(node)[:40]}... in {source!r}"
        )


def _param_index(name: str, n_params: int):
    # "t" is accepted as an alias for t1 in single-parameter families
    if name == "t" and n_params >= 1:
        return 0
    if name.startswith("t") and name[1:].isdigit():
        idx = int(name[1:]) - 1
        if 0 <= idx < n_params:
            return idx
    return None


def _eval_node(node, t):
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, t)
        right = _eval_node(node.right, t)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        return left * right
    if isinstance(node, ast.UnaryOp):
        value = _eval_node(node.operand, t)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.Constant):
        return complex(node.value)
    if isinstance(node, ast.Name):
        idx = _param_index(node.id, t.shape[0])
        return t[idx]
    if isinstance(node, ast.Call):
        return _ALLOWED_CALLS[node.func.id](_eval_node(node.args[0], t))
    raise AssertionError("unreachable: expression validated at parse time")


@dataclass(frozen=True)
class ParametricFamily:
    """Degree-n family with one expression per coefficient (monic implied).

    ``axis_counts`` lists the sample count per parameter axis; each axis
    is sampled at ``linspace(0, 1, count)``. ``sample_count`` is the grid
    size. Zero axes means a single constant polynomial.
    """

    degree: int
    expressions: tuple
    axis_counts: tuple

    def __post_init__(self):
        if self.degree < 1:
            raise FamilyFormatError("family degree must be >= 1")
        if len(self.expressions) != self.degree:
            raise FamilyFormatError(
                f"need exactly {self.degree} coefficient expressions, got {len(self.expressions)}"
            )
        if any(c < 1 for c in self.axis_counts):
            raise FamilyFormatError("axis sample counts must be >= 1")

    @property
    def n_params(self) -> int:
        return len(self.axis_counts)

    @property
    def sample_count(self) -> int:
        return int(np.prod(self.axis_counts)) if self.axis_counts else 1


def _axis_values(count: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, count) if count > 1 else np.zeros(1)


def parameter_grid(family: ParametricFamily, start: int, stop: int) -> np.ndarray:
    """Parameter columns for sample indices [start, stop); shape (k, stop-start).

    Sample s maps to multi-index (s mod c1, (s // c1) mod c2, ...): t1
    varies fastest.
    """
    idx = np.arange(start, stop, dtype=np.int64)
    k = family.n_params
    out = np.zeros((max(k, 1), idx.size))
    rem = idx
    for axis in range(k):
        count = family.axis_counts[axis]
        out[axis] = _axis_values(count)[rem % count]
        rem = rem // count
    return out[:k] if k else out[:0]


def family_coefficients(family: ParametricFamily, start: int, stop: int):
    """Coefficient rows for a sample range, plus the indices of skipped samples.

    Rows with any non-finite coefficient are dropped from the output and
    reported by absolute sample index.
    """
    t = parameter_grid(family, start, stop)
    count = stop - start
    coeffs = np.empty((count, family.degree), dtype=np.complex128)
    # overflow/invalid results are the skip-and-count contract, not errors
    with np.errstate(over="ignore", invalid="ignore"):
        for j, expr in enumerate(family.expressions):
            value = expr.evaluate(t)
            coeffs[:, j] = np.broadcast_to(np.asarray(value, dtype=np.complex128), (count,))
    finite = np.all(np.isfinite(coeffs), axis=1)
    skipped = (np.arange(start, stop)[~finite]).tolist()
    return coeffs[finite], skipped


def enumerate_family(family: ParametricFamily) -> Iterator[Polynomial]:
    """Stream the family as Polynomial values in fixed grid order.

    Samples whose coefficients evaluate non-finite are skipped; callers
    needing the skip count should use ``family_coefficients`` directly.
    """
    total = family.sample_count
    for start in range(0, total, FAMILY_CHUNK):
        stop = min(start + FAMILY_CHUNK, total)
        coeffs, _ = family_coefficients(family, start, stop)
        for row in coeffs:
            yield Polynomial(row)


def load_family(path) -> ParametricFamily:
    """Read a family definition file.

    Line-oriented ``key = value`` text; ``#`` starts a comment. Keys:
    ``degree`` (int), ``axes`` (whitespace/comma-separated sample counts,
    omit or leave empty for a constant family), and ``c0`` .. ``c<n-1>``
    (one expression per coefficient, low-degree-first).
    """
    entries = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FamilyFormatError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            entries[key.strip()] = value.strip()
    if "degree" not in entries:
        raise FamilyFormatError(f"{path}: missing 'degree'")
    try:
        degree = int(entries.pop("degree"))
    except ValueError as exc:
        raise FamilyFormatError(f"{path}: degree must be an integer") from exc
    axes_text = entries.pop("axes", "").replace(",", " ").split()
    try:
        axis_counts = tuple(int(tok) for tok in axes_text)
    except ValueError as exc:
        raise FamilyFormatError(f"{path}: axes must be integers") from exc
    expressions = []
    for j in range(degree):
        key = f"c{j}"
        if key not in entries:
            raise FamilyFormatError(f"{path}: missing coefficient expression '{key}'")
        expressions.append(parse_expression(entries.pop(key), len(axis_counts)))
    if entries:
        raise FamilyFormatError(f"{path}: unknown keys {sorted(entries)}")
    return ParametricFamily(degree=degree, expressions=tuple(expressions),
                            axis_counts=axis_counts)


# ---------------------------------------------------------------------------
# Local polynomial approximation over a partitioned domain


@dataclass(frozen=True)
class DomainPartition:
    """Rectangle in the complex plane split into cells_x * cells_y half-open cells."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    cells_x: int
    cells_y: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("partition bounds must satisfy min < max")
        if self.cells_x < 1 or self.cells_y < 1:
            raise ValueError("cell counts must be >= 1")

    def cell_bounds(self, i: int, j: int):
        """Bounds (x0, x1, y0, y1) of cell (i, j); i indexes x, j indexes y."""
        dx = (self.x_max - self.x_min) / self.cells_x
        dy = (self.y_max - self.y_min) / self.cells_y
        return (self.x_min + i * dx, self.x_min + (i + 1) * dx,
                self.y_min + j * dy, self.y_min + (j + 1) * dy)

    def cells(self):
        for j in range(self.cells_y):
            for i in range(self.cells_x):
                yield (i, j)


@dataclass(frozen=True)
class FitResult:
    """Fitted monic polynomial for one cell plus its validation sup-norm error."""

    poly: Polynomial
    error_bound: float
    cell_id: tuple


def _midpoint_grid(x0, x1, y0, y1, side):
    xs = x0 + (np.arange(side) + 0.5) / side * (x1 - x0)
    ys = y0 + (np.arange(side) + 0.5) / side * (y1 - y0)
    gx, gy = np.meshgrid(xs, ys)
    return (gx + 1j * gy).ravel()


def fit_cell(f: Callable, bounds, degree: int, oversample: int = 4,
             cell_id=(0, 0)) -> FitResult:
    """Least-squares degree-n fit of f on one cell.

    The basis is monomials in (z - center)/half_width, which keeps the
    normal system well conditioned on small cells; the solved coefficients
    are then re-expanded to plain global monomials and normalized monic.
    Fit samples form a midpoint tensor grid of at least
    oversample*(degree+1) points; the validation grid is 8x denser per
    axis and disjoint from it by construction. error_bound is the max
    |f - g| over the validation grid.

    Conditioning limit: the degree-k local coefficient scales like
    half_width**k relative to the sample values, so recovering global
    coefficients loses roughly eps/half_width**degree in fp64. On a
    half-width-1e-3 cell that is ~1e-10 at degree 2 but only ~1e-4 at
    degree 4; error_bound (accuracy of g as a function on the cell) is
    unaffected.

    Raises DegenerateFit when the global leading coefficient falls below
    the monic threshold (the cell then contributes no polynomial).
    """
    x0, x1, y0, y1 = bounds
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    center = complex((x0 + x1) / 2.0, (y0 + y1) / 2.0)
    half_width = max((x1 - x0) / 2.0, (y1 - y0) / 2.0)
    side = int(math.ceil(math.sqrt(oversample * (degree + 1))))
    z_fit = _midpoint_grid(x0, x1, y0, y1, side)
    w_fit = (z_fit - center) / half_width
    powers = np.arange(degree + 1)
    vander = w_fit[:, None] ** powers[None, :]
    samples = np.asarray(f(z_fit), dtype=np.complex128)
    if not np.all(np.isfinite(samples)):
        raise ExpressionEvalError(f"function not finite on cell {cell_id}")
    local, *_ = np.linalg.lstsq(vander, samples, rcond=None)

    z_val = _midpoint_grid(x0, x1, y0, y1, 8 * side)
    w_val = (z_val - center) / half_width
    fitted = (w_val[:, None] ** powers[None, :]) @ local
    error = float(np.abs(fitted - np.asarray(f(z_val), dtype=np.complex128)).max())

    global_coeffs = _recenter_to_global(local, center, half_width)
    lead = global_coeffs[-1]
    if abs(lead) <= MONIC_EPS[np.dtype(np.complex128)]:
        raise DegenerateFit(
            f"cell {cell_id}: |leading|={abs(lead):.3e} below monic threshold"
        )
    return FitResult(
        poly=Polynomial(global_coeffs[:-1] / lead),
        error_bound=error,
        cell_id=tuple(cell_id),
    )


def _recenter_to_global(local: np.ndarray, center: complex, half_width: float) -> np.ndarray:
    """Expand sum_k local[k] ((z - center)/h)^k into plain z-monomial coefficients."""
    n = local.size - 1
    out = np.zeros(n + 1, dtype=np.complex128)
    for k in range(n + 1):
        ck = local[k] / half_width ** k
        for j in range(k + 1):
            out[j] += ck * math.comb(k, j) * (-center) ** (k - j)
    return out


def accept_cell(result: FitResult, eps: float) -> bool:
    """Strictly-below check: only cells with error_bound < eps feed the solver."""
    return result.error_bound < eps


def fit_partition(f: Callable, partition: DomainPartition, degree: int,
                  oversample: int = 4) -> Iterator[FitResult]:
    """Fit every cell, yielding results in fixed cell order; degenerate cells skipped."""
    for (i, j) in partition.cells():
        try:
            yield fit_cell(f, partition.cell_bounds(i, j), degree,
                           oversample=oversample, cell_id=(i, j))
        except DegenerateFit:
            continue


def resolve_function(name: str) -> Callable:
    """Look up a named built-in function for fit mode; no runtime code loading.

    Names: "sin", "cos", "exp", "poly:<c0,c1,...>" (low-degree-first
    complex coefficients, Python literal syntax), and
    "rational:<num>/<den>" with the same coefficient lists.
    """
    base = {"sin": np.sin, "cos": np.cos, "exp": np.exp}
    if name in base:
        return base[name]
    if name.startswith("poly:"):
        coeffs = _parse_coeff_list(name[5:], name)
        return lambda z: np.polyval(coeffs[::-1], z)
    if name.startswith("rational:"):
        body = name[len("rational:"):]
        if "/" not in body:
            raise FamilyFormatError(f"rational spec {name!r} needs '<num>/<den>'")
        num_text, den_text = body.split("/", 1)
        num = _parse_coeff_list(num_text, name)
        den = _parse_coeff_list(den_text, name)
        return lambda z: np.polyval(num[::-1], z) / np.polyval(den[::-1], z)
    raise FamilyFormatError(f"unknown function {name!r}")


def _parse_coeff_list(text: str, context: str) -> np.ndarray:
    try:
        values = [complex(ast.literal_eval(tok.strip())) for tok in text.split(",") if tok.strip()]
    except (ValueError, SyntaxError) as exc:
        raise FamilyFormatError(f"bad coefficient list in {context!r}") from exc
    if not values:
        raise FamilyFormatError(f"empty coefficient list in {context!r}")
    return np.array(values, dtype=np.complex128)
