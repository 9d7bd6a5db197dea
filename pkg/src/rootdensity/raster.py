"""Root streams to pixel hit counts, and hit counts to images.

Pixel cells are half-open with the imaginary axis pointing up in the
plane and down in the image: a viewport covers [x_min, x_max) in the
real direction and (y_min, y_max] in the imaginary direction. Counts
saturate instead of wrapping, and exact in-view/dropped totals are kept
separately so conservation holds even at saturation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch

COUNT_MAX = np.uint32(0xFFFFFFFF)


@dataclass(frozen=True)
class Viewport:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("viewport bounds must satisfy x_min < x_max and y_min < y_max")
        if self.width < 1 or self.height < 1:
            raise ValueError("viewport must be at least 1x1 pixels")


@dataclass
class DensityGrid:
    """Saturating per-pixel hit counts plus exact stream accounting."""

    width: int
    height: int
    counts: np.ndarray = field(default=None)
    in_view: int = 0
    dropped: int = 0

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros((self.height, self.width), dtype=np.uint32)
        elif self.counts.shape != (self.height, self.width) or self.counts.dtype != np.uint32:
            raise ValueError("counts must be uint32 with shape (height, width)")

    @property
    def total_streamed(self) -> int:
        return self.in_view + self.dropped

    @property
    def max_count(self) -> int:
        return int(self.counts.max()) if self.counts.size else 0


def root_to_pixel(v: Viewport, z: complex):
    """Pixel (px, py) for one root, or None when outside the half-open viewport."""
    px = int(np.floor((z.real - v.x_min) / (v.x_max - v.x_min) * v.width))
    py = int(np.floor((v.y_max - z.imag) / (v.y_max - v.y_min) * v.height))
    if 0 <= px < v.width and 0 <= py < v.height:
        return px, py
    return None


def pixel_coordinates(v: Viewport, roots: np.ndarray):
    """Vectorized mapping; returns (px, py, in_view_mask) for a flat root array.

    Out-of-view entries (including non-finite roots) carry pixel -1 and a
    False mask bit.
    """
    roots = np.asarray(roots).ravel()
    fx = np.floor((roots.real - v.x_min) / (v.x_max - v.x_min) * v.width)
    fy = np.floor((v.y_max - roots.imag) / (v.y_max - v.y_min) * v.height)
    mask = np.isfinite(roots) & (fx >= 0) & (fx < v.width) & (fy >= 0) & (fy < v.height)
    px = np.where(mask, fx, -1.0).astype(np.int64)
    py = np.where(mask, fy, -1.0).astype(np.int64)
    return px, py, mask


def accumulate(grid: DensityGrid, v: Viewport, roots) -> None:
    """Add each in-view root's pixel hit; out-of-view roots go to the dropped tally."""
    if (grid.width, grid.height) != (v.width, v.height):
        raise DimensionMismatch("grid does not match viewport dimensions")
    roots = np.asarray(roots).ravel()
    if roots.size == 0:
        return
    px, py, mask = pixel_coordinates(v, roots)
    flat = py[mask] * grid.width + px[mask]
    hits = np.bincount(flat, minlength=grid.width * grid.height).astype(np.uint64)
    widened = grid.counts.astype(np.uint64).ravel() + hits
    grid.counts = np.minimum(widened, np.uint64(COUNT_MAX)).astype(np.uint32).reshape(
        grid.height, grid.width
    )
    n_in = int(mask.sum())
    grid.in_view += n_in
    grid.dropped += roots.size - n_in


def merge(a: DensityGrid, b: DensityGrid) -> DensityGrid:
    """Saturating per-pixel sum; commutative and associative by construction."""
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(f"{a.width}x{a.height} vs {b.width}x{b.height}")
    widened = a.counts.astype(np.uint64) + b.counts.astype(np.uint64)
    merged = np.minimum(widened, np.uint64(COUNT_MAX)).astype(np.uint32)
    return DensityGrid(
        width=a.width,
        height=a.height,
        counts=merged,
        in_view=a.in_view + b.in_view,
        dropped=a.dropped + b.dropped,
    )


@dataclass(frozen=True)
class ToneMap:
    """Count-to-intensity transfer. log1p is the default because density
    graphs span decades; linear mode is kept for tests."""

    mode: str = "log1p"
    gamma: float = 1.0
    palette: str = "grayscale"

    def __post_init__(self):
        if self.mode not in ("linear", "log1p"):
            raise ValueError(f"unknown tone mode {self.mode!r}")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.palette not in PALETTES and self.palette != "grayscale":
            raise ValueError(f"unknown palette {self.palette!r}")


@dataclass(frozen=True)
class Image:
    """Rendered raster: pixels are uint8, (H, W) grayscale or (H, W, 3) color."""

    pixels: np.ndarray

    @property
    def grayscale(self) -> bool:
        return self.pixels.ndim == 2


def _gradient(stops):
    # 256-entry palette from evenly spaced RGB stops, linear interpolation
    stops = np.asarray(stops, dtype=np.float64)
    xs = np.linspace(0.0, 1.0, stops.shape[0])
    t = np.linspace(0.0, 1.0, 256)
    table = np.stack([np.interp(t, xs, stops[:, ch]) for ch in range(3)], axis=1)
    return np.rint(table).astype(np.uint8)


PALETTES = {
    "fire": _gradient([(0, 0, 0), (128, 0, 0), (255, 64, 0), (255, 200, 0), (255, 255, 255)]),
    "ice": _gradient([(0, 0, 0), (0, 32, 96), (0, 128, 192), (128, 224, 255), (255, 255, 255)]),
}


def render(grid: DensityGrid, tone: ToneMap = ToneMap()) -> Image:
    """Normalize counts by the grid maximum and map through the tone curve.

    The max-count pixel always renders at full intensity and an all-zero
    grid renders black; output bytes are deterministic for identical
    inputs.
    """
    counts = grid.counts.astype(np.float64)
    peak = counts.max() if counts.size else 0.0
    if peak <= 0:
        level = np.zeros_like(counts)
    elif tone.mode == "linear":
        level = counts / peak
    else:
        level = np.log1p(counts) / np.log1p(peak)
    if tone.gamma != 1.0:
        level = level ** (1.0 / tone.gamma)
    gray = np.rint(level * 255.0).astype(np.uint8)
    if tone.palette == "grayscale":
        return Image(pixels=gray)
    return Image(pixels=PALETTES[tone.palette][gray])


def write_image(img: Image, path) -> None:
    """Binary PGM (P5, maxval 255) for grayscale, binary PPM (P6) for color."""
    h, w = img.pixels.shape[:2]
    magic = b"P5" if img.grayscale else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, w, h)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.pixels.tobytes())


def write_stats(grid: DensityGrid, path) -> None:
    """Side-car text stats: totals and the peak pixel count."""
    lines = [
        f"total_roots={grid.total_streamed}",
        f"in_view={grid.in_view}",
        f"dropped={grid.dropped}",
        f"max_count={grid.max_count}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
