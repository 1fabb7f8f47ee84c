"""Dominant-palette extraction from images via k-means in a chosen color model.

The pipeline mirrors the usual quantization recipe: load pixels, convert them
to the working color model, run seeded Lloyd iterations, and convert the
centroids back to 8-bit sRGB swatches. `PaletteKMeans` exposes the clustering
kernel with the scikit-learn estimator API so it composes with pipelines;
`extract_palette` is the one-call image-to-swatches path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw
from sklearn.base import BaseEstimator, ClusterMixin

from .colors import ColorSpace, Srgb8, convert_array
from .validation import check_pixel_matrix


@dataclass
class PixelMatrix:
    """(N, 3) pixel coordinates in the native units of `space`."""

    data: np.ndarray
    space: ColorSpace

    def __post_init__(self):
        self.data = check_pixel_matrix(self.data)
        self.space = ColorSpace(self.space)

    @property
    def n_pixels(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class KmeansConfig:
    k: int
    seed: int = 0
    max_iters: int = 100
    tol: float = 1e-6
    init: str = "kmeans++"
    n_init: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")
        if self.init not in ("kmeans++", "random"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.n_init < 1:
            raise ValueError("n_init must be positive")


@dataclass
class PaletteResult:
    """Centroids (native working-space units), populations, and swatches."""

    centroids: np.ndarray
    populations: np.ndarray
    objective: float
    iterations: int
    centroids_srgb: list[Srgb8]
    space: ColorSpace
    k_requested: int
    k_reduced: bool
    objective_history: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def swatch_hex(self) -> list[str]:
        return [f"#{c.r:02X}{c.g:02X}{c.b:02X}" for c in self.centroids_srgb]


def load_image(path) -> PixelMatrix:
    """Load a PNG/JPEG as a row-major SRGB8 pixel matrix.

    Alpha is removed by compositing over opaque white.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"image not found: {p}")
    try:
        img = Image.open(p)
        img.load()
    except Exception as exc:
        raise ValueError(f"cannot read image {p}: {exc}") from exc
    if img.width == 0 or img.height == 0:
        raise ValueError(f"zero-pixel image: {p}")
    if "A" in img.getbands() or img.mode == "P":
        rgba = img.convert("RGBA")
        bg = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
        img = Image.alpha_composite(bg, rgba)
    rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
    return PixelMatrix(rgb.reshape(-1, 3), ColorSpace.SRGB8)


def _sq_distances(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # One column per centroid; row-wise sums keep the reduction order fixed
    # so results do not depend on BLAS threading.
    out = np.empty((X.shape[0], centers.shape[0]))
    for j in range(centers.shape[0]):
        diff = X - centers[j]
        out[:, j] = np.einsum("ij,ij->i", diff, diff)
    return out


def _init_centers(X: np.ndarray, k: int, rng: np.random.Generator, init: str) -> np.ndarray:
    if init == "random":
        order = rng.permutation(X.shape[0])
        _, first = np.unique(X[order], axis=0, return_index=True)
        picks = order[np.sort(first)][:k]
        return X[picks].copy()

    # k-means++: D^2 sampling; stops early once every distinct point is a
    # center, which caps the effective k at the number of distinct points.
    centers = [X[rng.integers(X.shape[0])]]
    d2 = np.einsum("ij,ij->i", X - centers[0], X - centers[0])
    while len(centers) < k:
        total = d2.sum()
        if total <= 0.0:
            break
        idx = rng.choice(X.shape[0], p=d2 / total)
        centers.append(X[idx])
        diff = X - centers[-1]
        d2 = np.minimum(d2, np.einsum("ij,ij->i", diff, diff))
    return np.array(centers)


def lloyd_kmeans(
    X: np.ndarray,
    k: int,
    *,
    seed: int = 0,
    max_iters: int = 100,
    tol: float = 1e-6,
    init: str = "kmeans++",
    n_init: int = 10,
):
    """Seeded multi-start Lloyd minimizing within-cluster squared distance.

    Runs `n_init` independently seeded starts and keeps the best final
    objective (a single k-means++ start can land noticeably above the global
    optimum). Returns (centers, labels, objective, n_iter, history,
    k_reduced) for the winning start; its history is recorded after every
    assignment step and asserted non-increasing. A fixed seed yields
    bit-identical results.
    """
    X = check_pixel_matrix(X)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n_init < 1:
        raise ValueError("n_init must be positive")
    best = None
    for child_seed in np.random.SeedSequence(seed).spawn(n_init):
        result = _lloyd_single(X, k, np.random.default_rng(child_seed), max_iters, tol, init)
        if best is None or result[2] < best[2]:
            best = result
    return best


def _lloyd_single(X, k, rng, max_iters, tol, init):
    centers = _init_centers(X, k, rng, init)
    k_reduced = centers.shape[0] < k

    def assign(cs):
        d = _sq_distances(X, cs)
        labels = d.argmin(axis=1)
        obj = float(d[np.arange(X.shape[0]), labels].sum())
        return labels, obj, d

    labels, obj, dists = assign(centers)
    history = [obj]
    n_iter = 0
    while n_iter < max_iters:
        new_centers = centers.copy()
        for j in range(centers.shape[0]):
            mask = labels == j
            if mask.any():
                new_centers[j] = X[mask].mean(axis=0)
        # Relocate empty clusters onto the points currently worst-served.
        empty = [j for j in range(centers.shape[0]) if not (labels == j).any()]
        if empty:
            current = dists[np.arange(X.shape[0]), labels]
            worst = np.argsort(current)[::-1]
            for j, idx in zip(empty, worst):
                new_centers[j] = X[idx]

        new_labels, new_obj, new_dists = assign(new_centers)
        assert new_obj <= obj * (1.0 + 1e-12) + 1e-9, "k-means objective increased"
        centers, labels, dists = new_centers, new_labels, new_dists
        n_iter += 1
        history.append(new_obj)
        improvement = obj - new_obj
        converged = obj == 0.0 or improvement <= tol * obj
        obj = new_obj
        if converged:
            break
    return centers, labels, obj, n_iter, history, k_reduced


class PaletteKMeans(ClusterMixin, BaseEstimator):
    """Deterministic k-means clusterer with the scikit-learn estimator API.

    Unlike ``sklearn.cluster.KMeans`` this runs a single seeded k-means++
    start, records the objective after every iteration, and relocates empty
    clusters onto the farthest points, so results are reproducible
    bit-for-bit from the seed alone.
    """

    def __init__(self, n_clusters=6, seed=0, max_iters=100, tol=1e-6, init="kmeans++",
                 n_init=10):
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_iters = max_iters
        self.tol = tol
        self.init = init
        self.n_init = n_init

    def fit(self, X, y=None):
        KmeansConfig(self.n_clusters, self.seed, self.max_iters, self.tol,
                     self.init, self.n_init)
        X = check_pixel_matrix(X)
        centers, labels, obj, n_iter, history, reduced = lloyd_kmeans(
            X, self.n_clusters, seed=self.seed, max_iters=self.max_iters,
            tol=self.tol, init=self.init, n_init=self.n_init,
        )
        self.cluster_centers_ = centers
        self.labels_ = labels
        self.populations_ = np.bincount(labels, minlength=centers.shape[0])
        self.objective_ = obj
        self.n_iter_ = n_iter
        self.objective_history_ = history
        self.k_reduced_ = reduced
        return self

    def predict(self, X):
        X = check_pixel_matrix(X)
        return _sq_distances(X, self.cluster_centers_).argmin(axis=1)


# Clustering coordinates: HSV/HSL hue is rescaled to [0, 1] so all three
# channels weigh comparably; other models cluster in native units. Hue is
# treated as a plain linear channel, so the 0/360 wrap-around is distorted.
_HUE_SPACES = (ColorSpace.HSV, ColorSpace.HSL)


def _to_cluster_coords(data: np.ndarray, space: ColorSpace) -> np.ndarray:
    if space in _HUE_SPACES:
        out = data.copy()
        out[:, 0] /= 360.0
        return out
    return data


def _from_cluster_coords(data: np.ndarray, space: ColorSpace) -> np.ndarray:
    if space in _HUE_SPACES:
        out = data.copy()
        out[:, 0] *= 360.0
        return out
    return data


def kmeans(points: PixelMatrix, cfg: KmeansConfig) -> PaletteResult:
    """Cluster a pixel matrix and report centroids plus sRGB swatches."""
    work = _to_cluster_coords(points.data, points.space)
    centers, labels, obj, n_iter, history, reduced = lloyd_kmeans(
        work, cfg.k, seed=cfg.seed, max_iters=cfg.max_iters, tol=cfg.tol,
        init=cfg.init, n_init=cfg.n_init,
    )
    populations = np.bincount(labels, minlength=centers.shape[0])
    native = _from_cluster_coords(centers, points.space)
    srgb = convert_array(native, points.space, ColorSpace.SRGB8)
    swatches = [Srgb8(*(int(v) for v in row)) for row in srgb]
    return PaletteResult(
        centroids=native,
        populations=populations,
        objective=obj,
        iterations=n_iter,
        centroids_srgb=swatches,
        space=points.space,
        k_requested=cfg.k,
        k_reduced=reduced,
        objective_history=history,
    )


def extract_palette(path, space: ColorSpace | str, cfg: KmeansConfig) -> PaletteResult:
    """Load an image, cluster it in `space`, and return the dominant palette."""
    space = ColorSpace(space)
    pixels = load_image(path)
    converted = convert_array(pixels.data, ColorSpace.SRGB8, space)
    return kmeans(PixelMatrix(converted, space), cfg)


def format_report(result: PaletteResult, seed: int | None = None) -> str:
    """Structured text record: header line, then one `#hex population` line
    per swatch ordered by population (largest first)."""
    head = (
        f"space={result.space.value} k={result.k} requested={result.k_requested}"
        + (f" seed={seed}" if seed is not None else "")
        + f" iterations={result.iterations} objective={result.objective:.4f}"
    )
    order = np.argsort(-result.populations, kind="stable")
    lines = [head]
    for j in order:
        lines.append(f"{result.swatch_hex()[j]} {int(result.populations[j])}")
    return "\n".join(lines)


def render_swatch_sheet(
    results: dict[str, PaletteResult],
    path,
    swatch_px: int = 56,
    label_px: int = 72,
) -> Path:
    """Write a side-by-side swatch sheet (one row per color model) as PNG."""
    if not results:
        raise ValueError("no palettes to render")
    k = max(r.k for r in results.values())
    width = label_px + k * swatch_px
    height = len(results) * swatch_px
    sheet = Image.new("RGB", (width, height), (245, 245, 245))
    draw = ImageDraw.Draw(sheet)
    for row, (label, res) in enumerate(results.items()):
        y0 = row * swatch_px
        draw.text((6, y0 + swatch_px // 2 - 5), label, fill=(20, 20, 20))
        order = np.argsort(-res.populations, kind="stable")
        for col, j in enumerate(order):
            c = res.centroids_srgb[j]
            x0 = label_px + col * swatch_px
            draw.rectangle(
                [x0, y0, x0 + swatch_px - 1, y0 + swatch_px - 1],
                fill=(c.r, c.g, c.b),
            )
    out = Path(path)
    sheet.save(out, format="PNG")
    return out
