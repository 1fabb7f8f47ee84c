import numpy as np
import pytest
from PIL import Image
from sklearn.base import clone

from chromadiff.colors import ColorSpace
from chromadiff.palette import (
    KmeansConfig,
    PaletteKMeans,
    PixelMatrix,
    extract_palette,
    format_report,
    kmeans,
    lloyd_kmeans,
    load_image,
    render_swatch_sheet,
)
from conftest import DEMO_IMAGE


def write_png(path, array):
    Image.fromarray(np.asarray(array, dtype=np.uint8)).save(path)
    return path


def brute_force_objective(X, k, restarts=1000, iters=60, seed=1234):
    """Plain multi-restart Lloyd, independent of the package implementation."""
    rng = np.random.default_rng(seed)
    best = np.inf
    n = X.shape[0]
    for _ in range(restarts):
        centers = X[rng.choice(n, size=k, replace=False)].copy()
        for _ in range(iters):
            d = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            labels = d.argmin(axis=1)
            moved = False
            for j in range(k):
                pts = X[labels == j]
                if len(pts):
                    c = pts.mean(axis=0)
                    if not np.array_equal(c, centers[j]):
                        centers[j] = c
                        moved = True
            if not moved:
                break
        d = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        best = min(best, float(d.min(axis=1).sum()))
    return best


class TestLoadImage:
    def test_solid_color(self, tmp_path):
        p = write_png(tmp_path / "red.png", np.tile([255, 0, 0], (2, 2, 1)))
        pm = load_image(p)
        assert pm.space == ColorSpace.SRGB8
        assert pm.n_pixels == 4
        assert np.array_equal(pm.data, np.tile([255.0, 0.0, 0.0], (4, 1)))

    def test_single_pixel(self, tmp_path):
        p = write_png(tmp_path / "one.png", np.array([[[7, 8, 9]]]))
        assert load_image(p).n_pixels == 1

    def test_alpha_composites_over_white(self, tmp_path):
        rgba = np.zeros((1, 2, 4), dtype=np.uint8)
        rgba[0, 0] = [255, 0, 0, 0]      # fully transparent -> white
        rgba[0, 1] = [0, 255, 0, 255]    # opaque
        p = tmp_path / "a.png"
        Image.fromarray(rgba, "RGBA").save(p)
        pm = load_image(p)
        assert np.array_equal(pm.data[0], [255.0, 255.0, 255.0])
        assert np.array_equal(pm.data[1], [0.0, 255.0, 0.0])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="nope.png"):
            load_image(tmp_path / "nope.png")

    def test_not_an_image(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_text("not a png")
        with pytest.raises(ValueError, match="bad.png"):
            load_image(bad)

    def test_jpeg_supported(self, tmp_path):
        p = tmp_path / "img.jpg"
        Image.fromarray(np.full((4, 4, 3), 128, dtype=np.uint8)).save(p, "JPEG")
        assert load_image(p).n_pixels == 16


class TestLloydKmeans:
    def test_uniform_points_k1(self):
        X = np.tile([10.0, 20.0, 30.0], (50, 1))
        centers, labels, obj, n_iter, history, reduced = lloyd_kmeans(X, 1, seed=0)
        assert np.allclose(centers[0], [10, 20, 30])
        assert obj == 0.0

    def test_two_points_two_clusters(self):
        X = np.array([[0.0, 0.0, 0.0], [9.0, 9.0, 9.0]])
        centers, labels, obj, *_ = lloyd_kmeans(X, 2, seed=3)
        assert obj == 0.0
        assert len(np.unique(labels)) == 2

    def test_k1_centroid_is_mean(self):
        rng = np.random.default_rng(8)
        X = rng.normal(50, 20, size=(500, 3))
        centers, *_ = lloyd_kmeans(X, 1, seed=0)
        mean = X.mean(axis=0)
        assert np.abs(centers[0] - mean).max() / np.abs(mean).max() < 1e-9

    def test_objective_monotone_history(self):
        rng = np.random.default_rng(21)
        for seed in range(10):
            X = rng.uniform(0, 255, size=(200, 3))
            _, _, _, _, history, _ = lloyd_kmeans(X, 4, seed=seed)
            assert len(history) >= 2
            assert all(b <= a * (1 + 1e-12) + 1e-9 for a, b in zip(history, history[1:]))

    def test_seed_reproducibility(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(0, 255, size=(300, 3))
        results = [lloyd_kmeans(X, 5, seed=77) for _ in range(4)]
        for other in results[1:]:
            assert np.array_equal(results[0][0], other[0])
            assert np.array_equal(results[0][1], other[1])
            assert results[0][2] == other[2]

    def test_final_labels_are_nearest(self):
        rng = np.random.default_rng(13)
        X = rng.uniform(0, 255, size=(400, 3))
        centers, labels, *_ = lloyd_kmeans(X, 6, seed=5)
        d = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assert np.array_equal(labels, d.argmin(axis=1))

    def test_k_exceeding_distinct_points_reduces(self):
        X = np.array([[0.0, 0, 0], [1.0, 1, 1], [0.0, 0, 0], [1.0, 1, 1]])
        centers, labels, obj, _, _, reduced = lloyd_kmeans(X, 4, seed=0)
        assert reduced
        assert centers.shape[0] == 2
        assert obj == 0.0

    def test_random_init_also_reduces(self):
        X = np.array([[0.0, 0, 0], [1.0, 1, 1]])
        centers, _, _, _, _, reduced = lloyd_kmeans(X, 3, seed=0, init="random")
        assert reduced and centers.shape[0] == 2

    def test_k_below_one_rejected(self):
        with pytest.raises(ValueError, match="k must be"):
            lloyd_kmeans(np.zeros((3, 3)), 0)

    def test_matches_multi_restart_oracle(self):
        rng = np.random.default_rng(555)
        X = rng.uniform(0, 255, size=(100, 3))
        best = brute_force_objective(X, 3, restarts=1000)
        _, _, obj, *_ = lloyd_kmeans(X, 3, seed=0)
        assert obj <= best * 1.05


class TestPaletteKMeansEstimator:
    def test_sklearn_params_round_trip(self):
        est = PaletteKMeans(n_clusters=4, seed=9)
        assert est.get_params()["n_clusters"] == 4
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_fit_attributes(self):
        rng = np.random.default_rng(3)
        X = rng.uniform(0, 1, size=(120, 3))
        est = PaletteKMeans(n_clusters=3, seed=1).fit(X)
        assert est.cluster_centers_.shape == (3, 3)
        assert est.labels_.shape == (120,)
        assert est.populations_.sum() == 120
        assert est.objective_ >= 0
        assert len(est.objective_history_) >= 2

    def test_predict_assigns_nearest(self):
        X = np.array([[0.0, 0, 0], [10.0, 10, 10], [0.1, 0, 0], [9.9, 10, 10]])
        est = PaletteKMeans(n_clusters=2, seed=0).fit(X)
        pred = est.predict(np.array([[0.2, 0, 0], [9.0, 9.5, 10.0]]))
        assert pred[0] != pred[1]

    def test_fit_predict(self):
        X = np.random.default_rng(0).uniform(0, 1, (50, 3))
        labels = PaletteKMeans(n_clusters=2, seed=0).fit_predict(X)
        assert set(labels) == {0, 1}

    def test_invalid_input_rejected(self):
        with pytest.raises(ValueError):
            PaletteKMeans(n_clusters=2).fit(np.zeros((4, 2)))


class TestKmeansPipeline:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            KmeansConfig(k=0)
        with pytest.raises(ValueError):
            KmeansConfig(k=2, tol=-1)
        with pytest.raises(ValueError):
            KmeansConfig(k=2, init="fancy")

    def test_populations_sum_to_pixel_count(self):
        rng = np.random.default_rng(10)
        pm = PixelMatrix(rng.uniform(0, 255, (300, 3)), ColorSpace.SRGB8)
        res = kmeans(pm, KmeansConfig(k=5, seed=2))
        assert res.populations.sum() == 300
        assert res.k == 5
        assert len(res.centroids_srgb) == 5

    def test_black_white_image_any_space(self, tmp_path):
        arr = np.zeros((2, 4, 3), dtype=np.uint8)
        arr[:, 2:] = 255
        p = write_png(tmp_path / "bw.png", arr)
        for space in ("srgb8", "hsv", "hsl", "xyz", "lab", "luv"):
            res = extract_palette(p, space, KmeansConfig(k=2, seed=0))
            assert sorted(res.swatch_hex()) == ["#000000", "#FFFFFF"], space
            assert sorted(res.populations) == [4, 4]

    def test_uniform_gray_k1_lab_round_trip(self, tmp_path):
        p = write_png(tmp_path / "gray.png", np.full((3, 3, 3), 119, dtype=np.uint8))
        res = extract_palette(p, "lab", KmeansConfig(k=1, seed=0))
        sw = res.centroids_srgb[0]
        assert max(abs(sw.r - 119), abs(sw.g - 119), abs(sw.b - 119)) <= 1

    def test_hue_rescaled_for_clustering_but_reported_native(self, tmp_path):
        arr = np.zeros((1, 2, 3), dtype=np.uint8)
        arr[0, 0] = [255, 0, 0]   # h = 0
        arr[0, 1] = [0, 0, 255]   # h = 240
        p = write_png(tmp_path / "hues.png", arr)
        res = extract_palette(p, "hsv", KmeansConfig(k=2, seed=0))
        hues = sorted(c[0] for c in res.centroids)
        assert hues == pytest.approx([0.0, 240.0])

    def test_demo_image_six_spaces(self):
        for space in ("srgb8", "hsv", "hsl", "xyz", "lab", "luv"):
            res = extract_palette(DEMO_IMAGE, space, KmeansConfig(k=6, seed=42))
            assert res.k == 6
            assert res.populations.sum() == 160 * 104
            assert len(set(res.swatch_hex())) >= 4  # distinct dominant colors

    def test_seed_gives_bit_identical_results(self):
        results = [
            extract_palette(DEMO_IMAGE, "lab", KmeansConfig(k=6, seed=42))
            for _ in range(2)
        ]
        assert np.array_equal(results[0].centroids, results[1].centroids)
        assert np.array_equal(results[0].populations, results[1].populations)
        assert results[0].objective == results[1].objective


class TestReportAndSheet:
    def test_format_report_shape(self):
        pm = PixelMatrix(np.tile([4.0, 5.0, 6.0], (10, 1)), ColorSpace.SRGB8)
        res = kmeans(pm, KmeansConfig(k=1, seed=3))
        text = format_report(res, seed=3)
        head, *rows = text.splitlines()
        assert head.startswith("space=srgb8 k=1 requested=1 seed=3")
        assert rows == ["#040506 10"]

    def test_sheet_renders_palette_colors(self, tmp_path):
        arr = np.zeros((2, 4, 3), dtype=np.uint8)
        arr[:, 2:] = 255
        p = write_png(tmp_path / "bw.png", arr)
        results = {
            space: extract_palette(p, space, KmeansConfig(k=2, seed=0))
            for space in ("srgb8", "lab")
        }
        out = render_swatch_sheet(results, tmp_path / "sheet.png", swatch_px=10, label_px=40)
        img = Image.open(out)
        assert img.size == (40 + 2 * 10, 2 * 10)
        # first swatch of each row is the dominant color (population tie -> stable order)
        px = img.load()
        seen = {px[45, 5], px[55, 5]}
        assert seen == {(0, 0, 0), (255, 255, 255)}

    def test_sheet_requires_results(self, tmp_path):
        with pytest.raises(ValueError):
            render_swatch_sheet({}, tmp_path / "x.png")
