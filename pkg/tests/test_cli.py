import json
import subprocess
import sys

import httpx
import pytest

from chromadiff.cli import main
from conftest import DEFAULT_DATASET, DEMO_IMAGE, REFERENCE_TABLE, free_port


def run_main(*argv, capsys=None):
    code = main(list(argv))
    out, err = capsys.readouterr() if capsys else ("", "")
    return code, out, err


class TestConvert:
    def test_white_to_lab(self, capsys):
        code, out, _ = run_main("convert", "#FFFFFF", "--to", "lab", capsys=capsys)
        assert code == 0
        assert out.strip() == "100.0000 0.0000 0.0000"

    def test_red_to_hsv(self, capsys):
        code, out, _ = run_main("convert", "#FF0000", "--to", "hsv", capsys=capsys)
        assert code == 0
        assert out.strip() == "0.0000 1.0000 1.0000"

    def test_decimal_triple_to_hex(self, capsys):
        code, out, _ = run_main("convert", "1,2,3", "--to", "srgb8", capsys=capsys)
        assert code == 0
        assert out.strip() == "#010203"

    def test_bad_literal_exits_2(self, capsys):
        code, _, err = run_main("convert", "nothex", "--to", "lab", capsys=capsys)
        assert code == 2
        assert "cannot parse" in err

    def test_bad_space_exits_2(self, capsys):
        assert run_main("convert", "#FFFFFF", "--to", "hwb", capsys=capsys)[0] == 2


class TestDist:
    def test_black_white_euclid(self, capsys):
        code, out, _ = run_main(
            "dist", "#000000", "#FFFFFF", "--metric", "euclid_rgb", capsys=capsys)
        assert code == 0
        assert out.strip() == "441.6730"

    def test_identical_ciede2000(self, capsys):
        code, out, _ = run_main(
            "dist", "#123456", "#123456", "--metric", "lab_cie2000", capsys=capsys)
        assert code == 0
        assert out.strip() == "0.0000"

    def test_unknown_metric_lists_registry(self, capsys):
        code, _, err = run_main("dist", "#000000", "#FFFFFF", "--metric", "nope", capsys=capsys)
        assert code == 2
        assert "available:" in err and "lab_cie2000" in err


class TestPalette:
    def test_solid_image_single_swatch(self, tmp_path, capsys):
        from PIL import Image
        import numpy as np
        p = tmp_path / "solid.png"
        Image.fromarray(np.full((3, 3, 3), [10, 200, 30], dtype=np.uint8)).save(p)
        code, out, _ = run_main("palette", str(p), "--k", "1", capsys=capsys)
        assert code == 0
        assert "#0AC81E 9" in out

    def test_seed_repeatable_output(self, capsys):
        args = ("palette", str(DEMO_IMAGE), "--k", "4", "--seed", "42")
        _, out1, _ = run_main(*args, capsys=capsys)
        _, out2, _ = run_main(*args, capsys=capsys)
        assert out1 == out2

    def test_k_zero_usage_error(self, capsys):
        code, _, err = run_main("palette", str(DEMO_IMAGE), "--k", "0", capsys=capsys)
        assert code == 2
        assert "k must be" in err

    def test_missing_image_runtime_error(self, tmp_path, capsys):
        code, _, err = run_main("palette", str(tmp_path / "ghost.png"), capsys=capsys)
        assert code == 1
        assert "ghost.png" in err

    def test_sheet_written(self, tmp_path, capsys):
        sheet = tmp_path / "sheet.png"
        code, out, err = run_main(
            "palette", str(DEMO_IMAGE), "--k", "3", "--seed", "1",
            "--sheet", str(sheet), capsys=capsys)
        assert code == 0
        assert sheet.exists()
        assert out.count("space=") == 6  # six models by default


class TestEval:
    def test_precomputed_reference_ranks_hsl_first(self, capsys):
        code, out, _ = run_main(
            "eval", str(REFERENCE_TABLE), "--precomputed", capsys=capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("1 hsl_cyl r=0.7159")
        assert lines[1].startswith("2 hsv_cyl r=0.5971")

    def test_dataset_report_files(self, tmp_path, capsys):
        rep = tmp_path / "report.csv"
        heat = tmp_path / "heat.svg"
        code, out, _ = run_main(
            "eval", str(DEFAULT_DATASET), "--out", str(rep), "--heatmap", str(heat),
            capsys=capsys)
        assert code == 0
        header, *rows = rep.read_text().strip().splitlines()
        assert header == "metric,pearson_r,mae"
        assert len(rows) == 8
        assert heat.exists()

    def test_single_metric_report(self, capsys):
        code, out, _ = run_main(
            "eval", str(DEFAULT_DATASET), "--metrics", "euclid_rgb", capsys=capsys)
        assert code == 0
        assert len(out.strip().splitlines()) == 1

    def test_dataset_without_scores_exits_2(self, tmp_path, capsys):
        p = tmp_path / "noscores.csv"
        p.write_text("1,#000000,#FFFFFF\n2,#FF0000,#00FF00\n")
        code, _, err = run_main("eval", str(p), capsys=capsys)
        assert code == 2
        assert "human scores" in err

    def test_unknown_metric_exits_2(self, capsys):
        code, _, err = run_main(
            "eval", str(DEFAULT_DATASET), "--metrics", "bogus", capsys=capsys)
        assert code == 2


class TestServeSimulate:
    def test_bad_addr_exits_2(self, tmp_path, capsys):
        code, _, err = run_main(
            "serve", "--addr", "localhost", "--data-dir", str(tmp_path), capsys=capsys)
        assert code == 2
        assert "address" in err

    def test_bad_port_exits_2(self, tmp_path, capsys):
        code, _, err = run_main(
            "serve", "--addr", "127.0.0.1:notaport", "--data-dir", str(tmp_path),
            capsys=capsys)
        assert code == 2

    def test_missing_dataset_dir_exits_2(self, tmp_path, capsys):
        code, _, err = run_main(
            "serve", "--addr", "127.0.0.1:1", "--data-dir", str(tmp_path),
            "--datasets", str(tmp_path / "nope"), capsys=capsys)
        assert code == 2

    def test_simulate_unreachable_service_exits_1(self, capsys):
        code, _, err = run_main(
            "simulate", "pairs_default", "--url", f"http://127.0.0.1:{free_port()}",
            "--respondents", "1", capsys=capsys)
        assert code == 1
        assert "unreachable" in err

    def test_simulate_unknown_metric_exits_2(self, capsys):
        code, _, err = run_main(
            "simulate", "pairs_default", "--oracle-metric", "bogus", capsys=capsys)
        assert code == 2

    def test_simulate_deterministic_log(self, serve_process):
        base = serve_process.base_url
        cmd = [sys.executable, "-m", "chromadiff.cli", "simulate", "pairs_default",
               "--url", base, "--respondents", "2", "--noise", "0.8", "--seed", "11"]
        r1 = subprocess.run(cmd, capture_output=True, text=True)
        assert r1.returncode == 0, r1.stderr
        log1 = httpx.get(base + "/api/export", params={"dataset": "pairs_default"}).text
        r2 = subprocess.run(cmd, capture_output=True, text=True)
        assert r2.returncode == 0
        assert r1.stdout == r2.stdout
        log2 = httpx.get(base + "/api/export", params={"dataset": "pairs_default"}).text
        first = [json.loads(l) for l in log1.strip().splitlines()]
        second = [json.loads(l) for l in log2.strip().splitlines()][len(first):]
        key = lambda recs: [(r["pair_ids"][0], r["response"]) for r in recs]
        assert key(first) == key(second)

    def test_noise_attenuates_correlation(self, serve_process, tmp_path, capsys):
        import numpy as np
        from chromadiff import evaluation as ev

        base = serve_process.base_url
        ds = ev.load_dataset(DEFAULT_DATASET)
        table = ev.compute_distance_table(ds, ["lab_cie2000"])
        correlations = []
        for sigma in (0.0, 1.0, 3.0, 10.0):
            run_main("simulate", "pairs_default", "--url", base,
                     "--respondents", "6", "--noise", str(sigma), "--seed", "100",
                     capsys=capsys)
            agg = httpx.get(base + "/api/aggregate",
                            params={"dataset": "pairs_default"}).json()
            scores = {int(k): v for k, v in agg["modes"]["rating"].items()}
            human = np.array([scores[p.id] for p in ds.pairs])
            correlations.append(ev.pearson(table.columns["lab_cie2000"], human))
            # wipe the log between sigma levels so aggregates do not mix
            state_file = serve_process.data_dir / "judgments.jsonl"
            state_file.unlink()
            serve_process.stop()
            serve_process.start()
        assert correlations[0] == pytest.approx(1.0, abs=1e-9)
        assert all(b < a for a, b in zip(correlations, correlations[1:]))
        # clamping to [0, 10] bounds how far heavy noise can push r toward 0;
        # sigma = 10 lands near 0.76 for this seed set
        assert correlations[-1] < 0.85


class TestTopLevel:
    def test_version(self, capsys):
        code, out, _ = run_main("--version", capsys=capsys)
        assert code == 0

    def test_no_args_exits_2(self, capsys):
        assert run_main(capsys=capsys)[0] == 2
