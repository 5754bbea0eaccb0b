"""
End-to-end tests of the command-line interface.
"""

import io
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.metrics.exporters.csv_reporter import read_table
from src.nufft import make_plan
from src.pipeline.cli import main
from src.pipeline.formats import read_image, read_kspace, read_trajectory, read_weights, write_model
from src.pipeline.phantoms import shepp_logan
from src.recon import create_model, dc_adjoint_recon, unrolled_forward
from src.trajectories.generators import radial

REPO_ROOT = Path(__file__).resolve().parents[2]
CONFIG = str(REPO_ROOT / "config" / "recon.yaml")


def run(*args) -> int:
    return main(["--config", CONFIG, "--log-level", "WARNING", *map(str, args)])


@pytest.fixture
def workdir(tmp_path):
    """Trajectory, phantom, weights and k-space of a 32x32 radial acquisition."""
    assert run("traj", "gen", "--kind", "radial", "--spokes", 16, "--samples", 64, "--out", tmp_path / "traj.csv") == 0
    assert run("phantom", "--grid", "32x32", "--out", tmp_path / "x.ncim") == 0
    assert run("dcomp", "--traj", tmp_path / "traj.csv", "--grid", "32x32", "--out", tmp_path / "d.ncwt") == 0
    assert run(
        "simulate", "--image", tmp_path / "x.ncim", "--traj", tmp_path / "traj.csv", "--out", tmp_path / "y.ncwt"
    ) == 0
    return tmp_path


class TestExitCodes:

    def test_usage_error(self):
        assert main(["recon"]) == 2

    def test_unknown_command(self):
        assert main(["resample"]) == 2

    def test_missing_input(self, tmp_path, capsys):
        code = run("dcomp", "--traj", tmp_path / "absent.csv", "--grid", "8x8", "--out", tmp_path / "d.ncwt")

        assert code == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_malformed_input(self, tmp_path):
        (tmp_path / "x.ncim").write_bytes(b"NCIM\x01")
        code = run("eval", "--ref", tmp_path / "x.ncim", "--test", tmp_path / "x.ncim", "--out", tmp_path / "m.csv")

        assert code == 1

    def test_negative_phantom_index(self, tmp_path, capsys):
        code = run("phantom", "--grid", "16x16", "--index", -1, "--out", tmp_path / "v.ncim")

        assert code == 1
        assert "index" in capsys.readouterr().err
        assert not (tmp_path / "v.ncim").exists()

    def test_adjoint_needs_weights(self, workdir):
        code = run(
            "recon", "--method", "adjoint-dc", "--traj", workdir / "traj.csv", "--grid", "32x32",
            "--kspace", workdir / "y.ncwt", "--out", workdir / "r.ncim",
        )

        assert code == 1


class TestPipeline:

    def test_files_match_library(self, workdir):
        traj = read_trajectory(workdir / "traj.csv")

        np.testing.assert_array_equal(traj.points, radial(16, 64).points)
        np.testing.assert_array_equal(read_image(workdir / "x.ncim").data, shepp_logan(32, 32).data)
        assert len(read_weights(workdir / "d.ncwt")) == len(traj)
        assert len(read_kspace(workdir / "y.ncwt")) == len(traj)

    def test_adjoint_recon_matches_library(self, workdir):
        code = run(
            "recon", "--method", "adjoint-dc", "--traj", workdir / "traj.csv", "--grid", "32x32",
            "--kspace", workdir / "y.ncwt", "--dc", workdir / "d.ncwt", "--out", workdir / "r.ncim",
            "--png", workdir / "r.png", "--ref", workdir / "x.ncim", "--error-png", workdir / "e.png",
        )
        plan = make_plan(read_trajectory(workdir / "traj.csv"), 32, 32, norm="ortho")
        expected = dc_adjoint_recon(plan, read_weights(workdir / "d.ncwt"), read_kspace(workdir / "y.ncwt"))

        assert code == 0
        np.testing.assert_array_equal(read_image(workdir / "r.ncim").data, expected.data)
        assert (workdir / "r.png").exists() and (workdir / "e.png").exists()

    def test_unrolled_recon_matches_library(self, workdir):
        model = create_model("small_cnn", n_iter=2, buffer_size=2, filters=3, seed=4)
        write_model(model, workdir / "model.ncwt")
        code = run(
            "recon", "--method", "unrolled", "--traj", workdir / "traj.csv", "--grid", "32x32",
            "--kspace", workdir / "y.ncwt", "--dc", workdir / "d.ncwt", "--model", workdir / "model.ncwt",
            "--out", workdir / "r.ncim",
        )
        plan = make_plan(read_trajectory(workdir / "traj.csv"), 32, 32, norm="ortho")
        expected = unrolled_forward(model, plan, read_weights(workdir / "d.ncwt"), read_kspace(workdir / "y.ncwt"))

        assert code == 0
        np.testing.assert_array_equal(read_image(workdir / "r.ncim").data, expected.data)

    def test_eval_identical(self, workdir):
        code = run(
            "eval", "--ref", workdir / "x.ncim", "--test", workdir / "x.ncim", "--method", "ref",
            "--out", workdir / "m.csv",
        )
        table = read_table(workdir / "m.csv")

        assert code == 0
        assert list(table.columns) == ["case", "method", "psnr", "ssim", "ms_ssim"]
        assert table.loc[0, "psnr"] == np.inf
        assert table.loc[0, "ssim"] == 1.0
        # 32x32 is below the MS-SSIM minimum
        assert np.isnan(table.loc[0, "ms_ssim"])

    def test_eval_count_mismatch(self, workdir):
        code = run(
            "eval", "--ref", workdir / "x.ncim", "--ref", workdir / "x.ncim", "--test", workdir / "x.ncim",
            "--out", workdir / "m.csv",
        )

        assert code == 1

    def test_chain_is_deterministic(self, workdir, tmp_path_factory):
        def chain(directory: Path) -> str:
            run("recon", "--method", "adjoint-dc", "--traj", workdir / "traj.csv", "--grid", "32x32",
                "--kspace", workdir / "y.ncwt", "--dc", workdir / "d.ncwt", "--out", directory / "r.ncim")
            run("eval", "--ref", workdir / "x.ncim", "--test", directory / "r.ncim", "--jobs", 2,
                "--out", directory / "m.csv")
            return (directory / "m.csv").read_text()

        first = chain(tmp_path_factory.mktemp("first"))
        second = chain(tmp_path_factory.mktemp("second"))

        assert first == second
        assert pd.read_csv(io.StringIO(first)).shape == (1, 5)

    def test_phantom_variant_and_png(self, tmp_path):
        code = run("phantom", "--grid", "32x32", "--index", 2, "--seed", 7,
                   "--out", tmp_path / "v.ncim", "--png", tmp_path / "v.png")

        assert code == 0
        assert read_image(tmp_path / "v.ncim").shape == (32, 32)
        assert (tmp_path / "v.png").exists()


@pytest.mark.slow
class TestLongCommands:

    def test_train_writes_model_and_history(self, tmp_path):
        cfg = tmp_path / "train.cfg"
        cfg.write_text("kind = gradient_step\nK = 2\nB = 1\nmax_steps = 4\ngrid = 16x16\nspokes = 8\nsamples = 32\nn_train = 2\nn_val = 1\n")
        code = run("train", "--config", cfg, "--out", tmp_path / "m.ncwt", "--history", tmp_path / "h.csv")
        history = read_table(tmp_path / "h.csv")

        assert code == 0
        assert list(history.columns) == ["epoch", "step", "loss"]
        assert list(history["step"]) == [1, 2, 3, 4]

    def test_selftest(self, capsys):
        code = run("selftest")
        out = capsys.readouterr().out

        assert code == 0
        assert out.count("PASS") == 5
