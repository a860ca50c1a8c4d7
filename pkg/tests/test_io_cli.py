import struct

import numpy as np
import pytest

from tlbcs import io
from tlbcs.cli import build_config, main
from tlbcs.errors import ConfigError, InvalidInputError
from tlbcs.metrics import hfen, psnr
from tlbcs.phantom import shepp_logan


def test_cimg_layout(tmp_path):
    img = np.array([[1 + 2j, 3], [4j, -5.5]])
    p = tmp_path / "a.cimg"
    io.write_cimg(p, img)
    raw = p.read_bytes()
    assert raw[:4] == b"CIMG" and struct.unpack("<III", raw[4:16]) == (1, 2, 2)
    assert struct.unpack("<8d", raw[16:]) == (1, 2, 3, 0, 0, 4, -5.5, 0)
    np.testing.assert_array_equal(io.read_cimg(p), img)


def test_mask_layout(tmp_path):
    m = np.zeros((3, 5), bool)
    m[0, 0] = m[1, 3] = m[2, 4] = True
    p = tmp_path / "m.msk"
    io.write_mask(p, m)
    raw = p.read_bytes()
    assert raw[:4] == b"MSK1" and struct.unpack("<II", raw[4:12]) == (3, 5)
    assert len(raw) == 12 + 2
    assert raw[12] & 1  # bit 0 of byte 0 is (0, 0)
    assert raw[13] == 0b01000001  # flat 8 -> bit 0, flat 14 -> bit 6
    np.testing.assert_array_equal(io.read_mask(p), m)


def test_transforms_and_labels(tmp_path):
    W = np.random.default_rng(0).standard_normal((3, 4, 4)) + 0j
    io.write_transforms(tmp_path / "w.utfs", W)
    raw = (tmp_path / "w.utfs").read_bytes()
    assert raw[:4] == b"UTFS" and struct.unpack("<II", raw[4:12]) == (3, 4)
    np.testing.assert_array_equal(io.read_transforms(tmp_path / "w.utfs"), W)
    lab = np.array([0, 5, 2, 65535])
    io.write_labels(tmp_path / "l.bin", lab)
    assert (tmp_path / "l.bin").read_bytes()[:4] == struct.pack("<I", 4)
    np.testing.assert_array_equal(io.read_labels(tmp_path / "l.bin"), lab)


def test_corrupt_files(tmp_path):
    (tmp_path / "x").write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(InvalidInputError):
        io.read_cimg(tmp_path / "x")
    io.write_cimg(tmp_path / "t.cimg", np.ones((2, 2)))
    (tmp_path / "t.cimg").write_bytes((tmp_path / "t.cimg").read_bytes()[:-3])
    with pytest.raises(InvalidInputError):
        io.read_cimg(tmp_path / "t.cimg")


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "cfg.txt"
    p.write_text("# solver\nK = 3\neta=0.05  # threshold\nnu = auto\ninit_clustering=kmeans\n")
    cfg = build_config(io.read_config(p), {"eta": "0.02", "K": None})
    assert cfg.K == 3 and cfg.eta == 0.02 and cfg.nu is None and cfg.init_clustering == "kmeans"
    with pytest.raises(ConfigError) as exc:
        build_config({"eta": "-1", "K": "x"}, {})
    assert set(exc.value.keys) == {"K"}
    with pytest.raises(ConfigError) as exc:
        build_config({"eta": "-1", "C": "0"}, {})
    assert set(exc.value.keys) == {"eta", "C"}
    with pytest.raises(ConfigError):
        build_config({"lambda": "1"}, {})


@pytest.fixture
def workdir(tmp_path):
    ref = shepp_logan(32)
    io.write_cimg(tmp_path / "ref.cimg", ref)
    (tmp_path / "small.cfg").write_text("K=2\npatch_side=4\niterations=4\neta=0.07\n"
                                        "eta_warmup_iters=0\nseed=5\n")
    return tmp_path


def test_mask_command(tmp_path, capsys):
    out = tmp_path / "m.msk"
    assert main(["mask", "--type", "cartesian", "--height", "256", "--width", "256",
                 "--uf", "2.5", "--out", str(out)]) == 0
    m = io.read_mask(out)
    assert m.any(axis=1).sum() in (102, 103)
    first = out.read_bytes()
    main(["mask", "--type", "cartesian", "--height", "256", "--width", "256",
          "--uf", "2.5", "--out", str(out)])
    assert out.read_bytes() == first


def test_mask_command_bad_factor(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["mask", "--type", "random2d", "--height", "8", "--width", "8", "--uf", "x",
              "--out", str(tmp_path / "m")])
    assert exc.value.code == 2
    assert main(["mask", "--type", "cartesian", "--height", "8", "--width", "8",
                 "--uf", "0.5", "--out", str(tmp_path / "m")]) == 2
    assert "undersampling" in capsys.readouterr().err


def test_simulate_errors(workdir, capsys):
    assert main(["simulate", "--image", str(workdir / "missing.cimg"), "--mask", "x",
                 "--out-prefix", str(workdir / "p")]) == 2
    assert "missing.cimg" in capsys.readouterr().err
    main(["mask", "--type", "cartesian", "--height", "16", "--width", "32", "--uf", "2",
          "--out", str(workdir / "m.msk")])
    assert main(["simulate", "--image", str(workdir / "ref.cimg"), "--mask",
                 str(workdir / "m.msk"), "--out-prefix", str(workdir / "p")]) == 2


def test_simulate_noise_reproducible(workdir):
    main(["mask", "--type", "random2d", "--height", "32", "--width", "32", "--uf", "3",
          "--out", str(workdir / "m.msk")])
    outs = []
    for name in ("a", "b"):
        assert main(["simulate", "--image", str(workdir / "ref.cimg"), "--mask",
                     str(workdir / "m.msk"), "--noise-sigma", "0.01", "--seed", "3",
                     "--out-prefix", str(workdir / name)]) == 0
        outs.append((workdir / f"{name}.s0.cimg").read_bytes())
    assert outs[0] == outs[1]
    S0 = io.read_cimg(workdir / "a.s0.cimg")
    assert not S0[~io.read_mask(workdir / "a.mask.msk")].any()


def test_full_mask_pipeline_reports_inf(workdir, capsys):
    io.write_mask(workdir / "full.msk", np.ones((32, 32), bool))
    main(["simulate", "--image", str(workdir / "ref.cimg"), "--mask", str(workdir / "full.msk"),
          "--out-prefix", str(workdir / "meas")])
    capsys.readouterr()
    assert main(["reconstruct", "--meas-prefix", str(workdir / "meas"), "--out-prefix",
                 str(workdir / "out"), "--K", "1", "--patch-side", "4", "--iterations", "1",
                 "--eta", "1e-12", "--reference", str(workdir / "ref.cimg")]) == 0
    # exact to roundoff: PSNR is far above any meaningful value
    line = capsys.readouterr().out.strip()
    psnr_val = float(line.split()[0].split("=")[1])
    assert psnr_val > 250 or line.startswith("psnr_db=inf")


def test_reconstruct_outputs(workdir, capsys):
    main(["mask", "--type", "cartesian", "--height", "32", "--width", "32", "--uf", "2.5",
          "--out", str(workdir / "m.msk")])
    main(["simulate", "--image", str(workdir / "ref.cimg"), "--mask", str(workdir / "m.msk"),
          "--out-prefix", str(workdir / "meas")])
    capsys.readouterr()
    assert main(["reconstruct", "--meas-prefix", str(workdir / "meas"), "--config",
                 str(workdir / "small.cfg"), "--out-prefix", str(workdir / "q")]) == 0
    assert capsys.readouterr().out == ""
    lines = (workdir / "q.stats.csv").read_text().splitlines()
    assert len(lines) == 1 + 4
    assert lines[0].endswith("cluster_size_0,cluster_size_1")
    assert all(",,," in row for row in lines[1:])  # empty psnr/hfen columns
    assert io.read_transforms(workdir / "q.transforms.utfs").shape == (2, 16, 16)
    assert io.read_labels(workdir / "q.labels.bin").shape == (1024,)
    assert main(["clustermap", "--labels", str(workdir / "q.labels.bin"), "--height", "32",
                 "--width", "32", "--patch-side", "4", "--out", str(workdir / "c.cimg")]) == 0
    assert set(np.unique(io.read_cimg(workdir / "c.cimg").real)) <= {0.0, 1.0}


def test_reconstruct_single_transform_cluster_column(workdir):
    main(["mask", "--type", "cartesian", "--height", "32", "--width", "32", "--uf", "2.5",
          "--out", str(workdir / "m.msk")])
    main(["simulate", "--image", str(workdir / "ref.cimg"), "--mask", str(workdir / "m.msk"),
          "--out-prefix", str(workdir / "meas")])
    assert main(["reconstruct", "--meas-prefix", str(workdir / "meas"), "--config",
                 str(workdir / "small.cfg"), "--K", "1", "--out-prefix", str(workdir / "q")]) == 0
    rows = (workdir / "q.stats.csv").read_text().splitlines()
    assert rows[0].endswith(",cluster_size_0")
    assert all(r.endswith(",1024") for r in rows[1:])


def test_reconstruct_config_errors(workdir, capsys):
    assert main(["reconstruct", "--meas-prefix", str(workdir / "nothing"), "--out-prefix",
                 str(workdir / "q"), "--eta", "0", "--C", "-2"]) == 2
    err = capsys.readouterr().err
    assert "eta" in err and "C" in err


def test_metrics_command(workdir, capsys):
    ref = workdir / "ref.cimg"
    assert main(["metrics", "--recon", str(ref), "--reference", str(ref)]) == 0
    assert capsys.readouterr().out.strip() == "psnr_db=inf hfen=0.000000"
    noisy = io.read_cimg(ref) + 0.01 * np.random.default_rng(0).standard_normal((32, 32))
    io.write_cimg(workdir / "n.cimg", noisy)
    main(["metrics", "--recon", str(workdir / "n.cimg"), "--reference", str(ref)])
    out = capsys.readouterr().out.strip()
    refimg = io.read_cimg(ref)
    assert out == f"psnr_db={psnr(noisy, refimg):.6f} hfen={hfen(noisy, refimg):.6f}"
    io.write_cimg(workdir / "s.cimg", np.ones((4, 4)))
    assert main(["metrics", "--recon", str(workdir / "s.cimg"), "--reference", str(ref)]) == 2
