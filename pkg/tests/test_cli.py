import os

import numpy as np
import pytest

from spreadwidth.cli import main
from spreadwidth.config import ConfigError, RunConfig, config_lines, load_config


def run(args):
    return main([str(a) for a in args])


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_config_defaults_and_validation():
    cfg = RunConfig().validate()
    assert cfg.lam == 0.1 and cfg.max_shell == 30
    assert cfg.p_sizes == (1, 10, 15, 20)
    with pytest.raises(ConfigError):
        RunConfig(epsilon=0.0).validate()
    with pytest.raises(ConfigError):
        RunConfig(p_sizes=(-1,)).validate()
    with pytest.raises(ConfigError):
        RunConfig(integrals=("spin",)).validate()


def test_config_file_roundtrip(tmp_path):
    cfg = RunConfig(lam=0.07, max_shell=12, p_sizes=(2, 5), bins=8, output_dir=str(tmp_path / "o"))
    path = tmp_path / "run.cfg"
    path.write_text("\n".join(config_lines(cfg)) + "\n")
    loaded = load_config(str(path))
    assert loaded == cfg


def test_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("lambda=0.1\ncolor=blue\n")
    with pytest.raises(ConfigError):
        load_config(str(path))
    path.write_text("lambda=abc\n")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_bad_config_exits_1(tmp_path):
    assert run(["solve", "--epsilon", "-1", "--output_dir", tmp_path / "x"]) == 1
    assert run(["solve", "--max_shell", "nope", "--output_dir", tmp_path / "x"]) == 1


def test_solve_writes_labeled_spectrum(tmp_path):
    out = tmp_path / "solve"
    assert run(["solve", "--max_shell", 8, "--output_dir", out, "--coefficients"]) == 0
    lines = read(out / "spectrum.csv").decode().splitlines()
    assert lines[0] == "index,energy,symmetry_block,parity"
    assert len(lines) == 1 + 45
    energies = [float(line.split(",")[1]) for line in lines[1:]]
    assert energies == sorted(energies)
    assert (out / "coefficients.txt").exists()
    assert (out / "resolved.cfg").exists()


def test_unperturbed_solve_has_integer_energies(tmp_path):
    out = tmp_path / "flat"
    assert run(["solve", "--lambda", 0, "--max_shell", 6, "--output_dir", out]) == 0
    lines = read(out / "spectrum.csv").decode().splitlines()[1:]
    energies = np.array([float(line.split(",")[1]) for line in lines])
    assert np.max(np.abs(energies - np.round(energies))) <= 1e-10


def test_metrics_csv_header_and_zero_run(tmp_path):
    out = tmp_path / "metrics"
    assert run(["metrics", "--lambda", 0, "--max_shell", 8, "--output_dir", out]) == 0
    lines = read(out / "metrics.csv").decode().splitlines()
    assert lines[0] == "epsilon,shell,kappa,delta_N_ratio,pr,ps,gamma_spr"
    for line in lines[1:]:
        cells = line.split(",")
        if cells[2]:
            assert float(cells[2]) == 0.0


def test_integrals_writes_study_and_identities(tmp_path):
    out = tmp_path / "ints"
    code = run([
        "integrals", "--max_shell", 12, "--p_sizes", "4,8", "--epsilon", "0.01",
        "--output_dir", out,
    ])
    assert code == 0
    lines = read(out / "integrals.csv").decode().splitlines()
    assert lines[0] == "kp_shells,integral,symmetry_block,energy_bin,delta_jprime_avg,in_s_space"
    identities = read(out / "identities.txt").decode()
    assert ",false" not in identities


def test_projector_check_passes_and_corrupt_hook_fails(tmp_path):
    assert run(["projector-check", "--check-shell", 4, "--output_dir", tmp_path / "ok"]) == 0
    assert run(["projector-check", "--check-shell", 4, "--corrupt", "--output_dir", tmp_path / "bad"]) == 2
    report = read(tmp_path / "bad" / "projector_report.txt").decode()
    assert ",false" in report


def test_spacing_refuses_mixed_blocks(tmp_path):
    code = run(["spacing", "--max_shell", 8, "--blocks", "mixed", "--output_dir", tmp_path / "s"])
    assert code == 1


def test_spacing_writes_per_block_tables(tmp_path):
    out = tmp_path / "spacing"
    code = run([
        "spacing", "--max_shell", 20, "--output_dir", out,
        "--chaotic-window", "0.08,0.2", "--min-spacings", 10,
    ])
    assert code == 0
    lines = read(out / "spacing_chaotic.csv").decode().splitlines()
    assert lines[0] == "block,n_levels,mean_spacing,d_poisson,d_wigner"
    assert [line.split(",")[0] for line in lines[1:]] == ["A", "B", "C", "D", "ALL"]
    hist = read(out / "hist_regular.csv").decode().splitlines()
    assert hist[0] == "block,bin_left,count"


def test_resolved_config_reproduces_run(tmp_path):
    out1 = tmp_path / "a"
    assert run(["metrics", "--lambda", 0.09, "--max_shell", 10, "--output_dir", out1]) == 0
    out2 = tmp_path / "b"
    assert run(["metrics", "--config", out1 / "resolved.cfg", "--output_dir", out2]) == 0
    assert read(out1 / "metrics.csv") == read(out2 / "metrics.csv")


def test_identical_runs_are_byte_identical(tmp_path):
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        code = run([
            "reproduce", "--max_shell", 12, "--p_sizes", "4,8", "--epsilon", "0.01",
            "--chaotic-window", "0.08,0.2", "--min-spacings", 10,
            "--check-shell", 4, "--output_dir", out,
        ])
        assert code == 0
        outs.append(out)
    names = sorted(os.listdir(outs[0]))
    assert names == sorted(os.listdir(outs[1]))
    for name in names:
        a = read(outs[0] / name)
        b = read(outs[1] / name).replace(str(outs[1]).encode(), str(outs[0]).encode())
        assert a == b, name
