import numpy as np
import pytest

from graphopt import PointSet, load_graph, save_points
from graphopt.cli import cli


def run_cli(capsys, *argv):
    code = cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_grid_writes_a_loadable_instance(tmp_path, capsys):
    out = tmp_path / "grid.txt"
    code, _, _ = run_cli(
        capsys, "gen-grid", "--D", "4", "--target-degree", "10", "--seed", "7", "--out", str(out)
    )
    assert code == 0
    g, table = load_graph(out)
    assert g.n == 81
    assert table is not None
    assert min(g.degree(i) for i in range(g.n)) >= 3


def test_gen_grid_is_seed_deterministic(tmp_path, capsys):
    a, b, c = tmp_path / "a.txt", tmp_path / "b.txt", tmp_path / "c.txt"
    for path, seed in ((a, 7), (b, 7), (c, 8)):
        assert run_cli(
            capsys, "gen-grid", "--D", "3", "--target-degree", "9",
            "--seed", str(seed), "--out", str(path),
        )[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_certify_roundtrip_on_generated_grid(tmp_path, capsys):
    out = tmp_path / "grid.txt"
    run_cli(capsys, "gen-grid", "--D", "4", "--target-degree", "8", "--seed", "1", "--out", str(out))
    # the plain-grid hill certifies (negated) exactly at m = 2/5 for D=4;
    # augmentation only adds edges, which can only help the certificate
    code, stdout, stderr = run_cli(
        capsys, "certify", "--graph", str(out), "--m", "2/5", "--negate"
    )
    assert code == 0
    assert stdout.splitlines()[0] == "node,M"
    assert len(stdout.splitlines()) == 82
    assert "strongly convex" in stderr
    code, _, stderr = run_cli(
        capsys, "certify", "--graph", str(out), "--m", "0.75", "--negate"
    )
    assert code == 1
    assert "not certifiable" in stderr


def test_certify_nearly_mode(tmp_path, capsys):
    out = tmp_path / "grid.txt"
    run_cli(capsys, "gen-grid", "--D", "3", "--target-degree", "8", "--seed", "2", "--out", str(out))
    code, stdout, stderr = run_cli(
        capsys, "certify", "--graph", str(out), "--nearly",
        "--alpha", "2/5", "--c", "0", "--negate",
    )
    assert code == 0
    assert stdout.splitlines()[0] == "node,in_C,r"
    assert "nearly convex" in stderr


def test_certify_needs_parameters(tmp_path, capsys):
    out = tmp_path / "grid.txt"
    run_cli(capsys, "gen-grid", "--D", "2", "--target-degree", "8", "--seed", "3", "--out", str(out))
    code, _, err = run_cli(capsys, "certify", "--graph", str(out))
    assert code == 2
    assert "usage error" in err
    code, _, err = run_cli(capsys, "certify", "--graph", str(out), "--nearly")
    assert code == 2


def test_run_emits_rows_and_aggregate(tmp_path, capsys):
    out = tmp_path / "grid.txt"
    run_cli(capsys, "gen-grid", "--D", "3", "--target-degree", "8", "--seed", "4", "--out", str(out))
    code, stdout, _ = run_cli(
        capsys, "run", "--algo", "sr", "--graph", str(out),
        "--budget", "20,60", "--trials", "5", "--seed", "9",
    )
    assert code == 0
    lines = stdout.splitlines()
    assert lines[0] == "trial,algo,budget,node,gap,samples,time_ms"
    assert len(lines) == 11
    code, stdout, _ = run_cli(
        capsys, "run", "--algo", "ed", "--graph", str(out),
        "--budget", "100", "--trials", "4", "--seed", "9", "--aggregate",
    )
    assert code == 0
    assert stdout.splitlines()[0].startswith("algo,budget,trials,")
    assert len(stdout.splitlines()) == 2


def test_run_sa_needs_gamma(tmp_path, capsys):
    out = tmp_path / "grid.txt"
    run_cli(capsys, "gen-grid", "--D", "2", "--target-degree", "8", "--seed", "5", "--out", str(out))
    code, _, err = run_cli(
        capsys, "run", "--algo", "sa", "--graph", str(out),
        "--budget", "100", "--trials", "2", "--seed", "1",
    )
    assert code == 2
    assert "gamma" in err


def test_run_rejects_malformed_graph_file(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("this is not a graph\n")
    code, _, err = run_cli(
        capsys, "run", "--algo", "sr", "--graph", str(bad),
        "--budget", "10", "--trials", "1", "--seed", "1",
    )
    assert code == 1
    assert "error" in err


def write_cloud(tmp_path, n=80, with_labels=True):
    rng = np.random.default_rng(0)
    coords = np.vstack([
        rng.normal(-2.0, 1.0, size=(n // 2, 3)),
        rng.normal(2.0, 1.0, size=(n // 2, 3)),
    ])
    labels = tuple(["a"] * (n // 2) + ["b"] * (n // 2))
    ps = PointSet(coords, labels=labels if with_labels else None)
    ppath = tmp_path / "pts.csv"
    lpath = tmp_path / "pts.labels"
    save_points(ps, ppath, labels_path=lpath if with_labels else None)
    qs = PointSet(rng.normal(0.0, 2.0, size=(6, 3)))
    qpath = tmp_path / "qs.csv"
    save_points(qs, qpath)
    return ppath, lpath, qpath


def test_nn_exact_and_sgnn(tmp_path, capsys):
    ppath, lpath, qpath = write_cloud(tmp_path)
    code, stdout, _ = run_cli(
        capsys, "nn", "--points", str(ppath), "--queries", str(qpath),
        "--labels", str(lpath), "--algo", "exact", "--K", "5",
    )
    assert code == 0
    lines = stdout.splitlines()
    assert lines[0] == "query_id,algo,predicted_label,recall_at_K,distance_evals,time_ms"
    assert len(lines) == 7
    assert all(row.split(",")[3] == "1.0" for row in lines[1:])
    code, stdout, _ = run_cli(
        capsys, "nn", "--points", str(ppath), "--queries", str(qpath),
        "--labels", str(lpath), "--algo", "sgnn", "--N", "8",
        "--I", "6", "--J", "6", "--K", "5", "--seed", "3",
    )
    assert code == 0
    rows = [r.split(",") for r in stdout.splitlines()[1:]]
    assert all(r[2] in ("a", "b") for r in rows)
    assert all(0.0 <= float(r[3]) <= 1.0 for r in rows)
    assert all(int(r[4]) <= 80 for r in rows)


def test_nn_sgnn_requires_seed(tmp_path, capsys):
    ppath, _, qpath = write_cloud(tmp_path, with_labels=False)
    code, _, err = run_cli(
        capsys, "nn", "--points", str(ppath), "--queries", str(qpath), "--algo", "sgnn"
    )
    assert code == 2
    assert "seed" in err


def test_nn_is_seed_deterministic(tmp_path, capsys):
    ppath, lpath, qpath = write_cloud(tmp_path)
    args = (
        "nn", "--points", str(ppath), "--queries", str(qpath), "--labels", str(lpath),
        "--algo", "sgnn", "--N", "8", "--K", "5", "--seed", "21",
    )
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    strip = lambda text: ["," .join(r.split(",")[:-1]) for r in text.splitlines()]
    assert strip(out1) == strip(out2)


def test_gen_knn_builds_directed_graph(tmp_path, capsys):
    ppath, _, _ = write_cloud(tmp_path, with_labels=False)
    out = tmp_path / "knn.txt"
    code, _, _ = run_cli(capsys, "gen-knn", "--points", str(ppath), "--N", "4", "--out", str(out))
    assert code == 0
    g, _ = load_graph(out)
    assert g.directed
    assert all(g.degree(i) == 4 for i in range(g.n))


def test_bound_commands(capsys):
    code, out, _ = run_cli(capsys, "bound", "sr", "--K", "4", "--H", "50", "--B", "200")
    assert code == 0
    assert out.strip() == "0.504579"
    code, out, _ = run_cli(capsys, "bound", "sr-loose", "--n", "10", "--delta1", "0.3", "--B", "500")
    assert out.strip() == "1"
    code, out, _ = run_cli(
        capsys, "bound", "ed", "--d", "8", "--schedule", "500,500", "--gaps", "0.5,0.5"
    )
    assert code == 0
    assert float(out.strip()) < 1.0
    code, out, _ = run_cli(
        capsys, "bound", "sa-convex", "--alpha", "0.3", "--d", "9", "--eps", "0.001", "--gap", "0.8"
    )
    assert code == 0
    assert "t_min=97" in out
    code, out, _ = run_cli(capsys, "bound", "sa-samples", "--r", "2", "--gamma", "10", "--R", "0.5")
    assert out.strip() == "100"


def test_bound_ed_length_mismatch(capsys):
    code, _, err = run_cli(
        capsys, "bound", "ed", "--d", "8", "--schedule", "500", "--gaps", "0.5,0.5"
    )
    assert code == 2
    assert "usage error" in err


def test_out_flag_writes_file(tmp_path, capsys):
    dest = tmp_path / "bound.txt"
    code, stdout, _ = run_cli(
        capsys, "bound", "sr", "--K", "4", "--H", "50", "--B", "200", "--out", str(dest)
    )
    assert code == 0
    assert stdout == ""
    assert dest.read_text().strip() == "0.504579"
