import io
import subprocess
import sys

import numpy as np
import pytest

from helpers import DATA, barbell_edges, random_connected_edges, uf_components
from leidenfusion.cli import main
from leidenfusion.graph import load_edge_list, write_edge_list
from leidenfusion.partition import read_partition_file, write_partition_file

KARATE = str(DATA / "karate.tsv")


def _read_labels(path):
    rows = [line.split() for line in open(path) if line.strip()]
    return {int(a): int(b) for a, b in rows}


def _write_edges(path, edges):
    path.write_text("".join(f"{u} {v}\n" for u, v in edges))
    return str(path)


def _write_labels(path, labels):
    path.write_text("".join(f"{x} {b}\n" for x, b in enumerate(labels)))
    return str(path)


def _blocks_connected(n, edges, labels):
    for b in set(labels.values()):
        members = [x for x in range(n) if labels[x] == b]
        index = {x: i for i, x in enumerate(members)}
        inner = [(index[u], index[v]) for u, v in edges if u in index and v in index]
        if uf_components(len(members), inner)[0] != 1:
            return False
    return True


def test_partition_lf_karate(tmp_path, capsys):
    out = tmp_path / "p.txt"
    assert main(["partition", "--input", KARATE, "--k", "2", "--method", "lf",
                 "--seed", "7", "--output", str(out)]) == 0
    labels = _read_labels(out)
    assert sorted(labels) == list(range(34))
    assert set(labels.values()) == {0, 1}
    report = capsys.readouterr().out
    assert report.startswith("tau ")
    assert "components[0] 1\ncomponents[1] 1\n" in report


def test_partition_k1(tmp_path):
    out = tmp_path / "p.txt"
    for method in ("lf", "lpa", "random"):
        assert main(["partition", "--input", KARATE, "--k", "1", "--method", method,
                     "--output", str(out), "--metrics", str(tmp_path / "m.txt")]) == 0
        assert set(_read_labels(out).values()) == {0}


def test_partition_lpa_and_random(tmp_path):
    for method in ("lpa", "random"):
        out = tmp_path / f"{method}.txt"
        assert main(["partition", "--input", KARATE, "--k", "3", "--method", method,
                     "--output", str(out), "--metrics", str(tmp_path / "m.txt")]) == 0
        labels = _read_labels(out)
        assert len(labels) == 34 and max(labels.values()) < 3


def test_partition_rejects_bad_flags(tmp_path):
    out = str(tmp_path / "p.txt")
    with pytest.raises(SystemExit) as exc:
        main(["partition", "--input", KARATE, "--k", "0", "--method", "lf", "--output", out])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["partition", "--input", KARATE, "--k", "2", "--method", "metis", "--output", out])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["partition", "--input", KARATE, "--k", "2", "--method", "lf", "--beta", "0",
              "--output", out])
    assert exc.value.code == 2
    # more blocks than nodes
    assert main(["partition", "--input", KARATE, "--k", "40", "--method", "lf",
                 "--output", out]) == 2


def test_partition_input_errors(tmp_path):
    out = str(tmp_path / "p.txt")
    assert main(["partition", "--input", str(tmp_path / "missing.tsv"), "--k", "2",
                 "--method", "lf", "--output", out]) == 1
    bad = tmp_path / "bad.tsv"
    bad.write_text("0 1\n1 x\n")
    assert main(["partition", "--input", str(bad), "--k", "2", "--method", "lf",
                 "--output", out]) == 1


def test_partition_lf_disconnected(tmp_path):
    g = _write_edges(tmp_path / "g.tsv", [(0, 1), (1, 2), (3, 4), (4, 5)])
    assert main(["partition", "--input", g, "--k", "2", "--method", "lf",
                 "--output", str(tmp_path / "p.txt")]) == 3


def test_partition_lf_too_few_communities(tmp_path):
    g = _write_edges(tmp_path / "g.tsv", [(0, 1), (1, 2), (0, 2)])
    assert main(["partition", "--input", g, "--k", "2", "--method", "lf", "--alpha", "1",
                 "--beta", "1", "--output", str(tmp_path / "p.txt")]) == 4


def test_fuse_random_fragments(tmp_path):
    rng = np.random.default_rng(5)
    n = 500
    edges = random_connected_edges(n, 1500, rng, communities=10)
    g = _write_edges(tmp_path / "g.tsv", edges)
    for seed in range(10):
        labels = np.random.default_rng(seed).integers(0, 64, n).tolist()
        parts = _write_labels(tmp_path / "in.txt", labels)
        out = tmp_path / "out.txt"
        assert main(["fuse", "--input", g, "--partitions", parts, "--k", "8",
                     "--output", str(out)]) == 0
        fused = _read_labels(out)
        assert set(fused.values()) == set(range(8))
        assert _blocks_connected(n, edges, fused)


def test_fuse_keeps_k_way_partition(tmp_path):
    g = _write_edges(tmp_path / "g.tsv", barbell_edges())
    parts = _write_labels(tmp_path / "in.txt", [1, 1, 1, 0, 0, 0])
    out = tmp_path / "out.txt"
    assert main(["fuse", "--input", g, "--partitions", parts, "--k", "2",
                 "--output", str(out)]) == 0
    assert out.read_text() == "0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n"


def test_fuse_errors(tmp_path):
    g = _write_edges(tmp_path / "g.tsv", barbell_edges())
    out = str(tmp_path / "out.txt")
    parts = _write_labels(tmp_path / "in.txt", [0, 0, 0, 1, 1, 1])
    assert main(["fuse", "--input", g, "--partitions", parts, "--k", "3", "--output", out]) == 3
    missing = tmp_path / "short.txt"
    missing.write_text("0 0\n1 0\n2 0\n3 1\n4 1\n")
    assert main(["fuse", "--input", g, "--partitions", str(missing), "--k", "2",
                 "--output", out]) == 5
    unknown = tmp_path / "unknown.txt"
    unknown.write_text("0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n99 1\n")
    assert main(["fuse", "--input", g, "--partitions", str(unknown), "--k", "2",
                 "--output", out]) == 5
    split = _write_edges(tmp_path / "split.tsv", [(0, 1), (2, 3)])
    assert main(["fuse", "--input", split, "--partitions",
                 _write_labels(tmp_path / "s.txt", [0, 0, 1, 1]), "--k", "1",
                 "--output", out]) == 3


def test_metrics_karate_fixture(tmp_path):
    out = tmp_path / "m.txt"
    assert main(["metrics", "--input", KARATE, "--partitions",
                 str(DATA / "karate_lf_k2.tsv"), "--output", str(out)]) == 0
    lines = dict(line.split() for line in out.read_text().splitlines())
    assert float(lines["tau"]) == pytest.approx(0.1282, abs=1e-4)
    assert (lines["components[0]"], lines["components[1]"]) == ("1", "1")
    assert "replication_factor" not in lines
    assert main(["metrics", "--input", KARATE, "--partitions",
                 str(DATA / "karate_lf_k2.tsv"), "--mode", "inner",
                 "--output", str(out)]) == 0
    assert "replication_factor 1.0\n" in out.read_text()


def test_export_inner_k1_reproduces_input(tmp_path, karate):
    parts = _write_labels(tmp_path / "p.txt", [0] * 34)
    assert main(["export", "--input", KARATE, "--partitions", parts,
                 "--output", str(tmp_path / "bundle")]) == 0
    canonical = io.StringIO()
    write_edge_list(karate, canonical)
    assert (tmp_path / "bundle" / "part-0000" / "edges.txt").read_text() == canonical.getvalue()


def test_export_repli_barbell(tmp_path):
    g = _write_edges(tmp_path / "g.tsv", barbell_edges())
    parts = _write_labels(tmp_path / "p.txt", [0, 0, 0, 1, 1, 1])
    bundle = tmp_path / "bundle"
    assert main(["export", "--input", g, "--partitions", parts, "--mode", "repli",
                 "--output", str(bundle)]) == 0
    for i, halo in ((0, 3), (1, 2)):
        manifest = (bundle / f"part-{i:04d}" / "manifest.txt").read_text().splitlines()
        assert [line.split()[1] for line in manifest if line.endswith("halo")] == [str(halo)]
        assert len((bundle / f"part-{i:04d}" / "edges.txt").read_text().splitlines()) == 4


def test_partition_then_metrics_round_trip(tmp_path):
    out, report = tmp_path / "p.txt", tmp_path / "report.txt"
    assert main(["partition", "--input", KARATE, "--k", "3", "--method", "lf",
                 "--output", str(out), "--metrics", str(report)]) == 0
    again = tmp_path / "again.txt"
    assert main(["metrics", "--input", KARATE, "--partitions", str(out),
                 "--output", str(again)]) == 0
    assert again.read_bytes() == report.read_bytes()


def test_partition_is_deterministic(tmp_path):
    for method in ("lf", "lpa", "random"):
        outputs = []
        for run in range(2):
            out = tmp_path / f"{method}{run}.txt"
            assert main(["partition", "--input", KARATE, "--k", "4", "--method", method,
                         "--seed", "3", "--output", str(out),
                         "--metrics", str(tmp_path / "m.txt")]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]


def test_external_ids_are_preserved(tmp_path):
    edges = [(u * 10 + 100, v * 10 + 100) for u, v in barbell_edges()]
    g = _write_edges(tmp_path / "g.tsv", edges)
    out = tmp_path / "p.txt"
    assert main(["partition", "--input", g, "--k", "2", "--method", "lf", "--alpha", "0",
                 "--output", str(out), "--metrics", str(tmp_path / "m.txt")]) == 0
    labels = _read_labels(out)
    assert sorted(labels) == [100, 110, 120, 130, 140, 150]
    graph = load_edge_list(g)
    p = read_partition_file(graph, out)
    buf = io.StringIO()
    write_partition_file(graph, p, buf)
    assert buf.getvalue() == out.read_text()


def test_console_help():
    done = subprocess.run([sys.executable, "-m", "leidenfusion", "--help"],
                          capture_output=True, text=True)
    assert done.returncode == 0
    for command in ("partition", "fuse", "metrics", "export"):
        assert command in done.stdout
