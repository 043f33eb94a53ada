import json

import pytest

from pwtree.cli import main
from pwtree.graphs import graph_from_json
from pwtree.instances import psi


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenerate:
    def test_psi_to_stdout(self, capsys):
        code, out, _ = run(capsys, "generate", "psi", "--i", "1", "--m", "9")
        assert code == 0
        g = graph_from_json(json.loads(out))
        assert g == psi(1, 9)
        assert g.n == 10

    def test_cycle_writes_composition(self, capsys, tmp_path):
        gpath = tmp_path / "cycle.json"
        cpath = tmp_path / "cycle.comp.json"
        code, _, err = run(
            capsys, "generate", "cycle", "--n", "4",
            "--out", str(gpath), "--composition-out", str(cpath),
        )
        assert code == 0
        data = json.loads(cpath.read_text())
        assert data["k"] == 2 and data["initial"] == [0, 1]

    def test_random_reproducible(self, capsys, tmp_path):
        cpath = str(tmp_path / "c.json")
        argv = ("generate", "random-pw", "--k", "2", "--n", "20", "--seed", "7",
                "--composition-out", cpath)
        a = run(capsys, *argv)
        first = open(cpath).read()
        b = run(capsys, *argv)
        assert a == b
        assert open(cpath).read() == first


class TestPathwidth:
    def make_graph(self, capsys, tmp_path, *spec):
        path = tmp_path / "g.json"
        code, *_ = run(capsys, "generate", *spec, "--out", str(path))
        assert code == 0
        return path

    def test_tree_method_on_nested_spider(self, capsys, tmp_path):
        p = self.make_graph(capsys, tmp_path, "psi", "--i", "1", "--m", "9")
        code, out, _ = run(capsys, "pathwidth", str(p), "--method", "tree")
        assert code == 0
        assert json.loads(out)["pathwidth"] == 2

    def test_exact_method(self, capsys, tmp_path):
        p = self.make_graph(capsys, tmp_path, "cycle", "--n", "5")
        code, out, _ = run(capsys, "pathwidth", str(p), "--method", "exact")
        assert code == 0
        assert json.loads(out)["pathwidth"] == 2

    def test_peel_method(self, capsys, tmp_path):
        p = self.make_graph(capsys, tmp_path, "psi", "--i", "2", "--m", "81")
        code, out, _ = run(capsys, "pathwidth", str(p), "--method", "peel")
        assert code == 0
        data = json.loads(out)
        assert all(pw <= 2 for pw in data["component_pathwidths"])

    def test_non_tree_input_errors(self, capsys, tmp_path):
        p = self.make_graph(capsys, tmp_path, "cycle", "--n", "5")
        code, _, err = run(capsys, "pathwidth", str(p), "--method", "tree")
        assert code == 1 and "error" in err


class TestEmbed:
    def generate(self, capsys, tmp_path, *spec, composition=False):
        gpath = tmp_path / "g.json"
        args = ["generate", *spec, "--out", str(gpath)]
        cpath = None
        if composition:
            cpath = tmp_path / "c.json"
            args += ["--composition-out", str(cpath)]
        code, *_ = run(capsys, *args)
        assert code == 0
        return gpath, cpath

    def test_cycle_passes(self, capsys, tmp_path):
        gpath, cpath = self.generate(
            capsys, tmp_path, "cycle", "--n", "4", composition=True
        )
        code, out, _ = run(
            capsys, "embed", str(gpath), "--composition", str(cpath),
            "--k", "2", "--samples", "500", "--seed", "3",
        )
        assert code == 0
        data = json.loads(out)
        assert data["noncontraction_ok"] and data["bound_ok"]
        assert data["samples"] == 500

    def test_warmup_mode(self, capsys, tmp_path):
        gpath, cpath = self.generate(
            capsys, tmp_path, "cycle", "--n", "6", composition=True
        )
        code, out, _ = run(
            capsys, "embed", str(gpath), "--composition", str(cpath),
            "--samples", "200", "--seed", "1", "--warmup",
        )
        assert code == 0
        assert json.loads(out)["noncontraction_ok"]

    def test_byte_identical_reports(self, capsys, tmp_path):
        gpath, cpath = self.generate(
            capsys, tmp_path, "cycle", "--n", "5", composition=True
        )
        argv = ["embed", str(gpath), "--composition", str(cpath),
                "--samples", "300", "--seed", "11"]
        a = run(capsys, *argv)
        b = run(capsys, *argv)
        assert a == b

    def test_small_graph_without_composition(self, capsys, tmp_path):
        gpath, _ = self.generate(capsys, tmp_path, "cycle", "--n", "5")
        code, out, _ = run(capsys, "embed", str(gpath), "--samples", "50")
        assert code == 0

    def test_large_graph_requires_composition(self, capsys, tmp_path):
        gpath, _ = self.generate(
            capsys, tmp_path, "psi", "--i", "2", "--m", "81"
        )
        code, _, err = run(capsys, "embed", str(gpath), "--samples", "10")
        assert code == 1
        assert "composition" in err

    def test_width_mismatch(self, capsys, tmp_path):
        gpath, cpath = self.generate(
            capsys, tmp_path, "cycle", "--n", "4", composition=True
        )
        code, _, err = run(
            capsys, "embed", str(gpath), "--composition", str(cpath), "--k", "3"
        )
        assert code == 1


def test_usage_error_exit_code(capsys):
    code, _, err = run(capsys, "pathwidth", "/nonexistent/graph.json")
    assert code == 1
