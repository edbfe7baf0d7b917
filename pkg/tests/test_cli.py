from __future__ import annotations

import json

import pytest

from sandpiles.cli import main
from sandpiles.errors import FormatError
from sandpiles.graphs import build_multigraph, cone, cycle_graph, hypercube, k2, thick_k2_cone
from sandpiles.intlinalg import IntMatrix
from sandpiles.jsonio import (
    dumps,
    graph_from_dict,
    graph_to_dict,
    load_config,
    load_graph,
    load_matrix,
    save_graph,
)


@pytest.fixture
def square_cone(tmp_path):
    path = tmp_path / "square.json"
    save_graph(cone(hypercube(2)), path)
    return path


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else dumps(payload))
    return path


class TestGraphFiles:
    def test_round_trip_undirected(self, tmp_path):
        g = cone(cycle_graph(4))
        path = tmp_path / "g.json"
        save_graph(g, path)
        assert load_graph(path) == g

    def test_round_trip_digraph(self, tmp_path):
        g = thick_k2_cone(2, 3)
        path = tmp_path / "g.json"
        save_graph(g, path)
        assert load_graph(path) == g

    def test_round_trip_bare_multigraph(self, tmp_path):
        g = cycle_graph(5)
        path = tmp_path / "g.json"
        save_graph(g, path)
        assert load_graph(path) == g

    def test_vertex_order_is_authoritative(self):
        data = graph_to_dict(k2())
        data["vertices"] = ["v2", "v1"]
        assert graph_from_dict(data).vertices == ("v2", "v1")

    def test_rejects_missing_format(self):
        with pytest.raises(FormatError):
            graph_from_dict({"directed": False, "vertices": [], "edges": [], "sink": None})

    def test_rejects_loops(self):
        from sandpiles.errors import LoopEdge

        data = {
            "format": "sandpile-graph-v1",
            "directed": False,
            "vertices": ["a"],
            "edges": [["a", "a", 1]],
            "sink": None,
        }
        with pytest.raises(LoopEdge):
            graph_from_dict(data)

    def test_rejects_unknown_labels(self):
        from sandpiles.errors import UnknownVertex

        data = {
            "format": "sandpile-graph-v1",
            "directed": False,
            "vertices": ["a"],
            "edges": [["a", "b", 1]],
            "sink": None,
        }
        with pytest.raises(UnknownVertex):
            graph_from_dict(data)


class TestConfigAndMatrixFiles:
    def test_config(self, tmp_path):
        path = write(tmp_path, "c.json", "[3, 2, 1]")
        assert load_config(path) == (3, 2, 1)

    def test_config_rejects_non_integers(self, tmp_path):
        path = write(tmp_path, "c.json", '[1, "x"]')
        with pytest.raises(FormatError):
            load_config(path)

    def test_matrix_text(self, tmp_path):
        path = write(tmp_path, "m.txt", "2 -1\n-1 2\n")
        assert load_matrix(path) == IntMatrix.from_rows([[2, -1], [-1, 2]])

    def test_matrix_json(self, tmp_path):
        path = write(tmp_path, "m.json", {"rows": 1, "cols": 2, "entries": [[3, 4]]})
        assert load_matrix(path) == IntMatrix.from_rows([[3, 4]])

    def test_matrix_ragged_rejected(self, tmp_path):
        path = write(tmp_path, "m.txt", "1 2\n3\n")
        with pytest.raises(FormatError):
            load_matrix(path)


class TestCliCommands:
    def test_group(self, tmp_path, capsys):
        path = tmp_path / "c5.json"
        save_graph(cone(cycle_graph(5)), path)
        assert main(["group", str(path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["invariant_factors"] == [11, 11]
        assert payload["order"] == "121"

    def test_group_with_sink_flag(self, tmp_path, capsys):
        path = tmp_path / "c3.json"
        save_graph(cycle_graph(3), path)
        assert main(["group", str(path), "--sink", "v1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["invariant_factors"] == [3]

    def test_group_disconnected_exits_one(self, tmp_path, capsys):
        g = build_multigraph(["a", "b", "c"], [("a", "b", 1)])
        path = tmp_path / "bad.json"
        save_graph(g, path)
        assert main(["group", str(path), "--sink", "a"]) == 1
        assert "SingularReducedLaplacian" in capsys.readouterr().err

    def test_stabilize(self, square_cone, tmp_path, capsys):
        conf = write(tmp_path, "c.json", "[3, 2, 3, 2]")
        assert main(["stabilize", str(square_cone), str(conf)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload == {"stable": [2, 1, 2, 1], "firings": [1, 1, 1, 1]}

    def test_stabilize_stable_input(self, square_cone, tmp_path, capsys):
        conf = write(tmp_path, "c.json", "[1, 0, 1, 0]")
        main(["stabilize", str(square_cone), str(conf)])
        payload = json.loads(capsys.readouterr().out)
        assert payload == {"stable": [1, 0, 1, 0], "firings": [0, 0, 0, 0]}

    def test_stabilize_negative_needs_flag(self, square_cone, tmp_path, capsys):
        conf = write(tmp_path, "c.json", "[-1, 0, 0, 0]")
        assert main(["stabilize", str(square_cone), str(conf)]) == 1
        capsys.readouterr()
        assert main(["stabilize", str(square_cone), str(conf), "--allow-negative"]) == 0

    def test_identity(self, square_cone, capsys):
        assert main(["identity", str(square_cone)]) == 0
        assert json.loads(capsys.readouterr().out)["identity"] == [2, 2, 2, 2]

    def test_recurrents(self, tmp_path, capsys):
        path = tmp_path / "t.json"
        save_graph(cone(k2()), path)
        assert main(["recurrents", str(path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["count"] == 3
        assert payload["recurrents"] == [[0, 1], [1, 0], [1, 1]]

    def test_add(self, tmp_path, capsys):
        path = tmp_path / "t.json"
        save_graph(cone(k2()), path)
        c1 = write(tmp_path, "c1.json", "[1, 0]")
        assert main(["add", str(path), str(c1), str(c1)]) == 0
        assert json.loads(capsys.readouterr().out)["sum"] == [0, 1]

    def test_add_rejects_non_recurrent(self, tmp_path, capsys):
        path = tmp_path / "t.json"
        save_graph(cone(k2()), path)
        c1 = write(tmp_path, "c1.json", "[0, 0]")
        assert main(["add", str(path), str(c1), str(c1)]) == 1

    def test_representative(self, square_cone, tmp_path, capsys):
        conf = write(tmp_path, "c.json", "[0, 0, 0, 0]")
        assert main(["representative", str(square_cone), str(conf)]) == 0
        assert json.loads(capsys.readouterr().out)["representative"] == [2, 2, 2, 2]

    def test_check_hom_pass(self, tmp_path, capsys):
        from conftest import contracted_square, thick_triangle_target

        src = tmp_path / "src.json"
        tgt = tmp_path / "tgt.json"
        save_graph(contracted_square(), src)
        save_graph(thick_triangle_target(), tgt)
        hom = write(
            tmp_path,
            "hom.json",
            {
                "map": {"sG": "sH", "u2": "v2", "u3": "v3", "u4": "v2", "u5": "v3"},
                "subset_V": ["v2", "v3"],
                "kind": "uniform",
            },
        )
        assert main(["check-hom", str(src), str(tgt), str(hom), "--verify-injection"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["valid"] and payload["degree"] == 2
        assert payload["injection"]["passed"] and payload["injection"]["image_order"] == 8

    def test_check_hom_fail_exits_two(self, tmp_path, capsys):
        src = tmp_path / "c5.json"
        tgt = tmp_path / "c3.json"
        save_graph(cycle_graph(5), src)
        save_graph(cycle_graph(3), tgt)
        hom = write(
            tmp_path,
            "hom.json",
            {
                "map": {"v1": "v1", "v2": "v2", "v4": "v2", "v3": "v3", "v5": "v3"},
                "subset_V": ["v1", "v2", "v3"],
                "kind": "uniform",
            },
        )
        assert main(["check-hom", str(src), str(tgt), str(hom)]) == 2
        payload = json.loads(capsys.readouterr().out)
        assert not payload["valid"]
        assert payload["clause"]

    def test_check_hom_identity_passes(self, tmp_path, capsys):
        path = tmp_path / "t.json"
        g = cone(k2())
        save_graph(g, path)
        hom = write(
            tmp_path,
            "hom.json",
            {
                "map": {v: v for v in g.graph.vertices},
                "subset_V": list(g.nonsink_order),
                "kind": "uniform",
            },
        )
        assert main(["check-hom", str(path), str(path), str(hom)]) == 0

    def test_product(self, tmp_path, capsys):
        g = tmp_path / "c5.json"
        h = tmp_path / "k2.json"
        save_graph(cycle_graph(5), g)
        save_graph(k2(), h)
        a = write(tmp_path, "a.json", "[2, 1, 5, 4, 3]")
        b = write(tmp_path, "b.json", "[1, 2]")
        assert main(["product", str(g), str(h), str(a), str(b)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["box"] == [3, 2, 6, 5, 4, 4, 3, 7, 6, 5]

    def test_product_certify(self, tmp_path, capsys):
        g = tmp_path / "k2a.json"
        h = tmp_path / "k2b.json"
        save_graph(k2(), g)
        save_graph(k2(), h)
        a = write(tmp_path, "a.json", "[1, 0]")
        b = write(tmp_path, "b.json", "[1, 1]")
        assert main(["product", str(g), str(h), str(a), str(b), "--certify"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["box"] == [2, 1, 2, 1]
        assert payload["recurrent"] is True

    def test_hypercube_structure(self, capsys):
        assert main(["hypercube", "--d", "2", "--k", "1", "--verify", "structure"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"]
        assert payload["reports"][0]["computed_elementary_divisors"] == [3, 5, 5, 7]

    def test_hypercube_all(self, capsys):
        assert main(["hypercube", "--d", "3", "--verify", "all"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] and len(payload["reports"]) == 4

    def test_hypercube_guard(self, capsys):
        assert main(["hypercube", "--d", "9", "--verify", "structure"]) == 1

    def test_snf(self, tmp_path, capsys):
        m = write(tmp_path, "m.txt", "2 -1\n-1 2\n")
        assert main(["snf", str(m), "--transforms"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["diagonal"] == [1, 3]
        assert payload["u"]["entries"] and payload["v"]["entries"]

    def test_text_output(self, square_cone, capsys):
        assert main(["--output", "text", "identity", str(square_cone)]) == 0
        out = capsys.readouterr().out
        assert "identity:" in out

    def test_output_determinism(self, tmp_path, capsys):
        path = tmp_path / "c5.json"
        save_graph(cone(cycle_graph(5)), path)
        main(["group", str(path)])
        first = capsys.readouterr().out
        main(["group", str(path)])
        second = capsys.readouterr().out
        assert first == second

    def test_emitted_graph_reparses_equal(self, tmp_path):
        g = cone(cycle_graph(4))
        path = tmp_path / "g.json"
        save_graph(g, path)
        save_graph(load_graph(path), tmp_path / "g2.json")
        assert (tmp_path / "g.json").read_text() == (tmp_path / "g2.json").read_text()
