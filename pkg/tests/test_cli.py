"""End-to-end command-line behaviour: outputs, manifests, exit codes."""

import hashlib
import json

import pytest

from tdforge import io
from tdforge.cli import main
from tdforge.graphs import Graph, cycle_graph, path_graph

pytestmark = pytest.mark.usefixtures("in_tmp")


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("TDFORGE_CAP_VERTICES", raising=False)


def write_graph(g: Graph, path: str) -> str:
    io.dump_json(io.graph_to_obj(g), path)
    return path


def write_square_td(path: str) -> str:
    host = Graph(["c00", "c01", "c02", "c03"],
                 [("c00", "c01"), ("c01", "c02"), ("c02", "c03")])
    obj = io.td_to_obj(io.td_from_obj({
        "host_vertices": list(host.vertices),
        "host_edges": [list(e) for e in sorted(host.edges)],
        "bags": {"c00": ["c00", "c01", "c03"], "c01": ["c01", "c02", "c03"],
                 "c02": ["c02", "c03"], "c03": ["c03"]},
    }))
    io.dump_json(obj, path)
    return path


class TestParser:
    def test_version_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0

    def test_no_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_exclusive_certify_modes(self):
        with pytest.raises(SystemExit) as exc:
            main(["certify", "--r", "2", "--all", "--sample", "3"])
        assert exc.value.code == 2


class TestConstruct:
    def test_reflected_tree_with_sidecar_and_manifest(self, tmp_path):
        assert main(["construct", "reflected-tree", "--r", "3",
                     "--out", "g3.json"]) == 0
        g = io.graph_from_obj(io.load_json("g3.json"))
        assert (len(g.vertices), len(g.edges)) == (10, 12)
        meta = io.load_json("g3.meta.json")
        assert meta == {"kind": "reflected-tree", "level": 3,
                        "roots": ["u", "v"], "order": 10, "size": 12}
        manifest = io.load_json("g3.json.manifest.json")
        assert manifest["command"][:2] == ["tdforge", "construct"]
        assert manifest["outputs"] == ["g3.json", "g3.meta.json"]
        assert manifest["settings"]["tw_cap"] == 14

    def test_output_bytes_are_reproducible(self, tmp_path):
        main(["construct", "reflected-tree", "--r", "4", "--out", "a.json"])
        main(["construct", "reflected-tree", "--r", "4", "--out", "b.json"])
        assert (tmp_path / "a.json").read_bytes() == \
            (tmp_path / "b.json").read_bytes()

    def test_stdout_mode_writes_default_manifest(self, tmp_path, capsys):
        assert main(["construct", "reflected-tree", "--r", "2"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert len(obj["vertices"]) == 4
        assert (tmp_path / "tdforge.manifest.json").exists()

    def test_cap_refuses_large_levels(self, capsys):
        assert main(["construct", "reflected-tree", "--r", "4",
                     "--cap", "5"]) == 2
        assert "error" in capsys.readouterr().err

    def test_toy_gadget(self, capsys):
        write_graph(path_graph(2), "base.json")
        assert main(["construct", "gadget", "--k", "1", "--graph", "base.json",
                     "--toy-heights", "1", "--toy-widths", "1",
                     "--out", "gg.json"]) == 0
        assert "toy schedule" in capsys.readouterr().err
        g = io.graph_from_obj(io.load_json("gg.json"))
        assert len(g.vertices) == 4
        meta = io.load_json("gg.meta.json")
        assert meta["kind"] == "gadget-instance"
        assert io.instance_from_obj(meta).gadgets == {
            "p00": frozenset({"p00#0"}), "p01": frozenset({"p01#0"})}

    def test_genuine_gadget_does_not_materialize(self, capsys):
        write_graph(path_graph(2), "base.json")
        assert main(["construct", "gadget", "--k", "1",
                     "--graph", "base.json"]) == 2
        assert "error" in capsys.readouterr().err

    def test_toy_flags_go_together(self):
        write_graph(path_graph(2), "base.json")
        assert main(["construct", "gadget", "--k", "1", "--graph", "base.json",
                     "--toy-heights", "1"]) == 2


class TestSchedule:
    def test_prints_single_gadget_parameters(self, capsys):
        assert main(["schedule", "--k", "1", "--n", "1"]) == 0
        out = capsys.readouterr().out
        assert "genuine = True" in out
        assert "h_1 = 2" in out and "w_1 = 3" in out and "|V(S_1)| = 13" in out

    def test_two_gadget_json(self):
        assert main(["schedule", "--k", "1", "--n", "2",
                     "--out", "s.json"]) == 0
        obj = io.load_json("s.json")
        assert obj["heights"] == [2, 82]
        assert obj["widths"][1] == 5
        assert obj["widths"][0] == 2 * (2 + (5 ** 83 - 1) // 4) + 1

    def test_unrepresentable_schedule(self, capsys):
        assert main(["schedule", "--k", "1", "--n", "3"]) == 2
        assert "error" in capsys.readouterr().err


class TestTransform:
    def test_minor_to_spanning(self):
        write_graph(cycle_graph(5), "g.json")
        io.dump_json({
            "host_vertices": ["x", "y"], "host_edges": [["x", "y"]],
            "bags": {"x": ["c00", "c01", "c02", "c04"],
                     "y": ["c02", "c03", "c04"]},
        }, "td.json")
        io.dump_json({
            "pattern_vertices": ["x", "y"], "pattern_edges": [["x", "y"]],
            "branch_sets": {"x": ["c00", "c01", "c02"], "y": ["c03", "c04"]},
            "edge_map": {"x,y": ["c02", "c03"]},
        }, "model.json")
        assert main(["transform", "minor-to-spanning", "--graph", "g.json",
                     "--td", "td.json", "--model", "model.json",
                     "--out", "out.json"]) == 0
        td = io.td_from_obj(io.load_json("out.json"))
        assert td.width() == 3
        assert td.host.edges == {("c00", "c01"), ("c01", "c02"),
                                 ("c02", "c03"), ("c03", "c04")}

    def _write_reduce_inputs(self, widths, bags):
        from tdforge.constructions import attach_gadgets, toy_schedule
        base = Graph(["a0", "a1"], [("a0", "a1")])
        inst = attach_gadgets(base, None, toy_schedule(1, 2, [1, 1], widths))
        io.dump_json(io.instance_to_obj(inst), "inst.json")
        host = inst.graph  # the instance is a tree, so it hosts itself
        io.dump_json(io.td_to_obj(io.td_from_obj({
            "host_vertices": list(host.vertices),
            "host_edges": [list(e) for e in sorted(host.edges)],
            "bags": bags,
        })), "td.json")

    def test_reduce_success(self):
        self._write_reduce_inputs([1, 1], {
            "a0#0": ["a0#0", "a0"], "a0": ["a0", "a1"],
            "a1": ["a1", "a1#0"], "a1#0": ["a1#0"]})
        assert main(["transform", "reduce", "--instance", "inst.json",
                     "--td", "td.json", "--out", "out.json"]) == 0
        out = io.td_from_obj(io.load_json("out.json"))
        assert out.bags == {"a0": {"a0", "a1"}, "a1": {"a1"}}

    def test_reduce_reports_invalid(self, tmp_path, capsys):
        self._write_reduce_inputs([2, 2], {
            "a0": ["a0#1", "a1#0", "a1#1"], "a1": ["a1#0", "a1#1"],
            "a0#0": ["a0", "a1", "a0#0", "a0#1", "a1#0", "a1#1"],
            "a0#1": ["a0#1"], "a1#0": ["a1#0"], "a1#1": ["a1#1"]})
        with pytest.warns(UserWarning):
            rc = main(["transform", "reduce", "--instance", "inst.json",
                       "--td", "td.json", "--out", "out.json"])
        assert rc == 1
        assert "reduction failed" in capsys.readouterr().err
        assert not (tmp_path / "out.json").exists()


def write_level2_host(path="host.json"):
    return write_graph(Graph(["L.u", "R.u", "u", "v"],
                             [("L.u", "v"), ("R.u", "u"), ("R.u", "v")]),
                       path)


def write_level2_anchored_td(path="atd.json"):
    io.dump_json({
        "host_vertices": ["L.u", "R.u", "u", "v"],
        "host_edges": [["L.u", "v"], ["R.u", "u"], ["R.u", "v"]],
        "bags": {"u": ["u"], "R.u": ["u", "R.u", "v"], "v": ["u", "v"],
                 "L.u": ["u", "v", "L.u"]},
    }, path)
    return path


class TestCertifyAndAudit:
    def test_certify_one_tree_then_audit(self, capsys):
        write_level2_host()
        write_level2_anchored_td()
        assert main(["certify", "--r", "2", "--spanning-tree", "host.json",
                     "--out", "cert.json"]) == 0
        cert = io.load_json("cert.json")
        assert cert["level"] == 2
        assert cert["matching"] == [["L.u", "u"]]
        assert main(["audit", "--certificate", "cert.json", "--td", "atd.json",
                     "--out", "report.json"]) == 0
        report = io.load_json("report.json")
        assert report["certificate_ok"] is True
        assert report["bound_holds"] is True
        assert (report["hub"], report["forced"]) == ("R.u", ["u"])
        assert report["bag_size_lower_bound"] == 1

    def test_audit_rejects_tampered_certificate(self, capsys):
        write_level2_host()
        write_level2_anchored_td()
        main(["certify", "--r", "2", "--spanning-tree", "host.json",
              "--out", "cert.json"])
        obj = io.load_json("cert.json")
        obj["hub"] = "v"
        io.dump_json(obj, "bad.json")
        assert main(["audit", "--certificate", "bad.json",
                     "--td", "atd.json", "--out", "report.json"]) == 1
        report = io.load_json("report.json")
        assert report["certificate_ok"] is False
        assert report["reasons"]

    def test_certify_all_level2(self, capsys):
        assert main(["certify", "--r", "2", "--all"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert (obj["mode"], obj["count"]) == ("all", 4)

    def test_sampled_certificates_are_seeded(self, tmp_path):
        argv = ["certify", "--r", "3", "--sample", "5", "--seed", "9"]
        assert main(argv + ["--out", "a.json"]) == 0
        assert main(argv + ["--out", "b.json"]) == 0
        assert (tmp_path / "a.json").read_bytes() == \
            (tmp_path / "b.json").read_bytes()
        obj = io.load_json("a.json")
        assert (obj["mode"], obj["count"], obj["seed"]) == ("sampled", 5, 9)
        assert len(obj["certificates"]) == 5

    def test_manifest_records_input_digests(self):
        write_level2_host()
        write_level2_anchored_td()
        main(["certify", "--r", "2", "--spanning-tree", "host.json",
              "--out", "cert.json"])
        main(["audit", "--certificate", "cert.json", "--td", "atd.json",
              "--out", "report.json"])
        manifest = io.load_json("report.json.manifest.json")
        for path in ("cert.json", "atd.json"):
            with open(path, "rb") as fh:
                assert manifest["inputs"][path] == \
                    hashlib.sha256(fh.read()).hexdigest()


class TestSearchCommands:
    def test_decide_unsat_then_sat(self, capsys):
        write_graph(cycle_graph(4), "g.json")
        write_graph(Graph(["c00", "c01", "c02", "c03"],
                          [("c00", "c01"), ("c01", "c02"), ("c02", "c03")]),
                    "host.json")
        assert main(["search", "decide", "--graph", "g.json", "--host",
                     "host.json", "--budget", "1", "--anchored"]) == 0
        low = json.loads(capsys.readouterr().out)
        assert low["status"] == "UNSAT" and "witness" not in low
        assert main(["search", "decide", "--graph", "g.json", "--host",
                     "host.json", "--budget", "2", "--anchored"]) == 0
        high = json.loads(capsys.readouterr().out)
        assert high["status"] == "SAT"
        assert io.td_from_obj(high["witness"]).width() <= 2

    def test_min_anchored(self, capsys):
        write_graph(cycle_graph(4), "g.json")
        assert main(["search", "min-anchored", "--graph", "g.json"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["width"] == 2
        assert io.td_from_obj(obj["witness"]).width() == 2

    def test_min_anchored_cap(self, capsys):
        write_graph(path_graph(13), "big.json")
        assert main(["search", "min-anchored", "--graph", "big.json"]) == 2
        assert main(["search", "min-anchored", "--graph", "big.json",
                     "--cap", "13"]) == 0

    def test_treewidth(self, capsys):
        from tdforge.graphs import complete_graph
        write_graph(complete_graph(4), "k4.json")
        assert main(["search", "tw", "--graph", "k4.json"]) == 0
        assert json.loads(capsys.readouterr().out) == {"treewidth": 3}
        assert main(["search", "tw", "--graph", "k4.json",
                     "--tw-cap", "3"]) == 2

    def test_spanning_listing_and_count(self, capsys):
        write_graph(cycle_graph(4), "g.json")
        assert main(["search", "spanning", "--graph", "g.json",
                     "--count-only"]) == 0
        assert json.loads(capsys.readouterr().out) == {"count": 4}
        assert main(["search", "spanning", "--graph", "g.json"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["count"] == 4
        assert len(obj["trees"]) == 4
        assert all(len(t) == 3 for t in obj["trees"])

    def test_enum_cap_from_config(self, tmp_path, capsys):
        (tmp_path / "caps.cfg").write_text("enum_cap = 3\n")
        write_graph(cycle_graph(4), "g.json")
        assert main(["search", "spanning", "--graph", "g.json",
                     "--config", "caps.cfg"]) == 2
        assert main(["search", "spanning", "--graph", "g.json",
                     "--count-only", "--config", "caps.cfg"]) == 0

    def test_bad_config_rejected(self, tmp_path, capsys):
        (tmp_path / "caps.cfg").write_text("bogus = 3\n")
        write_graph(cycle_graph(4), "g.json")
        assert main(["search", "spanning", "--graph", "g.json",
                     "--config", "caps.cfg"]) == 2
        assert "unknown key" in capsys.readouterr().err


class TestVerify:
    def test_valid_anchored(self, capsys):
        write_graph(cycle_graph(4), "g.json")
        write_square_td("td.json")
        assert main(["verify", "--graph", "g.json", "--td", "td.json",
                     "--anchored"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["valid"] and obj["anchored"] and obj["width"] == 2

    def test_budget_failure(self, capsys):
        write_graph(cycle_graph(4), "g.json")
        write_square_td("td.json")
        assert main(["verify", "--graph", "g.json", "--td", "td.json",
                     "--budget", "1"]) == 1
        obj = json.loads(capsys.readouterr().out)
        assert obj["width_within_budget"] is False

    def test_invalid_decomposition(self, capsys):
        write_graph(cycle_graph(4), "g.json")
        io.dump_json({
            "host_vertices": ["c00", "c01", "c02", "c03"],
            "host_edges": [["c00", "c01"], ["c01", "c02"], ["c02", "c03"]],
            "bags": {"c00": ["c00", "c01"], "c01": ["c01", "c02"],
                     "c02": ["c02", "c03"], "c03": ["c03"]},
        }, "td.json")
        assert main(["verify", "--graph", "g.json", "--td", "td.json"]) == 1
        obj = json.loads(capsys.readouterr().out)
        assert obj["valid"] is False
        assert obj["violations"]

    def test_anchoring_requirement(self, capsys):
        write_graph(cycle_graph(4), "g.json")
        io.dump_json({
            "host_vertices": ["c00", "c01", "c02", "c03"],
            "host_edges": [["c00", "c01"], ["c01", "c02"], ["c02", "c03"]],
            "bags": {"c00": ["c03"], "c01": ["c00", "c01", "c02", "c03"],
                     "c02": ["c02", "c03"], "c03": ["c03"]},
        }, "td.json")
        assert main(["verify", "--graph", "g.json", "--td", "td.json"]) == 0
        capsys.readouterr()
        assert main(["verify", "--graph", "g.json", "--td", "td.json",
                     "--anchored"]) == 1
        assert json.loads(capsys.readouterr().out)["anchored"] is False


class TestPipeline:
    def test_toy_run_for_k1(self, capsys):
        assert main(["pipeline", "--k", "1"]) == 0
        captured = capsys.readouterr()
        assert "toy schedule" in captured.err
        report = json.loads(captured.out)
        assert report["ok"] is True
        assert (report["core_level"], report["outer_level"]) == (3, 4)
        by_name = {c["check"]: c for c in report["checks"]}
        assert by_name["outer-reflected-tree-treewidth"]["value"] == 2
        assert by_name["gadget-graph-treewidth"]["value"] == 2
        assert by_name["certificates"]["matching_size"] == 2
        assert by_name["certificates"]["certified"] == 96
        assert by_name["anchored-width-bound"]["unsat"] == 96
        assert by_name["anchored-width-bound"]["budget"] == 0

    def test_rejects_bad_k(self, capsys):
        assert main(["pipeline", "--k", "0"]) == 2


class TestExport:
    def test_graph_td_and_instance(self, capsys):
        from tdforge.constructions import attach_gadgets, toy_schedule
        write_graph(cycle_graph(4), "g.json")
        assert main(["export", "--input", "g.json"]) == 0
        assert capsys.readouterr().out.startswith("graph ")
        write_square_td("td.json")
        assert main(["export", "--input", "td.json"]) == 0
        assert "label" in capsys.readouterr().out
        base = Graph(["a0", "a1"], [("a0", "a1")])
        inst = attach_gadgets(base, None, toy_schedule(1, 2, [1, 1], [1, 1]))
        io.dump_json(io.instance_to_obj(inst), "inst.json")
        assert main(["export", "--input", "inst.json"]) == 0
        assert "a0#0" in capsys.readouterr().out

    def test_rejects_unknown_and_missing(self, capsys):
        io.dump_json({"foo": 1}, "junk.json")
        assert main(["export", "--input", "junk.json"]) == 2
        assert main(["export", "--input", "absent.json"]) == 2


class TestSettingsPrecedence:
    def test_env_caps_construction(self, monkeypatch, capsys):
        monkeypatch.setenv("TDFORGE_CAP_VERTICES", "10")
        assert main(["construct", "reflected-tree", "--r", "4"]) == 2
        assert main(["construct", "reflected-tree", "--r", "3"]) == 0

    def test_flag_beats_env(self, monkeypatch, capsys):
        monkeypatch.setenv("TDFORGE_CAP_VERTICES", "10")
        assert main(["construct", "reflected-tree", "--r", "4",
                     "--cap", "25"]) == 0

    def test_env_beats_config(self, tmp_path, monkeypatch, capsys):
        (tmp_path / "caps.cfg").write_text("cap_vertices = 10\n")
        assert main(["construct", "reflected-tree", "--r", "4",
                     "--config", "caps.cfg"]) == 2
        monkeypatch.setenv("TDFORGE_CAP_VERTICES", "25")
        assert main(["construct", "reflected-tree", "--r", "4",
                     "--config", "caps.cfg"]) == 0
