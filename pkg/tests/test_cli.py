import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cantorext import odometer
from cantorext.cli import main, ranks_to_edges
from cantorext.errors import FormatError
from cantorext.ifs import preset
from cantorext.io import (
    diagram_from_obj,
    dump_diagram,
    ifs_from_obj,
    ifs_to_obj,
    load_diagram,
    load_ifs,
    parse_q,
    pgm_bytes,
    raster,
)

from _support import odometer_labeling, two_vertex_full


@pytest.fixture
def files(tmp_path):
    odo = tmp_path / "odo3.json"
    odo.write_text(dump_diagram(odometer(3)))
    dangling = tmp_path / "dangling.json"
    dangling.write_text(json.dumps({"levels": [["r"], ["a"]], "repeat_from": 0,
                                    "edges": [[{"source": 0, "range": 0, "order": 0},
                                               {"source": 0, "range": 2, "order": 1}]]}))
    labeled = tmp_path / "labeled.json"
    lab = odometer_labeling("interval2")
    labeled.write_text(dump_diagram(lab.diagram, lab.labels))
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    return {"odo": str(odo), "dangling": str(dangling), "labeled": str(labeled),
            "garbage": str(garbage), "dir": tmp_path}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_odometer(files, capsys):
    code, out, _ = run(capsys, "validate", "--diagram", files["odo"])
    assert code == 0 and "properly_ordered: true" in out
    code, out, _ = run(capsys, "validate", "--diagram", files["odo"], "--json")
    assert code == 0 and json.loads(out)["properly_ordered"] is True


def test_validate_dangling_edge(files, capsys):
    code, out, err = run(capsys, "validate", "--diagram", files["dangling"])
    assert code == 1 and out == ""
    assert "violation: E_1 edge 1: range 2 outside V_1" in err
    code, _, err = run(capsys, "validate", "--diagram", files["dangling"], "--json")
    assert code == 1 and json.loads(err)["violations"]


def test_validate_labeling(files, capsys, tmp_path):
    code, out, _ = run(capsys, "validate", "--diagram", files["labeled"], "--ifs", "interval2", "--json")
    assert code == 0 and json.loads(out)["labeling"]["condition3"] == "strong"
    obj = json.loads(open(files["labeled"]).read())
    obj["edges"][0][2]["label"] = None          # maximal edge labeled Identity
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, _, err = run(capsys, "validate", "--diagram", bad, "--ifs", "interval2")
    assert code == 1 and "condition 1" in err


def test_fiber_singleton(files, capsys):
    code, out, _ = run(capsys, "fiber", "--diagram", files["odo"], "--ifs", "interval2",
                       "--point", "max", "--depth", "3")
    assert code == 0
    obj = json.loads(out)
    assert obj["type"] == "singleton" and obj["region"] == [["7/8", "1"]]


def test_fiber_copy(files, capsys):
    code, out, _ = run(capsys, "fiber", "--diagram", files["odo"], "--ifs", "interval2", "--point", "id:0")
    assert code == 0 and json.loads(out) == {"type": "copy", "region": [["0", "1/2"]],
                                              "diameter": "1/2", "path": [0]}


def test_telescope_round_trip(files, capsys):
    out_path = files["dir"] / "t.json"
    code, _, _ = run(capsys, "telescope", "--diagram", files["odo"], "--cuts", "0,2", "--out", out_path)
    assert code == 0
    text = out_path.read_text()
    d, labels = load_diagram(out_path)
    assert labels is None and len(d.edges_at(1)) == 9
    assert dump_diagram(d) == text
    code, out, _ = run(capsys, "validate", "--diagram", out_path)
    assert code == 0


def test_label_auto(files, capsys):
    code, out, _ = run(capsys, "label-auto", "--diagram", files["odo"], "--ifs", "cube2(2)")
    assert code == 0
    obj = json.loads(out)
    assert len(obj["edges"][0]) == 9
    assert sum(e["label"] is None for e in obj["edges"][0]) == 1


def test_orbit_csv(files, capsys):
    code, out, _ = run(capsys, "orbit", "--diagram", files["odo"], "--point", "max", "--steps", "2")
    assert code == 0
    assert out.splitlines() == ["step,prefix,tail", '0,"2,2,2",max', '1,"0,0,0",min', '2,"1,0,0",min']


def test_extended_orbit_csv(files, capsys):
    code, out, _ = run(capsys, "orbit", "--diagram", files["odo"], "--ifs", "interval2",
                       "--point", "id:0", "--coord", "1/4", "--steps", "1", "--depth", "1")
    assert code == 0
    assert out.splitlines() == ["step,prefix,kind,coordinate", "0,0,exact,1/4", "1,1,exact,1/2"]


def test_measure_and_k0(files, capsys):
    assert run(capsys, "measure", "--diagram", files["odo"], "--prefix", "0,1,2")[1] == "1/27\n"
    code, out, _ = run(capsys, "measure", "--diagram", files["odo"], "--prefix", "0", "--ifs", "interval2", "--json")
    assert json.loads(out) == {"measure": "1/3"}
    assert run(capsys, "k0", "--diagram", files["odo"], "--element", "0:1", "--to-level", "2")[1] == "2:9\n"
    assert run(capsys, "k0", "--diagram", files["odo"], "--element", "0:1", "--equal", "1:1")[1] == "false\n"


def test_render(files, capsys):
    out_path = files["dir"] / "carpet.pgm"
    assert run(capsys, "render", "--ifs", "carpet", "--depth", "2", "--out", out_path)[0] == 0
    data = out_path.read_bytes()
    assert data.startswith(b"P5\n9 9\n1\n")
    pixels = data[len(b"P5\n9 9\n1\n"):]
    assert len(pixels) == 81 and sum(pixels) == 64
    # the middle row has y digits (1, 1): only columns whose x digits avoid 1 survive
    assert list(pixels[4 * 9:5 * 9]) == [1, 0, 1, 0, 0, 0, 1, 0, 1]
    assert list(pixels[:9]) == [1, 1, 1, 1, 1, 1, 1, 1, 1]
    code, out, _ = run(capsys, "render", "--ifs", "cantor3", "--depth", "3")
    assert code == 0 and len(out.splitlines()) == 1 + 8
    assert run(capsys, "render", "--ifs", "cantor3", "--depth", "3", "--out", files["dir"] / "x.pgm")[0] == 1


def test_raster_depth_zero():
    assert raster(preset("carpet"), 0) == [[1]]
    grid = raster(preset("cube2(2)"), 1)
    assert grid == [[1, 1], [1, 1]]
    assert pgm_bytes(grid) == b"P5\n2 2\n1\n\x01\x01\x01\x01"


def test_probe(files, capsys):
    code, out, _ = run(capsys, "probe", "--diagram", files["odo"], "--ifs", "interval2", "--point", "id:0,0,0",
                       "--target", "1,0", "--target-coord", "3/8", "--eps-exp", "2", "--budget", "10000", "--json")
    assert code == 0
    (res,) = json.loads(out)["results"]
    assert res["region"] == [["1/4", "1/2"]] and res["visited_at"] is not None
    code, out, _ = run(capsys, "probe", "--diagram", files["odo"], "--ifs", "interval2",
                       "--target", "1,0", "--budget", "0")
    assert out == "NotWithinBudget [0,1/2]\n"


@pytest.mark.parametrize("argv", [
    ["validate", "--diagram", "{garbage}"],
    ["validate", "--diagram", "{missing}"],
    ["fiber", "--diagram", "{odo}", "--ifs", "nope"],
    ["fiber", "--diagram", "{odo}", "--ifs", "interval2", "--point", "id:7"],
    ["fiber", "--diagram", "{odo}", "--ifs", "interval2", "--point", "sideways"],
    ["orbit", "--diagram", "{odo}", "--point", "id:0"],
    ["k0", "--diagram", "{odo}", "--element", "zero"],
    ["telescope", "--diagram", "{odo}", "--cuts", "a,b"],
    ["measure", "--diagram", "{odo}", "--prefix", "9"],
    ["probe", "--diagram", "{odo}", "--ifs", "interval2", "--target", "0", "--target-coord", "3/4"],
    ["telescope", "--diagram", "{odo}", "--cuts", "1,2"],
    ["k0", "--diagram", "{odo}", "--element", "0:1,2"],
    ["k0", "--diagram", "{odo}", "--element", "3:1", "--to-level", "1"],
])
def test_malformed_input_exit_2(files, capsys, argv):
    argv = [a.format(missing=files["dir"] / "missing.json", **files) for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


@pytest.mark.parametrize("cmd", [["orbit"], ["measure"], ["fiber", "--ifs", "interval2"],
                                 ["telescope", "--cuts", "0,1"], ["k0", "--element", "0:1"]])
def test_invalid_diagram_exit_1(files, capsys, cmd):
    code, out, err = run(capsys, cmd[0], "--diagram", files["dangling"], *cmd[1:])
    assert code == 1 and "range 2 outside V_1" in err


def test_argparse_errors_exit_2(files, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["orbit", "--diagram", files["odo"], "--steps", "-1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["validate", "--diagram", "{odo}"],
    ["telescope", "--diagram", "{odo}", "--cuts", "0,2"],
    ["label-auto", "--diagram", "{odo}", "--ifs", "interval2"],
    ["fiber", "--diagram", "{odo}", "--ifs", "interval2"],
    ["measure", "--diagram", "{odo}", "--prefix", "1"],
    ["k0", "--diagram", "{odo}", "--element", "0:1", "--to-level", "1"],
    ["probe", "--diagram", "{odo}", "--ifs", "interval2", "--target", "0", "--budget", "50"],
])
def test_json_outputs_parse(files, capsys, argv):
    code, out, _ = run(capsys, *[a.format(**files) for a in argv], "--json")
    assert code == 0
    json.loads(out)


# -- file formats ----------------------------------------------------------------

def test_unlabeled_and_labeled_parsing():
    obj = json.loads(dump_diagram(odometer(3)))
    assert diagram_from_obj(obj)[1] is None
    obj["edges"][0][0]["label"] = "f1"
    d, labels = diagram_from_obj(obj)
    assert labels == [[1, None, None]]
    for bad in ({"levels": []}, {"levels": [["a"]], "edges": [[{"source": 0}]]},
                {"levels": [["a"], ["b"]], "edges": [[{"source": 0, "range": 0, "order": 0, "label": "g"}]]},
                {"levels": [["a"]], "edges": [], "repeat_from": "0"}):
        with pytest.raises(FormatError):
            diagram_from_obj(bad)


def test_rationals_and_ifs_files(tmp_path):
    assert parse_q("6/8") == Fraction(3, 4)
    with pytest.raises(FormatError):
        parse_q(0.5)
    for name in ("interval2", "cube2(2)", "cantor3", "carpet"):
        sys = preset(name)
        assert ifs_from_obj(json.loads(json.dumps(ifs_to_obj(sys)))) == sys
    path = tmp_path / "third.json"
    path.write_text(json.dumps({"kind": "similitude", "dimension": 1, "ratio": "1/3",
                                "maps": [{"offset": ["0"]}, {"offset": ["2/3"]}]}))
    assert len(load_ifs(str(path)).maps) == 2
    with pytest.raises(FormatError):
        ifs_from_obj({"kind": "similitude", "dimension": 2, "ratio": "1/2", "maps": [{"offset": ["0"]}]})


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([1, 2]), st.sampled_from([(0, 1, 3), (0, 1, 2), (0, 2, 4)]))
def test_dump_is_byte_stable(mult, cuts):
    from cantorext.bratteli import telescope
    d = telescope(two_vertex_full(mult=mult), list(cuts))
    text = dump_diagram(d)
    again, _ = diagram_from_obj(json.loads(text))
    assert dump_diagram(again) == text


def test_rank_resolution(odo):
    assert ranks_to_edges(odo, [2, 0, 1]) == (2, 0, 1)
    d = two_vertex_full(mult=2)
    path = ranks_to_edges(d, [1, 1])
    # two rank-1 edges leave each vertex; ties go to the lower range vertex
    assert [(d.edges_at(n + 1)[i].order, d.edges_at(n + 1)[i].range) for n, i in enumerate(path)] == [(1, 0), (1, 0)]
