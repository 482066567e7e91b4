import json
import logging

import pytest

from hyptype import corpus
from hyptype.cli import main
from hyptype.decision import is_hyperelliptic_type, verify_certificate
from hyptype.graph import are_isomorphic, as_curve, make_graph
from hyptype.hyperelliptic import is_hyperelliptic
from hyptype.io import (
    DocumentError,
    certificate_from_json,
    certificate_to_json,
    dump_curve,
    involution_from_json,
    involution_to_json,
    load_curve,
    parse_document,
    serialize,
)


def theta_doc():
    return {
        "vertices": [{"id": "u", "weight": 0}, {"id": "v", "weight": 0}],
        "edges": [{"id": "a", "ends": ["u", "v"], "length": "1"},
                  {"id": "b", "ends": ["u", "v"], "length": "2"},
                  {"id": "c", "ends": ["u", "v"], "length": "3"}],
    }


# ---------------------------------------------------------------- documents

def test_roundtrip_canonical():
    doc = theta_doc()
    assert serialize(parse_document(doc)) == doc


def test_length_normalized():
    doc = theta_doc()
    doc["edges"][0]["length"] = "2/4"
    assert serialize(parse_document(doc))["edges"][0]["length"] == "1/2"
    doc["edges"][0]["length"] = 7
    assert serialize(parse_document(doc))["edges"][0]["length"] == "7"


def test_missing_vertex_path():
    doc = theta_doc()
    doc["edges"][1]["ends"] = ["u", "zz"]
    with pytest.raises(DocumentError) as err:
        parse_document(doc)
    assert err.value.path == "$.edges[1].ends[1]"


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d["edges"][0].update(length=0), "$.edges[0].length"),
    (lambda d: d["edges"][0].update(length=1.5), "$.edges[0].length"),
    (lambda d: d["edges"][0].update(length="x/y"), "$.edges[0].length"),
    (lambda d: d["edges"][2].update(id="a"), "$.edges[2].id"),
    (lambda d: d["vertices"][1].update(id="u"), "$.vertices[1].id"),
    (lambda d: d["vertices"][0].update(weight=-1), "$.vertices[0].weight"),
    (lambda d: d["vertices"].append({"id": "lonely"}), "$"),
])
def test_invalid_documents(mutate, path):
    doc = theta_doc()
    mutate(doc)
    with pytest.raises(DocumentError) as err:
        parse_document(doc)
    assert err.value.path == path


def test_missing_length_defaults_with_warning(caplog):
    doc = theta_doc()
    del doc["edges"][0]["length"]
    with caplog.at_level(logging.WARNING):
        c = parse_document(doc)
    assert c.lengths["a"] == 1
    assert "no length" in caplog.text


def test_file_roundtrip(tmp_path):
    path = tmp_path / "fig1.json"
    dump_curve(corpus.fig1(1, 3), path)
    assert load_curve(path) == corpus.fig1(1, 3)


def test_involution_roundtrip():
    c = corpus.fig1(2, 2)
    t = is_hyperelliptic(c)
    assert involution_from_json(json.loads(json.dumps(involution_to_json(t)))) == t


@pytest.mark.parametrize("name", ["k4", "l3", "b2", "fig1", "theta", "dumbbell"])
def test_certificate_roundtrip_reverifies(name):
    g = corpus.FIXTURES[name]()
    cert = is_hyperelliptic_type(g)
    data = json.loads(json.dumps(certificate_to_json(cert)))
    back = certificate_from_json(data)
    assert back.verdict == cert.verdict
    assert verify_certificate(g, back)


# ---------------------------------------------------------------- CLI

@pytest.fixture
def files(tmp_path):
    out = {}
    for name, make in corpus.FIXTURES.items():
        path = tmp_path / f"{name}.json"
        dump_curve(make(), path)
        out[name] = str(path)
    path = tmp_path / "fig1b.json"
    dump_curve(corpus.fig1(2, 2), path)
    out["fig1b"] = str(path)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_cli_k4_check(capsys, files):
    code, doc, _ = run(capsys, files["k4"], "--check")
    assert code == 1
    assert doc["hyperelliptic_type"] is False
    assert doc["minor"]["pattern"] == "K4"


def test_cli_positive_certificate_reverifies(capsys, files):
    code, doc, _ = run(capsys, "hyptype", files["b2"], "--check")
    assert code == 0
    assert verify_certificate(corpus.b2(), certificate_from_json(doc))


def test_cli_jacobian_compare(capsys, files):
    code, doc, _ = run(capsys, "jacobian", "--compare", files["fig1"], files["fig1b"])
    assert code == 0 and doc["isomorphic"] is True
    code, doc, _ = run(capsys, "jacobian", files["theta"], "--gram")
    assert doc["determinant"] == "3" and doc["spanning_tree_sum"] == "3"
    assert len(doc["gram"]) == 2


def test_cli_connectivize_cycle(capsys, files):
    code, doc, _ = run(capsys, "connectivize", "--level", "3", files["cycle5"])
    assert code == 0
    assert len(doc["result"]["edges"]) == 1
    assert len(doc["psi"]) == 5 and len(set(doc["psi"].values())) == 1


def test_cli_analyze(capsys, files):
    code, doc, _ = run(capsys, "analyze", files["dumbbell"])
    assert doc["genus"] == 2 and doc["stable"] is True and doc["d"] == 0
    assert doc["separating_edges"] == ["bar"]
    assert sorted(doc["c1_sets"]) == [["l"], ["r"]]


def test_cli_minor(capsys, files, tmp_path):
    code, doc, _ = run(capsys, "minor", files["prism"], "--pattern", "k4", "--check")
    assert code == 1 and doc["model"]["pattern"] == "K4"
    code, doc, _ = run(capsys, "minor", files["b2"], "--pattern", "l3")
    assert code == 0 and doc["model"] is None
    code, doc, _ = run(capsys, "minor", files["k4"], "--pattern", files["theta"])
    assert doc["model"] is not None


def test_cli_ears_and_quotient(capsys, files, tmp_path):
    code, doc, _ = run(capsys, "ears", files["b2"], "--stage", "hed")
    assert doc["added_edges"] == ["f0"]
    inv = tmp_path / "inv.json"
    inv.write_text(json.dumps(doc["involution"]))
    graph = tmp_path / "hed.json"
    graph.write_text(json.dumps(doc["hyperelliptic_curve"]))
    code, q, _ = run(capsys, "quotient", str(graph), "--involution", str(inv))
    assert q["is_tree"] is True
    code, doc, _ = run(capsys, "ears", files["k4"], "--check")
    assert code == 1 and doc["decomposition"] is None


def test_cli_hyperelliptic(capsys, files):
    code, doc, _ = run(capsys, "hyperelliptic", files["theta"], "--involutions")
    assert doc["hyperelliptic"] is True and len(doc["involutions"]) == 8
    code, doc, _ = run(capsys, "hyperelliptic", files["b2"], "--check")
    assert code == 1 and doc["involution"] is None


def test_cli_gen_deterministic(capsys, monkeypatch):
    _, a, _ = run(capsys, "gen", "--seed", "5", "--genus", "3", "--max-edges", "8")
    _, b, _ = run(capsys, "gen", "--seed", "5", "--genus", "3", "--max-edges", "8")
    assert a == b
    monkeypatch.setenv("HYPTYPE_SEED", "5")
    _, c, _ = run(capsys, "gen", "--genus", "3", "--max-edges", "8")
    assert c == a
    assert parse_document(a).genus == 3


def test_cli_sweep_order_and_workers(capsys, files):
    paths = [files[n] for n in ("k4", "theta", "b2", "l3", "fig1")]
    code, one, _ = run(capsys, "sweep", *paths)
    code2, two, _ = run(capsys, "sweep", *paths, "--workers", "2")
    assert code == code2 == 0
    assert one == two
    assert [r["name"] for r in one["records"]] == paths
    assert [r["minor_verdict"] for r in one["records"]] == [False, True, True, False, True]


def test_cli_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [{"id": "a"}], "edges": [{"id": "x", "ends": ["a", "b"]}]}')
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "$.edges[0].ends[1]" in err
    code, _, _ = run(capsys, "analyze", str(tmp_path / "missing.json"))
    assert code == 2
    ladder = {}
    for i in range(6):
        ladder[f"a{i}"] = (f"x{i}", f"x{(i + 1) % 6}")
        ladder[f"b{i}"] = (f"y{i}", f"y{(i + 1) % 6}")
        ladder[f"r{i}"] = (f"x{i}", f"y{i}")
    big = tmp_path / "ladder.json"
    dump_curve(make_graph(ladder), big)
    code, _, err = run(capsys, "minor", str(big), "--pattern", "l3")
    assert code == 3 and "size guard" in err


def test_cli_verbose_goes_to_stderr(capsys, files):
    code, doc, err = run(capsys, "-v", "hyptype", files["theta"])
    assert doc["hyperelliptic_type"] is True
    assert "hyperelliptic type: True" in err


def test_corpus_fixture_files_parse(files):
    for name, path in files.items():
        if name in corpus.FIXTURES:
            expected = as_curve(corpus.FIXTURES[name]())
            assert are_isomorphic(load_curve(path), expected, use_lengths=True)
