"""End-to-end tests for the `ggraph` command line interface.

Everything runs in-process through cli.run() so exit codes and both output
streams are observable without spawning subprocesses.
"""

import io
import json

import pytest

from ggraphs.algebra import parse_group
from ggraphs.cli import run
from ggraphs.ggraph import build_phi
from ggraphs.ikn import TauCertificate
from ggraphs.multigraph import import_json
from ggraphs.recognition import shifts_of, witness_to_json
from ggraphs.multigraph import export_json


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


# ---------------------------------------------------------------------------
# exit code contract


def test_ikn_verify_valid_certificate():
    code, out, err = cli("ikn", "verify", "5", "--tau", "(2 3)(4 5)")
    assert code == 0
    assert "valid certificate" in out
    # fixed points are written out even when the input omitted them
    assert "tau: (1)(2,3)(4,5)" in out
    assert out.startswith("format: 1\n")
    assert err == ""


def test_ikn_verify_invalid_certificate():
    code, out, _ = cli("ikn", "verify", "8", "--tau", "(1,2)(3,6)(4,5)(7,8)")
    assert code == 1
    assert "invalid certificate" in out
    assert "relation fails at k=" in out


def test_ikn_search_obstruction_exit_one():
    code, out, _ = cli("ikn", "search", "6")
    assert code == 1
    assert "no certificate" in out
    assert "Mod6" in out
    assert "Mod4" in out


def test_usage_errors_exit_three():
    for argv in (
        ["ikn", "verify", "5"],  # missing --tau
        ["definitely-not-a-command"],
        ["build", "-g", "Z6"],  # missing -s
        ["build", "-g", "Zoup", "-s", "1"],  # bad group spec
        ["build", "-g", "Z6", "-s", ""],  # empty generator list
        ["ikn", "verify", "1", "--tau", "(1)"],  # n < 2
        ["kmn", "100", "100", "4"],  # precondition: table too large
    ):
        code, _, err = cli(*argv)
        assert code == 3, argv
        assert err != "", argv


def test_budget_exhaustion_exit_two():
    code, _, err = cli("ikn", "search", "13", "--budget", "3")
    assert code == 2
    assert "inconclusive" in err


def test_necessary_budget_exhaustion_exit_two():
    code, _, err = cli(
        "bipartite-test", "-g", "Z2xZ2", "-s", "(1,0)", "-t", "(0,1)",
        "--necessary", "--budget", "0",
    )
    assert code == 2
    assert "inconclusive" in err


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("GGRAPH_BUDGET", "3")
    code, _, _ = cli("ikn", "search", "13")
    assert code == 2
    # an explicit --budget wins over the environment
    code, out, _ = cli("ikn", "search", "13", "--budget", "1000000")
    assert code == 0
    assert "certificate found" in out


# ---------------------------------------------------------------------------
# determinism and JSON round-trips


INVOCATIONS = (
    ("build", "-g", "Z6", "-s", "2,3"),
    ("build", "-g", "Z6", "-s", "2,3", "-o", "json"),
    ("build", "-g", "S3", "-s", "(1,2),(2,3)", "-o", "dot"),
    ("verify", "-g", "Z2xZ4", "-s", "(1,0),(0,1)"),
    ("components", "-g", "Z8", "-s", "2,4"),
    ("kmn", "2", "3", "2", "-o", "json"),
    ("incidence", "build", "-g", "Z6", "-s", "2,3", "-o", "json"),
    ("incidence", "preimage", "-g", "Z6", "-s", "2,3"),
    ("bipartite-test", "-g", "Z2xZ2", "-s", "(1,0)", "-t", "(0,1)", "-o", "json"),
    ("ikn", "search", "9", "--all"),
    ("ikn", "table", "8"),
)


def test_identical_invocations_are_byte_identical():
    for argv in INVOCATIONS:
        first = cli(*argv)
        second = cli(*argv)
        assert first == second, argv


def test_json_outputs_reimport():
    # graph-shaped payloads go back through the multigraph reader
    for argv in (
        ("build", "-g", "Z6", "-s", "2,3", "-o", "json"),
        ("build", "-g", "Z6", "-s", "2,3", "--loops", "-o", "json"),
        ("kmn", "2", "3", "2", "-o", "json"),
        ("incidence", "build", "-g", "Z6", "-s", "2,3", "-o", "json"),
        ("incidence", "preimage", "-g", "S3", "-s", "(1,2),(2,3)", "-o", "json"),
    ):
        _, out, _ = cli(*argv)
        g = import_json(out)
        assert g.n_vertices > 0, argv


def test_ikn_search_json_reimports():
    code, out, _ = cli("ikn", "search", "9", "--all", "-o", "json")
    assert code == 0
    data = json.loads(out)
    assert data["format"] == 1
    assert data["complete"] is True
    assert data["nodes"] > 0
    assert len(data["certificates"]) == 2
    for entry in data["certificates"]:
        cert = TauCertificate.from_json(entry)
        assert cert.n == 9
    assert data["obstructions"] == []


def test_ikn_search_json_negative():
    code, out, _ = cli("ikn", "search", "10", "-o", "json")
    assert code == 1
    data = json.loads(out)
    assert data["certificates"] == []
    assert [o["kind"] for o in data["obstructions"]] == ["Mod4"]
    assert data["complete"] is True


def test_bipartite_test_json_witness_schema():
    _, out, _ = cli(
        "bipartite-test", "-g", "Z2xZ2", "-s", "(1,0)", "-t", "(0,1)", "-o", "json"
    )
    data = json.loads(out)
    assert data["found"] is True
    assert set(data["witness"]) == {"f", "involutive", "homomorphism"}
    assert data["witness"]["f"] == [0, 2, 1, 3]


# ---------------------------------------------------------------------------
# summary contents


def test_build_summary_fields():
    code, out, _ = cli("build", "-g", "Z6", "-s", "2,3")
    assert code == 0
    assert "graph: Phi(Z6, {2, 3})" in out
    assert "vertices: 5" in out
    assert "edges: 6" in out
    assert "simple: yes" in out
    assert "connected: yes" in out


def test_build_loops_summary():
    code, out, _ = cli("build", "-g", "Z6", "-s", "2,3", "--loops")
    assert code == 0
    assert "graph: Psi(Z6, {2, 3})" in out
    assert "edges: 18" in out  # 6 plain + 2*3 + 3*2 loops


def test_verify_pass_and_counts():
    code, out, _ = cli("verify", "-g", "S3", "-s", "(1,2),(2,3)")
    assert code == 0
    assert "result: PASS (5/5)" in out
    assert out.count("[PASS]") == 5


def test_components_summary():
    code, out, _ = cli("components", "-g", "Z8", "-s", "2,4")
    assert code == 0
    assert "components: 2 (expected 2)" in out
    assert "all isomorphic to reference: yes" in out


def test_kmn_summary_matches_plan():
    code, out, _ = cli("kmn", "2", "3", "1")
    assert code == 0
    assert "group: Z2xZ3 (order 6)" in out
    assert "parts: (2, 3)" in out
    assert "multiplicity: 1" in out
    assert "verified: yes" in out


def test_incidence_build_summary_counts():
    # |V(I)| = |V| + |E|, |E(I)| = 2|E| for a loopless source
    code, out, _ = cli("incidence", "build", "-g", "Z6", "-s", "2,3")
    assert code == 0
    assert "vertices: 11" in out
    assert "edges: 12" in out
    assert "source loops present: no" in out


def test_incidence_preimage_summary():
    code, out, _ = cli("incidence", "preimage", "-g", "S3", "-s", "(1,2),(2,3)")
    assert code == 0
    assert "vertices: 3" in out
    assert "isomorphism to incidence graph verified: yes" in out


def test_bipartite_default_is_sufficient():
    code, out, _ = cli("bipartite-test", "-g", "Z2xZ2", "-s", "(1,0)", "-t", "(0,1)")
    assert code == 0
    assert "test: sufficient" in out
    assert "f: [0, 2, 1, 3]" in out


def test_bipartite_necessary_refutation():
    code, out, _ = cli("bipartite-test", "-g", "Z6", "-s", "2", "-t", "3", "--necessary")
    assert code == 1
    assert "not a G-graph" in out


def test_bipartite_sufficient_inconclusive_negative():
    code, out, _ = cli("bipartite-test", "-g", "Z6", "-s", "2", "-t", "3")
    assert code == 1
    assert "no endomorphism witness" in out


def test_ikn_table_lines():
    code, out, _ = cli("ikn", "table", "9")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "format: 1"
    body = dict(line.split(": ", 1) for line in lines[1:])
    for n in (2, 3, 4, 5, 7, 8, 9):
        assert body["n=%d" % n].startswith("certificate ")
    assert body["n=6"] == "no certificate [Mod4, Mod6]"


def test_ikn_search_modes_agree():
    _, first, _ = cli("ikn", "search", "9")
    _, everything, _ = cli("ikn", "search", "9", "--all")
    first_tau = [l for l in first.splitlines() if l.startswith("tau:")]
    all_taus = [l for l in everything.splitlines() if l.startswith("tau:")]
    assert len(all_taus) == 2
    assert first_tau[0] == all_taus[0]
    code, canon, _ = cli("ikn", "search", "9", "--canonical")
    assert code == 0
    canon_taus = [l for l in canon.splitlines() if l.startswith("tau:")]
    assert len(canon_taus) == 1
    assert "canonical: yes" in canon


def test_ikn_search_exhaustive_flag():
    # with --exhaustive the modular short-circuit is skipped and the search
    # itself certifies emptiness
    code, out, _ = cli("ikn", "search", "6", "--exhaustive")
    assert code == 1
    assert "ExhaustiveSearch" in out
    lines = [l for l in out.splitlines() if l.startswith("nodes:")]
    assert lines == ["nodes: 4"]


def test_dot_output_shape():
    code, out, _ = cli("build", "-g", "Z4", "-s", "1,2", "-o", "dot")
    assert code == 0
    assert out.startswith("graph {")
    assert out.rstrip().endswith("}")


# ---------------------------------------------------------------------------
# recognize


@pytest.fixture()
def hexagon_files(tmp_path):
    gg = build_phi(parse_group("Z6"), [2, 3])
    w = shifts_of(gg)
    gpath = tmp_path / "graph.json"
    wpath = tmp_path / "witness.json"
    gpath.write_text(json.dumps(export_json(gg.graph)))
    wpath.write_text(json.dumps(witness_to_json(gg.graph, w)))
    return gg, str(gpath), str(wpath)


def test_recognize_from_files_with_reconstruct(hexagon_files):
    _, gpath, wpath = hexagon_files
    code, out, _ = cli("recognize", "--graph", gpath, "--witness", wpath,
                       "--reconstruct")
    assert code == 0
    assert "decision: G-graph witness verified" in out
    assert "reconstructed group: order 6" in out
    assert "generator orders: [3, 2]" in out
    assert "isomorphism verified: yes" in out


def test_recognize_inline_json(hexagon_files):
    gg, _, _ = hexagon_files
    w = shifts_of(gg)
    code, out, _ = cli(
        "recognize",
        "--graph", json.dumps(export_json(gg.graph)),
        "--witness", json.dumps(witness_to_json(gg.graph, w)),
    )
    assert code == 0
    assert "decision: G-graph witness verified" in out


def test_recognize_bad_witness_exit_one(hexagon_files):
    gg, gpath, _ = hexagon_files
    w = shifts_of(gg)
    data = witness_to_json(gg.graph, w)
    data["H_generators"] = data["H_generators"][:1]  # identity only
    code, out, _ = cli("recognize", "--graph", gpath, "--witness", json.dumps(data))
    assert code == 1
    assert "not verified" in out
    assert "FAIL" in out


def test_recognize_missing_file_exit_three(tmp_path):
    code, _, err = cli(
        "recognize", "--graph", str(tmp_path / "nope.json"), "--witness", "{}"
    )
    assert code == 3
    assert "cannot read" in err


def test_leading_program_name_tolerated():
    code, out, _ = cli("ggraph", "ikn", "verify", "5", "--tau", "(2,3)(4,5)")
    assert code == 0
    assert "valid certificate" in out
