import json

import pytest

import globalcsp as g

TWO_TABLES = json.dumps({
    "variables": [
        {"name": "x", "domain": ["0", "1"]},
        {"name": "y", "domain": ["0", "1"]},
    ],
    "constraints": [
        {"kind": "table", "label": "t1", "scope": ["x", "y"],
         "rows": [["0", "0"], ["1", "1"]]},
        {"kind": "table", "label": "t2", "scope": ["y"], "rows": [["1"]]},
    ],
})

EGC3 = json.dumps({
    "variables": [
        {"name": "x1", "domain": ["a", "b"]},
        {"name": "x2", "domain": ["a", "b"]},
        {"name": "x3", "domain": ["a", "b"]},
    ],
    "constraints": [
        {"kind": "egc", "label": "g", "scope": ["x1", "x2", "x3"],
         "cardinality": {"a": [1, 1], "b": [0, 3]}},
    ],
})

WEIGHTED = json.dumps({
    "variables": [
        {"name": "x", "domain": ["0", "1"]},
        {"name": "y", "domain": ["0", "1"]},
    ],
    "constraints": [
        {"kind": "table", "label": "w", "scope": ["x", "y"],
         "rows": [["0", "0"], ["0", "1"], ["1", "1"]],
         "costs": ["3", "1", "2"]},
    ],
})

TRIANGLE = json.dumps({
    "vertices": ["v1", "v2", "v3"],
    "edges": [["v1", "v2"], ["v2", "v3"], ["v1", "v3"]],
})

K4 = json.dumps({
    "vertices": ["v1", "v2", "v3", "v4"],
    "edges": [["v1", "v2"], ["v1", "v3"], ["v1", "v4"],
              ["v2", "v3"], ["v2", "v4"], ["v3", "v4"]],
})


def test_solve_finds_the_unique_solution():
    assert g.solve(TWO_TABLES) == {"x": "1", "y": "1"}


def test_enumerate_and_count_agree():
    sols, cap_hit = g.enumerate_solutions(EGC3)
    assert not cap_hit
    assert len(sols) == 3
    assert g.count_solutions(EGC3) == 3
    for s in sols:
        assert sorted(v for v in s.values()).count("a") == 1


def test_count_respects_cap():
    assert g.count_solutions(EGC3, cap=2) is None


def test_reduce_yields_equivalent_classic_instance():
    classic = g.reduce_to_classic(EGC3, 2)
    assert g.count_solutions(classic) == 3
    assert json.loads(classic)["constraints"]


def test_check_sparse_verdict():
    assert g.check_sparse(EGC3, 2)["verdict"] == "sparse"


def test_instance_size_and_solution_bound():
    assert g.instance_size(TWO_TABLES) > 0
    assert int(g.solution_bound(EGC3)) >= 3


def test_wcsp_optimal_and_decision():
    res = g.wcsp_optimal(WEIGHTED)
    assert res["cost"] == "1"
    assert res["assignment"] == {"x": "0", "y": "1"}
    assert g.wcsp_decision(WEIGHTED, "1")
    assert not g.wcsp_decision(WEIGHTED, "2/3")


def test_weighted_input_rejected_by_solve():
    with pytest.raises(g.ApplicabilityError):
        g.solve(WEIGHTED)


def test_widths_of_a_triangle():
    tri = json.dumps({"vertices": ["a", "b", "c"],
                      "edges": [["a", "b"], ["b", "c"], ["a", "c"]]})
    assert g.treewidth(tri) == "2"
    assert g.ghw(tri) == "2"
    assert g.fhw(tri) == "3/2"


def test_encodings_match_oracles():
    assert g.three_colourable(TRIANGLE)
    assert not g.three_colourable(K4)
    enc = g.encode_3col(TRIANGLE)
    assert g.count_solutions(enc) == 6
    assert g.cgp_oracle(TRIANGLE, 3, 3)
    assert not g.cgp_oracle(TRIANGLE, 1, 1)
    sols, _ = g.enumerate_solutions(g.encode_cgp(TRIANGLE, 3, 3))
    assert sols


def test_parse_error_surfaces():
    with pytest.raises(g.ParseError):
        g.solve("{not json")


def test_cli_runs_in_process(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(TWO_TABLES)
    code, out, err = g.run(["solve", str(path)])
    assert code == 0
    report = json.loads(out)
    assert report["verdict"] == "sat"
    assert report["witness"] == {"x": "1", "y": "1"}
    assert set(report) == {"verdict", "witness", "stats"}

    code, out, _ = g.run(["wcsp", str(path), "--decision", "0"])
    assert code == 0 and json.loads(out)["verdict"] == "yes"

    code, _, err = g.run(["solve", str(tmp_path / "missing.json")])
    assert code == 2
