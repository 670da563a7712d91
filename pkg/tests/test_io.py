import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vircoh.graded_ring import make_cp
from vircoh.inertia import build_scenario_cpn_zp, build_scenario_symprod2, check_homomorphism
from vircoh.scenario_io import (
    FormatError,
    load_scenario,
    parse_group_arg,
    parse_manifold_arg,
    presentation_from_json,
    ring_from_spec,
    scenario_from_json,
    scenario_to_json,
    scenarios_equal,
)


def test_manifold_args():
    assert parse_manifold_arg("cp:2") == {"kind": "cp", "m": 2}
    assert parse_manifold_arg("sphere:1,sphere:1") == {
        "kind": "tensor", "factors": [{"kind": "even_sphere", "k": 1}, {"kind": "even_sphere", "k": 1}]}
    assert ring_from_spec(parse_manifold_arg("sphere:1,sphere:1")).dim == 4
    for bad in ("cq:1", "cp:x", "file:/nonexistent.json"):
        with pytest.raises(FormatError):
            parse_manifold_arg(bad)


def test_group_args():
    assert parse_group_arg("cyclic:5") == {"kind": "cyclic", "p": 5}
    with pytest.raises(FormatError):
        parse_group_arg("dihedral:4")


@given(st.integers(1, 3), st.integers(2, 5), st.booleans())
def test_cpn_zp_roundtrip(n, p, pts):
    sc = build_scenario_cpn_zp(n, p, pts)
    obj = json.loads(json.dumps(scenario_to_json(sc)))
    back = scenario_from_json(obj)
    assert scenarios_equal(sc, back)


@pytest.mark.parametrize("m", [1, 2])
def test_symprod2_roundtrip_keeps_behaviour(m, tmp_path):
    sc = build_scenario_symprod2(make_cp(m))
    path = tmp_path / "s.json"
    path.write_text(json.dumps(scenario_to_json(sc)))
    back = load_scenario(str(path))
    assert scenarios_equal(sc, back)
    assert check_homomorphism(back).passed


def _obj():
    return json.loads(json.dumps(scenario_to_json(build_scenario_cpn_zp(2, 3, True))))


def test_error_locations():
    obj = _obj()
    obj["components"][1]["push"] = [["1", "0"]]
    with pytest.raises(FormatError, match=r"components\[1\]"):
        scenario_from_json(obj)
    obj = _obj()
    obj["pairs"][0]["intersections"][0]["euler"] = {"nope": "1"}
    with pytest.raises(FormatError, match=r"pairs\[0\]"):
        scenario_from_json(obj)
    obj = _obj()
    obj["group"] = {"kind": "cyclic", "p": 10**6}
    with pytest.raises(FormatError, match="group"):
        scenario_from_json(obj)
    obj = _obj()
    obj["pairs"] = obj["pairs"][1:]
    with pytest.raises(FormatError, match="scenario"):
        scenario_from_json(obj)


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "group": ,\n}')
    with pytest.raises(FormatError, match="line 2"):
        load_scenario(str(path))


def test_structured_relations():
    obj = {"generators": [{"name": "w", "deg": 2}, {"name": "u", "deg": 2}],
           "relations": ["w^3", [{"coef": "1", "monomial": {"u": 2}}, {"coef": "-1", "monomial": {"w": 2}}]]}
    p = presentation_from_json(obj)
    assert p.relations[1] == {(0, 2): 1, (2, 0): -1}
    obj["relations"].append([{"coef": "1", "monomial": {"q": 1}}])
    with pytest.raises(FormatError, match=r"relations\[2\]"):
        presentation_from_json(obj)
