from manyroot.analysis import check_properties, property1_predicted, sweep, sweep_params
from manyroot.transform import make_params


def test_check_n55_all_hold(n55):
    rep = check_properties(n55)
    assert rep["holds"] and rep["verdicts"] == {"1": True, "2": True, "3": True}
    full = {row["c"]: row for row in rep["classes"] if row["full"]}
    assert sorted(full) == [1, 12, 21, 23, 32, 34, 43, 54]
    assert full[23]["property3"] == {"product": 23, "equals_cipher": True}
    # 37 = 3^-1 mod 55; 23*37, 38*37, 48*37, 53*37 reduce to 26, 31, 16, 36
    assert full[23]["property2"]["factors"] == [1, 26, 31, 16, 36]


def test_check_table2_property3(n55):
    rep = check_properties(n55, [3])
    by_c = {row["c"]: row for row in rep["classes"]}
    for c in (1, 23, 32, 34):
        assert by_c[c]["property3"]["equals_cipher"]
    # 45 = 5*9 is not a unit; its class is listed in tables but not checked here
    assert 45 not in by_c


def test_check_n91_property1_fails():
    rep = check_properties(make_params(7, 13, 3), [1])
    assert not rep["holds"]
    assert all(row["property1"]["violations"] for row in rep["classes"] if len(row["roots"]) > 1)


def test_include_sub_extends_checks():
    ps = make_params(7, 13, 3)
    base = check_properties(ps, [3])
    assert base["holds"] and not any("property3" in r for r in base["classes"])
    extended = check_properties(ps, [3], include_sub=True)
    assert not extended["holds"]


def test_sweep_params_enumeration():
    assert [(s.p, s.q, s.x) for s in sweep_params(3)] == [(2, 3, 2)]
    assert all(s.phi % s.x == 0 and s.x <= 25 for s in sweep_params(50, 25))
    assert len(sweep_params(50, 25)) == 866


def test_sweep_small():
    rep = sweep(11)
    assert rep["laws_hold"]
    entry = next(e for e in rep["entries"] if (e["p"], e["q"], e["x"]) == (5, 11, 5))
    assert entry["paper_regime"] and entry["property1"]["holds"]
    assert entry["property3"]["full_unit_classes"] == entry["property3"]["full_equal"] == 8
    assert entry["root_count"]["expected"] == 5


def test_sweep_flags_n91():
    rep = sweep(13)
    entry = next(e for e in rep["entries"] if (e["p"], e["q"], e["x"]) == (7, 13, 3))
    assert not entry["property1"]["holds"] and not entry["property1"]["predicted"]
    assert entry["property1"]["violating_classes"] > 0


def test_sweep_to_3():
    rep = sweep(3)
    assert rep["summary"]["param_sets"] == 1
    assert (rep["entries"][0]["p"], rep["entries"][0]["q"], rep["entries"][0]["x"]) == (2, 3, 2)


def test_property1_predicted():
    assert property1_predicted(make_params(5, 11, 5))
    assert not property1_predicted(make_params(7, 13, 3))


def test_sweep_laws_hold_to_23():
    rep = sweep(23)
    assert rep["laws_hold"], rep["summary"]
    assert rep["summary"]["property1_failing_sets"] > 0
