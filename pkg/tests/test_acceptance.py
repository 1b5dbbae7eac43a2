"""Exit criteria for the package, one test per criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line for each.
"""

import copy
import json
import time
from math import gcd

import pytest

from manyroot.analysis import sweep_params
from manyroot.cli import main
from manyroot.errors import TagIncompatibleError
from manyroot.protocol import adversary_candidates, adversary_factor_leak, run_scenario
from manyroot.tagcodec import tag_decode, tag_encode
from manyroot.transform import (
    check_property1,
    find_factor,
    make_params,
    product_of_roots,
    roots_crt,
    table_root_classes,
)

from scenario_gen import random_scenario, safety_violations

criterion = pytest.mark.criterion


def scan_classes(ps):
    """Independent oracle: one pass of builtin pow over every residue."""
    out = {}
    for m in range(ps.n):
        out.setdefault(pow(m, ps.x, ps.n), []).append(m)
    return {c: tuple(r) for c, r in out.items()}


@pytest.fixture(scope="module")
def desk_sweep():
    sets = sweep_params(50, 25)
    return [(ps, scan_classes(ps)) for ps in sets]


@criterion(1, "n=55 cipher map from `tables` matches the golden 54 rows, under 1 s")
def test_table1(capsys, golden_cipher_map):
    start = time.perf_counter()
    code = main(["tables", "--p", "5", "--q", "11", "--x", "5", "--format", "csv"])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    lines = out.split("\n\n")[0].splitlines()
    rows = [tuple(map(int, ln.split(","))) for ln in lines[1:]]
    assert code == 0 and lines[0] == "m,c"
    assert rows == golden_cipher_map and len(rows) == 54
    for anchor in [(2, 32), (13, 43), (19, 54), (40, 10), (44, 44)]:
        assert anchor in rows
    assert elapsed < 1.0


@criterion(2, "n=55 root classes for C in {1,23,32,34,45} match exactly")
def test_table2(n55, golden_classes):
    classes = dict(table_root_classes(n55))
    assert set(golden_classes) == {1, 23, 32, 34, 45}
    for c, roots in golden_classes.items():
        assert classes[c] == roots
        assert list(roots) == sorted(roots)


@criterion(3, "Worked example: 48-23 = 5*P, F = 16, product = 23")
def test_worked_example(n55):
    rc = roots_crt(23, n55)
    assert rc.roots == (3, 23, 38, 48, 53)
    pair = next(pc for pc in check_property1(rc, n55).pairs if (pc.a, pc.b) == (23, 48))
    assert pair.difference == 25 == 5 * n55.p
    assert find_factor(3, 48, n55) == 16
    assert 16 * 23 % 55 == 38 == find_factor(23, 38, n55) * 23 % 55
    assert product_of_roots(rc, n55) == (23, True)


@criterion(4, "roots_crt equals brute force on every cipher, p<q<=50, x<=25, under 60 s")
def test_oracle_equivalence():
    start = time.perf_counter()
    sets = sweep_params(50, 25)
    assert len(sets) == 866
    mismatches = 0
    for ps in sets:
        oracle = scan_classes(ps)
        for c in range(ps.n):
            mismatches += roots_crt(c, ps).roots != oracle.get(c, ())
    assert mismatches == 0
    assert time.perf_counter() - start < 60


@criterion(5, "Root-count law; exactly x roots under the prime-x regime")
def test_root_count_law(desk_sweep):
    violations = regime_violations = regime_sets = 0
    for ps, classes in desk_sweep:
        law = gcd(ps.x, ps.p - 1) * gcd(ps.x, ps.q - 1)
        for c, roots in classes.items():
            if gcd(c, ps.n) == 1:
                violations += len(roots) != law
            if ps.paper_regime and gcd(c, ps.q) != ps.q:
                regime_violations += len(roots) != ps.x
        regime_sets += ps.paper_regime
    assert regime_sets > 0
    assert violations == 0 and regime_violations == 0


@criterion(6, "Tag round trip on every tag-compatible set; (7,11,5) is rejected")
def test_tag_round_trip(desk_sweep):
    compatible = 0
    for ps, classes in desk_sweep:
        if not ps.tag_compatible:
            continue
        compatible += 1
        for c, roots in classes.items():
            for m in roots:
                assert tag_decode(tag_encode(m, c, ps.p).tag, c, ps.p, ps.n) == m
    assert compatible > 0
    ps = make_params(7, 11, 5)
    failures = 0
    for c, roots in scan_classes(ps).items():
        for m in roots:
            try:
                tag_encode(m, c, ps.p)
            except TagIncompatibleError:
                failures += 1
    assert failures > 0


@criterion(7, "Product of roots = cipher for every x-root unit class with odd x")
def test_property3_boundary(desk_sweep):
    odd_failures = 0
    even_total = even_equal = 0
    for ps, classes in desk_sweep:
        for c, roots in classes.items():
            if gcd(c, ps.n) != 1 or len(roots) != ps.x:
                continue
            prod = 1
            for r in roots:
                prod = prod * r % ps.n
            if ps.x % 2:
                odd_failures += prod != c
            else:
                even_total += 1
                even_equal += prod == c
    print(f"even x: {even_equal}/{even_total} x-root classes multiply back to c")
    assert odd_failures == 0


def _granting_steps(doc):
    """Indices of db_access steps that end in a grant."""
    out = []
    for i in range(len(doc["steps"])):
        if doc["steps"][i]["op"] != "db_access":
            continue
        prefix = dict(doc, steps=doc["steps"][: i + 1])
        if run_scenario(prefix)[-1].kind == "db_grant":
            out.append(i)
    return out


@criterion(8, "No unsafe grant in 100 random scenarios; withholding a second tag denies")
def test_protocol_safety():
    grants = flips = 0
    for seed in range(100):
        doc = random_scenario(seed)
        events = run_scenario(doc)
        assert safety_violations(doc, events) == [], seed
        for i in _granting_steps(doc):
            grants += 1
            for uid in doc["steps"][i]["users"]:
                mutated = copy.deepcopy(doc)
                mutated["steps"] = mutated["steps"][: i + 1]
                mutated["steps"][i]["withhold"] = [uid]
                last = run_scenario(mutated)[-1]
                assert last.kind == "db_deny", (seed, i, uid)
                flips += 1
    assert grants >= 20 and flips == 2 * grants


@criterion(9, "simulate is byte-identical across runs")
def test_determinism(tmp_path, scenario_path):
    outs = []
    for k in range(3):
        path = tmp_path / f"t{k}.jsonl"
        assert main(["simulate", str(scenario_path("example_n55")), "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    assert json.loads(outs[0].splitlines()[-1])["kind"] == "db_grant"


@criterion(10, "Eavesdropper sees 5 candidates for C=23; (38,23,7) leaks p=5")
def test_ambiguity_and_leak():
    count, cands = adversary_candidates(23, (55, 5))
    assert count == 5 and cands == (3, 23, 38, 48, 53)
    assert adversary_factor_leak([(38, 23, 7)], 55) == 5
    assert adversary_factor_leak([(38, 23, 7)]) == 5
