"""Batch property checks and the parameter sweep.

Both produce plain dicts ready for ``json.dumps``. Per-class results are
computed from a brute-force scan of the whole residue ring, so these are
oracle-scale tools only.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable

from .errors import TagIncompatibleError
from .modmath import is_prime
from .tagcodec import tag_decode, tag_encode
from .transform import (
    ParamSet,
    RootClass,
    bruteforce_classes,
    check_property1,
    derive_root,
    expected_root_count,
    find_factor,
    is_full_unit_class,
    is_unit_class,
    make_params,
    product_of_roots,
    roots_crt,
    roots_of_unity,
)


def _classes(params: ParamSet) -> list[RootClass]:
    unity = roots_of_unity(params)
    out = []
    for c, roots in bruteforce_classes(params).items():
        out.append(RootClass(c, roots, unity if gcd(c, params.n) == 1 else ()))
    return out


def property2_holds(rc: RootClass, params: ParamSet) -> tuple[bool, list[int]]:
    """Factors from the smallest root to each other root, and whether they
    are unity factors that regenerate the whole class."""
    unity = set(roots_of_unity(params))
    base = rc.roots[0]
    factors = [find_factor(base, r, params) for r in rc.roots]
    regenerated = {derive_root(base, f, params) for f in unity}
    return all(f in unity for f in factors) and regenerated == set(rc.roots), factors


def property1_predicted(params: ParamSet) -> bool:
    """Root differences stay multiples of p or q exactly when one side has a unique root."""
    return gcd(params.x, params.p - 1) == 1 or gcd(params.x, params.q - 1) == 1


def check_properties(
    params: ParamSet, properties: Iterable[int] = (1, 2, 3), include_sub: bool = False
) -> dict:
    """Run the selected property checks over a parameter set.

    Property 1 is checked on every unit class with at least two roots.
    Properties 2 and 3 are checked on unit classes with exactly ``x`` roots;
    ``include_sub`` extends them to the other unit classes.
    """
    selected = sorted(set(properties))
    classes = []
    verdicts = {str(k): True for k in selected}
    for rc in _classes(params):
        if not is_unit_class(rc, params):
            continue
        full = is_full_unit_class(rc, params)
        row: dict = {"c": rc.cipher, "roots": list(rc.roots), "full": full}
        if 1 in selected and len(rc.roots) >= 2:
            rep = check_property1(rc, params)
            row["property1"] = {
                "holds": rep.holds,
                "violations": [[v.a, v.b] for v in rep.violations],
            }
            verdicts["1"] &= rep.holds
        if full or include_sub:
            if 2 in selected:
                ok, factors = property2_holds(rc, params)
                row["property2"] = {"holds": ok, "factors": factors}
                verdicts["2"] &= ok
            if 3 in selected:
                prod = product_of_roots(rc, params)
                row["property3"] = {"product": prod.product, "equals_cipher": prod.equals_cipher}
                verdicts["3"] &= prod.equals_cipher
        classes.append(row)
    return {
        "params": params.to_dict(),
        "properties": selected,
        "include_sub": include_sub,
        "classes": classes,
        "verdicts": verdicts,
        "holds": all(verdicts.values()),
    }


def _tags_all_encode(params: ParamSet, classes: list[RootClass]) -> tuple[bool, bool]:
    """(every root encodes, every encoded root decodes back to itself)."""
    p = params.p
    for rc in classes:
        for m in rc.roots:
            try:
                tc = tag_encode(m, rc.cipher, p)
            except TagIncompatibleError:
                return False, True
            if tag_decode(tc.tag, tc.cipher, p, params.n) != m:
                return True, False
    return True, True


def sweep_entry(params: ParamSet) -> dict:
    classes = _classes(params)
    by_cipher = {rc.cipher: rc.roots for rc in classes}
    units = [rc for rc in classes if is_unit_class(rc, params)]
    expected = expected_root_count(params)

    count_violations = sum(len(rc.roots) != expected for rc in units)
    regime_violations = 0
    if params.paper_regime:
        regime_violations = sum(
            len(rc.roots) != params.x for rc in classes if rc.cipher % params.q != 0
        )
    oracle_mismatches = sum(
        roots_crt(c, params).roots != by_cipher.get(c, ()) for c in range(params.n)
    )
    encodable, round_trip = _tags_all_encode(params, classes)

    multi = [rc for rc in units if len(rc.roots) >= 2]
    p1_bad = sum(not check_property1(rc, params).holds for rc in multi)
    p1_holds = p1_bad == 0
    full = [rc for rc in units if len(rc.roots) == params.x]
    full_equal = sum(product_of_roots(rc, params).equals_cipher for rc in full)
    unit_equal = sum(product_of_roots(rc, params).equals_cipher for rc in units)

    return {
        "p": params.p,
        "q": params.q,
        "x": params.x,
        "n": params.n,
        "phi": params.phi,
        "tag_compatible": params.tag_compatible,
        "paper_regime": params.paper_regime,
        "oracle_mismatches": oracle_mismatches,
        "root_count": {
            "expected": expected,
            "unit_classes": len(units),
            "violations": count_violations,
            "paper_regime_violations": regime_violations,
        },
        "tags": {
            "all_roots_encode": encodable,
            "round_trip": round_trip,
            "law_holds": encodable == params.tag_compatible,
        },
        "property1": {
            "holds": p1_holds,
            "predicted": property1_predicted(params),
            "violating_classes": p1_bad,
        },
        "property3": {
            "odd_x": params.x % 2 == 1,
            "full_unit_classes": len(full),
            "full_equal": full_equal,
            "unit_classes": len(units),
            "unit_equal": unit_equal,
        },
    }


def sweep_params(max_prime: int, max_x: int | None = None) -> list[ParamSet]:
    primes = [k for k in range(2, max_prime + 1) if is_prime(k)]
    out = []
    for i, p in enumerate(primes):
        for q in primes[i + 1 :]:
            phi = (p - 1) * (q - 1)
            top = phi if max_x is None else min(phi, max_x)
            out.extend(make_params(p, q, x) for x in range(2, top + 1) if phi % x == 0)
    return out


def sweep(max_prime: int, max_x: int | None = None) -> dict:
    """Check every law over all valid (p, q, x) with ``p < q <= max_prime``.

    Even-x Property 3 outcomes are counted in the summary, not judged.
    """
    entries = [sweep_entry(ps) for ps in sweep_params(max_prime, max_x)]
    odd = [e for e in entries if e["property3"]["odd_x"]]
    even = [e for e in entries if not e["property3"]["odd_x"]]
    summary = {
        "param_sets": len(entries),
        "oracle_mismatches": sum(e["oracle_mismatches"] for e in entries),
        "root_count_violations": sum(e["root_count"]["violations"] for e in entries),
        "paper_regime_violations": sum(e["root_count"]["paper_regime_violations"] for e in entries),
        "tag_law_violations": sum(not e["tags"]["law_holds"] for e in entries),
        "tag_round_trip_failures": sum(not e["tags"]["round_trip"] for e in entries),
        "property1_prediction_mismatches": sum(
            e["property1"]["holds"] != e["property1"]["predicted"] for e in entries
        ),
        "property1_failing_sets": sum(not e["property1"]["holds"] for e in entries),
        "property3_odd_full_failures": sum(
            e["property3"]["full_unit_classes"] - e["property3"]["full_equal"] for e in odd
        ),
        "property3_even_full_classes": sum(e["property3"]["full_unit_classes"] for e in even),
        "property3_even_full_equal": sum(e["property3"]["full_equal"] for e in even),
    }
    laws_hold = not any(
        summary[k]
        for k in (
            "oracle_mismatches",
            "root_count_violations",
            "paper_regime_violations",
            "tag_law_violations",
            "tag_round_trip_failures",
            "property1_prediction_mismatches",
            "property3_odd_full_failures",
        )
    )
    return {
        "max_prime": max_prime,
        "max_x": max_x,
        "summary": summary,
        "laws_hold": laws_hold,
        "entries": entries,
    }
