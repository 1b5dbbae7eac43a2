import math

import pytest
from hypothesis import given, strategies as st

from manyroot.analysis import sweep_params
from manyroot.errors import MalformedTagError, TagIncompatibleError
from manyroot.tagcodec import TaggedCipher, tag_decode, tag_encode, verify_tagged
from manyroot.transform import bruteforce_classes, make_params


@pytest.mark.parametrize("m, c, p, t", [(38, 23, 5, 7), (3, 23, 5, 0), (47, 32, 5, 9)])
def test_encode_examples(m, c, p, t):
    assert tag_encode(m, c, p) == TaggedCipher(c, t)
    # independent evaluation of (m - (c mod p)) / p
    assert (m - c % p) / p == t


@pytest.mark.parametrize("t, c, p, m", [(7, 23, 5, 38), (0, 23, 5, 3), (10, 23, 5, 53)])
def test_decode_examples(t, c, p, m):
    assert tag_decode(t, c, p) == m


def test_encode_incompatible_names_residues():
    with pytest.raises(TagIncompatibleError) as exc:
        tag_encode(4, 23, 5)
    assert (exc.value.m_mod_p, exc.value.c_mod_p, exc.value.p) == (4, 3, 5)


def test_decode_overflow():
    with pytest.raises(MalformedTagError):
        tag_decode(11, 23, 5, 55)
    with pytest.raises(MalformedTagError):
        tag_decode(-1, 23, 5)


def test_verify_examples(n55):
    v = verify_tagged(TaggedCipher(23, 7), n55)
    assert v.accepted and v.root == 38
    v = verify_tagged(TaggedCipher(23, 8), n55)
    assert not v.accepted and v.root == 43 and v.reason == "not-a-root"
    v = verify_tagged(TaggedCipher(0, 0), n55)
    assert v.accepted and v.root == 0
    assert verify_tagged(TaggedCipher(23, 99), n55).reason == "malformed"
    assert verify_tagged(TaggedCipher(60, 0), n55).reason == "malformed"


def test_json_round_trip():
    tc = TaggedCipher(23, 7)
    assert tc.to_json() == '{"c":23,"t":7}'
    assert TaggedCipher.from_json(tc.to_json()) == tc
    with pytest.raises(MalformedTagError):
        TaggedCipher.from_json('{"c":-1,"t":0}')


def test_round_trip_exhaustive():
    for ps in sweep_params(23, 25):
        if not ps.tag_compatible:
            continue
        for c, roots in bruteforce_classes(ps).items():
            for m in roots:
                tc = tag_encode(m, c, ps.p)
                assert tc.tag < ps.n / ps.p
                assert tag_decode(tc.tag, c, ps.p, ps.n) == m


def test_integrality_law():
    for ps in sweep_params(23, 25):
        every_root_ok = True
        for c, roots in bruteforce_classes(ps).items():
            for m in roots:
                try:
                    tag_encode(m, c, ps.p)
                except TagIncompatibleError:
                    every_root_ok = False
        assert every_root_ok == ps.tag_compatible, ps


@pytest.mark.parametrize("args", [(5, 11, 5), (5, 31, 5), (2, 7, 3), (7, 13, 3)])
def test_accepted_tag_count_equals_class_size(args):
    ps = make_params(*args)
    for c, roots in bruteforce_classes(ps).items():
        accepted = [
            v.root
            for t in range(math.ceil(ps.n / ps.p))
            if (v := verify_tagged(TaggedCipher(c, t), ps)).accepted
        ]
        if ps.tag_compatible:
            assert sorted(accepted) == list(roots)
        else:
            assert set(accepted) <= set(roots)


@given(st.integers(0, 54))
def test_every_n55_message_round_trips(m):
    ps = make_params(5, 11, 5)
    c = m**5 % 55
    tc = tag_encode(m, c, 5)
    assert verify_tagged(tc, ps).root == m
