import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import hash_value, is_irreducible, poly_mul
from zklab.errors import DomainError, EnumerationLimitError
from zklab.fieldhash import (
    IRREDUCIBLE,
    AllFunctions,
    FieldElement,
    HashFamily,
    HashFunction,
    eval_hash,
    gf_mul,
    gf_mul_array,
    point_uniformity,
    sample_hash,
    universality_audit,
)


@pytest.mark.parametrize("m", sorted(IRREDUCIBLE))
def test_moduli_are_irreducible(m):
    assert IRREDUCIBLE[m].bit_length() - 1 == m
    assert is_irreducible(IRREDUCIBLE[m])


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8), st.data())
def test_gf_mul_matches_schoolbook(m, data):
    a = data.draw(st.integers(0, (1 << m) - 1))
    b = data.draw(st.integers(0, (1 << m) - 1))
    assert gf_mul(a, b, m) == poly_mul(a, b, IRREDUCIBLE[m])


def test_gf_mul_array_matches_scalar():
    m = 5
    a, b = np.meshgrid(np.arange(32), np.arange(32))
    out = gf_mul_array(a.ravel(), b.ravel(), m)
    assert all(out[i] == gf_mul(int(x), int(y), m) for i, (x, y) in enumerate(zip(a.ravel(), b.ravel())))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_field_has_inverses(m):
    for a in range(1, 1 << m):
        assert any(gf_mul(a, b, m) == 1 for b in range(1, 1 << m))


def test_field_element_ops():
    a, b = FieldElement(3, 2), FieldElement(2, 2)
    assert int(a + b) == 1
    assert int(a * b) == poly_mul(3, 2, IRREDUCIBLE[2])


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.data())
def test_hash_matches_reference(n1, n2, t, data):
    m = max(n1, n2)
    coeffs = tuple(data.draw(st.lists(st.integers(0, (1 << m) - 1), min_size=t, max_size=t)))
    h = HashFunction(coeffs, n1, n2)
    for alpha in range(1 << n1):
        assert eval_hash(h, alpha) == hash_value(coeffs, alpha, n2, IRREDUCIBLE[m])


def test_family_index_roundtrip_and_tables():
    fam = HashFamily(2, 2, 3)
    tabs = fam.tables(np.arange(fam.size))
    for idx in (0, 1, 17, fam.size - 1):
        h = fam.function(idx)
        assert fam.index_of(h) == idx
        assert list(tabs[idx]) == [eval_hash(h, a) for a in range(4)]
    # c0 is the most significant digit
    assert fam.function(1 << (2 * fam.m)).coefficients[0] == 1


def test_family_limits():
    with pytest.raises(EnumerationLimitError):
        HashFamily(8, 8, 4).check_enumerable(limit=1000)
    with pytest.raises(DomainError):
        HashFamily(1, 1, 0)
    with pytest.raises(DomainError):
        HashFamily(17, 1, 1)


def test_point_uniformity():
    counts = point_uniformity(HashFamily(3, 2, 2))
    assert np.all(counts == 64 // 4)


def test_universality_audit_detects_low_independence():
    # a degree-0 family is constant, so pairs are far from uniform
    rep = universality_audit(HashFamily(2, 2, 1), tuple_size=2)
    assert not rep["uniform"]
    assert universality_audit(HashFamily(2, 2, 2))["uniform"]


def test_all_functions_enumeration():
    allf = AllFunctions(2, 1)
    tabs = allf.tables(np.arange(allf.size))
    assert len({tuple(r) for r in tabs}) == 16


def test_sample_hash_is_seeded():
    fam = HashFamily(3, 2, 3)
    a = sample_hash(fam, np.random.default_rng(5))
    b = sample_hash(fam, np.random.default_rng(5))
    assert a == b
