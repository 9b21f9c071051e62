import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import NAMES, injections, vectors
from datavec.core import (DataVector, DimensionError, DomainError, FiniteInjection, apply_injection, datum,
                          equalize, fresh_values, lift, rotate, rotation, swap, vec_add, vec_neg, vector,
                          vector_from_json, vector_to_json, weight)

a, b, c = datum("α"), datum("β"), datum("γ")
red, blue, yellow = datum("red"), datum("blue"), datum("yellow")


def test_add_cancels_renamed_entries():
    v = DataVector(1, {red: [1], blue: [-1], yellow: [2]})
    w = DataVector(1, {red: [-1], blue: [1]})
    assert v + w == DataVector(1, {yellow: [2]})


def test_add_inverse_gives_empty():
    v = DataVector(2, {a: (1, 2)})
    assert vec_add(v, DataVector(2, {a: (-1, -2)})) == DataVector.zero(2)
    assert not vec_add(v, vec_neg(v))


def test_negation():
    assert -DataVector(2, {a: (1, -2)}) == DataVector(2, {a: (-1, 2)})
    assert -DataVector.zero(3) == DataVector.zero(3)


def test_zero_tuples_are_not_stored():
    v = DataVector(2, {a: (0, 0), b: (1, 0)})
    assert v.support == {b}
    assert len(v) == 1


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        DataVector(1, {a: [1]}) + DataVector(2, {a: [1, 1]})
    with pytest.raises(DimensionError):
        DataVector(2, {a: [1]})


def test_weight():
    assert weight(DataVector(2, {a: (1, 2), b: (3, -2)})) == (4, 0)
    assert weight(DataVector.zero(3)) == (0, 0, 0)


def test_renaming_example():
    v = DataVector(1, {red: [-1], blue: [1]})
    pi = FiniteInjection({red: yellow, blue: blue})
    assert apply_injection(v, pi) == DataVector(1, {yellow: [-1], blue: [1]})


def test_injection_must_cover_support():
    with pytest.raises(DomainError):
        apply_injection(DataVector(1, {a: [1], b: [1]}), FiniteInjection({a: c}))


def test_injection_must_be_injective():
    with pytest.raises(ValueError):
        FiniteInjection({a: c, b: c})


def test_rotate_examples():
    assert rotate(DataVector(1, {a: [1], b: [2]}), {a, b}, 1) == DataVector(1, {a: [2], b: [1]})
    assert rotate(DataVector(1, {a: [1]}), {a, b, c}, 1) == DataVector(1, {b: [1]})
    with pytest.raises(DomainError):
        rotate(DataVector(1, {c: [1]}), {a, b}, 1)


def test_equalize_examples():
    assert equalize(DataVector(1, {a: [3], b: [-1]}), {a, b}) == DataVector(1, {a: [2], b: [2]})
    assert equalize(DataVector(1, {a: [5]}), {a, b, c}) == DataVector(1, {a: [5], b: [5], c: [5]})
    assert not equalize(DataVector(1, {a: [1], b: [-1]}), {a, b, c})


def test_lift():
    assert lift((2, -1), a) == DataVector(2, {a: (2, -1)})
    assert not lift((0, 0), a)
    assert lift((3,), a) == apply_injection(lift((3,), b), {b: a})


def test_vector_helper_and_json_round_trip():
    v = vector(2, α=(1, -2), β=(0, 3))
    obj = vector_to_json(v)
    assert obj == {"d": 2, "entries": {"α": [1, -2], "β": [0, 3]}}
    assert vector_from_json(obj) == v
    assert vector_to_json(DataVector.zero(2)) == {"d": 2, "entries": {}}


def test_fresh_values_avoid_used():
    used = {a, b}
    fresh = fresh_values(used, 3)
    assert len(set(fresh)) == 3 and not set(fresh) & used
    assert fresh == sorted(fresh)


def test_swap_and_rotation_are_permutations_of_s():
    assert swap(a, b)[a] == b and swap(a, b)[b] == a
    r = rotation([a, b, c], 1)
    assert set(r.image) == {a, b, c}
    assert r.then(rotation([a, b, c], 2)) == FiniteInjection({a: a, b: b, c: c})


@given(vectors(), st.data())
def test_injection_preserves_weight_and_support_size(v, draw):
    pi = draw.draw(injections(v.support))
    w = apply_injection(v, pi)
    assert weight(w) == weight(v)
    assert len(w) == len(v)


@given(vectors(d=2), st.integers(0, 6))
def test_full_rotation_is_identity(v, i):
    S = sorted(v.support | {NAMES[0], NAMES[1]})
    assert rotate(v, S, len(S)) == v
    assert rotate(v, S, i + len(S)) == rotate(v, S, i)


@given(vectors(d=2))
def test_equalize_is_weight_everywhere_on_s(v):
    S = sorted(v.support | {NAMES[5]})
    e = equalize(v, S)
    w = weight(v)
    for x in S:
        assert e[x] == w
    assert e.support <= set(S)


@given(vectors(d=2), vectors(d=2), vectors(d=2))
def test_addition_is_commutative_and_associative(u, v, w):
    assert u + v == v + u
    assert (u + v) + w == u + (v + w)
    assert u + DataVector.zero(2) == u
    assert all(any(t) for t in (u + v).values())
