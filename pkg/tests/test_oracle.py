import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from datavec.core import DataVector, data, datum
from datavec.expressibility import ExpressibilityInstance, is_permutation_sum, verify_witness
from datavec.oracle import (NO_UP_TO_BUDGET, YES, OracleBudget, OracleCapExceeded, canonical_injections,
                            naive_injections, oracle_decide, random_instance)


def vec(**entries):
    return DataVector(1, {datum(k): [v] for k, v in entries.items()})


def normal_form(pi, new):
    """Rename the `new` values in order of first use, so equivalent injections coincide."""
    order = {}
    out = []
    for a in sorted(pi):
        b = pi[a]
        if b in new:
            b = order.setdefault(b, len(order))
            out.append((a, ("new", b)))
        else:
            out.append((a, ("old", b.id)))
    return tuple(out)


@pytest.mark.parametrize("k_src,k_old,k_new", [(1, 1, 2), (2, 1, 2), (2, 2, 3), (3, 2, 2), (3, 0, 4)])
def test_canonical_enumeration_is_one_per_class(k_src, k_old, k_new):
    src = data(*(f"s{i}" for i in range(k_src)))
    old = list(data(*(f"o{i}" for i in range(k_old))))
    new = list(data(*(f"n{i}" for i in range(k_new))))
    canon = [normal_form(p, set(new)) for p in canonical_injections(src, old, new)]
    naive = {normal_form(p, set(new)) for p in naive_injections(src, old + new)}
    assert len(canon) == len(set(canon))
    assert set(canon) == naive
    assert len(canon) <= len(list(naive_injections(src, old + new)))


def test_depth_two_example():
    inst = ExpressibilityInstance([vec(α=1, β=-1)], vec(α=2, β=-1, γ=-1))
    res = oracle_decide(inst, OracleBudget.for_instance(inst, 2))
    assert res.answer == YES and len(res.witness) == 2
    assert verify_witness(inst, res.witness)
    assert oracle_decide(inst, OracleBudget.for_instance(inst, 1)).answer == NO_UP_TO_BUDGET


def test_empty_target_needs_no_terms():
    inst = ExpressibilityInstance([vec(α=1)], DataVector.zero(1))
    res = oracle_decide(inst, OracleBudget.for_instance(inst, 0))
    assert res.answer == YES and len(res.witness) == 0


def test_ten_term_fast_path_example():
    inst = ExpressibilityInstance([vec(α=1), vec(α=-1)], vec(α=5, β=-5))
    res = oracle_decide(inst, OracleBudget.for_instance(inst, 10))
    assert res.answer == YES and len(res.witness) == 10


def test_never_claims_a_true_negative():
    inst = ExpressibilityInstance([vec(α=1, β=1)], vec(α=1))
    assert oracle_decide(inst, OracleBudget.for_instance(inst, 3)).answer == NO_UP_TO_BUDGET


def test_state_cap():
    inst = ExpressibilityInstance([vec(α=1, β=-1, γ=2)], vec(α=7))
    with pytest.raises(OracleCapExceeded):
        oracle_decide(inst, OracleBudget.for_instance(inst, 6, pool_size=8, state_cap=50))


def test_pool_must_contain_target_support():
    inst = ExpressibilityInstance([vec(α=1)], vec(β=1))
    with pytest.raises(ValueError):
        oracle_decide(inst, OracleBudget(1, data("α")))


def test_random_instances_are_deterministic():
    assert random_instance(7).V == random_instance(7).V
    assert random_instance(7).x == random_instance(7).x


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_oracle_yes_is_accepted_by_the_procedure(seed):
    inst = random_instance(seed)
    res = oracle_decide(inst, OracleBudget.for_instance(inst, 3))
    if res.answer == YES:
        assert verify_witness(inst, res.witness)
        assert is_permutation_sum(inst).answer
