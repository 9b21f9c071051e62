import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from datavec.core import DataVector, FiniteInjection, apply_injection, datum
from datavec.expressibility import ExpressibilityInstance, verify_witness
from datavec.syntax import ParseError
from datavec.updn import (NotEnabled, displacement, effects_reversible, enabled, fire, format_marking,
                          format_updn, marking, parse_marking, parse_updn, random_marking, random_net,
                          random_walk, reversed_net, state_equation, variable)

MOVER = """
places p;
trans t { in p: x; out p: y; }
"""

x, y = variable("x"), variable("y")
a, b = datum("a"), datum("b")


@pytest.fixture
def mover():
    return parse_updn(MOVER)


def test_mover_parses(mover):
    assert mover.places == ("p",)
    assert [t.name for t in mover.transitions] == ["t"]


def test_undeclared_place_is_reported_with_line():
    with pytest.raises(ParseError, match="line 3"):
        parse_updn("places p;\n\ntrans t { in q: x; }")


def test_empty_net_parses():
    net = parse_updn("places p q;")
    assert net.transitions == ()


def test_format_round_trip(mover):
    assert parse_updn(format_updn(mover)) == mover


def test_mover_displacement(mover):
    assert displacement(mover, "t") == DataVector(1, {x: [-1], y: [1]})


def test_selfloop_displacement_is_empty():
    net = parse_updn("places p; trans t { in p: x; out p: x; }")
    assert not displacement(net, "t")


def test_two_place_displacement():
    net = parse_updn("places p1 p2; trans t { out p1: x; in p2: x; }")
    assert displacement(net, "t") == DataVector(2, {x: (1, -1)})


def test_mover_fires(mover):
    m = marking(mover, {"p": {"a": 1}})
    sigma = {x: a, y: b}
    assert enabled(mover, m, "t", sigma)
    assert fire(mover, m, "t", sigma) == marking(mover, {"p": {"b": 1}})


def test_empty_place_disables(mover):
    m = marking(mover, {"p": {}})
    assert not enabled(mover, m, "t", {x: a, y: b})
    with pytest.raises(NotEnabled):
        fire(mover, m, "t", {x: a, y: b})


def test_mode_must_be_injective(mover):
    m = marking(mover, {"p": {"a": 1}})
    with pytest.raises(ValueError):
        fire(mover, m, "t", {x: a, y: a})


def test_marking_format_round_trip(mover):
    m = parse_marking(mover, "p: {a:2, b:1}")
    assert m == marking(mover, {"p": {"a": 2, "b": 1}})
    assert parse_marking(mover, format_marking(mover, m)) == m


def test_negative_tokens_rejected(mover):
    with pytest.raises(ParseError):
        parse_marking(mover, "p: {a:-1}")


def test_state_equation_examples(mover):
    m0 = marking(mover, {"p": {"a": 1}})
    m1 = marking(mover, {"p": {"b": 1}})
    res = state_equation(mover, m0, m1)
    assert res.answer and len(res.steps) == 1
    step = res.steps[0]
    assert fire(mover, m0, step.transition, step.mode) == m1
    assert state_equation(mover, m0, m0).answer


def test_weight_obstruction():
    net = parse_updn("places p; trans t { out p: x; }")
    m0 = marking(net, {"p": {"a": 1}})
    assert not state_equation(net, m0, marking(net, {"p": {}})).answer


def test_yes_does_not_imply_reachable():
    # t needs a token in p to produce one in q; from the empty marking nothing is enabled
    net = parse_updn("places p q; trans t { in p: x; out p: x; out q: x; }")
    m0 = marking(net, {})
    m1 = marking(net, {"q": {"a": 1}})
    assert state_equation(net, m0, m1).answer
    assert random_walk(net, m0, 5, seed=0) == [m0]


def test_effects_reversible_examples(mover):
    assert effects_reversible(mover).reversible
    net = parse_updn("places p; trans t { out p: x; } trans u { in p: x; }")
    assert effects_reversible(net).reversible
    net = parse_updn("places p; trans t { out p: x; }")
    assert not effects_reversible(net).reversible


def test_fast_route_refuses_non_reversible_effects():
    net = parse_updn("places p; trans t { out p: x; }")
    m = marking(net, {})
    with pytest.raises(ValueError):
        state_equation(net, m, m, fast=True)


def test_walk_of_zero_steps(mover):
    m = marking(mover, {"p": {"a": 1}})
    assert random_walk(mover, m, 0, seed=1) == [m]


def test_fire_matches_displacement_identity():
    for seed in range(30):
        net = random_net(seed)
        m = random_marking(net, seed)
        walk = random_walk(net, m, 4, seed)
        assert all(all(c >= 0 for t in w.values() for c in t) for w in walk)
        for t in net.transitions:
            sigma = {variable(v): datum(f"u{i}") for i, v in enumerate(t.variables)}
            if enabled(net, m, t, sigma):
                assert fire(net, m, t, sigma) == m + apply_injection(displacement(net, t), FiniteInjection(sigma))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_visited_markings_satisfy_state_equation(seed):
    net = random_net(seed)
    m0 = random_marking(net, seed)
    for m in random_walk(net, m0, 6, seed):
        res = state_equation(net, m0, m)
        assert res.answer
        inst = ExpressibilityInstance([displacement(net, t) for t in net.transitions], m - m0)
        assert verify_witness(inst, res.decision.witness)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_fast_and_general_routes_agree(seed):
    net = reversed_net(random_net(seed))
    m0 = random_marking(net, seed)
    m1 = random_marking(net, seed + 1)
    assert state_equation(net, m0, m1, fast=True).answer == state_equation(net, m0, m1).answer
