import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from datavec.bca import (INCONCLUSIVE_CAPPED, NO, NO_UP_TO_BOUND, YES, Bca, Configuration, Edge,
                         StateSpaceExceeded, augment_counters, bfs_oracle, format_bca, parse_bca, random_bca,
                         random_run, reachable, skeleton_paths, skeletons, step)
from datavec.core import DataVector, FiniteInjection, datum, weight
from datavec.syntax import ParseError

a, b = datum("α"), datum("β")

COUNTER = """
state q0 qf;
edge q0 -> q0 label {α: [1]};
edge q0 -> qf label {};
"""


def vec(**entries):
    return DataVector(1, {datum(k): [v] for k, v in entries.items()})


@pytest.fixture
def counter():
    return parse_bca(COUNTER)


def test_parse(counter):
    assert counter.states == ("q0", "qf")
    assert counter.k == 1
    assert counter.edges[0] == Edge("q0", "q0", vec(α=1))
    assert not counter.edges[1].label
    assert parse_bca(format_bca(counter)) == counter


def test_parse_errors():
    with pytest.raises(ParseError, match="line 2"):
        parse_bca("state q0;\nedge q0 -> q1 label {};")
    with pytest.raises(ParseError):
        parse_bca("state q0; edge q0 -> q0 label {α: [1], β: [1, 2]};")


def test_parallel_edges_keep_their_ids():
    aut = parse_bca("state p; edge p -> p label {α: [1]}; edge p -> p label {α: [1]};")
    assert len(aut.edges) == 2 and aut.outgoing("p") == [0, 1]


def test_step_examples(counter):
    c = step(counter, Configuration("q0", DataVector.zero(1)), 0, FiniteInjection({a: a}))
    assert c == Configuration("q0", vec(α=1))
    c2 = step(counter, c, 1, FiniteInjection())
    assert c2 == Configuration("qf", vec(α=1))
    with pytest.raises(ValueError):
        step(counter, c2, 0, FiniteInjection({a: a}))


def test_step_and_inverse_cancel():
    aut = Bca(("p",), (Edge("p", "p", vec(α=2, β=-1)), Edge("p", "p", vec(α=-2, β=1))), 1)
    c0 = Configuration("p", vec(α=4))
    theta = FiniteInjection({a: b, b: a})
    c = step(aut, step(aut, c0, 0, theta), 1, theta)
    assert c == c0


def test_augment_single_edge():
    aut = Bca(("p", "q"), (Edge("p", "q", vec(α=1)),), 1)
    aug = augment_counters(aut)
    c = aug.aux_datum
    assert aug.k == 3
    assert aug.edges[0].label == DataVector(3, {a: (1, 0, 0), c: (0, -1, 1)})


def test_augmented_cycle_balances():
    aut = Bca(("p", "q", "r"), (Edge("p", "q", vec(α=1)), Edge("q", "r", vec(β=2)), Edge("r", "p", vec())), 1)
    aug = augment_counters(aut)
    total = sum((e.label for e in aug.edges), DataVector.zero(aug.k))
    assert total[aug.aux_datum] == (0, 0, 0, 0)
    for orig, e in zip(aut.edges, aug.edges):
        assert e.label.support == orig.label.support | {aug.aux_datum}
        for x in orig.label.support:
            assert e.label[x] == orig.label[x] + (0, 0, 0)


def test_skeleton_examples(counter):
    paths = list(skeleton_paths(counter, "q0", "q0"))
    assert paths[0].edges == ()
    chain = Bca(("p", "q"), (Edge("p", "q", vec()),), 1)
    assert [p.edges for p in skeleton_paths(chain, "p", "q")] == [(0,)]


def test_skeleton_hand_count():
    aut = Bca(("q0", "q1"), (Edge("q0", "q0", vec(α=1)), Edge("q1", "q1", vec(α=1)), Edge("q0", "q1", vec())), 1)
    # a^i c b^j with i + j <= 3, and a^i with i <= 4
    assert len(list(skeleton_paths(aut, "q0", "q1"))) == 10
    assert len(list(skeleton_paths(aut, "q0", "q0"))) == 5
    assert all(len(p) <= 4 for p in skeleton_paths(aut, "q0", "q1"))


def test_minimal_skeletons_drop_removable_loops():
    aut = Bca(("q0", "q1"), (Edge("q0", "q0", vec(α=1)), Edge("q1", "q1", vec(α=1)), Edge("q0", "q1", vec())), 1)
    assert [p.edges for p in skeleton_paths(aut, "q0", "q1", minimal=True)] == [(2,)]


def test_instantiated_skeletons_cover_label_supports(counter):
    x0 = DataVector.zero(1)
    for path in skeletons(counter, "q0", "qf", x0, vec(β=2)):
        if len(path) > 3:
            break
        assert len(path.instantiation) == len(path.edges)
        for e, pi in zip(path.edges, path.instantiation):
            assert set(pi) == counter.edges[e].label.support


def test_reach_counter_example(counter):
    c0 = Configuration("q0", DataVector.zero(1))
    cf = Configuration("qf", vec(α=3))
    res = reachable(counter, c0, cf)
    assert res.answer == YES
    bfs = bfs_oracle(counter, c0, cf, value_bound=5, fresh_bound=3)
    assert bfs.answer == YES and bfs.depth == 4


def test_reach_weight_obstruction(counter):
    c0 = Configuration("q0", DataVector.zero(1))
    cf = Configuration("qf", vec(α=-1))
    assert reachable(counter, c0, cf).answer == NO
    assert bfs_oracle(counter, c0, cf, 5, 3).answer == NO_UP_TO_BOUND


def test_reach_same_configuration(counter):
    c = Configuration("qf", vec(α=2))
    assert reachable(counter, c, c).answer == YES
    assert bfs_oracle(counter, c, c, 5, 3).depth == 0


def test_cycles_must_start_in_visited_states():
    # the loop at r adds α but r is never visited on the way from p to q
    aut = Bca(("p", "q", "r"), (Edge("p", "q", vec()), Edge("r", "r", vec(α=1))), 1)
    res = reachable(aut, Configuration("p", DataVector.zero(1)), Configuration("q", vec(α=1)))
    assert res.answer == NO


def test_cap_gives_inconclusive():
    aut = Bca(("p", "q"), (Edge("p", "q", vec(α=1)), Edge("q", "p", vec(α=1))), 1)
    res = reachable(aut, Configuration("p", DataVector.zero(1)), Configuration("p", vec(α=-1)), cap=0)
    assert res.answer == INCONCLUSIVE_CAPPED


def test_bfs_state_cap():
    aut = Bca(("p",), (Edge("p", "p", vec(α=1, β=-1)),), 1)
    with pytest.raises(StateSpaceExceeded):
        bfs_oracle(aut, Configuration("p", DataVector.zero(1)), Configuration("p", vec(α=9)), 5, 3, cap=20)


def test_enumerate_method_agrees_with_folding():
    for seed in range(25):
        aut = random_bca(seed, max_states=2)
        c0 = Configuration(aut.states[0], DataVector.zero(aut.k))
        cf = random_run(aut, c0, 2, seed)
        fold = reachable(aut, c0, cf)
        enum = reachable(aut, c0, cf, method="enumerate", cap=2000)
        assert fold.answer == YES
        if enum.answer != INCONCLUSIVE_CAPPED:
            assert enum.answer == fold.answer


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 5))
def test_weight_changes_by_label_weights(seed, steps):
    aut = random_bca(seed)
    c = Configuration(aut.states[0], DataVector.zero(aut.k))
    rng = random.Random(seed)
    for _ in range(steps):
        out = aut.outgoing(c.state)
        if not out:
            break
        e = rng.choice(out)
        src = sorted(aut.edges[e].label.support)
        theta = FiniteInjection(zip(src, rng.sample([datum(n) for n in "abcd"], len(src))))
        before = weight(c.vector)
        c = step(aut, c, e, theta)
        assert weight(c.vector) == tuple(p + q for p, q in zip(before, weight(aut.edges[e].label)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_auxiliary_effect_depends_only_on_endpoints(seed):
    aut = random_bca(seed)
    aug = augment_counters(aut)
    rng = random.Random(seed)
    q = aut.states[0]
    total = DataVector.zero(aug.k)
    for _ in range(6):
        out = aug.outgoing(q)
        if not out:
            break
        e = rng.choice(out)
        total = total + aug.edges[e].label
        q = aug.edges[e].target
    aux = total[aug.aux_datum][aut.k:]
    expected = [0] * len(aut.states)
    expected[aut.states.index(q)] += 1
    expected[0] -= 1
    assert list(aux) == expected


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_planted_runs_are_reachable(seed):
    aut = random_bca(seed)
    c0 = Configuration(aut.states[0], DataVector.zero(aut.k))
    cf = random_run(aut, c0, 3, seed)
    assert reachable(aut, c0, cf).answer == YES
