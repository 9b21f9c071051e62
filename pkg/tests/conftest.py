import pytest
from hypothesis import strategies as st

from datavec.core import DataVector, FiniteInjection, data, datum
from datavec.histogram import validate

NAMES = data(*(f"d{i}" for i in range(8)))


@st.composite
def vectors(draw, d=None, names=NAMES, max_support=4, lo=-3, hi=3):
    d = d if d is not None else draw(st.integers(1, 3))
    keys = draw(st.lists(st.sampled_from(names), max_size=max_support, unique=True))
    entries = {a: tuple(draw(st.integers(lo, hi)) for _ in range(d)) for a in keys}
    return DataVector(d, entries)


@st.composite
def injections(draw, source, names=NAMES):
    source = sorted(source)
    images = draw(st.permutations(list(names)))[:len(source)]
    return FiniteInjection(zip(source, images))


@st.composite
def histograms(draw, max_rows=4, max_degree=8, max_cols=8):
    """Valid histograms built as sums of random simple histograms."""
    rows = data(*(f"r{i}" for i in range(draw(st.integers(1, max_rows)))))
    cols = data(*(f"c{i}" for i in range(draw(st.integers(len(rows), max_cols)))))
    n = draw(st.integers(1, max_degree))
    entries = {}
    for _ in range(n):
        images = draw(st.permutations(list(cols)))[:len(rows)]
        for a, b in zip(rows, images):
            entries[(a, b)] = entries.get((a, b), 0) + 1
    return validate(rows, entries)


@pytest.fixture
def deg4():
    """The degree-4 histogram with rows α1, α2."""
    a1, a2 = datum("α1"), datum("α2")
    b1, b2, b3, b5 = datum("β1"), datum("β2"), datum("β3"), datum("β5")
    return validate([a1, a2], {(a1, b2): 2, (a1, b3): 1, (a1, b5): 1, (a2, b1): 3, (a2, b3): 1})
