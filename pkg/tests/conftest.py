import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from fibertop.census import space_from_min_nbhds
from fibertop.oscillation import RationalFunction
from fibertop.spaces import FiberedMap, FiniteSpace, chain, discrete, indiscrete, sierpinski


@pytest.fixture
def S():
    return sierpinski()


@pytest.fixture
def D2():
    return discrete(2)


@pytest.fixture
def D3():
    return discrete(3)


@pytest.fixture
def I2():
    return indiscrete(2)


@pytest.fixture
def C3():
    return chain(3)


@pytest.fixture
def V_poset():
    # two closed points under a common open one: the smallest non-normal space
    return FiniteSpace(3, [0b000, 0b100, 0b101, 0b110, 0b111])


def make_space(n: int, seeds) -> FiniteSpace:
    """Repair arbitrary per-point masks into a valid Alexandrov assignment."""
    nbhds = [(m | 1 << i) & ((1 << n) - 1) for i, m in enumerate(seeds)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if nbhds[i] >> j & 1 and nbhds[j] & ~nbhds[i]:
                    nbhds[i] |= nbhds[j]
                    changed = True
    return space_from_min_nbhds(nbhds)


@st.composite
def spaces(draw, max_points=6):
    n = draw(st.integers(min_value=1, max_value=max_points))
    seeds = draw(st.lists(st.integers(min_value=0, max_value=(1 << n) - 1),
                          min_size=n, max_size=n))
    return make_space(n, seeds)


@st.composite
def spaces_with_function(draw, max_points=6):
    space = draw(spaces(max_points))
    vals = draw(st.lists(
        st.fractions(min_value=-4, max_value=4, max_denominator=8),
        min_size=space.n, max_size=space.n))
    return space, RationalFunction.total(space, vals)


@st.composite
def fibered_maps(draw, max_points=4):
    dom = draw(spaces(max_points))
    cod = draw(spaces(max_points))
    # repair an arbitrary table into a continuous one by climbing targets
    raw = draw(st.lists(st.integers(min_value=0, max_value=cod.n - 1),
                        min_size=dom.n, max_size=dom.n))
    table = list(raw)
    for _ in range(dom.n):
        ok = True
        for x in range(dom.n):
            for z in range(dom.n):
                if dom.min_nbhd(x) >> z & 1 and not cod.min_nbhd(table[x]) >> table[z] & 1:
                    table[z] = table[x]
                    ok = False
        if ok:
            break
    else:
        table = [raw[0]] * dom.n
    return FiberedMap(dom, cod, table)


def random_function(space: FiniteSpace, rng: random.Random) -> RationalFunction:
    vals = [Fraction(rng.randint(-8, 8), rng.randint(1, 6)) for _ in range(space.n)]
    return RationalFunction.total(space, vals)
