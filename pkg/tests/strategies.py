"""Hypothesis strategies for sampled paths."""

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from truncvar import make_path

finite = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)
# small lattice values produce lots of exact ties
lattice = st.integers(min_value=-6, max_value=6).map(lambda k: 0.5 * k)


@st.composite
def value_arrays(draw, min_size=1, max_size=40):
    elements = draw(st.sampled_from([finite, lattice]))
    return draw(arrays(np.float64, st.integers(min_size, max_size), elements=elements))


@st.composite
def paths(draw, min_size=1, max_size=40):
    x = draw(value_arrays(min_size, max_size))
    gaps = draw(arrays(np.float64, x.size - 1, elements=st.floats(0.01, 2.0)))
    t = np.concatenate(([0.0], np.cumsum(gaps)))
    return make_path(t, x)


eps_values = st.one_of(st.just(0.0), st.floats(min_value=0.0, max_value=20.0))
