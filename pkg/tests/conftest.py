import numpy as np
from hypothesis import strategies as st

from gba.prism import Region, classify


def prism_points(d: int) -> st.SearchStrategy:
    """Valid prism points: simplex frequencies lifted by a hit rate."""
    weights = st.lists(
        st.floats(min_value=0.005, max_value=1.0), min_size=d, max_size=d
    )
    gamma = st.floats(min_value=0.0, max_value=1.0)
    return st.builds(lambda w, g: np.asarray(w) / np.sum(w) + g, weights, gamma)


def outside_points(d: int) -> st.SearchStrategy:
    return prism_points(d).filter(lambda v: classify(v).region is Region.OUTSIDE)


def dims(lo: int = 2, hi: int = 8) -> st.SearchStrategy:
    return st.integers(min_value=lo, max_value=hi)
