import numpy as np
import pytest
from hypothesis import settings, strategies as st

from nldistill import nsbox

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

VERTICES = [nsbox.vertex(v) for v in nsbox.all_vertex_ids()]


def random_ns_box(rng):
    """Random point of the no-signaling polytope (mixture of all 24 vertices)."""
    w = rng.dirichlet(np.full(24, 0.5))
    return nsbox.mix(w, VERTICES)


@st.composite
def ns_boxes(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_ns_box(np.random.default_rng(seed))


@st.composite
def simplex_weights(draw, k=9):
    raw = draw(st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k).filter(lambda v: sum(v) > 1e-3))
    w = np.array(raw)
    return w / w.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
