import itertools

import pytest
from hypothesis import given, settings, strategies as st

from dfol import _accel, _purepy

try:
    from dfol import _speedups
except ImportError:  # pragma: no cover
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None, reason="compiled extension not built")


def test_backend_name():
    assert _accel.BACKEND in ("cython", "python")


@needs_ext
@pytest.mark.parametrize("n", range(5))
def test_enumeration_agrees(n):
    assert [tuple(r) for r in _speedups.enumerate_preorders(n)] == _purepy.enumerate_preorders(n)


@needs_ext
def test_transitivity_check_agrees_on_all_relations():
    for n in range(4):
        cells = [(i, j) for i in range(n) for j in range(n)]
        for bits in itertools.product((0, 1), repeat=len(cells)):
            rows = [0] * n
            for (i, j), b in zip(cells, bits):
                rows[i] |= b << j
            assert bool(_speedups.is_preorder(tuple(rows))) == _purepy.is_preorder(tuple(rows))


PRE = [p for n in range(4) for p in _purepy.enumerate_preorders(n)]


@needs_ext
@settings(max_examples=150, deadline=None)
@given(st.sampled_from(PRE), st.sampled_from(PRE), st.integers(min_value=-1, max_value=5))
def test_monotone_maps_agree(dom, cod, limit):
    fast = [tuple(t) for t in _speedups.monotone_maps(dom, cod, limit)]
    assert fast == _purepy.monotone_maps(dom, cod, limit)


@given(st.sampled_from(PRE), st.sampled_from(PRE))
@settings(max_examples=100, deadline=None)
def test_limit_stops_one_past_the_bound(dom, cod):
    """Enough maps are returned to tell whether the bound is exceeded."""
    full = _purepy.monotone_maps(dom, cod)
    cut = _purepy.monotone_maps(dom, cod, 2)
    assert cut == full[:3]


def test_pure_python_fallback_selected_by_environment():
    import os
    import subprocess
    import sys

    env = {**os.environ, "DFOL_PURE_PYTHON": "1"}
    code = "import dfol; from dfol.search import count_preorders; print(dfol.BACKEND, count_preorders(3))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "29"]
