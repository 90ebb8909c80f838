from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pim import _kernels
from pim.graphs import flatten

from .conftest import small_logs


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("PIM_DISABLE_NUMBA", "1")
    assert _kernels.active().name == "numpy"
    monkeypatch.delenv("PIM_DISABLE_NUMBA")
    assert _kernels.active().name == "numba"


def test_explicit_backend():
    assert _kernels.get_kernels("numpy").name == "numpy"
    with pytest.raises(ValueError):
        _kernels.get_kernels("cuda")


def test_env_flag_in_fresh_process():
    code = "from pim import _kernels; print(_kernels.active().name)"
    env = dict(os.environ, PIM_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


NB, NP = _kernels.get_kernels("numba"), _kernels.get_kernels("numpy")


@given(small_logs())
@settings(max_examples=200)
def test_follows_parity(log):
    acts = tuple(sorted(log.alphabet))
    args = (*flatten(log, acts), len(acts))
    for x, y in zip(NB.follows_counts(*args), NP.follows_counts(*args)):
        np.testing.assert_array_equal(x, y)


@given(st.integers(0, 10**6))
@settings(max_examples=100)
def test_cut_scoring_parity(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 7))
    tables = [rng.random((k, k)) for _ in range(5)]
    adj = rng.random((k, k)) < 0.4
    start = rng.random(k) < 0.4
    end = rng.random(k) < 0.4
    r = float(rng.random())
    a = NB.enumerate_cuts(k, *tables, adj, start, end, r)
    b = NP.enumerate_cuts(k, *tables, adj, start, end, r)
    np.testing.assert_allclose(a, b, atol=1e-12)
    member = rng.random((5, k)) < 0.5
    member[:, 0] = True
    member[:, 1] = False
    np.testing.assert_allclose(
        NB.score_cuts(member, *tables, adj, start, end, r),
        NP.score_cuts(member, *tables, adj, start, end, r),
        atol=1e-12,
    )


@given(
    st.lists(st.integers(-1, 3), max_size=8),
    st.lists(st.lists(st.integers(0, 3), max_size=8), min_size=1, max_size=6),
)
@settings(max_examples=200)
def test_min_indel_parity(trace, models):
    events = np.array([a for m in models for a in m], dtype=np.int64)
    offsets = np.zeros(len(models) + 1, dtype=np.int64)
    np.cumsum([len(m) for m in models], out=offsets[1:])
    t = np.array(trace, dtype=np.int64)
    assert NB.min_indel(t, events, offsets) == NP.min_indel(t, events, offsets)
