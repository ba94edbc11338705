import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoermander_lab.errors import PreconditionError
from hoermander_lab.spaces import FrequencyGrid, SampledField, norm_full
from hoermander_lab.symbols import RegularityIndex
from hoermander_lab.traces import (BETA_OUTER, CauchyData, band_limited_data, bump_beta,
                                   cauchy_data, extend_T0, norm_2bm_m, t0_bound_constants,
                                   t0_norm_bound, verify_right_inverse)


def grid_2d(nx=32, nt=256, lx=2 * math.pi, lt=40.0):
    return FrequencyGrid((nx, nt), (lx, lt))


def test_bump_beta():
    assert bump_beta(0.0) == 1.0
    assert bump_beta(0.5) == 1.0
    assert bump_beta(3.0) == 0.0
    tau = np.linspace(-3, 3, 601)
    vals = bump_beta(tau)
    assert np.all((vals >= 0) & (vals <= 1))
    assert np.allclose(vals, vals[::-1])


def test_cauchy_data_of_t_times_gaussian():
    g = grid_2d()
    X, T = g.mesh()
    w = SampledField(g, np.sin(X) * T * np.exp(-T ** 2))
    v = cauchy_data(w, 3, 1)
    assert np.max(np.abs(v.values[0])) < 1e-10
    assert np.allclose(v.values[1], np.sin(g.coords(0)), atol=1e-10)
    assert np.max(np.abs(v.values[2])) < 1e-9


def test_cauchy_data_of_sine_in_t():
    g = FrequencyGrid((16, 32), (2 * math.pi, 2 * math.pi))
    X, T = g.mesh()
    v = cauchy_data(SampledField(g, np.cos(X) * np.sin(T)), 4, 1)
    c = np.cos(g.coords(0))
    assert np.allclose(v.values, [0 * c, c, 0 * c, -c], atol=1e-12)


def test_cauchy_data_needs_t0():
    g = FrequencyGrid((8, 16), (1.0, 1.0), origin=(0.0, 0.013))
    with pytest.raises(PreconditionError):
        cauchy_data(SampledField(g, np.zeros((8, 16))), 1, 1)


def test_extend_zero_data():
    g = grid_2d()
    v = CauchyData(FrequencyGrid((32,), (2 * math.pi,)), np.zeros((2, 32)), 1)
    assert np.all(extend_T0(v, g).values == 0)


def test_extend_rejects_short_period():
    g = grid_2d(lt=2 * BETA_OUTER)
    v = CauchyData(FrequencyGrid((32,), (2 * math.pi,)), np.ones((1, 32)), 1)
    with pytest.raises(PreconditionError):
        extend_T0(v, g)


@pytest.mark.parametrize("r,b", [(1, 1), (2, 1), (3, 2)])
def test_right_inverse_small(r, b):
    gx = FrequencyGrid((64,), (8 * math.pi,))
    g = FrequencyGrid((64, 512), (8 * math.pi, 4.5))
    v = band_limited_data(gx, r, b, xi_max=0.5, seed=r + 10 * b)
    assert verify_right_inverse(v, g) <= 1e-8


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(-3, 3), st.floats(-3, 3))
def test_extension_is_linear(seed, a, c):
    gx = FrequencyGrid((32,), (8 * math.pi,))
    g = FrequencyGrid((32, 512), (8 * math.pi, 4.5))
    u = band_limited_data(gx, 2, 1, 0.5, seed)
    w = band_limited_data(gx, 2, 1, 0.5, seed + 1)
    combo = CauchyData(gx, a * u.values + c * w.values, 1)
    lhs = extend_T0(combo, g).values
    rhs = a * extend_T0(u, g).values + c * extend_T0(w, g).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + np.max(np.abs(rhs)))


def test_norm_2bm_m_at_m0_is_l2():
    g = grid_2d(16, 64)
    rng = np.random.default_rng(3)
    w = SampledField(g, rng.normal(size=(16, 64)))
    ref = norm_full(w, RegularityIndex(0.0), shell_warn=None)
    assert norm_2bm_m(w, 1, 0) == pytest.approx(ref, rel=1e-12)


def test_t0_bound_constants_base_case():
    c1, c2 = t0_bound_constants(0, 0)
    assert c1 == pytest.approx(c2)
    assert 1.0 <= c2 <= 4.0


@pytest.mark.parametrize("m", [1, 2])
def test_t0_bound(m):
    gx = FrequencyGrid((64,), (8 * math.pi,))
    g = FrequencyGrid((64, 512), (8 * math.pi, 4.5))
    rep = t0_norm_bound(band_limited_data(gx, m, 1, 0.5, seed=m), g, m)
    assert rep.holds and rep.lhs > 0
