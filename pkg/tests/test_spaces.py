import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoermander_lab import spaces as spc
from hoermander_lab.errors import AliasingWarning, PreconditionError
from hoermander_lab.karamata import constant, multilog
from hoermander_lab.spaces import (Box, FrequencyGrid, HalfLinePlus, SampledField,
                                   continuity_threshold, embedding_identity_check, norm_full,
                                   norm_plus, norm_restriction)
from hoermander_lab.symbols import RegularityIndex, embedding_chain_check

L2 = RegularityIndex(0.0)


def gaussian_field(N=256, L=40.0, dims=1):
    g = FrequencyGrid((N,) * dims, (L,) * dims)
    mesh = g.mesh()
    return SampledField(g, np.exp(-sum(m ** 2 for m in mesh) / 2))


def box_of(values, bounds):
    v = np.asarray(values)
    return SampledField(FrequencyGrid.for_box(bounds, v.shape), v, Box(tuple(bounds)))


def test_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid((7,), (1.0,))
    with pytest.raises(ValueError):
        FrequencyGrid((8,), (-1.0,))
    with pytest.raises(ValueError):
        FrequencyGrid((1024, 1024), (1.0, 1.0), cap=1000)


def test_fft_roundtrip():
    f = gaussian_field(64, 20.0, dims=2)
    back = SampledField.from_hat(f.grid, f.hat())
    assert np.max(np.abs(back.values - f.values)) < 1e-12


def test_norm_full_examples():
    g = FrequencyGrid((32,), (2 * math.pi,))
    assert norm_full(SampledField(g, np.zeros(32)), L2) == 0.0
    hat = np.zeros(32, dtype=complex)
    hat[3] = 1.0
    f = SampledField.from_hat(g, hat)
    assert norm_full(f, L2) == pytest.approx(math.sqrt(g.cell_volume), rel=1e-12)


def test_gaussian_against_analytic_integral():
    # unitary transform of exp(-x^2/2) is exp(-xi^2/2): int (1+xi^2) e^{-xi^2} = 1.5 sqrt(pi)
    f = gaussian_field()
    assert norm_full(f, RegularityIndex(1.0)) == pytest.approx(math.sqrt(1.5 * math.sqrt(math.pi)),
                                                               rel=1e-6)


def test_parseval_at_s0():
    f = gaussian_field(64, 20.0, dims=2)
    phys = math.sqrt(np.sum(np.abs(f.values) ** 2) * math.prod(f.grid.h))
    assert norm_full(f, L2) == pytest.approx(phys, rel=1e-10)


def test_aliasing_warning():
    g = FrequencyGrid((32,), (1.0,))
    rng = np.random.default_rng(0)
    f = SampledField(g, rng.normal(size=32))
    with pytest.warns(AliasingWarning):
        norm_full(f, RegularityIndex(2.0))


@settings(max_examples=25)
@given(st.integers(0, 2 ** 31), st.floats(-3, 3), st.floats(-3, 3))
def test_norm_axioms(seed, a, ds):
    rng = np.random.default_rng(seed)
    g = FrequencyGrid((16, 16), (2 * math.pi, 2 * math.pi))
    u, v = (SampledField(g, rng.normal(size=(16, 16))) for _ in range(2))
    idx = RegularityIndex(1.0, 0.5, multilog(1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasingWarning)
        nu, nv = norm_full(u, idx), norm_full(v, idx)
        assert norm_full(SampledField(g, a * u.values), idx) == pytest.approx(abs(a) * nu,
                                                                                 rel=1e-10, abs=1e-12)
        assert norm_full(SampledField(g, u.values + v.values), idx) <= (nu + nv) * (1 + 1e-10)
        lo = norm_full(u, RegularityIndex(1.0 + min(ds, 0), 0.5))
        hi = norm_full(u, RegularityIndex(1.0 + max(ds, 0), 0.5))
        assert lo <= hi * (1 + 1e-12)


def test_embedding_chain_sandwich_on_fields():
    f = gaussian_field(64, 20.0, dims=2)
    phi = multilog(1.0)
    i0, i, i1 = (RegularityIndex(s, 0.5, phi) for s in (0.0, 1.0, 2.0))
    c0, c1, bad = embedding_chain_check(i0, i, i1, f.grid)
    assert bad == 0
    n0, n, n1 = (norm_full(f, k) for k in (i0, i, i1))
    assert c0 * n0 <= n * (1 + 1e-12) and n <= c1 * n1 * (1 + 1e-12)


def test_restriction_examples():
    bounds = [(0.0, 2.0), (0.0, 1.5)]
    zero = box_of(np.zeros((33, 25)), bounds)
    assert norm_restriction(zero, L2) == 0.0
    one = box_of(np.ones((33, 25)), bounds)
    assert norm_restriction(one, L2, "EvenReflectPeriodize") == pytest.approx(math.sqrt(3.0),
                                                                               rel=1e-10)
    for strategy in spc.STRATEGIES:
        assert norm_restriction(one, L2, strategy) >= one.l2_norm() * (1 - 1e-12)


def test_restriction_rejects_misaligned_box():
    g = FrequencyGrid((16,), (1.0,), origin=(0.0,))
    with pytest.raises(ValueError):
        SampledField(g, np.zeros(5), Box(((0.01, 0.26),)))


def test_zero_extension_is_exact_for_interior_support():
    x = np.linspace(0, 1, 129)
    bump = np.exp(-200 * (x - 0.5) ** 2)
    fld = box_of(bump, [(0.0, 1.0)])
    full_grid = FrequencyGrid((256,), (2.0,), origin=(-0.5,))
    padded = np.zeros(256)
    padded[64:193] = bump
    idx = RegularityIndex(2.0)
    ref = norm_full(SampledField(full_grid, padded), idx)
    assert norm_restriction(fld, idx) == pytest.approx(ref, rel=1e-8)
    assert spc.norm_compact(fld, idx) == pytest.approx(ref, rel=1e-8)


def test_trace_gating_rejects_zero_extension_of_nonvanishing_field():
    x = np.linspace(0, 1, 129)
    assert not spc.side_traces_vanish(np.sin(np.pi * x) + 1, x[1], 0, "lower", 2.0)
    assert spc.side_traces_vanish(np.sin(np.pi * x) + 1, x[1], 0, "lower", 0.4)
    assert spc.side_traces_vanish(x ** 5, x[1], 0, "lower", 3.0)
    assert not spc.side_traces_vanish(x ** 2, x[1], 0, "lower", 3.0)


def test_norm_plus_examples():
    g = FrequencyGrid((32, 64), (2 * math.pi, 4.0))
    X, T = g.mesh()
    vals = np.where((T > 0) & (T < 1.5), np.sin(X) * np.sin(np.pi * T / 1.5) ** 4, 0.0)
    f = SampledField(g, vals, HalfLinePlus())
    assert norm_plus(f, L2) == pytest.approx(norm_full(SampledField(g, vals), L2), rel=1e-10)
    assert norm_plus(SampledField(g, np.zeros((32, 64)), HalfLinePlus()), L2) == 0.0
    bad = SampledField(g, np.ones((32, 64)), HalfLinePlus())
    with pytest.raises(PreconditionError):
        norm_plus(bad, L2)


def _trace_field(n, power=0):
    x = np.linspace(0, 1, n + 1)
    t = np.linspace(0, 1, n + 1)
    X, T = np.meshgrid(x, t, indexing="ij")
    return box_of(np.sin(np.pi * X) * T ** power * np.cos(T), [(0.0, 1.0), (0.0, 1.0)])


def test_norm_plus_dominates_restriction():
    # traces at t = 0 vanish, so the field belongs to H_+
    f = _trace_field(64, power=3)
    idx = RegularityIndex.parabolic(2.0, 1)
    assert norm_plus(f, idx) >= norm_restriction(f, idx)


def test_norm_plus_blow_up_witness():
    # nonvanishing trace at t = 0 and s gamma - 1/2 > 0: the zero extension is
    # not in the space, so the ratio grows under refinement
    idx = RegularityIndex.parabolic(2.0, 1)
    ratios = [norm_plus(f, idx) / norm_restriction(f, idx) for f in map(_trace_field, (32, 64, 128))]
    assert ratios[0] < ratios[1] < ratios[2]


def test_continuity_threshold_examples():
    assert continuity_threshold(0, 1, 1, multilog(1.0)).status == "Continuous"
    assert continuity_threshold(2, 1, 2, constant(1.0)).status == "NotGuaranteed"
    v = continuity_threshold(1, 1, 1, multilog(0.5))
    assert v.status == "NotGuaranteed" and v.s == 2.5


@pytest.mark.parametrize("alpha,beta,p", [((0,), 0, 0), ((0,), 0, 1), ((1,), 0, 1),
                                          ((0,), 1, 2)])
def test_embedding_identity_ratio_is_c_alpha_beta(alpha, beta, p):
    s = p + 1 + 0.5
    ratios = [embedding_identity_check(alpha, beta, s, 1, 1, phi).ratio
              for phi in (multilog(1.0), multilog(2.0))]
    c = spc.angular_constant(alpha, beta, 1)
    assert ratios == pytest.approx([c, c], rel=1e-6)


def test_embedding_identity_against_direct_quadrature():
    rep = embedding_identity_check((0,), 0, 2.5, 1, 1, multilog(1.0))
    direct = spc.embedding_lhs_direct((0,), 0, 2.5, 1, multilog(1.0))
    assert rep.lhs == pytest.approx(direct, rel=1e-5)


def test_embedding_identity_divergent_flag():
    rep = embedding_identity_check((0,), 0, 1.5, 1, 1, multilog(0.5))
    assert rep.divergent and math.isinf(rep.lhs) and math.isinf(rep.rhs)
    with pytest.raises(PreconditionError):
        embedding_identity_check((1,), 0, 1.5, 1, 1, multilog(1.0))
