import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoermander_lab.errors import PreconditionError
from hoermander_lab.interpolation import (HilbertPairModel, concat_models, direct_sum_norm,
                                          make_interp_param, midpoint_parameters,
                                          multiplier_identity_check,
                                          operator_interpolation_check, power_param, reiterate,
                                          subspace_interpolation_demo, x_psi_norm)
from hoermander_lab.karamata import constant, estimate_rv_order, multilog


def sqrt_param():
    return power_param(0.5)


def test_make_interp_param_example():
    psi = make_interp_param(0, 1, 2, multilog(1.0))
    assert psi(4.0) == pytest.approx(2 * (1 + math.log(2)), rel=1e-14)
    assert psi(0.5) == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        make_interp_param(1, 1, 2, constant(1.0))


def test_make_interp_param_is_regularly_varying():
    psi = make_interp_param(0.0, 1.0, 3.0, multilog(1.0))
    verdict = estimate_rv_order(psi, [2.0, 10.0], np.geomspace(1e2, 1e200, 400))
    # slowly varying correction shifts the finite-range estimate a little
    assert verdict.order == pytest.approx(1 / 3, abs=0.01)


def test_x_psi_norm_example():
    model = HilbertPairModel((4.0,))
    assert x_psi_norm(model, sqrt_param(), [1.0]) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        x_psi_norm(model, sqrt_param(), [1.0, 2.0])


def test_model_validation():
    with pytest.raises(ValueError):
        HilbertPairModel((1.0, -2.0))
    with pytest.raises(ValueError):
        HilbertPairModel(())


def test_direct_sum_example():
    models = [HilbertPairModel((1.0,)), HilbertPairModel((9.0,))]
    assert direct_sum_norm(models, sqrt_param(), [[1.0], [1.0]]) == pytest.approx(math.sqrt(10))


@settings(max_examples=30)
@given(st.integers(0, 2 ** 31), st.integers(1, 5))
def test_direct_sum_equals_concatenated_model(seed, count):
    rng = np.random.default_rng(seed)
    models = [HilbertPairModel(tuple(np.exp(rng.uniform(0, 10, rng.integers(1, 6)))))
              for _ in range(count)]
    vecs = [rng.normal(size=m.dim) for m in models]
    psi = make_interp_param(0, 1.5, 2, multilog(1.0))
    whole = x_psi_norm(concat_models(models), psi, np.concatenate(vecs))
    assert direct_sum_norm(models, psi, vecs) == pytest.approx(whole, rel=1e-14)


def test_reiterate_example():
    one = lambda r: np.ones_like(np.asarray(r, dtype=float))
    ident = lambda r: np.asarray(r, dtype=float)
    omega = reiterate(one, ident, sqrt_param())
    r = np.geomspace(1, 1e6, 13)
    assert np.allclose(omega(r), np.sqrt(r), rtol=1e-14)


def test_reiterate_rejects_growing_ratio():
    with pytest.raises(PreconditionError):
        reiterate(lambda r: np.asarray(r) ** 2, lambda r: np.asarray(r), sqrt_param())


@pytest.mark.parametrize("phi", [constant(1.0), multilog(1.0), multilog(2.0)])
def test_reiteration_midpoint(phi):
    s, eps, delta = 2.0, 0.5, 0.5
    _, _, omega = midpoint_parameters(s, eps, delta, phi)
    lo, w = s - eps - delta, 2 * (eps + delta)
    r = np.geomspace(1, 1e12, 200)
    target = r ** ((s - lo) / w) * phi(r ** (1 / w))
    assert np.max(np.abs(omega(r) / target - 1)) <= 1e-12


@pytest.mark.parametrize("gamma", [1.0, 0.5, 0.25])
def test_multiplier_identity(gamma):
    xi = np.fft.fftfreq(64, d=2 * math.pi / 64) * 2 * math.pi
    dev = multiplier_identity_check(0, 1, 2, gamma, multilog(1.0), (xi, xi))
    assert dev <= 1e-12


def test_operator_check_diagonal():
    model = HilbertPairModel.log_spaced(6)
    T = np.diag([1.0, 0.5, 0.2, 1.0, 0.9, 0.3])
    rep = operator_interpolation_check(model, model, T, sqrt_param())
    assert rep.bound_holds(1 + 1e-12)


@settings(max_examples=20)
@given(st.integers(0, 2 ** 31))
def test_operator_check_random(seed):
    rng = np.random.default_rng(seed)
    mx = HilbertPairModel(tuple(np.exp(rng.uniform(0, 5, 8))))
    my = HilbertPairModel(tuple(np.exp(rng.uniform(0, 5, 8))))
    rep = operator_interpolation_check(mx, my, rng.normal(size=(8, 8)), sqrt_param())
    assert rep.C <= 1 + 1e-9


def test_operator_check_shape():
    model = HilbertPairModel.log_spaced(3)
    with pytest.raises(ValueError):
        operator_interpolation_check(model, model, np.eye(2), sqrt_param())


def test_subspace_demo_identity_and_coordinate_projectors():
    model = HilbertPairModel.log_spaced(5, 1e4)
    psi = make_interp_param(0, 1, 2, multilog(1.0))
    rep = subspace_interpolation_demo(model, np.eye(5), psi)
    assert (rep.sup_x_over_y, rep.sup_y_over_x) == pytest.approx((1.0, 1.0), rel=1e-10)
    P = np.diag([1.0, 0, 1.0, 0, 0])
    rep = subspace_interpolation_demo(model, P, psi)
    assert rep.rank == 2
    assert (rep.sup_x_over_y, rep.sup_y_over_x) == pytest.approx((1.0, 1.0), rel=1e-10)


def test_subspace_demo_rejects_non_projector():
    model = HilbertPairModel.log_spaced(3)
    with pytest.raises(PreconditionError):
        subspace_interpolation_demo(model, 2 * np.eye(3), sqrt_param())
