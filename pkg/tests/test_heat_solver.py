import math
import warnings

import numpy as np
import pytest

from hoermander_lab.compatibility import heat_rhs
from hoermander_lab.errors import CompatibilityWarning, PreconditionError
from hoermander_lab.heat_solver import (HeatProblemSpec, SmoothCutoff, apply_lambda,
                                        continuity_sharpness_experiment, isomorphism_ratio,
                                        manufactured_rhs, mode_family, q_space_norm,
                                        q_space_parts, regularity_lift_experiment, solve_heat,
                                        witness_sup_ratio, witness_sup_ratio_grid, zero_cutoff)
from hoermander_lab.karamata import constant, multilog
from hoermander_lab.spaces import norm_restriction
from hoermander_lab.symbols import RegularityIndex


def rel_err(u, exact):
    return np.linalg.norm(u - exact) / np.linalg.norm(exact)


def test_spec_validation():
    with pytest.raises(ValueError):
        HeatProblemSpec(kind="Robin")
    with pytest.raises(ValueError):
        HeatProblemSpec(N_x=2)
    assert HeatProblemSpec(N_x=8, N_t=4).refined().N_t == 8


def test_zero_data_zero_solution():
    u = solve_heat(HeatProblemSpec(N_x=16, N_t=16), heat_rhs())
    assert np.all(u.values == 0)


@pytest.mark.parametrize("kind,u0", [("Dirichlet", "sin(pi*x)"), ("Neumann", "cos(pi*x)")])
def test_separable_solution(kind, u0):
    spec = HeatProblemSpec(kind, N_x=256, N_t=1024)
    u = solve_heat(spec, heat_rhs(h=u0))
    X, T = np.meshgrid(spec.x, spec.t, indexing="ij")
    base = np.sin(math.pi * X) if kind == "Dirichlet" else np.cos(math.pi * X)
    assert rel_err(u.values, base * np.exp(-math.pi ** 2 * T)) <= 1e-3


def test_inhomogeneous_boundary_data():
    spec = HeatProblemSpec(N_x=128, N_t=512)
    rhs = manufactured_rhs(spec, "sin(pi*x)*exp(-t) + x**2*t + 1")
    u = solve_heat(spec, rhs)
    X, T = np.meshgrid(spec.x, spec.t, indexing="ij")
    exact = np.sin(math.pi * X) * np.exp(-T) + X ** 2 * T + 1
    assert rel_err(u.values, exact) <= 1e-4


def test_crank_nicolson_is_second_order_in_time():
    errs = []
    for nt in (64, 128):
        spec = HeatProblemSpec(N_x=256, N_t=nt)
        u = solve_heat(spec, heat_rhs(h="sin(pi*x)"))
        X, T = np.meshgrid(spec.x, spec.t, indexing="ij")
        errs.append(rel_err(u.values, np.sin(math.pi * X) * np.exp(-math.pi ** 2 * T)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_incompatible_data_warns():
    with pytest.warns(CompatibilityWarning):
        solve_heat(HeatProblemSpec(N_x=16, N_t=16), heat_rhs(h="1"))


def test_apply_lambda_examples():
    spec = HeatProblemSpec(N_x=64, N_t=64)
    X, T = np.meshgrid(spec.x, spec.t, indexing="ij")
    zero = apply_lambda(spec, spec.box(np.zeros_like(X)))
    assert np.all(zero.f.values == 0) and np.all(zero.h[0].values == 0)
    b = apply_lambda(spec, spec.box(X * (1 - X) + 0 * T))
    assert np.allclose(b.f.values, 2.0, atol=1e-9)
    assert np.allclose(b.g[(1, 0)].values, 0) and np.allclose(b.g[(1, 1)].values, 0)
    sym = apply_lambda(spec, "sin(pi*x)*exp(-pi**2*t)")
    assert sym.f.is_zero
    assert np.allclose(sym.h[0].sample(spec.x), np.sin(math.pi * spec.x), atol=1e-14)


def test_q_space_norm_examples():
    spec = HeatProblemSpec(N_x=128, N_t=128)
    assert q_space_norm(spec, heat_rhs(), 3.0) == 0.0
    parts = q_space_parts(spec, heat_rhs(h="sin(pi*x)"), 3.0)
    assert parts.f == parts.g0 == parts.g1 == 0.0
    from hoermander_lab.heat_solver import box_field
    ref = norm_restriction(box_field(np.sin(math.pi * spec.x), [(0, 1)]), RegularityIndex(2.0))
    assert parts.h == pytest.approx(ref) and parts.total == pytest.approx(ref)
    with pytest.raises(PreconditionError):
        q_space_norm(spec, heat_rhs(), 2.0)


def test_boundary_shift():
    assert HeatProblemSpec("Dirichlet").boundary_shift == 0.25
    assert HeatProblemSpec("Neumann").boundary_shift == 0.75


def test_isomorphism_ratio_scaling_invariance():
    spec = HeatProblemSpec(N_x=64, N_t=64)
    u = mode_family(n=2)[1]
    rep = isomorphism_ratio(spec, [u, 10 * u], 3.25)
    assert rep.samples[0].ratio == pytest.approx(rep.samples[1].ratio, rel=1e-10)
    with pytest.raises(PreconditionError):
        isomorphism_ratio(spec, [u], 3.5)


@pytest.mark.slow
@pytest.mark.parametrize("phi", [constant(1.0), multilog(1.0)])
def test_isomorphism_ratio_stable(phi):
    rep = isomorphism_ratio(HeatProblemSpec(N_x=64, N_t=64), mode_family(n=6), 3.25, phi)
    assert all(x.compatible for x in rep.samples)
    assert rep.stable(2.0)


def test_regularity_zero_cutoff():
    spec = HeatProblemSpec(N_x=32, N_t=32)
    rhs = heat_rhs(f="t**4*sin(3*x)*exp(t)")
    tab = regularity_lift_experiment(spec, rhs, [3.0], cutoff=zero_cutoff, levels=2)
    assert all(r.local_norm == 0 for r in tab.rows)


def test_regularity_local_versus_global():
    spec = HeatProblemSpec(N_x=64, N_t=64)
    f = "t**4*((x-1/2-sqrt(2)/1000)**2+Abs(t-7/10-sqrt(3)/1000))**(-1/4)"
    tab = regularity_lift_experiment(spec, heat_rhs(f=f), [4.5], levels=4)
    assert tab.step_growth(4.5, "local") <= 1.01
    assert tab.growth(4.5, "global") >= 2.0


def test_smooth_cutoff_plateau():
    chi = SmoothCutoff((0.4, 0.6), (0.1, 0.9), (0.4, 0.6), (0.1, 0.9))
    z = np.array([0.0, 0.05, 0.5, 0.95, 1.0])
    vals = chi(z, z)
    assert vals[2, 2] == 1.0 and np.all(vals[[0, 1, 3, 4]] == 0)


def test_witness_ratio_against_grid_quadrature():
    a = witness_sup_ratio(1, 1, 1, constant(1.0), 2.0)
    b = witness_sup_ratio_grid(1, constant(1.0), 2.0, 0.01, 0.01)
    assert b == pytest.approx(a, rel=2e-2)


def test_continuity_classification():
    rows = {r.theta: r for r in continuity_sharpness_experiment(1)}
    assert rows[1.0].classification == "bounded"
    assert rows[0.4].classification == "divergent"
    assert rows[0.0].classification == "divergent"
    assert rows[1.0].integral_status == "Converges"
