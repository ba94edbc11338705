"""Acceptance criteria, one test each.

Each criterion is a plain function returning (passed, detail) so the file can
also be run as a script: ``python3 tests/test_acceptance.py``.
"""
import math
import time
import warnings

import numpy as np
import pytest

from hoermander_lab import compatibility as cm
from hoermander_lab import heat_solver as hs
from hoermander_lab import interpolation as ip
from hoermander_lab import spaces as spc
from hoermander_lab import traces as tr
from hoermander_lab.karamata import constant, integral_condition, multilog

PHIS = (constant(1.0), multilog(1.0), multilog(2.0))


def criterion_1():
    t0 = time.perf_counter()
    grid = spc.FrequencyGrid((64, 64), (2 * math.pi, 2 * math.pi))
    worst = max(ip.multiplier_identity_check(s0, s, s1, g, phi, grid)
                for g in (1.0, 0.5, 0.25) for phi in PHIS
                for s0, s, s1 in ((0, 1, 2), (2, 3.25, 4)))
    dt = time.perf_counter() - t0
    return worst <= 1e-12 and dt < 1.0, f"max deviation {worst:.2e}, {dt:.2f} s"


def criterion_2():
    t0 = time.perf_counter()
    s, eps, delta = 2.0, 0.5, 0.5
    lo, w = s - eps - delta, 2 * (eps + delta)
    r = np.geomspace(1.0, 1e12, 1000)
    worst = 0.0
    for phi in PHIS:
        _, _, omega = ip.midpoint_parameters(s, eps, delta, phi)
        exact = r ** ((s - lo) / w) * phi(r ** (1 / w))
        worst = max(worst, float(np.max(np.abs(omega(r) - exact) / exact)))
    dt = time.perf_counter() - t0
    return worst <= 1e-12 and dt < 1.0, f"max deviation {worst:.2e} at 1000 probes, {dt:.2f} s"


def criterion_3():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for i in range(100):
        models = [ip.HilbertPairModel(tuple(10.0 ** rng.uniform(0, 6, rng.integers(1, 9))))
                  for _ in range(rng.integers(1, 5))]
        vecs = [rng.normal(size=m.dim) for m in models]
        s1 = float(rng.uniform(1, 4))
        psi = ip.make_interp_param(0.0, float(rng.uniform(0.1, s1 - 0.1)), s1, PHIS[i % 3])
        a = ip.direct_sum_norm(models, psi, vecs)
        b = ip.x_psi_norm(ip.concat_models(models), psi, np.concatenate(vecs))
        worst = max(worst, abs(a - b) / b)
    return worst <= 1e-14, f"max relative gap {worst:.2e} over 100 fixtures"


TRACE_GRID_X = spc.FrequencyGrid((128,), (8 * math.pi,))
TRACE_GRID = spc.FrequencyGrid((128, 512), (8 * math.pi, 4.5))


def criterion_4():
    t0 = time.perf_counter()
    worst = max(tr.verify_right_inverse(
        tr.band_limited_data(TRACE_GRID_X, r, b, xi_max=0.5, seed=10 * r + b), TRACE_GRID)
        for r in (1, 2, 3) for b in (1, 2))
    dt = time.perf_counter() - t0
    return worst <= 1e-8 and dt < 10.0, f"max residual {worst:.2e}, {dt:.2f} s"


def criterion_5():
    violations, n = 0, 0
    for m in (1, 2):
        for i in range(50):
            rng = np.random.default_rng(7000 * m + i)
            r, b = int(rng.integers(1, m + 1)), int(rng.integers(1, 3))
            v = tr.band_limited_data(TRACE_GRID_X, r, b, float(rng.uniform(0.2, 0.5)),
                                     seed=int(rng.integers(2 ** 31)))
            violations += not tr.t0_norm_bound(v, TRACE_GRID, m).holds
            n += 1
    return violations == 0, f"{violations} violations over {n} fixtures"


def criterion_6():
    got = {th: integral_condition(multilog(th)) for th in (0.4, 0.5, 0.6, 1.0, 2.0)}
    labels_ok = all((res.status == "Converges") == (th > 0.5) for th, res in got.items())
    val = got[1.0].value
    ok = labels_ok and val is not None and abs(val - 1.0) <= 1e-6
    return ok, ", ".join(f"{th}: {r.status}" for th, r in got.items()) + f"; value {val!r}"


def criterion_7():
    t0 = time.perf_counter()
    spreads = []
    for alpha, p in (((0,), 0), ((0,), 1), ((1,), 1)):
        s = p + 1 + 0.5
        ratios = [spc.embedding_identity_check(alpha, 0, s, 1, 1, phi).ratio
                  for phi in (multilog(1.0), multilog(2.0))]
        spreads.append(max(ratios) / min(ratios) - 1)
    dt = time.perf_counter() - t0
    return max(spreads) <= 0.01 and dt < 30, f"max ratio spread {max(spreads):.2e}, {dt:.2f} s"


def criterion_8():
    prob = cm.heat_dirichlet()
    E = cm.exceptional_set(prob, 8.0)
    s = np.round(np.arange(2.01, 8.0 + 1e-9, 0.01), 10)
    counts = [cm.condition_count(prob, x) for x in s]
    jumps = [(s[i], s[i + 1]) for i in range(len(s) - 1) if counts[i] != counts[i + 1]]
    jumps_at_E = all(any(a <= e <= b for e in E) for a, b in jumps) and len(jumps) == len(E)
    c3 = cm.condition_count(prob, 3.0)
    ok = E == [3.5, 5.5, 7.5] and c3 == 2 and jumps_at_E
    return ok, f"E = {E}, count(3) = {c3}, {len(jumps)} jumps on the 0.01 scan"


def _random_incompatible(rng):
    kind = "Dirichlet" if rng.random() < 0.5 else "Neumann"
    prob = cm.heat_dirichlet() if kind == "Dirichlet" else cm.heat_neumann()
    a, c, d = rng.integers(1, 5, 3)
    rhs = cm.heat_rhs(f=f"{a}*x*t + {c}*t**2", g0=f"{d}*t**2 + {c}", g1=f"sin({a}*t)",
                      h=f"cos({d}*x) + {a}*x**2")
    s = float(rng.choice([3.0, 4.2, 5.0, 6.3, 7.9]))
    return prob, rhs, s


def criterion_9():
    rng = np.random.default_rng(99)
    t = np.linspace(0, 1, 33)
    worst_res, worst_gap, already = 0.0, 0.0, 0
    for _ in range(20):
        prob, rhs, s = _random_incompatible(rng)
        already += cm.check_compat(prob, rhs, s).satisfied
        once = cm.project_compatible(prob, rhs, s)
        twice = cm.project_compatible(prob, once, s)
        worst_res = max(worst_res, cm.check_compat(prob, once, s, 1e-10).max_residual)
        for key in once.g:
            worst_gap = max(worst_gap, float(np.max(np.abs(once.g[key].sample(t)
                                                           - twice.g[key].sample(t)))))
    ok = already == 0 and worst_res <= 1e-10 and worst_gap <= 1e-10
    return ok, f"max residual {worst_res:.2e}, idempotence gap {worst_gap:.2e}"


def _heat_error(kind, nx, nt):
    spec = hs.HeatProblemSpec(kind, N_x=nx, N_t=nt)
    base = "sin(pi*x)" if kind == "Dirichlet" else "cos(pi*x)"
    u = hs.solve_heat(spec, cm.heat_rhs(h=base))
    exact = cm.Data.expression(f"{base}*exp(-pi**2*t)", ("x", "t")).sample(spec.x, spec.t)
    return float(np.linalg.norm(u.values - exact) / np.linalg.norm(exact))


def criterion_10():
    t0 = time.perf_counter()
    errs = {k: _heat_error(k, 256, 1024) for k in hs.KINDS}
    # time error isolated: fine x-grid, coarse t-grids
    quarter = {k: _heat_error(k, 256, 64) / _heat_error(k, 256, 128) for k in hs.KINDS}
    dt = time.perf_counter() - t0
    ok = (max(errs.values()) <= 1e-3 and all(3.6 <= q <= 4.4 for q in quarter.values())
          and dt < 30)
    return ok, (f"errors {', '.join(f'{k} {e:.2e}' for k, e in errs.items())}; "
                f"N_t doubling ratios {', '.join(f'{q:.3f}' for q in quarter.values())}; "
                f"{dt:.2f} s")


def criterion_11():
    parts, ok = [], True
    for kind in hs.KINDS:
        spec = hs.HeatProblemSpec(kind, N_x=128, N_t=128)
        family = hs.mode_family(kind, 20)
        for phi in (constant(1.0), multilog(1.0)):
            rep = hs.isomorphism_ratio(spec, family, 3.25, phi)
            ok = ok and rep.stable(2.0) and all(x.compatible for x in rep.samples)
            parts.append(f"{kind} {phi.label()}: [{rep.min_ratio:.4g}, {rep.max_ratio:.4g}] "
                         f"factor {rep.refinement_factor:.3f}")
    return ok, "; ".join(parts)


def criterion_12():
    rows = {r.theta: r for r in hs.continuity_sharpness_experiment(
        0, theta_list=(0.0, 0.4, 1.0), growth=1.2)}
    ok = (rows[1.0].classification == "bounded"
          and all(rows[th].classification == "divergent" for th in (0.0, 0.4))
          and all(q >= 1.2 for th in (0.0, 0.4) for q in rows[th].ratios))
    return ok, ", ".join(f"theta {th}: {r.classification} "
                         f"(ratios {', '.join(f'{q:.3f}' for q in r.ratios)})"
                         for th, r in rows.items())


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


def evaluate(i):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ok, detail = CRITERIA[i]()
    return ok, f"criterion {i}: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("i", sorted(CRITERIA))
def test_criterion(i):
    from conftest import ACCEPTANCE_LINES
    ok, line = evaluate(i)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(i) for i in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
