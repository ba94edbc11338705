"""Heat equation u_t - u_xx = f in (0, l) x (0, tau) with Dirichlet or Neumann
data, and the experiments built on it (isomorphism ratios, local regularity,
continuity sharpness).

The solver subtracts a polynomial lift of the boundary data, expands the
remainder in the sine (Dirichlet) or cosine (Neumann) basis on the
endpoint-inclusive x-grid and steps every mode with Crank-Nicolson.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
import sympy as sp
from scipy import fft as sfft
from scipy import integrate

from . import _numerics as nx
from .compatibility import (Data, ParabolicRHS, T, X, check_compat, distance_to_exceptional,
                            heat_dirichlet, heat_neumann, parse_expr)
from .errors import CompatibilityWarning, PreconditionError
from .karamata import KaramataFunction, constant, integral_condition
from .spaces import (Box, FrequencyGrid, SampledField, angular_constant, norm_compact,
                     norm_restriction)
from .symbols import RegularityIndex

KINDS = ("Dirichlet", "Neumann")


@dataclass(frozen=True)
class HeatProblemSpec:
    kind: str = "Dirichlet"
    l: float = 1.0
    tau: float = 1.0
    N_x: int = 256
    N_t: int = 1024
    theta: float = 0.5           # 0.5 = Crank-Nicolson, 1 = backward Euler
    cap: int = 1 << 22

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not (self.l > 0 and self.tau > 0):
            raise ValueError("l and tau must be positive")
        if self.N_x < 4 or self.N_t < 1:
            raise ValueError("need N_x >= 4 and N_t >= 1")
        if (self.N_x + 1) * (self.N_t + 1) > self.cap:
            raise ValueError("grid exceeds the point cap")
        if not 0.5 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [1/2, 1]")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.l, self.N_x + 1)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.tau, self.N_t + 1)

    @property
    def problem(self):
        return (heat_dirichlet if self.kind == "Dirichlet" else heat_neumann)(self.l, self.tau)

    @property
    def boundary_shift(self) -> float:
        """Boundary data live in H^{s/2 - shift}: 1/4 (Dirichlet), 3/4 (Neumann)."""
        return 0.25 if self.kind == "Dirichlet" else 0.75

    def refined(self, factor: int = 2) -> "HeatProblemSpec":
        return replace(self, N_x=self.N_x * factor, N_t=self.N_t * factor)

    def box(self, values) -> SampledField:
        return box_field(values, [(0.0, self.l), (0.0, self.tau)])

    def to_dict(self) -> dict:
        return {"kind": self.kind, "l": self.l, "tau": self.tau, "N_x": self.N_x,
                "N_t": self.N_t, "theta": self.theta}


def box_field(values, bounds) -> SampledField:
    v = np.asarray(values)
    grid = FrequencyGrid.for_box(bounds, v.shape)
    return SampledField(grid, v, Box(tuple(tuple(b) for b in bounds)))


# --- solver ----------------------------------------------------------------------------


def _series(d: Data, t: np.ndarray, order: int) -> list[np.ndarray]:
    """d, d', .., d^(order) on the t-grid."""
    if d.symbolic:
        return [Data(("t",), expr=sp.diff(d.expr, T, k)).sample(t) for k in range(order + 1)]
    out = [d.values]
    for k in range(1, order + 1):
        out.append(nx.fd_derivative(d.values, d.h[0], k))
    return out


def _edge_series(f: Data, x_deriv: int, side: str, l: float, t: np.ndarray) -> list[np.ndarray]:
    """d_x^x_deriv f at x = 0 or l, and its first t-derivative, on the t-grid."""
    if f.symbolic:
        e = sp.diff(f.expr, X, x_deriv).subs(X, 0 if side == "lower" else
                                                sp.Rational(repr(float(l))))
        return _series(Data(("t",), expr=e), t, 1)
    prof = nx.edge_derivative(f.values, f.h[0], x_deriv, side, axis=0)
    return _series(Data(("t",), values=prof, h=f.h[1:]), t, 1)


_P = np.polynomial.Polynomial


def _lift_profiles(kind: str, l: float):
    """Profiles phi_i(x) with W = sum_i c_i(t) phi_i(x).

    Dirichlet: W = g at the ends and W_xx = g' - f there (what the equation
    forces on u_xx), so the remainder's odd extension is C^3.  Neumann: W_x = g
    and W_xxx = g' - f_x at the ends, the even-extension analogue.
    """
    xi = _P([0, 1])
    if kind == "Dirichlet":
        p = -xi ** 3 / 6 + xi ** 2 / 2 - xi / 3
        q = p(1 - xi)
        base = [(1 - xi, 1.0), (xi, 1.0), (p, l ** 2), (q, l ** 2)]
    else:
        c0 = xi ** 3 / 6 - xi ** 4 / 24 - xi ** 2 / 6
        c1 = xi ** 4 / 24 - xi ** 2 / 12
        base = [(xi - xi ** 2 / 2, l), (xi ** 2 / 2, l), (c0, l ** 3), (c1, l ** 3)]
    return base


def _lift(spec: "HeatProblemSpec", rhs: ParabolicRHS, x: np.ndarray, t: np.ndarray):
    """Lift W on the grid and the source correction -W_t + W_xx."""
    g0 = _series(rhs.g[(1, 0)], t, 2)
    g1 = _series(rhs.g[(1, 1)], t, 2)
    xd = 0 if spec.kind == "Dirichlet" else 1
    f0 = _edge_series(rhs.f, xd, "lower", spec.l, t)
    f1 = _edge_series(rhs.f, xd, "upper", spec.l, t)
    coef = [(g0[0], g0[1]), (g1[0], g1[1]),
            (g0[1] - f0[0], g0[2] - f0[1]), (g1[1] - f1[0], g1[2] - f1[1])]
    xi = x / spec.l
    W = np.zeros((x.size, t.size), dtype=np.result_type(*[c[0] for c in coef], float))
    corr = np.zeros_like(W)
    for (poly, scale), (c, dc) in zip(_lift_profiles(spec.kind, spec.l), coef):
        val = scale * poly(xi)
        dd = scale * poly.deriv(2)(xi) / spec.l ** 2
        W = W + np.outer(val, c)
        corr = corr - np.outer(val, dc) + np.outer(dd, c)
    return W, corr


def _forward(kind, v):
    if kind == "Dirichlet":
        return sfft.dst(v[1:-1], type=1, axis=0)
    return sfft.dct(v, type=1, axis=0)


def _inverse(kind, c, shape):
    out = np.zeros(shape, dtype=c.dtype)
    if kind == "Dirichlet":
        out[1:-1] = sfft.idst(c, type=1, axis=0)
    else:
        out[:] = sfft.idct(c, type=1, axis=0)
    return out


def solve_heat(spec: HeatProblemSpec, rhs: ParabolicRHS, compat_s: float = 3.0,
               compat_tol: float = 1e-6) -> SampledField:
    """Discrete solution on the (N_x + 1) x (N_t + 1) endpoint-inclusive grid.

    Data violating the lowest compatibility conditions (checked at ``compat_s``)
    still produce a solution, with a CompatibilityWarning.
    """
    rhs.check_problem(spec.problem)
    rep = check_compat(spec.problem, rhs, compat_s, tol=compat_tol)
    if not rep.satisfied:
        warnings.warn(f"right-hand side violates compatibility at s={compat_s} "
                      f"(max residual {rep.max_residual:.3g})", CompatibilityWarning,
                      stacklevel=2)
    x, t = spec.x, spec.t
    W, corr = _lift(spec, rhs, x, t)
    S = rhs.f.sample(x, t) + corr
    v0 = rhs.h[0].sample(x) - W[:, 0]

    dtype = np.result_type(S.dtype, v0.dtype, float)
    Shat = _forward(spec.kind, S.astype(dtype))
    n_modes = Shat.shape[0]
    k = np.arange(1, n_modes + 1) if spec.kind == "Dirichlet" else np.arange(n_modes)
    lam = (k * math.pi / spec.l) ** 2
    dt = spec.tau / spec.N_t
    th = spec.theta
    left = 1.0 + th * dt * lam
    right = 1.0 - (1.0 - th) * dt * lam
    coef = np.empty((n_modes, t.size), dtype=dtype)
    coef[:, 0] = _forward(spec.kind, v0.astype(dtype))
    for n in range(spec.N_t):
        src = dt * ((1.0 - th) * Shat[:, n] + th * Shat[:, n + 1])
        coef[:, n + 1] = (right * coef[:, n] + src) / left
    u = _inverse(spec.kind, coef, (x.size, t.size)) + W
    return spec.box(u)


# --- Lambda and the right-hand-side norms ----------------------------------------------


def manufactured_rhs(spec: HeatProblemSpec, u) -> ParabolicRHS:
    """Lambda u for a closed-form u(x, t) (exact derivatives)."""
    e = parse_expr(u)
    f = sp.diff(e, T) - sp.diff(e, X, 2)
    bd = e if spec.kind == "Dirichlet" else sp.diff(e, X)
    l = sp.Rational(repr(float(spec.l)))
    return ParabolicRHS.from_exprs(f, {(1, 0): bd.subs(X, 0), (1, 1): bd.subs(X, l)},
                                   (e.subs(T, 0),))


def apply_lambda(spec: HeatProblemSpec, u) -> ParabolicRHS:
    """(Au, boundary traces, u(., 0)); sampled fields use 8th-order differences."""
    if not isinstance(u, SampledField):
        return manufactured_rhs(spec, u)
    v = u.values
    if v.shape != (spec.N_x + 1, spec.N_t + 1):
        raise ValueError("field does not live on the problem grid")
    hx, ht = spec.l / spec.N_x, spec.tau / spec.N_t
    f = nx.fd_derivative(v, ht, 1, axis=1) - nx.fd_derivative(v, hx, 2, axis=0)
    if spec.kind == "Dirichlet":
        g0, g1 = v[0], v[-1]
    else:
        g0 = nx.edge_derivative(v, hx, 1, "lower", axis=0)
        g1 = nx.edge_derivative(v, hx, 1, "upper", axis=0)
    return ParabolicRHS(Data.sampled(f, (hx, ht), ("x", "t")),
                        {(1, 0): Data.sampled(g0, ht, ("t",)),
                         (1, 1): Data.sampled(g1, ht, ("t",))},
                        (Data.sampled(v[:, 0], hx, ("x",)),))


@dataclass(frozen=True)
class QNormParts:
    f: float
    g0: float
    g1: float
    h: float

    @property
    def total(self) -> float:
        return math.sqrt(self.f ** 2 + self.g0 ** 2 + self.g1 ** 2 + self.h ** 2)


def q_space_parts(spec: HeatProblemSpec, bundle: ParabolicRHS, s: float,
                  phi: KaramataFunction | None = None) -> QNormParts:
    if s <= 2:
        raise PreconditionError("need s > 2")
    phi = phi or constant(1.0)
    x, t = spec.x, spec.t
    F = bundle.f.sample(x, t)
    nf = norm_restriction(spec.box(F), RegularityIndex.parabolic(s - 2, 1, phi))
    ig = RegularityIndex(s / 2 - spec.boundary_shift, 1.0, phi)
    ng = [norm_restriction(box_field(bundle.g[(1, lam)].sample(t), [(0.0, spec.tau)]), ig)
          for lam in (0, 1)]
    nh = norm_restriction(box_field(bundle.h[0].sample(x), [(0.0, spec.l)]),
                          RegularityIndex(s - 1, 1.0, phi))
    return QNormParts(nf, ng[0], ng[1], nh)


def q_space_norm(spec: HeatProblemSpec, bundle: ParabolicRHS, s: float,
                 phi: KaramataFunction | None = None) -> float:
    """Root-sum-of-squares of the component norms of the right-hand-side space."""
    return q_space_parts(spec, bundle, s, phi).total


def solution_norm(spec: HeatProblemSpec, u, s: float, phi: KaramataFunction | None = None
                  ) -> float:
    """||u||_{H^{s,s/2;phi}(Omega)} (box restriction norm)."""
    phi = phi or constant(1.0)
    if not isinstance(u, SampledField):
        u = spec.box(Data.expression(u, ("x", "t")).sample(spec.x, spec.t))
    return norm_restriction(u, RegularityIndex.parabolic(s, 1, phi))


# --- isomorphism ratios ------------------------------------------------------------------


def mode_family(kind: str = "Dirichlet", n: int = 20, l: float = 1.0, tau: float = 1.0
                ) -> list[sp.Expr]:
    """Smooth closed-form solutions; every one yields compatible data."""
    L, Tt = sp.Rational(repr(float(l))), sp.Rational(repr(float(tau)))
    out = []
    for k in range(1, n + 1):
        if kind == "Dirichlet":
            base = sp.sin(k * sp.pi * X / L)
            side = (X / L) ** 2
        else:
            base = sp.cos(k * sp.pi * X / L)
            side = (X / L) ** 3
        out.append(base * sp.cos(k * T / Tt) + side * sp.sin(k * T / Tt) / k)
    return out


@dataclass(frozen=True)
class IsoSample:
    index: int
    q_norm: float
    u_norm: float
    ratio: float
    compatible: bool


@dataclass(frozen=True)
class IsomorphismRatioReport:
    s: float
    samples: tuple           # IsoSample on the base grid
    refined: tuple           # IsoSample on the refined grid
    min_ratio: float
    max_ratio: float
    min_ratio_refined: float
    max_ratio_refined: float

    @property
    def refinement_factor(self) -> float:
        pairs = [(self.min_ratio, self.min_ratio_refined), (self.max_ratio, self.max_ratio_refined)]
        return max(max(a / b, b / a) for a, b in pairs)

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio

    def stable(self, factor: float = 2.0) -> bool:
        finite = all(math.isfinite(v) and v > 0 for v in
                     (self.min_ratio, self.max_ratio, self.min_ratio_refined,
                      self.max_ratio_refined))
        return finite and self.refinement_factor <= factor


def _iso_one(args):
    spec, idx, u, s, phi = args
    bundle = manufactured_rhs(spec, u)
    qn = q_space_norm(spec, bundle, s, phi)
    un = solution_norm(spec, u, s, phi)
    ok = check_compat(spec.problem, bundle, s).satisfied
    return IsoSample(idx, qn, un, qn / un if un > 0 else math.nan, ok)


def _run(fn, tasks, jobs):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def isomorphism_ratio(spec: HeatProblemSpec, family: Sequence, s: float,
                      phi: KaramataFunction | None = None, refine: int = 2,
                      jobs: int = 1) -> IsomorphismRatioReport:
    """||Lambda u|| / ||u|| over a family of closed-form solutions, on the problem grid
    and on one refinement."""
    if s <= 2:
        raise PreconditionError("need s > 2")
    if distance_to_exceptional(spec.problem, s) < 1e-12:
        raise PreconditionError(f"s = {s} lies in the exceptional set")
    if not family:
        raise ValueError("empty family")
    phi = phi or constant(1.0)
    family = [parse_expr(u) for u in family]
    levels = []
    for sp_ in (spec, spec.refined(refine)):
        tasks = [(sp_, i, u, s, phi) for i, u in enumerate(family)]
        levels.append(tuple(_run(_iso_one, tasks, jobs)))
    r0 = [x.ratio for x in levels[0]]
    r1 = [x.ratio for x in levels[1]]
    return IsomorphismRatioReport(s, levels[0], levels[1], min(r0), max(r0), min(r1), max(r1))


# --- local regularity ---------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothCutoff:
    """Product of C-infinity plateaus: 1 on the inner boxes, 0 outside the outer ones."""

    x_inner: tuple[float, float]
    x_outer: tuple[float, float]
    t_inner: tuple[float, float]
    t_outer: tuple[float, float]

    @staticmethod
    def _plateau(z, inner, outer):
        up = nx.smooth_step((z - outer[0]) / (inner[0] - outer[0]))
        down = nx.smooth_step((outer[1] - z) / (outer[1] - inner[1]))
        return up * down

    def __call__(self, x, t):
        return np.outer(self._plateau(np.asarray(x), self.x_inner, self.x_outer),
                        self._plateau(np.asarray(t), self.t_inner, self.t_outer))


def zero_cutoff(x, t):
    return np.zeros((np.size(x), np.size(t)))


@dataclass(frozen=True)
class RegularityRow:
    s: float
    N_x: int
    N_t: int
    local_norm: float
    global_norm: float


@dataclass(frozen=True)
class RegularityTable:
    rows: tuple

    def growth(self, s: float, which: str = "local") -> float:
        """Norm ratio between the finest and the coarsest grid at order s."""
        sel = sorted((r for r in self.rows if r.s == s), key=lambda r: r.N_x)
        a = getattr(sel[0], f"{which}_norm")
        b = getattr(sel[-1], f"{which}_norm")
        if a == 0:
            return 1.0 if b == 0 else math.inf
        return b / a

    def step_growth(self, s: float, which: str = "local") -> float:
        """Norm ratio across the last refinement only (Cauchy-type trend)."""
        sel = sorted((r for r in self.rows if r.s == s), key=lambda r: r.N_x)
        a = getattr(sel[-2], f"{which}_norm")
        b = getattr(sel[-1], f"{which}_norm")
        if a == 0:
            return 1.0 if b == 0 else math.inf
        return b / a


def regularity_lift_experiment(spec: HeatProblemSpec, rhs: ParabolicRHS,
                               s_list: Sequence[float], phi: KaramataFunction | None = None,
                               cutoff: Callable | None = None, levels: int = 4
                               ) -> RegularityTable:
    """Local norms ||chi u|| and global norms ||u|| in H^{s,s/2;phi} on successively
    refined grids.  Bounded local norms with growing global ones mark regularity
    that holds inside the cutoff region only."""
    phi = phi or constant(1.0)
    cutoff = cutoff or SmoothCutoff((0.35, 0.65), (0.05, 0.95), (0.3, 0.4), (0.05, 0.65))
    rows = []
    for level in range(levels):
        sp_ = spec.refined(2 ** level) if level else spec
        u = solve_heat(sp_, rhs)
        chi = cutoff(sp_.x * (1.0 / sp_.l), sp_.t * (1.0 / sp_.tau))
        local = sp_.box(chi * u.values)
        for s in s_list:
            idx = RegularityIndex.parabolic(s, 1, phi)
            rows.append(RegularityRow(float(s), sp_.N_x, sp_.N_t,
                                      norm_compact(local, idx), norm_restriction(u, idx)))
    return RegularityTable(tuple(rows))


# --- continuity sharpness ----------------------------------------------------------------


@dataclass(frozen=True)
class ContinuityRow:
    theta: float
    L: tuple                 # ln R per cutoff
    S: tuple                 # sup |d^p w| over unit-norm witnesses band-limited to r <= R
    ratios: tuple            # S(L_{i+1}) / S(L_i)
    classification: str      # "bounded" | "divergent" | "undecided"
    integral_status: str


def witness_sup_ratio(p: int, b: int, n: int, phi: KaramataFunction, L: float) -> float:
    """sup |d_{x_1}^p w(0)| / ||w|| over w band-limited to r_gamma <= e^L, s = p + b + n/2.

    The extremal witness has ŵ = xi_1^p / mu^2 on the band, so the ratio is
    (2 pi)^{-(n+1)/2} (int_{r <= R} xi_1^{2p} / mu^2)^{1/2}; in u = ln r the
    integral is c int_0^L (1 - e^{-2u})^{s-1} phi(e^u)^{-2} du.
    """
    s = p + b + n / 2
    c = angular_constant((p,) + (0,) * (n - 1), 0, b)

    def integrand(u):
        if u <= 0:
            return 0.0
        return math.exp((s - 1) * math.log(-math.expm1(-2 * u))
                        - 2 * float(phi.log_phi_of_log(u)))

    edges = [0.0] + [e for e in (0.5, 1, 3, 10, 30, 100, 300, 1000, 3000) if e < L] + [L]
    total = sum(integrate.quad(integrand, a, bb, epsabs=0.0, epsrel=1e-11, limit=200)[0]
                for a, bb in zip(edges[:-1], edges[1:]))
    return (2 * math.pi) ** (-(n + 1) / 2) * math.sqrt(c * total)


def witness_sup_ratio_grid(p: int, phi: KaramataFunction, L: float, d_xi: float = 0.01,
                           d_eta: float = 0.01) -> float:
    """Same ratio for b = n = 1 from the witness itself on a frequency grid."""
    s = p + 1.5
    R2 = math.exp(2 * L) - 1.0
    xi = np.arange(-math.sqrt(R2), math.sqrt(R2) + d_xi / 2, d_xi)
    eta = np.arange(-R2, R2 + d_eta / 2, d_eta)
    XI, ETA = np.meshgrid(xi, eta, indexing="ij")
    r2 = 1.0 + XI ** 2 + np.abs(ETA)
    band = r2 <= R2 + 1.0
    r = np.sqrt(r2)
    mu = np.exp(s * np.log(r) + phi.log_eval(r))
    w_hat = np.where(band, XI ** p / mu ** 2, 0.0)
    cell = d_xi * d_eta
    sup = abs(np.sum((1j * XI) ** p * w_hat)) * cell / (2 * math.pi)
    norm = math.sqrt(float(np.sum(mu ** 2 * w_hat ** 2)) * cell)
    return sup / norm


def continuity_sharpness_experiment(p: int, b: int = 1, n: int = 1,
                                    theta_list: Sequence[float] = (0.0, 0.4, 1.0),
                                    L_list: Sequence[float] = (1, 10, 100, 1000),
                                    growth: float = 1.2, settle: float = 1.05
                                    ) -> list[ContinuityRow]:
    """Sup-norm of the p-th derivative of normalized band-limited witnesses as the
    cutoff R = e^L grows, for phi_theta = (1 + ln r)^theta.

    divergent: every decade multiplies S by at least ``growth``;
    bounded: the last decade changes S by less than ``settle``.
    """
    from .karamata import multilog
    rows = []
    for th in theta_list:
        phi = constant(1.0) if th == 0 else multilog(th)
        S = [witness_sup_ratio(p, b, n, phi, L) for L in L_list]
        ratios = [b_ / a for a, b_ in zip(S[:-1], S[1:])]
        if all(q >= growth for q in ratios):
            cls = "divergent"
        elif ratios and ratios[-1] < settle:
            cls = "bounded"
        else:
            cls = "undecided"
        status = integral_condition(phi).status
        rows.append(ContinuityRow(float(th), tuple(float(v) for v in L_list), tuple(S),
                                  tuple(ratios), cls, status))
    return rows
