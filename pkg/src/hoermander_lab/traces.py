"""Cauchy-data operator R0 and its right inverse T0 on the torus model.

Fields live on an (n_x + 1)-dimensional FrequencyGrid whose last axis is t;
the t-grid must contain t = 0 (the default centred origin does).

    R0 w = (w, d_t w, ..., d_t^{r-1} w) at t = 0
    T0 v = F_x^{-1}[ beta(<xi>^{2b} t) sum_k v̂_k(xi) t^k / k! ]
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _numerics as nx
from .errors import PreconditionError, ResolutionError
from .spaces import FrequencyGrid, FullSpace, SampledField, norm_full
from .symbols import RegularityIndex

BETA_INNER = 0.5
BETA_OUTER = 2.0


def bump_beta(tau):
    """1 on |tau| <= 1/2, 0 on |tau| >= 2, smooth exp(-1/x) step in between."""
    a = np.abs(np.asarray(tau, dtype=float))
    out = nx.smooth_step((BETA_OUTER - a) / (BETA_OUTER - BETA_INNER))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CauchyData:
    """Components v_0..v_{r-1} on a shared x-grid; ``values`` has shape (r, *N_x)."""

    grid: FrequencyGrid
    values: np.ndarray
    b: int

    def __post_init__(self):
        vals = np.asarray(self.values)
        object.__setattr__(self, "values", vals)
        if vals.shape[1:] != self.grid.N:
            raise ValueError("components must share the x-grid")

    @property
    def r(self) -> int:
        return self.values.shape[0]

    def component(self, k: int) -> SampledField:
        return SampledField(self.grid, self.values[k])

    def to_dict(self) -> dict:
        return {"r": self.r, "b": self.b, "grid": self.grid.to_dict()}


def _x_grid(grid: FrequencyGrid) -> FrequencyGrid:
    return FrequencyGrid(grid.N[:-1], grid.L[:-1], grid.origin[:-1])


def _t0_index(grid: FrequencyGrid) -> int:
    t = grid.coords(grid.dims - 1)
    i = int(np.argmin(np.abs(t)))
    if abs(t[i]) > 1e-12 * grid.L[-1]:
        raise PreconditionError("the t-grid does not contain t = 0")
    return i


def cauchy_data(w: SampledField, r: int, b: int, tail_tol: float = 1e-8) -> CauchyData:
    """k-th component = k-th spectral t-derivative at t = 0, k < r."""
    grid = w.grid
    if grid.dims < 2:
        raise ValueError("need at least one x-axis and the t-axis")
    i0 = _t0_index(grid)
    spec = np.fft.fft(w.values, axis=-1)
    frac = nx.tail_fraction(spec, axis=-1)
    if frac > tail_tol:
        raise ResolutionError(f"t-spectrum tail fraction {frac:.2e} exceeds {tail_tol:.0e}; "
                              "spectral t-derivatives are unreliable")
    comps = [nx.spectral_derivative(w.values, grid.L[-1], k, axis=-1)[..., i0] for k in range(r)]
    return CauchyData(_x_grid(grid), np.stack(comps), int(b))


def _bracket(grid: FrequencyGrid) -> np.ndarray:
    """<xi> = (1 + |xi|^2)^{1/2} on the x-frequency mesh."""
    freqs = grid.freqs
    total = np.zeros(grid.N)
    for ax, f in enumerate(freqs):
        shape = [1] * grid.dims
        shape[ax] = -1
        total = total + (f ** 2).reshape(shape)
    return np.sqrt(1.0 + total)


def extend_T0(v: CauchyData, grid: FrequencyGrid, tail_tol: float = 1e-9,
              support_tol: float = 1e-14) -> SampledField:
    """T0 v sampled on ``grid`` (x-axes must match v's grid, last axis t)."""
    xg = _x_grid(grid)
    if xg.N != v.grid.N or not np.allclose(xg.L, v.grid.L):
        raise ValueError("x-part of the target grid does not match the Cauchy data")
    t = grid.coords(grid.dims - 1)
    _t0_index(grid)
    if BETA_OUTER >= min(-t[0], t[-1]):
        raise PreconditionError(f"t-period {grid.L[-1]} cannot hold the support |t| <= "
                                f"{BETA_OUTER} of the widest profile")
    x_axes = tuple(range(v.grid.dims))
    vhat = np.fft.fftn(v.values, axes=tuple(a + 1 for a in x_axes))
    q = _bracket(v.grid) ** (2 * v.b)

    # resolution of the narrowest profile that actually carries data
    mag = np.max(np.abs(vhat), axis=0)
    if mag.max() > 0:
        live = mag > support_tol * mag.max()
        q_max = float(q[live].max())
        prof = bump_beta(q_max * t)
        frac = nx.tail_fraction(np.fft.fft(prof))
        if frac > tail_tol:
            xi = math.sqrt(q_max ** (1.0 / v.b) - 1.0)
            raise ResolutionError(f"t-grid too coarse for beta(<xi>^(2b) t) at |xi| = {xi:.4g} "
                                  f"(tail fraction {frac:.2e})")

    shape_q = q.shape + (1,)
    prof = bump_beta(q.reshape(shape_q) * t)
    poly = np.zeros(q.shape + (t.size,), dtype=complex)
    for k in range(v.r):
        poly += vhat[k][..., None] * (t ** k / math.factorial(k))
    out = np.fft.ifftn(prof * poly, axes=x_axes)
    if np.isrealobj(v.values):
        out = out.real
    return SampledField(grid, out, FullSpace())


def verify_right_inverse(v: CauchyData, grid: FrequencyGrid) -> float:
    """max |R0 T0 v - v| / max |v| (0 for v = 0)."""
    w = extend_T0(v, grid)
    back = cauchy_data(w, v.r, v.b)
    scale = float(np.max(np.abs(v.values)))
    if scale == 0.0:
        return float(np.max(np.abs(back.values)))
    return float(np.max(np.abs(back.values - v.values)) / scale)


def norm_2bm_m(w: SampledField, b: int, m: int) -> float:
    """(||w||^2 + sum_j ||d_{x_j}^{2bm} w||^2 + ||d_t^m w||^2)^{1/2} via Parseval."""
    grid = w.grid
    power = np.abs(np.fft.fftn(w.values)) ** 2 * \
        (math.prod(grid.h) ** 2 / (2 * math.pi) ** grid.dims)
    if m == 0:
        weight = 1.0
    else:
        freqs = grid.freqs
        weight = np.ones(grid.N)
        for ax, f in enumerate(freqs):
            shape = [1] * grid.dims
            shape[ax] = -1
            e = 2 * m if ax == grid.dims - 1 else 4 * b * m
            weight = weight + (np.abs(f) ** e).reshape(shape)
    return math.sqrt(float(np.sum(weight * power)) * grid.cell_volume)


@lru_cache(maxsize=128)
def t0_bound_constants(k: int, m: int, n_points: int = 8192) -> tuple[float, float]:
    """c1 = int |d_tau^m (beta tau^k)|^2, c2 = int |tau^k beta|^2 over R."""
    if k < 0 or m < 0:
        raise ValueError("k and m must be non-negative")
    period = 4.0 * BETA_OUTER
    tau = -period / 2 + period / n_points * np.arange(n_points)
    f = bump_beta(tau) * tau ** k
    h = period / n_points
    d = nx.spectral_derivative(f, period, m)
    return float(np.sum(d ** 2) * h), float(np.sum(f ** 2) * h)


def t0_bound_constant(r: int, m: int, n_total: int) -> float:
    """C in ||T0 v||^2_{2bm,m} <= C sum_k ||v_k||^2_{H^{2bm-2bk-b}}.

    Per frequency the profile has r terms, so |sum a_k|^2 <= r sum |a_k|^2;
    the x-derivative weights are bounded by (n_total - 1) <xi>^{4bm} and the
    zero-order term by <xi>^{4bm}.
    """
    worst = 0.0
    for k in range(r):
        c1, c2 = t0_bound_constants(k, m)
        worst = max(worst, (n_total * c2 + c1) / math.factorial(k) ** 2)
    return r * worst


def component_norms_sq(v: CauchyData, m: int) -> np.ndarray:
    """||v_k||^2 in H^{2bm - 2bk - b}(R^{n_x}) for each k."""
    out = []
    for k in range(v.r):
        idx = RegularityIndex(2 * v.b * m - 2 * v.b * k - v.b, 1.0)
        out.append(norm_full(v.component(k), idx, shell_warn=None) ** 2)
    return np.array(out)


@dataclass(frozen=True)
class T0BoundReport:
    lhs: float               # ||T0 v||^2_{2bm,m}
    rhs: float               # C sum_k ||v_k||^2
    C: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def t0_norm_bound(v: CauchyData, grid: FrequencyGrid, m: int) -> T0BoundReport:
    w = extend_T0(v, grid)
    lhs = norm_2bm_m(w, v.b, m) ** 2
    C = t0_bound_constant(v.r, m, grid.dims)
    return T0BoundReport(lhs, C * float(np.sum(component_norms_sq(v, m))), C)


def band_limited_data(grid_x: FrequencyGrid, r: int, b: int, xi_max: float = 1.0,
                      seed: int = 0) -> CauchyData:
    """Random real Cauchy data whose x-spectrum is supported in |xi| <= xi_max."""
    rng = np.random.default_rng(seed)
    freqs = grid_x.freqs
    mask = np.ones(grid_x.N, dtype=bool)
    total = np.zeros(grid_x.N)
    for ax, f in enumerate(freqs):
        shape = [1] * grid_x.dims
        shape[ax] = -1
        total = total + (f ** 2).reshape(shape)
    mask = total <= xi_max ** 2
    comps = []
    for _ in range(r):
        hat = (rng.normal(size=grid_x.N) + 1j * rng.normal(size=grid_x.N)) * mask
        comps.append(np.fft.ifftn(hat).real * math.prod(grid_x.N) ** 0.5)
    return CauchyData(grid_x, np.stack(comps), b)
