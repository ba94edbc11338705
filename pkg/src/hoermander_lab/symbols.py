"""Anisotropic weights mu(xi) = r_gamma(xi)^s phi(r_gamma(xi)) and the
Hoermander temperedness condition mu(xi)/mu(eta) <= c (1 + |xi - eta|)^l.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, PreconditionError
from .karamata import KaramataFunction, constant


@dataclass(frozen=True)
class RegularityIndex:
    """(s, gamma, phi); ``b`` is the parabolic weight when gamma = 1/(2b)."""

    s: float
    gamma: float = 1.0
    phi: KaramataFunction = constant(1.0)
    b: int | None = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.b is not None:
            if int(self.b) != self.b or self.b < 1:
                raise ValueError("b must be a positive integer")
            if self.gamma != 1.0 / (2 * self.b):
                raise ValueError(f"gamma={self.gamma} is inconsistent with b={self.b}")

    @classmethod
    def parabolic(cls, s: float, b: int, phi: KaramataFunction | None = None):
        return cls(s=float(s), gamma=1.0 / (2 * b), phi=phi or constant(1.0), b=int(b))

    def with_s(self, s: float) -> "RegularityIndex":
        return RegularityIndex(float(s), self.gamma, self.phi, self.b)

    def to_dict(self) -> dict:
        d = {"s": self.s, "phi": self.phi.to_dict()}
        if self.b is not None:
            d["b"] = self.b
        else:
            d["gamma"] = self.gamma
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RegularityIndex":
        phi = KaramataFunction.from_dict(d["phi"]) if "phi" in d else constant(1.0)
        if "b" in d:
            return cls.parabolic(d["s"], int(d["b"]), phi)
        return cls(float(d["s"]), float(d.get("gamma", 1.0)), phi)


@dataclass(frozen=True)
class HoermanderConstants:
    c: float
    l: float
    c_gamma: float
    l_gamma: float
    c_phi: float
    exponent: float          # max{s+1, 1-s, 0}
    violations: int = 0
    n_pairs: int = 0


def _prime_sq(xi_prime):
    xp = np.asarray(xi_prime, dtype=float)
    if xp.ndim == 0:
        return xp ** 2
    return np.sum(xp ** 2, axis=-1)


def r_gamma(xi_prime, xi_k, gamma: float):
    """(1 + |xi'|^2 + |xi_k|^{2 gamma})^{1/2}; the last axis of ``xi_prime``
    holds its components (a scalar means one component)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return np.sqrt(1.0 + _prime_sq(xi_prime) + np.abs(np.asarray(xi_k, dtype=float)) ** (2 * gamma))


def _mu_from_r(r, s, phi):
    return np.exp(s * np.log(r) + phi.log_eval(r))


def mu_aniso(xi_prime, xi_k, index: RegularityIndex):
    r = r_gamma(xi_prime, xi_k, index.gamma)
    out = _mu_from_r(r, index.s, index.phi)
    return float(out) if np.ndim(out) == 0 else out


def mu_iso(xi, s: float, phi: KaramataFunction | None = None):
    phi = phi or constant(1.0)
    x = np.asarray(xi, dtype=float)
    sq = x ** 2 if x.ndim == 0 else np.sum(x ** 2, axis=-1)
    out = _mu_from_r(np.sqrt(1.0 + sq), s, phi)
    return float(out) if np.ndim(out) == 0 else out


def r_gamma_mesh(freqs: Sequence[np.ndarray], gamma: float) -> np.ndarray:
    """r_gamma on the tensor mesh of 1-D frequency arrays; the last is xi_k."""
    *prime, last = [np.asarray(f, dtype=float) for f in freqs]
    k = len(freqs)
    total = np.zeros([len(f) for f in freqs])
    for ax, f in enumerate(prime):
        shape = [1] * k
        shape[ax] = len(f)
        total = total + (f ** 2).reshape(shape)
    shape = [1] * k
    shape[-1] = len(last)
    total = total + (np.abs(last) ** (2 * gamma)).reshape(shape)
    return np.sqrt(1.0 + total)


def mu_mesh(freqs: Sequence[np.ndarray], index: RegularityIndex) -> np.ndarray:
    return _mu_from_r(r_gamma_mesh(freqs, index.gamma), index.s, index.phi)


# --- constants ---------------------------------------------------------------


def estimate_c_phi(phi: KaramataFunction, lam_max: float = 1e3, r_max: float = 1e6,
                   n: int = 121) -> float:
    """Smallest c with phi(lam r)/phi(r) <= c lam and phi(r)/phi(lam r) <= c lam on a log
    grid, doubled as a safety margin.  An exact value of 1 (no excess anywhere) is
    kept as is."""
    lam = np.geomspace(1.0, lam_max, n)[:, None]
    r = np.geomspace(1.0, r_max, n)[None, :]
    lp_r = phi.log_eval(r)
    lp_lr = phi.log_eval(lam * r)
    ll = np.log(lam)
    worst = float(np.max(np.maximum(lp_lr - lp_r - ll, lp_r - lp_lr - ll)))
    if worst <= 1e-12:
        return 1.0
    return 2.0 * math.exp(worst)


def sample_pairs(k: int, n_pairs: int, seed: int = 0, max_scale: float = 1e3):
    """Random frequency pairs with log-uniform magnitudes, half of them close."""
    rng = np.random.default_rng(seed)
    def draw(n):
        mag = 10.0 ** rng.uniform(-2, math.log10(max_scale), size=(n, k))
        return mag * rng.choice([-1.0, 1.0], size=(n, k))
    xi = draw(n_pairs)
    eta = draw(n_pairs)
    half = n_pairs // 2
    eta[:half] = xi[:half] + draw(half) / max_scale * 10.0 ** rng.uniform(0, 3, size=(half, 1))
    return xi, eta


def estimate_gamma_constants(gamma: float, xi: np.ndarray, eta: np.ndarray,
                             margin: float = 1.05) -> tuple[float, float]:
    """(c_gamma, l_gamma) with r_gamma(xi)/r_gamma(eta) <= c_gamma (1+|xi-eta|)^l_gamma.

    Slope from a least-squares fit through the binned upper envelope of
    log-ratio versus log(1+|xi-eta|); the intercept then covers every pair.
    """
    ra = r_gamma(xi[:, :-1], xi[:, -1], gamma)
    rb = r_gamma(eta[:, :-1], eta[:, -1], gamma)
    y = np.abs(np.log(ra) - np.log(rb))
    x = np.log1p(np.linalg.norm(xi - eta, axis=1))
    edges = np.quantile(x, np.linspace(0, 1, 21))
    bx, by = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (x >= a) & (x <= b)
        if np.any(sel):
            i = np.argmax(np.where(sel, y, -np.inf))
            bx.append(x[i])
            by.append(y[i])
    slope = float(np.polyfit(bx, by, 1)[0]) if len(bx) > 1 else 1.0
    l_gamma = max(slope, 1e-3)
    c_gamma = max(1.0, margin * math.exp(float(np.max(y - l_gamma * x))))
    return c_gamma, l_gamma


def hoermander_ratio_violations(index: RegularityIndex, c: float, l: float,
                                xi: np.ndarray, eta: np.ndarray, rtol: float = 1e-12) -> int:
    lhs = np.log(mu_aniso(xi[:, :-1], xi[:, -1], index)) - \
        np.log(mu_aniso(eta[:, :-1], eta[:, -1], index))
    rhs = math.log(c) + l * np.log1p(np.linalg.norm(xi - eta, axis=1))
    return int(np.sum(lhs > rhs + rtol))


def hoermander_constants(index: RegularityIndex, k: int = 2, n_pairs: int = 10_000,
                         seed: int = 0) -> HoermanderConstants:
    """c = c_phi c_gamma^E and l = l_gamma E with E = max{s+1, 1-s, 0}, re-checked on
    the sampled pairs (both orders of each pair)."""
    xi, eta = sample_pairs(k, n_pairs, seed)
    c_gamma, l_gamma = estimate_gamma_constants(index.gamma, xi, eta)
    c_phi = estimate_c_phi(index.phi)
    e = max(index.s + 1.0, 1.0 - index.s, 0.0)
    c = c_phi * c_gamma ** e
    l = l_gamma * e
    bad = hoermander_ratio_violations(index, c, l, xi, eta) + \
        hoermander_ratio_violations(index, c, l, eta, xi)
    if bad:
        raise ConsistencyError(
            f"{bad} sampled pairs violate the derived condition (c={c:.4g}, l={l:.4g}); "
            "the c_phi estimate is too small for this phi")
    return HoermanderConstants(c, l, c_gamma, l_gamma, c_phi, e, 0, 2 * n_pairs)


# --- embedding chain ---------------------------------------------------------


def _grid_r(grid, gamma):
    if hasattr(grid, "freqs"):
        return r_gamma_mesh(grid.freqs, gamma).ravel()
    if isinstance(grid, tuple) and len(grid) == 2:
        return np.ravel(r_gamma(grid[0], grid[1], gamma))
    return np.ravel(np.asarray(grid, dtype=float))


def embedding_chain_check(index0: RegularityIndex, index: RegularityIndex,
                          index1: RegularityIndex, grid, rtol: float = 1e-12):
    """Constants c0, c1 with c0 mu0 <= mu <= c1 mu1 on the grid, and the number of grid
    points violating them after a re-scan.

    ``grid`` is a FrequencyGrid-like object (``.freqs``), a pair
    ``(xi_prime, xi_k)`` of arrays, or a flat array of r_gamma values.
    """
    if not (index0.s < index.s < index1.s):
        raise PreconditionError("need s0 < s < s1")
    if not (index0.gamma == index.gamma == index1.gamma):
        raise PreconditionError("the chain needs a common gamma")
    r = _grid_r(grid, index.gamma)
    lmu = np.log(_mu_from_r(r, index.s, index.phi))
    lmu0 = np.log(_mu_from_r(r, index0.s, index0.phi))
    lmu1 = np.log(_mu_from_r(r, index1.s, index1.phi))
    c0 = float(np.exp(np.min(lmu - lmu0)))
    c1 = float(np.exp(np.max(lmu - lmu1)))
    viol = int(np.sum(math.log(c0) + lmu0 > lmu + rtol) + np.sum(lmu > math.log(c1) + lmu1 + rtol))
    return c0, c1, viol
