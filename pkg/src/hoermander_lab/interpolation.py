"""Quadratic interpolation with a function parameter on finite Hilbert pairs.

A regular pair [X0, X1] of dimension d is modelled by the spectrum of its
generating operator J in an X0-orthonormal basis, so that

    ||v||_{X_psi} = ||psi(J) v||_{X0} = (sum_i psi(lambda_i)^2 |v_i|^2)^{1/2}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import linalg

from .errors import PreconditionError
from .karamata import KaramataFunction
from .symbols import r_gamma


@dataclass(frozen=True)
class HilbertPairModel:
    lambdas: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in np.ravel(self.lambdas))
        if not lam or any(not (x > 0 and math.isfinite(x)) for x in lam):
            raise ValueError("the spectrum must be non-empty, positive and finite")
        object.__setattr__(self, "lambdas", lam)

    @property
    def dim(self) -> int:
        return len(self.lambdas)

    @property
    def spectrum(self) -> np.ndarray:
        return np.asarray(self.lambdas)

    @classmethod
    def log_spaced(cls, d: int, lam_max: float = 1e6) -> "HilbertPairModel":
        return cls(tuple(np.geomspace(1.0, lam_max, d)))

    def to_dict(self) -> dict:
        return {"lambda": list(self.lambdas)}


def concat_models(models: Sequence[HilbertPairModel]) -> HilbertPairModel:
    return HilbertPairModel(tuple(x for m in models for x in m.lambdas))


@dataclass(frozen=True)
class InterpolationParameter:
    """A positive function psi on (0, inf) with its provenance."""

    func: Callable
    provenance: str                     # "FromTriple" | "Power" | "Composed" | "Custom"
    theta: float | None = None
    data: tuple = ()

    def __call__(self, r):
        arr = np.asarray(r, dtype=float)
        if np.any(arr <= 0):
            raise ValueError("interpolation parameters live on (0, inf)")
        out = np.asarray(self.func(arr), dtype=float)
        return float(out) if out.ndim == 0 else out


def make_interp_param(s0: float, s: float, s1: float, phi: KaramataFunction
                      ) -> InterpolationParameter:
    """psi(r) = r^{(s-s0)/(s1-s0)} phi(r^{1/(s1-s0)}) for r >= 1, phi(1) below."""
    if not (s0 < s < s1):
        raise PreconditionError("need s0 < s < s1")
    theta = (s - s0) / (s1 - s0)
    width = s1 - s0
    phi1 = float(phi(1.0))

    def psi(r):
        r = np.asarray(r, dtype=float)
        lr = np.log(np.maximum(r, 1.0))
        val = np.exp(theta * lr + phi.log_phi_of_log(lr / width))
        return np.where(r >= 1.0, val, phi1)

    return InterpolationParameter(psi, "FromTriple", theta, (s0, s, s1, phi))


def power_param(theta: float) -> InterpolationParameter:
    return InterpolationParameter(lambda r: np.asarray(r, dtype=float) ** theta, "Power",
                                  float(theta), (theta,))


def _eval(f, r):
    return np.asarray(f(r), dtype=float)


def reiterate(chi, eta, psi, probe=None, slope_tol: float = 1e-6) -> InterpolationParameter:
    """omega(r) = chi(r) psi(eta(r)/chi(r)).

    Requires chi/eta bounded near infinity; this is checked by the log-log
    slope of chi/eta over the probe set (must not be positive).
    """
    r = np.geomspace(1e3, 1e15, 61) if probe is None else np.asarray(probe, dtype=float)
    ratio = _eval(chi, r) / _eval(eta, r)
    if not np.all(np.isfinite(ratio)):
        raise PreconditionError("chi/eta is not finite on the probe set")
    top = r >= r[-1] ** 0.5 * r[0] ** 0.5
    slope = np.polyfit(np.log(r[top]), np.log(ratio[top]), 1)[0]
    if slope > slope_tol:
        raise PreconditionError(f"chi/eta grows near infinity (log-log slope {slope:.3g})")

    def omega(x):
        c = _eval(chi, x)
        return c * _eval(psi, _eval(eta, x) / c)

    return InterpolationParameter(omega, "Composed", None, (chi, eta, psi))


def x_psi_norm(model: HilbertPairModel, psi, v) -> float:
    v = np.asarray(v)
    if v.shape != (model.dim,):
        raise ValueError(f"vector of shape {v.shape} does not fit a model of dimension {model.dim}")
    w = _eval(psi, model.spectrum)
    return float(np.sqrt(np.sum(w ** 2 * np.abs(v) ** 2)))


def direct_sum_norm(models: Sequence[HilbertPairModel], psi, vectors: Sequence) -> float:
    if len(models) != len(vectors):
        raise ValueError("models and vectors are not aligned")
    return float(np.sqrt(sum(x_psi_norm(m, psi, v) ** 2 for m, v in zip(models, vectors))))


# --- multiplier identity -------------------------------------------------------


def multiplier_identity_check(s0: float, s: float, s1: float, gamma: float,
                              phi: KaramataFunction, grid) -> float:
    """max |psi(r^{s1-s0}) r^{s0} - r^s phi(r)| / (r^s phi(r)) over the grid,
    r = r_gamma(xi', xi_k).

    ``grid`` is ``(xi_prime_axis, xi_k_axis)`` (1-D arrays forming a tensor
    mesh) or a FrequencyGrid-like object with ``.freqs``.
    """
    psi = make_interp_param(s0, s, s1, phi)
    if hasattr(grid, "freqs"):
        from .symbols import r_gamma_mesh
        r = r_gamma_mesh(grid.freqs, gamma)
    else:
        xp, xk = (np.asarray(a, dtype=float) for a in grid)
        XP, XK = np.meshgrid(xp, xk, indexing="ij")
        r = r_gamma(XP, XK, gamma)
    lhs = psi(r ** (s1 - s0)) * r ** s0
    rhs = r ** s * phi(r)
    return float(np.max(np.abs(lhs - rhs) / rhs))


def midpoint_parameters(s: float, eps: float, delta: float, phi: KaramataFunction):
    """(chi, eta, omega) for [H^{s-eps;phi}, H^{s+eps;phi}]_{1/2} over the outer pair
    (s - eps - delta, s + eps + delta)."""
    if not (s > eps > 0 and delta > 0 and s - eps - delta > 0):
        raise PreconditionError("need s > eps > 0, delta > 0 and s - eps - delta > 0")
    lo, hi = s - eps - delta, s + eps + delta
    chi = make_interp_param(lo, s - eps, hi, phi)
    eta = make_interp_param(lo, s + eps, hi, phi)
    omega = reiterate(chi, eta, power_param(0.5))
    return chi, eta, omega


# --- operators -------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorInterpolationReport:
    norm0: float
    norm1: float
    norm_psi: float
    C: float                 # norm_psi / max(norm0, norm1)

    def bound_holds(self, C: float = 1.0 + 1e-12) -> bool:
        return self.norm_psi <= C * max(self.norm0, self.norm1)


def operator_interpolation_check(model_x: HilbertPairModel, model_y: HilbertPairModel,
                                 T, psi) -> OperatorInterpolationReport:
    T = np.asarray(T)
    if T.shape != (model_y.dim, model_x.dim):
        raise ValueError("T must map model_x coefficients to model_y coefficients")
    lx, ly = model_x.spectrum, model_y.spectrum

    def opnorm(wy, wx):
        return float(np.linalg.norm(wy[:, None] * T / wx[None, :], 2))

    n0 = opnorm(np.ones_like(ly), np.ones_like(lx))
    n1 = opnorm(ly, lx)
    npsi = opnorm(_eval(psi, ly), _eval(psi, lx))
    if not all(math.isfinite(x) for x in (n0, n1, npsi)):
        raise ValueError("operator norms are not finite")
    m = max(n0, n1)
    return OperatorInterpolationReport(n0, n1, npsi, npsi / m if m > 0 else 0.0)


@dataclass(frozen=True)
class SubspaceReport:
    rank: int
    sup_x_over_y: float      # sup ||v||_{X_psi} / ||v||_{[Y0,Y1]_psi}
    sup_y_over_x: float
    p_norm0: float
    p_norm1: float


def subspace_interpolation_demo(model: HilbertPairModel, P, psi, tol: float = 1e-10
                                ) -> SubspaceReport:
    """Compare the X_psi norm on Y = range(P) with the intrinsic norm of the pair
    [Y0, Y1] (Y0, Y1 carry the restricted X0, X1 norms)."""
    P = np.asarray(P, dtype=float)
    d = model.dim
    if P.shape != (d, d):
        raise ValueError("P must be d x d")
    scale = max(np.linalg.norm(P, 2), 1.0)
    if np.linalg.norm(P @ P - P, 2) > tol * scale:
        raise PreconditionError("P is not idempotent")
    lam = model.spectrum
    p0 = float(np.linalg.norm(P, 2))
    p1 = float(np.linalg.norm(lam[:, None] * P / lam[None, :], 2))
    if not (math.isfinite(p0) and math.isfinite(p1)):
        raise PreconditionError("P is not bounded")
    u, sv, _ = np.linalg.svd(P)
    rank = int(np.sum(sv > tol * sv[0])) if sv.size and sv[0] > 0 else 0
    if rank == 0:
        return SubspaceReport(0, 1.0, 1.0, p0, p1)
    B = u[:, :rank]                       # X0-orthonormal basis of range(P)
    G1 = B.T @ (lam[:, None] ** 2 * B)
    mu2, V = linalg.eigh(G1)              # J_Y^2 in the basis B, G0 = I
    mu = np.sqrt(np.maximum(mu2, 0.0))
    # [Y0,Y1]_psi Gram matrix in the basis B
    Gy = V @ np.diag(_eval(psi, mu) ** 2) @ V.T
    w = _eval(psi, lam)
    Gx = B.T @ (w[:, None] ** 2 * B)
    ev = linalg.eigh(Gx, Gy, eigvals_only=True)
    return SubspaceReport(rank, float(np.sqrt(ev.max())), float(np.sqrt(1.0 / ev.min())), p0, p1)
