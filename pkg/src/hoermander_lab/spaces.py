"""Discrete Hoermander-space norms.

R^k is modelled by a periodic torus.  With spacing h = L/N the unitary
transform ŵ(xi) = (2 pi)^{-k/2} int w(x) e^{-i x xi} dx is approximated by a
scaled FFT, and

    ||w||^2 = sum_xi mu(xi)^2 |ŵ(xi)|^2 dxi,   dxi = prod 2 pi / L_i,

which satisfies Parseval exactly on the grid.  Norms on boxes are computed
through an explicit extension (an upper bound for the quotient norm), norms
of H_+ fields through extension by zero across t = 0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special

from . import _numerics as nx
from .errors import AliasingWarning, IndeterminateError, PreconditionError, ResolutionError
from .karamata import IntegralConditionResult, KaramataFunction, QuadratureConfig, \
    integral_condition
from .symbols import RegularityIndex, mu_mesh

STRATEGIES = ("EvenReflectPeriodize", "ZeroPadTaper")
DEFAULT_POINT_CAP = 1 << 24


@dataclass(frozen=True)
class FrequencyGrid:
    """Tensor grid with N_i points of spacing L_i/N_i per axis (periodic)."""

    N: tuple[int, ...]
    L: tuple[float, ...]
    origin: tuple[float, ...] | None = None
    cap: int = DEFAULT_POINT_CAP

    def __post_init__(self):
        N = tuple(int(n) for n in self.N)
        L = tuple(float(x) for x in self.L)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "L", L)
        if len(N) != len(L) or not N:
            raise ValueError("N and L must have the same positive length")
        if any(n <= 0 or n % 2 for n in N):
            raise ValueError("every N_i must be a positive even integer")
        if any(x <= 0 for x in L):
            raise ValueError("every L_i must be positive")
        if math.prod(N) > self.cap:
            raise ValueError(f"grid has {math.prod(N)} points, above the cap {self.cap}")
        if self.origin is None:
            object.__setattr__(self, "origin", tuple(-x / 2 for x in L))

    @property
    def dims(self) -> int:
        return len(self.N)

    @property
    def h(self) -> tuple[float, ...]:
        return tuple(x / n for x, n in zip(self.L, self.N))

    @property
    def freqs(self) -> list[np.ndarray]:
        return [nx.angular_frequencies(n, x) for n, x in zip(self.N, self.L)]

    @property
    def cell_volume(self) -> float:
        return math.prod(2 * math.pi / x for x in self.L)

    def coords(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.h[axis] * np.arange(self.N[axis])

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*[self.coords(i) for i in range(self.dims)], indexing="ij")

    def to_dict(self) -> dict:
        return {"dims": self.dims, "N": list(self.N), "L": list(self.L),
                "origin": list(self.origin)}

    @classmethod
    def for_box(cls, bounds: Sequence[tuple[float, float]], n_points: Sequence[int]):
        """Grid whose lattice contains the endpoints of ``bounds`` with the given
        number of points per axis (endpoint inclusive)."""
        h = [(b - a) / (n - 1) for (a, b), n in zip(bounds, n_points)]
        N = [2 * (n - 1) for n in n_points]
        return cls(tuple(N), tuple(hi * ni for hi, ni in zip(h, N)),
                   origin=tuple(a for a, _ in bounds))


# --- domain tags -------------------------------------------------------------


@dataclass(frozen=True)
class FullSpace:
    tag: str = "FullSpace"


@dataclass(frozen=True)
class Box:
    bounds: tuple[tuple[float, float], ...]
    tag: str = "Box"


@dataclass(frozen=True)
class HalfLinePlus:
    tag: str = "HalfLinePlus"


@dataclass(frozen=True)
class SampledField:
    """Samples of a (complex) function.

    FullSpace / HalfLinePlus fields hold one value per grid point.  Box fields
    hold endpoint-inclusive samples of the box, which must sit on the grid
    lattice.
    """

    grid: FrequencyGrid
    values: np.ndarray
    domain: object = field(default_factory=FullSpace)

    def __post_init__(self):
        vals = np.asarray(self.values)
        object.__setattr__(self, "values", vals)
        if isinstance(self.domain, Box):
            if vals.ndim != self.grid.dims or len(self.domain.bounds) != self.grid.dims:
                raise ValueError("box field dimension does not match its grid")
            for ax, ((a, b), n) in enumerate(zip(self.domain.bounds, vals.shape)):
                h = self.grid.h[ax]
                ja = (a - self.grid.origin[ax]) / h
                nb = (b - a) / h
                if abs(ja - round(ja)) > 1e-8 or abs(nb - round(nb)) > 1e-8 \
                        or round(nb) + 1 != n:
                    raise ValueError(f"box bounds on axis {ax} are not aligned to the grid")
        elif vals.shape != self.grid.N:
            raise ValueError(f"values shape {vals.shape} does not match grid {self.grid.N}")

    def hat(self) -> np.ndarray:
        """Unitary Fourier transform on the grid (FullSpace fields)."""
        return unitary_fft(self.values, self.grid.h, self.grid.origin, self.grid.freqs)

    @classmethod
    def from_hat(cls, grid: FrequencyGrid, hat: np.ndarray, domain=None):
        vals = inverse_unitary_fft(hat, grid.h, grid.origin, grid.freqs)
        return cls(grid, vals, domain or FullSpace())

    def l2_norm(self) -> float:
        """Trapezoid L^2 norm for boxes, plain lattice sum otherwise."""
        v = np.abs(self.values) ** 2
        if isinstance(self.domain, Box):
            for ax in range(v.ndim):
                w = np.ones(v.shape[ax])
                w[0] = w[-1] = 0.5
                shape = [1] * v.ndim
                shape[ax] = -1
                v = v * w.reshape(shape)
        return float(math.sqrt(np.sum(v) * math.prod(self.grid.h)))


def unitary_fft(values, h, origin, freqs):
    k = len(h)
    out = np.fft.fftn(values) * (math.prod(h) / (2 * math.pi) ** (k / 2))
    for ax, (x0, f) in enumerate(zip(origin, freqs)):
        shape = [1] * k
        shape[ax] = -1
        out = out * np.exp(-1j * f * x0).reshape(shape)
    return out


def inverse_unitary_fft(hat, h, origin, freqs):
    k = len(h)
    tmp = np.array(hat, dtype=complex)
    for ax, (x0, f) in enumerate(zip(origin, freqs)):
        shape = [1] * k
        shape[ax] = -1
        tmp = tmp * np.exp(1j * f * x0).reshape(shape)
    return np.fft.ifftn(tmp) * ((2 * math.pi) ** (k / 2) / math.prod(h))


def _weighted_sq(values, h, index: RegularityIndex, shell_warn: float | None = 0.01):
    """sum mu^2 |ŵ|^2 dxi for periodic samples with spacing ``h``."""
    v = np.asarray(values)
    shape = v.shape
    L = [n * hi for n, hi in zip(shape, h)]
    freqs = [nx.angular_frequencies(n, x) for n, x in zip(shape, L)]
    power = np.abs(np.fft.fftn(v)) ** 2 * (math.prod(h) ** 2 / (2 * math.pi) ** len(shape))
    weighted = mu_mesh(freqs, index) ** 2 * power
    total = float(np.sum(weighted)) * math.prod(2 * math.pi / x for x in L)
    if shell_warn is not None and total > 0:
        outer = np.zeros(shape, dtype=bool)
        for ax, n in enumerate(shape):
            idx = np.abs(np.fft.fftfreq(n) * n)
            sl = [None] * len(shape)
            sl[ax] = slice(None)
            outer = outer | (idx >= 0.4 * n)[tuple(sl)]
        frac = float(np.sum(weighted[outer])) * math.prod(2 * math.pi / x for x in L) / total
        if frac > shell_warn:
            warnings.warn(f"{frac:.2%} of the weighted energy sits in the outer frequency "
                          "shell; the grid may be too coarse", AliasingWarning, stacklevel=3)
    return total


def norm_full(field: SampledField, index: RegularityIndex, shell_warn: float | None = 0.01
              ) -> float:
    """||w||_{H^mu} of a full-space (torus) field."""
    if isinstance(field.domain, Box):
        raise PreconditionError("norm_full needs a FullSpace or HalfLinePlus field")
    return math.sqrt(_weighted_sq(field.values, field.grid.h, index, shell_warn))


# --- extensions ----------------------------------------------------------------


def reflection_order(s: float) -> int:
    """Reflection order for ZeroPadTaper at regularity s.

    An order-m reflection is C^{m-1} across the box side, so the extension
    lies in H^{m + 1/2 - eps}; floor(s) + 2 keeps a margin of at least one
    order.  Higher orders than needed amplify oscillatory data (the
    reflection samples the field at up to m times the distance), hence the
    cap at 8 and the floor at 4.
    """
    return int(min(8, max(4, math.floor(s) + 2)))


def extend_box(values: np.ndarray, strategy: str, lower_t: str = "smooth",
               others: str = "smooth", order: int = nx.DEFAULT_REFLECTION_ORDER):
    """Periodic extension of box samples; returns (array, norm scale factor).

    For ZeroPadTaper, ``lower_t`` sets the lower side of the last axis and
    ``others`` every remaining side ('smooth' or 'zero').
    """
    v = np.asarray(values)
    if strategy == "EvenReflectPeriodize":
        for ax in range(v.ndim):
            v = nx.even_reflect_axis(v, ax)
        return v, 1.0 / math.sqrt(2.0 ** v.ndim)
    if strategy == "ZeroPadTaper":
        for ax in range(v.ndim):
            lower = lower_t if ax == v.ndim - 1 else others
            v, _ = nx.extend_axis(v, ax, lower, others, order=order)
        return v, 1.0
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def side_traces_vanish(values, h: float, axis: int, side: str, s_axis: float,
                       rtol: float = 1e-6) -> bool:
    """Whether the one-sided traces d^k w, k < s_axis - 1/2, vanish on one box side.

    Each trace is compared with the largest k-th derivative over the box.  Zero
    extension across that side stays in the same space exactly when they do.
    """
    v = np.asarray(values)
    n_traces = math.ceil(s_axis - 0.5) if s_axis > 0.5 else 0
    if n_traces == 0:
        return True
    # a band of vanishing samples next to the side settles it without stencils
    band = np.moveaxis(v, axis, -1)
    band = band[..., :n_traces + 1] if side == "lower" else band[..., -(n_traces + 1):]
    top = float(np.max(np.abs(v))) if v.size else 0.0
    if np.all(np.abs(band) <= rtol * top):
        return True
    try:
        for k in range(n_traces):
            tr = np.max(np.abs(nx.edge_derivative(v, h, k, side, axis)))
            ref = np.max(np.abs(nx.fd_derivative(v, h, k, axis)))
            if tr > rtol * ref:
                return False
    except ResolutionError:
        return False
    return True


def _zero_candidates(values, h, index: RegularityIndex) -> list[tuple[str, str]]:
    v = np.asarray(values)
    last = v.ndim - 1
    s_axes = [index.s] * last + [index.s * index.gamma]
    out = [("smooth", "smooth")]
    if not side_traces_vanish(v, h[last], last, "lower", s_axes[last]):
        return out
    out.append(("zero", "smooth"))
    rest = [(ax, side) for ax in range(v.ndim) for side in ("lower", "upper")
            if (ax, side) != (last, "lower")]
    if all(side_traces_vanish(v, h[ax], ax, side, s_axes[ax]) for ax, side in rest):
        out.append(("zero", "zero"))
    return out


def norm_restriction(field: SampledField, index: RegularityIndex,
                     strategy: str = "ZeroPadTaper", order: int | None = None) -> float:
    """Norm of an explicit extension of the box field.

    For ZeroPadTaper the smallest admissible extension is reported.  Smooth
    reflection on every side is always admissible.  Zero extension below
    t = 0 (last axis) is added when the time traces of order < s gamma - 1/2
    vanish there, and zero extension on every side when all the traces vanish.
    The all-zero candidate is then the exact choice (fields supported inside
    the box).  Each candidate is an upper bound for the quotient norm.
    """
    if not isinstance(field.domain, Box):
        raise PreconditionError("norm_restriction needs a Box field")
    h = field.grid.h
    if strategy == "ZeroPadTaper":
        order = order or reflection_order(index.s)
        best = math.inf
        for mode, others in _zero_candidates(field.values, h, index):
            ext, scale = extend_box(field.values, strategy, lower_t=mode, others=others,
                                    order=order)
            best = min(best, scale * math.sqrt(_weighted_sq(ext, h, index, None)))
        return best
    ext, scale = extend_box(field.values, strategy)
    return scale * math.sqrt(_weighted_sq(ext, h, index, None))


def norm_compact(field: SampledField, index: RegularityIndex, atol: float = 1e-12) -> float:
    """Norm of a box field supported inside the box: zero extension on every side.

    This is the exact norm for such fields (e.g. cutoff-localized solutions).
    The boundary samples must vanish to ``atol`` relative to max |w|.
    """
    if not isinstance(field.domain, Box):
        raise PreconditionError("norm_compact needs a Box field")
    v = np.asarray(field.values)
    top = float(np.max(np.abs(v))) if v.size else 0.0
    for ax in range(v.ndim):
        edge = np.take(v, [0, v.shape[ax] - 1], axis=ax)
        if np.any(np.abs(edge) > atol * top):
            raise PreconditionError("field does not vanish on the box boundary")
    ext, _ = extend_box(v, "ZeroPadTaper", lower_t="zero", others="zero", order=4)
    return math.sqrt(_weighted_sq(ext, field.grid.h, index, None))


def norm_plus(field: SampledField, index: RegularityIndex, atol: float = 0.0) -> float:
    """Norm in H_+: extension by zero for t < 0 (t = last axis).

    HalfLinePlus fields live on the full grid and must vanish for t < 0.  Box
    fields must start at t = 0; their other sides use ZeroPadTaper, so the
    result dominates ``norm_restriction`` for the same field.
    """
    if isinstance(field.domain, Box):
        if abs(field.domain.bounds[-1][0]) > 1e-12:
            raise PreconditionError("a box field in H_+ must start at t = 0")
        ext, _ = extend_box(field.values, "ZeroPadTaper", lower_t="zero",
                            order=reflection_order(index.s))
        return math.sqrt(_weighted_sq(ext, field.grid.h, index, None))
    t = field.grid.coords(field.grid.dims - 1)
    neg = field.values[..., t < 0]
    if np.any(np.abs(neg) > atol):
        raise PreconditionError("field does not vanish for t < 0")
    return norm_full(field, index)


# --- continuity criterion ------------------------------------------------------


@dataclass(frozen=True)
class ContinuityVerdict:
    status: str                  # "Continuous" | "NotGuaranteed"
    s: float
    integral: IntegralConditionResult


def continuity_threshold(p: int, b: int, n: int, phi: KaramataFunction,
                         config: QuadratureConfig | None = None) -> ContinuityVerdict:
    """Derivatives of order |alpha| + 2b beta <= p are continuous for every element of
    H^{s, s/(2b); phi} with s = p + b + n/2 iff int_1^inf dr/(r phi^2) < inf."""
    res = integral_condition(phi, config)
    if res.status == "Indeterminate":
        raise IndeterminateError(f"integral condition undecided: {res.note}")
    status = "Continuous" if res.converges else "NotGuaranteed"
    return ContinuityVerdict(status, p + b + n / 2, res)


# --- integral identity for the embedding -------------------------------------


@dataclass(frozen=True)
class EmbeddingIdentityReport:
    lhs: float
    rhs: float
    ratio: float
    c_exact: float
    delta: int
    divergent: bool
    lhs_error: float = 0.0
    rhs_error: float = 0.0


def _log_quad(log_f, rtol=1e-10):
    """int_0^inf exp(a u + rest(u)) dx with u = ln x and ``log_f(u) = (a, rest)``.

    [0, 1] is integrated in x; beyond, u = expm1(y) turns logarithmic tails
    into exponentially decaying ones in y.  The power part ``a u`` is kept
    separate so that it cancels exactly against the Jacobian when balanced;
    x itself never has to be formed.
    """
    def near(x):
        if x <= 0:
            return 0.0
        a, rest = log_f(math.log(x))
        return math.exp(a * math.log(x) + rest)

    total, err = integrate.quad(near, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=400)

    def far(y):
        u = math.expm1(y)
        a, rest = log_f(u)
        k = a + 1.0
        val = (k * u if k != 0.0 else 0.0) + rest + y
        return math.exp(val) if val > -745 else 0.0

    edges = [0.0, 1.0]
    while edges[-1] < 690.0:
        edges.append(min(690.0, 2.0 * edges[-1]))
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(far, a, b, epsabs=0.0, epsrel=rtol, limit=400)
        total += v
        err += e
    return total, err


def _log1pexp(x):
    return x + math.log1p(math.exp(-x)) if x > 0 else math.log1p(math.exp(x))


def angular_constant(alpha: Sequence[int], beta: int, b: int) -> float:
    """c_{alpha,beta} = 2^{n+1} 2b int over the positive orthant of S^n of
    omega^{2 alpha} omega_{n+1}^{4 b beta + 2b - 1}."""
    a = [2 * ai for ai in alpha] + [4 * b * beta + 2 * b - 1]
    half = [(ai + 1) / 2 for ai in a]
    log_orthant = sum(special.gammaln(x) for x in half) - special.gammaln(sum(half)) \
        - len(a) * math.log(2) + math.log(2)
    return 2.0 ** len(a) * 2 * b * math.exp(log_orthant)


def _angular_quad(alpha: Sequence[int], beta: int, b: int) -> float:
    """Same constant by direct quadrature (n = 1 only)."""
    (a1,) = alpha
    e2 = 4 * b * beta + 2 * b - 1
    v, _ = integrate.quad(lambda th: math.cos(th) ** (2 * a1) * math.sin(th) ** e2,
                          0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13)
    return 4.0 * 2 * b * v


def embedding_identity_check(alpha: Sequence[int], beta: int, s: float, b: int, n: int,
                             phi: KaramataFunction, config: QuadratureConfig | None = None,
                             rtol: float = 1e-10) -> EmbeddingIdentityReport:
    """Left side of the identity (after eta = eta1^{2b} and polar coordinates, a
    radial quadrature in rho times an angular quadrature) against the 1-D right
    side in r = sqrt(1 + rho^2), without c_{alpha,beta}."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise ValueError("alpha must have n components")
    p = s - b - n / 2
    if abs(p - round(p)) > 1e-12 or round(p) < 0:
        raise PreconditionError("s must equal p + b + n/2 with an integer p >= 0")
    p = int(round(p))
    delta = p - sum(alpha) - 2 * b * beta
    if delta < 0:
        raise PreconditionError("need |alpha| + 2 b beta <= p")
    c_exact = angular_constant(alpha, beta, b)
    divergent = False
    if delta == 0:
        res = integral_condition(phi, config)
        if res.status == "Indeterminate":
            raise IndeterminateError("integral condition undecided for phi")
        divergent = not res.converges
    if divergent:
        return EmbeddingIdentityReport(math.inf, math.inf, math.nan, c_exact, delta, True)

    e_rho = 2 * sum(alpha) + 4 * b * beta + 2 * b - 1 + n

    def log_lhs(u):
        # rho = e^u: rho^{e_rho} (1+rho^2)^{-s} phi^{-2}(sqrt(1+rho^2))
        c = _log1pexp(-2 * u)                          # ln(1+rho^2) - 2u
        return e_rho - 2 * s, -s * c - 2 * float(phi.log_phi_of_log(u + 0.5 * c))

    def log_rhs(u):
        # r = 1 + x, x = e^u: (r^2-1)^{s-1-delta} r^{1-2s} phi^{-2}(r)
        c = _log1pexp(-u)                              # ln r - u
        lr = u + c
        d = c + _log1pexp(-lr)                         # ln(r^2-1) - 2u
        return (-1.0 - 2 * delta,
                (s - 1 - delta) * d - (2 * s - 1) * c - 2 * float(phi.log_phi_of_log(lr)))

    radial, e1 = _log_quad(log_lhs, rtol)
    rhs, e2 = _log_quad(log_rhs, rtol)
    angular = _angular_quad(alpha, beta, b) if n == 1 else c_exact
    lhs = angular * radial
    return EmbeddingIdentityReport(lhs, rhs, lhs / rhs, c_exact, delta, False,
                                   angular * e1, e2)


def embedding_lhs_direct(alpha: Sequence[int], beta: int, s: float, b: int,
                         phi: KaramataFunction, rtol: float = 1e-8) -> float:
    """Left side of the identity for n = 1 by plain 2-D quadrature over (xi, eta).

    No change of variables; only usable when the integrand decays fast
    enough (delta >= 1) for an adaptive rule on the quarter plane.
    """
    (a1,) = alpha
    gamma = 1.0 / (2 * b)

    def inner(eta):
        def f(xi):
            r = math.sqrt(1.0 + xi * xi + eta ** (2 * gamma))
            return xi ** (2 * a1) * eta ** (2 * beta) / (r ** (2 * s) * float(phi(r)) ** 2)
        v, _ = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=rtol, limit=400)
        return v

    v, _ = integrate.quad(inner, 0.0, np.inf, epsabs=0.0, epsrel=rtol, limit=400)
    return 4.0 * v
