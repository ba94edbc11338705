"""Slowly and regularly varying functions on [1, inf).

A ``KaramataFunction`` is an immutable description of a positive function phi
of class M.  Four primitive kinds are supported (constant, regularized
multilog, integral representation, tabulated) plus products of powers, which
is what closure under multiplication needs.

Every kind can report ``log phi(e**u)`` directly from ``u = ln r``; that is
what lets ``integral_condition`` probe the far tail (``ln r`` up to 1e300)
without ever forming ``r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, PreconditionError, RangeError

KINDS = ("Constant", "MultiLog", "IntegralRep", "Tabulated", "Product")

# probe windows (in the tower variable y) used by integral_condition; at depth
# d the term exp^{d-2}(y) must stay finite.
_EXP_SAFE = 700.0
_FAR = (1e150, 1e300)
_DEPTH_WINDOWS = {1: _FAR, 2: _FAR, 3: (100.0, _EXP_SAFE)}


def _as_array(r):
    arr = np.asarray(r, dtype=float)
    return arr, arr.ndim == 0


def _tower(y, depth: int) -> list:
    """[y, e^y, e^{e^y}, ...] with ``depth`` entries (inf on overflow)."""
    out = [np.asarray(y, dtype=float)]
    with np.errstate(over="ignore"):
        for _ in range(depth - 1):
            out.append(np.exp(out[-1]))
    return out


def _compile_expr(expr: str) -> Callable:
    import sympy

    r = sympy.Symbol("r", positive=True)
    fn = sympy.lambdify(r, sympy.sympify(expr, locals={"r": r}), "numpy")

    def wrapped(x):
        return np.broadcast_to(fn(np.asarray(x, dtype=float)), np.shape(x)).astype(float)

    return wrapped


@dataclass(frozen=True)
class KaramataFunction:
    """A positive function phi on [1, inf).

    Build instances through ``constant``, ``multilog``, ``integral_rep``,
    ``tabulated`` or by multiplying / raising existing ones.
    """

    kind: str
    value: float = 1.0                       # Constant
    thetas: tuple[float, ...] = ()           # MultiLog
    eps: object = None                       # IntegralRep: callable or expression in r
    delta: object = None
    table: tuple[tuple[float, float], ...] = ()  # Tabulated
    extrapolation: str | None = None
    factors: tuple = ()                      # Product: ((phi, power), ...)
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "Constant" and not (self.value > 0 and math.isfinite(self.value)):
            raise ValueError("constant value must be positive and finite")
        if self.kind == "Tabulated":
            if len(self.table) < 2:
                raise ValueError("a table needs at least two points")
            rs = np.array([p[0] for p in self.table])
            vs = np.array([p[1] for p in self.table])
            if rs[0] < 1 or np.any(np.diff(rs) <= 0):
                raise ValueError("table abscissae must be increasing and >= 1")
            if np.any(vs <= 0) or not np.all(np.isfinite(vs)):
                raise ValueError("table values must be positive and finite")
            if self.extrapolation not in (None, "constant", "loglinear"):
                raise ValueError(f"unknown extrapolation rule {self.extrapolation!r}")
        if self.kind == "IntegralRep" and self.eps is None:
            raise ValueError("integral representation needs eps")

    # --- evaluation -------------------------------------------------------

    def __call__(self, r):
        return self.eval(r)

    def eval(self, r):
        """phi(r) for scalar or array ``r >= 1``."""
        arr, scalar = _as_array(r)
        if np.any(arr < 1) or np.any(np.isnan(arr)):
            raise DomainError("class-M functions are defined for r >= 1 only")
        with np.errstate(divide="ignore"):
            out = np.exp(self.log_phi_of_log(np.log(arr)))
        return float(out) if scalar else out

    def log_eval(self, r):
        arr, scalar = _as_array(r)
        if np.any(arr < 1):
            raise DomainError("class-M functions are defined for r >= 1 only")
        out = self.log_phi_of_log(np.log(arr))
        return float(out) if scalar else out

    def log_phi_of_log(self, u):
        """log phi(e**u) for u >= 0 (u may be far beyond float range of r)."""
        u = np.asarray(u, dtype=float)
        k = self.kind
        if k == "Constant":
            return np.full(u.shape, math.log(self.value))
        if k == "MultiLog":
            acc = np.zeros(u.shape)
            level = 1.0 + u
            for theta in self.thetas:
                lg = np.log(level)
                acc = acc + theta * lg
                level = 1.0 + lg
            return acc
        if k == "Tabulated":
            return self._tab_log(u)
        if k == "IntegralRep":
            return self._intrep_log(u)
        acc = np.zeros(u.shape)
        for phi, power in self.factors:
            acc = acc + power * phi.log_phi_of_log(u)
        return acc

    def tower_parts(self, y, depth: int):
        """Split log phi(r), r = exp^depth(y), as sum_j c_j T_j + rem.

        T_j = exp^j(y) for j < depth - 1 are the tower terms; keeping their
        coefficients exact lets callers cancel them against the Jacobian of
        the substitution without rounding.  Returns None when the kind cannot
        be evaluated that far out.
        """
        y = np.asarray(y, dtype=float)
        ncoef = depth - 1
        if depth == 1 or self.kind == "Constant":
            return [0.0] * ncoef, np.asarray(self.log_phi_of_log(y), dtype=float)
        if self.kind == "MultiLog":
            tw = _tower(y, depth)
            coef = [0.0] * ncoef
            rem = np.zeros(y.shape)
            rho = np.zeros(y.shape)
            log_l = None
            for i, theta in enumerate(self.thetas, start=1):
                if i < depth:
                    # log L_i = T_{d-1-i} + rho_i
                    t_i = tw[depth - 1 - i]
                    with np.errstate(over="ignore"):
                        rho = np.log1p((1.0 + rho) * np.exp(-t_i)) if i > 1 else \
                            np.log1p(np.exp(-t_i))
                    coef[depth - 1 - i] += theta
                    rem = rem + theta * rho
                    log_l = t_i + rho
                else:
                    if log_l is None:
                        log_l = np.log1p(tw[depth - 1])
                    else:
                        log_l = np.log1p(log_l)
                    rem = rem + theta * log_l
            return coef, rem
        if self.kind == "Product":
            coef = [0.0] * ncoef
            rem = np.zeros(y.shape)
            for phi, power in self.factors:
                part = phi.tower_parts(y, depth)
                if part is None:
                    return None
                coef = [a + power * b for a, b in zip(coef, part[0])]
                rem = rem + power * part[1]
            return coef, rem
        return None

    def tower_window(self, depth: int):
        """Range of the depth-``depth`` tower variable where the tail can be probed."""
        if self.kind in ("Constant", "MultiLog"):
            return _DEPTH_WINDOWS.get(depth)
        if self.kind == "Product":
            wins = [phi.tower_window(depth) for phi, _ in self.factors]
            if any(w is None for w in wins):
                return None
            lo = max(w[0] for w in wins)
            hi = min(w[1] for w in wins)
            return (lo, hi) if lo < hi else None
        if depth > 1:
            return None
        if self.kind == "Tabulated":
            return _FAR if self.extrapolation is not None else None
        return (7.0, _EXP_SAFE)

    # --- kind-specific helpers -------------------------------------------

    def _tab_log(self, u):
        lr = np.log(np.array([p[0] for p in self.table]))
        lv = np.log(np.array([p[1] for p in self.table]))
        lo, hi = lr[0], lr[-1]
        if self.extrapolation is None:
            if np.any(u < lo - 1e-12) or np.any(u > hi + 1e-12):
                raise RangeError(
                    f"tabulated function queried outside [{math.exp(lo):g}, {math.exp(hi):g}]")
        out = np.interp(u, lr, lv)
        if self.extrapolation == "loglinear":
            s_lo = (lv[1] - lv[0]) / (lr[1] - lr[0])
            s_hi = (lv[-1] - lv[-2]) / (lr[-1] - lr[-2])
            out = np.where(u < lo, lv[0] + s_lo * (u - lo), out)
            out = np.where(u > hi, lv[-1] + s_hi * (u - hi), out)
        return out

    def _fn(self, obj):
        if obj is None:
            return lambda r: np.zeros(np.shape(r))
        if isinstance(obj, str):
            return _compile_expr(obj)
        return obj

    def _intrep_log(self, u):
        eps = self._fn(self.eps)
        delta = self._fn(self.delta)
        flat = np.atleast_1d(u).ravel()
        out = np.empty(flat.shape)
        order = np.argsort(flat)
        acc, prev = 0.0, 0.0
        for i in order:
            ui = float(flat[i])
            if ui > prev:
                # d(ln tau) substitution: int eps(tau)/tau dtau = int eps(e^v) dv
                val, _ = integrate.quad(lambda v: float(eps(math.exp(v))), prev, ui, limit=200)
                acc += val
                prev = ui
            out[i] = acc + float(delta(math.exp(ui)))
        return out.reshape(np.shape(u))

    # --- algebra ----------------------------------------------------------

    def __mul__(self, other: "KaramataFunction") -> "KaramataFunction":
        if not isinstance(other, KaramataFunction):
            return NotImplemented
        if self.kind == "MultiLog" and other.kind == "MultiLog":
            n = max(len(self.thetas), len(other.thetas))
            a = self.thetas + (0.0,) * (n - len(self.thetas))
            b = other.thetas + (0.0,) * (n - len(other.thetas))
            return multilog(*[x + y for x, y in zip(a, b)])
        if self.kind == "Constant" and other.kind == "Constant":
            return constant(self.value * other.value)
        return KaramataFunction("Product", factors=((self, 1.0), (other, 1.0)))

    def __pow__(self, power: float) -> "KaramataFunction":
        if self.kind == "MultiLog":
            return multilog(*[power * t for t in self.thetas])
        if self.kind == "Constant":
            return constant(self.value ** power)
        return KaramataFunction("Product", factors=((self, float(power)),))

    # --- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "Constant":
            d["value"] = self.value
        elif self.kind == "MultiLog":
            d["thetas"] = list(self.thetas)
        elif self.kind == "Tabulated":
            d["table"] = [list(p) for p in self.table]
            d["extrapolation"] = self.extrapolation
        elif self.kind == "IntegralRep":
            if not all(isinstance(x, (str, type(None))) for x in (self.eps, self.delta)):
                raise TypeError("only expression-string integral representations serialize")
            d["eps"] = self.eps
            d["delta"] = self.delta
        else:
            d["factors"] = [{"phi": phi.to_dict(), "power": p} for phi, p in self.factors]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KaramataFunction":
        kind = d.get("kind")
        if kind == "Constant":
            return constant(float(d.get("value", 1.0)))
        if kind == "MultiLog":
            return multilog(*d.get("thetas", ()))
        if kind == "Tabulated":
            return tabulated(d["table"], extrapolation=d.get("extrapolation"))
        if kind == "IntegralRep":
            return integral_rep(d["eps"], d.get("delta"))
        if kind == "Product":
            out = None
            for item in d["factors"]:
                term = cls.from_dict(item["phi"]) ** float(item.get("power", 1.0))
                out = term if out is None else out * term
            return out
        raise ValueError(f"unknown kind {kind!r}")

    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "Constant":
            return f"const({self.value:g})"
        if self.kind == "MultiLog":
            return "multilog(" + ",".join(f"{t:g}" for t in self.thetas) + ")"
        return self.kind.lower()


def constant(value: float = 1.0) -> KaramataFunction:
    return KaramataFunction("Constant", value=float(value))


def multilog(*thetas: float) -> KaramataFunction:
    """Regularized (1+ln r)^t1 (1+ln(1+ln r))^t2 ... ; equals 1 at r = 1."""
    thetas = tuple(float(t) for t in thetas)
    while thetas and thetas[-1] == 0.0:
        thetas = thetas[:-1]
    if not thetas:
        return constant(1.0)
    return KaramataFunction("MultiLog", thetas=thetas)


def integral_rep(eps, delta=None) -> KaramataFunction:
    """exp(delta(r) + int_1^r eps(tau)/tau dtau); eps, delta callables or strings in r."""
    return KaramataFunction("IntegralRep", eps=eps, delta=delta)


def tabulated(points: Sequence, values: Sequence | None = None,
              extrapolation: str | None = None) -> KaramataFunction:
    """Log-log linear interpolation of (r, value) samples."""
    if values is None:
        pts = tuple((float(a), float(b)) for a, b in points)
    else:
        pts = tuple((float(a), float(b)) for a, b in zip(points, values))
    return KaramataFunction("Tabulated", table=pts, extrapolation=extrapolation)


# --- regular variation -----------------------------------------------------


@dataclass(frozen=True)
class RegularVariationVerdict:
    order: float
    deviation: float
    lambdas: tuple[float, ...]
    r_values: tuple[float, ...]

    def holds(self, tol: float = 5e-2) -> bool:
        return self.deviation <= tol


def _probe(lambdas, r_grid):
    lam = np.asarray(list(lambdas), dtype=float)
    rg = np.asarray(list(r_grid), dtype=float)
    if lam.size == 0 or rg.size == 0:
        raise ValueError("probe sets must be non-empty")
    if np.any(lam <= 0):
        raise ValueError("lambdas must be positive")
    if np.any(np.diff(rg) <= 0):
        raise ValueError("r_grid must be increasing")
    top = rg[rg >= rg[-1] / 10.0]
    return lam, rg, top


def _call(psi, r):
    return np.asarray(psi(r), dtype=float)


def check_slowly_varying(phi, lambdas, r_grid) -> RegularVariationVerdict:
    """Measure max |phi(lam r)/phi(r) - 1| over the largest decade of ``r_grid``."""
    lam, rg, top = _probe(lambdas, r_grid)
    if rg[-1] < 1e6:
        raise PreconditionError("r_grid must reach at least 1e6 to probe the limit")
    dev = 0.0
    for lm in lam:
        ratio = _call(phi, lm * top) / _call(phi, top)
        dev = max(dev, float(np.max(np.abs(ratio - 1.0))))
    return RegularVariationVerdict(0.0, dev, tuple(map(float, lam)), tuple(map(float, top)))


def estimate_rv_order(psi, lambdas, r_grid) -> RegularVariationVerdict:
    """theta = log(psi(lam r)/psi(r))/log(lam), averaged over probes in the top decade."""
    lam, rg, top = _probe(lambdas, r_grid)
    lam = lam[lam != 1.0]
    if lam.size == 0:
        raise ValueError("need at least one lambda different from 1")
    est = []
    for lm in lam:
        ratio = np.log(_call(psi, lm * top)) - np.log(_call(psi, top))
        est.append(ratio / math.log(lm))
    est = np.concatenate(est)
    theta = float(np.mean(est))
    return RegularVariationVerdict(theta, float(np.max(np.abs(est - theta))),
                                   tuple(map(float, lam)), tuple(map(float, top)))


# --- integral condition ----------------------------------------------------


@dataclass(frozen=True)
class QuadratureConfig:
    rtol: float = 1e-10
    margin: float = 0.05          # exponent band around 1 that triggers a deeper log level
    max_depth: int = 3
    decades: int = 12             # partial integrals at R = 10^j, j <= decades
    probes: int = 9


@dataclass(frozen=True)
class IntegralConditionResult:
    """Outcome of the test for int_1^inf dr/(r phi(r)^2) < inf."""

    status: str                    # "Converges" | "Diverges" | "Indeterminate"
    value: float | None = None     # quadrature value when converging
    abs_error: float | None = None
    rate: float | None = None      # 1 - p at the deciding log level (>0 means divergence)
    depth: int | None = None
    exponent: float | None = None  # local decay exponent p at that level
    partial_R: tuple[float, ...] = ()
    partial_integrals: tuple[float, ...] = ()
    log_slope: float | None = None  # fitted b in I(R) ~ a + b ln R over the last decades
    note: str = ""

    @property
    def converges(self) -> bool:
        return self.status == "Converges"


def _log_integrand(phi, y, depth):
    """log of the integrand of int dr/(r phi^2) in the depth-``depth`` variable."""
    parts = phi.tower_parts(y, depth)
    if parts is None:
        return None
    coef, rem = parts
    tw = _tower(y, depth)
    h = -2.0 * rem
    for j, c in enumerate(coef):
        # Jacobian contributes T_j once; cancel exactly before multiplying
        k = 1.0 - 2.0 * c
        if k != 0.0:
            h = h + k * tw[j]
    return h


def _local_exponents(phi, depth, probes):
    """Local decay exponents p(y) = -dh/dln y and their extrapolated limit.

    Iterated-log factors make p drift like b/ln y; fitting p = a + b/ln y
    over the window removes that drift, which matters for the deeper (and
    therefore narrower) windows.
    """
    win = phi.tower_window(depth)
    if win is None:
        return None
    ys = np.geomspace(win[0], win[1], probes)
    h = _log_integrand(phi, ys, depth)
    if h is None or not np.all(np.isfinite(h)):
        return None
    p = -np.diff(h) / np.diff(np.log(ys))
    if not np.all(np.isfinite(p)):
        return None
    mid = np.exp(0.5 * (np.log(ys[1:]) + np.log(ys[:-1])))
    design = np.column_stack([np.ones_like(mid), 1.0 / np.log(mid)])
    with np.errstate(over="ignore", invalid="ignore"):
        a = float(np.linalg.lstsq(design, p, rcond=None)[0][0]) if np.ptp(p) < 1e6 \
            else float(p[-1])
    return p, a


def _y_of_u_integral(phi, y0, y1, rtol):
    """int over u in [e^y0 - 1, e^y1 - 1] of phi(e^u)^-2 du (u = e^y - 1)."""
    def f(y):
        u = math.expm1(y)
        return math.exp(y - 2.0 * float(phi.log_phi_of_log(u)))

    val, err = integrate.quad(f, y0, y1, epsabs=0.0, epsrel=rtol, limit=400)
    return val, err


def _partials(phi, decades, rtol):
    rs, vals = [], []
    acc, y_prev = 0.0, 0.0
    for j in range(decades + 1):
        y = math.log1p(j * math.log(10.0))
        if y > y_prev:
            v, _ = _y_of_u_integral(phi, y_prev, y, rtol)
            acc += v
            y_prev = y
        rs.append(10.0 ** j)
        vals.append(acc)
    return tuple(rs), tuple(vals)


def integral_condition(phi: KaramataFunction, config: QuadratureConfig | None = None
                       ) -> IntegralConditionResult:
    """Classify int_1^inf dr/(r phi^2(r)).

    In u = ln r the integrand is phi(e^u)^-2.  Its local power-law exponent p
    is measured far out (u ~ 1e150..1e300, in log space).  p > 1 decides
    convergence, p < 1 divergence; when p is within ``margin`` of 1 the
    substitution is repeated one logarithm deeper.  Undecided after
    ``max_depth`` levels gives Indeterminate.
    """
    cfg = config or QuadratureConfig()
    partial_R, partial_I = _partials(phi, cfg.decades, cfg.rtol)
    half = len(partial_R) // 2
    lnR = np.log(np.asarray(partial_R[half:]))
    slope = float(np.polyfit(lnR, np.asarray(partial_I[half:]), 1)[0])
    common = dict(partial_R=partial_R, partial_integrals=partial_I, log_slope=slope)

    for depth in range(1, cfg.max_depth + 1):
        est = _local_exponents(phi, depth, cfg.probes)
        if est is None:
            return IntegralConditionResult("Indeterminate", depth=depth,
                                           note="tail not probeable at this log level", **common)
        p, limit = est
        tail = p[len(p) // 2:]
        lo, hi = float(np.min(tail)), float(np.max(tail))
        if lo > 1.0 and limit > 1.0 + cfg.margin:
            value, err = _convergent_value(phi, depth, cfg)
            return IntegralConditionResult("Converges", value=value, abs_error=err,
                                           rate=1.0 - limit, depth=depth, exponent=limit,
                                           **common)
        if hi < 1.0 and limit < 1.0 - cfg.margin:
            return IntegralConditionResult("Diverges", rate=1.0 - limit, depth=depth,
                                           exponent=limit, **common)
    return IntegralConditionResult("Indeterminate", depth=cfg.max_depth,
                                   note="exponent stays within margin of 1", **common)


def _convergent_value(phi, depth, cfg):
    # quadrature up to u = 1e300 (y = ln(1+u)), cut into unit-ish chunks
    win = phi.tower_window(1)
    y_end = math.log1p(win[1]) if win else _EXP_SAFE
    edges = [0.0]
    while edges[-1] < y_end:
        edges.append(min(y_end, max(1.0, 2.0 * edges[-1])))
    val, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _y_of_u_integral(phi, a, b, cfg.rtol)
        val += v
        err += e
    # power-law tail beyond u_T in the deciding variable
    u_t = math.expm1(y_end)
    y_t = u_t
    for _ in range(depth - 1):
        y_t = math.log(y_t)
    h = lambda y: float(_log_integrand(phi, np.array(y), depth))
    dy = 1e-3
    p_loc = -(h(y_t * math.exp(dy)) - h(y_t * math.exp(-dy))) / (2 * dy)
    if p_loc > 1.0:
        tail = math.exp(h(y_t)) * y_t / (p_loc - 1.0)
    else:
        tail = math.inf
    return val + tail, err + tail


# --- power bounds ----------------------------------------------------------


def power_bounds(phi, s0: float, s: float, s1: float, r_grid) -> tuple[float, float]:
    """(c0, c1) with c0 r^{s0-s} <= phi(r) <= c1 r^{s1-s} on ``r_grid``."""
    if not (s0 < s < s1):
        raise PreconditionError("need s0 < s < s1")
    r = np.atleast_1d(np.asarray(r_grid, dtype=float))
    logphi = np.atleast_1d(phi.log_eval(r)) if isinstance(phi, KaramataFunction) \
        else np.log(_call(phi, r))
    lr = np.log(r)
    c0 = float(np.exp(np.min(logphi + (s - s0) * lr)))
    c1 = float(np.exp(np.max(logphi + (s - s1) * lr)))
    return c0, c1
