"""Compatibility conditions for parabolic initial-boundary problems in the
rectangle (0, l) x (0, tau).

    A u = sum_{alpha + 2b beta <= 2m} a^{alpha,beta}(x,t) D_x^alpha d_t^beta u = f
    B_{j,lam} u = sum_{alpha + 2b beta <= m_j} b_{j,lam}^{alpha,beta}(t) D_x^alpha d_t^beta u
                = g_{j,lam}  at x = 0 (lam = 0) and x = l (lam = 1)
    d_t^k u(x, 0) = h_k(x),  k < kappa = m / b

with D_x = i d/dx.  Right-hand-side components are either closed-form
expressions in x, t (exact derivatives) or uniform endpoint-inclusive samples
(finite-difference derivatives, one-sided at t = 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import sympy as sp
from numpy.polynomial import Polynomial

from . import _numerics as nx
from .errors import ParabolicityError, PreconditionError
from .spaces import Box, SampledField

X, T = sp.symbols("x t", real=True)
_LOCALS = {"x": X, "t": T, "pi": sp.pi, "I": sp.I, "E": sp.E}
_SYMBOL = {"x": X, "t": T}


def parse_expr(e) -> sp.Expr:
    """Expression strings use x, t, pi, I and the usual elementary functions."""
    if isinstance(e, sp.Basic):
        return e
    if isinstance(e, (int, float, complex)):
        return sp.sympify(e)
    return sp.sympify(str(e), locals=_LOCALS)


def _exact(v: float) -> sp.Expr:
    return sp.Rational(repr(float(v)))


def _to_complex(expr: sp.Expr) -> complex:
    return complex(sp.N(expr, 20))


@dataclass(frozen=True, eq=False)
class Data:
    """One right-hand-side component: an expression or uniform samples.

    ``axes`` names the variables in order, e.g. ("x",), ("t",) or ("x", "t").
    Samples are endpoint inclusive with spacing ``h`` per axis, starting at 0.
    """

    axes: tuple[str, ...]
    expr: sp.Expr | None = None
    values: np.ndarray | None = None
    h: tuple[float, ...] = ()

    def __post_init__(self):
        if (self.expr is None) == (self.values is None):
            raise ValueError("give exactly one of expr and values")
        if self.expr is not None:
            e = parse_expr(self.expr)
            extra = e.free_symbols - {_SYMBOL[a] for a in self.axes}
            if extra:
                raise ValueError(f"expression uses {sorted(map(str, extra))} outside {self.axes}")
            object.__setattr__(self, "expr", e)
        else:
            v = np.asarray(self.values)
            if v.ndim != len(self.axes) or len(self.h) != len(self.axes):
                raise ValueError("samples, spacings and axes disagree")
            object.__setattr__(self, "values", v)
            object.__setattr__(self, "h", tuple(float(x) for x in self.h))

    @classmethod
    def expression(cls, e, axes: Sequence[str]) -> "Data":
        return cls(tuple(axes), expr=parse_expr(e))

    @classmethod
    def sampled(cls, values, h, axes: Sequence[str]) -> "Data":
        return cls(tuple(axes), values=np.asarray(values), h=tuple(np.atleast_1d(h)))

    @classmethod
    def from_field(cls, fld: SampledField, axes: Sequence[str] = ("x", "t")) -> "Data":
        if not isinstance(fld.domain, Box):
            raise ValueError("only box fields carry endpoint samples")
        if any(abs(a) > 1e-12 for a, _ in fld.domain.bounds):
            raise ValueError("box must start at the origin")
        return cls.sampled(fld.values, fld.grid.h, axes)

    @property
    def symbolic(self) -> bool:
        return self.expr is not None

    @property
    def is_zero(self) -> bool:
        if self.symbolic:
            return self.expr == 0
        return not np.any(self.values)

    # -- sampling ------------------------------------------------------------------

    def sample(self, *coords) -> np.ndarray:
        """Values on the tensor grid of the 1-D coordinate arrays (one per axis)."""
        if len(coords) != len(self.axes):
            raise ValueError(f"need {len(self.axes)} coordinate arrays")
        coords = [np.asarray(c, dtype=float) for c in coords]
        shape = tuple(c.size for c in coords)
        if not self.symbolic:
            if self.values.shape != shape:
                raise ValueError(f"samples of shape {self.values.shape} do not match {shape}")
            return self.values
        mesh = np.meshgrid(*coords, indexing="ij")
        fn = sp.lambdify([_SYMBOL[a] for a in self.axes], self.expr, "numpy")
        out = np.broadcast_to(np.asarray(fn(*mesh)), shape)
        if self.expr.has(sp.I):
            return np.array(out, dtype=complex)
        return np.array(out.real if np.iscomplexobj(out) else out, dtype=float)

    def _grid_coords(self):
        return [hi * np.arange(n) for hi, n in zip(self.h, self.values.shape)]

    def _align(self, other: "Data"):
        """Both operands as arrays on a common grid (or both symbolic)."""
        if self.axes != other.axes:
            raise ValueError("components live on different variables")
        if self.symbolic and other.symbolic:
            return None
        ref = other if self.symbolic else self
        coords = ref._grid_coords()
        return self.sample(*coords), other.sample(*coords), ref.h

    def __add__(self, other: "Data") -> "Data":
        al = self._align(other)
        if al is None:
            return Data(self.axes, expr=self.expr + other.expr)
        a, b, h = al
        return Data(self.axes, values=a + b, h=h)

    def __mul__(self, other) -> "Data":
        if not isinstance(other, Data):
            if self.symbolic:
                return Data(self.axes, expr=parse_expr(other) * self.expr)
            return Data(self.axes, values=complex(other) * self.values
                        if np.iscomplexobj(other) else float(other) * self.values, h=self.h)
        al = self._align(other)
        if al is None:
            return Data(self.axes, expr=self.expr * other.expr)
        a, b, h = al
        return Data(self.axes, values=a * b, h=h)

    __rmul__ = __mul__

    # -- calculus ------------------------------------------------------------------

    def dx(self, alpha: int) -> "Data":
        """D_x^alpha = (i d/dx)^alpha of an x-profile."""
        if self.axes != ("x",):
            raise ValueError("dx acts on functions of x")
        if alpha == 0:
            return self
        if self.symbolic:
            return Data(self.axes, expr=sp.I ** alpha * sp.diff(self.expr, X, alpha))
        d = nx.fd_derivative(self.values, self.h[0], alpha)
        return Data(self.axes, values=(1j) ** alpha * d, h=self.h)

    def dt_at0(self, n: int) -> "Data":
        """x-profile d_t^n (.)(x, 0) of a function of (x, t)."""
        if self.axes != ("x", "t"):
            raise ValueError("dt_at0 acts on functions of (x, t)")
        if self.symbolic:
            return Data(("x",), expr=sp.diff(self.expr, T, n).subs(T, 0))
        prof = nx.edge_derivative(self.values, self.h[1], n, "lower", axis=1)
        return Data(("x",), values=prof, h=self.h[:1])

    def value_at(self, point: float) -> complex:
        """Value of a 1-D component at an endpoint of its interval."""
        if len(self.axes) != 1:
            raise ValueError("value_at needs a 1-D component")
        if self.symbolic:
            return _to_complex(self.expr.subs(_SYMBOL[self.axes[0]], _exact(point)))
        end = self.h[0] * (self.values.shape[0] - 1)
        if abs(point) <= 1e-12 * max(end, 1.0):
            return complex(self.values[0])
        if abs(point - end) <= 1e-9 * max(end, 1.0):
            return complex(self.values[-1])
        raise ValueError(f"{point} is not an endpoint of the sampled interval [0, {end}]")

    def deriv_at0(self, k: int) -> complex:
        """k-th derivative at 0 of a function of t (one-sided stencil for samples)."""
        if self.axes != ("t",):
            raise ValueError("deriv_at0 acts on functions of t")
        if self.symbolic:
            return _to_complex(sp.diff(self.expr, T, k).subs(T, 0))
        return complex(nx.edge_derivative(self.values, self.h[0], k, "lower"))

    def to_dict(self) -> dict:
        if self.symbolic:
            return {"axes": list(self.axes), "expr": str(self.expr)}
        v = self.values
        d = {"axes": list(self.axes), "h": list(self.h), "values": np.real(v).tolist()}
        if np.iscomplexobj(v):
            d["imag"] = np.imag(v).tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Data":
        if "expr" in d:
            return cls.expression(d["expr"], d["axes"])
        v = np.asarray(d["values"], dtype=float)
        if "imag" in d:
            v = v + 1j * np.asarray(d["imag"], dtype=float)
        return cls.sampled(v, d["h"], d["axes"])


def _zero(axes) -> Data:
    return Data(tuple(axes), expr=sp.Integer(0))


# --- problem and right-hand side -------------------------------------------------------


def _parse_coeffs(raw: dict, axes) -> dict:
    out = {}
    for key, val in raw.items():
        a, b = (int(v) for v in key)
        e = parse_expr(val)
        extra = e.free_symbols - {_SYMBOL[x] for x in axes}
        if extra:
            raise ValueError(f"coefficient {val} depends on {sorted(map(str, extra))}")
        if e != 0:
            out[(a, b)] = e
    return out


@dataclass(frozen=True, eq=False)
class ParabolicProblem1D:
    """2b-parabolic problem in (0, l) x (0, tau).

    ``A`` maps (alpha, beta) to a^{alpha,beta}(x, t); ``B`` maps (j, lam) to a
    dict (alpha, beta) -> b_{j,lam}^{alpha,beta}(t), with j = 1..m.
    """

    b: int
    m: int
    boundary_orders: tuple[int, ...]
    A: dict
    B: dict
    l: float = 1.0
    tau: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.b < 1 or self.m < self.b:
            raise PreconditionError("need m >= b >= 1")
        if self.m % self.b:
            raise PreconditionError("kappa = m / b must be an integer")
        if not (self.l > 0 and self.tau > 0):
            raise ValueError("l and tau must be positive")
        orders = tuple(int(v) for v in self.boundary_orders)
        if len(orders) != self.m or min(orders) < 0:
            raise PreconditionError(f"need m = {self.m} non-negative boundary orders")
        object.__setattr__(self, "boundary_orders", orders)
        A = _parse_coeffs(self.A, ("x", "t"))
        for a, be in A:
            if a + 2 * self.b * be > 2 * self.m:
                raise PreconditionError(f"term (alpha={a}, beta={be}) exceeds order 2m")
        object.__setattr__(self, "A", A)
        B = {}
        for j in range(1, self.m + 1):
            for lam in (0, 1):
                raw = self.B.get((j, lam))
                if raw is None:
                    raise PreconditionError(f"boundary operator B_({j},{lam}) is missing")
                Bj = _parse_coeffs(raw, ("t",))
                for a, be in Bj:
                    if a + 2 * self.b * be > orders[j - 1]:
                        raise PreconditionError(
                            f"B_({j},{lam}) term (alpha={a}, beta={be}) exceeds m_j={orders[j - 1]}")
                B[(j, lam)] = Bj
        object.__setattr__(self, "B", B)
        lead = A.get((0, self.kappa))
        if lead is None:
            raise ParabolicityError("a^{0,kappa} is identically zero")
        xs = np.linspace(0.0, self.l, 17)
        ts = np.linspace(0.0, self.tau, 17)
        vals = Data.expression(lead, ("x", "t")).sample(xs, ts)
        if np.min(np.abs(vals)) < 1e-12:
            raise ParabolicityError("a^{0,kappa}(x, t) vanishes on the sampling grid")

    @property
    def kappa(self) -> int:
        return self.m // self.b

    @property
    def sigma0(self) -> int:
        return max([2 * self.m] + [mj + 1 for mj in self.boundary_orders])

    def to_dict(self) -> dict:
        return {
            "name": self.name, "b": self.b, "m": self.m,
            "boundary_orders": list(self.boundary_orders), "l": self.l, "tau": self.tau,
            "A": [[a, be, str(e)] for (a, be), e in sorted(self.A.items())],
            "B": [[j, lam, a, be, str(e)] for (j, lam), Bj in sorted(self.B.items())
                  for (a, be), e in sorted(Bj.items())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParabolicProblem1D":
        A = {(int(a), int(be)): e for a, be, e in d["A"]}
        B: dict = {}
        for j, lam, a, be, e in d["B"]:
            B.setdefault((int(j), int(lam)), {})[(int(a), int(be))] = e
        for j in range(1, int(d["m"]) + 1):
            for lam in (0, 1):
                B.setdefault((j, lam), {})
        return cls(int(d["b"]), int(d["m"]), tuple(d["boundary_orders"]), A, B,
                   float(d.get("l", 1.0)), float(d.get("tau", 1.0)), d.get("name", ""))


def heat_dirichlet(l: float = 1.0, tau: float = 1.0) -> ParabolicProblem1D:
    """u_t - u_xx = f with u(0,t) = g_0, u(l,t) = g_1 (D_x^2 = -d_xx)."""
    one = {(0, 0): 1}
    return ParabolicProblem1D(1, 1, (0,), {(0, 1): 1, (2, 0): 1}, {(1, 0): one, (1, 1): one},
                              l, tau, "heat-dirichlet")


def heat_neumann(l: float = 1.0, tau: float = 1.0) -> ParabolicProblem1D:
    """u_t - u_xx = f with u_x(0,t) = g_0, u_x(l,t) = g_1 (d_x = -i D_x)."""
    dx = {(1, 0): -sp.I}
    return ParabolicProblem1D(1, 1, (1,), {(0, 1): 1, (2, 0): 1}, {(1, 0): dx, (1, 1): dx},
                              l, tau, "heat-neumann")


@dataclass(frozen=True, eq=False)
class ParabolicRHS:
    """(f, g_{j,lam}, h_0..h_{kappa-1}); ``g`` is keyed by (j, lam)."""

    f: Data
    g: dict
    h: tuple

    def __post_init__(self):
        if self.f.axes != ("x", "t"):
            raise ValueError("f must be a function of (x, t)")
        g = {}
        for key, val in self.g.items():
            val = val if isinstance(val, Data) else Data.expression(val, ("t",))
            if val.axes != ("t",):
                raise ValueError("boundary data are functions of t")
            g[(int(key[0]), int(key[1]))] = val
        object.__setattr__(self, "g", g)
        h = tuple(v if isinstance(v, Data) else Data.expression(v, ("x",)) for v in self.h)
        if any(v.axes != ("x",) for v in h):
            raise ValueError("initial data are functions of x")
        object.__setattr__(self, "h", h)

    @classmethod
    def from_exprs(cls, f="0", g=None, h=("0",)) -> "ParabolicRHS":
        fd = f if isinstance(f, Data) else Data.expression(f, ("x", "t"))
        return cls(fd, dict(g or {}), tuple(h))

    def check_problem(self, problem: ParabolicProblem1D):
        if len(self.h) != problem.kappa:
            raise PreconditionError(f"need kappa = {problem.kappa} initial functions")
        missing = set(problem.B) - set(self.g)
        if missing:
            raise PreconditionError(f"boundary data missing for {sorted(missing)}")

    def replace_g(self, g: dict) -> "ParabolicRHS":
        new = dict(self.g)
        new.update(g)
        return ParabolicRHS(self.f, new, self.h)

    def to_dict(self) -> dict:
        return {"f": self.f.to_dict(),
                "g": [[j, lam, d.to_dict()] for (j, lam), d in sorted(self.g.items())],
                "h": [d.to_dict() for d in self.h]}

    @classmethod
    def from_dict(cls, d: dict) -> "ParabolicRHS":
        def load(v, axes):
            if isinstance(v, dict):
                return Data.from_dict(v)
            return Data.expression(v, axes)
        g = {(int(j), int(lam)): load(v, ("t",)) for j, lam, v in d.get("g", [])}
        h = tuple(load(v, ("x",)) for v in d.get("h", ["0"]))
        return cls(load(d.get("f", "0"), ("x", "t")), g, h)


def heat_rhs(f="0", g0="0", g1="0", h="0") -> ParabolicRHS:
    return ParabolicRHS.from_exprs(f, {(1, 0): g0, (1, 1): g1}, (h,))


# --- recurrence -------------------------------------------------------------------------


def _coeff_dt_at0(expr: sp.Expr, n: int) -> Data:
    return Data(("x",), expr=sp.diff(expr, T, n).subs(T, 0))


def _source_term(problem: ParabolicProblem1D, f: Data, n: int) -> Data:
    """d_t^n ((a^{0,kappa})^{-1} f)(x, 0)."""
    inv = 1 / problem.A[(0, problem.kappa)]
    if f.symbolic:
        if f.is_zero:
            return _zero(("x",))
        return Data(("x", "t"), expr=inv * f.expr).dt_at0(n)
    acc = _zero(("x",))
    for q in range(n + 1):
        c = _coeff_dt_at0(inv, n - q)
        if c.is_zero:
            continue
        acc = acc + nx.binom(n, q) * (c * f.dt_at0(q))
    return acc


def v_recurrence(problem: ParabolicProblem1D, rhs: ParabolicRHS, count: int) -> list[Data]:
    """v_0 .. v_count from the initial data and the equation solved for d_t^kappa u."""
    rhs.check_problem(problem)
    kappa = problem.kappa
    lead = problem.A[(0, kappa)]
    a0 = {key: -e / lead for key, e in problem.A.items() if key[1] <= kappa - 1}
    v: list[Data] = []
    for mu in range(count + 1):
        if mu < kappa:
            v.append(rhs.h[mu])
            continue
        n = mu - kappa
        acc = _source_term(problem, rhs.f, n)
        for (alpha, beta), e in a0.items():
            for q in range(n + 1):
                c = _coeff_dt_at0(e, n - q)
                if c.is_zero or v[beta + q].is_zero:
                    continue
                acc = acc + nx.binom(n, q) * (c * v[beta + q].dx(alpha))
        if acc.symbolic:
            acc = Data(("x",), expr=sp.expand(acc.expr))
        v.append(acc)
    return v


def heat_v_recurrence(rhs: ParabolicRHS, count: int) -> list[Data]:
    """v_0 = h, v_k = v_{k-1}'' + d_t^{k-1} f(x, 0), written out for the heat equation."""
    v = [rhs.h[0]]
    for k in range(1, count + 1):
        prev = v[-1]
        if prev.symbolic:
            d2 = Data(("x",), expr=sp.diff(prev.expr, X, 2))
        else:
            d2 = Data(("x",), values=nx.fd_derivative(prev.values, prev.h[0], 2), h=prev.h)
        nxt = d2 + rhs.f.dt_at0(k - 1)
        if nxt.symbolic:
            nxt = Data(("x",), expr=sp.expand(nxt.expr))
        v.append(nxt)
    return v


def boundary_operator(problem: ParabolicProblem1D, j: int, lam: int, k: int,
                      v: Sequence[Data]) -> Data:
    """B_{j,k,lam}(v_0, ..) as a function of x."""
    acc = _zero(("x",))
    for (alpha, beta), e in problem.B[(j, lam)].items():
        for q in range(k + 1):
            c = _to_complex(sp.diff(e, T, k - q).subs(T, 0))
            if c == 0 or v[beta + q].is_zero:
                continue
            factor = nx.binom(k, q) * (c.real if c.imag == 0 else c)
            acc = acc + factor * v[beta + q].dx(alpha)
    return acc


# --- condition bookkeeping -------------------------------------------------------------


def condition_indices(s: float, b: int, m_j: int) -> tuple[int, ...]:
    """k with 0 <= k < (s - m_j - 1/2 - b) / (2b)."""
    thr = (s - m_j - 0.5 - b) / (2 * b)
    if thr <= 0:
        return ()
    return tuple(range(int(math.ceil(thr))))


def exceptional_set(problem: ParabolicProblem1D, s_max: float) -> list[float]:
    """E within (sigma0, s_max]: points (2l+1)b + m_j + 1/2, l >= 0."""
    out = set()
    for mj in problem.boundary_orders:
        l = 0
        while True:
            e = (2 * l + 1) * problem.b + mj + 0.5
            if e > s_max:
                break
            if e > problem.sigma0:
                out.add(e)
            l += 1
    return sorted(out)


def distance_to_exceptional(problem: ParabolicProblem1D, s: float) -> float:
    pts = exceptional_set(problem, s + 2 * problem.b + 1)
    return min((abs(s - e) for e in pts), default=math.inf)


def _required_count(problem: ParabolicProblem1D, s: float) -> int:
    need = -1
    for mj in problem.boundary_orders:
        ks = condition_indices(s, problem.b, mj)
        if ks:
            need = max(need, mj // (2 * problem.b) + ks[-1])
    return need


@dataclass(frozen=True)
class CompatRecord:
    j: int
    lam: int
    k: int
    lhs: complex             # d_t^k g_{j,lam}(0)
    rhs: complex             # B_{j,k,lam}(v)(p_lam)
    residual: float
    satisfied: bool


@dataclass(frozen=True)
class CompatibilityReport:
    s: float
    records: tuple
    indices: dict            # j -> applicable k
    exceptional: bool
    distance_to_E: float
    tol: float

    @property
    def n_conditions(self) -> int:
        return len(self.records)

    @property
    def satisfied(self) -> bool:
        return not self.exceptional and all(r.satisfied for r in self.records)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.records), default=0.0)

    def rows(self) -> list[dict]:
        def fmt(z):
            return z.real if z.imag == 0 else z
        return [{"j": r.j, "lambda": r.lam, "k": r.k, "lhs": fmt(r.lhs), "rhs": fmt(r.rhs),
                 "residual": r.residual, "satisfied": r.satisfied} for r in self.records]


def condition_count(problem: ParabolicProblem1D, s: float) -> int:
    return 2 * sum(len(condition_indices(s, problem.b, mj)) for mj in problem.boundary_orders)


def _conditions(problem, rhs, s):
    """(j, lam, k, lhs, rhs) for every applicable condition."""
    need = _required_count(problem, s)
    if need < 0:
        return []
    v = v_recurrence(problem, rhs, need)
    out = []
    for j, mj in enumerate(problem.boundary_orders, start=1):
        for k in condition_indices(s, problem.b, mj):
            for lam, p in ((0, 0.0), (1, problem.l)):
                lhs = rhs.g[(j, lam)].deriv_at0(k)
                val = boundary_operator(problem, j, lam, k, v).value_at(p)
                out.append((j, lam, k, lhs, val))
    return out


def check_compat(problem: ParabolicProblem1D, rhs: ParabolicRHS, s: float,
                 tol: float = 1e-8) -> CompatibilityReport:
    if s < problem.sigma0:
        raise PreconditionError(f"s = {s} is below sigma0 = {problem.sigma0}")
    rhs.check_problem(problem)
    dist = distance_to_exceptional(problem, s)
    indices = {j: condition_indices(s, problem.b, mj)
               for j, mj in enumerate(problem.boundary_orders, start=1)}
    if dist < 1e-12:
        return CompatibilityReport(s, (), indices, True, 0.0, tol)
    recs = []
    for j, lam, k, lhs, val in _conditions(problem, rhs, s):
        res = abs(lhs - val)
        recs.append(CompatRecord(j, lam, k, lhs, val, res, res <= tol))
    return CompatibilityReport(s, tuple(recs), indices, False, dist, tol)


def taylor_correct(z: Sequence[complex]) -> Polynomial:
    """w(t) = sum_k z_k t^k / k!, so that w^(k)(0) = z_k."""
    z = list(z)
    if not z:
        return Polynomial([0.0])
    coef = [zk / math.factorial(k) for k, zk in enumerate(z)]
    if all(np.imag(c) == 0 for c in coef):
        coef = [float(np.real(c)) for c in coef]
    return Polynomial(coef)


def _poly_expr(p: Polynomial) -> sp.Expr:
    terms = []
    for k, c in enumerate(p.coef):
        c = complex(c)
        cc = sp.Float(c.real, 17) + (sp.I * sp.Float(c.imag, 17) if c.imag else 0)
        terms.append(cc * T ** k)
    return sp.Add(*terms)


def _add_poly(g: Data, p: Polynomial) -> Data:
    if g.symbolic:
        return Data(("t",), expr=g.expr + _poly_expr(p))
    t = g.h[0] * np.arange(g.values.shape[0])
    return Data(("t",), values=g.values + p(t), h=g.h)


def project_compatible(problem: ParabolicProblem1D, rhs: ParabolicRHS, s: float) -> ParabolicRHS:
    """g*_{j,lam} = g_{j,lam} + T(z), z_k = B_{j,k,lam}(v)(p_lam) - d_t^k g_{j,lam}(0)."""
    if s < problem.sigma0:
        raise PreconditionError(f"s = {s} is below sigma0 = {problem.sigma0}")
    if distance_to_exceptional(problem, s) < 1e-12:
        raise PreconditionError(f"s = {s} lies in the exceptional set")
    rhs.check_problem(problem)
    z: dict = {}
    for j, lam, k, lhs, val in _conditions(problem, rhs, s):
        z.setdefault((j, lam), []).append((k, val - lhs))
    new = {}
    for key, items in z.items():
        items.sort()
        vec = [d for _, d in items]
        if all(abs(d) == 0 for d in vec):
            continue
        new[key] = _add_poly(rhs.g[key], taylor_correct(vec))
    return rhs.replace_g(new) if new else rhs


# --- vanishing traces -------------------------------------------------------------------


@dataclass(frozen=True)
class TraceVanishingReport:
    ks: tuple
    residuals: tuple         # L2(0, l) norms of d_t^k u(., 0)
    tol: float

    @property
    def passes(self) -> bool:
        return all(r <= self.tol for r in self.residuals)


def trace_vanishing_order(u: SampledField, s: float, gamma: float,
                          atol: float = 1e-8) -> TraceVanishingReport:
    """Norms of the time traces d_t^k u(., 0) for 0 <= k < s gamma - 1/2.

    ``u`` is a box field on [0, l] x [0, tau] (t last).  The membership verdict
    uses ``atol`` scaled by max(1, max |u|).
    """
    if not isinstance(u.domain, Box) or u.grid.dims != 2:
        raise ValueError("u must be a 2-D box field with t as the last axis")
    thr = s * gamma - 0.5
    ks = tuple(range(int(math.ceil(thr)))) if thr > 0 else ()
    hx, ht = u.grid.h
    res = []
    for k in ks:
        prof = nx.edge_derivative(u.values, ht, k, "lower", axis=1)
        res.append(float(np.sqrt(np.trapezoid(np.abs(prof) ** 2, dx=hx))))
    scale = max(1.0, float(np.max(np.abs(u.values)))) if u.values.size else 1.0
    return TraceVanishingReport(ks, tuple(res), atol * scale)
