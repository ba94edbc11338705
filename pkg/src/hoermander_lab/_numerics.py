"""Low-level numerical helpers: finite-difference weights, smooth steps,
box extensions and FFT differentiation.

Nothing here knows about Hoermander spaces; the public modules build on it.
"""
from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

from .errors import ResolutionError

DEFAULT_FD_ACCURACY = 8
DEFAULT_REFLECTION_ORDER = 6


@lru_cache(maxsize=256)
def fornberg_weights(x0: float, offsets: tuple[float, ...], deriv: int) -> np.ndarray:
    """Finite-difference weights for the ``deriv``-th derivative at ``x0``.

    Fornberg's recursion (Math. Comp. 51, 1988); ``offsets`` are node positions
    in units of the grid spacing.
    """
    x = np.asarray(offsets, dtype=float)
    n = len(x)
    if deriv >= n:
        raise ValueError(f"need more than {deriv} nodes for derivative order {deriv}")
    c = np.zeros((n, deriv + 1))
    c1 = 1.0
    c4 = x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, deriv)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    w = c[:, deriv].copy()
    w.setflags(write=False)
    return w


def fd_derivative(values, h: float, deriv: int, axis: int = -1,
                  accuracy: int = DEFAULT_FD_ACCURACY) -> np.ndarray:
    """Derivative of uniformly sampled data along ``axis``.

    Centered stencils in the interior, shifted one-sided stencils near the
    edges; every output point uses ``deriv + accuracy`` nodes (one more in the
    centered case when parity requires it).
    """
    v = np.moveaxis(np.asarray(values), axis, -1)
    if deriv == 0:
        return np.moveaxis(v.copy(), -1, axis)
    n = v.shape[-1]
    width = deriv + accuracy
    if width % 2 == 0:
        width += 1
    if n < width:
        raise ResolutionError(
            f"{n} samples cannot support a derivative of order {deriv} "
            f"at accuracy {accuracy} ({width} nodes needed)")
    half = width // 2
    out = np.empty(v.shape, dtype=np.result_type(v.dtype, float))
    centre = fornberg_weights(0.0, tuple(range(-half, half + 1)), deriv)
    interior = slice(half, n - half)
    acc = np.zeros(v[..., interior].shape, dtype=out.dtype)
    for j, wj in enumerate(centre):
        acc += wj * v[..., j:n - width + 1 + j]
    out[..., interior] = acc
    for i in list(range(half)) + list(range(n - half, n)):
        start = min(max(i - half, 0), n - width)
        nodes = tuple(range(start - i, start - i + width))
        w = fornberg_weights(0.0, nodes, deriv)
        out[..., i] = np.tensordot(v[..., start:start + width], w, axes=([-1], [0]))
    out /= h ** deriv
    return np.moveaxis(out, -1, axis)


def edge_derivative(values, h: float, deriv: int, side: str = "lower", axis: int = -1,
                    accuracy: int = DEFAULT_FD_ACCURACY):
    """One-sided derivative at the first (``side='lower'``) or last sample."""
    v = np.moveaxis(np.asarray(values), axis, -1)
    if deriv == 0:
        return v[..., 0] if side == "lower" else v[..., -1]
    width = deriv + accuracy
    if v.shape[-1] < width:
        raise ResolutionError(
            f"{v.shape[-1]} samples cannot support a one-sided derivative of order {deriv}")
    if side == "lower":
        w = fornberg_weights(0.0, tuple(range(width)), deriv)
        return np.tensordot(v[..., :width], w, axes=([-1], [0])) / h ** deriv
    w = fornberg_weights(0.0, tuple(range(-width + 1, 1)), deriv)
    return np.tensordot(v[..., -width:], w, axes=([-1], [0])) / h ** deriv


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, built from exp(-1/x)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
        out = a / (a + b)
    return np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, out))


@lru_cache(maxsize=16)
def reflection_coefficients(order: int) -> np.ndarray:
    """c_j with sum_j c_j (-j)^m = 1, m < order: u(-y) ~ sum_j c_j u(j y)."""
    j = np.arange(1, order + 1, dtype=float)
    a = np.array([(-j) ** m for m in range(order)])
    c = np.linalg.solve(a, np.ones(order))
    c.setflags(write=False)
    return c


def _side_pad(v: np.ndarray, pad: int, mode: str, order: int) -> np.ndarray:
    """Samples at distances 1..pad beyond the first sample of the last axis."""
    if mode == "zero" or pad == 0:
        return np.zeros(v.shape[:-1] + (pad,), dtype=v.dtype)
    c = reflection_coefficients(order)
    ext = np.zeros(v.shape[:-1] + (pad,), dtype=np.result_type(v.dtype, float))
    for i in range(1, pad + 1):
        ext[..., i - 1] = sum(cj * v[..., (j + 1) * i] for j, cj in enumerate(c))
    # plateau of width pad/4, then a smooth decay to zero at the pad end
    d = np.arange(1, pad + 1) / (pad + 1)
    taper = 1.0 - smooth_step((d - 0.25) / 0.7)
    return ext * taper


def pad_width(n_points: int, order: int = DEFAULT_REFLECTION_ORDER) -> int:
    """Pad length used on each side of a box axis with ``n_points`` samples."""
    return (n_points - 1) // order


def extend_axis(values, axis: int, lower: str, upper: str,
                order: int = DEFAULT_REFLECTION_ORDER, pad: int | None = None):
    """Extend endpoint-inclusive samples along ``axis`` to a periodic array.

    ``lower``/``upper`` are ``'smooth'`` (order-``order`` reflection times a
    smooth taper) or ``'zero'``.  Returns ``(array, offset)`` where ``offset``
    is the index of the first original sample in the output; the output length
    is even.
    """
    v = np.moveaxis(np.asarray(values), axis, -1)
    n = v.shape[-1]
    if pad is None:
        pad = pad_width(n, order)
    if pad < 4 and "smooth" in (lower, upper):
        raise ResolutionError(f"axis with {n} samples is too short for a smooth extension")
    lo = _side_pad(v, pad, lower, order)[..., ::-1]
    hi = _side_pad(v[..., ::-1], pad, upper, order)
    parts = [lo, v.astype(np.result_type(v.dtype, lo.dtype)), hi]
    total = n + 2 * pad
    if total % 2:
        parts.append(np.zeros(v.shape[:-1] + (1,), dtype=parts[1].dtype))
    out = np.concatenate(parts, axis=-1)
    return np.moveaxis(out, -1, axis), pad


def even_reflect_axis(values, axis: int):
    """Even periodic extension of endpoint-inclusive samples: length 2(n-1)."""
    v = np.moveaxis(np.asarray(values), axis, -1)
    out = np.concatenate([v, v[..., -2:0:-1]], axis=-1)
    return np.moveaxis(out, -1, axis)


def angular_frequencies(n: int, period: float) -> np.ndarray:
    """FFT-ordered angular frequencies 2*pi*k/period, k in [-n/2, n/2)."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=period / n)


def spectral_derivative(values, period: float, deriv: int, axis: int = -1) -> np.ndarray:
    """Exact derivative of the trigonometric interpolant along ``axis``."""
    v = np.asarray(values)
    if deriv == 0:
        return v.copy()
    n = v.shape[axis]
    k = angular_frequencies(n, period)
    mult = (1j * k) ** deriv
    if deriv % 2 and n % 2 == 0:
        mult[n // 2] = 0.0
    shape = [1] * v.ndim
    shape[axis] = n
    out = np.fft.ifft(np.fft.fft(v, axis=axis) * mult.reshape(shape), axis=axis)
    if np.isrealobj(v):
        return out.real
    return out


def tail_fraction(coeffs, axis: int = -1, band: float = 0.1) -> float:
    """Largest |coefficient| in the top ``band`` of |frequency index|, relative
    to the overall largest coefficient."""
    c = np.abs(np.moveaxis(np.asarray(coeffs), axis, -1))
    n = c.shape[-1]
    idx = np.abs(np.fft.fftfreq(n) * n)
    top = idx >= (0.5 - band) * n
    peak = c.max()
    if peak == 0:
        return 0.0
    return float(c[..., top].max() / peak)


def binom(n: int, k: int) -> int:
    return factorial(n) // (factorial(k) * factorial(n - k))
