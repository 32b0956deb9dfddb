"""Richardson-extrapolated central differences on box domains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class BoundaryError(ValueError):
    """FD stencil would leave the chart domain."""


@dataclass(frozen=True)
class FDParams:
    step: float = 1e-4
    levels: int = 2


def _richardson(estimates):
    # estimates[k] computed with step h / 2^k, leading error O(h^2)
    rows = list(estimates)
    for j in range(1, len(rows)):
        factor = 4.0**j
        rows = [
            (factor * rows[k + 1] - rows[k]) / (factor - 1.0)
            for k in range(len(rows) - 1)
        ]
    return rows[0]


def check_stencil(u, radius: float, domain) -> None:
    if domain is None:
        return
    for a, (lo, hi) in enumerate(domain):
        if u[a] - radius < lo or u[a] + radius > hi:
            raise BoundaryError(
                f"point {np.asarray(u).tolist()} too close to the domain "
                f"boundary for an FD stencil of radius {radius}"
            )


def directional_derivative(f, u, direction, fd: FDParams = FDParams(), domain=None):
    """Derivative of f along ``direction`` (not normalized here).

    The direction is normalized internally, differenced, and scaled back,
    so the step length in parameter space equals ``fd.step`` regardless of
    the magnitude of the direction vector.
    """
    u = np.asarray(u, dtype=float)
    d = np.asarray(direction, dtype=float)
    scale = float(np.linalg.norm(d))
    if scale == 0.0:
        probe = np.asarray(f(u), dtype=float)
        return probe * 0.0
    d = d / scale
    check_stencil(u, fd.step * np.abs(d).max(), domain)
    ests = []
    for lvl in range(fd.levels):
        h = fd.step / 2.0**lvl
        fp = np.asarray(f(u + h * d), dtype=float)
        fm = np.asarray(f(u - h * d), dtype=float)
        ests.append((fp - fm) / (2.0 * h))
    return scale * _richardson(ests)


def gradient_hessian(f, u, fd: FDParams = FDParams(), domain=None):
    """Gradient and Hessian of a float- or vector-valued map of u.

    Returns arrays of shape ``out_shape + (n,)`` and ``out_shape + (n, n)``.
    """
    u = np.asarray(u, dtype=float)
    n = u.size
    check_stencil(u, fd.step, domain)
    f0 = np.asarray(f(u), dtype=float)
    shape = f0.shape
    grads, hesss = [], []
    for lvl in range(fd.levels):
        h = fd.step / 2.0**lvl
        grad = np.empty(shape + (n,))
        hess = np.empty(shape + (n, n))
        plus, minus = [], []
        for a in range(n):
            ea = np.zeros(n)
            ea[a] = h
            plus.append(np.asarray(f(u + ea), dtype=float))
            minus.append(np.asarray(f(u - ea), dtype=float))
            grad[..., a] = (plus[a] - minus[a]) / (2.0 * h)
            hess[..., a, a] = (plus[a] - 2.0 * f0 + minus[a]) / h**2
        for a in range(n):
            for b in range(a + 1, n):
                ea = np.zeros(n)
                eb = np.zeros(n)
                ea[a] = h
                eb[b] = h
                fpp = np.asarray(f(u + ea + eb), dtype=float)
                fpm = np.asarray(f(u + ea - eb), dtype=float)
                fmp = np.asarray(f(u - ea + eb), dtype=float)
                fmm = np.asarray(f(u - ea - eb), dtype=float)
                mixed = (fpp - fpm - fmp + fmm) / (4.0 * h**2)
                hess[..., a, b] = mixed
                hess[..., b, a] = mixed
        grads.append(grad)
        hesss.append(hess)
    return _richardson(grads), _richardson(hesss)
