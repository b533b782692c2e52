"""Densities, quadrature against the noise laws, and the parabolic cylinder function."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .laws import DEGENERATE, GAMMA, POISSON, LevyLaw

_SQRT_2PI = np.sqrt(2.0 * np.pi)
_MAX_SERIES_TERMS = 200_000


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be resolved to the requested tolerance."""


@dataclass(frozen=True)
class Quadrature:
    """Tolerance policy for adaptive quadrature and series truncation."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")

    def scaled(self, factor: float) -> "Quadrature":
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


DEFAULT_QUADRATURE = Quadrature()


def gauss_density(t: float, x, y=0.0):
    """Gaussian density with variance t and mean y, evaluated at x."""
    if t <= 0.0:
        raise ValueError("variance must be positive")
    x = np.asarray(x, dtype=float)
    return np.exp(-(x - y) ** 2 / (2.0 * t)) / (_SQRT_2PI * np.sqrt(t))


def gamma_density(t: float, x):
    """Density of the standard gamma subordinator at time t (shape t, scale 1)."""
    if t <= 0.0:
        raise ValueError("shape must be positive")
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return float(np.exp((t - 1.0) * np.log(x) - x - gammaln(t))) if x > 0.0 else 0.0
    out = np.zeros_like(x)
    pos = x > 0.0
    out[pos] = np.exp((t - 1.0) * np.log(x[pos]) - x[pos] - gammaln(t))
    return out


def poisson_pmf(t: float, lam: float, n) -> float:
    """P(N_t = n) for a Poisson process with intensity lam."""
    if t < 0.0 or lam <= 0.0:
        raise ValueError("need t >= 0 and lam > 0")
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValueError("n must be nonnegative")
    mu = lam * t
    if mu == 0.0:
        return np.where(n == 0, 1.0, 0.0) if n.ndim else float(n == 0)
    out = np.exp(n * np.log(mu) - mu - gammaln(n + 1.0))
    return out if n.ndim else float(out)


# quadpack error bounds are conservative; request tighter than we enforce
_REQUEST_MARGIN = 0.25


def _quad_gamma(f: Callable[[float], float], shape: float, q: Quadrature) -> tuple[float, float]:
    # y = u/(1-u) maps (0, inf) to (0, 1); the y^(shape-1) singularity at u = 0
    # is handled by the algebraic endpoint weight of QAWS.
    def smooth(u):
        y = u / (1.0 - u)
        return f(y) * np.exp(-y - (shape + 1.0) * np.log1p(-u) - gammaln(shape))

    val, err = integrate.quad(smooth, 0.0, 1.0, weight="alg", wvar=(shape - 1.0, 0.0),
                              epsabs=_REQUEST_MARGIN * q.abs_tol,
                              epsrel=_REQUEST_MARGIN * q.rel_tol, limit=q.max_subdivisions)
    return val, err


def _poisson_tail(pmf_n: float, mu: float, n: int) -> float:
    # geometric bound: pmf(m) <= pmf(n) * rho^(m-n) with rho = mu/(n+2) once n+2 > mu
    rho = mu / (n + 2.0)
    if rho >= 1.0:
        return np.inf
    return pmf_n * rho / (1.0 - rho)


def _sum_poisson(f: Callable[[int], float], mu: float, q: Quadrature) -> tuple[float, float]:
    total = 0.0
    abs_sum = 0.0
    pmf = np.exp(-mu)
    recent_f = 0.0
    n = 0
    while n < _MAX_SERIES_TERMS:
        fn = f(n)
        term = fn * pmf
        total += term
        abs_sum += abs(term)
        recent_f = max(abs(fn), recent_f * 0.5)
        tol = _REQUEST_MARGIN * (q.rel_tol * max(abs_sum, q.abs_tol) + q.abs_tol)
        if n > mu:
            tail = _poisson_tail(pmf, mu, n) * max(recent_f, abs(fn))
            if tail < tol and abs(term) < tol:
                return total, tail + abs(term)
        pmf *= mu / (n + 1.0)
        n += 1
    raise QuadratureError(f"Poisson series did not converge within {_MAX_SERIES_TERMS} terms")


def integrate_levy(f: Callable[[float], float], law: LevyLaw, t: float,
                   q: Quadrature = DEFAULT_QUADRATURE) -> float:
    """Integral of f(y) against the marginal law of X_t.

    Gamma integrals are compactified with y = u/(1-u) and refined adaptively;
    Poisson integrals are series truncated by a tail bound.  Raises
    QuadratureError when the reported error exceeds the requested tolerance.
    """
    if t <= 0.0:
        raise ValueError("time must be positive")
    if law.kind == DEGENERATE:
        return float(f(0.0))
    if law.kind == GAMMA:
        val, err = _quad_gamma(f, t, q)
    elif law.kind == POISSON:
        val, err = _sum_poisson(f, law.rate * t, q)
    else:  # pragma: no cover
        raise ValueError(law.kind)
    if err > q.rel_tol * abs(val) + q.abs_tol:
        raise QuadratureError(f"levy integral error estimate {err:.3e} exceeds tolerance (value {val:.6e})")
    return float(val)


def power_gauss_integral(nu: float, beta: float, alpha: float,
                         q: Quadrature = DEFAULT_QUADRATURE) -> float:
    """Integral over (0, inf) of y^(nu-1) exp(-beta y^2 - alpha y) dy, for nu, beta > 0."""
    if nu <= 0.0 or beta <= 0.0:
        raise ValueError("need nu > 0 and beta > 0")

    def bulk(y):
        return np.exp(-beta * y * y - alpha * y)

    ea = _REQUEST_MARGIN * q.abs_tol
    er = _REQUEST_MARGIN * q.rel_tol
    head, e1 = integrate.quad(bulk, 0.0, 1.0, weight="alg", wvar=(nu - 1.0, 0.0),
                              epsabs=ea, epsrel=er, limit=q.max_subdivisions)

    def tail_f(y):
        return np.exp((nu - 1.0) * np.log(y) - beta * y * y - alpha * y)

    # put the interior maximum (present when alpha < 0) inside a finite panel
    peak = max(1.0, -alpha / (2.0 * beta)) if alpha < 0.0 else 1.0
    mid, e2 = integrate.quad(tail_f, 1.0, 4.0 * peak + 10.0,
                             epsabs=ea, epsrel=er, limit=q.max_subdivisions)
    far, e3 = integrate.quad(tail_f, 4.0 * peak + 10.0, np.inf,
                             epsabs=ea, epsrel=er, limit=q.max_subdivisions)
    val = head + mid + far
    err = e1 + e2 + e3
    if err > q.rel_tol * abs(val) + q.abs_tol:
        raise QuadratureError(f"power-Gauss integral error {err:.3e} exceeds tolerance")
    return float(val)


def parabolic_cylinder_D(order: float, z: float,
                         q: Quadrature = DEFAULT_QUADRATURE) -> float:
    """Parabolic cylinder function D_order(z) for order <= 0.

    For order = -nu < 0 the value is defined through the Gaussian-power
    integral identity at beta = 1/2,

        D_{-nu}(z) = exp(-z^2/4) / Gamma(nu) * integral y^(nu-1) exp(-y^2/2 - z y) dy,

    evaluated by adaptive quadrature.  Order 0 is the nu -> 0 limit
    exp(-z^2/4).  Positive orders are outside the identity regime.
    """
    if order > 0.0:
        raise ValueError("only orders <= 0 are supported (identity regime)")
    if order == 0.0:
        return float(np.exp(-z * z / 4.0))
    return float(np.exp(parabolic_cylinder_log_D(order, z, q)))


def parabolic_cylinder_log_D(order: float, z: float,
                             q: Quadrature = DEFAULT_QUADRATURE) -> float:
    """log D_order(z) for order < 0; avoids under/overflow for large |z|."""
    if order >= 0.0:
        raise ValueError("log form needs order < 0")
    nu = -order
    integral = power_gauss_integral(nu, 0.5, z, q)
    return float(-z * z / 4.0 - gammaln(nu) + np.log(integral))
