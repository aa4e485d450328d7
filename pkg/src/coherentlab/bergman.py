"""Weighted Bergman space on the disk: kernels, quadrature, and the
weight-alpha projective action.

Conventions (fixed once, used everywhere):
  * mu_alpha = (alpha-1)/pi (1-|w|^2)^(alpha-2) dLeb is a probability
    measure; the monomial basis e_n(w) = sqrt(G(alpha+n)/(n! G(alpha))) w^n
    is orthonormal.
  * kernel k(z, w) = (1 - z conj(w))^(-alpha) via the principal branch,
    k_z = sum_n conj(e_n(z)) e_n, <f, k_z> = f(z), ||k_z||^2 = (1-|z|^2)^(-alpha).
  * the action (pi(g) f)(w) = exp(-alpha ell(g^{-1}, w)) f(g^{-1} w) with the
    branch log of `moebius`; its matrix on degrees < N is computed by
    quadrature projection, so the truncation leak is measurable.
  * Haar measure on G ~ disk x circle: hyperbolic (1/pi)(1-|w|^2)^(-2) dLeb
    times the normalized circle; under it the formal dimension is alpha - 1.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln, roots_jacobi, roots_legendre

from .moebius import GroupElement, act, branch_log, check_in_disk, inverse, translation_to

DEFAULT_TRUNCATION = 80
DEFAULT_LEAK_BOUND = 1e-6


class TruncationLeakError(ArithmeticError):
    """Projection lost more mass than the configured leak bound."""


def require_weight(alpha: float) -> float:
    if alpha <= 1.0:
        raise ValueError(f"weight alpha must exceed 1, got {alpha}")
    return alpha


def kernel(alpha: float, z: complex, w: complex) -> complex:
    """Reproducing kernel k(z, w) = (1 - z conj(w))^(-alpha).

    The factor 1 - z conj(w) has positive real part on the disk, so the
    principal power is a global branch.
    """
    require_weight(alpha)
    check_in_disk(z)
    check_in_disk(w)
    return cmath.exp(-alpha * cmath.log(1.0 - z * w.conjugate()))


def kernel_norm_sq(alpha: float, z: complex) -> float:
    """||k_z||^2 = k(z, z) = (1 - |z|^2)^(-alpha)."""
    check_in_disk(z)
    return (1.0 - abs(z) ** 2) ** (-alpha)


def log_basis_scales(alpha: float, n_max: int) -> np.ndarray:
    """log sqrt(G(alpha+n) / (n! G(alpha))) for n < n_max."""
    n = np.arange(n_max)
    return 0.5 * (gammaln(alpha + n) - gammaln(n + 1.0) - gammaln(alpha))


def basis_matrix(alpha: float, n_max: int, points: np.ndarray) -> np.ndarray:
    """Matrix E[n, k] = e_n(points[k]) of the orthonormal monomials.

    Evaluated through logs to stay finite for large n; the n >= 1 rows vanish
    at points equal to zero.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    scales = log_basis_scales(alpha, n_max)[:, None]
    n = np.arange(n_max)[:, None]
    r = np.abs(pts)[None, :]
    with np.errstate(divide="ignore"):
        logr = np.where(r > 0.0, np.log(r, where=r > 0.0), -np.inf)
    mag = np.exp(scales + n * logr)
    mag[np.isnan(mag)] = 0.0
    out = mag * np.exp(1j * n * np.angle(pts)[None, :])
    zero = r[0] == 0.0
    if zero.any():
        out[:, zero] = 0.0
        out[0, zero] = 1.0
    return out


@dataclass
class CoeffVector:
    """Coordinates in the orthonormal basis e_n, degrees < len(coeffs)."""

    alpha: float
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @property
    def degree_bound(self) -> int:
        return len(self.coeffs)

    def norm_sq(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def eval(self, points: np.ndarray) -> np.ndarray:
        """Pointwise values sum_n coeffs[n] e_n(points)."""
        return basis_matrix(self.alpha, self.degree_bound, points).T @ self.coeffs

    def eval_at(self, w: complex) -> complex:
        return complex(self.eval(np.array([w]))[0])


def kernel_coeffs(alpha: float, z: complex, n_max: int) -> CoeffVector:
    """Coordinates of k_z: coeffs[n] = conj(e_n(z))."""
    require_weight(alpha)
    check_in_disk(z)
    vals = basis_matrix(alpha, n_max, np.array([z]))[:, 0]
    return CoeffVector(alpha, vals.conjugate())


def kernel_coeffs_tail(alpha: float, z: complex, n_max: int) -> float:
    """Mass of k_z beyond degree n_max: ||k_z||^2 - sum_{n<n_max} |e_n(z)|^2."""
    return kernel_norm_sq(alpha, z) - kernel_coeffs(alpha, z, n_max).norm_sq()


@dataclass
class Quadrature:
    """Tensor rule for the probability measure mu_alpha.

    Gauss-Jacobi in t = r^2 with weight (alpha-1)(1-t)^(alpha-2), uniform in
    angle; exact for |w|^(2n), n < n_radial, times angular harmonics of
    order < n_angular.
    """

    alpha: float
    nodes: np.ndarray
    weights: np.ndarray
    n_radial: int
    n_angular: int

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.dot(self.weights, values))

    def inner(self, f_values: np.ndarray, g_values: np.ndarray) -> complex:
        """<f, g> = integral of f conj(g) d mu_alpha from node values."""
        return complex(np.dot(self.weights, f_values * g_values.conjugate()))


def mu_alpha_quadrature(alpha: float, n_radial: int, n_angular: int) -> Quadrature:
    require_weight(alpha)
    if n_radial < 2:
        raise ValueError("n_radial must be at least 2")
    x, w = roots_jacobi(n_radial, alpha - 2.0, 0.0)
    t = (x + 1.0) / 2.0
    radial_w = (alpha - 1.0) * 2.0 ** (1.0 - alpha) * w
    theta = 2.0 * math.pi * np.arange(n_angular) / n_angular
    nodes = (np.sqrt(t)[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = np.repeat(radial_w / n_angular, n_angular)
    return Quadrature(alpha, nodes, weights, n_radial, n_angular)


def default_quadrature(alpha: float, n_max: int) -> Quadrature:
    return mu_alpha_quadrature(alpha, 2 * n_max, 4 * n_max)


def _moebius_map(g: GroupElement, points: np.ndarray) -> np.ndarray:
    return (g.a * points + g.b) / (g.b.conjugate() * points + g.a.conjugate())


def _jacobian_power_vec(g: GroupElement, points: np.ndarray, alpha: float) -> np.ndarray:
    ac = g.a.conjugate()
    ell = cmath.log(ac) + np.log(1.0 + (g.b.conjugate() / ac) * points)
    return np.exp(-alpha * ell)


def apply_pi(
    alpha: float,
    g: GroupElement,
    f: CoeffVector,
    quad: Optional[Quadrature] = None,
    leak_bound: float = DEFAULT_LEAK_BOUND,
) -> Tuple[CoeffVector, float]:
    """Degrees-< N part of pi(g) f, with the truncation leak.

    The action is evaluated at quadrature nodes and projected back onto the
    basis; the leak ||f||^2 - ||P_N pi(g) f||^2 measures what escaped the
    degree window (pi(g) is unitary on the full space).  Raises
    TruncationLeakError when the leak exceeds leak_bound.
    """
    require_weight(alpha)
    n_max = f.degree_bound
    if quad is None:
        quad = default_quadrature(alpha, n_max)
    gi = inverse(g)
    mapped = _moebius_map(gi, quad.nodes)
    values = _jacobian_power_vec(gi, quad.nodes, alpha) * f.eval(mapped)
    basis = basis_matrix(alpha, n_max, quad.nodes)
    coeffs = (basis.conjugate() * quad.weights[None, :]) @ values
    out = CoeffVector(alpha, coeffs)
    leak = f.norm_sq() - out.norm_sq()
    if leak > leak_bound:
        raise TruncationLeakError(
            f"truncation leak {leak:.3e} exceeds bound {leak_bound:.1e} "
            f"(N={n_max}, displacement of g may be too large)"
        )
    return out, max(leak, 0.0)


def pi_matrix(
    alpha: float,
    g: GroupElement,
    n_max: int,
    quad: Optional[Quadrature] = None,
) -> np.ndarray:
    """Matrix of P_N pi(g) P_N in the orthonormal basis, M[m, n] = <pi(g) e_n, e_m>."""
    require_weight(alpha)
    if quad is None:
        quad = default_quadrature(alpha, n_max)
    gi = inverse(g)
    mapped = _moebius_map(gi, quad.nodes)
    factor = _jacobian_power_vec(gi, quad.nodes, alpha)
    basis_here = basis_matrix(alpha, n_max, quad.nodes)
    basis_mapped = basis_matrix(alpha, n_max, mapped)
    return (basis_here.conjugate() * (quad.weights * factor)[None, :]) @ basis_mapped.T


def transform_kernel(alpha: float, g: GroupElement, z: complex) -> Tuple[complex, complex]:
    """The point g.z and the exact scalar c with pi(g) k_z = c k_{g.z}.

    c is evaluated as (pi(g) k_z)(0), which is exact because k_{g.z}(0) = 1:
    c = exp(-alpha [ell(g^{-1}, 0) + Log(1 - conj(z) (g^{-1}.0))]).  It agrees
    with the phase form sigma(g, g^{-1}) conj(J_g(z)^(alpha/2)), and
    |c|^2 = ((1 - |g.z|^2)/(1 - |z|^2))^alpha.
    """
    require_weight(alpha)
    check_in_disk(z)
    gi = inverse(g)
    w0 = gi.b / gi.a.conjugate()
    c = cmath.exp(-alpha * (branch_log(gi, 0.0j) + cmath.log(1.0 - z.conjugate() * w0)))
    return act(g, z), c


@dataclass
class FormalDimensionEstimate:
    value: float
    tail_bound: float
    radius: float


def estimate_formal_dimension(
    alpha: float,
    radius: float,
    n_radial: int = 200,
    n_angular: int = 8,
) -> FormalDimensionEstimate:
    """Formal dimension from the square-integrability of <k_0, pi(x) k_0>.

    Integrates |<eta, pi(x) eta>|^2, eta = k_0, over the Haar ball of
    hyperbolic radius `radius` (disk factor only; the compact factor has
    mass one and leaves the matrix coefficient modulus unchanged), then
    inverts.  The matrix coefficient comes from the transform_kernel scalar,
    |<eta, pi(g) eta>| = |c(g)|, not from any closed-form shortcut.  Under
    the package Haar convention the exact value is alpha - 1.

    tail_bound is an upper bound on the mass outside the ball, from
    |c|^2 = (1 - |w|^2)^alpha; the estimate overshoots the true value by at
    most a factor 1/(1 - tail_bound * value).
    """
    if alpha <= 2.0:
        raise ValueError("alpha must exceed 2 for a controlled tail at finite radius")
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    t0 = math.tanh(radius / 2.0) ** 2
    x, w = roots_legendre(n_radial)
    t = t0 * (x + 1.0) / 2.0
    tw = t0 * w / 2.0
    theta = 2.0 * math.pi * np.arange(n_angular) / n_angular
    total = 0.0
    for tk, wk in zip(t, tw):
        row = 0.0
        for th in theta:
            point = math.sqrt(tk) * cmath.exp(1j * th)
            _, c = transform_kernel(alpha, translation_to(point), 0.0j)
            row += abs(c) ** 2 / n_angular
        # Haar density in t = r^2: (1 - t)^(-2) dt (circle already averaged)
        total += wk * row / (1.0 - tk) ** 2
    tail = (1.0 - t0) ** (alpha - 1.0) / (alpha - 1.0)
    estimate = 1.0 / total
    if tail * estimate > 0.01:
        warnings.warn(
            f"formal-dimension tail bound {tail:.2e} exceeds 1% of the estimate",
            stacklevel=2,
        )
    return FormalDimensionEstimate(value=estimate, tail_bound=tail, radius=radius)
