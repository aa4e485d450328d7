"""SU(1,1) matrices, their disk action, automorphy-factor logarithms and the
projective cocycle.

An element is stored as the pair (a, b) of the matrix [[a, b], [conj(b),
conj(a)]] with |a|^2 - |b|^2 = 1.  The group acts on the open unit disk by
w -> (a w + b) / (conj(b) w + conj(a)); the complex Jacobian of that map is
J_g(w) = (conj(b) w + conj(a))^(-2).  Non-integer powers of J_g are defined
through a fixed logarithm branch `branch_log`, which makes every phase in the
package deterministic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

DET_TOL = 1e-12


class DiskDomainError(ValueError):
    """Point lies outside the open unit disk."""


@dataclass(frozen=True)
class GroupElement:
    """SU(1,1) matrix [[a, b], [conj(b), conj(a)]].

    PSU(1,1) identification (g ~ -g) is handled by the consumers that need
    it (lattice deduplication); the stored matrix is an honest SU(1,1)
    representative.
    """

    a: complex
    b: complex

    def __post_init__(self):
        det = abs(self.a) ** 2 - abs(self.b) ** 2
        if abs(det - 1.0) > 1e-6:
            raise ValueError(f"not an SU(1,1) matrix: |a|^2-|b|^2 = {det!r}")

    @property
    def det_residual(self) -> float:
        return abs(abs(self.a) ** 2 - abs(self.b) ** 2 - 1.0)


IDENTITY = GroupElement(1.0 + 0.0j, 0.0j)


def _renormalized(a: complex, b: complex) -> GroupElement:
    s = math.sqrt(abs(a) ** 2 - abs(b) ** 2)
    return GroupElement(a / s, b / s)


def rot(theta: float) -> GroupElement:
    """Rotation about 0 by angle theta: w -> e^{i theta} w."""
    return GroupElement(cmath.exp(0.5j * theta), 0.0j)


def translation_to(w: complex) -> GroupElement:
    """The symmetric (positive, real-trace) element mapping 0 to w."""
    r = abs(w)
    if r >= 1.0:
        raise DiskDomainError(f"target {w!r} not in the open disk")
    c = 1.0 / math.sqrt(1.0 - r * r)
    return GroupElement(complex(c), w * c)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Matrix product g h, renormalized to the determinant-one sheet."""
    a = g.a * h.a + g.b * h.b.conjugate()
    b = g.a * h.b + g.b * h.a.conjugate()
    return _renormalized(a, b)


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.a.conjugate(), -g.b)


def power(g: GroupElement, n: int) -> GroupElement:
    if n < 0:
        return power(inverse(g), -n)
    out = IDENTITY
    for _ in range(n):
        out = compose(out, g)
    return out


def check_in_disk(w: complex) -> complex:
    if abs(w) >= 1.0:
        raise DiskDomainError(f"{w!r} is not strictly inside the unit disk")
    return w


def act(g: GroupElement, w: complex) -> complex:
    """Moebius action g . w = (a w + b) / (conj(b) w + conj(a))."""
    check_in_disk(w)
    return (g.a * w + g.b) / (g.b.conjugate() * w + g.a.conjugate())


def branch_log(g: GroupElement, w: complex) -> complex:
    """Fixed logarithm ell(g, w) of the automorphy factor conj(b) w + conj(a).

    ell(g, w) = log(conj(a)) + Log(1 + (conj(b)/conj(a)) w) with principal
    logarithms.  The second factor has strictly positive real part because
    |b/a| < 1 and |w| < 1, so the branch is continuous in w and the same on
    every platform.  exp(-2 ell) recovers the Jacobian J_g(w).
    """
    check_in_disk(w)
    ac = g.a.conjugate()
    return cmath.log(ac) + cmath.log(1.0 + (g.b.conjugate() / ac) * w)


def jacobian(g: GroupElement, w: complex) -> complex:
    """Complex Jacobian J_g(w) of the disk action, computed directly."""
    return (g.b.conjugate() * w + g.a.conjugate()) ** (-2)


def jacobian_power(g: GroupElement, w: complex, alpha: float) -> complex:
    """The fixed branch of J_g(w)^(alpha/2), namely exp(-alpha ell(g, w))."""
    return cmath.exp(-alpha * branch_log(g, w))


def cocycle(g: GroupElement, h: GroupElement, alpha: float) -> complex:
    """Projective cocycle sigma_alpha with pi(g) pi(h) = sigma(g, h) pi(gh).

    Here pi is the weight-alpha action (pi(g) f)(w) =
    exp(-alpha ell(g^{-1}, w)) f(g^{-1} . w).  Composing the branch logs of
    the two factors against the one of the product leaves a 2*pi*i-integer
    defect that is independent of the evaluation point, and

        sigma(g, h) = exp(-alpha [ell(h^{-1}, g^{-1}.0) + ell(g^{-1}, 0)
                                  - ell((gh)^{-1}, 0)]).

    The value is unimodular, satisfies the standard normalization and
    associativity identities, and is trivial for integer alpha.
    """
    gi = inverse(g)
    hi = inverse(h)
    ghi = inverse(compose(g, h))
    defect = branch_log(hi, act(gi, 0.0j)) + branch_log(gi, 0.0j) - branch_log(ghi, 0.0j)
    return cmath.exp(-alpha * defect)


def hyperbolic_distance(w1: complex, w2: complex) -> float:
    """Poincare distance in the curvature -1 normalization."""
    check_in_disk(w1)
    check_in_disk(w2)
    return 2.0 * math.atanh(abs((w1 - w2) / (1.0 - w1 * w2.conjugate())))


def displacement(g: GroupElement) -> float:
    """Hyperbolic distance by which g moves the origin."""
    return 2.0 * math.atanh(abs(g.b) / abs(g.a))


def matrix_distance_mod_sign(g: GroupElement, h: GroupElement) -> float:
    """max-norm distance between the matrices, minimized over the PSU sign."""
    dplus = max(abs(g.a - h.a), abs(g.b - h.b))
    dminus = max(abs(g.a + h.a), abs(g.b + h.b))
    return min(dplus, dminus)


def is_identity_mod_sign(g: GroupElement, tol: float = 1e-9) -> bool:
    return matrix_distance_mod_sign(g, IDENTITY) <= tol
