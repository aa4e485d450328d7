"""Fuchsian lattice presets, finite ball enumeration and orbifold co-volumes.

Two presets are provided: hyperbolic triangle groups (two elliptic
generators, one of the cone vertices placed at the origin) and the modular
group transported to the disk by the Cayley transform.  Balls are finite
word-metric truncations, deduplicated modulo the SU(1,1) sign, and carry the
lookup structure needed by the twisted group-ring layer.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .moebius import (
    IDENTITY,
    GroupElement,
    act,
    compose,
    displacement,
    hyperbolic_distance,
    inverse,
    matrix_distance_mod_sign,
    power,
    rot,
    translation_to,
)

DEFAULT_DEDUP_TOL = 1e-8
DEFAULT_ELEMENT_CAP = 200_000
RELATION_TOL = 1e-9


class BallBudgetError(RuntimeError):
    """Ball enumeration exceeded the element cap."""


@dataclass(frozen=True)
class LatticePreset:
    """A lattice described by its presentation data.

    kind is "triangle" or "modular".  For triangle groups, orders = (p, q, r)
    with 1/p + 1/q + 1/r < 1; origin_order selects which cone order sits at
    the origin (default: the first).  The modular preset has the order-2
    elliptic point at the origin.
    """

    kind: str
    orders: tuple = ()
    origin_order: Optional[int] = None

    def __post_init__(self):
        if self.kind == "triangle":
            p, q, r = self.orders
            if min(p, q, r) < 2:
                raise ValueError("triangle orders must be >= 2")
            if 1.0 / p + 1.0 / q + 1.0 / r >= 1.0:
                raise ValueError(f"signature {self.orders} is not hyperbolic")
            if self.origin_order is not None and self.origin_order not in self.orders:
                raise ValueError(f"origin order {self.origin_order} not among {self.orders}")
        elif self.kind == "modular":
            if self.orders:
                raise ValueError("modular preset takes no orders")
        else:
            raise ValueError(f"unknown preset kind {self.kind!r}")

    @property
    def cone_orders(self) -> tuple:
        """Cone orders of the genus-0 quotient orbifold (inf for a cusp)."""
        if self.kind == "triangle":
            return self.orders
        return (2, 3, math.inf)

    def label(self) -> str:
        if self.kind == "triangle":
            base = "triangle(%d,%d,%d)" % self.orders
            if self.origin_order is not None:
                base += f"@{self.origin_order}"
            return base
        return "modular"


def triangle(p: int, q: int, r: int, origin_order: Optional[int] = None) -> LatticePreset:
    return LatticePreset("triangle", (p, q, r), origin_order)


def modular() -> LatticePreset:
    return LatticePreset("modular")


def _triangle_generators(p: int, q: int, r: int) -> list:
    # Hyperbolic triangle with angles pi/p at the origin and pi/q at a vertex
    # on the positive real axis; the side length comes from the law of
    # cosines cosh(d) sin A sin B = cos A cos B + cos C.
    A, B, C = math.pi / p, math.pi / q, math.pi / r
    coshd = (math.cos(A) * math.cos(B) + math.cos(C)) / (math.sin(A) * math.sin(B))
    d = math.acosh(coshd)
    g_p = rot(2.0 * math.pi / p)
    t = translation_to(math.tanh(d / 2.0))
    g_q = compose(compose(t, rot(2.0 * math.pi / q)), inverse(t))
    return [g_p, g_q]


def _sl2r_to_su11(A: float, B: float, C: float, D: float) -> GroupElement:
    # Cayley conjugation of [[A,B],[C,D]] in SL(2,R); i goes to 0.
    a = complex((A + D) / 2.0, (B - C) / 2.0)
    b = complex((A - D) / 2.0, -(B + C) / 2.0)
    return GroupElement(a, b)


def _relation_residual(g: GroupElement, order: int) -> float:
    return matrix_distance_mod_sign(power(g, order), IDENTITY)


def build_generators(preset: LatticePreset) -> list:
    """Generators of the preset, with relations verified numerically.

    Triangle(p, q, r): the elliptic pair (g_p, g_q) with g_p = rot(2 pi / p)
    fixing the origin, after cycling the orders so the requested cone order
    comes first.  Modular: the disk images of S and ST (orders 2 and 3),
    which generate the same group as S, T.
    """
    if preset.kind == "triangle":
        orders = list(preset.orders)
        if preset.origin_order is not None:
            i = orders.index(preset.origin_order)
            orders = orders[i:] + orders[:i]
        p, q, r = orders
        g_p, g_q = _triangle_generators(p, q, r)
        residuals = (
            _relation_residual(g_p, p),
            _relation_residual(g_q, q),
            _relation_residual(compose(g_p, g_q), r),
        )
        if max(residuals) > RELATION_TOL:
            raise ArithmeticError(f"triangle relations violated: {residuals}")
        return [g_p, g_q]

    g_s = _sl2r_to_su11(0.0, -1.0, 1.0, 0.0)
    g_t = _sl2r_to_su11(1.0, 1.0, 0.0, 1.0)
    g_u = compose(g_s, g_t)
    if _relation_residual(g_s, 2) > RELATION_TOL or _relation_residual(g_u, 3) > RELATION_TOL:
        raise ArithmeticError("modular generator relations violated")
    return [g_s, g_u]


class _SignBucketIndex:
    """Spatial hash of SU(1,1) matrices, equality taken modulo +/-I.

    Entries are bucketed by floor-rounded coordinates; queries scan the 3^4
    neighbor buckets of both signs so that matching never depends on which
    side of a rounding boundary a float landed.
    """

    _OFFSETS = [
        (i, j, k, l)
        for i in (-1, 0, 1)
        for j in (-1, 0, 1)
        for k in (-1, 0, 1)
        for l in (-1, 0, 1)
    ]

    def __init__(self, tol: float):
        self.tol = tol
        self._buckets: dict = {}
        self._elements: list = []

    @staticmethod
    def _coords(g: GroupElement):
        return (g.a.real, g.a.imag, g.b.real, g.b.imag)

    def _key(self, coords):
        return tuple(math.floor(x / self.tol) for x in coords)

    def find(self, g: GroupElement) -> Optional[int]:
        for sign in (1.0, -1.0):
            base = self._key(tuple(sign * x for x in self._coords(g)))
            for off in self._OFFSETS:
                key = tuple(b + o for b, o in zip(base, off))
                for idx in self._buckets.get(key, ()):
                    if matrix_distance_mod_sign(g, self._elements[idx]) <= self.tol:
                        return idx
        return None

    def insert(self, g: GroupElement) -> int:
        idx = len(self._elements)
        self._elements.append(g)
        self._buckets.setdefault(self._key(self._coords(g)), []).append(idx)
        return idx


@dataclass
class LatticeBall:
    """Finite word-metric ball of a lattice, deduplicated modulo +/-I.

    Contains the identity (index 0) and is closed under inverses; `radius`
    is the largest orbit displacement present, `complete_radius` the
    frontier-displacement heuristic below which no element should be
    missing.
    """

    elements: list
    words: list
    generators: list
    dedup_tol: float
    radius: float
    complete_radius: float
    _index: _SignBucketIndex = field(repr=False)
    _inverse: dict = field(default_factory=dict, repr=False)
    _products: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def find_index(self, g: GroupElement) -> Optional[int]:
        return self._index.find(g)

    def inverse_index(self, i: int) -> Optional[int]:
        if i not in self._inverse:
            self._inverse[i] = self.find_index(inverse(self.elements[i]))
        return self._inverse[i]

    def product_index(self, i: int, j: int) -> Optional[int]:
        key = (i, j)
        if key not in self._products:
            self._products[key] = self.find_index(compose(self.elements[i], self.elements[j]))
        return self._products[key]

    def displacements(self) -> list:
        return [displacement(g) for g in self.elements]

    def orbit_points(self, z: complex = 0.0j) -> list:
        return [act(g, z) for g in self.elements]


def enumerate_ball(
    gens: Sequence[GroupElement],
    max_word_len: int,
    max_radius: float = math.inf,
    dedup_tol: float = DEFAULT_DEDUP_TOL,
    element_cap: int = DEFAULT_ELEMENT_CAP,
) -> LatticeBall:
    """Breadth-first closure of words in gens and their inverses.

    All words up to max_word_len are expanded (deterministic order), then
    elements whose orbit displacement exceeds max_radius are dropped; the
    displacement of g equals that of g^{-1}, so the cut preserves closure
    under inverses.
    """
    if max_word_len > 30:
        raise ValueError("max_word_len > 30 refused (exponential blow-up guard)")
    alphabet = []
    letters = []
    for i, g in enumerate(gens):
        alphabet.append(g)
        letters.append(chr(ord("a") + i))
        alphabet.append(inverse(g))
        letters.append(chr(ord("A") + i))

    index = _SignBucketIndex(dedup_tol)
    elements = [IDENTITY]
    words = [""]
    index.insert(IDENTITY)
    frontier = [0]
    for _ in range(max_word_len):
        new_frontier = []
        for i in frontier:
            for g, letter in zip(alphabet, letters):
                h = compose(elements[i], g)
                if index.find(h) is not None:
                    continue
                if len(elements) >= element_cap:
                    raise BallBudgetError(f"element cap {element_cap} exceeded")
                index.insert(h)
                elements.append(h)
                words.append(words[i] + letter)
                new_frontier.append(len(elements) - 1)
        frontier = new_frontier

    frontier_disp = [displacement(elements[i]) for i in frontier]
    complete_radius = min(frontier_disp) if frontier_disp else math.inf

    keep = [i for i, g in enumerate(elements) if displacement(g) <= max_radius]
    kept_index = _SignBucketIndex(dedup_tol)
    kept_elements = []
    kept_words = []
    for i in keep:
        kept_index.insert(elements[i])
        kept_elements.append(elements[i])
        kept_words.append(words[i])
    radius = max((displacement(g) for g in kept_elements), default=0.0)
    return LatticeBall(
        elements=kept_elements,
        words=kept_words,
        generators=list(gens),
        dedup_tol=dedup_tol,
        radius=radius,
        complete_radius=min(complete_radius, max_radius),
        _index=kept_index,
    )


@dataclass
class Stabilizer:
    """Ball elements fixing a point, with the fixed point and group order."""

    elements: list
    indices: list
    fixed_point: complex
    order: int


def stabilizer_of(ball: LatticeBall, z: complex, tol: float = 1e-8) -> Stabilizer:
    """All ball elements gamma with gamma . z = z (within tol).

    Warns when the found set is not closed under composition inside the
    ball, which signals that the ball is too small to resolve the stabilizer.
    """
    indices = [i for i, g in enumerate(ball.elements) if abs(act(g, z) - z) <= tol]
    elements = [ball.elements[i] for i in indices]
    for i in indices:
        for j in indices:
            k = ball.product_index(i, j)
            if k is None or k not in indices:
                warnings.warn(
                    "stabilizer set is not closed under composition; "
                    "enlarge the ball",
                    stacklevel=2,
                )
                break
        else:
            continue
        break
    return Stabilizer(elements=elements, indices=indices, fixed_point=z, order=len(elements))


def coset_representatives(
    ball: LatticeBall, stab: Stabilizer, tol: float = 1e-8
) -> list:
    """First (shortest-word) representative of each coset gamma Gamma_z.

    Two ball elements lie in the same left coset exactly when they move the
    fixed point to the same orbit point, so representatives are found by
    deduplicating orbit points.
    """
    z = stab.fixed_point
    reps = []
    points: list = []
    for g in ball.elements:
        w = act(g, z)
        if any(abs(w - p) <= tol for p in points):
            continue
        points.append(w)
        reps.append(g)
    return reps


def representative_indices(ball: LatticeBall, stab: Stabilizer, tol: float = 1e-8) -> list:
    reps = coset_representatives(ball, stab, tol)
    return [ball.find_index(g) for g in reps]


def center_elements(ball: LatticeBall, tol: float = 1e-9) -> list:
    """Ball elements commuting with every generator, modulo +/-I."""
    out = []
    for g in ball.elements:
        if all(
            matrix_distance_mod_sign(compose(g, s), compose(s, g)) <= tol
            for s in ball.generators
        ):
            out.append(g)
    return out


def orbifold_area(preset: LatticePreset) -> float:
    """Gauss-Bonnet area of the quotient orbifold, curvature -1."""
    total = -2.0
    for m in preset.cone_orders:
        total += 1.0 - (0.0 if math.isinf(m) else 1.0 / m)
    return 2.0 * math.pi * total


def covolume_times_dpi(preset: LatticePreset, alpha: float) -> float:
    """The normalization-free invariant vol(G/Gamma) * d_pi = (alpha-1) A / (4 pi).

    Uses the Haar convention fixed in `bergman.estimate_formal_dimension`
    (d_pi = alpha - 1, vol = area / (4 pi) with A the curvature -1
    Gauss-Bonnet area of the quotient).
    """
    if alpha <= 1.0:
        raise ValueError("alpha must be > 1")
    return (alpha - 1.0) * orbifold_area(preset) / (4.0 * math.pi)


def covolume(preset: LatticePreset) -> float:
    return orbifold_area(preset) / (4.0 * math.pi)


def dump_ball_csv(ball: LatticeBall, path, z: complex = 0.0j) -> None:
    """Ball dump: word, matrix entries, orbit point of z, displacement."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["word", "re_a", "im_a", "re_b", "im_b", "orbit_re", "orbit_im", "displacement"]
        )
        for g, word in zip(ball.elements, ball.words):
            w = act(g, z)
            writer.writerow(
                [
                    word,
                    repr(g.a.real),
                    repr(g.a.imag),
                    repr(g.b.real),
                    repr(g.b.imag),
                    repr(w.real),
                    repr(w.imag),
                    repr(displacement(g)),
                ]
            )
