"""Coherent systems over a lattice ball: Gram matrices, finite-section Riesz
bounds, truncated frame operators, stabilizer phases and the stabilizer
averaging projection.

The generating vector is the (by default unit-normalized) kernel at z; every
system vector is a unimodular multiple of the normalized kernel at an orbit
point, so all spectra here depend only on the orbit geometry and are
invariant under branch or phase conventions.  Bound semantics of the finite
sections: the smallest eigenvalue of a section only ever over-estimates the
lower bound of a larger system, the largest only under-estimates the upper
one (Cauchy interlacing).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .bergman import (
    basis_matrix,
    kernel_norm_sq,
    pi_matrix,
    require_weight,
    transform_kernel,
)
from .lattice import LatticeBall, Stabilizer, coset_representatives, stabilizer_of
from .moebius import GroupElement, act, check_in_disk

PhaseTwist = Callable[[int], complex]


class EigensolverError(RuntimeError):
    """Hermitian eigensolver failed or produced non-finite values."""


class ProjectionError(ArithmeticError):
    """Averaging projection failed its idempotency/self-adjointness check."""


def _eigvalsh(matrix: np.ndarray) -> np.ndarray:
    try:
        ev = np.linalg.eigvalsh(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise EigensolverError("eigensolver returned non-finite eigenvalues")
    return ev


@dataclass
class CoherentSystem:
    """Kernel orbit data for (alpha, z) over a fixed ball."""

    alpha: float
    z: complex
    ball: LatticeBall
    stabilizer: Stabilizer
    representatives: list
    normalized: bool = True

    @property
    def stabilizer_order(self) -> int:
        return self.stabilizer.order


def build_coherent_system(
    alpha: float,
    z: complex,
    ball: LatticeBall,
    normalized: bool = True,
    tol: float = 1e-8,
) -> CoherentSystem:
    require_weight(alpha)
    check_in_disk(z)
    stab = stabilizer_of(ball, z, tol)
    reps = coset_representatives(ball, stab, tol)
    return CoherentSystem(alpha, z, ball, stab, reps, normalized)


def stabilizer_phases(
    alpha: float, stab: Stabilizer, z: complex, tol: float = 1e-8
) -> list:
    """Unimodular u(gamma) with pi(gamma) k_z = u(gamma) k_z for gamma in Gamma_z.

    u is a projective character: u(g) u(h) = sigma(g, h) u(gh) with respect
    to the same branch convention as `moebius.cocycle`.
    """
    phases = []
    for g in stab.elements:
        point, c = transform_kernel(alpha, g, z)
        if abs(point - z) > tol:
            raise ValueError(f"stabilizer element moves z by {abs(point - z):.2e}")
        phases.append(c)
    return phases


@dataclass
class GramMatrix:
    """Hermitian Gram matrix of a coherent system on an index set."""

    entries: np.ndarray
    alpha: float
    z: complex
    index_set: str
    normalized: bool

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def gram_matrix(
    system: CoherentSystem,
    use_representatives: bool = True,
    phase_twist: Optional[PhaseTwist] = None,
) -> GramMatrix:
    """Gram matrix G[i, j] = <v_j, v_i> of the system vectors pi(gamma_i) k_z.

    Entries are closed-form: with c_i the transform_kernel scalar and
    w_i = gamma_i . z,

        G[i, j] = conj(c_i) c_j (1 - w_i conj(w_j))^(-alpha) / ||k_z||^2,

    the normalization making the diagonal exactly one.  phase_twist
    multiplies each c_i by a unimodular factor (a coboundary / branch
    change); it conjugates G by a diagonal unitary and must not move the
    spectrum.
    """
    gammas = system.representatives if use_representatives else system.ball.elements
    points = np.empty(len(gammas), dtype=complex)
    scalars = np.empty(len(gammas), dtype=complex)
    for i, g in enumerate(gammas):
        points[i], scalars[i] = transform_kernel(system.alpha, g, system.z)
    if phase_twist is not None:
        scalars = scalars * np.array([phase_twist(i) for i in range(len(gammas))])
    K = (1.0 - points[:, None] * points.conjugate()[None, :]) ** (-system.alpha)
    G = scalars.conjugate()[:, None] * scalars[None, :] * K
    if system.normalized:
        G = G / kernel_norm_sq(system.alpha, system.z)
    return GramMatrix(
        entries=G,
        alpha=system.alpha,
        z=system.z,
        index_set="reduced" if use_representatives else "full",
        normalized=system.normalized,
    )


def riesz_bounds_finite_section(gram: GramMatrix) -> Tuple[float, float]:
    """Extreme eigenvalues of the finite Gram section.

    The returned lambda_min upper-bounds the true lower Riesz bound of any
    superset system; lambda_max lower-bounds the upper one.
    """
    ev = _eigvalsh(gram.entries)
    return float(ev[0]), float(ev[-1])


def _orbit_with_multiplicity(
    system: CoherentSystem, index_set: str, tol: float = 1e-8
) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct orbit points and how many system vectors sit on each."""
    pts: list = []
    counts: list = []
    for w in (act(g, system.z) for g in system.ball.elements):
        for k, p in enumerate(pts):
            if abs(w - p) <= tol:
                counts[k] += 1
                break
        else:
            pts.append(w)
            counts.append(1)
    points = np.array(pts, dtype=complex)
    if index_set == "reduced":
        return points, np.ones(len(points))
    return points, np.array(counts, dtype=float)


def frame_operator_truncated(
    system: CoherentSystem,
    n_max: int,
    index_set: str = "full",
    phase_twist: Optional[PhaseTwist] = None,
) -> np.ndarray:
    """Matrix of P_N S P_N, S the frame operator of normalized kernel states.

    S = sum |kappa_w><kappa_w| over orbit points w (with ball multiplicity
    for index_set="full", once per coset for "reduced").  The coordinates of
    kappa_w are conj(e_m(w)) (1-|w|^2)^(alpha/2); rank-one terms make every
    phase convention drop out.
    """
    points, counts = _orbit_with_multiplicity(system, index_set)
    coords = basis_matrix(system.alpha, n_max, points).conjugate()
    coords *= ((1.0 - np.abs(points) ** 2) ** (system.alpha / 2.0))[None, :]
    if phase_twist is not None:
        coords = coords * np.array([phase_twist(i) for i in range(len(points))])[None, :]
    return (coords * counts[None, :]) @ coords.conjugate().T


def frame_bounds_truncated(
    system: CoherentSystem,
    n_max: int,
    index_set: str = "full",
    phase_twist: Optional[PhaseTwist] = None,
) -> Tuple[float, float]:
    """Extreme eigenvalues (A_N, B_N) of the truncated frame operator."""
    ev = _eigvalsh(frame_operator_truncated(system, n_max, index_set, phase_twist))
    return float(ev[0]), float(ev[-1])


def projection_pz_matrix(
    alpha: float,
    stab: Stabilizer,
    z: complex,
    n_max: int,
    quad=None,
    residual_bound: float = 1e-6,
) -> np.ndarray:
    """Matrix of p_z = |Gamma_z|^{-1} sum conj(u(gamma)) pi(gamma) on degrees < N.

    Checked to be idempotent and self-adjoint; a residual above
    residual_bound signals wrong phases (or truncation leak for stabilizers
    not centered at the origin) and raises ProjectionError.
    """
    phases = stabilizer_phases(alpha, stab, z)
    out = np.zeros((n_max, n_max), dtype=complex)
    for g, u in zip(stab.elements, phases):
        out += u.conjugate() * pi_matrix(alpha, g, n_max, quad)
    out /= stab.order
    idem = np.linalg.norm(out @ out - out, 2)
    herm = np.linalg.norm(out - out.conjugate().T, 2)
    if max(idem, herm) > residual_bound:
        raise ProjectionError(
            f"projection residuals idempotency={idem:.2e} hermiticity={herm:.2e}"
        )
    return out


def spectrum_rows(
    system: CoherentSystem,
    n_max: int,
    index_set: str = "full",
) -> dict:
    """One spectrum-dump record (see the CSV schema in the cli module)."""
    if index_set == "reduced":
        lo, hi = riesz_bounds_finite_section(gram_matrix(system, use_representatives=True))
    else:
        lo, hi = frame_bounds_truncated(system, n_max, index_set="full")
    return {
        "alpha": system.alpha,
        "N": n_max,
        "ball_size": len(system.ball),
        "radius": system.ball.radius,
        "lambda_min": lo,
        "lambda_max": hi,
        "index_set": index_set,
    }


def dump_gram_csv(gram: GramMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "re", "im"])
        n = gram.size
        for i in range(n):
            for j in range(n):
                e = gram.entries[i, j]
                writer.writerow([i, j, repr(e.real), repr(e.imag)])
