"""Dense symmetric eigensolver and the spectral quantities the rates consume.

The solver is a cyclic-by-row Jacobi rotation sweep; no external
eigenroutine is used.  Adequate and deterministic at desk scale
(hundreds of vertices).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllEigenvaluesMinusD, NoConvergence, NotSymmetric
from .graph_core import CliqueRegularGraph

SYMMETRY_TOL = 1e-12
CONVERGENCE_FACTOR = 1e-12   # off-diagonal Frobenius target, relative to ||A||_F
MAX_SWEEPS = 50
EIG_EQ_TOL = 1e-6            # membership tolerance for "eigenvalue equals -d"
CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues, sorted descending."""

    eigenvalues: tuple[float, ...]
    n: int
    tolerance: float

    @property
    def lambda1(self) -> float:
        return self.eigenvalues[0]

    @property
    def lambda2(self) -> float:
        return self.eigenvalues[1]

    @property
    def lambda_n(self) -> float:
        return self.eigenvalues[-1]


def eigenvalues_symmetric(matrix, max_sweeps: int = MAX_SWEEPS) -> Spectrum:
    """Full spectrum of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps row by row, annihilating each off-diagonal pivot with a Givens
    rotation, until the off-diagonal Frobenius norm drops below
    1e-12 * ||A||_F.  Raises NotSymmetric for asymmetric input and
    NoConvergence if the target is not met within `max_sweeps` sweeps.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        raise NotSymmetric("empty matrix")
    asym = float(np.max(np.abs(a - a.T))) if n > 1 else 0.0
    if asym > SYMMETRY_TOL:
        raise NotSymmetric(f"max |A - A^T| = {asym:.3e} exceeds {SYMMETRY_TOL}")

    fro = float(np.linalg.norm(a))
    target = CONVERGENCE_FACTOR * fro
    if n == 1 or fro == 0.0:
        vals = np.sort(np.diag(a))[::-1]
        return Spectrum(tuple(float(x) for x in vals), n, target)

    skip = target / n  # pivots below this cannot push off(A) above target
    converged = False
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, float(np.sum(a * a) - np.sum(np.diag(a) ** 2))))
        if off <= target:
            converged = True
            break
        rotated = False
        for p in range(n - 1):
            row_p = a[p]
            for q in range(p + 1, n):
                apq = row_p[q]
                if abs(apq) <= skip:
                    continue
                rotated = True
                app = row_p[p]
                aqq = a[q, q]
                theta = 0.5 * (aqq - app) / apq
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # rotate the row pair, mirror into the columns, then patch
                # the 2x2 block analytically (keeps everything symmetric)
                rq = a[q].copy()
                rp = row_p.copy()
                np.multiply(row_p, c, out=row_p)
                row_p -= s * rq
                np.multiply(rq, c, out=rq)
                rq += s * rp
                a[q] = rq
                a[:, p] = row_p
                a[:, q] = rq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
        if not rotated:
            converged = True
            break
    if not converged:
        off = math.sqrt(max(0.0, float(np.sum(a * a) - np.sum(np.diag(a) ** 2))))
        if off > target:
            raise NoConvergence(
                f"Jacobi sweep limit {max_sweeps} reached with off-norm {off:.3e}"
            )

    vals = np.sort(np.diag(a))[::-1]
    return Spectrum(tuple(float(x) for x in vals), n, target)


def spectrum_of(crg: CliqueRegularGraph) -> Spectrum:
    return eigenvalues_symmetric(crg.graph.adjacency_matrix(dtype=float))


def multiplicity_clusters(spec: Spectrum, tol: float = CLUSTER_TOL) -> list[tuple[float, int]]:
    """(mean value, count) per cluster of eigenvalues closer than tol."""
    clusters: list[tuple[float, int]] = []
    run: list[float] = []
    for x in spec.eigenvalues:
        if run and abs(run[-1] - x) > tol:
            clusters.append((sum(run) / len(run), len(run)))
            run = []
        run.append(x)
    clusters.append((sum(run) / len(run), len(run)))
    return clusters


@dataclass(frozen=True)
class SpectralSummary:
    """Derived spectral quantities at a given backtracking weight delta.

    lambda_of_delta is the largest |lambda_i - (l-2)(1-delta)| over the
    extreme nontrivial eigenvalues; lambda_hat_of_delta is the same with
    eigenvalues equal to -d excluded.
    """

    lambda2: float
    lambda_n: float
    lambda_prime: float
    lambda_of_delta: float
    lambda_hat_of_delta: float
    has_minus_d: bool
    delta: float
    d: int
    l: int


def spectral_summary(spec: Spectrum, d: int, l: int, delta: float) -> SpectralSummary:
    if spec.n < 2:
        raise AllEigenvaluesMinusD("need at least two eigenvalues")
    lam = spec.eigenvalues
    shift = (l - 2) * (1.0 - delta)
    lambda2 = lam[1]
    lambda_n = lam[-1]
    lam_delta = max(abs(lambda2 - shift), abs(lambda_n - shift))

    rest = [x for x in lam[1:] if abs(x + d) > EIG_EQ_TOL]
    has_minus_d = len(rest) < spec.n - 1
    if not rest:
        raise AllEigenvaluesMinusD("every nontrivial eigenvalue equals -d")
    lam_hat = max(abs(max(rest) - shift), abs(min(rest) - shift))

    return SpectralSummary(
        lambda2=float(lambda2),
        lambda_n=float(lambda_n),
        lambda_prime=float(max(abs(lambda2), abs(lambda_n))),
        lambda_of_delta=float(lam_delta),
        lambda_hat_of_delta=float(lam_hat),
        has_minus_d=has_minus_d,
        delta=float(delta),
        d=d,
        l=l,
    )


def summary_from_values(eigenvalues, d: int, l: int, delta: float) -> SpectralSummary:
    """Summary from a plain list of eigenvalues (closed-form spectra)."""
    vals = tuple(sorted((float(x) for x in eigenvalues), reverse=True))
    spec = Spectrum(vals, len(vals), 0.0)
    return spectral_summary(spec, d, l, delta)
