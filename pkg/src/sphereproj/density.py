"""Exact joint density of sphere-point projections onto a random direction.

For pairwise distinct points y_1..y_k on S^{d-1} (k <= d-2), the scaled
projections H_s = <y_s, √d·U> onto a uniform random direction U have joint
density

    p(h) = Gamma(d/2) / Gamma((d-k)/2) * (pi*d)^(-k/2)
           * det(M)^(-1/2) * (1 - h^T M^{-1} h / d)_+^((d-k-2)/2),

where M is the Gram matrix M_{ss'} = <y_s, y_{s'}>.  This generalizes
Archimedes' hat-box theorem: at d = 3, k = 1 the density is exactly uniform
on [-√3, √3].  As d -> infinity it tends to the standard Gaussian density
(2*pi)^(-k/2) exp(-|h|^2/2), which is the limiting intensity of the window
statistics studied in :mod:`sphereproj.experiments`.

Everything is evaluated in the log domain: the Gamma ratio as a difference
of log-gammas (a ratio overflows once d reaches a few hundred), det and the
quadratic form h^T M^{-1} h through a Cholesky factorization, and the
support factor as exp(exponent * log1p(-q/d)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, SingularGramError
from .point_configs import PointConfig, inner_product

#: A Cholesky leading-minor pivot below this flags the Gram matrix singular.
PIVOT_TOL = 1e-12

_SYMMETRY_TOL = 1e-12


def _cholesky_lower(a: np.ndarray) -> np.ndarray | None:
    """Lower Cholesky factor of a small SPD matrix, or None if a pivot < PIVOT_TOL."""
    k = a.shape[0]
    L = np.zeros((k, k))
    for j in range(k):
        pivot = a[j, j] - float(L[j, :j] @ L[j, :j])
        if pivot < PIVOT_TOL:
            return None
        L[j, j] = math.sqrt(pivot)
        for i in range(j + 1, k):
            L[i, j] = (a[i, j] - float(L[i, :j] @ L[j, :j])) / L[j, j]
    return L


@dataclass(frozen=True)
class GramMatrix:
    """k x k matrix of pairwise inner products, with its Cholesky factor.

    ``singular`` is set when a leading-minor pivot falls below PIVOT_TOL
    (coincident points, or correlations within roundoff of ±1).
    """

    entries: np.ndarray = field(repr=False)
    k: int = 0
    singular: bool = False
    _chol: np.ndarray | None = field(default=None, repr=False)

    @staticmethod
    def from_entries(entries) -> "GramMatrix":
        m = np.ascontiguousarray(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidInputError(f"Gram matrix must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.T), initial=0.0) > _SYMMETRY_TOL:
            raise InvalidInputError("Gram matrix is not symmetric within 1e-12")
        m.flags.writeable = False
        L = _cholesky_lower(m)
        return GramMatrix(entries=m, k=m.shape[0], singular=L is None, _chol=L)

    def cholesky(self) -> np.ndarray:
        if self._chol is None:
            raise SingularGramError(
                "Gram matrix is singular or indefinite (pivot below 1e-12)")
        return self._chol


def pair_correlation(rho: float) -> GramMatrix:
    """The 2 x 2 Gram matrix [[1, rho], [rho, 1]]."""
    return GramMatrix.from_entries([[1.0, rho], [rho, 1.0]])


def gram_matrix(cfg: PointConfig, indices) -> GramMatrix:
    """Gram matrix of the points at the given k distinct index positions.

    Requires k <= d - 2 (the density below only exists in that range).
    The points themselves may coincide; the result is then flagged singular.
    """
    idx = [int(i) for i in indices]
    if len(set(idx)) != len(idx):
        raise InvalidInputError(f"index positions must be pairwise distinct, got {idx}")
    k = len(idx)
    if not 1 <= k <= cfg.d - 2:
        raise InvalidInputError(f"need 1 <= k <= d-2 = {cfg.d - 2}, got k={k}")
    m = np.empty((k, k))
    for s in range(k):
        m[s, s] = inner_product(cfg, idx[s], idx[s])
        for t in range(s + 1, k):
            m[s, t] = m[t, s] = inner_product(cfg, idx[s], idx[t])
    return GramMatrix.from_entries(m)


@dataclass(frozen=True)
class DensityValue:
    """Density value together with its log (log_value = -inf outside support)."""

    log_value: float
    value: float

    @staticmethod
    def zero() -> "DensityValue":
        return DensityValue(log_value=-math.inf, value=0.0)


def _log_norm_const(k: int, d: int, log_det: float) -> float:
    return (math.lgamma(d / 2.0) - math.lgamma((d - k) / 2.0)
            - 0.5 * k * math.log(math.pi * d) - 0.5 * log_det)


def joint_density(M: GramMatrix, h, d: int) -> DensityValue:
    """Joint density of the k scaled projections at the point h.

    Zero (log = -inf) whenever the quadratic form h^T M^{-1} h reaches d;
    raises SingularGramError when the density does not exist.
    """
    k = M.k
    if k > d - 2:
        raise InvalidInputError(f"need k <= d-2, got k={k}, d={d}")
    L = M.cholesky()
    hv = np.atleast_1d(np.asarray(h, dtype=float))
    if hv.shape != (k,):
        raise InvalidInputError(f"h must have length k={k}, got shape {hv.shape}")
    # q = |M^{-1/2} h|^2 = |z|^2 with L z = h.
    z = np.linalg.solve(L, hv) if k > 1 else hv / L[0, 0]
    q = float(z @ z)
    if q >= d:
        return DensityValue.zero()
    log_det = 2.0 * float(np.sum(np.log(np.diag(L))))
    exponent = 0.5 * (d - k - 2)
    logp = _log_norm_const(k, d, log_det) + exponent * math.log1p(-q / d)
    return DensityValue(log_value=logp, value=math.exp(logp))


def joint_density_batch(M: GramMatrix, H, d: int) -> np.ndarray:
    """Vectorized :func:`joint_density` values for rows of the (N, k) array H."""
    k = M.k
    if k > d - 2:
        raise InvalidInputError(f"need k <= d-2, got k={k}, d={d}")
    L = M.cholesky()
    Hm = np.atleast_2d(np.asarray(H, dtype=float))
    if Hm.shape[1] != k:
        raise InvalidInputError(f"H must have k={k} columns, got {Hm.shape[1]}")
    z = np.linalg.solve(L, Hm.T)            # forward substitution, batched
    q = np.sum(z * z, axis=0)
    log_det = 2.0 * float(np.sum(np.log(np.diag(L))))
    c = _log_norm_const(k, d, log_det)
    exponent = 0.5 * (d - k - 2)
    out = np.zeros(Hm.shape[0])
    inside = q < d
    out[inside] = np.exp(c + exponent * np.log1p(-q[inside] / d))
    return out


def gaussian_intensity(a: float) -> float:
    """Standard Gaussian density (2*pi)^(-1/2) exp(-a^2/2): the d->inf intensity."""
    return math.exp(-0.5 * a * a) / math.sqrt(2.0 * math.pi)


_UNIT_GRAM = GramMatrix.from_entries([[1.0]])


def finite_d_intensity(a: float, d: int) -> float:
    """Exact one-point projection density at level a in dimension d (d >= 3).

    Converges to gaussian_intensity(a) as d -> infinity with an O(1/d) gap,
    which is why finite-d experiments are compared against this value rather
    than the limit.
    """
    if d < 3:
        raise InvalidInputError(f"need d >= 3, got {d}")
    return joint_density(_UNIT_GRAM, [float(a)], int(d)).value


def pair_window_bound(inner: float, n: int, c_window: float) -> float:
    """Upper bound c * min(n^-2 (1-|inner|)^(-1/2), n^-1) for the probability
    that two points with the given inner product both land in one O(1/n) window.

    The constant is caller-supplied; only the functional form is fixed.  At
    |inner| = 1 the first branch is +inf and the n^-1 cap wins.
    """
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    if c_window <= 0:
        raise InvalidInputError(f"c_window must be > 0, got {c_window}")
    gap = 1.0 - min(1.0, abs(inner))
    first = math.inf if gap == 0.0 else 1.0 / (n * n * math.sqrt(gap))
    return c_window * min(first, 1.0 / n)
