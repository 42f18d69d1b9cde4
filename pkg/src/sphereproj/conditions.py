"""Pair-separation condition sums and the Diaconis-Freedman counts.

The Poisson behaviour of window counts hinges on how many point pairs are
strongly correlated.  The quantity evaluated here is the thresholded sum

    S(eps) = sum over pairs i < j with |<x_i, x_j>| >= eps of
             min( (1 - |<x_i, x_j>|)^(-1/2), n ),

whose ratio S/n^2 must vanish as n grows for the Poisson limit to hold.
Pairs with |<x_i, x_j>| = 1 (duplicates or antipodes) make the first branch
infinite, so they contribute the cap n each; their share is reported
separately as ``antipodal_part`` so both the literal sum and the
antipodes-excluded reading are available.

The Diaconis-Freedman counts are the weaker companions: the number of
points with |x_j|^2 far from 1 and the number of ordered pairs with
|<x_j, x_k>| > eps.  They control the *global* Gaussian limit of the
empirical projection distribution but not the local Poisson one; the
duplicated-basis family separates the two regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._seeding import derive_rng
from .errors import EnumerationGuardError, InvalidInputError
from .point_configs import PointConfig

#: All-pairs enumeration is refused beyond this many points.
PAIR_GUARD = 10_000

#: 1 - |inner| below this counts as |inner| = 1 (the capped branch).
ANTIPODAL_TOL = 1e-12

_ROW_CHUNK = 1024


@dataclass(frozen=True)
class ConditionReport:
    """Value of the thresholded pair sum and derived diagnostics."""

    n: int
    epsilon: float
    total: float
    antipodal_part: float
    ratio: float            # total / n^2
    exact: bool
    standard_error: float | None = None


def _abs_inner_rows(cfg: PointConfig, i0: int, i1: int, j0: int) -> np.ndarray:
    """|<x_i, x_j>| for i in [i0, i1) and j in [j0, n), clamped to [0, 1]."""
    if cfg.is_dense:
        block = cfg.matrix[i0:i1] @ cfg.matrix[j0:].T
        return np.clip(np.abs(block), 0.0, 1.0)
    if cfg.kind == "cube":
        ii = np.arange(i0, i1, dtype=np.uint64)[:, None]
        jj = np.arange(j0, cfg.n, dtype=np.uint64)[None, :]
        ham = np.bitwise_count(ii ^ jj).astype(float)
        return np.abs(1.0 - 2.0 * ham / cfg.d)
    # dup_basis: inner products are exactly 1 (same basis coordinate) or 0.
    idx = np.arange(cfg.n, dtype=np.int64)
    coords = np.where(idx < cfg.d, idx, idx - cfg.d)
    return (coords[i0:i1, None] == coords[None, j0:]).astype(float)


def _terms(abs_inner: np.ndarray, epsilon: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair summands and an is-capped mask, zero where |inner| < eps."""
    qualifies = abs_inner >= epsilon
    gap = 1.0 - abs_inner
    capped = qualifies & (gap < ANTIPODAL_TOL)
    with np.errstate(divide="ignore"):
        vals = 1.0 / np.sqrt(np.maximum(gap, 0.0))
    vals = np.minimum(vals, float(n))
    vals[~qualifies] = 0.0
    return vals, capped


def condition_sum_exact(cfg: PointConfig, epsilon: float) -> ConditionReport:
    """Enumerate every unordered pair (guard: n <= 10^4)."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if cfg.n > PAIR_GUARD:
        raise EnumerationGuardError(
            f"n = {cfg.n} exceeds the all-pairs guard {PAIR_GUARD}; "
            "use condition_sum_sampled (or condition_sum_cube for cubes)")
    n = cfg.n
    total = 0.0
    antipodal = 0.0
    for i0 in range(0, n - 1, _ROW_CHUNK):
        i1 = min(i0 + _ROW_CHUNK, n - 1)
        abs_inner = _abs_inner_rows(cfg, i0, i1, i0 + 1)
        # keep strictly upper-triangular part: j > i
        cols = np.arange(i0 + 1, n)
        mask = cols[None, :] > np.arange(i0, i1)[:, None]
        vals, capped = _terms(abs_inner, epsilon, n)
        vals[~mask] = 0.0
        total += float(vals.sum())
        antipodal += float(vals[capped & mask].sum())
    return ConditionReport(n=n, epsilon=epsilon, total=total,
                           antipodal_part=antipodal, ratio=total / n**2, exact=True)


def condition_sum_cube(d: int, epsilon: float,
                       exclude_antipodal: bool = False) -> ConditionReport:
    """Closed form of the pair sum for the sign cube, via Hamming classes.

    The 2^{d-1} * C(d, k) unordered pairs at Hamming distance k share the
    inner product 1 - 2k/d, so the sum collapses to d classes.  Pair counts
    are exact big integers, converted to float only when multiplied in.
    The k = d class (antipodal pairs, capped at n each) is dropped when
    ``exclude_antipodal`` is set.
    """
    d = int(d)
    if not 2 <= d <= 62:
        raise InvalidInputError(f"need 2 <= d <= 62, got {d}")
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    n = 1 << d
    total = 0.0
    antipodal = 0.0
    for k in range(1, d + 1):
        abs_inner = abs(1.0 - 2.0 * k / d)
        if abs_inner < epsilon:
            continue
        gap = 2.0 * k / d if 2 * k <= d else 2.0 * (d - k) / d
        if k == d:
            if exclude_antipodal:
                continue
            term = float(n)                     # min(+inf, n)
        else:
            term = min(1.0 / math.sqrt(gap), float(n))
        pairs = (1 << (d - 1)) * math.comb(d, k)
        contribution = float(pairs) * term
        total += contribution
        if gap < ANTIPODAL_TOL:
            antipodal += contribution
    return ConditionReport(n=n, epsilon=epsilon, total=total,
                           antipodal_part=antipodal, ratio=total / float(n)**2,
                           exact=True)


_SAMPLE_CHUNK = 1 << 16


def condition_sum_sampled(cfg: PointConfig, epsilon: float, pair_samples: int,
                          master_seed: int) -> ConditionReport:
    """Unbiased estimate of the pair sum from uniformly sampled pairs.

    Pairs are drawn with replacement, uniformly over unordered pairs (i = j
    rejected); the estimator is C(n,2)/S * sum of sampled terms, with its
    standard error from the sample variance.  Draws are chunked with keyed
    per-chunk streams, so the estimate is reproducible and scheduling-free.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if pair_samples < 1:
        raise InvalidInputError(f"pair_samples must be >= 1, got {pair_samples}")
    n = cfg.n
    if n < 2:
        raise InvalidInputError("need at least two points to sample pairs")
    npairs = n * (n - 1) // 2
    s1 = 0.0    # sum of terms
    s2 = 0.0    # sum of squared terms
    cap = 0.0   # sum of capped (|inner| = 1) terms
    drawn = 0
    chunk_index = 0
    while drawn < pair_samples:
        want = min(_SAMPLE_CHUNK, pair_samples - drawn)
        rng = derive_rng(master_seed, chunk_index)
        chunk_index += 1
        ii = np.empty(0, dtype=np.int64)
        jj = np.empty(0, dtype=np.int64)
        while ii.size < want:
            a = rng.integers(0, n, size=2 * (want - ii.size), dtype=np.int64)
            b = rng.integers(0, n, size=a.size, dtype=np.int64)
            keep = a != b
            ii = np.concatenate([ii, a[keep]])
            jj = np.concatenate([jj, b[keep]])
        ii, jj = ii[:want], jj[:want]
        abs_inner = _pair_abs_inner(cfg, ii, jj)
        vals, capped = _terms(abs_inner, epsilon, n)
        s1 += float(vals.sum())
        s2 += float((vals * vals).sum())
        cap += float(vals[capped].sum())
        drawn += want
    scale = npairs / pair_samples
    total = scale * s1
    mean = s1 / pair_samples
    var = max(s2 / pair_samples - mean * mean, 0.0)
    if pair_samples > 1:
        var *= pair_samples / (pair_samples - 1)
    se = npairs * math.sqrt(var / pair_samples)
    return ConditionReport(n=n, epsilon=epsilon, total=total,
                           antipodal_part=scale * cap, ratio=total / n**2,
                           exact=False, standard_error=se)


def _pair_abs_inner(cfg: PointConfig, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
    if cfg.is_dense:
        vals = np.einsum("ij,ij->i", cfg.matrix[ii], cfg.matrix[jj])
        return np.clip(np.abs(vals), 0.0, 1.0)
    if cfg.kind == "cube":
        ham = np.bitwise_count(ii.astype(np.uint64) ^ jj.astype(np.uint64)).astype(float)
        return np.abs(1.0 - 2.0 * ham / cfg.d)
    ci = np.where(ii < cfg.d, ii, ii - cfg.d)
    cj = np.where(jj < cfg.d, jj, jj - cfg.d)
    return (ci == cj).astype(float)


def df_conditions(cfg: PointConfig, epsilon: float) -> tuple[int, int]:
    """Counts behind the empirical-CDF Gaussian limit: points with
    ||x_j|^2 - 1| > eps, and ordered pairs j != k with |<x_j, x_k>| > eps."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if cfg.n > PAIR_GUARD:
        raise EnumerationGuardError(
            f"n = {cfg.n} exceeds the all-pairs guard {PAIR_GUARD}")
    if cfg.is_dense:
        sq = np.einsum("ij,ij->i", cfg.matrix, cfg.matrix)
        norm_violations = int(np.count_nonzero(np.abs(sq - 1.0) > epsilon))
    else:
        norm_violations = 0     # implicit kinds have exactly unit norms
    pair_violations = 0
    for i0 in range(0, cfg.n - 1, _ROW_CHUNK):
        i1 = min(i0 + _ROW_CHUNK, cfg.n - 1)
        abs_inner = _abs_inner_rows(cfg, i0, i1, i0 + 1)
        cols = np.arange(i0 + 1, cfg.n)
        mask = cols[None, :] > np.arange(i0, i1)[:, None]
        pair_violations += int(np.count_nonzero((abs_inner > epsilon) & mask))
    return norm_violations, 2 * pair_violations
