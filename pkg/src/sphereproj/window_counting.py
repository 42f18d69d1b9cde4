"""Counting projections inside an O(1/n)-wide window.

A window is a level plus a bounded half-open interval [lo, hi); the count is

    N = #{ j : <x_j, w> in [level + lo/n, level + hi/n) }.

Membership is always tested on the raw projection (never on the rescaled
value n*(proj - level), which would amplify cancellation for huge n);
rescaled positions are computed only for reported hits.  Half-open windows
make abutting windows partition exactly; ties sit on a measure-zero set but
are resolved deterministically.

Explicit and small implicit configurations are scanned directly.  For the
sign cube (n = 2^d) the count is obtained exactly in O(2^{d/2} d) by meet
in the middle: split the coordinates into two halves, enumerate each half's
partial signed sums, sort one table, and binary-search the complementary
range for every entry of the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .directions import Direction, cube_partial_sums, project_all
from .errors import EnumerationGuardError, InvalidInputError
from .point_configs import ENUMERATION_GUARD, PointConfig


@dataclass(frozen=True)
class WindowSpec:
    """Window at ``level`` with rescaled half-open interval [lo, hi)."""

    level: float
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.level) and math.isfinite(self.lo)
                and math.isfinite(self.hi)):
            raise InvalidInputError("window level and endpoints must be finite")
        if not self.lo < self.hi:
            raise InvalidInputError(f"need lo < hi, got [{self.lo}, {self.hi})")

    @property
    def mes(self) -> float:
        return self.hi - self.lo

    def bounds(self, n: int) -> tuple[float, float]:
        """Projection-space bounds [level + lo/n, level + hi/n)."""
        n = float(n)
        return self.level + self.lo / n, self.level + self.hi / n


@dataclass(frozen=True)
class HitList:
    """Count plus the ascending rescaled positions n*(proj - level) of the hits."""

    count: int
    positions: np.ndarray = field(repr=False)


def _make_hitlist(proj_hits: np.ndarray, win: WindowSpec, n: int) -> HitList:
    pos = float(n) * (proj_hits - win.level)
    # Rescaling can round a boundary hit onto hi; keep positions inside [lo, hi).
    np.clip(pos, win.lo, math.nextafter(win.hi, -math.inf), out=pos)
    pos.sort()
    return HitList(count=pos.size, positions=pos)


def count_direct(cfg: PointConfig, direction: Direction, win: WindowSpec) -> HitList:
    """Scan every point of the configuration (guard: n <= 2^24)."""
    if cfg.n > ENUMERATION_GUARD:
        raise EnumerationGuardError(
            f"n = {cfg.n} exceeds the 2^24 enumeration guard; "
            "use count_cube_mitm for cube configurations")
    a_lo, a_hi = win.bounds(cfg.n)
    proj = project_all(cfg, direction)
    hits = proj[(proj >= a_lo) & (proj < a_hi)]
    return _make_hitlist(hits, win, cfg.n)


def count_cube_mitm(d: int, direction: Direction, win: WindowSpec) -> HitList:
    """Exact window count over all 2^d cube vertices by meet in the middle.

    Splits coordinates into halves of sizes ceil(d/2) and floor(d/2); the
    second half's 2^{floor(d/2)} partial sums are sorted once per direction
    and binary-searched against every first-half sum.  Position retrieval
    enumerates matching pairs, so its cost is proportional to the output.
    """
    d = int(d)
    if not 4 <= d <= 62:
        raise InvalidInputError(f"meet-in-the-middle needs 4 <= d <= 62, got {d}")
    if direction.d != d:
        raise InvalidInputError(f"direction has length {direction.d}, expected {d}")
    n = 1 << d
    a_lo, a_hi = win.bounds(n)
    half = (d + 1) // 2
    s_low = cube_partial_sums(direction.w, range(0, half), d)
    s_sorted = np.sort(cube_partial_sums(direction.w, range(half, d), d))
    left = np.searchsorted(s_sorted, a_lo - s_low, side="left")
    right = np.searchsorted(s_sorted, a_hi - s_low, side="left")
    count = int(np.sum(right - left))
    if count == 0:
        return HitList(count=0, positions=np.empty(0))
    pieces = [s_low[i] + s_sorted[left[i]:right[i]]
              for i in np.nonzero(right > left)[0]]
    return _make_hitlist(np.concatenate(pieces), win, n)


def count_window(cfg: PointConfig, direction: Direction, win: WindowSpec) -> HitList:
    """Count with the appropriate strategy: MITM for cubes, direct scan otherwise."""
    if cfg.kind == "cube" and cfg.d >= 4:
        return count_cube_mitm(cfg.d, direction, win)
    return count_direct(cfg, direction, win)


def _count_only(cfg: PointConfig, direction: Direction, win: WindowSpec) -> int:
    """Window count without materializing hit positions (hot path for experiments)."""
    if cfg.kind == "cube" and cfg.d >= 4:
        d = cfg.d
        a_lo, a_hi = win.bounds(cfg.n)
        half = (d + 1) // 2
        s_low = cube_partial_sums(direction.w, range(0, half), d)
        s_sorted = np.sort(cube_partial_sums(direction.w, range(half, d), d))
        left = np.searchsorted(s_sorted, a_lo - s_low, side="left")
        right = np.searchsorted(s_sorted, a_hi - s_low, side="left")
        return int(np.sum(right - left))
    a_lo, a_hi = win.bounds(cfg.n)
    proj = project_all(cfg, direction)
    return int(np.count_nonzero((proj >= a_lo) & (proj < a_hi)))
