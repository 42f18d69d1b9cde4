"""Random projection directions and scaled projections <x_j, w>.

Three direction models:

* ``uniform``   -- w = √d · g/|g| with g standard Gaussian (so |w|^2 = d),
* ``bernoulli`` -- w has iid ±1 coordinates,
* ``perturbed`` -- coordinate i is ±(1 + eps_i) for a perturbation vector
                   eps that is generated once and frozen for an experiment.

A direction sample is fully determined by (master_seed, sample_index):
distinct indices give independent streams that can be drawn in any order,
on any number of workers, with bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._seeding import derive_rng
from .errors import InvalidInputError
from .point_configs import PointConfig, _check_index, sign_rows

#: Scalar projections switch to compensated summation above this dimension.
_FSUM_DIM = 10_000


@dataclass(frozen=True)
class DirectionModel:
    kind: str                                  # "uniform" | "bernoulli" | "perturbed"
    eps: np.ndarray | None = field(default=None, repr=False)


def uniform_sphere() -> DirectionModel:
    return DirectionModel(kind="uniform")


def bernoulli() -> DirectionModel:
    return DirectionModel(kind="bernoulli")


def perturbed_bernoulli(eps) -> DirectionModel:
    """Perturbed-sign model with a fixed (quenched) perturbation vector."""
    e = np.ascontiguousarray(eps, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise InvalidInputError("eps must be a vector of length d >= 2")
    if np.any(e < 0):
        raise InvalidInputError("eps coordinates must be nonnegative")
    e.flags.writeable = False
    return DirectionModel(kind="perturbed", eps=e)


def random_perturbation(d: int, eps_max: float, seed: int) -> np.ndarray:
    """Helper for a 'generic' perturbation: eps_i iid uniform on [0, eps_max]."""
    if eps_max < 0:
        raise InvalidInputError(f"eps_max must be >= 0, got {eps_max}")
    return derive_rng(seed, 0).uniform(0.0, eps_max, size=int(d))


@dataclass(frozen=True)
class Direction:
    """A scaled direction vector: √d·U, B, or B_eps depending on the model."""

    w: np.ndarray = field(repr=False)
    model_kind: str = "uniform"

    @property
    def d(self) -> int:
        return self.w.shape[0]


def sample_direction(model: DirectionModel, d: int, master_seed: int,
                     sample_index: int) -> Direction:
    """Draw direction number ``sample_index`` of the stream ``master_seed``."""
    d = int(d)
    if d < 2:
        raise InvalidInputError(f"dimension must be >= 2, got {d}")
    if model.kind == "perturbed" and model.eps.shape[0] != d:
        raise InvalidInputError(
            f"eps has length {model.eps.shape[0]}, configuration has d={d}")
    rng = derive_rng(master_seed, sample_index)
    if model.kind == "uniform":
        g = rng.standard_normal(d)
        w = math.sqrt(d) / np.linalg.norm(g) * g
    elif model.kind == "bernoulli":
        w = (2.0 * rng.integers(0, 2, size=d) - 1.0)
    elif model.kind == "perturbed":
        w = (2.0 * rng.integers(0, 2, size=d) - 1.0) * (1.0 + model.eps)
    else:
        raise InvalidInputError(f"unknown direction model {model.kind!r}")
    w.flags.writeable = False
    return Direction(w=w, model_kind=model.kind)


# ---------------------------------------------------------------------------
# Projections


def _check_dim(cfg: PointConfig, direction: Direction) -> None:
    if direction.d != cfg.d:
        raise InvalidInputError(
            f"direction has length {direction.d}, configuration has d={cfg.d}")


def project(cfg: PointConfig, j: int, direction: Direction) -> float:
    """Scaled projection <x_j, w> of a single point."""
    _check_dim(cfg, direction)
    j = _check_index(cfg, j)
    w = direction.w
    if cfg.kind == "cube":
        scale = 1.0 / math.sqrt(cfg.d)
        acc = 0.0
        for i in range(cfg.d):
            term = w[i] * scale
            acc += -term if (j >> i) & 1 else term
        return acc
    if cfg.kind == "dup_basis":
        return float(w[j if j < cfg.d else j - cfg.d])
    row = cfg.matrix[j]
    if cfg.d > _FSUM_DIM:
        return math.fsum(row * w)      # compensated: error independent of d
    return float(np.dot(row, w))


def cube_partial_sums(w: np.ndarray, coords: range, d: int) -> np.ndarray:
    """All 2^len(coords) signed sums of w[coords]/√d, indexed by bit pattern.

    Entry b holds the sum with coordinate coords[i] taken negative iff bit i
    of b is set, matching the cube's vertex indexing.
    """
    scale = w[list(coords)] / math.sqrt(d)
    out = np.zeros(1 << len(scale))
    size = 1
    for c in scale:
        out[size:2 * size] = out[:size]
        out[size:2 * size] -= c
        out[:size] += c
        size *= 2
    return out


def project_all(cfg: PointConfig, direction: Direction) -> np.ndarray:
    """Projections of every point, in index order.  Refuses n > 2^24."""
    from .errors import EnumerationGuardError
    _check_dim(cfg, direction)
    if cfg.n > (1 << 24):
        raise EnumerationGuardError(
            f"n = {cfg.n} points is beyond the enumeration guard 2^24")
    if cfg.kind == "cube":
        return cube_partial_sums(direction.w, range(cfg.d), cfg.d)
    if cfg.kind == "dup_basis":
        coords = np.concatenate([np.arange(cfg.d), np.arange(cfg.n - cfg.d)])
        return direction.w[coords]
    return cfg.matrix @ direction.w


def project_indices(cfg: PointConfig, indices, direction: Direction,
                    chunk: int = 1 << 14) -> np.ndarray:
    """Projections of selected points (memory-bounded, chunked for the cube)."""
    _check_dim(cfg, direction)
    w = direction.w
    if cfg.kind == "cube":
        scale = w / math.sqrt(cfg.d)
        out = np.empty(len(indices))
        for start in range(0, len(indices), chunk):
            block = indices[start:start + chunk]
            out[start:start + len(block)] = sign_rows(cfg.d, block) @ scale
        return out
    idx = np.asarray(indices, dtype=np.int64)
    if cfg.kind == "dup_basis":
        coords = np.where(idx < cfg.d, idx, idx - cfg.d)
        return w[coords]
    return cfg.matrix[idx] @ w
