"""Point configurations on (or near) the unit sphere S^{d-1}.

Two families are implicit and are never materialized as an (n, d) matrix:

* ``cube``      -- the 2^d sign vectors (±1/√d, ..., ±1/√d); point j carries
                   the binary expansion of j (bit i set => coordinate i is
                   -1/√d, else +1/√d),
* ``dup_basis`` -- the standard basis e_1..e_d followed by a repeat of
                   e_1..e_{floor(delta*d)}.

Explicit and random-uniform configurations store their row matrix.  All
consumers go through index-based accessors (``inner_product``, ``point``),
so the cube works at dimensions where n = 2^d is astronomically large.

Indices are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

#: Norm tolerance used by "strict" configurations.
STRICT_NORM_TOL = 1e-9

#: Direct enumeration is refused beyond this many points.
ENUMERATION_GUARD = 1 << 24


@dataclass(frozen=True)
class PointConfig:
    """A configuration of n points on S^{d-1}, explicit or implicit.

    ``matrix`` is None for the implicit kinds.  ``norm_tolerance`` only
    relaxes validation of explicit rows; it never rescales anything.
    """

    kind: str                     # "explicit" | "random_uniform" | "cube" | "dup_basis"
    d: int
    n: int
    norm_tolerance: float = STRICT_NORM_TOL
    matrix: np.ndarray | None = field(default=None, repr=False)
    delta: float | None = None    # dup_basis only
    seed: int | None = None       # random_uniform only

    @property
    def is_dense(self) -> bool:
        return self.matrix is not None

    @property
    def strict_norms(self) -> bool:
        return self.norm_tolerance <= STRICT_NORM_TOL

    def descriptor(self) -> str:
        """Canonical string form, parseable by :func:`make_config`."""
        if self.kind == "cube":
            return f"cube:{self.d}"
        if self.kind == "dup_basis":
            return f"dup-basis:{self.d},{self.delta:.17g}"
        if self.kind == "random_uniform":
            return f"random:{self.n},{self.d},{self.seed}"
        return f"explicit:{self.n}x{self.d}"


def _validate_rows(matrix: np.ndarray, norm_tolerance: float) -> None:
    norms = np.linalg.norm(matrix, axis=1)
    bad = np.nonzero(np.abs(norms - 1.0) > norm_tolerance)[0]
    if bad.size:
        j = int(bad[0])
        raise InvalidInputError(
            f"point {j} has norm {norms[j]:.17g}, outside tolerance "
            f"{norm_tolerance:g} of 1")


def explicit(matrix, norm_tolerance: float = STRICT_NORM_TOL) -> PointConfig:
    """Wrap an (n, d) row matrix; every row must be within norm_tolerance of unit."""
    m = np.ascontiguousarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 2:
        raise InvalidInputError(f"need an (n>=1, d>=2) matrix, got shape {m.shape}")
    _validate_rows(m, norm_tolerance)
    m.flags.writeable = False
    return PointConfig(kind="explicit", d=m.shape[1], n=m.shape[0],
                       norm_tolerance=norm_tolerance, matrix=m)


def cube(d: int) -> PointConfig:
    """The 2^d sign vectors (±1/√d, ..., ±1/√d); stored implicitly."""
    if d < 2:
        raise InvalidInputError(f"cube dimension must be >= 2, got {d}")
    return PointConfig(kind="cube", d=int(d), n=1 << int(d))


def duplicated_basis(d: int, delta: float) -> PointConfig:
    """e_1..e_d followed by a repeat of e_1..e_{floor(delta*d)}."""
    if d < 2:
        raise InvalidInputError(f"dimension must be >= 2, got {d}")
    if not 0.0 < delta < 1.0:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")
    # 1e-9 absorbs the binary representation of decimal deltas (0.3 * 10 -> 3).
    dups = int(math.floor(delta * d + 1e-9))
    return PointConfig(kind="dup_basis", d=int(d), n=int(d) + dups, delta=float(delta))


def random_uniform(n: int, d: int, seed: int) -> PointConfig:
    """n iid uniform points on S^{d-1}: normalized Gaussian rows, reproducible."""
    if d < 2 or n < 1:
        raise InvalidInputError(f"need n >= 1, d >= 2, got n={n}, d={d}")
    rng = np.random.default_rng(int(seed))
    g = rng.standard_normal((int(n), int(d)))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g.flags.writeable = False
    return PointConfig(kind="random_uniform", d=int(d), n=int(n),
                       matrix=g, seed=int(seed))


def make_config(descriptor: str, norm_tolerance: float = STRICT_NORM_TOL) -> PointConfig:
    """Build a configuration from a descriptor string.

    Accepted forms: ``cube:D``, ``dup-basis:D,DELTA``, ``random:N,D,SEED``
    and ``points:PATH`` (plain-text point file, see :func:`load_points`).
    """
    head, sep, rest = descriptor.partition(":")
    if not sep:
        raise InvalidInputError(f"malformed config descriptor {descriptor!r}")
    try:
        if head == "cube":
            return cube(int(rest))
        if head in ("dup-basis", "dup_basis"):
            ds, deltas = rest.split(",")
            return duplicated_basis(int(ds), float(deltas))
        if head == "random":
            ns, ds, seeds = rest.split(",")
            return random_uniform(int(ns), int(ds), int(seeds))
        if head == "points":
            return load_points(rest, norm_tolerance=norm_tolerance)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"malformed config descriptor {descriptor!r}: {exc}") from exc
    raise InvalidInputError(f"unknown config kind {head!r}")


# ---------------------------------------------------------------------------
# Index-based accessors


def _check_index(cfg: PointConfig, j: int, name: str = "index") -> int:
    j = int(j)
    if not 0 <= j < cfg.n:
        raise InvalidInputError(f"{name} {j} out of range [0, {cfg.n})")
    return j


def basis_coord(cfg: PointConfig, j: int) -> int:
    """For dup_basis: the coordinate of the basis vector that point j equals."""
    j = _check_index(cfg, j)
    return j if j < cfg.d else j - cfg.d


def point(cfg: PointConfig, j: int) -> np.ndarray:
    """Materialize the coordinates of point j as a length-d vector."""
    j = _check_index(cfg, j)
    if cfg.is_dense:
        return np.array(cfg.matrix[j], dtype=float)
    if cfg.kind == "cube":
        s = 1.0 / math.sqrt(cfg.d)
        return np.array([-s if (j >> i) & 1 else s for i in range(cfg.d)])
    out = np.zeros(cfg.d)
    out[basis_coord(cfg, j)] = 1.0
    return out


def inner_product(cfg: PointConfig, i: int, j: int) -> float:
    """Exact dot product <x_i, x_j>, computed without materializing implicit points.

    For the cube this is (d - 2*hamming(i, j)) / d.  The result is clamped to
    [-1, 1] under strict unit norms, protecting downstream (1-|.|)^(-1/2)
    evaluations from roundoff.
    """
    i = _check_index(cfg, i, "i")
    j = _check_index(cfg, j, "j")
    if cfg.kind == "cube":
        ham = (i ^ j).bit_count()
        return (cfg.d - 2 * ham) / cfg.d
    if cfg.kind == "dup_basis":
        return 1.0 if basis_coord(cfg, i) == basis_coord(cfg, j) else 0.0
    if i == j and cfg.strict_norms:
        return 1.0      # unit norm holds by validation; the float dot loses an ulp
    v = float(np.dot(cfg.matrix[i], cfg.matrix[j]))
    if cfg.strict_norms:
        v = min(1.0, max(-1.0, v))
    return v


def sample_vertices(cfg: PointConfig, m: int, seed: int) -> list[int]:
    """m indices drawn uniformly with replacement from 0..n-1, reproducible."""
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(int(seed))
    if cfg.kind == "cube" and cfg.d > 62:
        # n = 2^d exceeds a machine word: assemble indices from 64-bit words.
        nwords = (cfg.d + 63) // 64
        words = rng.integers(0, 1 << 64, size=(m, nwords), dtype=np.uint64)
        top = cfg.d - 64 * (nwords - 1)
        words[:, -1] &= np.uint64((1 << top) - 1)
        return [int.from_bytes(row.tobytes(), "little") for row in words]
    return [int(v) for v in rng.integers(0, cfg.n, size=m, dtype=np.int64)]


def sign_rows(d: int, indices) -> np.ndarray:
    """(m, d) matrix of cube sign patterns (±1.0) for the given vertex indices."""
    nbytes = (d + 7) // 8
    buf = b"".join(int(j).to_bytes(nbytes, "little") for j in indices)
    packed = np.frombuffer(buf, dtype=np.uint8).reshape(len(indices), nbytes)
    bits = np.unpackbits(packed, axis=1, count=d, bitorder="little")
    return 1.0 - 2.0 * bits.astype(float)


# ---------------------------------------------------------------------------
# Plain-text point files: header "d n", then n rows of d reals.


def save_points(cfg_or_matrix, path) -> None:
    """Write a point file at full round-trip precision (17 significant digits)."""
    if isinstance(cfg_or_matrix, PointConfig):
        if not cfg_or_matrix.is_dense:
            raise InvalidInputError(
                f"cannot save implicit configuration {cfg_or_matrix.kind!r} "
                "(materializing it is intractable)")
        matrix = cfg_or_matrix.matrix
    else:
        matrix = np.asarray(cfg_or_matrix, dtype=float)
        if matrix.ndim == 1:
            matrix = matrix[None, :]
    n, d = matrix.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{d} {n}\n")
        for row in matrix:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_points(path, norm_tolerance: float = STRICT_NORM_TOL) -> PointConfig:
    """Read a point file and validate norms against norm_tolerance."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise InvalidInputError(f"{path}: header must be 'd n', got {header!r}")
        d, n = int(header[0]), int(header[1])
        rows = np.loadtxt(fh, dtype=float, ndmin=2)
    if rows.shape != (n, d):
        raise InvalidInputError(
            f"{path}: header promises {n} x {d}, file holds {rows.shape[0]} x {rows.shape[1]}")
    return explicit(rows, norm_tolerance=norm_tolerance)


def save_vector(vec, path) -> None:
    """Single-row variant of the point-file format (used for perturbation vectors)."""
    save_points(np.asarray(vec, dtype=float)[None, :], path)


def load_vector(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2 or int(header[1]) != 1:
            raise InvalidInputError(f"{path}: expected a single-row vector file")
        d = int(header[0])
        row = np.loadtxt(fh, dtype=float, ndmin=2)
    if row.shape != (1, d):
        raise InvalidInputError(f"{path}: expected 1 x {d} payload, got {row.shape}")
    return row[0]
