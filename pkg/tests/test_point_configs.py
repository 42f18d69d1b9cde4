"""Tests for point configuration construction, accessors, and file round-trips."""

import math

import numpy as np
import pytest

from sphereproj import (InvalidInputError, cube, duplicated_basis, explicit,
                        inner_product, load_points, load_vector, make_config,
                        point, random_uniform, sample_vertices, save_points,
                        save_vector)
from sphereproj.point_configs import sign_rows


def cube_matrix(d):
    """Independent oracle: materialize all 2^d cube points from the definition."""
    s = 1.0 / math.sqrt(d)
    rows = np.empty((1 << d, d))
    for j in range(1 << d):
        rows[j] = [-s if (j >> i) & 1 else s for i in range(d)]
    return rows


class TestConstruction:
    def test_cube_2_explicit_points(self):
        cfg = cube(2)
        assert cfg.n == 4
        s = 1.0 / math.sqrt(2)
        assert np.allclose(point(cfg, 0), [s, s])
        assert np.allclose(point(cfg, 3), [-s, -s])
        for j in range(4):
            assert math.isclose(np.linalg.norm(point(cfg, j)), 1.0, abs_tol=1e-12)

    def test_dup_basis_duplicates(self):
        cfg = duplicated_basis(10, 0.5)
        assert cfg.n == 15
        for t in range(5):
            assert np.array_equal(point(cfg, 10 + t), point(cfg, t))

    def test_dup_basis_decimal_delta(self):
        # floor(0.3 * 10) must be 3 despite 0.3's binary representation
        assert duplicated_basis(10, 0.3).n == 13

    def test_random_uniform_reproducible_unit_rows(self):
        a = random_uniform(100, 50, seed=7)
        b = random_uniform(100, 50, seed=7)
        assert np.array_equal(a.matrix, b.matrix)
        assert np.max(np.abs(np.linalg.norm(a.matrix, axis=1) - 1.0)) < 1e-12

    def test_explicit_rejects_bad_norm_naming_index(self):
        m = np.eye(4)
        m[2, 2] = 1.5
        with pytest.raises(InvalidInputError, match="point 2"):
            explicit(m)

    def test_norm_tolerance_relaxes_validation_only(self):
        m = np.eye(3) * 1.1
        cfg = explicit(m, norm_tolerance=0.2)
        assert cfg.n == 3
        # inner products are NOT clamped under relaxed norms
        assert inner_product(cfg, 0, 0) == pytest.approx(1.21)

    @pytest.mark.parametrize("descriptor, n, d", [
        ("cube:5", 32, 5),
        ("dup-basis:10,0.5", 15, 10),
        ("random:20,6,3", 20, 6),
    ])
    def test_make_config_descriptors(self, descriptor, n, d):
        cfg = make_config(descriptor)
        assert (cfg.n, cfg.d) == (n, d)
        assert make_config(cfg.descriptor()).n == n

    @pytest.mark.parametrize("bad", [
        "cube:1", "dup-basis:10,0", "dup-basis:10,1.0", "nonsense:3", "cube"])
    def test_make_config_rejects(self, bad):
        with pytest.raises(InvalidInputError):
            make_config(bad)


class TestInnerProduct:
    @pytest.mark.parametrize("d", [2, 4, 7, 10])
    def test_cube_formula_vs_explicit_dots(self, d):
        rows = cube_matrix(d)
        gram = rows @ rows.T
        cfg = cube(d)
        n = 1 << d
        for i in range(n):
            ham = np.array([(i ^ j).bit_count() for j in range(n)])
            expect = (d - 2 * ham) / d
            assert np.allclose(gram[i], expect, atol=1e-12)
            got = np.array([inner_product(cfg, i, j) for j in range(0, n, max(1, n // 16))])
            assert np.allclose(got, expect[::max(1, n // 16)], atol=0)

    @pytest.mark.parametrize("d", [4, 6, 8, 10])
    def test_cube_hamming_pair_counts(self, d):
        # enumerate all unordered pairs; class sizes must be 2^{d-1} C(d,k)
        n = 1 << d
        idx = np.arange(n, dtype=np.uint64)
        ham = np.bitwise_count(idx[:, None] ^ idx[None, :])
        counts = np.bincount(ham[np.triu_indices(n, k=1)].ravel(), minlength=d + 1)
        for k in range(1, d + 1):
            assert counts[k] == (1 << (d - 1)) * math.comb(d, k)
        assert counts[1:].sum() == math.comb(n, 2)

    def test_cube_hamming_one(self):
        assert inner_product(cube(4), 0, 1) == 0.5

    def test_dup_basis_duplicate_pair(self):
        cfg = duplicated_basis(10, 0.5)
        assert inner_product(cfg, 0, 10) == 1.0
        assert inner_product(cfg, 1, 10) == 0.0

    def test_self_inner_product_is_one(self):
        for cfg in (cube(6), duplicated_basis(8, 0.4), random_uniform(5, 4, 1)):
            assert inner_product(cfg, 2, 2) == 1.0

    def test_index_out_of_range(self):
        with pytest.raises(InvalidInputError):
            inner_product(cube(3), 0, 8)


class TestSampling:
    def test_reproducible(self):
        a = sample_vertices(cube(20), 5, seed=1)
        b = sample_vertices(cube(20), 5, seed=1)
        assert a == b

    def test_single_point_config(self):
        cfg = explicit(np.array([[1.0, 0.0]]))
        assert sample_vertices(cfg, 3, seed=0) == [0, 0, 0]

    def test_bit_frequency(self):
        idx = sample_vertices(cube(10), 10**5, seed=2)
        freq = sum(j & 1 for j in idx) / len(idx)
        assert abs(freq - 0.5) < 0.01

    def test_large_dimension_indices_in_range(self):
        idx = sample_vertices(cube(100), 500, seed=3)
        assert all(0 <= j < (1 << 100) for j in idx)
        assert max(idx).bit_length() > 64    # top words actually populated
        assert sample_vertices(cube(100), 500, seed=3) == idx

    def test_sign_rows_match_bits(self):
        rows = sign_rows(70, [0, 1, (1 << 69) | 5])
        assert rows.shape == (3, 70)
        assert np.all(rows[0] == 1.0)
        assert rows[1, 0] == -1.0 and np.all(rows[1, 1:] == 1.0)
        assert rows[2, 69] == -1.0 and rows[2, 0] == -1.0 and rows[2, 2] == -1.0


class TestPointFiles:
    def test_round_trip_bit_identical(self, tmp_path):
        cfg = random_uniform(17, 9, seed=11)
        path = tmp_path / "pts.txt"
        save_points(cfg, path)
        back = load_points(path)
        assert np.array_equal(back.matrix, cfg.matrix)
        assert (back.n, back.d) == (17, 9)

    def test_loader_enforces_norms(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 2\n1 0 0\n0 2 0\n")
        with pytest.raises(InvalidInputError, match="point 1"):
            load_points(path)
        cfg = load_points(path, norm_tolerance=1.5)
        assert cfg.n == 2

    def test_vector_round_trip(self, tmp_path):
        v = np.array([0.1, 0.25, 1.0 / 3.0])
        path = tmp_path / "vec.txt"
        save_vector(v, path)
        assert np.array_equal(load_vector(path), v)

    def test_implicit_configs_refuse_saving(self, tmp_path):
        with pytest.raises(InvalidInputError):
            save_points(cube(30), tmp_path / "nope.txt")
