"""Root systems: counts, closure, reflections, weight, chamber."""

import json

import numpy as np
import pytest
from pytest import approx

from dunkl.errors import DimensionError, RegimeError
from dunkl.rootsys import (RootSystem, build_root_system, chamber_contains,
                           gaps, reflect, weight)


class TestConstruction:
    def test_A3_counts(self):
        R = build_root_system("A", 3, 2.0)
        assert R.n_roots == 3
        assert R.gamma == 3.0

    def test_B2_counts(self):
        R = build_root_system("B", 2, 2.0)
        assert R.n_roots == 4
        assert R.gamma == 4.0

    def test_root_counts_formula(self):
        for N in (2, 3, 4, 5):
            assert build_root_system("A", N, 2.0).n_roots == N * (N - 1) // 2
        for N in (1, 2, 3, 4):
            assert build_root_system("B", N, 2.0).n_roots == N * N

    def test_regime_boundary(self):
        with pytest.raises(RegimeError):
            build_root_system("A", 2, 1.0)
        with pytest.raises(RegimeError):
            build_root_system("B", 2, 2.0, {"short": 0.5, "long": 1.0})
        # beta*k just above 1 is fine
        build_root_system("A", 2, 1.01)

    def test_dimension_errors(self):
        with pytest.raises(DimensionError):
            build_root_system("A", 1, 2.0)
        with pytest.raises(DimensionError):
            build_root_system("B", 0, 2.0)
        with pytest.raises(DimensionError):
            build_root_system("D", 3, 2.0)

    def test_per_orbit_multiplicities(self):
        R = build_root_system("B", 3, 2.0, {"short": 2.0, "long": 1.0})
        assert R.gamma == approx(3 * 2.0 + 6 * 1.0)

    def test_norms(self):
        R = build_root_system("B", 2, 2.0)
        by_orbit = {}
        for r in R.positive_roots:
            by_orbit.setdefault(r.orbit, set()).add(r.norm_sq)
        assert by_orbit == {"short": {1.0}, "long": {2.0}}
        assert all(r.norm_sq == approx(r.vec @ r.vec) for r in R.positive_roots)

    def test_positivity_against_m(self):
        for fam, N in (("A", 4), ("B", 3)):
            R = build_root_system(fam, N, 2.0)
            m = np.arange(1.0, N + 1)
            assert all(r.vec @ m > 0 for r in R.positive_roots)

    def test_json_round_trip(self):
        R = build_root_system("B", 3, 4.0, {"short": 1.5, "long": 1.0})
        R2 = RootSystem.from_json(R.to_json())
        assert R2.family == "B" and R2.rank == 3 and R2.beta == 4.0
        assert R2.k_by_orbit == R.k_by_orbit


class TestReflection:
    def test_reflect_root_itself(self, A3):
        for r in A3.positive_roots:
            assert reflect(r, r.vec) == approx(-r.vec)

    def test_reflect_swaps_coordinates(self, A3):
        alpha = A3.positive_roots[0]          # e2 - e1
        assert reflect(alpha, [3.0, 5.0, 7.0]) == approx([5.0, 3.0, 7.0])

    def test_orthogonal_fixed(self, A2):
        alpha = A2.positive_roots[0]
        x = np.array([1.0, 1.0])              # perpendicular to e2 - e1
        assert reflect(alpha, x) == approx(x)

    def test_involution_and_inner_product(self, B3, rng):
        for _ in range(20):
            x = rng.standard_normal(3)
            for r in B3.positive_roots:
                y = reflect(r, x)
                assert y @ r.vec == approx(-(x @ r.vec), abs=1e-12)
                assert reflect(r, y) == approx(x, abs=1e-12)

    def test_closure_exact(self):
        for fam, N in (("A", 4), ("B", 3)):
            R = build_root_system(fam, N, 2.0)
            mat = R.root_matrix
            for r in R.positive_roots:
                for z in R.positive_roots:
                    img = reflect(r, z.vec)
                    plus = np.all(mat == img, axis=1).any()
                    minus = np.all(mat == -img, axis=1).any()
                    assert plus or minus


class TestWeight:
    def test_wall_gives_zero(self, A3):
        assert weight(A3, [1.0, 1.0, 2.0]) == 0.0

    def test_single_factor(self):
        R = build_root_system("A", 2, 4.0)
        assert weight(R, [0.0, 1.0]) == approx(1.0)

    def test_B1_square(self):
        R = build_root_system("B", 1, 2.0)
        assert weight(R, [3.0]) == approx(9.0)

    def test_group_invariance(self, B2, table_B2, rng):
        from dunkl.weylgroup import act
        for _ in range(10):
            x = rng.standard_normal(2) * 2.0
            w0 = weight(B2, x)
            for g in table_B2.elements:
                assert weight(B2, act(g, x)) == approx(w0, rel=1e-12)


class TestChamber:
    def test_examples(self, B2):
        A = build_root_system("A", 3, 2.0)
        assert chamber_contains(A, [1.0, 2.0, 3.0], tol=0.0)
        assert not chamber_contains(A, [2.0, 1.0, 3.0], tol=0.0)
        assert not chamber_contains(B2, [-1.0, 2.0], tol=0.0)

    def test_tolerance(self, A2):
        assert not chamber_contains(A2, [1e-10, 0.0], tol=0.0)
        assert chamber_contains(A2, [1e-10, 0.0], tol=1e-9)
        with pytest.raises(ValueError):
            chamber_contains(A2, [0.0, 1.0], tol=-1.0)

    def test_gaps_order(self, A3):
        g = gaps(A3, [0.0, 1.0, 3.0])
        assert g == approx([1.0, 3.0, 2.0])
