"""Radial SDE paths and the static samplers.

Moment oracle used throughout: for unit multiplicities the drift satisfies
x . drift(x) = (beta/2) * gamma, so E|X(t)|^2 = |x0|^2 + (N + beta*gamma) t
exactly, which at the origin matches the static-law calibration moment.
"""

import numpy as np
import pytest
from pytest import approx
from scipy import integrate, special

from dunkl.errors import WallError
from dunkl.freezing import peak_vector
from dunkl.radialsde import (calibration_moment, drift, sample_static,
                             simulate_ensemble, simulate_radial)
from dunkl.rootsys import build_root_system, chamber_contains, gaps


class TestDrift:
    def test_A2_value(self, A2):
        assert drift(A2, [-1.0, 1.0]) == approx([-1.0, 1.0])

    def test_wall_error(self, A2):
        with pytest.raises(WallError):
            drift(A2, [1.0, 1.0])

    def test_A_components_sum_zero(self, A3, rng):
        for _ in range(5):
            x = np.sort(rng.standard_normal(3))
            x += np.arange(3) * 1e-3     # keep gaps open
            assert drift(A3, x).sum() == approx(0.0, abs=1e-12)

    def test_antisymmetric_under_reversal(self, A3):
        x = np.array([-0.7, 0.0, 0.7])
        d = drift(A3, x)
        assert d == approx(-d[::-1])

    def test_peak_fixed_point(self, A3, B3):
        for R in (A3, B3):
            z = peak_vector(R).z
            assert drift(R, z) == approx((R.beta / 2.0) * z, abs=1e-9)


class TestSimulateRadial:
    def test_T_zero(self, A2):
        p = simulate_radial(A2, [-0.5, 0.5], 0.0, seed=1)
        assert p.times == approx([0.0])
        assert p.states[0] == approx([-0.5, 0.5])

    def test_path_stays_interior(self, A2):
        p = simulate_radial(A2, [-0.5, 0.5], 0.1, dt=1e-3, seed=2)
        for x in p.states:
            assert chamber_contains(A2, x, tol=1e-9)
            assert np.all(gaps(A2, x) > 0)

    def test_bit_exact_reproducibility(self, B2):
        p1 = simulate_radial(B2, [0.5, 1.5], 0.05, dt=1e-3, seed=7)
        p2 = simulate_radial(B2, [0.5, 1.5], 0.05, dt=1e-3, seed=7)
        assert np.array_equal(p1.states, p2.states)
        p3 = simulate_radial(B2, [0.5, 1.5], 0.05, dt=1e-3, seed=8)
        assert not np.array_equal(p1.states, p3.states)

    def test_x0_outside_chamber(self, A2):
        with pytest.raises(WallError):
            simulate_radial(A2, [1.0, -1.0], 0.1)

    def test_second_moment_oracle(self):
        # E|X(1)|^2 = |x0|^2 + (N + beta*gamma) * 1, from the drift identity
        R = build_root_system("A", 2, 8.0)
        x0 = np.array([-0.5, 0.5])
        n = 10_000
        pts = simulate_ensemble(R, x0, 1.0, 1e-3, n, seed=3)
        q = np.sum(pts ** 2, axis=1)
        target = x0 @ x0 + calibration_moment(R)
        assert abs(q.mean() - target) < 3 * q.std(ddof=1) / np.sqrt(n)

    def test_weak_convergence_on_dt(self):
        R = build_root_system("A", 2, 2.0)
        x0 = np.array([-0.5, 0.5])
        n = 10_000
        m = {}
        se = {}
        for dt in (2e-3, 1e-3):
            pts = simulate_ensemble(R, x0, 1.0, dt, n, seed=11)
            q = np.sum(pts ** 2, axis=1)
            m[dt], se[dt] = q.mean(), q.std(ddof=1) / np.sqrt(n)
        err = np.hypot(se[2e-3], se[1e-3])
        assert abs(m[2e-3] - m[1e-3]) < 3 * err

    def test_threads_deterministic(self, B2):
        a = simulate_ensemble(B2, [0.5, 1.5], 0.05, 1e-3, 10_000, seed=5,
                              threads=1)
        b = simulate_ensemble(B2, [0.5, 1.5], 0.05, 1e-3, 10_000, seed=5,
                              threads=4)
        assert np.array_equal(a, b)


class TestStaticSampler:
    def test_calibration_A2_beta2(self):
        R = build_root_system("A", 2, 2.0)
        s = sample_static(R, 200_000, seed=1)
        q = np.sum(s.points ** 2, axis=1)
        assert abs(q.mean() - 4.0) < 4 * q.std(ddof=1) / np.sqrt(len(q))

    def test_calibration_A3_beta4(self):
        R = build_root_system("A", 3, 4.0)
        s = sample_static(R, 200_000, seed=2)
        q = np.sum(s.points ** 2, axis=1)
        assert abs(q.mean() - 15.0) < 4 * q.std(ddof=1) / np.sqrt(len(q))

    def test_B1_quadrature_oracle(self):
        # 1-D reduction: E x^2 = int x^2 * x^2 e^{-x^2/2} / int x^2 e^{-x^2/2}
        num = integrate.quad(lambda x: x ** 4 * np.exp(-x * x / 2), 0, 20)[0]
        den = integrate.quad(lambda x: x ** 2 * np.exp(-x * x / 2), 0, 20)[0]
        target = num / den
        assert target == approx(3.0, abs=1e-10)
        R = build_root_system("B", 1, 2.0)
        s = sample_static(R, 200_000, seed=3)
        q = s.points[:, 0] ** 2
        assert abs(q.mean() - target) < 4 * q.std(ddof=1) / np.sqrt(len(q))

    def test_points_sorted_into_chamber(self, B2, A3):
        for R in (B2, A3):
            s = sample_static(R, 5_000, seed=4)
            assert all(chamber_contains(R, x, tol=0.0) for x in s.points)

    def test_backends_agree_on_gap_moments(self):
        # E[1/(alpha.X)^2] per root, tridiagonal vs MCMC, combined 4 se
        R = build_root_system("A", 2, 4.0)
        n = 100_000
        vals = {}
        errs = {}
        for method in ("tridiagonal", "mcmc"):
            s = sample_static(R, n, seed=5, method=method)
            assert s.sampler_tag == method
            g = s.points @ R.root_matrix.T
            f = 1.0 / g[:, 0] ** 2
            vals[method], errs[method] = f.mean(), f.std(ddof=1) / np.sqrt(n)
        err = np.hypot(errs["tridiagonal"], errs["mcmc"])
        assert abs(vals["tridiagonal"] - vals["mcmc"]) < 4 * err

    def test_mcmc_reports_acceptance(self, B2):
        s = sample_static(B2, 2_000, seed=6, method="mcmc")
        assert 0.05 < s.acceptance_rate < 0.999

    def test_mirror_symmetry_of_per_root_rates(self):
        # the origin law is invariant under x -> -reverse(x); mirror-paired
        # roots give equal rate functionals within 3 se
        R = build_root_system("A", 3, 8.0)
        s = sample_static(R, 200_000, seed=7)
        g = s.points @ R.root_matrix.T
        f = 1.0 / g ** 2
        # roots: (0,1), (0,2), (1,2); mirror pairing swaps (0,1) <-> (1,2)
        d = f[:, 0] - f[:, 2]
        assert abs(d.mean()) < 3 * d.std(ddof=1) / np.sqrt(len(d))
