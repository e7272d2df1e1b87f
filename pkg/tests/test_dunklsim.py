"""Coupled simulation: skew product, event counting, per-particle rates."""

import numpy as np
import pytest
from pytest import approx

from dunkl.dunklsim import (bulk_limit, jump_count_stats, per_particle_rate,
                            simulate_dunkl, simulate_jump_counts)
from dunkl.errors import RegimeError, WallError
from dunkl.jumprates import estimate_rates_origin, rate_integrand_matrix
from dunkl.radialsde import philox_stream, simulate_ensemble
from dunkl.rootsys import build_root_system
from dunkl.weylgroup import act_ps


class TestSimulateDunkl:
    def test_no_events_identity(self, A2, table_A2):
        # particles far apart and a tiny horizon: almost surely no jumps
        path, traj = simulate_dunkl(A2, table_A2, [-50.0, 50.0], 1e-4,
                                    dt=1e-5, seed=1)
        assert traj.n_events == 0
        assert traj.group_path == [0]

    def test_skew_product_consistency_A(self, A3, table_A3):
        path, traj = simulate_dunkl(A3, table_A3, [-1.0, 0.0, 1.0], 0.5,
                                    dt=1e-3, seed=2, save_stride=1)
        assert traj.n_events > 0
        # reconstructed full state: sorted coordinates equal the radial state
        for t, x in zip(path.times, path.states):
            _, ps = traj.group_at(t)
            full = act_ps(ps, x)
            assert np.sort(full) == approx(x, abs=0.0)

    def test_skew_product_consistency_B(self, B2, table_B2):
        path, traj = simulate_dunkl(B2, table_B2, [0.5, 1.5], 0.5,
                                    dt=1e-3, seed=3, save_stride=1)
        for t, x in zip(path.times, path.states):
            _, ps = traj.group_at(t)
            full = act_ps(ps, x)
            assert np.sort(np.abs(full)) == approx(x, abs=0.0)

    def test_group_path_tracks_right_mult(self, A3, table_A3):
        _, traj = simulate_dunkl(A3, table_A3, [-1.0, 0.0, 1.0], 0.3,
                                 dt=1e-3, seed=4)
        g = 0
        for (_, a), idx in zip(traj.events, traj.group_path[1:]):
            g = int(table_A3.right_mult[a, g])
            assert idx == g

    def test_large_N_without_table(self):
        R = build_root_system("A", 10, 8.0)
        x0 = np.arange(10) - 4.5
        path, traj = simulate_dunkl(R, None, x0, 0.05, dt=5e-4, seed=5)
        # indices are lexicographic ranks in [0, 10!)
        assert all(0 <= g < 3_628_800 for g in traj.group_path)
        for t, x in zip(path.times, path.states):
            _, ps = traj.group_at(t)
            assert np.sort(act_ps(ps, x)) == approx(x, abs=0.0)
        # each event is a pairwise exchange: consecutive group elements move
        # the same probe vector in exactly two coordinates
        probe = np.arange(10.0)
        for prev, cur in zip(traj.group_elements, traj.group_elements[1:]):
            changed = np.sum(act_ps(prev, probe) != act_ps(cur, probe))
            assert changed == 2

    def test_wall_start_rejected(self, A2, table_A2):
        with pytest.raises(WallError):
            simulate_dunkl(A2, table_A2, [1.0, 1.0], 0.1)

    def test_event_mean_vs_integrated_intensity(self):
        # oracle: E(count) = E int_0^T Lambda_inst(X(s)) ds along independent
        # radial paths (tower property); no jump-code involvement
        R = build_root_system("A", 2, 16.0)
        table = None
        x0 = np.array([-0.5, 0.5])
        T, dt = 1.0, 5e-4

        n_or = 4_000
        rng = philox_stream(99, 1)
        x = np.tile(x0, (n_or, 1))
        acc = np.zeros(n_or)
        from dunkl.radialsde import _advance_block
        t = 0.0
        while t < T - 1e-12:
            step = min(dt, T - t)
            acc += rate_integrand_matrix(R, x).sum(axis=1) * step
            x = _advance_block(R, x, step, rng)
            t += step
        oracle = acc.mean()
        oracle_se = acc.std(ddof=1) / np.sqrt(n_or)

        n_rep = 400
        counts = []
        for k in range(n_rep):
            _, traj = simulate_dunkl(R, table, x0, T, dt=dt, seed=1000 + k)
            counts.append(traj.n_events)
        counts = np.array(counts, dtype=float)
        se = np.hypot(counts.std(ddof=1) / np.sqrt(n_rep), oracle_se)
        assert abs(counts.mean() - oracle) < 3 * se


class TestJumpCounts:
    def test_window_mean(self, A2):
        rt = estimate_rates_origin(A2, 200_000, seed=6)
        rec = simulate_jump_counts(A2, 1.0, np.e, nreplicas=1_000, dt=2e-3,
                                   seed=7)
        rep = jump_count_stats(rec, rt, 1.0)
        w = rep["windows"][-1]
        # mean over [1, e] is Lambda(1|0) * 1 = 1/3
        assert abs(w["mean"] - 1.0 / 3.0) < 3 * w["se_mean"]

    def test_rate_driven_model_is_poisson(self, A2):
        rt = estimate_rates_origin(A2, 200_000, seed=8)
        rec = simulate_jump_counts(A2, 1.0, np.e, nreplicas=2_000,
                                   seed=9, coupled=False, rate_table=rt)
        rep = jump_count_stats(rec, rt, 1.0)
        w = rep["windows"][-1]
        assert abs(w["mean"] - w["predicted_mean"]) < 3 * w["se_mean"]
        assert abs(w["var"] - w["predicted_mean"]) < 3 * w["se_var"]
        assert w["dispersion_pvalue"] > 0.01

    def test_log_window_doubling(self, A2):
        # doubling the log-window doubles the predicted mean
        rt = estimate_rates_origin(A2, 50_000, seed=10)
        rep1 = jump_count_stats(
            simulate_jump_counts(A2, 1.0, np.e, 200, dt=5e-3, seed=11),
            rt, 1.0)
        rep2 = jump_count_stats(
            simulate_jump_counts(A2, 1.0, np.e ** 2, 200, dt=5e-3, seed=11),
            rt, 1.0)
        p1 = rep1["windows"][-1]["predicted_mean"]
        p2 = rep2["windows"][-1]["predicted_mean"]
        assert p2 == approx(2 * p1, rel=1e-12)

    def test_zero_length_window(self, A2):
        rt = estimate_rates_origin(A2, 50_000, seed=12)
        rec = simulate_jump_counts(A2, 1.0, 1.0 + 1e-12, nreplicas=50,
                                   dt=1e-3, seed=13)
        assert rec.counts[:, -1].max() <= 0 + 1


class TestPerParticle:
    def test_closed_form_A_value(self):
        assert per_particle_rate("A", 10, 2.0) == approx(0.225)

    def test_closed_form_A_sequence_exact(self):
        beta = 2.0
        limit = bulk_limit("A", beta)
        assert limit == approx(0.25)
        ns = np.arange(4, 25)
        vals = np.array([per_particle_rate("A", int(n), beta) for n in ns])
        exact = beta * (ns - 1) / (8 * (beta - 1) * ns)
        assert np.max(np.abs(vals - exact)) < 1e-12
        # fits limit - a/N with a > 0 and tiny residual
        A = np.stack([np.ones_like(ns, dtype=float), 1.0 / ns], axis=1)
        coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
        assert coef[0] == approx(limit, abs=1e-10)
        assert -coef[1] > 0
        resid = np.max(np.abs(A @ coef - vals))
        assert resid < 1e-10

    def test_closed_form_B_constant(self):
        assert bulk_limit("B", 2.0) == approx(0.5)
        for N in (2, 8, 20):
            assert per_particle_rate("B", N, 2.0) == approx(0.5)

    def test_regime_error(self):
        with pytest.raises(RegimeError):
            per_particle_rate("A", 4, 1.0)
        with pytest.raises(RegimeError):
            bulk_limit("B", 0.5)

    def test_simulate_mode_tracks_closed_form(self):
        # small case; the N=8 acceptance criterion runs the full version
        N, beta = 4, 2.0
        x0 = np.arange(N) - (N - 1) / 2.0
        x0 = x0 / np.linalg.norm(x0)
        r = per_particle_rate("A", N, beta, x0=x0, mode="simulate",
                              nreplicas=8_000, dt=2e-3, seed=14)
        cf = per_particle_rate("A", N, beta)
        assert r == approx(cf, rel=0.15)
