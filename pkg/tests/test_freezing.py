"""Peak vectors, Hermite-zero identities, frozen rates and spectra, and the
tensor-space operator identities."""

import numpy as np
import pytest
from pytest import approx

from dunkl.errors import SizeError
from dunkl.freezing import (frozen_rate_table, hermite_zeros, hessian_at,
                            ladder_shift_residual, peak_vector, pf_spectrum,
                            su_generators, verify_exchange_identity,
                            verify_ladder_commutators, verify_ladder_subspace,
                            nonzero_labels, structure_constants)
from dunkl.rootsys import build_root_system, gaps


class TestPeakVector:
    def test_A2_exact(self, A2):
        pv = peak_vector(A2)
        assert pv.z == approx([-1 / np.sqrt(2), 1 / np.sqrt(2)], abs=1e-12)

    def test_A3_exact(self, A3):
        pv = peak_vector(A3)
        assert pv.z == approx([-np.sqrt(1.5), 0.0, np.sqrt(1.5)], abs=1e-10)

    def test_residual_and_norm(self, A3, B2, B3):
        for R in (A3, B2, B3):
            pv = peak_vector(R)
            assert pv.residual <= 1e-12
            assert pv.z @ pv.z == approx(R.gamma, abs=1e-10)

    def test_hermite_match_up_to_12(self):
        for N in range(2, 13):
            R = build_root_system("A", N, 4.0)
            pv = peak_vector(R)
            assert np.max(np.abs(pv.z - hermite_zeros(N))) < 1e-10
            assert abs(pv.z.sum()) < 1e-10

    def test_consistency_sum_B3(self, B3):
        pv = peak_vector(B3)
        s = sum(r.norm_sq / (r.vec @ pv.z) ** 2 for r in B3.positive_roots)
        assert s == approx(B3.n_roots, abs=1e-9)

    def test_hessian_positive_definite(self, B3):
        pv = peak_vector(B3)
        H = hessian_at(B3, pv.z)
        assert np.all(np.linalg.eigvalsh(H) > 0)

    def test_interior(self, B3):
        pv = peak_vector(B3)
        assert np.all(gaps(B3, pv.z) > 0)


class TestHermiteZeros:
    def test_small_cases(self):
        assert hermite_zeros(1) == approx([0.0])
        assert hermite_zeros(2) == approx([-1 / np.sqrt(2), 1 / np.sqrt(2)])
        assert hermite_zeros(3) == approx([-np.sqrt(1.5), 0.0, np.sqrt(1.5)])

    def test_linear_identity(self):
        # z_i = sum_{j != i} 1/(z_i - z_j)
        for N in range(2, 13):
            z = hermite_zeros(N)
            for i in range(N):
                s = sum(1.0 / (z[i] - z[j]) for j in range(N) if j != i)
                assert s == approx(z[i], abs=1e-10)

    def test_cubic_identity(self):
        # z_i = sum_{j != i} 2/(z_i - z_j)^3
        for N in range(2, 13):
            z = hermite_zeros(N)
            for i in range(N):
                s = sum(2.0 / (z[i] - z[j]) ** 3 for j in range(N) if j != i)
                assert s == approx(z[i], abs=1e-10)

    def test_mirror_antisymmetry_exact(self):
        for N in range(2, 13):
            z = hermite_zeros(N)
            assert np.array_equal(z, -z[::-1])

    def test_size_guard(self):
        with pytest.raises(SizeError):
            hermite_zeros(51)


class TestFrozenRates:
    def test_A2(self, A2):
        t = frozen_rate_table(A2, peak_vector(A2))
        assert t.lambdas == approx([0.25])
        assert t.total == approx(0.25)

    def test_A3(self, A3):
        t = frozen_rate_table(A3, peak_vector(A3))
        assert sorted(t.lambdas) == approx([1 / 12, 1 / 3, 1 / 3])
        assert t.total == approx(0.75, abs=1e-12)

    def test_A10_total(self):
        R = build_root_system("A", 10, 4.0)
        t = frozen_rate_table(R, peak_vector(R))
        assert t.total == approx(45.0 / 4.0, abs=1e-9)

    def test_mirror_invariance_exact(self):
        R = build_root_system("A", 5, 4.0)
        t = frozen_rate_table(R, peak_vector(R))
        # mirror pairing (i,j) -> (N+1-j, N+1-i) on 1-based codes; bitwise
        # equal because the peak vector is exactly antisymmetric
        by_code = {tuple(e.code): e.lam for e in t.entries}
        for (i, j), v in by_code.items():
            assert by_code[(6 - j, 6 - i)] == v

    def test_total_closed_form_field(self, B2):
        t = frozen_rate_table(B2, peak_vector(B2))
        assert t.total_closed_form == approx(1.0)   # |R+|/4 = 4/4
        assert t.total == approx(1.0, abs=1e-9)


class TestPFSpectrum:
    def test_N2(self):
        rep = pf_spectrum(2)
        assert rep.eigenvalues == approx([0.0, -0.5], abs=1e-12)

    def test_N3_full(self):
        rep = pf_spectrum(3)
        assert rep.eigenvalues == approx([0, -0.5, -0.5, -1, -1, -1.5],
                                         abs=1e-9)

    def test_degeneracy_and_minimum(self):
        for N in (2, 3, 4, 5):
            rep = pf_spectrum(N)
            assert rep.half_multiplicity == N - 1
            assert rep.min_eigenvalue == approx(-N * (N - 1) / 4.0, abs=1e-9)
            assert rep.symmetry_residual < 1e-9
            assert abs(rep.eigenvalues[0]) < 1e-12

    def test_size_guard(self):
        with pytest.raises(SizeError):
            pf_spectrum(8)


class TestSuGenerators:
    def test_count_and_zero(self):
        for N in (2, 3, 5):
            J = su_generators(N)
            assert len(J) == N * N
            assert np.all(J[(N, N)] == 0)
            assert len(nonzero_labels(N)) == N * N - 1

    def test_hermitian_traceless(self):
        J = su_generators(3)
        for lab, m in J.items():
            assert np.max(np.abs(m - m.conj().T)) < 1e-15
            assert abs(np.trace(m)) < 1e-15

    def test_trace_orthonormality(self):
        for N in (2, 4):
            J = su_generators(N)
            labs = nonzero_labels(N)
            for a in labs:
                for b in labs:
                    t = np.trace(J[a] @ J[b])
                    assert t == approx(0.5 if a == b else 0.0, abs=1e-14)

    def test_N2_spin_halves(self):
        J = su_generators(2)
        sx = np.array([[0, 1], [1, 0]]) / 2
        sy = np.array([[0, -1j], [0, 1j * 0]])
        assert np.max(np.abs(J[(1, 2)] - sx)) < 1e-15
        assert np.trace(J[(1, 1)] @ J[(1, 1)]) == approx(0.5)

    def test_structure_constants(self):
        labels, mats, f = structure_constants(3)
        assert np.max(np.abs(f + f.transpose(1, 0, 2))) < 1e-12


class TestOperatorIdentities:
    def test_exchange_identity(self):
        for N in (2, 3, 5):
            assert verify_exchange_identity(N) <= 1e-12

    def test_swap_involution(self):
        from dunkl.freezing import _swap_matrix
        for N in (2, 4):
            S = _swap_matrix(N)
            assert np.array_equal(S @ S, np.eye(N * N))

    def test_ladder_commutators(self):
        for N in (2, 3):
            dev_K, dev_L = verify_ladder_commutators(N)
            assert dev_K <= 1e-10
            assert dev_L <= 1e-10

    def test_ladder_shift(self):
        assert ladder_shift_residual(2) <= 1e-9
        assert ladder_shift_residual(3) <= 1e-9

    def test_size_guard(self):
        with pytest.raises(SizeError):
            verify_ladder_commutators(5)


class TestLadderSubspace:
    def test_N2(self):
        rep = verify_ladder_subspace(2)
        assert rep["stay"][(1, 1)] <= 1e-10
        assert rep["eigen_residual"][(1, 1)] <= 1e-9
        assert all(v > 1e-3 for v in rep["leave"].values())

    def test_N3(self):
        rep = verify_ladder_subspace(3)
        assert set(rep["stay"]) == {(1, 1), (2, 2)}
        assert all(v <= 1e-10 for v in rep["stay"].values())
        assert all(v <= 1e-9 for v in rep["eigen_residual"].values())
        assert (1, 2) in rep["leave"]
        assert all(v > 1e-3 for v in rep["leave"].values())
        assert rep["n_lowering"] == 2
        assert len(rep["stay"]) == rep["n_lowering"]
