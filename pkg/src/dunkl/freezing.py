"""Large-coupling limit: peak vectors, frozen rates, the frozen permutation
spectrum, and the exchange/ladder operator identities on tensor-product spin
spaces.

The peak vector z is the chamber minimizer of |x|^2/2 - sum k log(alpha . x);
for family A with unit multiplicities it is the ascending zero set of the
N-th physicists' Hermite polynomial.  Frozen rates are
|alpha|^2 k / (4 (alpha . z)^2) and sum to |R+|/4 for unit multiplicities.

The frozen A-family master operator equals (in the permutation basis) the
spin-exchange chain (1/2) sum_{i<j} P_{ji} / (z_j - z_i)^2 shifted by
-N(N-1)/8; ladder operators built from su(N) generators shift its
eigenvalues by +-1/2, which this module verifies numerically together with
the exchange-operator expansion and the subspace-closure statement that only
the diagonal-label ladders preserve the permutation subspace.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, SizeError
from .jumprates import RateEntry, RateTable, root_code
from .rootsys import RootSystem, gaps

NEWTON_MAX_ITERS = 200
PEAK_RESIDUAL_TOL = 1e-12


# ---------------------------------------------------------------------------
# peak vectors and frozen rates
# ---------------------------------------------------------------------------

@dataclass
class PeakVector:
    z: np.ndarray
    residual: float             # sup-norm of z - sum k alpha/(alpha.z)
    objective: float            # |z|^2/2 - sum k log(alpha.z)


def _objective(R: RootSystem, x: np.ndarray) -> float:
    g = gaps(R, x)
    if np.any(g <= 0.0):
        return np.inf
    return 0.5 * float(x @ x) - float(R.k_vec @ np.log(g))


def _fixed_point_gap(R: RootSystem, x: np.ndarray) -> np.ndarray:
    g = gaps(R, x)
    return x - (R.k_vec / g) @ R.root_matrix


def peak_vector(R: RootSystem) -> PeakVector:
    """Damped Newton minimization of the chamber objective.

    Initialization: sorted standard-normal quantiles (A, then projected onto
    the sum-zero subspace) or an equally spaced positive grid (B), scaled to
    |x| = sqrt(gamma).  The objective is strictly convex on the chamber
    interior, so any interior start converges; ConvergenceError after 200
    iterations.
    """
    from scipy.stats import norm as _norm

    N = R.rank
    if R.family == "A":
        x = _norm.ppf((np.arange(1, N + 1) - 0.5) / N)
        x -= x.mean()
    else:
        x = np.linspace(1.0, N, N)
    x = x / np.linalg.norm(x) * np.sqrt(R.gamma)

    ones = np.ones(N) / np.sqrt(N)
    for _ in range(NEWTON_MAX_ITERS):
        grad = _fixed_point_gap(R, x)
        if R.family == "A":
            grad = grad - (grad @ ones) * ones
        if np.max(np.abs(grad)) <= PEAK_RESIDUAL_TOL:
            break
        H = hessian_at(R, x)
        d = -np.linalg.solve(H, grad)
        if R.family == "A":
            d = d - (d @ ones) * ones
        f0 = _objective(R, x)
        # allow roundoff-level non-decrease: near the optimum the objective
        # comparison is noise-limited while Newton still converges
        ftol = f0 + 1e-12 * (1.0 + abs(f0))
        t = 1.0
        while _objective(R, x + t * d) > ftol and t > 1e-14:
            t /= 2.0
        if t <= 1e-14 and np.max(np.abs(grad)) < 1e-6:
            t = 1.0
        x = x + t * d
    else:
        raise ConvergenceError("peak-vector Newton did not converge")
    if R.family == "A":
        x = 0.5 * (x - x[::-1])    # the A minimizer is exactly antisymmetric
    res = float(np.max(np.abs(_fixed_point_gap(R, x))))
    if res > PEAK_RESIDUAL_TOL:
        raise ConvergenceError(f"peak-vector residual {res:g} above tolerance")
    return PeakVector(z=x, residual=res, objective=_objective(R, x))


def hessian_at(R: RootSystem, x: np.ndarray) -> np.ndarray:
    """I + sum k(zeta) zeta zeta^T / (zeta . x)^2 (objective curvature)."""
    g = gaps(R, x)
    A = R.root_matrix / g[:, None]
    return np.eye(R.rank) + (A * R.k_vec[:, None]).T @ A


def hermite_zeros(N: int) -> np.ndarray:
    """Ascending zeros of the N-th physicists' Hermite polynomial.

    Computed as eigenvalues of the symmetric Jacobi matrix with off-diagonals
    sqrt(m/2); satisfies z_i = sum_{j != i} 1/(z_i - z_j) and
    z_i = sum_{j != i} 2/(z_i - z_j)^3.
    """
    if not 1 <= N <= 50:
        raise SizeError("hermite_zeros supports 1 <= N <= 50")
    if N == 1:
        return np.array([0.0])
    off = np.sqrt(np.arange(1, N) / 2.0)
    J = np.diag(off, 1) + np.diag(off, -1)
    z = np.sort(np.linalg.eigvalsh(J))
    return np.sort(0.5 * (z - z[::-1]))    # zeros are odd-symmetric; make it exact


def frozen_rate_table(R: RootSystem, pv: PeakVector) -> RateTable:
    """Deterministic limiting rates |alpha|^2 k / (4 (alpha . z)^2)."""
    g = gaps(R, pv.z)
    lams = R.norm_sq_vec * R.k_vec / (4.0 * g * g)
    entries = [RateEntry(i, root_code(r, R.rank), float(lams[i]), 0.0, 0)
               for i, r in enumerate(R.positive_roots)]
    unit_k = all(abs(r.k - 1.0) <= 1e-12 for r in R.positive_roots)
    return RateTable(
        family=R.family, N=R.rank, beta=float("inf"), k=R.k_by_orbit,
        origin=np.zeros(R.rank), t_ref=1.0, entries=entries,
        total=float(lams.sum()), total_stderr=0.0,
        total_closed_form=(R.n_roots / 4.0) if unit_k else None,
        sampler_tag="frozen", seed=0)


# ---------------------------------------------------------------------------
# frozen permutation spectrum (independent of the weylgroup/mastereq path)
# ---------------------------------------------------------------------------

@dataclass
class PFSpectrumReport:
    N: int
    rates: np.ndarray             # 1/(2 (z_j - z_i)^2) in pair order i<j
    eigenvalues: np.ndarray       # descending
    half_multiplicity: int        # multiplicity of eigenvalue -1/2
    min_eigenvalue: float
    symmetry_residual: float      # multiset symmetry about -N(N-1)/8
    permutations: list            # enumeration order used for the matrix
    eigenvectors: np.ndarray


def pf_spectrum(N: int, tol: float = 1e-9) -> PFSpectrumReport:
    """Spectrum of the frozen exchange operator on S_N.

    Built directly from permutation tuples and Hermite-zero gaps, so it is an
    independent check of the generic master-operator path.  N <= 7.
    """
    if N > 7:
        raise SizeError("pf_spectrum supports N <= 7 (|S_N| <= 5040)")
    z = hermite_zeros(N)
    perms = list(itertools.permutations(range(N)))
    index = {p: i for i, p in enumerate(perms)}
    nW = len(perms)
    M = np.zeros((nW, nW))
    rates = []
    Lam = 0.0
    for i in range(N):
        for j in range(i + 1, N):
            w = 1.0 / (2.0 * (z[j] - z[i]) ** 2)
            rates.append(w)
            Lam += w
            for p, pi in index.items():
                q = list(p)
                q[i], q[j] = q[j], q[i]      # right multiplication by (i j)
                M[pi, index[tuple(q)]] += w
    M[np.arange(nW), np.arange(nW)] -= Lam
    w_, V = np.linalg.eigh(M)
    ev = w_[::-1]
    V = V[:, ::-1]
    half = int(np.sum(np.abs(ev + 0.5) <= tol))
    sym = float(np.max(np.abs(np.sort(ev) - np.sort(-2 * Lam - ev))))
    return PFSpectrumReport(
        N=N, rates=np.array(rates), eigenvalues=ev,
        half_multiplicity=half, min_eigenvalue=float(ev[-1]),
        symmetry_residual=sym, permutations=perms, eigenvectors=V)


# ---------------------------------------------------------------------------
# su(N) generators and tensor-space identities
# ---------------------------------------------------------------------------

def su_generators(N: int) -> dict:
    """The (j, l)-labeled hermitian generators on one N-level site.

    Keys run over 1 <= j, l <= N; the (N, N) entry is the zero matrix and the
    remaining N^2 - 1 satisfy Tr[J_a J_b] = delta_{ab}/2.
    """
    if not 2 <= N <= 8:
        raise SizeError("su_generators supports 2 <= N <= 8")
    J = {}
    for j in range(1, N + 1):
        for l in range(1, N + 1):
            m = np.zeros((N, N), dtype=complex)
            if j < l:
                m[j - 1, l - 1] = 0.5
                m[l - 1, j - 1] = 0.5
            elif l < j:
                m[l - 1, j - 1] = 0.5j
                m[j - 1, l - 1] = -0.5j
            elif j <= N - 1:
                c = 1.0 / math.sqrt(2 * j * (j + 1))
                for mm in range(j):
                    m[mm, mm] = c
                m[j, j] = -j * c
            J[(j, l)] = m
    return J


def nonzero_labels(N: int) -> list:
    return [(j, l) for j in range(1, N + 1) for l in range(1, N + 1)
            if not (j == l == N)]


def structure_constants(N: int):
    """f[a, b, c] with [J_a, J_b] = sum_c f[a,b,c] J_c over nonzero labels.

    Computed as 2 Tr([J_a, J_b] J_c); antisymmetry in the first two labels
    and the expansion identity are asserted to 1e-12.
    """
    J = su_generators(N)
    labels = nonzero_labels(N)
    n = len(labels)
    mats = np.array([J[a] for a in labels])
    f = np.zeros((n, n, n), dtype=complex)
    for i1 in range(n):
        for i2 in range(n):
            C = mats[i1] @ mats[i2] - mats[i2] @ mats[i1]
            f[i1, i2] = 2.0 * np.array([np.trace(C @ mats[c]) for c in range(n)])
    anti = np.max(np.abs(f + f.transpose(1, 0, 2)))
    if anti > 1e-12:
        raise AssertionError(f"structure constants not antisymmetric: {anti}")
    rec = np.einsum("abc,cij->abij", f, mats)
    comm = np.einsum("aij,bjk->abik", mats, mats)
    comm = comm - comm.transpose(1, 0, 2, 3)
    dev = np.max(np.abs(rec - comm))
    if dev > 1e-12:
        raise AssertionError(f"structure-constant expansion off by {dev}")
    return labels, mats, f


def _site_embed(op: np.ndarray, site: int, nsites: int, dim: int) -> np.ndarray:
    left = np.eye(dim ** site)
    right = np.eye(dim ** (nsites - site - 1))
    return np.kron(np.kron(left, op), right)


def _pair_embed(op2: np.ndarray, m: int, n: int, nsites: int,
                dim: int) -> np.ndarray:
    """Embed a two-site operator (first factor on site m, second on site n)."""
    rest = [k for k in range(nsites) if k not in (m, n)]
    order = [m, n] + rest
    big = np.kron(op2, np.eye(dim ** (nsites - 2), dtype=op2.dtype))
    big = big.reshape([dim] * nsites + [dim] * nsites)
    inv = [order.index(s) for s in range(nsites)]
    big = big.transpose(inv + [nsites + i for i in inv])
    return big.reshape(dim ** nsites, dim ** nsites)


def _swap_matrix(N: int) -> np.ndarray:
    S = np.zeros((N * N, N * N))
    for a in range(N):
        for b in range(N):
            S[b * N + a, a * N + b] = 1.0
    return S


def verify_exchange_identity(N: int) -> float:
    """Max deviation of P = (1/N) I (x) I + 2 sum_{j,l} J^{(jl)} (x) J^{(jl)}
    from the two-site swap."""
    if not 2 <= N <= 8:
        raise SizeError("verify_exchange_identity supports 2 <= N <= 8")
    J = su_generators(N)
    rhs = np.eye(N * N, dtype=complex) / N
    for lab, m in J.items():
        rhs += 2.0 * np.kron(m, m)
    return float(np.max(np.abs(rhs - _swap_matrix(N))))


def _chain_operators(N: int):
    """(M, K[(j,l)], L[(j,l)]) on the N-site chain of N-level sites."""
    z = hermite_zeros(N)
    labels, mats, f = structure_constants(N)
    dim = N ** N
    swap = _swap_matrix(N)
    M = np.zeros((dim, dim), dtype=complex)
    for i in range(N):
        for j in range(i + 1, N):
            M += _pair_embed(swap, i, j, N, N) / (2.0 * (z[j] - z[i]) ** 2)

    site_J = [[_site_embed(mats[a], m, N, N) for a in range(len(labels))]
              for m in range(N)]

    K = {}
    L = {}
    # two-site kernels G^{(jl)} = sum_{ab} f[jl,a,b] J_a (x) J_b
    for idx, lab in enumerate(labels):
        Kop = np.zeros((dim, dim), dtype=complex)
        for m in range(N):
            Kop += z[m] * site_J[m][idx]
        K[lab] = Kop
        G = np.zeros((N * N, N * N), dtype=complex)
        fa = f[idx]
        nz = np.argwhere(np.abs(fa) > 1e-14)
        for a, b in nz:
            G += fa[a, b] * np.kron(mats[a], mats[b])
        Lop = np.zeros((dim, dim), dtype=complex)
        for m in range(N):
            for n_ in range(N):
                if m == n_:
                    continue
                Lop += _pair_embed(G, m, n_, N, N) / (z[m] - z[n_])
        L[lab] = Lop
    return M, K, L, labels


def verify_ladder_commutators(N: int):
    """(dev_K, dev_L): worst deviations of [M, K] - L/2 and [M, L] - K/2."""
    if N not in (2, 3, 4):
        raise SizeError("ladder verification supports N in {2, 3, 4}")
    M, K, L, labels = _chain_operators(N)
    dev_K = 0.0
    dev_L = 0.0
    for lab in labels:
        dev_K = max(dev_K, float(np.max(np.abs(
            M @ K[lab] - K[lab] @ M - 0.5 * L[lab]))))
        dev_L = max(dev_L, float(np.max(np.abs(
            M @ L[lab] - L[lab] @ M - 0.5 * K[lab]))))
    return dev_K, dev_L


def ladder_shift_residual(N: int, label=None) -> float:
    """Residual of M (K +- L)|phi> = (r +- 1/2)(K +- L)|phi> on an eigenvector."""
    M, K, L, labels = _chain_operators(N)
    lab = label or labels[0]
    w, V = np.linalg.eigh(M)
    phi = V[:, -1]
    r = w[-1]
    worst = 0.0
    for sgn in (1.0, -1.0):
        v = (K[lab] + sgn * L[lab]) @ phi
        if np.linalg.norm(v) < 1e-12:
            continue
        worst = max(worst, float(np.linalg.norm(M @ v - (r + sgn * 0.5) * v)
                                 / np.linalg.norm(v)))
    return worst


def _perm_flat_index(perm, N: int) -> int:
    """|rho> = |rho(0)>_0 ... |rho(N-1)>_{N-1} as base-N digits, site 0 first."""
    idx = 0
    for v in perm:
        idx = idx * N + v
    return idx


def verify_ladder_subspace(N: int) -> dict:
    """Which lowering operators keep the permutation subspace invariant.

    Applies K - L to the uniform permutation vector.  Diagonal labels (j = j)
    must stay in the subspace (relative residual <= 1e-10) and project to an
    eigenvector of the frozen master matrix at -1/2; off-diagonal labels must
    leave it (residual > 1e-3).
    """
    if N not in (2, 3, 4):
        raise SizeError("subspace verification supports N in {2, 3, 4}")
    M, K, L, labels = _chain_operators(N)
    perms = list(itertools.permutations(range(N)))
    flat = np.array([_perm_flat_index(p, N) for p in perms])
    dim = N ** N
    u = np.zeros(dim)
    u[flat] = 1.0 / math.sqrt(len(perms))

    M0 = None  # lazily built |W| x |W| frozen master matrix
    report = {"stay": {}, "leave": {}, "eigen_residual": {},
              "n_lowering": N - 1}
    for lab in labels:
        v = (K[lab] - L[lab]) @ u
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            continue
        inside = np.zeros(dim, dtype=complex)
        inside[flat] = v[flat]
        res = float(np.linalg.norm(v - inside) / nrm)
        j, l = lab
        if j == l:
            report["stay"][lab] = res
            # pull back to a function on S_N and test the -1/2 eigenvalue
            phi = v[flat]
            z = hermite_zeros(N)
            nW = len(perms)
            if M0 is None:
                index = {p: i for i, p in enumerate(perms)}
                M0 = np.zeros((nW, nW))
                Lam = 0.0
                for i in range(N):
                    for jj in range(i + 1, N):
                        wgt = 1.0 / (2.0 * (z[jj] - z[i]) ** 2)
                        Lam += wgt
                        for p, pi in index.items():
                            q = list(p)
                            q[i], q[jj] = q[jj], q[i]
                            M0[pi, index[tuple(q)]] += wgt
                M0[np.arange(nW), np.arange(nW)] -= Lam
            resid = np.linalg.norm(M0 @ phi + 0.5 * phi) / np.linalg.norm(phi)
            report["eigen_residual"][lab] = float(resid)
        else:
            report["leave"][lab] = res
    return report
