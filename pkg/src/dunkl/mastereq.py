"""Master operator on the group, its spectrum, the exact power-law solution
for an origin start, chain simulation, and numeric integration of the general
inhomogeneous equation.

The operator is
    M[tau, nu] = sum_a lambda_a [nu = tau sigma_a] - Lambda [nu = tau],
built from an origin rate table and the right-multiplication index maps.
It is symmetric (right multiplication by a reflection is an involution),
has zero column sums, is negative semidefinite with a one-dimensional kernel
spanned by the uniform vector, and its spectrum is symmetric about -Lambda
with minimum -2 Lambda on the signature vector.

For an origin start the rates scale exactly as lambda/t, so under
s = log(t/t0) the chain is a homogeneous CTMC with generator M and
    P(t) = 1/|W| + sum_i K_i (t/t0)^{r_i} phi_i .
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (InsufficientRangeError, MismatchError, StiffnessError)
from .jumprates import RateTable
from .radialsde import philox_stream
from .weylgroup import GroupTable

EIG_RESIDUAL_TOL = 1e-10
GROUP_TOL = 1e-8


@dataclass
class MasterOperator:
    dim: int
    matrix: np.ndarray          # (|W|, |W|), units 1/time at t = t_ref
    lambdas: np.ndarray         # per-root rates the matrix was built from
    Lambda: float
    right_mult: np.ndarray
    family: str
    N: int
    beta: float


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray     # descending, r_0 = 0 first
    eigenvectors: np.ndarray    # columns, orthonormal, aligned with eigenvalues
    groups: list                # index arrays of (numerically) equal eigenvalues
    max_residual: float
    Lambda: float

    @property
    def r_min(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def r1(self) -> float:
        """Least negative nonzero exponent."""
        return float(self.eigenvalues[1])


@dataclass
class DistributionOnW:
    p: np.ndarray
    time: float

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)

    def distance_to_uniform(self) -> float:
        return float(np.max(np.abs(self.p - 1.0 / len(self.p))))


def build_master(rates: RateTable, table: GroupTable) -> MasterOperator:
    """Assemble the dense symmetric generator from an origin rate table."""
    if rates.family != table.family or rates.N != table.rank:
        raise MismatchError(
            f"rate table is {rates.family}{rates.N}, group table is "
            f"{table.family}{table.rank}")
    if len(rates.entries) != table.right_mult.shape[0]:
        raise MismatchError("root count mismatch between rates and group table")
    lams = rates.lambdas
    nW = table.order
    M = np.zeros((nW, nW))
    idx = np.arange(nW)
    for a, lam in enumerate(lams):
        M[idx, table.right_mult[a]] += lam
    Lam = float(lams.sum())
    M[idx, idx] -= Lam
    return MasterOperator(dim=nW, matrix=M, lambdas=lams, Lambda=Lam,
                          right_mult=table.right_mult, family=rates.family,
                          N=rates.N, beta=rates.beta)


def spectrum(op: MasterOperator) -> SpectrumResult:
    """Dense symmetric eigendecomposition, eigenvalues descending."""
    w, V = np.linalg.eigh(op.matrix)
    order = np.argsort(w)[::-1]
    w = w[order]
    V = V[:, order]
    # pin the sign convention of the equilibrium vector
    if V[:, 0].sum() < 0:
        V[:, 0] = -V[:, 0]
    res = np.max(np.abs(op.matrix @ V - V * w))
    groups = []
    start = 0
    tol = GROUP_TOL * max(1.0, abs(w[-1]))
    for i in range(1, len(w) + 1):
        if i == len(w) or abs(w[i] - w[start]) > tol:
            groups.append(np.arange(start, i))
            start = i
    return SpectrumResult(eigenvalues=w, eigenvectors=V, groups=groups,
                          max_residual=float(res), Lambda=op.Lambda)


def uniform_distribution(nW: int, time: float = 0.0) -> DistributionOnW:
    return DistributionOnW(np.full(nW, 1.0 / nW), time)


def delta_distribution(nW: int, index: int = 0,
                       time: float = 0.0) -> DistributionOnW:
    p = np.zeros(nW)
    p[index] = 1.0
    return DistributionOnW(p, time)


def solve_power_law(S: SpectrumResult, P0: DistributionOnW, t0: float,
                    t: float) -> DistributionOnW:
    """P(t) = sum_i K_i (t/t0)^{r_i} phi_i with K_i = phi_i . P0."""
    if not (t >= t0 > 0):
        raise ValueError("need t >= t0 > 0")
    K = S.eigenvectors.T @ P0.p
    g = (t / t0) ** S.eigenvalues
    return DistributionOnW(S.eigenvectors @ (K * g), t)


def simulate_chain(op: MasterOperator, P0: DistributionOnW, t0: float,
                   T: float, replicas: int, seed: int = 0,
                   n_eval: int = 8):
    """Monte Carlo marginals of the origin-start chain at geometric times.

    Under s = log(t/t0) the chain is homogeneous with generator M; the total
    rate is the constant Lambda, so event times are a Poisson stream and each
    event applies a root drawn with probability lambda_a / Lambda.
    Returns (times, emp) with emp[j] the empirical distribution at times[j].
    """
    rng = philox_stream(seed)
    nW = op.dim
    S = np.log(T / t0)
    t_eval = t0 * np.exp(np.linspace(0.0, S, n_eval))
    state = rng.choice(nW, size=replicas, p=np.clip(P0.p, 0, None) / P0.p.sum())
    emp = np.empty((n_eval, nW))
    if S <= 0:
        c = np.bincount(state, minlength=nW) / replicas
        return t_eval, [DistributionOnW(c, t) for t in t_eval]

    nev = rng.poisson(op.Lambda * S, size=replicas)
    total = int(nev.sum())
    rep = np.repeat(np.arange(replicas), nev)
    s_ev = rng.random(total) * S
    roots = rng.choice(len(op.lambdas), size=total,
                       p=op.lambdas / op.Lambda)
    order = np.argsort(s_ev, kind="stable")
    rep, s_ev, roots = rep[order], s_ev[order], roots[order]

    s_grid = np.linspace(0.0, S, n_eval)
    k = 0
    for j, s_stop in enumerate(s_grid):
        while k < total and s_ev[k] <= s_stop:
            state[rep[k]] = op.right_mult[roots[k], state[rep[k]]]
            k += 1
        emp[j] = np.bincount(state, minlength=nW) / replicas
    return t_eval, [DistributionOnW(emp[j], t_eval[j])
                    for j in range(n_eval)]


def integrate_inhomogeneous(table: GroupTable, rate_fn, P0: DistributionOnW,
                            t0: float, T: float, t_eval=None,
                            forcing=None, rtol: float = 1e-10,
                            atol: float = 1e-12):
    """Integrate dP/dt = M(rate_fn(t)) P [+ forcing(t)] on [t0, T].

    rate_fn(t) returns the per-root rates at time t (positive, continuous);
    forcing, if given, returns a zero-sum vector added to the right-hand side
    (the O(t^-2)-forcing form of the start-point correction).  Adaptive
    Runge-Kutta (DOP853) at per-step tolerance 1e-10; StiffnessError if the
    integrator gives up.  Conservation holds to 1e-9.
    """
    rm = table.right_mult
    nW = table.order

    def rhs(t, P):
        lams = rate_fn(t)
        out = -lams.sum() * P
        for a, lam in enumerate(lams):
            out += lam * P[rm[a]]
        if forcing is not None:
            out = out + forcing(t)
        return out

    if t_eval is None:
        t_eval = np.geomspace(t0, T, 64)
    sol = solve_ivp(rhs, (t0, T), P0.p, t_eval=t_eval, method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise StiffnessError(sol.message)
    dists = [DistributionOnW(sol.y[:, j], sol.t[j])
             for j in range(sol.y.shape[1])]
    worst = max(abs(d.p.sum() - 1.0) for d in dists)
    if worst > 1e-9:
        raise StiffnessError(f"conservation violated: |sum P - 1| = {worst:g}")
    return sol.t, dists


@dataclass
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    n_tail: int

    @property
    def ci95(self):
        return (self.slope - 1.96 * self.stderr,
                self.slope + 1.96 * self.stderr)


def fit_relaxation_exponent(times, series, tail_fraction: float = 0.5
                            ) -> ExponentFit:
    """Least-squares slope of log(sup-distance to uniform) vs log t.

    `series` may be DistributionOnW objects or precomputed distances.
    Needs at least two decades in t; a zero signal is rejected.
    """
    times = np.asarray(times, dtype=float)
    if hasattr(series[0], "distance_to_uniform"):
        vals = np.array([d.distance_to_uniform() for d in series])
    else:
        vals = np.asarray(series, dtype=float)
    if times.max() / times.min() < 100.0:
        raise InsufficientRangeError("series must span >= 2 decades in t")
    if np.max(vals) < 1e-14:
        raise InsufficientRangeError("zero signal: series is already uniform")
    n = len(times)
    n_tail = max(int(np.ceil(tail_fraction * n)), 3)
    lt = np.log(times[-n_tail:])
    lv = np.log(vals[-n_tail:])
    A = np.stack([lt, np.ones_like(lt)], axis=1)
    coef, res, *_ = np.linalg.lstsq(A, lv, rcond=None)
    slope, intercept = coef
    dof = max(n_tail - 2, 1)
    sigma2 = (res[0] / dof) if len(res) else 0.0
    cov = sigma2 * np.linalg.inv(A.T @ A)
    return ExponentFit(slope=float(slope), stderr=float(np.sqrt(cov[0, 0])),
                       intercept=float(intercept), n_tail=n_tail)
