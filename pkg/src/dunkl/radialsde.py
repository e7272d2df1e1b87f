"""Radial dynamics in the Weyl chamber: Euler-Maruyama paths with singular
repulsive drift, and exact static samplers for the t=1 law started at the
origin (density proportional to exp(-|x|^2/2) w(x) on the chamber).

The static samplers are tridiagonal random-matrix models:
  * family A: symmetric tridiagonal with N(0,2) diagonal and chi_{beta k (N-m)}
    off-diagonals; eigenvalues/sqrt(2) carry the target density with
    Vandermonde exponent beta*k.
  * family B: bidiagonal Laguerre-type factor; the square roots of the
    eigenvalues of B B^T carry the target density with parameters matched to
    (k_short, k_long).
A random-walk Metropolis fallback covers anything else.

RNG is counter-based (Philox); replica blocks get derived streams keyed by
(seed, block index) so ensembles are reproducible under any scheduling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SamplerUnavailable, StepError, WallError
from .rootsys import RootSystem, chamber_contains, gaps

MAX_HALVINGS = 20
ENSEMBLE_BLOCK = 8192


def philox_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for (seed, stream); counter-based, reproducible."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                    np.uint64(stream & 0xFFFFFFFFFFFFFFFF)])
    return np.random.Generator(np.random.Philox(key=key))


def default_dt(beta: float) -> float:
    """Step size default 1e-4 * min(1, 1/beta); drift stiffness grows with beta."""
    return 1e-4 * min(1.0, 1.0 / beta)


@dataclass
class RadialPath:
    times: np.ndarray
    states: np.ndarray          # (n_saved, N), all inside the chamber
    beta: float
    x0: np.ndarray

    def to_csv_rows(self):
        for t, x in zip(self.times, self.states):
            yield [t, *x]


@dataclass
class StaticSample:
    points: np.ndarray          # (n, N), sorted into the chamber
    beta: float
    sampler_tag: str            # "tridiagonal" | "mcmc"
    acceptance_rate: float | None = None


def drift(R: RootSystem, x) -> np.ndarray:
    """(beta/2) sum_alpha k(alpha) alpha / (alpha . x); WallError on a wall."""
    x = np.asarray(x, dtype=float)
    g = gaps(R, x)
    if np.any(g == 0.0):
        raise WallError("drift undefined on a chamber wall")
    return (R.beta / 2.0) * ((R.k_vec / g) @ R.root_matrix)


def _drift_block(R: RootSystem, x: np.ndarray) -> np.ndarray:
    g = x @ R.root_matrix.T
    return (R.beta / 2.0) * ((R.k_vec / g) @ R.root_matrix)


def _interior(R: RootSystem, x: np.ndarray) -> np.ndarray:
    """Boolean mask of rows strictly inside the chamber."""
    return np.all(x @ R.root_matrix.T > 0.0, axis=1)


def _advance_one(R: RootSystem, x: np.ndarray, dt: float,
                 rng: np.random.Generator, depth: int = 0) -> np.ndarray:
    """One Euler step for a single state, halving dt on chamber exit."""
    if depth > MAX_HALVINGS:
        raise StepError(f"state not interior after {MAX_HALVINGS} halvings")
    prop = x + drift(R, x) * dt + np.sqrt(dt) * rng.standard_normal(x.shape)
    if np.all(gaps(R, prop) > 0.0):
        return prop
    half = _advance_one(R, x, dt / 2.0, rng, depth + 1)
    return _advance_one(R, half, dt / 2.0, rng, depth + 1)


def _advance_block(R: RootSystem, x: np.ndarray, dt: float,
                   rng: np.random.Generator) -> np.ndarray:
    """One Euler step for a block of states; stragglers re-stepped individually."""
    prop = x + _drift_block(R, x) * dt \
        + np.sqrt(dt) * rng.standard_normal(x.shape)
    ok = _interior(R, prop)
    if not ok.all():
        for i in np.flatnonzero(~ok):
            prop[i] = _advance_one(R, x[i], dt / 2.0, rng, 1)
            prop[i] = _advance_one(R, prop[i], dt / 2.0, rng, 1)
    return prop


def simulate_radial(R: RootSystem, x0, T: float, dt: float | None = None,
                    seed: int = 0, save_stride: int = 1) -> RadialPath:
    """Euler-Maruyama path of the radial process on [0, T].

    The exact process never hits the walls for beta*k >= 1, so a proposed step
    that exits the chamber is retried with halved dt (up to 20 halvings,
    StepError beyond).  Bit-exact reproducible for a fixed seed and platform.
    """
    x0 = np.asarray(x0, dtype=float)
    _check_start(R, x0)
    if dt is None:
        dt = default_dt(R.beta)
    rng = philox_stream(seed)
    times = [0.0]
    states = [x0.copy()]
    if T <= 0.0:
        return RadialPath(np.array(times), np.array(states), R.beta, x0)

    nsteps = int(np.ceil(T / dt))
    x = x0.copy()
    t = 0.0
    for n in range(nsteps):
        step = min(dt, T - t)
        if n == 0 and not np.any(x0):
            # origin start: the first increment has the exact scaled static law
            x = np.sqrt(step) * _sample_static_matrix(R, 1, rng)[0]
        else:
            x = _advance_one(R, x, step, rng)
        t += step
        if (n + 1) % save_stride == 0 or n == nsteps - 1:
            times.append(t)
            states.append(x.copy())
    return RadialPath(np.array(times), np.array(states), R.beta, x0)


def _check_start(R: RootSystem, x0: np.ndarray):
    if not chamber_contains(R, x0, tol=0.0):
        raise WallError("x0 must lie in the closed Weyl chamber")
    if np.any(gaps(R, x0) == 0.0) and np.any(x0):
        raise WallError("wall starts other than the origin are not supported")


def simulate_ensemble(R: RootSystem, x0, T: float, dt: float,
                      nreplicas: int, seed: int = 0,
                      threads: int = 1) -> np.ndarray:
    """Endpoints X(T) of nreplicas independent paths started at x0.

    Replicas run in blocks with derived (seed, block) streams and are merged
    in index order, so the result is independent of block scheduling and of
    the thread count.
    """
    x0 = np.asarray(x0, dtype=float)
    _check_start(R, x0)
    out = np.empty((nreplicas, R.rank))
    nsteps = int(np.ceil(T / dt))
    from_origin = not np.any(x0)

    def run_block(b0: int):
        b1 = min(b0 + ENSEMBLE_BLOCK, nreplicas)
        rng = philox_stream(seed, b0 // ENSEMBLE_BLOCK + 1)
        x = np.tile(x0, (b1 - b0, 1))
        t = 0.0
        for n in range(nsteps):
            step = min(dt, T - t)
            if n == 0 and from_origin:
                x = np.sqrt(step) * _sample_static_matrix(R, b1 - b0, rng)
            else:
                x = _advance_block(R, x, step, rng)
            t += step
        out[b0:b1] = x

    starts = range(0, nreplicas, ENSEMBLE_BLOCK)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_block, starts))
    else:
        for b0 in starts:
            run_block(b0)
    return out


# ---------------------------------------------------------------------------
# static sampling of the t=1, x0=0 law
# ---------------------------------------------------------------------------

def _sample_tridiagonal_A(N: int, bk: float, n: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Eigenvalues/sqrt(2) of the Hermite-type tridiagonal with Vandermonde
    exponent bk; rows come out sorted ascending."""
    diag = rng.standard_normal((n, N)) * np.sqrt(2.0)
    off = np.sqrt(rng.chisquare(bk * np.arange(N - 1, 0, -1), size=(n, N - 1)))
    if N == 2:
        a, c, o = diag[:, 0], diag[:, 1], off[:, 0]
        h = 0.5 * (a + c)
        d = np.sqrt(0.25 * (a - c) ** 2 + o ** 2)
        lam = np.stack([h - d, h + d], axis=1)
    else:
        M = np.zeros((n, N, N))
        idx = np.arange(N)
        M[:, idx, idx] = diag
        M[:, idx[:-1], idx[:-1] + 1] = off
        M[:, idx[:-1] + 1, idx[:-1]] = off
        lam = np.linalg.eigvalsh(M)
    return lam / np.sqrt(2.0)


def _sample_tridiagonal_B(N: int, beta: float, ks: float, kl: float, n: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Square roots of Laguerre-type B B^T eigenvalues, sorted ascending.

    In lam = x^2 the target is prod |D(lam)|^(beta kl) prod lam^((beta ks-1)/2)
    e^{-sum lam / 2}, i.e. Laguerre with Vandermonde exponent bl = beta*kl and
    lam-power a - bl(N-1)/2 - 1 with a = (beta ks + 1)/2 + bl (N-1)/2.
    """
    bl = beta * kl
    a = (beta * ks + 1.0) / 2.0 + (bl / 2.0) * (N - 1)
    dof_d = 2.0 * a - bl * np.arange(N)
    d = np.sqrt(rng.chisquare(dof_d, size=(n, N)))
    B = np.zeros((n, N, N))
    idx = np.arange(N)
    B[:, idx, idx] = d
    if N > 1:
        dof_s = bl * np.arange(N - 1, 0, -1)
        s = np.sqrt(rng.chisquare(dof_s, size=(n, N - 1)))
        B[:, idx[1:], idx[:-1]] = s
    W = B @ np.transpose(B, (0, 2, 1))
    lam = np.linalg.eigvalsh(W)
    lam[lam < 0.0] = 0.0
    return np.sqrt(lam)


def _sample_mcmc(R: RootSystem, n: int, rng: np.random.Generator,
                 burn_in: int = 1000, thin: int = 10,
                 n_chains: int = 256):
    """Random-walk Metropolis on the chamber, log-density log w - |x|^2/2.

    Proposal scale 0.3/sqrt(N); proposals outside the open chamber are
    rejected outright (density zero there).
    """
    N = R.rank
    scale = 0.3 / np.sqrt(N)
    if R.family == "A":
        x = np.tile(np.linspace(-1.0, 1.0, N), (n_chains, 1))
    else:
        x = np.tile(np.linspace(1.0, N, N) / np.sqrt(N), (n_chains, 1))

    def logpi(pts):
        g = pts @ R.root_matrix.T
        bad = np.any(g <= 0.0, axis=1)
        out = np.full(len(pts), -np.inf)
        okr = ~bad
        if okr.any():
            out[okr] = (np.log(g[okr]) @ (R.beta * R.k_vec)
                        - 0.5 * np.sum(pts[okr] ** 2, axis=1))
        return out

    lp = logpi(x)
    accepted = 0
    proposed = 0
    per_chain = -(-n // n_chains)       # ceil
    keep = []
    total_iters = burn_in + per_chain * thin
    for it in range(total_iters):
        prop = x + scale * rng.standard_normal(x.shape)
        lp_new = logpi(prop)
        u = rng.random(n_chains)
        acc = np.log(u) < (lp_new - lp)
        x[acc] = prop[acc]
        lp[acc] = lp_new[acc]
        if it >= burn_in:
            accepted += int(acc.sum())
            proposed += n_chains
            if (it - burn_in) % thin == thin - 1:
                keep.append(x.copy())
    pts = np.concatenate(keep, axis=0)[:n]
    return pts, accepted / max(proposed, 1)


def sample_static(R: RootSystem, n: int, seed: int = 0,
                  method: str = "auto") -> StaticSample:
    """n iid draws from the time-1 law started at the origin.

    method: "auto" prefers the tridiagonal backend, "mcmc" forces the
    Metropolis fallback.  If no matrix model matches the configuration,
    falls back to MCMC with a warning.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = philox_stream(seed)
    if method not in ("auto", "tridiagonal", "mcmc"):
        raise ValueError(f"unknown method {method!r}")
    if method != "mcmc":
        try:
            pts = _sample_static_matrix(R, n, rng)
            return StaticSample(pts, R.beta, "tridiagonal")
        except SamplerUnavailable as e:
            if method == "tridiagonal":
                raise
            warnings.warn(f"tridiagonal sampler unavailable ({e}); "
                          "falling back to MCMC")
    pts, acc = _sample_mcmc(R, n, rng)
    pts = np.sort(pts, axis=1) if R.family == "A" else np.sort(np.abs(pts), axis=1)
    return StaticSample(pts, R.beta, "mcmc", acceptance_rate=acc)


def _sample_static_matrix(R: RootSystem, n: int,
                          rng: np.random.Generator) -> np.ndarray:
    kmap = R.k_by_orbit
    if R.family == "A":
        return _sample_tridiagonal_A(R.rank, R.beta * kmap["a"], n, rng)
    if R.family == "B":
        return _sample_tridiagonal_B(R.rank, R.beta, kmap["short"],
                                     kmap.get("long", 1.0), n, rng)
    raise SamplerUnavailable(f"no matrix model for family {R.family!r}")


def calibration_moment(R: RootSystem) -> float:
    """Exact E|X|^2 of the static law: N + beta * sum_alpha k(alpha)."""
    return R.rank + R.beta * float(np.sum(R.k_vec))
