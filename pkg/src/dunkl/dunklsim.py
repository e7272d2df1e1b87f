"""The coupled process: radial diffusion plus root-labeled jumps.

Between events the state follows the radial SDE; an event along the chamber
root xi occurs with intensity beta |xi|^2 k(xi) / (4 (xi . X)^2) evaluated on
the radial state, and the group variable is right-multiplied by sigma_xi.
Per-step Bernoulli thinning is used with adaptive sub-stepping so that the
per-substep jump probability stays below 0.1.

Counting statistics over a window, and the per-particle total rate used in
the bulk-limit experiment, live here too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import RegimeError, WallError
from .jumprates import (RateTable, estimate_rates_from, rate_integrand_matrix,
                        total_rate_closed_form)
from .radialsde import (RadialPath, _advance_block, _advance_one, default_dt,
                        philox_stream, sample_static)
from .rootsys import RootSystem, build_root_system, gaps
from .weylgroup import GroupTable, compose_ps, lex_rank, reflection_as_element

MAX_JUMP_PROB = 0.1
BULK_C = {"A": 8.0, "B": 4.0}


@dataclass
class JumpTrajectory:
    x0: np.ndarray
    events: list            # (time, root_id), strictly increasing times
    group_path: list        # group index after each event; [0] prepended
    group_elements: list    # raw (perm, signs) aligned with group_path
    T_final: float

    @property
    def n_events(self) -> int:
        return len(self.events)

    def group_at(self, t: float):
        """(index, (perm, signs)) of rho(t)."""
        idx, ps = self.group_path[0], self.group_elements[0]
        for (s, _), g, e in zip(self.events, self.group_path[1:],
                                self.group_elements[1:]):
            if s <= t:
                idx, ps = g, e
            else:
                break
        return idx, ps


@dataclass
class JumpCountRecord:
    grid: np.ndarray        # times, grid[0] = window start
    counts: np.ndarray      # (nreplicas, len(grid)) cumulative since grid[0]
    nreplicas: int


def simulate_dunkl(R: RootSystem, table: GroupTable | None, x0, T: float,
                   dt: float | None = None, seed: int = 0,
                   save_stride: int = 1):
    """Simulate radial path and jump chain on [0, T] from x0 (chamber interior).

    Returns (RadialPath, JumpTrajectory).  The chamber-coordinate root xi is
    drawn with probability proportional to its intensity at the pre-step
    state, and the group variable is advanced by right multiplication.
    A GroupTable is optional: without one (needed for N where |W| exceeds the
    enumeration cap) the element is tracked as a raw (perm, signs) pair and
    indices are lexicographic ranks.
    """
    x0 = np.asarray(x0, dtype=float)
    if np.any(gaps(R, x0) <= 0.0):
        raise WallError("x0 must be strictly inside the chamber")
    if dt is None:
        dt = default_dt(R.beta)
    rng = philox_stream(seed)

    N = R.rank
    identity = (tuple(range(N)), (1,) * N)
    refl = [reflection_as_element(r, N) for r in R.positive_roots]

    times = [0.0]
    states = [x0.copy()]
    events = []
    group_path = [0]
    group_elements = [identity]
    g_index = 0
    g_ps = identity
    x = x0.copy()
    t = 0.0
    n_macro = 0
    while t < T - 1e-15:
        lam = rate_integrand_matrix(R, x[None, :])[0]
        Lam = lam.sum()
        step = min(dt, T - t, MAX_JUMP_PROB / Lam)
        x_new = _advance_one(R, x, step, rng)
        if rng.random() < Lam * step:
            a = int(rng.choice(len(lam), p=lam / Lam))
            g_ps = compose_ps(g_ps, refl[a])
            if table is not None:
                g_index = int(table.right_mult[a, g_index])
            else:
                g_index = lex_rank(g_ps[0], g_ps[1], R.family)
            events.append((t + step, a))
            group_path.append(g_index)
            group_elements.append(g_ps)
        x = x_new
        t += step
        n_macro += 1
        if n_macro % save_stride == 0:
            times.append(t)
            states.append(x.copy())
    if times[-1] != t:
        times.append(t)
        states.append(x.copy())
    path = RadialPath(np.array(times), np.array(states), R.beta, x0)
    return path, JumpTrajectory(x0, events, group_path, group_elements, T)


def simulate_jump_counts(R: RootSystem, t0: float, t1: float,
                         nreplicas: int, dt: float = 2e-3, seed: int = 0,
                         n_grid: int = 2, coupled: bool = True,
                         rate_table: RateTable | None = None) -> JumpCountRecord:
    """Cumulative event counts on [t0, t1] for an origin start.

    The radial state at t0 is drawn exactly (static law scaled by sqrt(t0)).
    coupled=True counts events thinned on the radial path (the process
    itself); coupled=False counts an inhomogeneous-Poisson model driven by
    the deterministic rate total(rate_table)/t.
    """
    grid = np.linspace(t0, t1, n_grid) if n_grid > 2 else np.array([t0, t1])
    counts = np.zeros((nreplicas, len(grid)), dtype=np.int64)

    if not coupled:
        if rate_table is None:
            raise ValueError("rate_table required for the rate-driven model")
        Lam1 = rate_table.total
        rng = philox_stream(seed, 0)
        mean_total = Lam1 * np.log(t1 / t0)
        n = rng.poisson(mean_total, size=nreplicas)
        for i in range(nreplicas):
            if n[i] == 0:
                continue
            u = rng.random(n[i])
            s = t0 * (t1 / t0) ** u       # density prop. 1/t on [t0, t1]
            counts[i] = np.searchsorted(np.sort(s), grid, side="right")
        return JumpCountRecord(grid, counts, nreplicas)

    block = 4096
    for b0 in range(0, nreplicas, block):
        b1 = min(b0 + block, nreplicas)
        m = b1 - b0
        rng = philox_stream(seed, b0 // block + 1)
        start = sample_static(R, m, seed=seed + 104729 * (b0 // block + 1))
        x = start.points * np.sqrt(t0)
        t = t0
        c = np.zeros(m, dtype=np.int64)
        gi = 1
        while t < t1 - 1e-15:
            lam = rate_integrand_matrix(R, x)
            Lam = lam.sum(axis=1)
            step = min(dt, t1 - t)
            p = Lam * step
            # replicas whose jump probability exceeds the cap get substeps
            hot = p > MAX_JUMP_PROB
            jumps = rng.random(m) < p
            if hot.any():
                for i in np.flatnonzero(hot):
                    nsub = int(np.ceil(p[i] / MAX_JUMP_PROB))
                    hits = rng.random(nsub) < (p[i] / nsub)
                    jumps[i] = False
                    c[i] += int(hits.sum())
            c += jumps
            x = _advance_block(R, x, step, rng)
            t += step
            while gi < len(grid) and grid[gi] <= t + 1e-12:
                counts[b0:b1, gi] = c
                gi += 1
        counts[b0:b1, -1] = c
    return JumpCountRecord(grid, counts, nreplicas)


def jump_count_stats(record: JumpCountRecord, rate_table: RateTable,
                     t0: float) -> dict:
    """Per-grid-point count statistics against the log-law prediction.

    Reports the empirical mean and variance of N(t) - N(t0), the prediction
    total(1|0) * log(t/t0), and a Poisson dispersion test (two-sided
    chi-square on (n-1) * variance/mean).
    """
    Lam1 = rate_table.total
    rows = []
    n = record.nreplicas
    for j, t in enumerate(record.grid):
        if t <= t0:
            continue
        c = record.counts[:, j]
        mean = float(c.mean())
        var = float(c.var(ddof=1))
        pred = Lam1 * np.log(t / t0)
        if mean > 0:
            disp = var / mean
            q = (n - 1) * disp
            p_lo = stats.chi2.cdf(q, n - 1)
            p_value = float(2 * min(p_lo, 1 - p_lo))
        else:
            disp, p_value = np.nan, np.nan
        se_mean = float(c.std(ddof=1) / np.sqrt(n))
        m4 = float(np.mean((c - mean) ** 4))
        se_var = float(np.sqrt(max(m4 - var ** 2, 0.0) / n))
        rows.append({"t": float(t), "mean": mean, "var": var,
                     "predicted_mean": float(pred),
                     "se_mean": se_mean, "se_var": se_var,
                     "dispersion": disp, "dispersion_pvalue": p_value})
    return {"t0": t0, "Lambda1": Lam1, "windows": rows}


def bulk_limit(family: str, beta: float) -> float:
    """Limiting per-particle total rate beta / (c_R (beta - 1))."""
    if beta <= 1.0:
        raise RegimeError("per-particle rate diverges for beta <= 1")
    return beta / (BULK_C[family] * (beta - 1.0))


def per_particle_rate(family: str, N: int, beta: float, x0=None,
                      mode: str = "closed_form", nreplicas: int = 20_000,
                      dt: float | None = None, seed: int = 0,
                      cache_dir: str | None = None, threads: int = 1) -> float:
    """Total jump rate per particle at process time N (bulk scaling).

    closed_form (x0 = 0): total(1|0)/N^2 exactly.
    simulate: Monte Carlo total(N|x0)/N = total(1|x0/sqrt(N))/N^2 via an SDE
    ensemble started at y = x0/sqrt(N).
    """
    if beta <= 1.0:
        raise RegimeError("per-particle rate diverges for beta <= 1")
    R = build_root_system(family, N, beta)
    if mode == "closed_form":
        return total_rate_closed_form(R) / N ** 2
    if mode != "simulate":
        raise ValueError(f"unknown mode {mode!r}")
    y = np.zeros(N) if x0 is None else np.asarray(x0, dtype=float) / np.sqrt(N)
    table = estimate_rates_from(R, y, 1.0, nreplicas=nreplicas, dt=dt,
                                seed=seed, cache_dir=cache_dir, threads=threads)
    return table.total / N ** 2
