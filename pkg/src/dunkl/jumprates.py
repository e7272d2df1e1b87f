"""Per-root jump rates lambda(t, alpha | x0) and their total.

At the origin the rates at reference time 1 are expectations of
    beta |alpha|^2 k(alpha) / (4 (alpha . x)^2)
under the static time-1 law; for a general start y they are averaged over
Euler-Maruyama ensembles.  The total at the origin has the closed form
beta |R+| / (4 (beta - 1)) for unit multiplicities, which the Monte Carlo
totals are checked against.

Scaling in time is exact: lambda(t, alpha | x0) = lambda(1, alpha | x0/sqrt(t)) / t,
so an origin table gives rates at every t by division, and a ray table
(rates cached along s * direction) covers x0 != 0 by interpolation in
s = |x0|/sqrt(t).

Tables are cached on disk keyed by every defining parameter including the
seed; a cache hit replays the stored numbers bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (ExtrapolationError, MismatchError, RegimeError,
                     UnsupportedMultiplicity, VarianceWarning, WallError)
from .radialsde import sample_static, simulate_ensemble, default_dt
from .rootsys import Root, RootSystem, chamber_contains

VARIANCE_SAFE_BK = 3.0


def root_code(root: Root, N: int) -> list:
    """Two-index code of a root: [i, j] (1-based).

    A and long e_j - e_i -> [i, j]; short e_i -> [i, i]; long e_j + e_i -> [-i, j].
    """
    nz = np.flatnonzero(root.vec)
    if len(nz) == 1:
        i = int(nz[0]) + 1
        return [i, i]
    i, j = int(nz[0]) + 1, int(nz[1]) + 1
    if root.vec[nz[0]] < 0:
        return [i, j]
    return [-i, j]


@dataclass
class RateEntry:
    root_id: int
    code: list
    lam: float
    stderr: float
    nsamples: int


@dataclass
class RateTable:
    family: str
    N: int
    beta: float
    k: dict
    origin: np.ndarray           # start point y at reference time t_ref
    t_ref: float
    entries: list
    total: float                 # exact sum of the per-root lambdas
    total_stderr: float
    total_closed_form: float | None
    sampler_tag: str
    seed: int
    cache_key: str = field(default="", repr=False)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([e.lam for e in self.entries])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([e.stderr for e in self.entries])

    def to_json_dict(self) -> dict:
        return {
            "system": self.family,
            "N": self.N,
            "beta": self.beta,
            "k": self.k,
            "origin": list(map(float, self.origin)),
            "t_ref": self.t_ref,
            "entries": [{"root": e.code, "lambda": e.lam,
                         "stderr": e.stderr, "n": e.nsamples}
                        for e in self.entries],
            "total": self.total,
            "total_closed_form": self.total_closed_form,
            "sampler_tag": self.sampler_tag,
            "seed": self.seed,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "RateTable":
        entries = [RateEntry(i, e["root"], e["lambda"], e["stderr"], e["n"])
                   for i, e in enumerate(d["entries"])]
        return RateTable(
            family=d["system"], N=d["N"], beta=d["beta"], k=d["k"],
            origin=np.array(d["origin"], dtype=float), t_ref=d["t_ref"],
            entries=entries, total=d["total"],
            total_stderr=d.get("total_stderr", 0.0),
            total_closed_form=d["total_closed_form"],
            sampler_tag=d["sampler_tag"], seed=d["seed"])


def rate_integrand(R: RootSystem, alpha: Root, x) -> float:
    """beta |alpha|^2 k(alpha) / (4 (alpha . x)^2); scale-covariant in 1/x^2."""
    g = float(alpha.vec @ np.asarray(x, dtype=float))
    if g == 0.0:
        raise WallError("rate integrand singular on the wall alpha . x = 0")
    return R.beta * alpha.norm_sq * alpha.k / (4.0 * g * g)


def rate_integrand_matrix(R: RootSystem, points: np.ndarray) -> np.ndarray:
    """Integrand for every (point, root) pair; shape (n, |R+|)."""
    g = points @ R.root_matrix.T
    return (R.beta * R.norm_sq_vec * R.k_vec / 4.0) / (g * g)


def total_rate_closed_form(R: RootSystem) -> float:
    """Total rate at the origin, reference time 1: beta |R+| / (4 (beta-1)).

    Only valid for unit multiplicities and beta > 1.
    """
    if any(abs(r.k - 1.0) > 1e-12 for r in R.positive_roots):
        raise UnsupportedMultiplicity("closed form requires k = 1 on all orbits")
    if R.beta <= 1.0:
        raise RegimeError("total rate diverges for beta <= 1")
    return R.beta * R.n_roots / (4.0 * (R.beta - 1.0))


def _maybe_closed_form(R: RootSystem):
    try:
        return total_rate_closed_form(R)
    except (UnsupportedMultiplicity, RegimeError):
        return None


def _variance_check(R: RootSystem):
    bad = {r.orbit for r in R.positive_roots
           if R.beta * r.k <= VARIANCE_SAFE_BK}
    if bad:
        warnings.warn(
            f"beta*k <= {VARIANCE_SAFE_BK:g} on orbit(s) {sorted(bad)}: "
            "plain Monte Carlo standard errors are unreliable",
            VarianceWarning, stacklevel=3)


def _table_from_points(R: RootSystem, points: np.ndarray, origin, t_ref,
                       sampler_tag, seed, cache_key="") -> RateTable:
    vals = rate_integrand_matrix(R, points)
    n = len(points)
    lams = vals.mean(axis=0)
    errs = vals.std(axis=0, ddof=1) / np.sqrt(n)
    tot = vals.sum(axis=1)
    entries = [RateEntry(i, root_code(r, R.rank), float(lams[i]),
                         float(errs[i]), n)
               for i, r in enumerate(R.positive_roots)]
    return RateTable(
        family=R.family, N=R.rank, beta=R.beta, k=R.k_by_orbit,
        origin=np.asarray(origin, dtype=float), t_ref=float(t_ref),
        entries=entries, total=float(lams.sum()),
        total_stderr=float(tot.std(ddof=1) / np.sqrt(n)),
        total_closed_form=_maybe_closed_form(R),
        sampler_tag=sampler_tag, seed=seed, cache_key=cache_key)


# ---------------------------------------------------------------------------
# disk cache
# ---------------------------------------------------------------------------

def _cache_key(**params) -> str:
    blob = json.dumps(params, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def _cache_load(cache_dir, key):
    if cache_dir is None:
        return None
    path = os.path.join(cache_dir, key + ".json")
    if not os.path.exists(path):
        return None
    with open(path) as f:
        d = json.load(f)
    t = RateTable.from_json_dict(d["table"])
    t.total_stderr = d["total_stderr"]
    t.cache_key = key
    return t


def _cache_store(cache_dir, key, table: RateTable):
    if cache_dir is None:
        return
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, key + ".json")
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            json.dump({"table": table.to_json_dict(),
                       "total_stderr": table.total_stderr}, f, sort_keys=True)
        os.replace(tmp, path)        # atomic publish
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

def estimate_rates_origin(R: RootSystem, nsamples: int, seed: int = 0,
                          method: str = "auto",
                          cache_dir: str | None = None) -> RateTable:
    """Monte Carlo rates at the origin, reference time 1, from the static law."""
    key = _cache_key(kind="origin", family=R.family, N=R.rank, beta=R.beta,
                     k=R.k_by_orbit, n=nsamples, seed=seed, method=method)
    hit = _cache_load(cache_dir, key)
    if hit is not None:
        return hit
    _variance_check(R)
    s = sample_static(R, nsamples, seed=seed, method=method)
    table = _table_from_points(R, s.points, np.zeros(R.rank), 1.0,
                               s.sampler_tag, seed, key)
    _cache_store(cache_dir, key, table)
    return table


def estimate_rates_from(R: RootSystem, y, t_ref: float = 1.0,
                        nreplicas: int = 20_000, dt: float | None = None,
                        seed: int = 0, cache_dir: str | None = None,
                        threads: int = 1) -> RateTable:
    """Rates at time t_ref for a process started at y, via an SDE ensemble."""
    y = np.asarray(y, dtype=float)
    if not chamber_contains(R, y, tol=0.0):
        raise WallError("start point must lie in the closed chamber")
    if dt is None:
        dt = default_dt(R.beta)
    key = _cache_key(kind="from", family=R.family, N=R.rank, beta=R.beta,
                     k=R.k_by_orbit, y=list(map(float, y)), t_ref=t_ref,
                     n=nreplicas, dt=dt, seed=seed)
    hit = _cache_load(cache_dir, key)
    if hit is not None:
        return hit
    _variance_check(R)
    pts = simulate_ensemble(R, y, t_ref, dt, nreplicas, seed=seed,
                            threads=threads)
    table = _table_from_points(R, pts, y, t_ref, "sde", seed, key)
    _cache_store(cache_dir, key, table)
    return table


# ---------------------------------------------------------------------------
# time scaling and the ray cache for x0 != 0
# ---------------------------------------------------------------------------

@dataclass
class RayRateTable:
    """Rates lambda(1, . | s * direction) on a geometric grid of s, with the
    origin table as the s=0 anchor.  rate_at_time queries s = |x0|/sqrt(t)."""

    R_descr: dict
    direction: np.ndarray        # unit vector in the chamber
    s_grid: np.ndarray           # ascending, all > 0
    rate_rows: np.ndarray        # (len(s_grid), |R+|)
    origin_lambdas: np.ndarray   # s = 0 anchor

    def lambdas_at(self, s: float) -> np.ndarray:
        if s < 0:
            raise ValueError("s must be >= 0")
        grid = self.s_grid
        if s == 0.0:
            return self.origin_lambdas.copy()
        if s > grid[-1] * (1 + 1e-12):
            raise ExtrapolationError(
                f"s = {s:g} beyond cached ray grid (max {grid[-1]:g})")
        if s <= grid[0]:
            # below the grid the correction is quadratic in s
            w = (s / grid[0]) ** 2
            return (1 - w) * self.origin_lambdas + w * self.rate_rows[0]
        # log-linear on the geometric grid
        j = int(np.searchsorted(grid, s)) - 1
        j = min(j, len(grid) - 2)
        ls0, ls1 = np.log(grid[j]), np.log(grid[j + 1])
        w = (np.log(s) - ls0) / (ls1 - ls0)
        return np.exp((1 - w) * np.log(self.rate_rows[j])
                      + w * np.log(self.rate_rows[j + 1]))


def build_ray_table(R: RootSystem, direction, s_grid, nreplicas: int,
                    dt: float | None = None, seed: int = 0,
                    nsamples_origin: int | None = None,
                    cache_dir: str | None = None) -> RayRateTable:
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    s_grid = np.sort(np.asarray(s_grid, dtype=float))
    if np.any(s_grid <= 0):
        raise ValueError("s_grid entries must be positive")
    if nsamples_origin is None:
        nsamples_origin = max(nreplicas, 100_000)
    origin = estimate_rates_origin(R, nsamples_origin, seed=seed,
                                   cache_dir=cache_dir)
    rows = []
    for i, s in enumerate(s_grid):
        t = estimate_rates_from(R, s * direction, 1.0, nreplicas, dt,
                                seed=seed + 7919 * (i + 1),
                                cache_dir=cache_dir)
        rows.append(t.lambdas)
    return RayRateTable(
        R_descr={"family": R.family, "N": R.rank, "beta": R.beta},
        direction=direction, s_grid=s_grid, rate_rows=np.array(rows),
        origin_lambdas=origin.lambdas)


def rate_at_time(table, t: float, x0=None) -> np.ndarray:
    """Per-root rates at time t.

    x0 = 0 (or None): exact 1/t scaling of an origin RateTable.
    x0 != 0: `table` must be a RayRateTable along the direction of x0;
    rates are lambda(1, . | x0/sqrt(t))/t with interpolation in s = |x0|/sqrt(t).
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
    if x0 is None or not np.any(x0):
        if isinstance(table, RayRateTable):
            return table.origin_lambdas / t
        if np.any(table.origin):
            raise MismatchError("x0 = 0 query against a table with origin != 0")
        return table.lambdas * (table.t_ref / t)
    if not isinstance(table, RayRateTable):
        raise MismatchError("x0 != 0 queries need a RayRateTable")
    nrm = np.linalg.norm(x0)
    if np.linalg.norm(x0 / nrm - table.direction) > 1e-9:
        raise MismatchError("x0 not on the cached ray direction")
    return table.lambdas_at(nrm / np.sqrt(t)) / t
