"""Root systems A_{N-1} and B_N: positive roots, multiplicities, reflections,
Weyl chamber membership and the radial weight function.

Conventions:
  * A_{N-1} lives in R^N with positive roots e_j - e_i (i < j), one orbit,
    squared norm 2.  Its chamber is x_1 <= x_2 <= ... <= x_N.
  * B_N has short positive roots e_i (norm^2 = 1) and long positive roots
    e_j -/+ e_i (i < j, norm^2 = 2).  Its chamber is 0 <= x_1 <= ... <= x_N.
  * Positivity is fixed by the vector m = (1, 2, ..., N).
  * gamma is the sum of multiplicities over the positive subsystem, and the
    weight is w(x) = prod |alpha . x|^(beta k(alpha)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, RegimeError

FAMILIES = ("A", "B")

# orbit labels per family
A_ORBIT = "a"
B_SHORT = "short"
B_LONG = "long"


@dataclass
class Root:
    """A single positive root with its orbit label and multiplicity."""

    vec: np.ndarray
    orbit: str
    k: float
    norm_sq: float

    def __post_init__(self):
        self.vec = np.asarray(self.vec, dtype=float)


@dataclass
class RootSystem:
    family: str
    rank: int                      # ambient dimension N (= particle count)
    beta: float
    positive_roots: list[Root]
    gamma: float
    # dense views used by the numeric kernels, built once
    root_matrix: np.ndarray = field(repr=False, default=None)   # (|R+|, N)
    k_vec: np.ndarray = field(repr=False, default=None)
    norm_sq_vec: np.ndarray = field(repr=False, default=None)

    @property
    def n_roots(self) -> int:
        return len(self.positive_roots)

    @property
    def k_by_orbit(self) -> dict:
        out = {}
        for r in self.positive_roots:
            out[r.orbit] = r.k
        return out

    def to_json(self) -> str:
        return json.dumps(
            {"family": self.family, "N": self.rank, "beta": self.beta,
             "k": self.k_by_orbit},
            sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "RootSystem":
        d = json.loads(text)
        return build_root_system(d["family"], d["N"], d["beta"], d.get("k"))


def _positive_roots(family: str, N: int, k: dict) -> list[Root]:
    roots = []
    if family == "A":
        for i in range(N):
            for j in range(i + 1, N):
                v = np.zeros(N)
                v[j] = 1.0
                v[i] = -1.0
                roots.append(Root(v, A_ORBIT, k[A_ORBIT], 2.0))
    else:
        for i in range(N):
            v = np.zeros(N)
            v[i] = 1.0
            roots.append(Root(v, B_SHORT, k[B_SHORT], 1.0))
        for i in range(N):
            for j in range(i + 1, N):
                for s in (-1.0, 1.0):
                    v = np.zeros(N)
                    v[j] = 1.0
                    v[i] = s
                    roots.append(Root(v, B_LONG, k[B_LONG], 2.0))
    return roots


def _normalize_k(family: str, k) -> dict:
    orbits = (A_ORBIT,) if family == "A" else (B_SHORT, B_LONG)
    if k is None:
        return {o: 1.0 for o in orbits}
    if np.isscalar(k):
        return {o: float(k) for o in orbits}
    out = {}
    for o in orbits:
        if o not in k:
            raise DimensionError(f"missing multiplicity for orbit {o!r}")
        out[o] = float(k[o])
    return out


def build_root_system(family: str, N: int, beta: float, k=None) -> RootSystem:
    """Construct the positive subsystem with multiplicities.

    k defaults to 1 on every orbit (all multiplicities equal to beta/2).
    Raises RegimeError unless beta*k(alpha) > 1 on every orbit, the regime in
    which all jump rates are finite; DimensionError for an invalid rank.
    """
    if family not in FAMILIES:
        raise DimensionError(f"unknown family {family!r}; expected A or B")
    if family == "A" and N < 2:
        raise DimensionError("family A needs N >= 2")
    if family == "B" and N < 1:
        raise DimensionError("family B needs N >= 1")
    kmap = _normalize_k(family, k)
    for orbit, kv in kmap.items():
        if kv < 0:
            raise RegimeError(f"negative multiplicity on orbit {orbit!r}")
        if beta * kv <= 1.0:
            raise RegimeError(
                f"beta*k = {beta * kv:g} <= 1 on orbit {orbit!r}: "
                "jump rates diverge")
    roots = _positive_roots(family, N, kmap)
    gamma = float(sum(r.k for r in roots))
    rs = RootSystem(family=family, rank=N, beta=float(beta),
                    positive_roots=roots, gamma=gamma)
    rs.root_matrix = np.array([r.vec for r in roots])
    rs.k_vec = np.array([r.k for r in roots])
    rs.norm_sq_vec = np.array([r.norm_sq for r in roots])
    return rs


def reflect(alpha: Root, x) -> np.ndarray:
    """sigma_alpha x = x - 2 (alpha.x / |alpha|^2) alpha."""
    v = alpha.vec if isinstance(alpha, Root) else np.asarray(alpha, dtype=float)
    nsq = alpha.norm_sq if isinstance(alpha, Root) else float(v @ v)
    x = np.asarray(x, dtype=float)
    return x - (2.0 * (x @ v) / nsq) * v


def weight(R: RootSystem, x) -> float:
    """w(x) = prod |alpha . x|^(beta k(alpha)); vanishes exactly on walls."""
    x = np.asarray(x, dtype=float)
    g = np.abs(R.root_matrix @ x)
    if np.any(g == 0.0):
        return 0.0
    return float(np.exp(np.sum(R.beta * R.k_vec * np.log(g))))


def log_weight(R: RootSystem, x) -> float:
    """log w(x); -inf on walls."""
    g = np.abs(R.root_matrix @ np.asarray(x, dtype=float))
    if np.any(g == 0.0):
        return -np.inf
    return float(np.sum(R.beta * R.k_vec * np.log(g)))


def chamber_contains(R: RootSystem, x, tol: float = 0.0) -> bool:
    """True iff alpha . x >= -tol for every positive root."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    g = R.root_matrix @ np.asarray(x, dtype=float)
    return bool(np.all(g >= -tol))


def gaps(R: RootSystem, x) -> np.ndarray:
    """All inner products alpha . x, in root order."""
    return R.root_matrix @ np.asarray(x, dtype=float)


def into_chamber(R: RootSystem, x) -> np.ndarray:
    """Fold a point into the closed chamber (sort for A, abs+sort for B)."""
    x = np.asarray(x, dtype=float)
    if R.family == "A":
        return np.sort(x)
    return np.sort(np.abs(x))
