"""Enumeration of the reflection group W (S_N for A, signed permutations for
B) with the right-multiplication index tables that master operators are built
from.

An element g is stored as (perm, signs) in column convention:
    g(e_j) = signs[j] * e_{perm[j]}        (0-based indices)
so that (g o h).perm[j] = g.perm[h.perm[j]] and
        (g o h).signs[j] = h.signs[j] * g.signs[h.perm[j]].

Elements are indexed lexicographically by (perm, signs) with +1 sorting
before -1, which puts the identity at index 0 and keeps matrix layouts
stable across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import SizeError
from .rootsys import Root, RootSystem

DEFAULT_CAP = 10_080


@dataclass(frozen=True)
class GroupElement:
    perm: tuple          # perm[j] = image coordinate of j
    signs: tuple         # entries +-1, all +1 for family A
    index: int


@dataclass
class GroupTable:
    family: str
    rank: int
    order: int
    elements: list
    right_mult: np.ndarray      # (|R+|, |W|) int: right_mult[a, i] = idx(el_i o sigma_a)
    _lookup: dict

    def index_of(self, perm, signs) -> int:
        return self._lookup[(tuple(perm), tuple(signs))]

    def compose(self, i: int, j: int) -> int:
        """Index of elements[i] o elements[j]."""
        g, h = self.elements[i], self.elements[j]
        perm = tuple(g.perm[p] for p in h.perm)
        signs = tuple(h.signs[m] * g.signs[h.perm[m]] for m in range(self.rank))
        return self._lookup[(perm, signs)]

    def signs_vector(self) -> np.ndarray:
        """sign(tau) for every element, in index order."""
        return np.array([sign_of(g) for g in self.elements])


def _reflection_perm_signs(alpha: Root, N: int):
    """Express sigma_alpha as (perm, signs) in column convention."""
    perm = [0] * N
    signs = [1] * N
    for j in range(N):
        e = np.zeros(N)
        e[j] = 1.0
        img = e - (2.0 * (e @ alpha.vec) / alpha.norm_sq) * alpha.vec
        m = int(np.argmax(np.abs(img)))
        s = int(round(img[m]))
        if abs(img[m] - s) > 1e-12 or s not in (-1, 1):
            raise ValueError("root does not act by signed permutation")
        perm[j] = m
        signs[j] = s
    return tuple(perm), tuple(signs)


def enumerate_group(R: RootSystem, cap: int = DEFAULT_CAP) -> GroupTable:
    """Enumerate W and tabulate right multiplication by each positive-root
    reflection.  Raises SizeError above the cap (dense |W|^2 matrices later)."""
    N = R.rank
    import math
    order = math.factorial(N) * (2 ** N if R.family == "B" else 1)
    if order > cap:
        raise SizeError(f"|W| = {order} exceeds cap {cap}")

    sign_choices = ([(1,) * N] if R.family == "A"
                    else list(itertools.product((1, -1), repeat=N)))
    elements = []
    lookup = {}
    idx = 0
    for perm in itertools.permutations(range(N)):
        for signs in sign_choices:
            elements.append(GroupElement(perm, signs, idx))
            lookup[(perm, signs)] = idx
            idx += 1

    table = GroupTable(family=R.family, rank=N, order=order,
                       elements=elements, right_mult=None, _lookup=lookup)

    nroots = R.n_roots
    rm = np.empty((nroots, order), dtype=np.int64)
    for a, alpha in enumerate(R.positive_roots):
        sp, ss = _reflection_perm_signs(alpha, N)
        for g in elements:
            # g o sigma_a
            perm = tuple(g.perm[p] for p in sp)
            signs = tuple(ss[m] * g.signs[sp[m]] for m in range(N))
            rm[a, g.index] = lookup[(perm, signs)]
    table.right_mult = rm
    return table


def reflection_as_element(alpha: Root, N: int):
    """(perm, signs) of sigma_alpha without enumerating the group."""
    return _reflection_perm_signs(alpha, N)


def compose_ps(g, h):
    """(perm, signs) of g o h from raw tuples."""
    gp, gs = g
    hp, hs = h
    perm = tuple(gp[p] for p in hp)
    signs = tuple(hs[m] * gs[hp[m]] for m in range(len(gp)))
    return perm, signs


def lex_rank(perm, signs, family: str) -> int:
    """Index of (perm, signs) in enumeration order, without the table.

    Lehmer rank of the permutation; for family B, times 2^N plus the binary
    rank of the signs (+1 -> bit 0, -1 -> bit 1, first coordinate most
    significant), matching enumerate_group's ordering.
    """
    import math
    N = len(perm)
    rank = 0
    for i in range(N):
        smaller = sum(1 for j in range(i + 1, N) if perm[j] < perm[i])
        rank += smaller * math.factorial(N - 1 - i)
    if family == "A":
        return rank
    bits = 0
    for s in signs:
        bits = (bits << 1) | (1 if s < 0 else 0)
    return rank * (2 ** N) + bits


def act_ps(ps, x) -> np.ndarray:
    """Action of a raw (perm, signs) pair on a vector."""
    perm, signs = ps
    x = np.asarray(x, dtype=float)
    y = np.empty_like(x)
    for j, (p, s) in enumerate(zip(perm, signs)):
        y[p] = s * x[j]
    return y


def act(g: GroupElement, x) -> np.ndarray:
    """Orthogonal action: (g x)[perm[j]] = signs[j] * x[j]."""
    x = np.asarray(x, dtype=float)
    y = np.empty_like(x)
    for j, (p, s) in enumerate(zip(g.perm, g.signs)):
        y[p] = s * x[j]
    return y


def sign_of(g: GroupElement) -> int:
    """Signature: permutation parity times the product of signs."""
    seen = [False] * len(g.perm)
    parity = 1
    for start in range(len(g.perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = g.perm[j]
            length += 1
        if length % 2 == 0:
            parity = -parity
    for s in g.signs:
        parity *= s
    return parity
