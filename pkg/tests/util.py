"""Shared test fixtures: cached lattices, brute-force oracles, K12."""

import itertools
from functools import lru_cache

import numpy as np

from latdec import lattices as lat
from latdec import hld


@lru_cache(maxsize=None)
def fam(family, n):
    G = lat.family_generator(family, n)
    G.info.update({"family": family, "n": n})
    return G


@lru_cache(maxsize=None)
def oriented(family, n):
    return hld.orient_basis(fam(family, n))


@lru_cache(maxsize=None)
def dnf_z1_oriented(family, n):
    G_or, _ = oriented(family, n)
    return hld.synthesize_hld(G_or, 0)


@lru_cache(maxsize=None)
def all_dnfs(family, n):
    return tuple(hld.synthesize_all(fam(family, n)))


def brute_closest(G, y, radius):
    """Exhaustive CVP over the integer box [-radius, radius]^n.

    Lexicographically-smallest tie-break, same as the decoders.
    """
    best, bestd = None, 1e300
    M = G.matrix
    for z in itertools.product(range(-radius, radius + 1), repeat=G.n):
        z = np.array(z)
        d = float(np.sum((z @ M - y) ** 2))
        if d < bestd - 1e-9 * (1.0 + bestd):
            best, bestd = z, d
        elif abs(d - bestd) <= 1e-9 * (1.0 + bestd) and list(z) < list(best):
            best = z
    return best, bestd


def brute_shortest_sq(G, radius):
    M = G.matrix
    return min(float(np.sum((np.array(z) @ M) ** 2))
               for z in itertools.product(range(-radius, radius + 1), repeat=G.n)
               if any(z))


# Coxeter-Todd K12: Eisenstein vectors congruent mod 2 to a hexacode word.
# The [6,3,4] code over F4 = {0,1,w,w^2} ~ {0,1,2,3} is unique up to
# equivalence; this generator was found by search and is revalidated here.
_HEXACODE_P = np.array([[1, 1, 1], [1, 2, 3], [1, 3, 2]])

_F4_MUL = np.zeros((4, 4), dtype=int)
for _a in range(4):
    for _b in range(4):
        if _a and _b:
            _la = {1: 0, 2: 1, 3: 2}[_a]
            _lb = {1: 0, 2: 1, 3: 2}[_b]
            _F4_MUL[_a, _b] = {0: 1, 1: 2, 2: 3}[(_la + _lb) % 3]


def _hexacode_min_weight():
    G = np.hstack([np.eye(3, dtype=int), _HEXACODE_P])
    wmin = 6
    for m in itertools.product(range(4), repeat=3):
        if not any(m):
            continue
        cw = np.zeros(6, dtype=int)
        for i, mi in enumerate(m):
            if mi:
                cw ^= _F4_MUL[mi][G[i]]  # F4 addition is xor
        wmin = min(wmin, int(np.count_nonzero(cw)))
    return wmin


@lru_cache(maxsize=None)
def coxeter_todd():
    """K12 with minimum distance 2 and volume 27."""
    assert _hexacode_min_weight() == 4
    w = complex(-0.5, np.sqrt(3) / 2)
    f4c = {0: 0j, 1: 1 + 0j, 2: w, 3: w * w}
    Gc = np.hstack([np.eye(3, dtype=int), _HEXACODE_P])
    rows_c = []
    for i in range(3):
        c = np.array([f4c[v] for v in Gc[i]])
        rows_c.extend([c, w * c])
    for j in range(3, 6):
        e = np.zeros(6, dtype=complex)
        e[j] = 2.0
        rows_c.extend([e, w * e])
    rows_int = []
    for rc in rows_c:
        b = np.round(rc.imag / w.imag).astype(int)
        a = np.round(rc.real - b * w.real).astype(int)
        row = np.zeros(12, dtype=int)
        row[0::2] = a
        row[1::2] = b
        rows_int.append(row)
    blk = np.linalg.cholesky(np.array([[1.0, -0.5], [-0.5, 1.0]]))
    return lat.GeneratorMatrix(np.array(rows_int, dtype=float)
                               @ np.kron(np.eye(6), blk))
