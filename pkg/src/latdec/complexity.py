"""Closed-form piece counts, the shallow-network lower bound, and an
independent geometric enumeration that cross-validates both.

A piece is a (boundary hyperplane, owning convex group) incidence; convex
groups whose facet sets coincide merge, which is what produces the -1
(D family) and -3 (E family) shared-facet corrections.
"""

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from . import lattices
from .hld import _cluster_hyperplanes


@dataclass(frozen=True)
class PieceCount:
    family: str
    n: int
    formula_count: int
    enumerated_count: int = None


def count_pieces_formula(family, n):
    """Exact number of affine pieces of the first-coordinate boundary."""
    if family == "A":
        if n < 2:
            raise ValueError("A family needs n >= 2")
        return sum(i * comb(n - 1, n - i) for i in range(1, n + 1))
    if family == "D":
        if n < 3:
            raise ValueError("D family needs n >= 3")
        total = 0
        for i in range(n - 1):
            r = n - 2 - i
            l_i = 1 + r
            ll_i = 1 + 2 * r + comb(r, 2)
            total += (l_i + ll_i) * comb(n - 2, i)
        return total - 1
    if family == "E":
        if not 6 <= n <= 8:
            raise ValueError("E family needs 6 <= n <= 8")
        total = 0
        for i in range(n - 2):
            r = n - 3 - i
            l_i = 1 + r
            ll_i = 1 + 2 * r + comb(r, 2)
            lll_i = 1 + 3 * r + 3 * comb(r, 2) + comb(r, 3)
            total += (l_i + 2 * ll_i + lll_i) * comb(n - 3, i)
        return total - 3
    raise ValueError("piece formulas exist for the A, D, E families")


def count_pieces_folded(family, n):
    """Pieces left on the folded domain."""
    if family == "A":
        if n < 2:
            raise ValueError("A family needs n >= 2")
        return 2 * n - 1
    if family == "D":
        if n < 3:
            raise ValueError("D family needs n >= 3")
        return 6 * n - 12
    if family == "E":
        if not 6 <= n <= 8:
            raise ValueError("E family needs 6 <= n <= 8")
        return 12 * n - 40
    raise ValueError("folded counts exist for the A, D, E families")


def shallow_lower_bound(n):
    """Minimum hidden neurons of a two-layer ReLU net decoding A_n optimally."""
    if n < 2:
        raise ValueError("needs n >= 2")
    return sum((i - 1) * comb(n - 1, n - i) for i in range(2, n + 1))


def enumerate_piece_structure(G, coordinate=0):
    """Geometric piece enumeration for the given basis.

    Pairs every bit-1 corner with the bit-0 corners a relevant vector
    away, deduplicates coincident oriented bisectors, merges corners with
    identical facet sets, and returns (piece_count, per_corner_cardinalities).
    The cardinalities are pre-merge (one entry per bit-1 corner).
    """
    n = G.n
    if n > 8:
        raise lattices.BudgetExceededError("piece enumeration limited to n <= 8")
    rel = np.array(lattices.relevant_vectors(G))
    M = G.matrix
    corners = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    ones = corners[corners[:, coordinate] == 1]
    zeros = corners[corners[:, coordinate] == 0]
    X1 = ones @ M
    X0 = zeros @ M

    raw_normals, raw_offsets = [], []
    raw_terms = []
    for a in range(X1.shape[0]):
        diffs = X0 - X1[a]
        d2 = np.sum((diffs[:, None, :] - rel[None, :, :]) ** 2, axis=2)
        hits = np.nonzero(np.min(d2, axis=1) < 1e-18)[0]
        lits = []
        for b in hits:
            v = X1[a] - X0[b]
            vn = v / np.linalg.norm(v)
            p = float(vn @ (X1[a] + X0[b])) / 2.0
            lits.append(len(raw_normals))
            raw_normals.append(vn)
            raw_offsets.append(p)
        raw_terms.append(lits)

    _, labels = _cluster_hyperplanes(np.array(raw_normals),
                                     np.array(raw_offsets))
    terms = [tuple(sorted({int(labels[i]) for i in lits}))
             for lits in raw_terms]
    cards = [len(t) for t in terms]
    distinct = []
    for t in terms:
        if t not in distinct:
            distinct.append(t)
    return sum(len(t) for t in distinct), cards


def count_pieces_enumerate(G, coordinate=0):
    """Deduplicated piece total for the first-coordinate boundary."""
    return enumerate_piece_structure(G, coordinate)[0]
