"""Lattice construction and interrogation.

Bases are row-convention: a lattice point is x = z @ G for integer z.
Structured-family Gram matrices have dyadic (k/2) entries, which are exact
in binary floating point; everything else runs in float64 with a global
comparison tolerance of 1e-9.
"""

import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from ._kernels import STATUS_BUDGET, STATUS_OK

EPS = 1e-9
DEFAULT_NODE_BUDGET = 10**9

FAMILIES = ("A", "D", "E", "E8-special", "E6-quasi", "Z")

_GAMMA_E8_SPECIAL = np.array([
    [4, 2, 0, 2, 2, 2, 2, 2],
    [2, 4, 2, 0, 2, 2, 2, 2],
    [0, 2, 4, 0, 2, 2, 0, 0],
    [2, 0, 0, 4, 2, 2, 0, 0],
    [2, 2, 2, 2, 4, 2, 2, 0],
    [2, 2, 2, 2, 2, 4, 0, 2],
    [2, 2, 0, 0, 2, 0, 4, 0],
    [2, 2, 0, 0, 0, 2, 0, 4],
], dtype=float)

_GAMMA_E6_QUASI = 0.5 * np.array([
    [6, 3, 0, 0, 3, 3],
    [3, 6, 0, 0, 3, 3],
    [0, 0, 6, 3, 3, 3],
    [0, 0, 3, 6, 3, 3],
    [3, 3, 3, 3, 6, 3],
    [3, 3, 3, 3, 3, 6],
], dtype=float)


class BudgetExceededError(RuntimeError):
    """Raised when an enumeration exceeds its node or output budget."""


def node_budget():
    """Global enumeration node budget, overridable via LATDEC_NODE_BUDGET."""
    return int(os.environ.get("LATDEC_NODE_BUDGET", DEFAULT_NODE_BUDGET))


@dataclass(frozen=True)
class ShellCount:
    """Number of lattice points on the shell of a given squared radius."""
    radius_sq: float
    count: int


@dataclass(frozen=True)
class _DecodeContext:
    """LLL-reduced triangular form used by the enumeration kernels.

    basis_red = U @ basis, basis_red = L @ Q with L lower triangular
    (positive diagonal) and Q orthonormal rows.
    """
    L: np.ndarray
    Q: np.ndarray
    U: np.ndarray
    basis_red: np.ndarray


class GeneratorMatrix:
    """Immutable full-rank real basis of a rank-n lattice (rows g_i)."""

    def __init__(self, matrix, info=None):
        M = np.array(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("generator matrix must be square")
        if not np.all(np.isfinite(M)):
            raise ValueError("generator matrix must be finite")
        det = float(np.linalg.det(M))
        if abs(det) <= EPS:
            raise ValueError("basis rows are linearly dependent within 1e-9")
        M.setflags(write=False)
        self._m = M
        self._det = det
        self.info = dict(info) if info else {}

    @property
    def matrix(self):
        return self._m

    @property
    def n(self):
        return self._m.shape[0]

    @property
    def det(self):
        return self._det

    @property
    def volume(self):
        return abs(self._det)

    @cached_property
    def gram(self):
        g = self._m @ self._m.T
        g.setflags(write=False)
        return g

    @cached_property
    def inverse(self):
        inv = np.linalg.inv(self._m)
        inv.setflags(write=False)
        return inv

    @cached_property
    def _ctx(self):
        B_red, U = _lll(self._m, 0.99)
        L, Q = _lower_triangular(B_red)
        return _DecodeContext(L=L, Q=Q, U=U, basis_red=B_red)

    @cached_property
    def _tri(self):
        """Triangular form of the basis itself (no reduction): basis = L @ Q."""
        return _lower_triangular(self._m)

    def __repr__(self):
        return f"GeneratorMatrix(n={self.n}, volume={self.volume:.6g})"


def _lower_triangular(B):
    """Rotate B into B = L @ Q with L lower triangular, positive diagonal."""
    Qt, Rt = np.linalg.qr(B.T)
    L = Rt.T.copy()
    Q = Qt.T.copy()
    for i in range(B.shape[0]):
        if L[i, i] < 0:
            L[:, i] *= -1
            Q[i, :] *= -1
    return np.ascontiguousarray(L), np.ascontiguousarray(Q)


def gram_for_family(family, n):
    """Exact Gram matrix of a structured lattice family."""
    if family == "A":
        if n < 2:
            raise ValueError("A family needs n >= 2")
        return np.ones((n, n)) + np.eye(n)
    if family == "D":
        if n < 3:
            raise ValueError("D family needs n >= 3")
        g = np.ones((n, n)) + np.eye(n)
        g[0, 1] = g[1, 0] = 0.0
        return g
    if family == "E":
        if not 6 <= n <= 8:
            raise ValueError("E family needs 6 <= n <= 8")
        g = np.ones((n, n)) + np.eye(n)
        g[0, 1] = g[1, 0] = 0.0
        g[0, 2] = g[2, 0] = 0.0
        return g
    if family == "E8-special":
        if n != 8:
            raise ValueError("E8-special is 8-dimensional")
        return _GAMMA_E8_SPECIAL.copy()
    if family == "E6-quasi":
        if n != 6:
            raise ValueError("E6-quasi is 6-dimensional")
        return _GAMMA_E6_QUASI.copy()
    if family == "Z":
        if n < 1:
            raise ValueError("Z family needs n >= 1")
        return np.eye(n)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def generator_from_gram(gram):
    """Lower-triangular generator with G @ G.T equal to the Gram matrix."""
    g = np.asarray(gram, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("Gram matrix must be square")
    if np.max(np.abs(g - g.T)) > EPS:
        raise ValueError("Gram matrix must be symmetric")
    try:
        low = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise ValueError("Gram matrix is not positive definite") from exc
    if np.max(np.abs(low @ low.T - g)) > EPS:
        raise ValueError("Cholesky factorisation too inaccurate")
    return GeneratorMatrix(low)


def family_generator(family, n):
    """Generator (Cholesky factor) for a structured family."""
    return generator_from_gram(gram_for_family(family, n))


def random_mimo_generator(half_n, seed):
    """Real embedding of an (half_n x half_n) i.i.d. CN(0,1) channel matrix.

    Layout is [[Re, -Im], [Im, Re]]; n = 2 * half_n.  Draws whose
    determinant magnitude falls below 1e-12 are redrawn with seed+1 and the
    redraw count is recorded in the result's info dict.
    """
    if half_n < 1:
        raise ValueError("half_n must be >= 1")
    redraws = 0
    s = int(seed)
    while True:
        rng = np.random.default_rng(np.random.SeedSequence(s))
        re = rng.standard_normal((half_n, half_n)) / math.sqrt(2.0)
        im = rng.standard_normal((half_n, half_n)) / math.sqrt(2.0)
        M = np.block([[re, -im], [im, re]])
        if abs(np.linalg.det(M)) >= 1e-12:
            return GeneratorMatrix(M, info={"seed": int(seed), "redraws": redraws})
        redraws += 1
        s += 1


def random_real_generator(n, seed):
    """Generic random lattice: i.i.d. N(0,1) entries (no complex structure).

    This is the ensemble behind the points-in-sphere statistics; unlike
    the complex embedding it has no norm-preserving automorphism beyond
    negation, so generic-position facts (tau_f = 2^(n+1) - 2) apply.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    redraws = 0
    s = int(seed)
    while True:
        rng = np.random.default_rng(np.random.SeedSequence(s))
        M = rng.standard_normal((n, n))
        if abs(np.linalg.det(M)) >= 1e-12:
            return GeneratorMatrix(M, info={"seed": int(seed), "redraws": redraws})
        redraws += 1
        s += 1


def _lll(B, delta):
    """Float LLL. Returns (B_red, U) with B_red = U @ B and |det U| = 1."""
    B = np.array(B, dtype=float)
    n = B.shape[0]
    U = np.eye(n, dtype=np.int64)

    def gso():
        bs = np.zeros_like(B)
        mu = np.zeros((n, n))
        norms = np.zeros(n)
        for i in range(n):
            bs[i] = B[i]
            for j in range(i):
                mu[i, j] = (B[i] @ bs[j]) / norms[j]
                bs[i] -= mu[i, j] * bs[j]
            norms[i] = bs[i] @ bs[i]
        return mu, norms

    mu, norms = gso()
    k = 1
    guard = 10000 * n * n + 1000
    while k < n:
        guard -= 1
        if guard < 0:
            raise RuntimeError("LLL did not converge")
        for j in range(k - 1, -1, -1):
            q = int(round(mu[k, j]))
            if q != 0:
                B[k] -= q * B[j]
                U[k] -= q * U[j]
                mu[k, j] -= q
                for i in range(j):
                    mu[k, i] -= q * mu[j, i]
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1] - 1e-14:
            k += 1
        else:
            B[[k, k - 1]] = B[[k - 1, k]]
            U[[k, k - 1]] = U[[k - 1, k]]
            mu, norms = gso()
            k = max(k - 1, 1)
    return B, U


def lll_reduce(G, delta=0.99):
    """LLL-reduce a basis; spans the same lattice."""
    if not 0.25 < delta <= 1.0:
        raise ValueError("delta must lie in (0.25, 1]")
    B_red, _ = _lll(G.matrix, delta)
    return GeneratorMatrix(B_red, info=dict(G.info))


def dual_generator(G):
    """Generator of the dual lattice: transpose of the inverse."""
    if abs(G.det) < 1e-12:
        raise ValueError("basis too close to singular for a dual")
    return GeneratorMatrix(np.linalg.inv(G.matrix).T)


def minimum_distance(G):
    """Length of the shortest nonzero lattice vector (exact enumeration)."""
    ctx = G._ctx
    status, best, _ = _kernels._shortest_sq(ctx.L, node_budget())
    if status == STATUS_BUDGET:
        raise BudgetExceededError("shortest-vector enumeration budget exceeded")
    return math.sqrt(best)


def norms_in_sphere(G, radius_sq):
    """Sorted squared norms of all nonzero points with norm^2 <= radius_sq."""
    if radius_sq < 0:
        raise ValueError("radius_sq must be >= 0")
    ctx = G._ctx
    max_out = 1 << 16
    while True:
        status, out, count = _kernels._norms_upto(
            ctx.L, float(radius_sq), node_budget(), max_out)
        if status == STATUS_OK:
            return np.sort(out[:count])
        if status == STATUS_BUDGET:
            raise BudgetExceededError("shell enumeration budget exceeded")
        if max_out >= (1 << 23):
            raise BudgetExceededError("shell enumeration output budget exceeded")
        max_out <<= 3


def count_points_in_sphere(G, radius_sq):
    """Number of nonzero lattice points with squared norm <= radius_sq."""
    return int(norms_in_sphere(G, radius_sq).size)


def theta_shells(G, radius_sq):
    """Shell decomposition (radius_sq, count) of the ball of squared radius."""
    norms = norms_in_sphere(G, radius_sq)
    shells = []
    i = 0
    while i < norms.size:
        j = i
        while j + 1 < norms.size and norms[j + 1] - norms[i] <= 1e-6 * (1.0 + norms[i]):
            j += 1
        shells.append(ShellCount(radius_sq=float(norms[i:j + 1].mean()),
                                 count=j - i + 1))
        i = j + 1
    return shells


def kissing_number(G):
    """Number of lattice points at the minimum distance."""
    d = minimum_distance(G)
    return count_points_in_sphere(G, d * d * (1.0 + 1e-9))


def relevant_vectors(G):
    """Relevant Voronoi vectors via the 2-lattice coset search.

    Each nonzero coset of Lambda/2Lambda whose minimal vectors are unique
    up to sign contributes that +/- pair; the union over cosets is exactly
    the set of relevant vectors.
    """
    n = G.n
    if n > 16:
        raise BudgetExceededError("relevant_vectors limited to n <= 16")
    ctx = G._ctx
    L2 = np.ascontiguousarray(2.0 * ctx.L)
    eye = np.eye(n, dtype=np.int64)
    budget = node_budget()
    out = []
    for mask in range(1, 1 << n):
        c = np.array([(mask >> i) & 1 for i in range(n)], dtype=float)
        target = -(c @ ctx.basis_red)
        yp = target @ ctx.Q.T
        status, _, dmin, _ = _kernels._decode_se(L2, yp, eye, budget)
        if status != STATUS_OK:
            raise BudgetExceededError("relevant-vector enumeration budget exceeded")
        status, Z, count = _kernels._collect_within(
            L2, yp, dmin * (1.0 + 1e-9), budget, 1 << 14)
        if status != STATUS_OK:
            raise BudgetExceededError("relevant-vector enumeration budget exceeded")
        if count == 2:
            for r in range(2):
                out.append((c + 2.0 * Z[r]) @ ctx.basis_red)
    return out


def nominal_coding_gain(G):
    """d^2 / vol^(2/n)."""
    d = minimum_distance(G)
    return d * d / G.volume ** (2.0 / G.n)


def sigma_from_vnr(G, Delta):
    """Noise variance at a given volume-to-noise ratio."""
    if Delta <= 0:
        raise ValueError("Delta must be > 0")
    return G.volume ** (2.0 / G.n) / (2.0 * math.pi * math.e * Delta)
