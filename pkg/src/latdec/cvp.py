"""Closest-vector solvers and the parallelotope reduction pipeline.

All decoders break ties between equidistant lattice points by returning
the lexicographically smallest integer vector z, which makes them
deterministic and cross-checkable.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import STATUS_OK
from .lattices import BudgetExceededError, node_budget

ALPHA_CLAMP_TOL = 1e-12

INNER_DECODERS = ("sphere", "zf", "corner", "extended-corner", "hld", "folding")


@dataclass(frozen=True)
class DecodeResult:
    """A decoded lattice point x = z @ G at squared distance dist_sq."""
    z: np.ndarray
    x: np.ndarray
    dist_sq: float


@dataclass(frozen=True)
class ParallelotopeCoords:
    """Integer translation t and fractional coordinates alpha of a point."""
    t: np.ndarray
    y_reduced: np.ndarray
    alpha: np.ndarray


def _result(G, z, y):
    z = np.asarray(z, dtype=np.int64)
    x = z @ G.matrix
    diff = y - x
    return DecodeResult(z=z, x=x, dist_sq=float(diff @ diff))


def sphere_decode(G, y):
    """Globally optimal closest lattice point (LLL + Schnorr-Euchner)."""
    y = np.asarray(y, dtype=float)
    if G.n > 24:
        raise BudgetExceededError("sphere_decode limited to n <= 24")
    ctx = G._ctx
    yp = np.ascontiguousarray(y @ ctx.Q.T)
    status, z, _, _ = _kernels._decode_se(ctx.L, yp, ctx.U, node_budget())
    if status != STATUS_OK:
        raise BudgetExceededError("sphere decoding budget exceeded")
    return _result(G, z, y)


def sphere_decode_batch(G, Y):
    """Vectorised sphere decoding; returns the integer matrix Z (rows are z)."""
    Y = np.asarray(Y, dtype=float)
    ctx = G._ctx
    Yp = np.ascontiguousarray(Y @ ctx.Q.T)
    status, Z, _, _ = _kernels._decode_se_batch(ctx.L, Yp, ctx.U, node_budget())
    if status != STATUS_OK:
        raise BudgetExceededError("sphere decoding budget exceeded")
    return Z


def zf_decode(G, y):
    """Zero-forcing: round y @ G^-1 componentwise, halves toward +inf."""
    y = np.asarray(y, dtype=float)
    t = y @ G.inverse
    z = np.floor(t + 0.5).astype(np.int64)
    return _result(G, z, y)


def reduce_to_parallelotope(G, y0):
    """Translate y0 into the fundamental parallelotope of the basis."""
    y0 = np.asarray(y0, dtype=float)
    q = y0 @ G.inverse
    t = np.floor(q)
    alpha = q - t
    # floating-point edge: q just below an integer can round alpha up to 1.0
    wrap = alpha >= 1.0 - ALPHA_CLAMP_TOL
    alpha[wrap] = 0.0
    t[wrap] += 1.0
    t = t.astype(np.int64)
    return ParallelotopeCoords(t=t, y_reduced=alpha @ G.matrix, alpha=alpha)


def corner_decode(G, y):
    """Closest point among the 2^n corners z in {0,1}^n of P(B)."""
    if G.n > 20:
        raise ValueError("corner_decode limited to n <= 20")
    y = np.asarray(y, dtype=float)
    L, Q = G._tri
    yp = np.ascontiguousarray(y @ Q.T)
    status, z, _, _ = _kernels._box_decode(L, yp, 0, 1, node_budget())
    if status != STATUS_OK:
        raise BudgetExceededError("corner decoding budget exceeded")
    return _result(G, z, y)


def extended_corner_decode(G, y):
    """Closest point among z in {-1,0,1,2}^n (pruned search)."""
    if G.n > 12:
        raise ValueError("extended_corner_decode limited to n <= 12")
    y = np.asarray(y, dtype=float)
    L, Q = G._tri
    yp = np.ascontiguousarray(y @ Q.T)
    status, z, _, _ = _kernels._box_decode(L, yp, -1, 2, node_budget())
    if status != STATUS_OK:
        raise BudgetExceededError("extended corner decoding budget exceeded")
    return _result(G, z, y)


def _resolve_inner(G, inner):
    if isinstance(inner, str):
        if inner == "sphere":
            return lambda y: sphere_decode(G, y)
        if inner == "zf":
            return lambda y: zf_decode(G, y)
        if inner == "corner":
            return lambda y: corner_decode(G, y)
        if inner == "extended-corner":
            return lambda y: extended_corner_decode(G, y)
        if inner == "hld":
            from .hld import HldDecoder
            return HldDecoder.for_lattice(G).decode_reduced
        if inner == "folding":
            from .folding import FoldingDecoder
            family = G.info.get("family")
            if family not in ("A", "D", "E"):
                raise ValueError("folding decoder needs an A/D/E family lattice")
            return FoldingDecoder.for_lattice(G).decode_reduced
        raise ValueError(f"unknown inner decoder {inner!r}; "
                         f"expected one of {INNER_DECODERS}")
    if callable(inner):
        return inner
    raise TypeError("inner must be a decoder name or a callable")


def pipeline_decode(G, y0, inner="sphere"):
    """Reduce to P(B), run the inner decoder there, translate back."""
    y0 = np.asarray(y0, dtype=float)
    decode = _resolve_inner(G, inner)
    coords = reduce_to_parallelotope(G, y0)
    res = decode(coords.y_reduced)
    z = res.z + coords.t
    return _result(G, z, y0)
