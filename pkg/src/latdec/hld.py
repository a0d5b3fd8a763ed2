"""Hyperplane logical decoder.

A coordinate is decoded by an OR of ANDs over Heaviside comparisons
against boundary facet hyperplanes.  Synthesis probes every (corner with
bit 1, relevant vector) pair: step half the vector's norm plus epsilon,
keep the bisector whenever the probe stays in P(B) and decodes across the
boundary.  Duplicate AND-terms are kept (their owning corners differ and
folding needs them); structural consumers deduplicate.
"""

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import cvp, lattices
from .lattices import GeneratorMatrix

PROBE_ALPHA_TOL = 1e-9
DEDUP_TOL = 1e-7

ACTIVATIONS = ("heaviside", "ramp", "neg-ramp", "identity")


@dataclass(frozen=True)
class Hyperplane:
    """Unit-normal boundary facet: the owning bit-1 corner has x.v - p > 0."""
    normal: np.ndarray
    offset: float


@dataclass(eq=False)
class CoordinateDNF:
    """Boolean OR-of-ANDs decoding one coordinate.

    terms[i] are sorted hyperplane indices; term_corners[i] is the owning
    corner (integer z) and literal_neighbors[i][j] the bit-0 corner across
    hyperplane j.  Terms may repeat as index sets when distinct corners
    share all facets; structural counts deduplicate.
    """
    coordinate: int
    hyperplanes: list
    terms: list
    term_corners: list
    literal_neighbors: list

    @cached_property
    def plane_matrix(self):
        return np.array([h.normal for h in self.hyperplanes])

    @cached_property
    def plane_offsets(self):
        return np.array([h.offset for h in self.hyperplanes])

    @cached_property
    def distinct_terms(self):
        seen = []
        for t in self.terms:
            if t not in seen:
                seen.append(t)
        return seen


def heaviside(x):
    """Heaviside step; exactly-zero arguments map to 1 for determinism."""
    return np.where(np.asarray(x) >= 0, 1.0, 0.0)


def piece_count(dnf):
    """Number of affine boundary pieces: sum of distinct AND-term sizes."""
    return sum(len(t) for t in dnf.distinct_terms)


def orient_basis(G):
    """Rotate so rows 2..n have first coordinate 0 and row 1 points up.

    Returns (rotated GeneratorMatrix, rotation Q) with rotated = G @ Q.
    """
    M = G.matrix
    n = G.n
    if n < 2:
        raise ValueError("orientation needs n >= 2")
    Qt, _ = np.linalg.qr(M[1:].T, mode="complete")
    q1 = Qt[:, -1]
    if M[0] @ q1 < 0:
        q1 = -q1
    Q = np.column_stack([q1, Qt[:, :-1]])
    if np.linalg.det(Q) < 0:
        Q[:, -1] *= -1
    rotated = M @ Q
    rotated[1:, 0] = 0.0  # exact by construction, clear the ~1e-16 residue
    return GeneratorMatrix(rotated, info=dict(G.info)), Q


def _cluster_hyperplanes(normals, offsets, tol=DEDUP_TOL):
    """Group coincident oriented hyperplanes. Returns (reps, labels).

    Two raw hyperplanes coincide when both the unit normals and offsets
    agree within tol.  Representatives are cluster means.
    """
    m = normals.shape[0]
    sq = np.sum(normals * normals, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (normals @ normals.T)
    close = (d2 <= tol * tol) & (np.abs(offsets[:, None] - offsets[None, :]) <= tol)

    parent = np.arange(m)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    ii, jj = np.nonzero(np.triu(close, k=1))
    for a, b in zip(ii, jj):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    roots = np.array([find(a) for a in range(m)])
    labels = np.zeros(m, dtype=np.int64)
    reps = []
    for root in sorted(set(roots.tolist())):
        members = roots == root
        labels[members] = len(reps)
        v = normals[members].mean(axis=0)
        p = float(offsets[members].mean())
        reps.append(Hyperplane(normal=v, offset=p))
    return reps, labels


def synthesize_hld(G, coordinate, epsilon=None):
    """Boolean equation of one coordinate by brute-force boundary probing."""
    n = G.n
    if n > 10:
        raise ValueError("synthesis limited to n <= 10 (2^(n-1) tau_f probes)")
    if not 0 <= coordinate < n:
        raise ValueError("coordinate out of range")
    rel = np.array(lattices.relevant_vectors(G))
    if epsilon is None:
        epsilon = 1e-4 * lattices.minimum_distance(G)

    corners = np.array(
        [z for z in itertools.product((0, 1), repeat=n) if z[coordinate] == 1],
        dtype=np.int64)
    X = corners @ G.matrix
    norms = np.linalg.norm(rel, axis=1)
    scale = 0.5 + epsilon / norms
    probes = X[:, None, :] + rel[None, :, :] * scale[None, :, None]
    alphas = probes @ G.inverse
    inside = np.all((alphas >= -PROBE_ALPHA_TOL) &
                    (alphas <= 1.0 + PROBE_ALPHA_TOL), axis=2)

    decoded = cvp.sphere_decode_batch(G, probes[inside])
    bit_across = np.zeros(inside.shape, dtype=np.int64)
    bit_across[inside] = decoded[:, coordinate]

    step_z = np.rint(rel @ G.inverse).astype(np.int64)
    raw_normals, raw_offsets = [], []
    raw_terms = []
    for ci, z in enumerate(corners):
        lits = []
        for vi in range(rel.shape[0]):
            if not inside[ci, vi]:
                continue
            if bit_across[ci, vi] == 1:
                continue
            vn = -rel[vi] / norms[vi]
            p = float(vn @ (X[ci] + 0.5 * rel[vi]))
            lits.append((len(raw_normals), z + step_z[vi]))
            raw_normals.append(vn)
            raw_offsets.append(p)
        if not lits:
            raise RuntimeError(f"corner {z.tolist()} produced an empty AND-term")
        raw_terms.append((z, lits))

    reps, labels = _cluster_hyperplanes(np.array(raw_normals),
                                        np.array(raw_offsets))
    terms, term_corners, literal_neighbors = [], [], []
    for z, lits in raw_terms:
        pooled = {}
        for raw_idx, neighbor in lits:
            pid = int(labels[raw_idx])
            if pid in pooled:
                raise RuntimeError("two probes from one corner hit one facet")
            pooled[pid] = neighbor
        ids = tuple(sorted(pooled))
        terms.append(ids)
        term_corners.append(z)
        literal_neighbors.append({pid: pooled[pid] for pid in ids})
    return CoordinateDNF(coordinate=coordinate, hyperplanes=reps, terms=terms,
                         term_corners=term_corners,
                         literal_neighbors=literal_neighbors)


def synthesize_all(G, epsilon=None):
    """One CoordinateDNF per coordinate."""
    return [synthesize_hld(G, i, epsilon) for i in range(G.n)]


def _dnf_bits(dnf, U):
    """OR-of-ANDs over precomputed Heaviside bits U (batch, planes)."""
    out = np.zeros(U.shape[0], dtype=bool)
    for t in dnf.distinct_terms:
        out |= np.all(U[:, list(t)], axis=1)
    return out


def hld_decode(dnfs, y):
    """Decode every coordinate of a point in P(B). Returns integer bits."""
    return hld_decode_batch(dnfs, np.asarray(y, dtype=float)[None, :])[0]


def hld_decode_batch(dnfs, Y):
    """Batch HLD decode; rows of Y are points in P(B)."""
    Y = np.asarray(Y, dtype=float)
    if not dnfs:
        raise ValueError("need at least one coordinate DNF")
    n = dnfs[0].plane_matrix.shape[1]
    coords = sorted(d.coordinate for d in dnfs)
    if coords != list(range(n)):
        raise ValueError("need exactly one DNF per coordinate")
    bits = np.zeros((Y.shape[0], len(dnfs)), dtype=np.int64)
    for dnf in dnfs:
        U = (Y @ dnf.plane_matrix.T - dnf.plane_offsets) >= 0
        bits[:, dnf.coordinate] = _dnf_bits(dnf, U)
    return bits


def boundary_eval(dnf, y_tilde):
    """Height of the decision boundary over the oriented-frame point y_tilde.

    min over AND-terms of max over term literals of the facet's affine
    height, valid when every involved normal has positive first component.
    """
    y_tilde = np.asarray(y_tilde, dtype=float)
    V = dnf.plane_matrix
    used = sorted({i for t in dnf.distinct_terms for i in t})
    if np.any(V[used, 0] <= 1e-12):
        raise ValueError("boundary is not a function here")
    heights = (dnf.plane_offsets[used] - y_tilde @ V[used, 1:].T) / V[used, 0]
    pos = {i: k for k, i in enumerate(used)}
    return min(max(heights[pos[i]] for i in t) for t in dnf.distinct_terms)


@dataclass(eq=False)
class NetLayer:
    W: np.ndarray
    b: np.ndarray
    act: object  # activation tag or per-unit tuple of tags
    tag: str = None


@dataclass(eq=False)
class PiecewiseNetwork:
    """Layered affine maps with named piecewise-linear activations."""
    layers: list = field(default_factory=list)


def _apply_activation(act, x):
    if isinstance(act, str):
        if act == "heaviside":
            return heaviside(x)
        if act == "ramp":
            return np.maximum(x, 0.0)
        if act == "neg-ramp":
            return np.maximum(-x, 0.0)
        if act == "identity":
            return x
        raise ValueError(f"unknown activation {act!r}")
    out = np.empty_like(x)
    for j, a in enumerate(act):
        out[..., j] = _apply_activation(a, x[..., j])
    return out


def network_forward(net, y):
    """Exact layered evaluation of a PiecewiseNetwork."""
    v = np.asarray(y, dtype=float)
    for layer in net.layers:
        if v.shape[-1] != layer.W.shape[0]:
            raise ValueError("layer dimension mismatch")
        v = _apply_activation(layer.act, v @ layer.W + layer.b)
    return v


def export_hld_network(dnfs):
    """Three-layer Heaviside network equivalent to hld_decode.

    Layer 1 projects on the pooled hyperplanes, layer 2 computes the AND
    gates (unit weights, bias -(fan-in - 1/2)), layer 3 the OR gates
    (unit weights, bias -1/2).
    """
    if not dnfs:
        raise ValueError("need at least one coordinate DNF")
    dnfs = sorted(dnfs, key=lambda d: d.coordinate)
    n = dnfs[0].plane_matrix.shape[1]

    blocks, offsets, base = [], [], 0
    term_cols = []
    for dnf in dnfs:
        blocks.append(dnf.plane_matrix)
        offsets.append(dnf.plane_offsets)
        for t in dnf.distinct_terms:
            term_cols.append((dnf.coordinate, [base + i for i in t]))
        base += len(dnf.hyperplanes)

    P = base
    T = len(term_cols)
    W1 = np.vstack(blocks).T
    b1 = -np.concatenate(offsets)
    W2 = np.zeros((P, T))
    b2 = np.zeros(T)
    W3 = np.zeros((T, len(dnfs)))
    b3 = -0.5 * np.ones(len(dnfs))
    for col, (coord, ids) in enumerate(term_cols):
        W2[ids, col] = 1.0
        b2[col] = -(len(ids) - 0.5)
        W3[col, coord] = 1.0
    return PiecewiseNetwork(layers=[
        NetLayer(W=W1, b=b1, act="heaviside"),
        NetLayer(W=W2, b=b2, act="heaviside"),
        NetLayer(W=W3, b=b3, act="heaviside"),
    ])


class HldDecoder:
    """Pipeline-compatible decoder backed by per-coordinate DNFs."""

    _cache = {}

    def __init__(self, G, dnfs):
        self.G = G
        self.dnfs = dnfs

    @classmethod
    def for_lattice(cls, G, epsilon=None):
        key = G.matrix.tobytes()
        if key not in cls._cache:
            cls._cache[key] = cls(G, synthesize_all(G, epsilon))
        return cls._cache[key]

    def decode_reduced(self, y):
        """Decode a point of P(B) to a corner via the Boolean equations."""
        z = hld_decode(self.dnfs, y)
        x = z @ self.G.matrix
        diff = np.asarray(y, dtype=float) - x
        return cvp.DecodeResult(z=z, x=x, dist_sq=float(diff @ diff))
