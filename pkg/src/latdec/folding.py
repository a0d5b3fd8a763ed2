"""Reflection-based folding of the coordinate-1 decision boundary.

The A/D/E family bases are symmetric under exchanging certain basis
vectors; reflecting across the corresponding bisector hyperplanes maps
the boundary function onto itself while shrinking its domain, so only a
linear number of affine pieces has to be kept.
"""

from dataclasses import dataclass

import numpy as np

from . import complexity, cvp, hld, lattices
from .hld import CoordinateDNF, NetLayer, PiecewiseNetwork
from .lattices import GeneratorMatrix

CHAMBER_TOL = 1e-9


@dataclass(frozen=True)
class ReflectionSequence:
    """Ordered reflection pairs (1-based basis indices) and unit normals.

    normals live in the (n-1)-dimensional oriented-frame tilde space and
    are proportional to the tilde part of g_j - g_k.
    """
    family: str
    n: int
    pairs: tuple
    normals: np.ndarray


def reflection_pairs(family, n):
    """Basis-vector index pairs whose bisectors fold the boundary."""
    if family == "A":
        if n < 2:
            raise ValueError("A family needs n >= 2")
        return [(j, k) for j in range(2, n + 1) for k in range(j + 1, n + 1)]
    if family == "D":
        if n < 3:
            raise ValueError("D family needs n >= 3")
        return [(j, k) for j in range(3, n + 1) for k in range(j + 1, n + 1)]
    if family == "E":
        if not 6 <= n <= 8:
            raise ValueError("E family needs 6 <= n <= 8")
        return [(2, 3)] + [(j, k) for j in range(4, n + 1)
                           for k in range(j + 1, n + 1)]
    raise ValueError("folding is defined for the A, D, E families")


def build_reflection_sequence(family, n, G_oriented):
    """Reflection sequence in the oriented frame of the family basis."""
    pairs = reflection_pairs(family, n)
    M = G_oriented.matrix
    normals = np.zeros((len(pairs), n - 1))
    for i, (j, k) in enumerate(pairs):
        v = M[j - 1] - M[k - 1]
        if abs(v[0]) > 1e-9:
            raise ValueError("basis is not oriented (g_j - g_k leaves the "
                             "tilde space)")
        vt = v[1:]
        normals[i] = vt / np.linalg.norm(vt)
    return ReflectionSequence(family=family, n=n, pairs=tuple(pairs),
                              normals=normals)


def reflect_if_negative(y_tilde, normal):
    """Mirror y_tilde across the normal's hyperplane if on the negative side."""
    y_tilde = np.asarray(y_tilde, dtype=float)
    dot = float(y_tilde @ normal)
    if dot >= 0:
        return y_tilde.copy()
    return y_tilde - 2.0 * dot * np.asarray(normal)


def fold(seq, y_tilde):
    """Apply reflection passes until a full pass leaves the point fixed."""
    y = np.asarray(y_tilde, dtype=float).copy()
    n = seq.n
    for _ in range(n * n + 2):
        changed = False
        for v in seq.normals:
            dot = y @ v
            if dot < 0:
                y -= 2.0 * dot * v
                changed = True
        if not changed:
            break
    else:
        raise RuntimeError("folding did not converge; broken normal set")
    if seq.normals.size and np.min(y @ seq.normals.T) < -CHAMBER_TOL:
        raise RuntimeError("folded point left the fundamental chamber")
    return y


def fold_batch(seq, Yt):
    """Vectorised fold of many tilde-space points (rows)."""
    Y = np.array(Yt, dtype=float)
    n = seq.n
    for _ in range(n * n + 2):
        changed = False
        for v in seq.normals:
            dots = Y @ v
            mask = dots < 0
            if mask.any():
                Y[mask] -= 2.0 * dots[mask, None] * v[None, :]
                changed = True
        if not changed:
            break
    else:
        raise RuntimeError("folding did not converge; broken normal set")
    return Y


def folded_piece_set(family, n, dnf, G_oriented=None):
    """Restrict a coordinate-1 DNF to the folded domain.

    An AND-term survives when its owning corner sits on the nonnegative
    side of every reflection hyperplane; its literals survive when the
    paired bit-0 corner does too.  The retained piece total must match the
    closed-form folded count, otherwise the synthesis is inconsistent.
    """
    if dnf.coordinate != 0:
        raise ValueError("folding applies to the first-coordinate DNF")
    if G_oriented is None:
        G_oriented, _ = hld.orient_basis(lattices.family_generator(family, n))
    seq = build_reflection_sequence(family, n, G_oriented)
    M = G_oriented.matrix

    def in_chamber(z):
        xt = (np.asarray(z, dtype=float) @ M)[1:]
        return seq.normals.size == 0 or np.min(seq.normals @ xt) >= -CHAMBER_TOL

    terms, corners, neighbors = [], [], []
    for t, corner, lit in zip(dnf.terms, dnf.term_corners,
                              dnf.literal_neighbors):
        if not in_chamber(corner):
            continue
        keep = tuple(i for i in t if in_chamber(lit[i]))
        if not keep:
            continue
        terms.append(keep)
        corners.append(corner)
        neighbors.append({i: lit[i] for i in keep})

    out = CoordinateDNF(coordinate=0, hyperplanes=list(dnf.hyperplanes),
                        terms=terms, term_corners=corners,
                        literal_neighbors=neighbors)
    expected = complexity.count_pieces_folded(family, n)
    got = hld.piece_count(out)
    if got != expected:
        raise RuntimeError(f"folded piece count self-check failed: "
                           f"{got} != {expected} for {family}_{n}")
    return out


def folded_decode(family, n, dnf_folded, seq, y):
    """First-coordinate bit of a point in P(B) via the folded discriminator."""
    y = np.asarray(y, dtype=float)
    yt = fold(seq, y[1:])
    point = np.concatenate(([y[0]], yt))
    U = (dnf_folded.plane_matrix @ point - dnf_folded.plane_offsets) >= 0
    return int(any(U[list(t)].all() for t in dnf_folded.distinct_terms))


def folded_decode_batch(family, n, dnf_folded, seq, Y):
    """Vectorised folded_decode over rows of Y."""
    Y = np.asarray(Y, dtype=float)
    Yt = fold_batch(seq, Y[:, 1:])
    P = np.column_stack([Y[:, 0], Yt])
    U = (P @ dnf_folded.plane_matrix.T - dnf_folded.plane_offsets) >= 0
    return hld._dnf_bits(dnf_folded, U).astype(np.int64)


def _reflection_block(normal_tilde, n):
    """Two layers computing y -> mirror image when y . v < 0 (v lifted to n-d)."""
    v = np.concatenate(([0.0], normal_tilde))
    Wa = np.column_stack([np.eye(n), -v])
    ba = np.zeros(n + 1)
    act_a = tuple(["identity"] * n + ["ramp"])
    Wb = np.vstack([np.eye(n), 2.0 * v[None, :]])
    bb = np.zeros(n)
    return [NetLayer(W=Wa, b=ba, act=act_a, tag="reflection"),
            NetLayer(W=Wb, b=bb, act="identity", tag="reflection")]


def export_folding_network(family, n, seq, dnf_folded, passes=1):
    """Reflection blocks (one sweep per pass) followed by the reduced HLD.

    The lexicographic pair order makes a single sweep reach the
    fundamental chamber for these families; extra passes are supported
    for robustness experiments.
    """
    layers = []
    for _ in range(passes):
        for v in seq.normals:
            layers.extend(_reflection_block(v, n))
    head = hld.export_hld_network([dnf_folded])
    layers.extend(head.layers)
    return PiecewiseNetwork(layers=layers)


def _permutation_for_coordinate(family, n, i):
    """Basis reordering that moves coordinate i first, or None.

    Valid only when the family Gram is invariant under it: every
    coordinate for A, the first two for D, only the first for E.
    """
    if i == 0:
        return list(range(n))
    if family == "A":
        return [i] + [j for j in range(n) if j != i]
    if family == "D" and i == 1:
        return [1, 0] + list(range(2, n))
    return None


class FoldingDecoder:
    """Full-vector decoder built from per-coordinate folded discriminators.

    Coordinates whose role is not exchangeable with the first under the
    family symmetry fall back to the plain HLD equations.
    """

    _cache = {}

    def __init__(self, family, n):
        self.family = family
        self.n = n
        gram = lattices.gram_for_family(family, n)
        self.G = lattices.generator_from_gram(gram)
        self.G.info.update({"family": family, "n": n})
        self._folded = {}
        self._plain = {}
        for i in range(n):
            perm = _permutation_for_coordinate(family, n, i)
            if perm is not None and np.array_equal(gram[np.ix_(perm, perm)],
                                                   gram):
                Gp = GeneratorMatrix(self.G.matrix[perm])
                G_or, Q = hld.orient_basis(Gp)
                dnf = hld.synthesize_hld(G_or, 0)
                seq = build_reflection_sequence(family, n, G_or)
                folded = folded_piece_set(family, n, dnf, G_oriented=G_or)
                self._folded[i] = (Q, folded, seq)
            else:
                self._plain[i] = hld.synthesize_hld(self.G, i)

    @classmethod
    def for_lattice(cls, G):
        family = G.info.get("family")
        n = G.n
        if family not in ("A", "D", "E"):
            raise ValueError("folding decoder needs an A/D/E family lattice")
        if np.max(np.abs(G.gram - lattices.gram_for_family(family, n))) > 1e-9:
            raise ValueError("lattice basis does not match its declared family")
        key = (family, n)
        if key not in cls._cache:
            cls._cache[key] = cls(family, n)
        return cls._cache[key]

    def decode_reduced(self, y):
        y = np.asarray(y, dtype=float)
        z = np.zeros(self.n, dtype=np.int64)
        for i, (Q, folded, seq) in self._folded.items():
            z[i] = folded_decode(self.family, self.n, folded, seq, y @ Q)
        for i, dnf in self._plain.items():
            U = (dnf.plane_matrix @ y - dnf.plane_offsets) >= 0
            z[i] = int(any(U[list(t)].all() for t in dnf.distinct_terms))
        x = z @ self.G.matrix
        diff = y - x
        return cvp.DecodeResult(z=z, x=x, dist_sq=float(diff @ diff))
