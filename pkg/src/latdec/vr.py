"""Voronoi-reducedness analysis.

Uniform sampling of the fundamental parallelotope is exact: alpha drawn
uniformly from [0,1)^n gives y = alpha @ G.  A sample lands in the
non-VR region O exactly when its maximum-likelihood integer vector is
not binary.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import cvp, lattices

WILSON_Z = 1.959963984540054  # 95%


def wilson_interval(errors, trials):
    """Wilson score interval for a binomial proportion at 95%."""
    if trials <= 0:
        return (0.0, 1.0)
    errors = int(errors)
    trials = int(trials)
    z2 = WILSON_Z * WILSON_Z
    p = errors / trials
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (WILSON_Z / denom) * math.sqrt(
        p * (1 - p) / trials + z2 / (4 * trials * trials))
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class VrReport:
    """Monte-Carlo estimate of the non-VR volume fraction of P(B)."""
    vol_ratio: float
    ci: tuple
    d_oc_sq_over_rho_sq: float  # None when no sample fell in O
    samples: int
    hits: int

    def verdict(self):
        if self.hits == 0:
            return "VR-consistent"
        if self.vol_ratio < 1e-2:
            return "quasi-VR"
        return "not quasi-VR"


def _nonvr_shard(G, size, ss):
    rng = np.random.default_rng(ss)
    alpha = rng.random((size, G.n))
    Y = alpha @ G.matrix
    Z = cvp.sphere_decode_batch(G, Y)
    bad = ((Z < 0) | (Z > 1)).any(axis=1)
    hits = int(bad.sum())
    d_min = None
    if hits:
        d_min = min(cvp.corner_decode(G, y).dist_sq for y in Y[bad])
    return hits, d_min


def estimate_nonvr_volume(G, samples, seed, workers=1, shard_size=100_000):
    """Fraction of P(B) outside the corners' Voronoi regions.

    Also reports an upper estimate of d^2_OC / rho^2 taken over the
    samples that landed in O (the true minimum is over a continuum, so
    the sampled value can only overshoot).
    """
    sizes = []
    left = int(samples)
    while left > 0:
        sizes.append(min(left, shard_size))
        left -= sizes[-1]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda args: _nonvr_shard(G, *args),
                                    zip(sizes, seeds)))
    else:
        results = [_nonvr_shard(G, size, ss) for size, ss in zip(sizes, seeds)]

    hits = sum(r[0] for r in results)
    d_mins = [r[1] for r in results if r[1] is not None]
    rho_sq = (lattices.minimum_distance(G) / 2.0) ** 2
    d_ratio = min(d_mins) / rho_sq if d_mins else None
    return VrReport(vol_ratio=hits / samples,
                    ci=wilson_interval(hits, samples),
                    d_oc_sq_over_rho_sq=d_ratio,
                    samples=int(samples), hits=hits)


def verify_vr_interior(G, samples, seed):
    """Check that sampled interior points all decode to corners.

    Returns (True, None) or (False, witness_point).
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    left = int(samples)
    while left > 0:
        size = min(left, 100_000)
        left -= size
        alpha = rng.random((size, G.n))
        Y = alpha @ G.matrix
        Z = cvp.sphere_decode_batch(G, Y)
        bad = ((Z < 0) | (Z > 1)).any(axis=1)
        if bad.any():
            return False, Y[bad][0]
    return True, None


def pe_union_bound(G, Delta, radius_sq_cap):
    """Theta-series union bound truncated at the given squared radius."""
    sigma_sq = lattices.sigma_from_vnr(G, Delta)
    norms = lattices.norms_in_sphere(G, radius_sq_cap)
    if norms.size == 0:
        return 0.0
    return 0.5 * float(np.sum(np.exp(-norms / (8.0 * sigma_sq))))


def asymptotic_union_bound(tau, gamma, Delta):
    """Leading nearest-neighbour term (tau/2) exp(-pi e Delta gamma / 4)."""
    return 0.5 * tau * math.exp(-math.pi * math.e * Delta * gamma / 4.0)


def lemma1_bound(pe_ub, vol_ratio, d_oc_sq_over_rho_sq, gamma, Delta, n):
    """Upper bound on the corner-decoder error probability.

    pe_ub plus the non-VR escape term
    vol(O)/det * (e Delta)^(n/2) * exp(-pi e Delta gamma / 4 * d^2_OC/rho^2).
    """
    if Delta <= 0:
        raise ValueError("Delta must be > 0")
    escape = (vol_ratio * (math.e * Delta) ** (n / 2.0) *
              math.exp(-math.pi * math.e * Delta * gamma / 4.0
                       * d_oc_sq_over_rho_sq))
    return pe_ub + escape


def facet_distance(d, gamma, gamma_dual):
    """Distance from outside lattice points to a parallelotope facet plane."""
    if d <= 0 or gamma <= 0 or gamma_dual <= 0:
        raise ValueError("all arguments must be positive")
    return d / (math.sqrt(gamma_dual) * math.sqrt(gamma))
