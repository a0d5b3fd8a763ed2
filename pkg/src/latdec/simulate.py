"""Gaussian-channel Monte Carlo harness.

Every trial transmits the zero point (decoder translation invariance is
property-tested separately), adds i.i.d. noise at the variance implied by
the requested VNR, reduces to the fundamental parallelotope and decodes
there.  The CP and ExtCP curves reuse the maximum-likelihood decode and
only change the error rule, so their dominance over MLD is exact per
trial, not just in expectation.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, lattices
from ._kernels import STATUS_OK
from .lattices import BudgetExceededError, node_budget
from .vr import wilson_interval

DECODERS = ("mld", "sphere", "zf", "corner", "extended-corner",
            "cp", "extcp", "hld", "folding")


@dataclass(frozen=True)
class SimulationConfig:
    """Monte-Carlo plan: VNR grid (linear), decoders, and the stop rule."""
    deltas: tuple
    decoders: tuple = ("mld",)
    trials: int = 10**6
    max_errors: int = 200
    seed: int = 0
    workers: int = 1
    shard_size: int = 20_000

    def __post_init__(self):
        if any(d <= 0 for d in self.deltas):
            raise ValueError("Delta values must be > 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for d in self.decoders:
            if d not in DECODERS:
                raise ValueError(f"unknown decoder {d!r}")


@dataclass(frozen=True)
class ReportRow:
    decoder: str
    delta: float
    errors: int
    trials: int
    rate: float
    ci_lo: float
    ci_hi: float


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def row(self, decoder, delta):
        for r in self.rows:
            if r.decoder == decoder and abs(r.delta - delta) < 1e-12:
                return r
        raise KeyError((decoder, delta))


def _make_row(decoder, delta, errors, trials):
    errors = int(errors)
    trials = int(trials)
    lo, hi = wilson_interval(errors, trials)
    return ReportRow(decoder=decoder, delta=float(delta), errors=errors,
                     trials=trials, rate=errors / trials,
                     ci_lo=lo, ci_hi=hi)


def _reduced_noise(G, sigma, size, rng):
    """Noise, its parallelotope translation, and the reduced points."""
    eta = rng.standard_normal((size, G.n)) * sigma
    T = np.floor(eta @ G.inverse).astype(np.int64)
    Y = eta - T @ G.matrix
    return eta, T, Y


def _mld_rule_masks(G, sigma, size, rng):
    """Per-trial error masks for the mld / cp / extcp rules (shared decode)."""
    _, T, Y = _reduced_noise(G, sigma, size, rng)
    ctx = G._ctx
    Yp = np.ascontiguousarray(Y @ ctx.Q.T)
    status, Zr, _, _ = _kernels._decode_se_batch(ctx.L, Yp, ctx.U, node_budget())
    if status != STATUS_OK:
        raise BudgetExceededError("sphere decoding budget exceeded")
    err_mld = ((Zr + T) != 0).any(axis=1)
    err_cp = err_mld | ((Zr < 0) | (Zr > 1)).any(axis=1)
    err_ext = err_mld | ((Zr < -1) | (Zr > 2)).any(axis=1)
    return err_mld, err_cp, err_ext


def _box_rule_errors(G, sigma, size, rng, lo, hi):
    _, T, Y = _reduced_noise(G, sigma, size, rng)
    L, Q = G._tri
    Yp = Y @ Q.T
    errors = 0
    for r in range(size):
        status, z, _, _ = _kernels._box_decode(L, Yp[r], lo, hi, node_budget())
        if status != STATUS_OK:
            raise BudgetExceededError("corner decoding budget exceeded")
        if np.any(z + T[r] != 0):
            errors += 1
    return errors


def _shard_errors(G, decoder, sigma, size, ss):
    rng = np.random.default_rng(ss)
    if decoder in ("mld", "sphere", "cp", "extcp"):
        masks = _mld_rule_masks(G, sigma, size, rng)
        pick = {"mld": 0, "sphere": 0, "cp": 1, "extcp": 2}[decoder]
        return int(masks[pick].sum())
    if decoder == "zf":
        eta = rng.standard_normal((size, G.n)) * sigma
        Z = np.floor(eta @ G.inverse + 0.5).astype(np.int64)
        return int((Z != 0).any(axis=1).sum())
    if decoder == "corner":
        return _box_rule_errors(G, sigma, size, rng, 0, 1)
    if decoder == "extended-corner":
        return _box_rule_errors(G, sigma, size, rng, -1, 2)
    if decoder == "hld":
        from .hld import HldDecoder, hld_decode_batch
        dec = HldDecoder.for_lattice(G)
        _, T, Y = _reduced_noise(G, sigma, size, rng)
        bits = hld_decode_batch(dec.dnfs, Y)
        return int(((bits + T) != 0).any(axis=1).sum())
    if decoder == "folding":
        from .folding import FoldingDecoder
        dec = FoldingDecoder.for_lattice(G)
        _, T, Y = _reduced_noise(G, sigma, size, rng)
        errors = 0
        for r in range(size):
            z = dec.decode_reduced(Y[r]).z
            if np.any(z + T[r] != 0):
                errors += 1
        return errors
    raise ValueError(f"unknown decoder {decoder!r}")


def simulate_error_rate(G, decoder, Delta, config):
    """One report row: decoder error rate at the given VNR."""
    if decoder not in DECODERS:
        raise ValueError(f"unknown decoder {decoder!r}")
    sigma = math.sqrt(lattices.sigma_from_vnr(G, Delta))
    sizes = []
    left = config.trials
    while left > 0:
        sizes.append(min(left, config.shard_size))
        left -= sizes[-1]
    seeds = np.random.SeedSequence(config.seed).spawn(len(sizes))

    def run(args):
        size, ss = args
        return _shard_errors(G, decoder, sigma, size, ss)

    errors = trials = 0
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            for size, shard_errs in zip(sizes, pool.map(run, zip(sizes, seeds))):
                errors += shard_errs
                trials += size
                if errors >= config.max_errors:
                    break
    else:
        for size, ss in zip(sizes, seeds):
            errors += run((size, ss))
            trials += size
            if errors >= config.max_errors:
                break
    return _make_row(decoder, Delta, errors, trials)


def run_simulation(G, config):
    """Full grid: every configured decoder at every Delta."""
    report = ExperimentReport(metadata={
        "seed": config.seed, "trials": config.trials,
        "max_errors": config.max_errors, "lattice": dict(G.info),
        "n": G.n,
    })
    for decoder in config.decoders:
        for delta in config.deltas:
            report.rows.append(simulate_error_rate(G, decoder, delta, config))
    return report


def mimo_vr_experiment(half_n, num_lattices, deltas, seed,
                       trials_per_delta=20_000, workers=1):
    """MLD / CP / ExtCP error rates averaged over an LLL-reduced ensemble.

    Every lattice contributes the same number of trials per grid point;
    the three rules share each trial's decode, so ExtCP <= CP <= ... holds
    per draw.
    """
    n = 2 * half_n
    if n > 20:
        raise ValueError("corner-rule experiments limited to n <= 20")
    deltas = [float(d) for d in deltas]
    per_lat = -(-int(trials_per_delta) // int(num_lattices))
    base = np.random.SeedSequence(seed)
    children = base.spawn(num_lattices)

    def one_lattice(i):
        child = children[i]
        lat_seed = int(child.generate_state(1)[0])
        G = lattices.lll_reduce(lattices.random_mimo_generator(half_n, lat_seed))
        noise_seeds = child.spawn(len(deltas))
        counts = np.zeros((3, len(deltas)), dtype=np.int64)
        for di, delta in enumerate(deltas):
            sigma = math.sqrt(lattices.sigma_from_vnr(G, delta))
            rng = np.random.default_rng(noise_seeds[di])
            m_mld, m_cp, m_ext = _mld_rule_masks(G, sigma, per_lat, rng)
            counts[0, di] = m_mld.sum()
            counts[1, di] = m_cp.sum()
            counts[2, di] = m_ext.sum()
        return counts

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            all_counts = list(pool.map(one_lattice, range(num_lattices)))
    else:
        all_counts = [one_lattice(i) for i in range(num_lattices)]

    totals = np.sum(all_counts, axis=0)
    trials = per_lat * num_lattices
    report = ExperimentReport(metadata={
        "half_n": half_n, "n": n, "num_lattices": num_lattices,
        "seed": seed, "trials_per_delta": trials,
        "ensemble": "complex CN(0,1) embedding, LLL-reduced",
    })
    for di, delta in enumerate(deltas):
        for row_i, name in enumerate(("mld", "cp", "extcp")):
            report.rows.append(_make_row(name, delta, totals[row_i, di], trials))
    return report


@dataclass
class PointsReport:
    """Lattice-point counts in the sphere of squared radius 2 d^2."""
    n: int
    counts: np.ndarray
    skipped: list
    seed: int

    @property
    def mean(self):
        return float(np.mean(self.counts))

    def histogram(self, bin_width=20):
        hi = int(self.counts.max()) + bin_width
        edges = np.arange(0, hi + bin_width, bin_width)
        vals, _ = np.histogram(self.counts, bins=edges)
        return edges, vals


def points_in_sphere_experiment(half_n, num_lattices, seed, workers=1):
    """Average number of points within squared radius 2 d^2(Lambda).

    The ensemble is i.i.d. real N(0,1) generator matrices (generic
    lattices, free of the complex embedding's extra symmetry),
    LLL-reduced before the shortest-vector computation.  Lattices whose
    enumeration blows the budget are skipped and recorded.
    """
    n = 2 * half_n
    if n not in (10, 12, 14, 16):
        raise ValueError("points experiment defined for n in {10, 12, 14, 16}")
    base = np.random.SeedSequence(seed)
    lat_seeds = [int(c.generate_state(1)[0]) for c in base.spawn(num_lattices)]

    def one(i):
        try:
            G = lattices.lll_reduce(lattices.random_real_generator(n, lat_seeds[i]))
            d = lattices.minimum_distance(G)
            return lattices.count_points_in_sphere(G, 2.0 * d * d)
        except BudgetExceededError:
            return None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(num_lattices)))
    else:
        results = [one(i) for i in range(num_lattices)]

    skipped = [i for i, r in enumerate(results) if r is None]
    counts = np.array([r for r in results if r is not None], dtype=np.int64)
    return PointsReport(n=n, counts=counts, skipped=skipped, seed=seed)
