"""Command-line entry point.

One binary, verb-style subcommands, machine-readable outputs only.  Exit
codes: 0 success, 1 validation error, 2 runtime/budget error.  The
enumeration node budget can be overridden globally through the
LATDEC_NODE_BUDGET environment variable.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import complexity, cvp, folding, hld, lattices, serialize, simulate, vr
from .lattices import BudgetExceededError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _default_workers():
    return os.cpu_count() or 1


def build_parser():
    p = _Parser(
        prog="latdec",
        description="Lattice decoding toolkit: generation, reduction, CVP, "
                    "VR analysis, boundary-logic synthesis, folding, piece "
                    "counting, and Gaussian-channel simulation.",
        epilog="Environment: LATDEC_NODE_BUDGET overrides the global "
               "enumeration node budget (default 10^9).")
    sub = p.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", parents=[], help="generate a lattice file",
                       description="Generate a structured-family or random "
                                   "MIMO lattice and write it as JSON.")
    g.add_argument("--family", choices=lattices.FAMILIES,
                   help="structured family tag")
    g.add_argument("--n", type=int, help="dimension (required with --family)")
    g.add_argument("--mimo-half-n", type=int,
                   help="antenna count for a random MIMO lattice (n = 2*half_n)")
    g.add_argument("--seed", type=int,
                   help="RNG seed (required for --mimo-half-n)")
    g.add_argument("--name", default=None, help="name stored in the file")
    g.add_argument("--out", required=True, help="output JSON path")

    r = sub.add_parser("reduce", help="LLL-reduce a lattice file")
    r.add_argument("--lattice", required=True)
    r.add_argument("--delta", type=float, default=0.99,
                   help="Lovasz parameter in (0.25, 1] (default 0.99)")
    r.add_argument("--out", required=True)

    d = sub.add_parser("decode", help="batch-decode points against a lattice")
    d.add_argument("--lattice", required=True)
    d.add_argument("--inner", default="sphere", choices=cvp.INNER_DECODERS,
                   help="inner decoder run inside P(B) (default sphere)")
    d.add_argument("--points", required=True, help="CSV, one point per row")
    d.add_argument("--out", required=True, help="output CSV of (z, dist_sq)")

    a = sub.add_parser("analyze-vr", help="estimate the non-VR volume of P(B)")
    a.add_argument("--lattice", required=True)
    a.add_argument("--samples", type=int, default=100_000,
                   help="Monte-Carlo samples (default 100000)")
    a.add_argument("--seed", type=int, required=True)
    a.add_argument("--workers", type=int, default=_default_workers(),
                   help="parallel workers (default: machine parallelism)")
    a.add_argument("--out", default=None, help="optional JSON report path")

    s = sub.add_parser("synth-hld", help="synthesize coordinate Boolean equations")
    s.add_argument("--lattice", required=True)
    s.add_argument("--coordinate", type=int, default=None,
                   help="single coordinate (default: all)")
    s.add_argument("--epsilon", type=float, default=None,
                   help="probe offset (default 1e-4 * minimum distance)")
    s.add_argument("--oriented", action="store_true",
                   help="rotate the basis first (rows 2..n orthogonal to e1)")
    s.add_argument("--out", required=True, help="output DNF JSON")

    f = sub.add_parser("fold", help="fold the first-coordinate boundary of a family basis")
    f.add_argument("--family", required=True, choices=("A", "D", "E"))
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--out", required=True, help="output folding bundle JSON")

    c = sub.add_parser("count", help="piece counts for a family boundary")
    c.add_argument("--family", required=True, choices=("A", "D", "E"))
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--enumerate", action="store_true", dest="enumerate_",
                   help="cross-check by geometric enumeration (n <= 8)")
    c.add_argument("--out", default=None,
                   help="optional CSV (family, n, formula, enumerated, folded)")

    m = sub.add_parser("simulate", help="Gaussian-channel Monte-Carlo run")
    m.add_argument("--config", required=True,
                   help="JSON config; 'seed' is mandatory")
    m.add_argument("--workers", type=int, default=_default_workers(),
                   help="parallel workers (default: machine parallelism)")
    m.add_argument("--out", required=True,
                   help="output CSV (+ .meta.json sidecar)")

    e = sub.add_parser("export-net", help="export a decoder as a network JSON")
    e.add_argument("--dnf", default=None, help="DNF JSON from synth-hld")
    e.add_argument("--bundle", default=None, help="folding bundle JSON from fold")
    e.add_argument("--out", required=True)
    return p


def _cmd_gen(args):
    if args.family is not None:
        if args.n is None:
            raise ValueError("--family needs --n")
        G = lattices.family_generator(args.family, args.n)
        G.info.update({"family": args.family, "n": args.n})
        name = args.name or f"{args.family}{args.n}"
    elif args.mimo_half_n is not None:
        if args.seed is None:
            raise ValueError("--mimo-half-n needs --seed")
        G = lattices.random_mimo_generator(args.mimo_half_n, args.seed)
        name = args.name or f"mimo{2 * args.mimo_half_n}"
    else:
        raise ValueError("need --family or --mimo-half-n")
    serialize.save_lattice(args.out, G, name)
    print(f"wrote {args.out} (n={G.n}, volume={G.volume:.12g})")


def _cmd_reduce(args):
    G = serialize.load_lattice(args.lattice)
    serialize.save_lattice(args.out, lattices.lll_reduce(G, args.delta),
                           G.info.get("name"))
    print(f"wrote {args.out}")


def _cmd_decode(args):
    G = serialize.load_lattice(args.lattice)
    pts = serialize.load_points_csv(args.points, G.n)
    results = [cvp.pipeline_decode(G, y, args.inner) for y in pts]
    with open(args.out, "w") as fh:
        fh.write(serialize.decode_results_to_csv(results))
    print(f"wrote {args.out} ({len(results)} points)")


def _cmd_analyze_vr(args):
    G = serialize.load_lattice(args.lattice)
    rep = vr.estimate_nonvr_volume(G, args.samples, args.seed,
                                   workers=args.workers)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(serialize.vr_report_to_dict(rep),
                                indent=2, sort_keys=True) + "\n")
    print(f"{rep.verdict()} vol_ratio={rep.vol_ratio!r} "
          f"ci=[{rep.ci[0]!r},{rep.ci[1]!r}] samples={rep.samples}")


def _cmd_synth_hld(args):
    G = serialize.load_lattice(args.lattice)
    if args.oriented:
        G, _ = hld.orient_basis(G)
    if args.coordinate is None:
        dnfs = hld.synthesize_all(G, args.epsilon)
    else:
        dnfs = [hld.synthesize_hld(G, args.coordinate, args.epsilon)]
    serialize.save_dnfs(args.out, dnfs)
    sizes = {d.coordinate: len(d.hyperplanes) for d in dnfs}
    print(f"wrote {args.out} (hyperplanes per coordinate: {sizes})")


def _cmd_fold(args):
    G_or, _ = hld.orient_basis(lattices.family_generator(args.family, args.n))
    dnf = hld.synthesize_hld(G_or, 0)
    seq = folding.build_reflection_sequence(args.family, args.n, G_or)
    folded = folding.folded_piece_set(args.family, args.n, dnf, G_oriented=G_or)
    serialize.save_folding_bundle(args.out, seq, folded)
    print(f"wrote {args.out} (pieces: {hld.piece_count(dnf)} -> "
          f"{hld.piece_count(folded)})")


def _cmd_count(args):
    formula = complexity.count_pieces_formula(args.family, args.n)
    folded = complexity.count_pieces_folded(args.family, args.n)
    enumerated = ""
    if args.enumerate_:
        G = lattices.family_generator(args.family, args.n)
        enumerated = complexity.count_pieces_enumerate(G)
        if enumerated != formula:
            raise RuntimeError(f"enumeration {enumerated} != formula {formula}")
    print(f"formula={formula} folded={folded}"
          + (f" enumerated={enumerated}" if args.enumerate_ else ""))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("family,n,formula,enumerated,folded\n")
            fh.write(f"{args.family},{args.n},{formula},{enumerated},{folded}\n")


def _load_sim_lattice(cfg):
    src = cfg.get("lattice")
    if not isinstance(src, dict):
        raise ValueError("config needs a 'lattice' object")
    if "file" in src:
        return serialize.load_lattice(src["file"])
    if "family" in src:
        G = lattices.family_generator(src["family"], int(src["n"]))
        G.info.update({"family": src["family"], "n": int(src["n"])})
        return G
    raise ValueError("lattice source must give 'file' or 'family'+'n'")


def _cmd_simulate(args):
    with open(args.config) as fh:
        cfg = json.load(fh)
    if "seed" not in cfg:
        raise ValueError("simulation config must set 'seed'")
    if "deltas_db" in cfg:
        deltas = [10.0 ** (x / 10.0) for x in cfg["deltas_db"]]
    elif "deltas" in cfg:
        deltas = [float(x) for x in cfg["deltas"]]
    else:
        raise ValueError("config must set 'deltas' (linear) or 'deltas_db'")
    mode = cfg.get("mode", "single")
    if mode == "single":
        config = simulate.SimulationConfig(
            deltas=tuple(deltas),
            decoders=tuple(cfg.get("decoders", ["mld"])),
            trials=int(cfg.get("trials", 10**6)),
            max_errors=int(cfg.get("max_errors", 200)),
            seed=int(cfg["seed"]), workers=args.workers)
        report = simulate.run_simulation(_load_sim_lattice(cfg), config)
    elif mode == "mimo-ensemble":
        report = simulate.mimo_vr_experiment(
            half_n=int(cfg["half_n"]),
            num_lattices=int(cfg["num_lattices"]),
            deltas=deltas, seed=int(cfg["seed"]),
            trials_per_delta=int(cfg.get("trials_per_delta", 20_000)),
            workers=args.workers)
    else:
        raise ValueError(f"unknown simulation mode {mode!r}")
    serialize.save_report(args.out, report)
    print(f"wrote {args.out} and {args.out}.meta.json ({len(report.rows)} rows)")


def _cmd_export_net(args):
    if (args.dnf is None) == (args.bundle is None):
        raise ValueError("need exactly one of --dnf or --bundle")
    if args.dnf:
        net = hld.export_hld_network(serialize.load_dnfs(args.dnf))
    else:
        seq, dnf_folded = serialize.load_folding_bundle(args.bundle)
        net = folding.export_folding_network(seq.family, seq.n, seq, dnf_folded)
    serialize.save_network(args.out, net)
    dims = [layer.W.shape[1] for layer in net.layers]
    print(f"wrote {args.out} (layer widths: {dims})")


_COMMANDS = {
    "gen": _cmd_gen,
    "reduce": _cmd_reduce,
    "decode": _cmd_decode,
    "analyze-vr": _cmd_analyze_vr,
    "synth-hld": _cmd_synth_hld,
    "fold": _cmd_fold,
    "count": _cmd_count,
    "simulate": _cmd_simulate,
    "export-net": _cmd_export_net,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        _COMMANDS[args.verb](args)
        return 0
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"latdec {args.verb}: {exc}", file=sys.stderr)
        return 1
    except (BudgetExceededError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"latdec {args.verb}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
