"""File formats: lattice JSON, DNF and network JSON, report CSV.

Floats go through Python's shortest round-trip repr (never more than 17
significant digits), so save/load round-trips are bit-stable.
"""

import json
import math

import numpy as np

from .folding import ReflectionSequence
from .hld import CoordinateDNF, Hyperplane, NetLayer, PiecewiseNetwork
from .lattices import GeneratorMatrix


def _rows(M):
    return [[float(x) for x in row] for row in np.asarray(M)]


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- lattice files ----------------------------------------------------------

def lattice_to_dict(G, name=None):
    prov = {k: G.info[k] for k in ("family", "seed", "redraws") if k in G.info}
    return {
        "name": name or G.info.get("name", "lattice"),
        "n": G.n,
        "generator": _rows(G.matrix),
        "provenance": prov,
    }


def lattice_from_dict(d):
    G = GeneratorMatrix(np.array(d["generator"], dtype=float))
    G.info.update(d.get("provenance", {}))
    G.info["name"] = d.get("name", "lattice")
    return G


def save_lattice(path, G, name=None):
    with open(path, "w") as f:
        f.write(_dumps(lattice_to_dict(G, name)))


def load_lattice(path):
    with open(path) as f:
        return lattice_from_dict(json.load(f))


# -- DNF files --------------------------------------------------------------

def dnf_to_dict(dnf):
    return {
        "coordinate": dnf.coordinate,
        "hyperplanes": [{"v": [float(x) for x in h.normal],
                         "p": float(h.offset)} for h in dnf.hyperplanes],
        "terms": [list(t) for t in dnf.terms],
        "corners": [[int(b) for b in z] for z in dnf.term_corners],
        "neighbors": [[[int(i), [int(b) for b in z]] for i, z in lit.items()]
                      for lit in dnf.literal_neighbors],
    }


def dnf_from_dict(d):
    return CoordinateDNF(
        coordinate=int(d["coordinate"]),
        hyperplanes=[Hyperplane(normal=np.array(h["v"], dtype=float),
                                offset=float(h["p"]))
                     for h in d["hyperplanes"]],
        terms=[tuple(t) for t in d["terms"]],
        term_corners=[np.array(z, dtype=np.int64) for z in d["corners"]],
        literal_neighbors=[{int(i): np.array(z, dtype=np.int64)
                            for i, z in lit} for lit in d["neighbors"]],
    )


def save_dnfs(path, dnfs):
    with open(path, "w") as f:
        f.write(_dumps({"dnfs": [dnf_to_dict(d) for d in dnfs]}))


def load_dnfs(path):
    with open(path) as f:
        return [dnf_from_dict(d) for d in json.load(f)["dnfs"]]


# -- network files ----------------------------------------------------------

def network_to_dict(net):
    layers = []
    for layer in net.layers:
        act = layer.act if isinstance(layer.act, str) else list(layer.act)
        entry = {"W": _rows(layer.W), "b": [float(x) for x in layer.b],
                 "act": act}
        if layer.tag:
            entry["tag"] = layer.tag
        layers.append(entry)
    return {"layers": layers}


def network_from_dict(d):
    layers = []
    for entry in d["layers"]:
        act = entry["act"]
        if isinstance(act, list):
            act = tuple(act)
        layers.append(NetLayer(W=np.array(entry["W"], dtype=float),
                               b=np.array(entry["b"], dtype=float),
                               act=act, tag=entry.get("tag")))
    return PiecewiseNetwork(layers=layers)


def save_network(path, net):
    with open(path, "w") as f:
        f.write(_dumps(network_to_dict(net)))


def load_network(path):
    with open(path) as f:
        return network_from_dict(json.load(f))


# -- folding bundles --------------------------------------------------------

def folding_bundle_to_dict(seq, dnf_folded):
    return {
        "family": seq.family,
        "n": seq.n,
        "pairs": [list(p) for p in seq.pairs],
        "normals": _rows(seq.normals),
        "dnf": dnf_to_dict(dnf_folded),
    }


def folding_bundle_from_dict(d):
    seq = ReflectionSequence(
        family=d["family"], n=int(d["n"]),
        pairs=tuple(tuple(p) for p in d["pairs"]),
        normals=np.array(d["normals"], dtype=float).reshape(len(d["pairs"]) or 0,
                                                            int(d["n"]) - 1),
    )
    return seq, dnf_from_dict(d["dnf"])


def save_folding_bundle(path, seq, dnf_folded):
    with open(path, "w") as f:
        f.write(_dumps(folding_bundle_to_dict(seq, dnf_folded)))


def load_folding_bundle(path):
    with open(path) as f:
        return folding_bundle_from_dict(json.load(f))


# -- reports ----------------------------------------------------------------

def report_to_csv(report):
    """CSV rows (decoder, delta_db, errors, trials, rate, ci_lo, ci_hi)."""
    lines = ["decoder,delta_db,errors,trials,rate,ci_lo,ci_hi"]
    for r in report.rows:
        delta_db = 10.0 * math.log10(r.delta)
        lines.append(",".join([
            r.decoder, repr(delta_db), str(r.errors), str(r.trials),
            repr(r.rate), repr(r.ci_lo), repr(r.ci_hi)]))
    return "\n".join(lines) + "\n"


def report_metadata_json(report):
    return _dumps(report.metadata)


def save_report(csv_path, report):
    with open(csv_path, "w") as f:
        f.write(report_to_csv(report))
    with open(str(csv_path) + ".meta.json", "w") as f:
        f.write(report_metadata_json(report))


def histogram_to_csv(edges, counts):
    lines = ["bin_lo,bin_hi,count"]
    for i, c in enumerate(counts):
        lines.append(f"{repr(float(edges[i]))},{repr(float(edges[i + 1]))},{int(c)}")
    return "\n".join(lines) + "\n"


def vr_report_to_dict(rep):
    return {
        "vol_ratio": rep.vol_ratio,
        "ci": list(rep.ci),
        "d_oc_sq_over_rho_sq": rep.d_oc_sq_over_rho_sq,
        "samples": rep.samples,
        "hits": rep.hits,
        "verdict": rep.verdict(),
    }


# -- decode IO --------------------------------------------------------------

def load_points_csv(path, n):
    pts = np.loadtxt(path, delimiter=",", ndmin=2)
    if pts.shape[1] != n:
        raise ValueError(f"points file has {pts.shape[1]} columns, lattice "
                         f"dimension is {n}")
    return pts


def decode_results_to_csv(results):
    if not results:
        return "\n"
    n = len(results[0].z)
    header = ",".join([f"z_{i}" for i in range(n)] + ["dist_sq"])
    lines = [header]
    for r in results:
        lines.append(",".join([str(int(v)) for v in r.z] + [repr(r.dist_sq)]))
    return "\n".join(lines) + "\n"
