"""Compare the compiled and pure-Python embedding backends.

    python3 benchmarks/bench_kernel.py [--repeat N]

Each case enumerates every embedding of a pattern into a host with both
backends, checks that they agree, and reports the best-of-N wall time.
"""
from __future__ import annotations

import argparse
import time

from ogrules import kernel
from ogrules.chemgraph import Mixture
from ogrules.dpo import find_rule_matches
from ogrules.molparse import parse_smiles, read_rule, load_json
from importlib.resources import files


def chain(n: int) -> Mixture:
    return parse_smiles("C" * n)


def skeleton(n: int) -> Mixture:
    """A bare carbon path of ``n`` atoms, no hydrogens."""
    return Mixture.from_maps({i: ("C", 0) for i in range(n)}, {(i, i + 1): 1 for i in range(n - 1)})


def ch_bond() -> Mixture:
    return Mixture.from_maps({0: ("C", 0), 1: ("H", 0)}, {(0, 1): 1})


def cases():
    data = files("ogrules") / "data"
    two_h = read_rule(load_json(data / "rules" / "hydrolase" / "hydrolase_2h.srule.json"))
    triacetin = parse_smiles("CC(=O)OCC(OC(C)=O)COC(C)=O.O.O.O")
    yield "C-H bond in C30 alkane", ch_bond(), chain(30), ()
    yield "C8 skeleton in C30 alkane", skeleton(8), chain(30), ()
    yield "C4 skeleton in branched C13", skeleton(4), parse_smiles("CC(C)(C)CC(C)(C)CC(C)(C)C"), ()
    yield "ester rule in triacetin + 3 water", two_h.left, triacetin, two_h.forbidden_left
    yield "methyl acetate in itself", parse_smiles("COC(C)=O"), parse_smiles("COC(C)=O"), ()


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernel.BACKEND != "cython":
        print("compiled kernel unavailable; only the Python backend can run")
    print(f"{'case':38s} {'maps':>7s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, pattern, host, forbidden in cases():
        pg, hg = pattern.labeled_graph(), host.labeled_graph()
        res_py = kernel.embeddings(pg, hg, forbidden, backend="python")
        t_py = best_of(lambda: kernel.embeddings(pg, hg, forbidden, backend="python"), args.repeat)
        if kernel.BACKEND == "cython":
            res_cy = kernel.embeddings(pg, hg, forbidden, backend="cython")
            assert sorted(map(sorted, (m.items() for m in res_cy))) == \
                sorted(map(sorted, (m.items() for m in res_py))), name
            t_cy = best_of(lambda: kernel.embeddings(pg, hg, forbidden, backend="cython"), args.repeat)
            print(f"{name:38s} {len(res_py):7d} {t_py * 1e3:10.2f} {t_cy * 1e3:10.2f} {t_py / t_cy:7.1f}x")
        else:
            print(f"{name:38s} {len(res_py):7d} {t_py * 1e3:10.2f} {'-':>10s} {'-':>8s}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
