"""Compiled vs pure-Python kernels on real contact graphs.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from necklace import _pykernels, kernels
from necklace.catalog import gasket_spec, good4_spec
from necklace.contact import build_contact_graph


def cases():
    for spec, m in [(gasket_spec(), 6), (gasket_spec(), 8), (good4_spec(), 6)]:
        g = build_contact_graph(spec, m)
        alive = np.ones(len(g.indptr) - 1, dtype=np.uint8)
        # knock out a few contacts so the labelling has work to do
        alive[g.num_cylinders :: 7] = 0
        yield f"{spec.label} m={m} ({len(alive)} vertices)", g, alive


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    try:
        from necklace import _kernels
    except ImportError:
        print("compiled extension not built; only the fallback is available")
        _kernels = None
    print(f"selected backend: {kernels.BACKEND}")
    print(f"{'case':40s} {'kernel':18s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, g, alive in cases():
        for kname in ("component_labels", "articulation_mask"):
            py = getattr(_pykernels, kname)
            t_py = min(timeit.repeat(lambda: py(g.indptr, g.indices, alive), number=1, repeat=args.repeat))
            if _kernels is None:
                print(f"{name:40s} {kname:18s} {t_py * 1e3:10.2f} {'-':>10s} {'-':>8s}")
                continue
            cy = getattr(_kernels, kname)
            a, b = py(g.indptr, g.indices, alive), cy(g.indptr, g.indices, alive)
            assert np.array_equal(np.asarray(a), np.asarray(b)), f"backends disagree on {name} {kname}"
            t_cy = min(timeit.repeat(lambda: cy(g.indptr, g.indices, alive), number=1, repeat=args.repeat))
            print(f"{name:40s} {kname:18s} {t_py * 1e3:10.2f} {t_cy * 1e3:10.2f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
