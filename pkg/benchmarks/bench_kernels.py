"""Benchmark the compiled kernel core against the numpy fallback.

Each backend runs in its own subprocess (the backend binds at import time),
timing the three hot paths: flooding BP decoding, dense convolution, and one
full density-evolution iteration.

Usage: python benchmarks/bench_kernels.py [--n 10000] [--iters 50]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def worker(backend, n, iters):
    os.environ["SWLDPC_KERNEL"] = backend
    import numpy as np

    from swldpc import _kernels
    from swldpc.bp_decoder import decode
    from swldpc.density_evolution import DeSettings, de_iterate
    from swldpc.experiments import bsc_family_source, quantized_initial
    from swldpc.ldpc import DegreeDistribution, sample_graph, sample_source_pairs, syndrome_encode
    from swldpc.source_model import initial_llr_vector

    assert _kernels.BACKEND == backend, _kernels.BACKEND
    out = {"backend": backend}

    dd = DegreeDistribution.regular(3, 6)
    g = sample_graph(n, dd, seed=1)
    src = bsc_family_source(0.5, 0.07)
    x, y = sample_source_pairs(src, n, seed=2)
    synd = syndrome_encode(g, x)
    init = initial_llr_vector(src, y)
    decode(g, synd, init, 2)  # warm up
    t0 = time.perf_counter()
    res = decode(g, synd, init, iters, early_stop=False)
    out["bp_decode_s"] = time.perf_counter() - t0
    out["bp_note"] = f"n={n}, {iters} flooding iterations, {g.n_edges} edges"

    rng = np.random.default_rng(0)
    a = rng.random(4096)
    b = rng.random(4096)
    _kernels.conv(a[:16], b[:16])  # warm up
    t0 = time.perf_counter()
    for _ in range(20):
        _kernels.conv(a, b)
    out["conv_s"] = time.perf_counter() - t0
    out["conv_note"] = "20 x dense 4096x4096 convolution"

    st = DeSettings()
    d0 = quantized_initial(src, st)
    d = de_iterate(d0, d0, dd)
    t0 = time.perf_counter()
    for _ in range(10):
        d = de_iterate(d0, d, dd)
    out["de_iterate_s"] = time.perf_counter() - t0
    out["de_note"] = f"10 iterations, grid step {st.step:g}, range +-{st.llr_cap:g}"

    print(json.dumps(out))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10000)
    parser.add_argument("--iters", type=int, default=50)
    parser.add_argument("--worker", choices=("compiled", "python"))
    args = parser.parse_args()
    if args.worker:
        worker(args.worker, args.n, args.iters)
        return

    rows = {}
    for backend in ("python", "compiled"):
        env = dict(os.environ, SWLDPC_KERNEL=backend)
        proc = subprocess.run(
            [sys.executable, __file__, "--worker", backend,
             "--n", str(args.n), "--iters", str(args.iters)],
            capture_output=True, text=True, env=env)
        if proc.returncode != 0:
            print(f"{backend}: unavailable ({proc.stderr.strip().splitlines()[-1]})")
            continue
        rows[backend] = json.loads(proc.stdout.strip().splitlines()[-1])

    if not rows:
        return
    any_row = next(iter(rows.values()))
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in rows) + "   speedup")
    for key, note in (("bp_decode_s", "bp_note"), ("conv_s", "conv_note"),
                      ("de_iterate_s", "de_note")):
        label = key.replace("_s", "")
        line = f"{label:<22}"
        for b in rows:
            line += f"{rows[b][key]:>11.3f}s"
        if len(rows) == 2:
            line += f"   {rows['python'][key] / rows['compiled'][key]:.2f}x"
        print(line + f"   ({any_row[note]})")


if __name__ == "__main__":
    main()
