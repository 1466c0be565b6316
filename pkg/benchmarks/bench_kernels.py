"""Time the compiled and NumPy conv/pool kernels on the MNIST layer shapes.

    python benchmarks/bench_kernels.py [--batch 384] [--repeat 5] [--dtype float32]

The default batch is one stacked triplet step (3 x 128 images). Each row
reports the best of ``--repeat`` runs in milliseconds.
"""

import argparse
import time

import numpy as np
from threadpoolctl import threadpool_limits

from tripletnet import kernels as K
from tripletnet.network import NetworkConfig, build_network, embed, net_backward

# (C_in, H, W, C_out, k) for the three convolutions of the MNIST config
LAYERS = [(1, 28, 28, 32, 5), (32, 12, 12, 64, 3), (64, 5, 5, 128, 3)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return 1000 * min(times)


def bench_backend(name, batch, repeat, dtype, rng):
    K.set_backend(name)
    rows = {}
    for i, (c_in, h, w, c_out, k) in enumerate(LAYERS):
        x = rng.standard_normal((batch, c_in, h, w)).astype(dtype)
        wt = rng.standard_normal((c_out, c_in, k, k)).astype(dtype)
        b = np.zeros(c_out, dtype)
        out, cache = K.conv2d(x, wt, b)
        g = np.ones_like(out)
        rows[f"conv{k} {c_in}->{c_out} fwd"] = best_of(lambda: K.conv2d(x, wt, b), repeat)
        rows[f"conv{k} {c_in}->{c_out} bwd"] = best_of(lambda: K.conv2d_backward(cache, g), repeat)
        if i < len(LAYERS) - 1:  # the last conv is not pooled
            y = rng.standard_normal(out.shape).astype(dtype)
            pooled, pcache = K.maxpool2(y)
            gp = np.ones_like(pooled)
            rows[f"maxpool {c_out}x{out.shape[2]} fwd"] = best_of(lambda: K.maxpool2(y), repeat)
            rows[f"maxpool {c_out}x{out.shape[2]} bwd"] = best_of(lambda: K.maxpool2_backward(pcache, gp), repeat)
    net = build_network(NetworkConfig.mnist(), dtype=dtype).train()
    xb = rng.standard_normal((batch, 1, 28, 28)).astype(dtype)

    def step():
        emb, cache = embed(net, xb, K.make_rng(0))
        net_backward(net, cache, np.ones_like(emb))

    rows["network fwd+bwd"] = best_of(step, repeat)
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--batch", type=int, default=384)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--dtype", choices=("float32", "float64"), default="float32")
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args(argv)
    backends = K.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the NumPy fallback is timed")
    with threadpool_limits(limits=args.threads):
        results = {name: bench_backend(name, args.batch, args.repeat, np.dtype(args.dtype),
                                       np.random.default_rng(0)) for name in backends}
    K.set_backend(backends[0])
    names = list(results[backends[0]])
    header = f"{'kernel':<26}" + "".join(f"{b + ' ms':>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(f"batch {args.batch}, {args.dtype}, {args.threads} thread(s), best of {args.repeat}")
    print(header)
    for n in names:
        line = f"{n:<26}" + "".join(f"{results[b][n]:>12.2f}" for b in backends)
        if len(backends) == 2:
            line += f"{results['numpy'][n] / results['cython'][n]:>9.2f}x"
        print(line)


if __name__ == "__main__":
    main()
