"""Benchmark the decoder kernels (compiled vs pure NumPy) and the session loop.

Run:  python benchmarks/bench_viterbi.py [--decodes N] [--sessions N]
"""

import argparse
import time

import numpy as np

from skgsim import kernels
from skgsim.channel import sample_channels
from skgsim.config import SessionConfig
from skgsim.core import make_rng
from skgsim.harness import run_session


def bench_decode(n_decodes):
    rng = np.random.default_rng(7)
    ys = rng.integers(0, 2, size=(n_decodes, 64)).astype(np.uint8)
    results = {}
    for name, fn in kernels.available_backends().items():
        fn(ys[0], 32, 7, 0o171, 0o133)  # warm up
        t0 = time.perf_counter()
        for y in ys:
            fn(y, 32, 7, 0o171, 0o133)
        dt = time.perf_counter() - t0
        results[name] = dt / n_decodes
    return results


def bench_sessions(n_sessions, backend):
    cfg = SessionConfig(scenario="direct", snr_db=20.0)
    saved = kernels.tb_viterbi_decode
    kernels.tb_viterbi_decode = kernels.available_backends()[backend]
    try:
        t0 = time.perf_counter()
        for t in range(n_sessions):
            ch = sample_channels(make_rng(1, t), cfg.channel_config(), "direct")
            run_session(cfg, ch, make_rng(2, t))
        return (time.perf_counter() - t0) / n_sessions
    finally:
        kernels.tb_viterbi_decode = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--decodes", type=int, default=2000)
    ap.add_argument("--sessions", type=int, default=1000)
    args = ap.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    per_decode = bench_decode(args.decodes)
    print(f"\ntail-biting Viterbi decode, k=32, K=7, {args.decodes} decodes:")
    for name, dt in sorted(per_decode.items()):
        print(f"  {name:7s} {dt * 1e6:8.1f} us/decode")
    if len(per_decode) == 2:
        print(f"  speedup  {per_decode['python'] / per_decode['c']:8.1f} x")

    print(f"\nfull protocol session (direct, 20 dB, Eve evaluated), {args.sessions} sessions:")
    for name in sorted(kernels.available_backends()):
        dt = bench_sessions(args.sessions, name)
        print(f"  {name:7s} {dt * 1e3:8.2f} ms/session")


if __name__ == "__main__":
    main()
