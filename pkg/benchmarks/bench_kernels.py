"""Time the numba kernels against their pure-numpy counterparts.

Both backends are imported directly, so the ``APPROX3D_DISABLE_NUMBA`` flag
is irrelevant here. The first numba call (compilation) is excluded from the
timings and reported separately. Usage::

    python3 benchmarks/bench_kernels.py --repeat 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from approx3d.accproxy import significand_lut
from approx3d.approxmul import MultiplierSpec
from approx3d.kernels import jit, vec
from approx3d.perf import _all_tiles, tile_candidates


def _cases(rng: np.random.Generator) -> dict:
    a, b = np.meshgrid(np.arange(256), np.arange(256), indexing="ij")
    a, b = a.ravel(), b.ravel()
    lut, scale = significand_lut(MultiplierSpec.parse("LOA:4"))
    x_bits = rng.integers(0, 1 << 16, size=(256, 1), dtype=np.uint16)
    w_bits = rng.integers(0, 1 << 16, size=(1, 256), dtype=np.uint16)
    x = (rng.standard_normal((64, 256)).astype(np.float32).view(np.uint32) >> 16).astype(np.uint16)
    w = (rng.standard_normal((256, 128)).astype(np.float32).view(np.uint32) >> 16).astype(np.uint16)
    bias = np.zeros(128, np.float32)
    # a 3x3 conv, 64 -> 64 channels on 28x28, on a 16x16 array with 256 B local buffer
    dims = np.array([1, 64, 64, 28 * 28, 9, 28 * 28], dtype=np.int64)
    tiles = (tile_candidates(64, 16), _all_tiles(28 * 28, 16), tile_candidates(64, 256 // 18))
    return {
        "multiply_array (LOA4, 65536 pairs)": lambda m: m.multiply_array(3, 8, 4, a, b),
        "bf16_products (256x256 grid)": lambda m: m.bf16_products(x_bits, w_bits, lut, scale),
        "dense_bf16 (64x256 @ 256x128)": lambda m: m.dense_bf16(x, w, bias, lut, scale),
        "search_tilings (3x3 conv, 16x16 PEs)": lambda m: m.search_tilings(*tiles, dims, 1 << 18, 64.0, 512.0),
    }


def _best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timed runs per kernel (best is reported)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    cases = _cases(np.random.default_rng(args.seed))
    print(f"{'kernel':40s} {'compile s':>10s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, call in cases.items():
        t0 = time.perf_counter()
        call(jit)
        compile_s = time.perf_counter() - t0
        t_jit = _best_of(lambda: call(jit), args.repeat)
        t_vec = _best_of(lambda: call(vec), args.repeat)
        print(f"{name:40s} {compile_s:10.2f} {t_jit * 1e3:10.3f} {t_vec * 1e3:10.3f} {t_vec / t_jit:7.1f}x")


if __name__ == "__main__":
    main()
