"""Numba-compiled kernel implementations. Results match :mod:`.vec` bit for bit."""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _mul_one(family, width, param, a, b):
    if family == 0:
        return a * b
    if family == 1:
        return ((a * b) >> param) << param
    if family == 2:
        return a * (b & ~((1 << param) - 1))
    acc = a * (b & 1)
    low = (1 << param) - 1
    for j in range(1, width):
        pp = (a * ((b >> j) & 1)) << j
        s = j + param
        hi = ((acc >> s) + (pp >> s)) << s
        acc = (acc & ((1 << j) - 1)) | ((acc | pp) & (low << j)) | hi
    return acc


@njit(cache=True)
def _multiply_flat(family, width, param, a, b, out):
    for i in range(a.size):
        out[i] = _mul_one(family, width, param, a[i], b[i])


def multiply_array(family: int, width: int, param: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    fa = np.ascontiguousarray(a).ravel()
    fb = np.ascontiguousarray(b).ravel()
    out = np.empty(fa.size, dtype=np.int64)
    _multiply_flat(np.int64(family), np.int64(width), np.int64(param), fa, fb, out)
    return out.reshape(a.shape)


@njit(cache=True)
def _bf16_one(x, w, lut, scale):
    ex = (x >> 7) & 0xFF
    ew = (w >> 7) & 0xFF
    neg = ((x ^ w) >> 15) & 1
    if ex == 255 or ew == 255:
        x_nan = ex == 255 and (x & 0x7F) != 0
        w_nan = ew == 255 and (w & 0x7F) != 0
        x_zero = (x & 0x7FFF) == 0
        w_zero = (w & 0x7FFF) == 0
        if x_nan or w_nan or x_zero or w_zero:
            return np.float32(np.nan)
        if neg == 1:
            return np.float32(-np.inf)
        return np.float32(np.inf)
    mx = x & 0x7F
    mw = w & 0x7F
    if ex == 0:
        gx = mx
        fx = 1
    else:
        gx = mx | 0x80
        fx = ex
    if ew == 0:
        gw = mw
        fw = 1
    else:
        gw = mw | 0x80
        fw = ew
    p = float(lut[gx, gw])
    mag = np.float32(math.ldexp(p, fx + fw - 268 - scale))
    if neg == 1:
        return -mag
    return mag


@njit(cache=True)
def _bf16_grid(x, w, lut, scale, out):
    for i in range(x.size):
        out[i] = _bf16_one(np.int64(x[i]), np.int64(w[i]), lut, scale)


def bf16_products(x: np.ndarray, w: np.ndarray, lut: np.ndarray, scale: int) -> np.ndarray:
    x, w = np.broadcast_arrays(np.asarray(x, dtype=np.uint16), np.asarray(w, dtype=np.uint16))
    fx = np.ascontiguousarray(x).ravel()
    fw = np.ascontiguousarray(w).ravel()
    out = np.empty(fx.size, dtype=np.float32)
    _bf16_grid(fx, fw, np.ascontiguousarray(lut, dtype=np.int64), np.int64(scale), out)
    return out.reshape(x.shape)


@njit(cache=True)
def _dense(x, w, bias, lut, scale, out):
    batch, n_in = x.shape
    n_out = w.shape[1]
    for b in range(batch):
        for o in range(n_out):
            acc = np.float32(0.0)
            for i in range(n_in):
                acc = acc + _bf16_one(np.int64(x[b, i]), np.int64(w[i, o]), lut, scale)
            out[b, o] = acc + bias[o]


def dense_bf16(x: np.ndarray, w: np.ndarray, bias: np.ndarray, lut: np.ndarray, scale: int) -> np.ndarray:
    out = np.empty((x.shape[0], w.shape[1]), dtype=np.float32)
    _dense(
        np.ascontiguousarray(x, dtype=np.uint16),
        np.ascontiguousarray(w, dtype=np.uint16),
        np.ascontiguousarray(bias, dtype=np.float32),
        np.ascontiguousarray(lut, dtype=np.int64),
        np.int64(scale),
        out,
    )
    return out


@njit(cache=True)
def _search(kts, pts, cts, n, K, C, P, rs, hw, b_global, dram_bw, onchip_bw):
    best = np.zeros(9)
    w_total = K * C * rs
    for ik in range(kts.size):
        kt = kts[ik]
        n_k = (K + kt - 1) // kt
        for ip in range(pts.size):
            pt = pts[ip]
            n_p = (P + pt - 1) // pt
            full = P // pt
            rem = P - full * pt
            in_sum = full * min(pt * rs, hw)
            if rem > 0:
                in_sum += min(rem * rs, hw)
            for ic in range(cts.size):
                ct = cts[ic]
                n_c = (C + ct - 1) // ct
                w_tile = kt * ct * rs
                in_tile = ct * min(pt * rs, hw)
                out_tile = kt * pt
                compute = n * n_k * n_p * n_c * ct * rs
                for mode in (3, 2, 1, 0):
                    w_keep = (mode & 1) == 1
                    i_keep = (mode & 2) == 2
                    ws = out_tile
                    ws += kt * C * rs if w_keep else w_tile
                    ws += C * in_sum if i_keep else in_tile
                    if ws * 2 > b_global:
                        continue
                    w_reload = 1 if (w_keep or n_c == 1) else n_p
                    i_reload = 1 if (i_keep or n_p * n_c == 1) else n_k
                    dram = n * 2 * (w_total * w_reload + C * in_sum * i_reload + K * P)
                    onchip = dram + n * 2 * (n_p * w_total + n_k * C * in_sum + K * P)
                    cycles = max(float(compute), max(dram / dram_bw, onchip / onchip_bw))
                    better = best[0] == 0.0
                    if not better:
                        if cycles < best[8]:
                            better = True
                        elif cycles == best[8]:
                            if dram < best[6]:
                                better = True
                            elif dram == best[6] and onchip < best[7]:
                                better = True
                    if better:
                        best[0] = 1.0
                        best[1] = kt
                        best[2] = pt
                        best[3] = ct
                        best[4] = mode
                        best[5] = compute
                        best[6] = dram
                        best[7] = onchip
                        best[8] = cycles
    return best


def search_tilings(kts, pts, cts, dims, b_global, dram_bw, onchip_bw) -> np.ndarray:
    n, K, C, P, rs, hw = (np.int64(v) for v in dims)
    return _search(
        np.asarray(kts, dtype=np.int64),
        np.asarray(pts, dtype=np.int64),
        np.asarray(cts, dtype=np.int64),
        n, K, C, P, rs, hw,
        np.int64(b_global),
        float(dram_bw),
        float(onchip_bw),
    )
