"""Pure-numpy kernel implementations (fallback path)."""

from __future__ import annotations

import numpy as np

_I64 = np.int64


def multiply_array(family: int, width: int, param: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=_I64)
    b = np.asarray(b, dtype=_I64)
    if family == 0:
        return a * b
    if family == 1:
        return ((a * b) >> param) << param
    if family == 2:
        return a * (b & ~_I64((1 << param) - 1))
    # LOA: row-by-row accumulation; the k low columns of every row adder are ORed
    acc = a * (b & 1)
    low = _I64((1 << param) - 1)
    for j in range(1, width):
        pp = (a * ((b >> j) & 1)) << j
        s = j + param
        hi = ((acc >> s) + (pp >> s)) << s
        acc = (acc & _I64((1 << j) - 1)) | ((acc | pp) & (low << j)) | hi
    return acc


def _unpack(bits: np.ndarray):
    bits = bits.astype(_I64)
    sign = (bits >> 15) & 1
    exp = (bits >> 7) & 0xFF
    mant = bits & 0x7F
    sig = np.where(exp == 0, mant, mant | 0x80)
    eff = np.where(exp == 0, 1, exp)
    return sign, exp, sig, eff


def bf16_products(x: np.ndarray, w: np.ndarray, lut: np.ndarray, scale: int) -> np.ndarray:
    """Elementwise bfloat16 products with the mantissa product taken from ``lut``.

    ``x`` and ``w`` are broadcast-compatible uint16 bit patterns; ``lut[sx, sw]``
    holds the (approximate) integer product of two 8-bit significands and
    ``scale`` the extra power of two the lut values carry.
    """
    sx, ex, gx, fx = _unpack(np.asarray(x))
    sw, ew, gw, fw = _unpack(np.asarray(w))
    p = lut[gx, gw].astype(np.float64)
    with np.errstate(over="ignore"):  # out-of-range products saturate to inf, as in float32 hardware
        mag = np.ldexp(p, (fx + fw - 268 - scale).astype(np.int32)).astype(np.float32)
    out = np.where((sx ^ sw) == 1, -mag, mag)
    special = (ex == 255) | (ew == 255)
    if np.any(special):
        xv = (np.asarray(x).astype(np.uint32) << 16).view(np.float32)
        wv = (np.asarray(w).astype(np.uint32) << 16).view(np.float32)
        with np.errstate(invalid="ignore", over="ignore"):
            ref = np.broadcast_to(xv, out.shape) * np.broadcast_to(wv, out.shape)
        out = np.where(special, ref, out)
        out = np.where(np.isnan(out), np.float32(np.nan), out)  # one canonical NaN, as the jit path
    return out.astype(np.float32)


def dense_bf16(x: np.ndarray, w: np.ndarray, bias: np.ndarray, lut: np.ndarray, scale: int) -> np.ndarray:
    """``x @ w + bias`` with bf16 operands and float32 accumulation in input order."""
    batch, n_in = x.shape
    acc = np.zeros((batch, w.shape[1]), dtype=np.float32)
    for i in range(n_in):
        acc = acc + bf16_products(x[:, i : i + 1], w[i : i + 1, :], lut, scale)
    return acc + bias.astype(np.float32)


def _tile_input_sum(P: int, pts: np.ndarray, rs: int, hw: int) -> np.ndarray:
    full = P // pts
    rem = P - full * pts
    return full * np.minimum(pts * rs, hw) + np.where(rem > 0, np.minimum(rem * rs, hw), 0)


def search_tilings(
    kts: np.ndarray,
    pts: np.ndarray,
    cts: np.ndarray,
    dims: np.ndarray,
    b_global: int,
    dram_bw: float,
    onchip_bw: float,
) -> np.ndarray:
    """Exhaustive tiling search.

    ``dims`` = (N, K, C, P, R*S, H*W). Candidates are visited in the order given
    (kt, pt, ct outer to inner) with residency modes 3, 2, 1, 0 innermost; the
    first candidate minimising (cycles, dram bytes, on-chip bytes) wins.
    Returns a float64 row (found, kt, pt, ct, mode, compute, dram, onchip,
    cycles); ``found == 0`` when nothing fits.
    """
    n, K, C, P, rs, hw = (int(v) for v in dims)
    kt = np.asarray(kts, dtype=_I64)[:, None, None, None]
    pt = np.asarray(pts, dtype=_I64)[None, :, None, None]
    ct = np.asarray(cts, dtype=_I64)[None, None, :, None]
    mode = np.array([3, 2, 1, 0], dtype=_I64)[None, None, None, :]

    n_k = -(-K // kt)
    n_p = -(-P // pt)
    n_c = -(-C // ct)
    in_sum = _tile_input_sum(P, pt, rs, hw)

    w_tile = kt * ct * rs
    in_tile = ct * np.minimum(pt * rs, hw)
    out_tile = kt * pt
    w_keep = (mode & 1) == 1
    i_keep = (mode & 2) == 2
    ws = np.where(w_keep, kt * C * rs, w_tile) + np.where(i_keep, C * in_sum, in_tile) + out_tile
    ok = ws * 2 <= b_global

    w_total = K * C * rs
    w_reload = np.where(w_keep | (n_c == 1), 1, n_p)
    i_reload = np.where(i_keep | (n_p * n_c == 1), 1, n_k)
    dram = n * 2 * (w_total * w_reload + C * in_sum * i_reload + K * P)
    onchip = dram + n * 2 * (n_p * w_total + n_k * C * in_sum + K * P)
    compute = n * n_k * n_p * n_c * ct * rs

    shape = np.broadcast_shapes(ok.shape, dram.shape, compute.shape, onchip.shape)
    ok = np.broadcast_to(ok, shape).ravel()
    if not ok.any():
        return np.zeros(9)
    dram = np.broadcast_to(dram, shape).ravel()
    onchip = np.broadcast_to(onchip, shape).ravel()
    compute = np.broadcast_to(compute, shape).ravel()
    cycles = np.maximum(
        compute.astype(np.float64),
        np.maximum(dram / dram_bw, onchip / onchip_bw),
    )
    idx = np.flatnonzero(ok)
    order = np.lexsort((idx, onchip[idx], dram[idx], cycles[idx]))
    best = idx[order[0]]
    ik, ip, ic, im = np.unravel_index(best, shape)
    return np.array(
        [
            1.0,
            kts[ik],
            pts[ip],
            cts[ic],
            (3, 2, 1, 0)[im],
            compute[best],
            dram[best],
            onchip[best],
            cycles[best],
        ],
        dtype=np.float64,
    )
