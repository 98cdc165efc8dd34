"""Analytical delay model for a Px x Py output-stationary PE array.

Mapping
-------
Output channels ``K`` are spread over the ``Py`` array rows (``Kt`` at a time),
output pixels ``P = H_out * W_out`` over the ``Px`` columns (``Pt`` at a time),
and input channels ``C`` are walked temporally in chunks of ``Ct``. Per sample
the loop nest is::

    for kt in K-tiles:            # n_k = ceil(K / Kt)
      for pt in P-tiles:          # n_p = ceil(P / Pt)
        for ct in C-tiles:        # n_c = ceil(C / Ct)
          each PE accumulates Ct*R*S MACs into its output   (Ct*R*S cycles)

so ``compute_cycles = N * n_k * n_p * n_c * Ct * R * S``. Each PE keeps its
``Ct*R*S`` weight slice in the local buffer (``2*Ct*R*S <= B_local``).

Data volumes (words of 2 bytes)
-------------------------------
weight tile ``Kt*Ct*R*S``; input tile ``Ct * min(Pt*R*S, H*W)`` (im2col
footprint capped at the input plane); output tile ``Kt*Pt``. The global
buffer holds the current tile of every operand and, depending on the
residency mode, may pin all weights of the current K-tile (``Kt*C*R*S``)
and/or the whole input (``C * sum_pt min(Pt_eff*R*S, H*W)``) so that they
are fetched from DRAM once. Without pinning, weights are refetched for every
P-tile (unless ``n_c == 1``) and inputs for every K-tile (unless
``n_p * n_c == 1``). Outputs are written once. On-chip traffic is the DRAM
traffic plus, for every tile step, the broadcast of the weight and input
tile to the array, plus output collection.

Timing assumes perfect double buffering::

    cycles = max(compute, dram_bytes / dram_bw, onchip_bytes / (Px * bw))

with ``bw`` the 2D NoC or the 3D vertical bandwidth per array column. The
search enumerates K and C tile sizes ``ceil(D / n)`` (the smallest tile
giving ``n`` tiles, which dominates every other size with the same count),
every P tile size up to ``Px`` (the capped input footprint makes uneven P
splits occasionally cheaper), and the four residency modes, and keeps the
fastest schedule (ties: fewer DRAM bytes, then fewer on-chip bytes).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import kernels
from .area import Dims
from .errors import ConfigError, InfeasibleArchitecture, InvalidArgument
from .techlib import TechNode

if TYPE_CHECKING:
    from .approxmul import MultiplierRecord
    from .dse import ArchChromosome

BYTES_PER_WORD = 2

RESIDENCY_MODES = {0: "none", 1: "weights", 2: "inputs", 3: "both"}


@dataclass(frozen=True)
class Layer:
    """A conv or fully-connected layer; FC layers are 1x1 convs on a 1x1 plane."""

    kind: str
    C: int
    K: int
    H: int = 1
    W: int = 1
    R: int = 1
    S: int = 1
    stride: int = 1
    padding: int = 0
    N: int = 1
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("conv", "fc"):
            raise ConfigError(f"layer kind must be 'conv' or 'fc', got {self.kind!r}")
        for key in ("C", "K", "H", "W", "R", "S", "stride", "N"):
            v = getattr(self, key)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"layer {self.name!r}: {key} must be an integer >= 1, got {v!r}")
        if self.padding < 0:
            raise ConfigError(f"layer {self.name!r}: padding must be >= 0")
        if self.kind == "fc" and (self.H, self.W, self.R, self.S, self.padding) != (1, 1, 1, 1, 0):
            raise ConfigError(f"layer {self.name!r}: fc layers take only in/out features")
        if self.H_out < 1 or self.W_out < 1:
            raise ConfigError(f"layer {self.name!r}: empty output")

    @classmethod
    def fc(cls, in_features: int, out_features: int, N: int = 1, name: str = "") -> "Layer":
        return cls("fc", C=in_features, K=out_features, N=N, name=name)

    @property
    def H_out(self) -> int:
        return (self.H + 2 * self.padding - self.R) // self.stride + 1

    @property
    def W_out(self) -> int:
        return (self.W + 2 * self.padding - self.S) // self.stride + 1

    @property
    def P(self) -> int:
        return self.H_out * self.W_out


@dataclass(frozen=True)
class Workload:
    name: str
    layers: tuple[Layer, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ConfigError(f"workload {self.name!r} has no layers")
        object.__setattr__(self, "layers", tuple(self.layers))
        for prev, nxt in zip(self.layers, self.layers[1:]):
            # conv->conv keeps channels (pooling may shrink H, W); fc inputs flatten
            chained = nxt.C == prev.K or (nxt.kind == "fc" and nxt.C % prev.K == 0)
            if not chained:
                raise ConfigError(
                    f"workload {self.name!r}: layer {nxt.name!r} takes C={nxt.C} "
                    f"but {prev.name!r} produces K={prev.K}"
                )


@dataclass(frozen=True)
class LayerSchedule:
    kt: int
    pt: int
    ct: int
    residency: str
    compute_cycles: int
    dram_bytes: int
    onchip_bytes: int
    bound: str
    cycles: float


@dataclass(frozen=True)
class PerfReport:
    total_cycles: float
    d_task: float
    fps: float
    schedules: tuple[LayerSchedule, ...]
    dims: Dims


def layer_macs(layer: Layer) -> int:
    return layer.N * layer.K * layer.C * layer.R * layer.S * layer.P


@lru_cache(maxsize=4096)
def tile_candidates(dim: int, cap: int) -> np.ndarray:
    """Distinct ``ceil(dim / n)`` for ``n = 1..dim`` that do not exceed ``cap``, descending."""
    cap = min(cap, dim)
    if cap < 1:
        return np.zeros(0, dtype=np.int64)
    out = set()
    n = -(-dim // cap)
    while n <= dim:
        t = -(-dim // n)
        out.add(t)
        # jump to the first n giving a smaller tile
        n = -(-dim // (t - 1)) if t > 1 else dim + 1
    arr = np.array(sorted(out, reverse=True), dtype=np.int64)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=4096)
def _all_tiles(dim: int, cap: int) -> np.ndarray:
    arr = np.arange(min(dim, cap), 0, -1, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def onchip_bandwidth(node: TechNode, px: int, dims: Dims) -> float:
    per_col = node.vertical_bandwidth_3d if Dims.parse(dims) is Dims.D3 else node.noc_bandwidth_2d
    return px * per_col


def layer_cycles(schedule: LayerSchedule, node: TechNode, px: int, dims: Dims) -> float:
    """Double-buffered layer time: the slowest of compute, DRAM and on-chip transfer."""
    return max(
        float(schedule.compute_cycles),
        schedule.dram_bytes / node.dram_bandwidth,
        schedule.onchip_bytes / onchip_bandwidth(node, px, dims),
    )


def _bound(compute: float, dram: float, onchip: float) -> str:
    top = max(compute, dram, onchip)
    if compute == top:
        return "compute"
    return "dram" if dram == top else "onchip"


@lru_cache(maxsize=200_000)
def _schedule_cached(
    layer: Layer, px: int, py: int, b_local: int, b_global: int, dram_bw: float, onchip_bw: float
) -> LayerSchedule:
    rs = layer.R * layer.S
    ct_cap = b_local // (BYTES_PER_WORD * rs)
    if ct_cap < 1:
        raise InfeasibleArchitecture(
            f"layer {layer.name!r}: a {layer.R}x{layer.S} weight slice needs {BYTES_PER_WORD * rs} B "
            f"but the local buffer has {b_local} B"
        )
    kts = tile_candidates(layer.K, py)
    pts = _all_tiles(layer.P, px)
    cts = tile_candidates(layer.C, ct_cap)
    dims = np.array([layer.N, layer.K, layer.C, layer.P, rs, layer.H * layer.W], dtype=np.int64)
    found, kt, pt, ct, mode, compute, dram, onchip, cycles = kernels.search_tilings(
        kts, pts, cts, dims, b_global, dram_bw, onchip_bw
    )
    if not found:
        raise InfeasibleArchitecture(
            f"layer {layer.name!r}: no tiling fits a {b_global} B global buffer"
        )
    return LayerSchedule(
        kt=int(kt),
        pt=int(pt),
        ct=int(ct),
        residency=RESIDENCY_MODES[int(mode)],
        compute_cycles=int(compute),
        dram_bytes=int(dram),
        onchip_bytes=int(onchip),
        bound=_bound(compute, dram / dram_bw, onchip / onchip_bw),
        cycles=float(cycles),
    )


def schedule_layer(layer: Layer, chrom: "ArchChromosome", node: TechNode, dims: Dims) -> LayerSchedule:
    """Fastest tiling of ``layer`` on ``chrom``; raises :class:`InfeasibleArchitecture`."""
    return _schedule_cached(
        layer,
        int(chrom.px),
        int(chrom.py),
        int(chrom.b_local),
        int(chrom.b_global),
        float(node.dram_bandwidth),
        float(onchip_bandwidth(node, chrom.px, dims)),
    )


def network_delay(
    workload: Workload,
    chrom: "ArchChromosome",
    node: TechNode,
    dims: Dims,
    mult: "MultiplierRecord | None" = None,
) -> PerfReport:
    """Per-layer schedules summed in layer order.

    ``mult`` is accepted for interface symmetry only: multiplier choice never
    changes cycle counts.
    """
    dims = Dims.parse(dims)
    schedules = tuple(schedule_layer(layer, chrom, node, dims) for layer in workload.layers)
    total = 0.0
    for s in schedules:
        total += s.cycles
    d_task = total / node.clock_frequency
    return PerfReport(total, d_task, 1.0 / d_task if d_task > 0 else math.inf, schedules, dims)


_LAYER_KEYS = {"kind", "C", "K", "H", "W", "R", "S", "stride", "padding", "N", "name", "in_features", "out_features"}


def layer_from_dict(doc: dict) -> Layer:
    unknown = sorted(set(doc) - _LAYER_KEYS)
    if unknown:
        raise ConfigError(f"layer {doc.get('name', '?')!r}: unknown key {unknown[0]!r}")
    doc = dict(doc)
    if doc.get("kind") == "fc":
        if "in_features" in doc:
            doc["C"] = doc.pop("in_features")
        if "out_features" in doc:
            doc["K"] = doc.pop("out_features")
    try:
        return Layer(**doc)
    except TypeError as exc:
        raise ConfigError(f"layer {doc.get('name', '?')!r}: {exc}") from None


def workload_from_dict(doc: dict) -> Workload:
    unknown = sorted(set(doc) - {"name", "layers", "comment"})
    if unknown:
        raise ConfigError(f"workload: unknown key {unknown[0]!r}")
    if "layers" not in doc:
        raise ConfigError("workload: missing key 'layers'")
    return Workload(doc.get("name", "workload"), tuple(layer_from_dict(d) for d in doc["layers"]))


BUNDLED_WORKLOADS = ("vgg_toy", "resnet_block", "dense_heavy", "vgg16")


def load_workload(path_or_name: str | Path) -> Workload:
    """Load a workload JSON file, or a bundled workload by name."""
    name = str(path_or_name)
    if name in BUNDLED_WORKLOADS:
        text = resources.files("approx3d.data").joinpath("workloads", f"{name}.json").read_text()
    else:
        p = Path(path_or_name)
        if not p.exists():
            raise ConfigError(f"workload file {p} does not exist (bundled: {', '.join(BUNDLED_WORKLOADS)})")
        text = p.read_text()
    try:
        return workload_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"workload {name}: invalid JSON: {exc}") from None


def clear_caches() -> None:
    _schedule_cached.cache_clear()


def summarize(schedules: Sequence[LayerSchedule]) -> dict[str, int]:
    """Count of layers per bound kind."""
    out = {"compute": 0, "dram": 0, "onchip": 0}
    for s in schedules:
        out[s.bound] += 1
    return out
