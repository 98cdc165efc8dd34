"""Silicon area of PEs, dies and packages for 2D and 3D organisations.

In 3D the global SRAM is a memory die bonded on top of the logic die; in 2D
the same SRAM is a second die placed beside the logic die on one package,
and the logic die additionally carries a per-PE network-on-chip router.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .approxmul import MultiplierRecord
from .errors import ConfigError, IncompleteRecord, InvalidArgument
from .techlib import TechNode, wasted_area_per_die

if TYPE_CHECKING:
    from .dse import ArchChromosome


class Dims(str, Enum):
    D2 = "2d"
    D3 = "3d"

    @classmethod
    def parse(cls, value: "str | Dims") -> "Dims":
        try:
            return cls(str(value.value if isinstance(value, Dims) else value).lower())
        except ValueError:
            raise ConfigError(f"dims must be '2d' or '3d', got {value!r}") from None


@dataclass(frozen=True)
class AreaParams:
    """Model constants. Bonding uses ``min`` or ``logic``/``memory`` die area."""

    layout_overhead: float = 1.15
    control_overhead: float = 0.10
    periphery: float = 0.05
    package_margin: float = 1.2
    noc_router_gates: float = 150.0
    bonding_area: str = "min"

    def __post_init__(self) -> None:
        for key in ("layout_overhead", "package_margin"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1")
        for key in ("control_overhead", "periphery", "noc_router_gates"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be >= 0")
        if self.bonding_area not in ("min", "logic", "memory"):
            raise ConfigError("bonding_area must be 'min', 'logic' or 'memory'")

    @classmethod
    def from_dict(cls, doc: dict) -> "AreaParams":
        names = {f.name for f in dataclasses.fields(cls)}
        for key in doc:
            if key not in names:
                raise ConfigError(f"area parameters: unknown key {key!r}")
        return cls(**doc)


DEFAULT_PARAMS = AreaParams()


@dataclass(frozen=True)
class AreaBreakdown:
    logic_die: float
    memory_die: float
    package: float
    per_pe: float
    mac: float
    local_buffer: float
    noc: float
    wasted_logic: float
    wasted_memory: float


def sram_area(node: TechNode, capacity: float, kind: str = "global") -> float:
    """Array area in mm² of ``capacity`` bytes of global SRAM or register file."""
    if capacity < 0:
        raise InvalidArgument(f"capacity must be >= 0, got {capacity}")
    if kind == "global":
        bit = node.sram_bit_area
    elif kind == "regfile":
        bit = node.regfile_bit_area
    else:
        raise InvalidArgument(f"unknown memory kind {kind!r}")
    return capacity * 8 * bit * node.memory_array_overhead


def adder_area(bits: int, node: TechNode) -> float:
    """Ripple-carry adder: one 9-gate full adder per bit."""
    return bits * 9 * node.gate_area


def mac_area(node: TechNode, mult: MultiplierRecord, params: AreaParams = DEFAULT_PARAMS) -> float:
    """bfloat16 MAC: significand multiplier, two 8-bit exponent adders, 24-bit accumulator."""
    try:
        m = mult.area_by_node[node.name]
    except KeyError:
        raise IncompleteRecord(f"multiplier {mult.id!r} has no area for node {node.name!r}") from None
    core = m + 2 * adder_area(8, node) + adder_area(24, node)
    return core * (1 + params.control_overhead)


def noc_area(node: TechNode, n_pe: int, dims: Dims, params: AreaParams = DEFAULT_PARAMS) -> float:
    if Dims.parse(dims) is Dims.D3:
        return 0.0
    return n_pe * params.noc_router_gates * node.gate_area


def logic_die_area(
    node: TechNode,
    chrom: "ArchChromosome",
    mult: MultiplierRecord,
    dims: Dims,
    params: AreaParams = DEFAULT_PARAMS,
) -> float:
    n_pe = chrom.px * chrom.py
    pe = mac_area(node, mult, params) + sram_area(node, chrom.b_local, "regfile")
    return n_pe * pe * params.layout_overhead + noc_area(node, n_pe, dims, params)


def memory_die_area(node: TechNode, b_global: float, params: AreaParams = DEFAULT_PARAMS) -> float:
    return sram_area(node, b_global, "global") * (1 + params.periphery)


def package_area(logic: float, memory: float, dims: Dims, params: AreaParams = DEFAULT_PARAMS) -> float:
    if logic < 0 or memory < 0:
        raise InvalidArgument("die areas must be >= 0")
    if Dims.parse(dims) is Dims.D3:
        return max(logic, memory) * params.package_margin
    return (logic + memory) * params.package_margin


def compute_areas(
    node: TechNode,
    chrom: "ArchChromosome",
    mult: MultiplierRecord,
    dims: Dims,
    params: AreaParams = DEFAULT_PARAMS,
) -> AreaBreakdown:
    dims = Dims.parse(dims)
    n_pe = chrom.px * chrom.py
    mac = mac_area(node, mult, params)
    local = sram_area(node, chrom.b_local, "regfile")
    logic = logic_die_area(node, chrom, mult, dims, params)
    memory = memory_die_area(node, chrom.b_global, params)
    return AreaBreakdown(
        logic_die=logic,
        memory_die=memory,
        package=package_area(logic, memory, dims, params),
        per_pe=mac + local,
        mac=mac,
        local_buffer=local,
        noc=noc_area(node, n_pe, dims, params),
        wasted_logic=wasted_area_per_die(node.for_die("logic"), logic),
        wasted_memory=wasted_area_per_die(node.for_die("memory"), memory),
    )
