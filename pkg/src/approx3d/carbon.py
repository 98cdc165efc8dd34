"""Embodied carbon of 2D and 3D accelerators and the carbon-delay product.

Total carbon is the sum of logic-die, memory-die, bonding and packaging
terms. Each die is charged its carbon-per-area (fab energy, gases and
materials, inflated by 1/yield) over its own area, plus raw-silicon carbon
over its share of the wafer area lost to dicing. Bonding and packaging are
charged per unit of bonded interface and package area.
"""

from __future__ import annotations

from dataclasses import dataclass

from .area import AreaBreakdown, Dims
from .errors import Approx3dError, InvalidArgument
from .techlib import TechNode, wasted_area_per_die, yield_for_area


@dataclass(frozen=True)
class CarbonBreakdown:
    c_die_logic: float
    c_die_memory: float
    c_bonding: float
    c_packaging: float
    total: float


def cfpa_for_die(node: TechNode, die_area: float) -> float:
    """Carbon per mm² of good die, gCO2/mm²."""
    y = yield_for_area(node, die_area)
    if y <= 0:
        raise Approx3dError(f"yield for {die_area} mm² on {node.name} is zero")
    return (node.ci_fab * node.epa + node.c_gas + node.c_material) / y


def die_carbon(node: TechNode, die_area: float) -> float:
    if not die_area > 0:
        raise InvalidArgument(f"die area must be > 0, got {die_area}")
    return cfpa_for_die(node, die_area) * die_area + node.cfpa_si_waste * wasted_area_per_die(node, die_area)


def bonding_carbon(node: TechNode, die_area: float) -> float:
    return node.cfpa_bonding * die_area


def packaging_carbon(node: TechNode, package_area: float) -> float:
    return node.cfpa_packaging * package_area


def bonded_area(areas: AreaBreakdown, rule: str = "min") -> float:
    if rule == "min":
        return min(areas.logic_die, areas.memory_die)
    if rule == "logic":
        return areas.logic_die
    if rule == "memory":
        return areas.memory_die
    raise InvalidArgument(f"unknown bonding-area rule {rule!r}")


def embodied_carbon(
    node: TechNode,
    areas: AreaBreakdown,
    dims: Dims,
    bonding_rule: str = "min",
) -> CarbonBreakdown:
    logic = die_carbon(node.for_die("logic"), areas.logic_die)
    memory = die_carbon(node.for_die("memory"), areas.memory_die)
    bonding = bonding_carbon(node, bonded_area(areas, bonding_rule)) if Dims.parse(dims) is Dims.D3 else 0.0
    packaging = packaging_carbon(node, areas.package)
    return CarbonBreakdown(logic, memory, bonding, packaging, logic + memory + bonding + packaging)


def carbon_delay_product(carbon: float, delay: float) -> float:
    if carbon < 0 or delay < 0:
        raise InvalidArgument("carbon and delay must be >= 0")
    return carbon * delay
