"""Technology-node parameter tables, yield and wafer-packing geometry."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping

from .errors import ConfigError, InvalidArgument, NoFeasibleDie

DIE_KINDS = ("logic", "memory")

# Fields a per-die-kind override block may replace.
OVERRIDABLE = (
    "ci_fab",
    "epa",
    "c_gas",
    "c_material",
    "cfpa_si_waste",
    "defect_density",
    "cluster_alpha",
    "fixed_yield",
)


@dataclass(frozen=True)
class TechNode:
    """Fabrication, yield, geometry and bandwidth parameters of one process node.

    Units: areas in mm², carbon in gCO2, energy in kWh, bandwidths in bytes per
    cycle, frequency in Hz.
    """

    name: str
    feature_size: float
    clock_frequency: float
    ci_fab: float
    epa: float
    c_gas: float
    c_material: float
    cfpa_si_waste: float
    cfpa_bonding: float
    cfpa_packaging: float
    defect_density: float
    cluster_alpha: float
    wafer_diameter: float
    sram_bit_area: float
    regfile_bit_area: float
    gate_area: float
    dram_bandwidth: float
    noc_bandwidth_2d: float
    vertical_bandwidth_3d: float
    memory_array_overhead: float = 1.0
    fixed_yield: float | None = None
    die_overrides: Mapping[str, Mapping[str, float | None]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        numeric = [
            f.name
            for f in dataclasses.fields(self)
            if f.name not in ("name", "fixed_yield", "die_overrides")
        ]
        for key in numeric:
            value = getattr(self, key)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                raise ConfigError(f"node {self.name!r}: {key} must be finite and >= 0, got {value!r}")
        if self.clock_frequency <= 0:
            raise ConfigError(f"node {self.name!r}: clock_frequency must be > 0")
        if self.wafer_diameter <= 0:
            raise ConfigError(f"node {self.name!r}: wafer_diameter must be > 0")
        if self.cluster_alpha <= 0:
            raise ConfigError(f"node {self.name!r}: cluster_alpha must be > 0")
        if self.memory_array_overhead < 1:
            raise ConfigError(f"node {self.name!r}: memory_array_overhead must be >= 1")
        if self.fixed_yield is not None and not 0 < self.fixed_yield <= 1:
            raise ConfigError(f"node {self.name!r}: fixed_yield must lie in (0, 1]")
        if self.vertical_bandwidth_3d < self.noc_bandwidth_2d:
            raise ConfigError(
                f"node {self.name!r}: vertical_bandwidth_3d must be >= noc_bandwidth_2d"
            )
        for kind, block in self.die_overrides.items():
            if kind not in DIE_KINDS:
                raise ConfigError(f"node {self.name!r}: unknown die kind {kind!r} in die_overrides")
            for key in block:
                if key not in OVERRIDABLE:
                    raise ConfigError(
                        f"node {self.name!r}: key {key!r} cannot be overridden per die kind"
                    )
        # freeze nested mappings so the node stays hashable-by-identity and immutable
        object.__setattr__(
            self,
            "die_overrides",
            {k: dict(v) for k, v in self.die_overrides.items()},
        )

    def __hash__(self) -> int:
        return hash((self.name, self.feature_size, self.clock_frequency, self.gate_area))

    def for_die(self, kind: str) -> "TechNode":
        """Node view with the overrides for ``kind`` ("logic" or "memory") applied."""
        if kind not in DIE_KINDS:
            raise InvalidArgument(f"unknown die kind {kind!r}")
        block = self.die_overrides.get(kind)
        if not block:
            return self
        return dataclasses.replace(self, die_overrides={}, **block)

    @property
    def wafer_area(self) -> float:
        return math.pi * (self.wafer_diameter / 2.0) ** 2


class TechTable(Mapping[str, TechNode]):
    """Ordered, name-keyed collection of :class:`TechNode`."""

    def __init__(self, nodes: list[TechNode]):
        if not nodes:
            raise ConfigError("technology table is empty")
        self._nodes: dict[str, TechNode] = {}
        for node in nodes:
            if node.name in self._nodes:
                raise ConfigError(f"duplicate node name {node.name!r}")
            self._nodes[node.name] = node

    def __getitem__(self, name: str) -> TechNode:
        try:
            return self._nodes[name]
        except KeyError:
            raise ConfigError(
                f"unknown technology node {name!r}; available: {', '.join(self._nodes)}"
            ) from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._nodes)

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"TechTable({list(self._nodes)})"


_NODE_KEYS = {f.name for f in dataclasses.fields(TechNode)}


def node_from_dict(doc: Mapping) -> TechNode:
    unknown = sorted(set(doc) - _NODE_KEYS)
    if unknown:
        where = doc.get("name", "<unnamed>")
        raise ConfigError(f"node {where!r}: unknown key {unknown[0]!r}")
    missing = sorted(
        f.name
        for f in dataclasses.fields(TechNode)
        if f.name not in doc
        and f.default is dataclasses.MISSING
        and f.default_factory is dataclasses.MISSING
    )
    if missing:
        raise ConfigError(f"node {doc.get('name', '<unnamed>')!r}: missing key {missing[0]!r}")
    return TechNode(**doc)


def table_from_dict(doc: Mapping) -> TechTable:
    unknown = sorted(set(doc) - {"nodes", "comment"})
    if unknown:
        raise ConfigError(f"technology table: unknown key {unknown[0]!r}")
    if "nodes" not in doc:
        raise ConfigError("technology table: missing key 'nodes'")
    return TechTable([node_from_dict(n) for n in doc["nodes"]])


def load_table(path: str | Path | None = None) -> TechTable:
    """Load a technology table from JSON; ``None`` loads the bundled 45/14/7 nm table."""
    if path is None:
        text = resources.files("approx3d.data").joinpath("tech_nodes.json").read_text()
    else:
        text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"technology table is not valid JSON: {exc}") from exc
    return table_from_dict(doc)


def _check_area(die_area: float) -> float:
    area = float(die_area)
    if not math.isfinite(area) or area < 0:
        raise InvalidArgument(f"die area must be finite and >= 0, got {die_area!r}")
    return area


def yield_for_area(node: TechNode, die_area: float) -> float:
    """Fraction of functional dies.

    Returns ``fixed_yield`` when the node carries one, otherwise the
    negative-binomial model ``(1 + A*D0/alpha) ** -alpha``.
    """
    area = _check_area(die_area)
    if node.fixed_yield is not None:
        return node.fixed_yield
    if node.defect_density == 0:
        return 1.0
    return (1.0 + area * node.defect_density / node.cluster_alpha) ** (-node.cluster_alpha)


def dies_per_wafer(node: TechNode, die_area: float) -> int:
    area = float(die_area)
    if not math.isfinite(area) or area <= 0:
        raise InvalidArgument(f"die area must be finite and > 0, got {die_area!r}")
    d = node.wafer_diameter
    gross = math.floor(node.wafer_area / area)
    edge = math.floor(math.pi * d / math.sqrt(2.0 * area))
    return max(0, gross - edge)


def wasted_area_per_die(node: TechNode, die_area: float) -> float:
    """Wafer area not covered by whole dies, amortised over the good-or-bad dies cut."""
    n = dies_per_wafer(node, die_area)
    if n == 0:
        raise NoFeasibleDie(
            f"a {die_area:.4g} mm² die does not fit on a {node.wafer_diameter:g} mm wafer"
        )
    return (node.wafer_area - n * die_area) / n
