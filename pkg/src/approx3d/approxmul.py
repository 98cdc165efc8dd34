"""Parametric approximate unsigned multipliers.

Four families stand in for a netlist library of approximate circuits:

``EXACT``
    ``a * b``.
``TRUNC(k)``
    The exact product with its ``k`` least-significant bits forced to zero.
``PERF(j)``
    Partial-product perforation: rows ``0 .. j-1`` of the partial-product array
    (the rows selected by the ``j`` low bits of ``b``) are omitted, so the
    result is ``a * (b & ~(2**j - 1))``.
``LOA(k)``
    Array multiplier whose row adders are lower-part-OR adders. Partial
    products ``pp_j = (a * b_j) << j`` are accumulated row by row; when row
    ``j`` is added, columns ``j .. j+k-1`` are combined with bitwise OR (no
    carry generated) and columns ``>= j+k`` are added exactly::

        acc = pp_0
        for j in 1 .. width-1:
            s   = j + k
            acc = (acc mod 2**j)
                | ((acc | pp_j) & ((2**k - 1) << j))
                | (((acc >> s) + (pp_j >> s)) << s)

TRUNC and PERF never exceed the exact product; neither does LOA, since an OR
never exceeds the corresponding sum.

Error metrics (all computed by exhaustive enumeration of ``2**(2*width)`` pairs):

* ``mre``  - mean of ``|approx - exact| / exact`` over pairs with a nonzero
  exact product (zero-product pairs are excluded from numerator and count),
* ``med``  - mean of ``|approx - exact|`` over all pairs,
* ``wce``  - maximum ``|approx - exact|``,
* ``er``   - fraction of pairs with ``approx != exact``.

Area comes from a unit-gate model of a ripple-carry array multiplier: an
``N x N`` array has ``N*N`` AND gates (2 NAND2-eq), one row of ``N`` half adders
(5) and ``N-2`` rows of ``N`` full adders (9). See :func:`gate_count`.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import DuplicateId, IncompleteRecord, InvalidArgument, UnsupportedWidth
from .techlib import TechNode, TechTable

MAX_CHARACTERIZE_WIDTH = 12

AND_GATES = 2
HA_GATES = 5
FA_GATES = 9
OR_GATES = 1
# carry-only remnants of a cell whose sum output is discarded
HA_CARRY_GATES = 2
FA_CARRY_GATES = 5


class Family(str, enum.Enum):
    EXACT = "EXACT"
    TRUNC = "TRUNC"
    PERF = "PERF"
    LOA = "LOA"


_ID_TAG = {Family.EXACT: "", Family.TRUNC: "k", Family.PERF: "j", Family.LOA: "k"}


@dataclass(frozen=True, order=True)
class MultiplierSpec:
    family: Family
    width: int = 8
    param: int = 0

    def __post_init__(self) -> None:
        try:
            fam = Family(self.family)
        except ValueError:
            raise InvalidArgument(f"unknown multiplier family {self.family!r}") from None
        object.__setattr__(self, "family", fam)
        if not isinstance(self.width, (int, np.integer)) or not 2 <= self.width <= 16:
            raise InvalidArgument(f"width must be an integer in 2..16, got {self.width!r}")
        if not isinstance(self.param, (int, np.integer)) or self.param < 0:
            raise InvalidArgument(f"param must be a non-negative integer, got {self.param!r}")
        limit = 2 * self.width if fam is Family.TRUNC else self.width
        if fam is Family.EXACT:
            object.__setattr__(self, "param", 0)
        elif self.param > limit:
            raise InvalidArgument(f"{fam.value} param {self.param} exceeds {limit} for width {self.width}")
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "param", int(self.param))

    @property
    def id(self) -> str:
        base = f"{self.family.value.lower()}_w{self.width}"
        if self.family is Family.EXACT:
            return base
        return f"{base}_{_ID_TAG[self.family]}{self.param}"

    @property
    def code(self) -> int:
        return kernels.FAMILY_CODES[self.family.value]

    @classmethod
    def parse(cls, text: str) -> "MultiplierSpec":
        """Parse ``FAMILY[:param][@width]`` (e.g. ``TRUNC:3``, ``LOA:2@10``, ``EXACT``)."""
        body, _, width = text.partition("@")
        fam, _, param = body.partition(":")
        try:
            return cls(
                Family(fam.strip().upper()),
                int(width) if width else 8,
                int(param) if param else 0,
            )
        except ValueError as exc:
            raise InvalidArgument(f"cannot parse multiplier spec {text!r}: {exc}") from None


EXACT8 = MultiplierSpec(Family.EXACT, 8)


@dataclass(frozen=True)
class ErrorMetrics:
    mean_relative_error: float
    mean_error_distance: float
    worst_case_error: int
    error_rate: float


@dataclass
class MultiplierRecord:
    id: str
    spec: MultiplierSpec
    metrics: ErrorMetrics
    gate_count: int
    area_by_node: dict[str, float]
    accuracy_drop: dict[str, float] = field(default_factory=dict)

    def area(self, node: str) -> float:
        try:
            return self.area_by_node[node]
        except KeyError:
            raise IncompleteRecord(f"multiplier {self.id!r} has no area for node {node!r}") from None


def approx_multiply(spec: MultiplierSpec, a: int, b: int) -> int:
    """Bit-exact behavioural product of two unsigned ``spec.width``-bit operands."""
    hi = 1 << spec.width
    if not (0 <= a < hi and 0 <= b < hi):
        raise InvalidArgument(f"operands must lie in [0, {hi}), got {a}, {b}")
    return int(kernels.multiply_array(spec.code, spec.width, spec.param, np.array([a]), np.array([b]))[0])


def multiply_array(spec: MultiplierSpec, a, b) -> np.ndarray:
    """Vectorised :func:`approx_multiply`; operands are not range-checked."""
    return kernels.multiply_array(spec.code, spec.width, spec.param, a, b)


def characterize_errors(spec: MultiplierSpec) -> ErrorMetrics:
    if spec.width > MAX_CHARACTERIZE_WIDTH:
        raise UnsupportedWidth(
            f"exhaustive characterisation supports width <= {MAX_CHARACTERIZE_WIDTH}, got {spec.width}"
        )
    n = 1 << spec.width
    ops = np.arange(n, dtype=np.int64)
    a = np.repeat(ops, n)
    b = np.tile(ops, n)
    exact = a * b
    err = np.abs(multiply_array(spec, a, b) - exact)
    nz = exact != 0
    rel = err[nz] / exact[nz]
    # fsum is correctly rounded, so the result is independent of summation order
    mre = math.fsum(rel.tolist()) / int(nz.sum())
    return ErrorMetrics(
        mean_relative_error=mre,
        mean_error_distance=int(err.sum()) / err.size,
        worst_case_error=int(err.max()),
        error_rate=int(np.count_nonzero(err)) / err.size,
    )


def _array_cells(width: int, rows: int) -> list[tuple[str, int]]:
    """(kind, column) of every cell in a ``width x rows`` ripple-carry array."""
    cells = [("AND", i + j) for j in range(rows) for i in range(width)]
    for j in range(1, rows):
        kind = "HA" if j == 1 else "FA"
        cells.extend((kind, j + r) for r in range(width))
    return cells


_FULL = {"AND": AND_GATES, "HA": HA_GATES, "FA": FA_GATES}
_CARRY = {"HA": HA_CARRY_GATES, "FA": FA_CARRY_GATES}


@lru_cache(maxsize=None)
def gate_count(spec: MultiplierSpec) -> int:
    """NAND2-equivalent gate count under the unit-gate model.

    * ``PERF(j)``: an ``N x (N-j)`` array (``j`` AND rows and one adder row fewer
      per omitted row).
    * ``TRUNC(k)``: cells in columns ``< k-1`` are removed; adders in column
      ``k-1`` shrink to their carry logic (they still produce the carry into
      column ``k``) and keep their AND inputs; column-0's lone AND goes once
      ``k >= 1``.
    * ``LOA(k)``: the ``k`` low cells of every adder row become single OR gates.
    """
    w, p = spec.width, spec.param
    if spec.family is Family.PERF:
        return sum(_FULL[kind] for kind, _ in _array_cells(w, w - p))
    cells = _array_cells(w, w)
    if spec.family is Family.LOA:
        total = AND_GATES * w * w
        for j in range(1, w):
            full = HA_GATES if j == 1 else FA_GATES
            total += min(p, w) * OR_GATES + (w - min(p, w)) * full
        return total
    if spec.family is Family.EXACT or p == 0:
        return sum(_FULL[kind] for kind, _ in cells)
    adder_cols = {col for kind, col in cells if kind != "AND"}
    total = 0
    for kind, col in cells:
        if col >= p:
            total += _FULL[kind]
        elif col == p - 1:
            if kind == "AND":
                total += AND_GATES if col in adder_cols else 0
            else:
                total += _CARRY[kind]
    return total


def estimate_multiplier_area(spec: MultiplierSpec, node: TechNode) -> float:
    """Multiplier area in mm²."""
    return gate_count(spec) * node.gate_area


def default_specs(width: int = 8) -> list[MultiplierSpec]:
    """EXACT + TRUNC k=1..8 + PERF j=1..4 + LOA k=1..6 (19 specs at width 8)."""
    specs = [MultiplierSpec(Family.EXACT, width)]
    specs += [MultiplierSpec(Family.TRUNC, width, k) for k in range(1, 9)]
    specs += [MultiplierSpec(Family.PERF, width, j) for j in range(1, 5)]
    specs += [MultiplierSpec(Family.LOA, width, k) for k in range(1, 7)]
    return specs


def build_library(specs: Sequence[MultiplierSpec], table: TechTable) -> list[MultiplierRecord]:
    if not specs:
        raise InvalidArgument("multiplier spec list is empty")
    seen: set[str] = set()
    records = []
    for spec in specs:
        if spec.id in seen:
            raise DuplicateId(f"duplicate multiplier spec {spec.id!r}")
        seen.add(spec.id)
        records.append(
            MultiplierRecord(
                id=spec.id,
                spec=spec,
                metrics=characterize_errors(spec),
                gate_count=gate_count(spec),
                area_by_node={name: estimate_multiplier_area(spec, node) for name, node in table.items()},
            )
        )
    return records


CSV_FIELDS = ["id", "family", "width", "param", "mre", "med", "wce", "er", "gate_count"]


def library_to_csv(records: Iterable[MultiplierRecord], node_names: Sequence[str] | None = None) -> str:
    records = list(records)
    if node_names is None:
        node_names = list(records[0].area_by_node) if records else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS + [f"area_{n}" for n in node_names])
    for r in records:
        m = r.metrics
        writer.writerow(
            [
                r.id,
                r.spec.family.value,
                r.spec.width,
                r.spec.param,
                repr(m.mean_relative_error),
                repr(m.mean_error_distance),
                m.worst_case_error,
                repr(m.error_rate),
                r.gate_count,
            ]
            + [repr(r.area_by_node[n]) for n in node_names]
        )
    return buf.getvalue()


def library_from_csv(text: str) -> list[MultiplierRecord]:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [f for f in CSV_FIELDS if f not in header]
    if missing:
        raise InvalidArgument(f"library CSV lacks column {missing[0]!r}")
    nodes = [h[len("area_"):] for h in header if h.startswith("area_")]
    out = []
    for row in reader:
        spec = MultiplierSpec(Family(row["family"]), int(row["width"]), int(row["param"]))
        out.append(
            MultiplierRecord(
                id=row["id"],
                spec=spec,
                metrics=ErrorMetrics(float(row["mre"]), float(row["med"]), int(row["wce"]), float(row["er"])),
                gate_count=int(row["gate_count"]),
                area_by_node={n: float(row[f"area_{n}"]) for n in nodes},
            )
        )
    ids = [r.id for r in out]
    if len(set(ids)) != len(ids):
        raise DuplicateId("library CSV contains duplicate ids")
    return out


def attach_accuracy(records: Iterable[MultiplierRecord], table: Mapping[str, Mapping[str, float]]) -> None:
    """Fill ``accuracy_drop`` from ``{multiplier_id: {workload: delta_a}}``."""
    for r in records:
        r.accuracy_drop.update(table.get(r.id, {}))
