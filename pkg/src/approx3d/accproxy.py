"""Accuracy-drop measurement with approximate bfloat16 mantissa multipliers.

A small pretrained network is evaluated with every multiplication routed
through a bfloat16 MAC whose significand multiplier is an approximate
:class:`~approx3d.approxmul.MultiplierSpec`. Accumulation stays exact float32.

Model file format (``.npz``)
----------------------------
``meta``
    JSON string: ``{"name", "input_shape", "num_classes", "exact_accuracy",
    "dataset", "layers": [{"kind": "dense"|"conv", "activation": "relu"|"none",
    "stride", "padding"}]}`` (``stride``/``padding`` only for conv).
``w{i}``, ``b{i}``
    float32 weight and bias of layer ``i``. Dense weights are ``(in, out)``;
    conv weights are ``(K, C, R, S)``.

Dataset format
--------------
``<stem>.bin`` holds ``n * prod(sample_shape)`` uint8 pixel values, row major;
``<stem>_labels.bin`` holds ``n`` uint8 labels. ``<stem>.json`` carries
``{"sample_shape": [...], "scale": float}``; inputs are ``pixels * scale``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .approxmul import EXACT8, Family, MultiplierRecord, MultiplierSpec, multiply_array
from .errors import IncompleteRecord, InvalidArgument

PROXY_WORKLOAD = "digits-mlp"


@dataclass(frozen=True)
class Bf16Value:
    sign: int
    exponent: int
    mantissa: int

    def __post_init__(self) -> None:
        if self.sign not in (0, 1) or not 0 <= self.exponent < 256 or not 0 <= self.mantissa < 128:
            raise InvalidArgument(f"invalid bfloat16 fields {self}")

    @property
    def bits(self) -> int:
        return (self.sign << 15) | (self.exponent << 7) | self.mantissa

    @classmethod
    def from_bits(cls, bits: int) -> "Bf16Value":
        bits = int(bits) & 0xFFFF
        return cls(bits >> 15, (bits >> 7) & 0xFF, bits & 0x7F)

    @classmethod
    def from_float(cls, value: float) -> "Bf16Value":
        """Truncate a float32 to bfloat16 (NaN stays NaN)."""
        return cls.from_bits(int(to_bf16_bits(np.float32(value))))

    def to_float(self) -> np.float32:
        return from_bf16_bits(np.uint16(self.bits))

    def is_finite(self) -> bool:
        return self.exponent != 255


def to_bf16_bits(x) -> np.ndarray:
    """float32 -> bfloat16 bit patterns by dropping the low 16 mantissa bits."""
    u = np.asarray(x, dtype=np.float32).view(np.uint32)
    hi = (u >> 16).astype(np.uint16)
    # a NaN whose payload lives only in the dropped bits would turn into Inf
    lost_nan = ((u & 0x7F800000) == 0x7F800000) & ((u & 0x007FFFFF) != 0) & ((hi & 0x7F) == 0)
    return np.where(lost_nan, hi | np.uint16(0x40), hi).astype(np.uint16)


def from_bf16_bits(bits) -> np.ndarray:
    return (np.asarray(bits, dtype=np.uint16).astype(np.uint32) << 16).view(np.float32)


def truncate_bf16(x) -> np.ndarray:
    """Round-trip float32 values through bfloat16."""
    return from_bf16_bits(to_bf16_bits(x))


@lru_cache(maxsize=64)
def significand_lut(spec: MultiplierSpec) -> tuple[np.ndarray, int]:
    """Products of all pairs of 8-bit bfloat16 significands under ``spec``.

    Significands are left-aligned into the multiplier's operand width (padded
    with zeros for widths above 8, low bits dropped below 8). Returns the
    ``256 x 256`` table and the power of two its entries carry.
    """
    g = np.arange(256, dtype=np.int64)
    shift = spec.width - 8
    ops = g << shift if shift >= 0 else g >> -shift
    a, b = np.meshgrid(ops, ops, indexing="ij")
    lut = multiply_array(spec, a, b).astype(np.int64)
    lut.setflags(write=False)
    return lut, 2 * shift


def bf16_approx_product(spec: MultiplierSpec, x: Bf16Value, w: Bf16Value) -> np.float32:
    """bfloat16 product with an approximate significand multiplier, widened to float32."""
    lut, scale = significand_lut(spec)
    out = kernels.bf16_products(np.array([x.bits], np.uint16), np.array([w.bits], np.uint16), lut, scale)
    return np.float32(out[0])


@dataclass
class ModelLayer:
    kind: str
    weight: np.ndarray
    bias: np.ndarray
    activation: str = "none"
    stride: int = 1
    padding: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("dense", "conv"):
            raise InvalidArgument(f"unknown layer kind {self.kind!r}")
        if self.activation not in ("relu", "none"):
            raise InvalidArgument(f"unknown activation {self.activation!r}")
        self.weight = np.asarray(self.weight, dtype=np.float32)
        self.bias = np.asarray(self.bias, dtype=np.float32)
        if not (np.all(np.isfinite(self.weight)) and np.all(np.isfinite(self.bias))):
            raise InvalidArgument("layer weights must be finite")
        want = 2 if self.kind == "dense" else 4
        if self.weight.ndim != want:
            raise InvalidArgument(f"{self.kind} weight must have {want} dims")
        n_out = self.weight.shape[1] if self.kind == "dense" else self.weight.shape[0]
        if self.bias.shape != (n_out,):
            raise InvalidArgument(f"bias shape {self.bias.shape} != ({n_out},)")

    def output_shape(self, in_shape: tuple[int, ...]) -> tuple[int, ...]:
        if self.kind == "dense":
            if int(np.prod(in_shape)) != self.weight.shape[0]:
                raise InvalidArgument(f"dense layer expects {self.weight.shape[0]} inputs, got shape {in_shape}")
            return (self.weight.shape[1],)
        if len(in_shape) != 3 or in_shape[0] != self.weight.shape[1]:
            raise InvalidArgument(f"conv layer expects (C={self.weight.shape[1]}, H, W), got {in_shape}")
        _, h, w = in_shape
        k, _, r, s = self.weight.shape
        ho = (h + 2 * self.padding - r) // self.stride + 1
        wo = (w + 2 * self.padding - s) // self.stride + 1
        if ho < 1 or wo < 1:
            raise InvalidArgument("conv output would be empty")
        return (k, ho, wo)


@dataclass
class TinyModel:
    name: str
    input_shape: tuple[int, ...]
    layers: list[ModelLayer]
    exact_accuracy: float | None = None
    dataset: str | None = None

    def __post_init__(self) -> None:
        self.input_shape = tuple(int(d) for d in self.input_shape)
        shape = self.input_shape
        for layer in self.layers:
            shape = layer.output_shape(shape)
        self.output_shape = shape

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256(self.name.encode())
        for layer in self.layers:
            h.update(layer.weight.tobytes())
            h.update(layer.bias.tobytes())
        return h.hexdigest()


@dataclass
class Dataset:
    name: str
    samples: np.ndarray
    labels: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.samples) != len(self.labels):
            raise InvalidArgument("samples and labels differ in length")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.samples.tobytes() + self.labels.tobytes()).hexdigest()


def _data_path(name: str):
    return resources.files("approx3d.data").joinpath(name)


def load_model(path: str | Path | None = None) -> TinyModel:
    src = _data_path("proxy_model.npz") if path is None else Path(path)
    with src.open("rb") as fh, np.load(fh, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        layers = [
            ModelLayer(
                kind=spec["kind"],
                weight=z[f"w{i}"],
                bias=z[f"b{i}"],
                activation=spec.get("activation", "none"),
                stride=spec.get("stride", 1),
                padding=spec.get("padding", 0),
            )
            for i, spec in enumerate(meta["layers"])
        ]
    return TinyModel(
        name=meta["name"],
        input_shape=tuple(meta["input_shape"]),
        layers=layers,
        exact_accuracy=meta.get("exact_accuracy"),
        dataset=meta.get("dataset"),
    )


def save_model(model: TinyModel, path: str | Path) -> None:
    meta = {
        "name": model.name,
        "input_shape": list(model.input_shape),
        "num_classes": int(np.prod(model.output_shape)),
        "exact_accuracy": model.exact_accuracy,
        "dataset": model.dataset,
        "layers": [],
    }
    arrays = {}
    for i, layer in enumerate(model.layers):
        entry = {"kind": layer.kind, "activation": layer.activation}
        if layer.kind == "conv":
            entry.update(stride=layer.stride, padding=layer.padding)
        meta["layers"].append(entry)
        arrays[f"w{i}"] = layer.weight
        arrays[f"b{i}"] = layer.bias
    np.savez(path, meta=np.array(json.dumps(meta)), **arrays)


def load_dataset(stem: str | Path | None = None) -> Dataset:
    """Load ``<stem>.bin``, ``<stem>_labels.bin`` and ``<stem>.json``; default is the bundled digits test split."""
    if stem is None:
        base = "digits_test"
        read = lambda suffix: _data_path(base + suffix).read_bytes()  # noqa: E731
        name = base
    else:
        stem = Path(stem)
        read = lambda suffix: Path(str(stem) + suffix).read_bytes()  # noqa: E731
        name = stem.name
    info = json.loads(read(".json"))
    shape = tuple(info["sample_shape"])
    pixels = np.frombuffer(read(".bin"), dtype=np.uint8)
    labels = np.frombuffer(read("_labels.bin"), dtype=np.uint8)
    per = int(np.prod(shape))
    if pixels.size != per * labels.size:
        raise InvalidArgument(f"dataset {name}: {pixels.size} pixels for {labels.size} labels of shape {shape}")
    samples = pixels.reshape((labels.size,) + shape).astype(np.float32) * np.float32(info["scale"])
    return Dataset(name, samples, labels.astype(np.int64))


def save_dataset(stem: str | Path, pixels: np.ndarray, labels: np.ndarray, scale: float) -> None:
    pixels = np.asarray(pixels, dtype=np.uint8)
    Path(str(stem) + ".bin").write_bytes(pixels.tobytes())
    Path(str(stem) + "_labels.bin").write_bytes(np.asarray(labels, dtype=np.uint8).tobytes())
    Path(str(stem) + ".json").write_text(
        json.dumps({"sample_shape": list(pixels.shape[1:]), "scale": scale}) + "\n"
    )


def _im2col(x: np.ndarray, r: int, s: int, stride: int, padding: int) -> tuple[np.ndarray, int, int]:
    b, c, h, w = x.shape
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    ho = (h + 2 * padding - r) // stride + 1
    wo = (w + 2 * padding - s) // stride + 1
    cols = np.empty((b, ho, wo, c, r, s), dtype=x.dtype)
    for i in range(r):
        for j in range(s):
            cols[:, :, :, :, i, j] = xp[:, :, i : i + stride * ho : stride, j : j + stride * wo : stride].transpose(0, 2, 3, 1)
    return cols.reshape(b * ho * wo, c * r * s), ho, wo


def _forward_batch(model: TinyModel, inputs: np.ndarray, spec: MultiplierSpec) -> np.ndarray:
    lut, scale = significand_lut(spec)
    x = np.asarray(inputs, dtype=np.float32)
    for layer in model.layers:
        if layer.kind == "dense":
            xb = to_bf16_bits(x.reshape(len(x), -1))
            wb = to_bf16_bits(layer.weight)
            x = kernels.dense_bf16(xb, wb, layer.bias, lut, scale)
        else:
            k, c, r, s = layer.weight.shape
            cols, ho, wo = _im2col(x, r, s, layer.stride, layer.padding)
            wb = to_bf16_bits(layer.weight.reshape(k, c * r * s).T)
            y = kernels.dense_bf16(to_bf16_bits(cols), wb, layer.bias, lut, scale)
            x = y.reshape(len(x), ho, wo, k).transpose(0, 3, 1, 2)
        if layer.activation == "relu":
            x = np.maximum(x, np.float32(0.0))
    return x.reshape(len(x), -1)


def predict(model: TinyModel, inputs: np.ndarray, spec: MultiplierSpec = EXACT8) -> np.ndarray:
    """Class indices for a batch of inputs of shape ``(n, *model.input_shape)``."""
    inputs = np.asarray(inputs, dtype=np.float32)
    if inputs.shape[1:] != model.input_shape:
        raise InvalidArgument(f"input shape {inputs.shape[1:]} does not match model {model.input_shape}")
    if len(inputs) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.argmax(_forward_batch(model, inputs, spec), axis=1)


def forward_inference(model: TinyModel, sample: np.ndarray, spec: MultiplierSpec = EXACT8) -> int:
    sample = np.asarray(sample, dtype=np.float32)
    if sample.shape != model.input_shape:
        raise InvalidArgument(f"input shape {sample.shape} does not match model {model.input_shape}")
    return int(predict(model, sample[None], spec)[0])


@dataclass(frozen=True)
class AccuracyRecord:
    multiplier_id: str
    exact_accuracy: float
    approx_accuracy: float
    delta_a: float


_EXACT_CACHE: dict[tuple[str, str, int], float] = {}


def accuracy(model: TinyModel, dataset: Dataset, spec: MultiplierSpec) -> float:
    if len(dataset) == 0:
        raise InvalidArgument("dataset is empty")
    hits = int(np.count_nonzero(predict(model, dataset.samples, spec) == dataset.labels))
    return hits / len(dataset)


def exact_accuracy(model: TinyModel, dataset: Dataset, width: int = 8) -> float:
    key = (model.fingerprint, dataset.fingerprint, width)
    if key not in _EXACT_CACHE:
        _EXACT_CACHE[key] = accuracy(model, dataset, MultiplierSpec(Family.EXACT, width))
    return _EXACT_CACHE[key]


def accuracy_drop(model: TinyModel, dataset: Dataset, spec: MultiplierSpec) -> AccuracyRecord:
    if len(dataset) == 0:
        raise InvalidArgument("dataset is empty")
    exact = exact_accuracy(model, dataset, spec.width)
    approx = exact if spec.family is Family.EXACT else accuracy(model, dataset, spec)
    return AccuracyRecord(spec.id, exact, approx, exact - approx)


def measure_library(
    library: Iterable[MultiplierRecord],
    model: TinyModel,
    dataset: Dataset,
    workload: str = PROXY_WORKLOAD,
) -> list[AccuracyRecord]:
    """Measure every record and store its drop under ``accuracy_drop[workload]``."""
    out = []
    for record in library:
        acc = accuracy_drop(model, dataset, record.spec)
        record.accuracy_drop[workload] = acc.delta_a
        out.append(acc)
    return out


def select_multiplier(
    library: Sequence[MultiplierRecord],
    workload: str,
    delta: float,
    node: str,
) -> MultiplierRecord:
    """Smallest-area record at ``node`` whose accuracy drop is within ``delta``.

    Ties on area go to the lexicographically smallest id.
    """
    if delta < 0:
        raise InvalidArgument(f"delta must be >= 0, got {delta}")
    if not library:
        raise InvalidArgument("multiplier library is empty")
    best = None
    for record in library:
        if workload not in record.accuracy_drop:
            raise IncompleteRecord(f"multiplier {record.id!r} has no accuracy drop for {workload!r}")
        if record.accuracy_drop[workload] > delta:
            continue
        key = (record.area(node), record.id)
        if best is None or key < best[0]:
            best = (key, record)
    if best is None:
        raise IncompleteRecord(f"no multiplier satisfies delta={delta} for {workload!r}")
    return best[1]


ACCURACY_FIELDS = ["multiplier_id", "workload", "exact_acc", "approx_acc", "delta_a"]


def accuracy_to_csv(records: Iterable[AccuracyRecord], workload: str = PROXY_WORKLOAD) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ACCURACY_FIELDS)
    for r in records:
        writer.writerow([r.multiplier_id, workload, repr(r.exact_accuracy), repr(r.approx_accuracy), repr(r.delta_a)])
    return buf.getvalue()


def accuracy_from_csv(text: str) -> dict[str, dict[str, float]]:
    """``{multiplier_id: {workload: delta_a}}`` from an accuracy CSV."""
    out: dict[str, dict[str, float]] = {}
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or any(f not in reader.fieldnames for f in ACCURACY_FIELDS):
        raise InvalidArgument(f"accuracy CSV must have columns {','.join(ACCURACY_FIELDS)}")
    for row in reader:
        out.setdefault(row["multiplier_id"], {})[row["workload"]] = float(row["delta_a"])
    return out
