import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from approx3d.accproxy import (
    PROXY_WORKLOAD,
    Bf16Value,
    Dataset,
    ModelLayer,
    TinyModel,
    accuracy,
    accuracy_drop,
    accuracy_from_csv,
    accuracy_to_csv,
    bf16_approx_product,
    forward_inference,
    load_dataset,
    load_model,
    measure_library,
    predict,
    save_dataset,
    save_model,
    select_multiplier,
    to_bf16_bits,
    truncate_bf16,
)
from approx3d.approxmul import EXACT8, Family, MultiplierRecord, MultiplierSpec, build_library, default_specs
from approx3d.errors import IncompleteRecord, InvalidArgument
from conftest import GOLDEN
from oracles.multiplier_bruteforce import reference_product

finite_bits = st.integers(0, 0xFFFF).filter(lambda b: (b >> 7) & 0xFF != 255)


def reference_bf16(spec: MultiplierSpec, xb: int, wb: int) -> np.float32:
    """Exact rational value of the approximate product, rounded once to float32."""
    def fields(b):
        s, e, m = b >> 15, (b >> 7) & 0xFF, b & 0x7F
        return s, (1 if e == 0 else e), (m if e == 0 else m | 0x80)

    sx, ex, gx = fields(xb)
    sw, ew, gw = fields(wb)
    shift = spec.width - 8
    ax, aw = (gx << shift, gw << shift) if shift >= 0 else (gx >> -shift, gw >> -shift)
    p = reference_product(spec.family.value, spec.width, spec.param, ax, aw)
    value = Fraction(p) * Fraction(2) ** (ex + ew - 254 - 14 - 2 * shift)
    with np.errstate(over="ignore"):  # overflow to inf is the expected result
        out = np.float32(float(value))
    return -out if sx ^ sw else out


@given(finite_bits, finite_bits)
def test_exact_mac_product_equals_float32_product(xb, wb):
    x, w = Bf16Value.from_bits(xb), Bf16Value.from_bits(wb)
    got = bf16_approx_product(EXACT8, x, w)
    with np.errstate(over="ignore"):
        want = np.float32(x.to_float()) * np.float32(w.to_float())
    assert got == want and np.signbit(got) == np.signbit(want)


@given(st.sampled_from(default_specs() + [MultiplierSpec(Family.LOA, 10, 3), MultiplierSpec(Family.TRUNC, 6, 2)]),
       finite_bits, finite_bits)
def test_approx_product_matches_rational_reference(spec, xb, wb):
    got = bf16_approx_product(spec, Bf16Value.from_bits(xb), Bf16Value.from_bits(wb))
    assert got == reference_bf16(spec, xb, wb)


def test_special_values():
    inf, nan, zero, one = (Bf16Value.from_float(v) for v in (np.inf, np.nan, 0.0, 1.0))
    spec = MultiplierSpec(Family.PERF, 8, 4)
    assert np.isnan(bf16_approx_product(spec, nan, one))
    assert np.isnan(bf16_approx_product(spec, inf, zero))
    assert bf16_approx_product(spec, inf, Bf16Value.from_float(-2.0)) == -np.inf


def test_bf16_truncation():
    assert truncate_bf16(np.float32(1.0 + 2**-10)) == np.float32(1.0)
    nan_low_payload = np.array([0x7F800001], dtype=np.uint32).view(np.float32)
    assert np.isnan(truncate_bf16(nan_low_payload))[0]
    assert Bf16Value.from_float(-1.5) == Bf16Value(1, 127, 0x40)


def test_bf16_field_validation():
    with pytest.raises(InvalidArgument):
        Bf16Value(2, 0, 0)
    with pytest.raises(InvalidArgument):
        Bf16Value(0, 0, 128)


def _small_model(seed=0):
    rng = np.random.default_rng(seed)
    return TinyModel(
        "tiny",
        (2, 5, 5),
        [
            ModelLayer("conv", rng.normal(size=(3, 2, 3, 3)), rng.normal(size=3), "relu", stride=1, padding=1),
            ModelLayer("dense", rng.normal(size=(75, 4)), rng.normal(size=4)),
        ],
    )


def test_dense_accumulates_in_input_order():
    model = TinyModel("d", (6,), [ModelLayer("dense", np.linspace(-1, 1, 18).reshape(6, 3), np.ones(3))])
    x = np.array([[0.5, -2.0, 3.25, 1e-3, 7.0, -0.125]], dtype=np.float32)
    spec = MultiplierSpec(Family.LOA, 8, 3)
    from approx3d.accproxy import _forward_batch

    got = _forward_batch(model, x, spec)[0]
    for o in range(3):
        acc = np.float32(0.0)
        for i in range(6):
            xb, wb = int(to_bf16_bits(x[0, i])), int(to_bf16_bits(model.layers[0].weight[i, o]))
            acc = np.float32(acc + reference_bf16(spec, xb, wb))
        assert got[o] == np.float32(acc + np.float32(1.0))


def test_conv_matches_direct_loop():
    model = _small_model()
    x = np.random.default_rng(1).normal(size=(2, 2, 5, 5)).astype(np.float32)
    from approx3d.accproxy import _forward_batch

    conv_only = TinyModel("c", (2, 5, 5), [model.layers[0]])
    got = _forward_batch(conv_only, x, EXACT8).reshape(2, 3, 5, 5)
    w = truncate_bf16(model.layers[0].weight).astype(np.float64)
    xp = np.pad(truncate_bf16(x).astype(np.float64), ((0, 0), (0, 0), (1, 1), (1, 1)))
    want = np.zeros((2, 3, 5, 5))
    for n in range(2):
        for k in range(3):
            for i in range(5):
                for j in range(5):
                    want[n, k, i, j] = (xp[n, :, i : i + 3, j : j + 3] * w[k]).sum() + model.layers[0].bias[k]
    assert np.allclose(got, np.maximum(want, 0), rtol=1e-5, atol=1e-5)


def test_forward_inference_shape_checked():
    model = _small_model()
    with pytest.raises(InvalidArgument):
        forward_inference(model, np.zeros((2, 4, 4)))
    assert forward_inference(model, np.zeros((2, 5, 5))) in range(4)


def test_model_and_dataset_round_trip(tmp_path):
    model = _small_model()
    save_model(model, tmp_path / "m.npz")
    back = load_model(tmp_path / "m.npz")
    assert back.fingerprint == model.fingerprint
    pixels = np.arange(2 * 50, dtype=np.uint8).reshape(2, 2, 5, 5)
    save_dataset(tmp_path / "d", pixels, np.array([1, 3]), 0.5)
    ds = load_dataset(tmp_path / "d")
    assert ds.samples.shape == (2, 2, 5, 5) and list(ds.labels) == [1, 3]
    assert ds.samples[1, 0, 0, 1] == np.float32(51 * 0.5)
    assert np.array_equal(predict(back, ds.samples), predict(model, ds.samples))


def test_bundled_proxy_exact_accuracy():
    model, data = load_model(), load_dataset()
    assert len(data) == 540
    assert accuracy(model, data, EXACT8) == pytest.approx(model.exact_accuracy)
    assert accuracy_drop(model, data, EXACT8).delta_a == 0.0


def test_empty_dataset_rejected():
    empty = Dataset("e", np.zeros((0, 64)), np.zeros(0))
    with pytest.raises(InvalidArgument):
        accuracy(load_model(), empty, EXACT8)


def test_golden_accuracy_table(table):
    lib = build_library(default_specs(), table)
    assert accuracy_to_csv(measure_library(lib, load_model(), load_dataset())) == (GOLDEN / "accuracy.csv").read_text()


def test_trunc3_accuracy_row():
    golden = accuracy_from_csv((GOLDEN / "accuracy.csv").read_text())
    rec = accuracy_drop(load_model(), load_dataset(), MultiplierSpec(Family.TRUNC, 8, 3))
    assert rec.delta_a == golden["trunc_w8_k3"][PROXY_WORKLOAD]


def _record(ident, area, drop):
    spec = MultiplierSpec(Family.TRUNC, 8, int(ident[1:]))
    return MultiplierRecord(ident, spec, None, 0, {"n": area}, {"w": drop})


def brute_select(library, delta):
    ok = [r for r in library if r.accuracy_drop["w"] <= delta]
    if not ok:
        return None
    best_area = min(r.area("n") for r in ok)
    return sorted(r.id for r in ok if r.area("n") == best_area)[0]


def test_select_matches_brute_force_scan():
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randint(1, 12)
        areas = [rng.choice([1.0, 2.0, 3.0, rng.random()]) for _ in range(n)]  # repeated values force ties
        drops = [rng.choice([0.0, 0.01, 0.02, 0.03, 0.05, rng.random() / 10]) for _ in range(n)]
        idx = rng.sample(range(1, 17), n)
        lib = [_record(f"t{i}", a, d) for i, a, d in zip(idx, areas, drops)]
        delta = rng.choice([0.0, 0.01, 0.02, 0.03, rng.random() / 10])
        want = brute_select(lib, delta)
        if want is None:
            with pytest.raises(IncompleteRecord):
                select_multiplier(lib, "w", delta, "n")
        else:
            assert select_multiplier(lib, "w", delta, "n").id == want


def test_select_bundled(library):
    assert select_multiplier(library, PROXY_WORKLOAD, 0.0, "14nm").id == "perf_w8_j3"
    for delta in (0.01, 0.02, 0.03):
        assert select_multiplier(library, PROXY_WORKLOAD, delta, "14nm").id == "perf_w8_j4"


def test_select_errors(library):
    with pytest.raises(InvalidArgument):
        select_multiplier(library, PROXY_WORKLOAD, -0.1, "14nm")
    with pytest.raises(IncompleteRecord):
        select_multiplier(library, "imagenet", 0.03, "14nm")
    with pytest.raises(InvalidArgument):
        select_multiplier([], PROXY_WORKLOAD, 0.03, "14nm")


def test_accuracy_csv_validation():
    with pytest.raises(InvalidArgument):
        accuracy_from_csv("a,b\n1,2\n")
