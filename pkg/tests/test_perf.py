import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from approx3d.dse import ArchChromosome
from approx3d.errors import ConfigError, InfeasibleArchitecture
from approx3d.perf import (
    BUNDLED_WORKLOADS,
    Layer,
    Workload,
    layer_from_dict,
    layer_macs,
    load_workload,
    network_delay,
    onchip_bandwidth,
    schedule_layer,
    summarize,
    tile_candidates,
    workload_from_dict,
)
from cases import PERF_ARCHS
from conftest import GOLDEN
from oracles import loopnest


def test_layer_geometry():
    conv = Layer("conv", C=3, K=8, H=32, W=30, R=3, S=3, stride=2, padding=1)
    assert (conv.H_out, conv.W_out, conv.P) == (16, 15, 240)
    assert layer_macs(conv) == 8 * 3 * 9 * 240
    fc = Layer.fc(512, 10, N=4)
    assert (fc.C, fc.K, fc.P, layer_macs(fc)) == (512, 10, 1, 4 * 5120)


@pytest.mark.parametrize(
    "kwargs",
    [dict(kind="pool", C=1, K=1), dict(kind="conv", C=0, K=1), dict(kind="fc", C=4, K=2, H=2),
     dict(kind="conv", C=1, K=1, H=2, W=2, R=3, S=3)],
)
def test_layer_validation(kwargs):
    with pytest.raises(ConfigError):
        Layer(**kwargs)


def test_workload_channel_chaining():
    a = Layer("conv", C=3, K=8, H=8, W=8, R=3, S=3, padding=1)
    with pytest.raises(ConfigError, match="K=8"):
        Workload("bad", (a, Layer("conv", C=4, K=8, H=8, W=8)))
    Workload("ok", (a, Layer.fc(8 * 16, 10)))


def test_workload_loading(tmp_path):
    for name in BUNDLED_WORKLOADS:
        assert load_workload(name).layers
    p = tmp_path / "w.json"
    p.write_text(json.dumps({"name": "x", "layers": [{"kind": "fc", "in_features": 4, "out_features": 2}]}))
    assert load_workload(p).layers[0].K == 2
    with pytest.raises(ConfigError, match="does not exist"):
        load_workload(tmp_path / "missing.json")
    with pytest.raises(ConfigError, match="'filters'"):
        layer_from_dict({"kind": "conv", "C": 1, "K": 1, "filters": 3})
    with pytest.raises(ConfigError, match="'layers'"):
        workload_from_dict({"name": "x"})


def test_tile_candidates():
    assert list(tile_candidates(10, 4)) == [4, 3, 2, 1]
    assert list(tile_candidates(10, 100)) == [10, 5, 4, 3, 2, 1]
    want = sorted({-(-64 // n) for n in range(1, 65)} - set(range(17, 65)), reverse=True)
    assert list(tile_candidates(64, 16)) == want
    assert 9 not in want  # no split of 64 gives 9 as its smallest tile


def test_golden_schedules(table):
    golden = json.loads((GOLDEN / "perf_14nm.json").read_text())
    node = table[golden["node"]]
    assert len(golden["cases"]) >= 12
    for case in golden["cases"]:
        workload = load_workload(case["workload"])
        report = network_delay(workload, ArchChromosome(*case["chromosome"]), node, case["dims"])
        assert report.total_cycles == case["total_cycles"]
        for s, g in zip(report.schedules, case["layers"]):
            assert (s.kt, s.pt, s.ct, s.residency, s.compute_cycles, s.dram_bytes, s.onchip_bytes, s.cycles) == (
                g["kt"], g["pt"], g["ct"], g["residency"], g["compute_cycles"], g["dram_bytes"],
                g["onchip_bytes"], g["cycles"],
            )


@pytest.mark.parametrize("workload", BUNDLED_WORKLOADS[:3])
@pytest.mark.parametrize("chrom", PERF_ARCHS, ids=lambda c: "x".join(map(str, c.as_tuple())))
@pytest.mark.parametrize("dims", ["2d", "3d"])
def test_schedule_equals_loop_nest_simulation(table, workload, chrom, dims):
    node = table["14nm"]
    bw = onchip_bandwidth(node, chrom.px, dims)
    for layer in load_workload(workload).layers:
        s = schedule_layer(layer, chrom, node, dims)
        sim = loopnest.simulate(layer, s.kt, s.pt, s.ct, s.residency, node.dram_bandwidth, bw)
        assert (s.compute_cycles, s.dram_bytes, s.onchip_bytes, s.cycles) == (
            sim.compute, sim.dram, sim.onchip, sim.cycles
        )
        assert loopnest.reserved_bytes(layer, s.kt, s.pt, s.ct, s.residency) <= chrom.b_global


small_layers = st.builds(
    lambda r, h, w, c, k, stride, pad, n: Layer("conv", C=c, K=k, H=max(h, r), W=max(w, r), R=r, S=r,
                                                 stride=stride, padding=pad * (r // 2), N=n),
    st.sampled_from([1, 3]), st.integers(1, 9), st.integers(1, 9), st.integers(1, 12), st.integers(1, 12),
    st.sampled_from([1, 2]), st.integers(0, 1), st.integers(1, 2),
)
small_archs = st.builds(
    ArchChromosome,
    st.sampled_from([1, 2, 4, 8]), st.sampled_from([1, 2, 4, 8]),
    st.sampled_from([2, 8, 18, 64, 256]), st.sampled_from([16, 64, 256, 1024, 4096]),
)


@settings(max_examples=150)
@given(small_layers, small_archs, st.sampled_from(["2d", "3d"]))
def test_schedule_is_optimal_over_all_integer_tilings(table, layer, chrom, dims):
    node = table["14nm"]
    best = loopnest.brute_force_best(
        layer, chrom.px, chrom.py, chrom.b_local, chrom.b_global,
        node.dram_bandwidth, onchip_bandwidth(node, chrom.px, dims),
    )
    try:
        s = schedule_layer(layer, chrom, node, dims)
    except InfeasibleArchitecture:
        assert best is None
        return
    assert (s.cycles, s.dram_bytes, s.onchip_bytes) == best


def test_infeasible_buffers(table):
    conv = Layer("conv", C=64, K=64, H=8, W=8, R=3, S=3, padding=1)
    with pytest.raises(InfeasibleArchitecture, match="local buffer"):
        schedule_layer(conv, ArchChromosome(4, 4, 16, 1 << 20), table["14nm"], "3d")
    with pytest.raises(InfeasibleArchitecture, match="global buffer"):
        schedule_layer(conv, ArchChromosome(4, 4, 256, 32), table["14nm"], "3d")


def test_3d_never_slower_than_2d(table, toy):
    for node in table.values():
        for chrom in PERF_ARCHS:
            assert network_delay(toy, chrom, node, "3d").d_task <= network_delay(toy, chrom, node, "2d").d_task


def test_report_fields(table, toy):
    r = network_delay(toy, PERF_ARCHS[1], table["7nm"], "3d")
    assert r.d_task == r.total_cycles / table["7nm"].clock_frequency
    assert r.fps == pytest.approx(1 / r.d_task)
    assert sum(summarize(r.schedules).values()) == len(toy.layers)


@settings(max_examples=300)
@given(
    st.sampled_from(["vgg_toy", "resnet_block", "dense_heavy"]),
    st.sampled_from(["45nm", "14nm", "7nm"]),
    st.sampled_from(["2d", "3d"]),
    st.integers(0, 5), st.integers(0, 5), st.integers(6, 11), st.integers(14, 21),
    st.sampled_from(["px", "py", "b_local", "b_global"]),
)
def test_delay_non_increasing_in_resources(table, workload, node, dims, epx, epy, ebl, ebg, gene):
    node = table[node]
    wl = load_workload(workload)
    small = ArchChromosome(1 << epx, 1 << epy, 1 << ebl, 1 << ebg)
    big = ArchChromosome(**{**small.__dict__, gene: getattr(small, gene) * 2})
    try:
        d_small = network_delay(wl, small, node, dims).d_task
    except InfeasibleArchitecture:
        assume(False)
    assert network_delay(wl, big, node, dims).d_task <= d_small
