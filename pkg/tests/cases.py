"""Hand-constructed inputs shared by the module tests and the acceptance suite."""

from approx3d.dse import ArchChromosome

BASE_PARAMS = {
    "ci_fab": 700.0,
    "epa": 0.012,
    "c_gas": 1.8,
    "c_material": 5.0,
    "cfpa_si_waste": 1.0,
    "cfpa_bonding": 2.5,
    "cfpa_packaging": 0.25,
    "defect_density": 0.0009,
    "cluster_alpha": 3.0,
    "wafer_diameter": 300.0,
    "fixed_yield": None,
}

# (label, parameter row, logic mm², memory mm², package mm², stacked)
CARBON_CASES = [
    ("14nm-like 3D", dict(BASE_PARAMS), 12.5, 4.0, 15.0, True),
    ("same dies 2D", dict(BASE_PARAMS), 12.5, 4.0, 19.8, False),
    (
        "dirty grid, large die, 200 mm wafer",
        {**BASE_PARAMS, "ci_fab": 820.0, "epa": 0.03, "c_gas": 3.1, "defect_density": 0.002,
         "cluster_alpha": 1.5, "wafer_diameter": 200.0, "cfpa_bonding": 4.0},
        310.0, 95.0, 372.0, True,
    ),
    (
        "fixed yield, tiny dies",
        {**BASE_PARAMS, "fixed_yield": 0.87, "cfpa_si_waste": 0.4, "cfpa_packaging": 0.9},
        0.37, 0.021, 0.45, True,
    ),
    (
        "mature memory process",
        {**BASE_PARAMS, "memory": {"epa": 0.006, "defect_density": 0.0003, "c_gas": 0.7}},
        48.0, 60.0, 129.6, True,
    ),
]

NODE_FILL = {
    "feature_size": 14,
    "clock_frequency": 1e9,
    "sram_bit_area": 1e-7,
    "regfile_bit_area": 2e-7,
    "gate_area": 1e-7,
    "dram_bandwidth": 16.0,
    "noc_bandwidth_2d": 2.0,
    "vertical_bandwidth_3d": 8.0,
}


def node_for(label, params):
    """TechNode equivalent to a spreadsheet parameter row."""
    from approx3d.techlib import node_from_dict

    doc = {k: v for k, v in params.items() if k not in ("logic", "memory")}
    overrides = {k: params[k] for k in ("logic", "memory") if k in params}
    return node_from_dict({"name": label, **NODE_FILL, **doc, "die_overrides": overrides})


def breakdown(logic, memory, package):
    from approx3d.area import AreaBreakdown

    return AreaBreakdown(logic, memory, package, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


# (workload, chromosome) pairs for the loop-nest simulator comparison
PERF_ARCHS = [
    ArchChromosome(4, 4, 128, 64 * 1024),
    ArchChromosome(16, 8, 256, 256 * 1024),
    ArchChromosome(8, 32, 1024, 1 << 20),
]
