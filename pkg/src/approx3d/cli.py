"""Command-line frontend.

Subcommands
-----------
``characterize``  error metrics, gate counts and areas of a multiplier set
``accuracy``      accuracy drop of every library multiplier on the proxy model
``report``        carbon and delay of one explicit architecture
``optimize``      GA search for the minimum carbon-delay product
``sweep``         2D-Exact / 3D-Exact / 3D-Appx / GA comparison over PE counts
``long``          reshape a sweep CSV into plot-ready long format

Every subcommand accepts the global flags ``--config``, ``--node``, ``--dims``,
``--delta``, ``--fps``, ``--seed`` and ``--out``. Values come from (lowest to
highest priority) built-in defaults, the JSON config file (``--config`` or the
``APPROX3D_CONFIG`` environment variable) and command-line flags.

Exit status: 0 success, 2 configuration error, 3 infeasible design or
unmet FPS target, 4 internal guard.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .accproxy import (
    PROXY_WORKLOAD,
    accuracy_from_csv,
    accuracy_to_csv,
    load_dataset,
    load_model,
    measure_library,
    select_multiplier,
)
from .approxmul import (
    Family,
    MultiplierRecord,
    MultiplierSpec,
    build_library,
    default_specs,
    library_from_csv,
    library_to_csv,
    attach_accuracy,
)
from .area import DEFAULT_PARAMS, AreaParams, Dims, compute_areas
from .carbon import carbon_delay_product, embodied_carbon
from .dse import (
    ArchChromosome,
    Domains,
    EvalContext,
    FitnessRecord,
    GaConfig,
    evaluate_fitness,
    evolve,
    history_to_csv,
)
from .errors import (
    Approx3dError,
    ConfigError,
    GuardError,
    InfeasibleArchitecture,
    NoFeasibleDie,
)
from .perf import Workload, load_workload, network_delay
from .techlib import TechTable, load_table

log = logging.getLogger(__name__)

ENV_CONFIG = "APPROX3D_CONFIG"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_GUARD = 4

REPORT_FIELDS = [
    "config_id",
    "node",
    "dims",
    "c_logic",
    "c_memory",
    "c_bonding",
    "c_packaging",
    "c_total",
    "delay_s",
    "cdp",
]
SWEEP_FIELDS = ["approach", "pe_count", "node", "carbon_total", "carbon_per_mm2", "delay_s", "fps", "cdp"]
LONG_FIELDS = ["approach", "pe_count", "node", "metric", "value"]
BEST_EXTRA_FIELDS = ["multiplier", "px", "py", "b_local", "b_global", "fps", "feasible", "violation"]

FIXED_APPROACHES = ("2D-Exact", "3D-Exact", "3D-Appx")
GA_APPROACHES = ("GA-APPX-CDP", "GA-EXACT-CDP")


@dataclass(frozen=True)
class SweepConfig:
    """PE counts and the proportional buffer rule used by ``sweep``.

    ``B_local = local_base * (array dim / 8)`` and
    ``B_global = global_base * (pe_count / 64)``, where the array dimension is
    the larger side of the most square factorisation ``px >= py``.
    """

    pe_counts: tuple[int, ...] = (64, 128, 256, 512, 1024, 2048)
    local_base: int = 64
    global_base: int = 128 * 1024
    ga: bool = True

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.pe_counts)
        if not counts or any(c < 1 for c in counts):
            raise ConfigError("sweep.pe_counts must be a non-empty list of positive integers")
        if self.local_base < 1 or self.global_base < 1:
            raise ConfigError("sweep buffer bases must be >= 1")
        object.__setattr__(self, "pe_counts", counts)


@dataclass
class RunConfig:
    """Resolved settings for one CLI invocation."""

    node: str = "14nm"
    dims: Dims = Dims.D3
    workload: str = "vgg_toy"
    tech: str | None = None
    library: str = "builtin"
    accuracy: str = "builtin"
    delta: float = 0.03
    fps_target: float | None = None
    seed: int = 0
    out: Path = Path("results")
    ga: GaConfig = field(default_factory=GaConfig)
    domains: Domains = field(default_factory=Domains)
    area: AreaParams = DEFAULT_PARAMS
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def validate(self) -> None:
        if not self.delta >= 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        if self.fps_target is not None and not self.fps_target > 0:
            raise ConfigError(f"fps target must be > 0, got {self.fps_target}")
        for key in ("tech", "library", "accuracy"):
            value = getattr(self, key)
            if value not in (None, "builtin") and not Path(value).exists():
                raise ConfigError(f"{key} file {value} does not exist")


_TOP_KEYS = {
    "node", "dims", "workload", "tech", "library", "accuracy", "delta", "fps",
    "seed", "out", "ga", "domains", "area", "sweep", "comment",
}


def _section(cls, doc: dict, name: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    names = {f.name for f in dataclasses.fields(cls)}
    for key in doc:
        if key not in names:
            raise ConfigError(f"config section {name!r}: unknown key {key!r}")
    try:
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()})
    except TypeError as exc:
        raise ConfigError(f"config section {name!r}: {exc}") from None


def config_from_dict(doc: dict, base_dir: Path | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from a parsed JSON config; relative paths resolve against ``base_dir``."""
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise ConfigError(f"config: unknown key {unknown[0]!r}")
    cfg = RunConfig()

    def path(value):
        if value in (None, "builtin"):
            return value
        p = Path(value)
        return str(base_dir / p) if base_dir is not None and not p.is_absolute() else str(p)

    if "node" in doc:
        cfg.node = str(doc["node"])
    if "dims" in doc:
        cfg.dims = Dims.parse(doc["dims"])
    if "workload" in doc:
        w = str(doc["workload"])
        cfg.workload = path(w) if w.endswith(".json") else w
    for key in ("tech", "library", "accuracy"):
        if key in doc:
            setattr(cfg, key, path(doc[key]))
    if "delta" in doc:
        cfg.delta = float(doc["delta"])
    if "fps" in doc:
        cfg.fps_target = None if doc["fps"] is None else float(doc["fps"])
    if "seed" in doc:
        cfg.seed = int(doc["seed"])
    if "out" in doc:
        cfg.out = Path(path(doc["out"]))
    if "ga" in doc:
        cfg.ga = _section(GaConfig, doc["ga"], "ga")
    if "domains" in doc:
        cfg.domains = _section(Domains, doc["domains"], "domains")
    if "area" in doc:
        cfg.area = AreaParams.from_dict(doc["area"])
    if "sweep" in doc:
        cfg.sweep = _section(SweepConfig, doc["sweep"], "sweep")
    return cfg


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {p} does not exist")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {p} must hold a JSON object")
    return config_from_dict(doc, p.parent)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(getattr(args, "config", None) or os.environ.get(ENV_CONFIG) or None)
    if getattr(args, "node", None) is not None:
        cfg.node = args.node
    if getattr(args, "dims", None) is not None:
        cfg.dims = Dims.parse(args.dims)
    if getattr(args, "workload", None) is not None:
        cfg.workload = args.workload
    if getattr(args, "delta", None) is not None:
        cfg.delta = args.delta
    if getattr(args, "fps", None) is not None:
        cfg.fps_target = args.fps
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None) is not None:
        cfg.out = Path(args.out)
    for key in ("tech", "library", "accuracy"):
        if getattr(args, key, None) is not None:
            setattr(cfg, key, getattr(args, key))
    cfg.ga = dataclasses.replace(cfg.ga, rng_seed=cfg.seed)
    ga_over = {
        "population_size": getattr(args, "population", None),
        "generations": getattr(args, "generations", None),
    }
    ga_over = {k: v for k, v in ga_over.items() if v is not None}
    if ga_over:
        cfg.ga = dataclasses.replace(cfg.ga, **ga_over)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# pipeline helpers


def load_tech(cfg: RunConfig) -> TechTable:
    return load_table(cfg.tech)


def load_library(cfg: RunConfig, table: TechTable) -> list[MultiplierRecord]:
    """Library with accuracy drops attached for the proxy workload."""
    if cfg.library == "builtin":
        library = build_library(default_specs(), table)
    else:
        library = library_from_csv(Path(cfg.library).read_text())
    if cfg.accuracy == "builtin":
        measure_library(library, load_model(), load_dataset())
    else:
        attach_accuracy(library, accuracy_from_csv(Path(cfg.accuracy).read_text()))
    return library


def exact_record(library: Sequence[MultiplierRecord]) -> MultiplierRecord:
    exact = [r for r in library if r.spec.family is Family.EXACT]
    if not exact:
        raise ConfigError("multiplier library has no EXACT entry")
    return min(exact, key=lambda r: (r.spec.width != 8, r.id))


def find_record(library: Sequence[MultiplierRecord], ident: str) -> MultiplierRecord:
    for r in library:
        if r.id == ident:
            return r
    spec = MultiplierSpec.parse(ident)
    for r in library:
        if r.spec == spec:
            return r
    raise ConfigError(f"multiplier {ident!r} is not in the library")


def config_id(mult: MultiplierRecord, chrom: ArchChromosome) -> str:
    return f"{mult.id}-{chrom.px}x{chrom.py}-L{chrom.b_local}-G{chrom.b_global}"


def _fmt(x: float) -> str:
    return repr(float(x))


def report_row(cid: str, node: str, dims: Dims, record: FitnessRecord) -> list[str]:
    c = record.carbon
    return [
        cid,
        node,
        Dims.parse(dims).value,
        _fmt(c.c_die_logic),
        _fmt(c.c_die_memory),
        _fmt(c.c_bonding),
        _fmt(c.c_packaging),
        _fmt(c.total),
        _fmt(record.delay),
        _fmt(record.cdp),
    ]


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def parse_chromosome(text: str) -> ArchChromosome:
    parts = text.replace("x", ",").split(",")
    if len(parts) != 4:
        raise ConfigError(f"chromosome must be PX,PY,B_LOCAL,B_GLOBAL, got {text!r}")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ConfigError(f"chromosome genes must be integers, got {text!r}") from None
    if any(v < 1 for v in values):
        raise ConfigError(f"chromosome genes must be >= 1, got {text!r}")
    return ArchChromosome(*values)


def factor_pe(pe_count: int) -> tuple[int, int]:
    """Most square ``px >= py`` with ``px * py == pe_count``."""
    px = next(d for d in range(math.isqrt(pe_count), pe_count + 1) if pe_count % d == 0 and d * d >= pe_count)
    return px, pe_count // px


def sweep_chromosome(pe_count: int, sweep: SweepConfig) -> ArchChromosome:
    px, py = factor_pe(pe_count)
    b_local = max(1, sweep.local_base * px // 8)
    b_global = max(1, sweep.global_base * pe_count // 64)
    return ArchChromosome(px, py, b_local, b_global)


def sweep_row(approach: str, node: str, record: FitnessRecord) -> list[str]:
    chrom = record.chromosome
    areas = record.areas
    silicon = areas.logic_die + areas.memory_die
    return [
        approach,
        chrom.px * chrom.py,
        node,
        _fmt(record.carbon.total),
        _fmt(record.carbon.total / silicon),
        _fmt(record.delay),
        _fmt(record.fps),
        _fmt(record.cdp),
    ]


def run_sweep(
    cfg: RunConfig,
    table: TechTable,
    library: Sequence[MultiplierRecord],
    workload: Workload,
    nodes: Sequence[str],
) -> list[list[str]]:
    """Rows for every node: fixed-architecture approaches per PE count, then GA optima.

    A fixed sweep point whose buffers cannot hold even a one-channel weight
    slice for some layer is skipped with a warning; the GA rows must exist.
    """
    exact = exact_record(library)
    rows = []
    for name in nodes:
        node = table[name]
        appx = select_multiplier(library, PROXY_WORKLOAD, cfg.delta, name)
        for pe in cfg.sweep.pe_counts:
            chrom = sweep_chromosome(pe, cfg.sweep)
            for approach in FIXED_APPROACHES:
                dims = Dims.D2 if approach.startswith("2D") else Dims.D3
                mult = appx if approach.endswith("Appx") else exact
                ctx = EvalContext(node, dims, workload, mult, cfg.fps_target, cfg.area)
                record = evaluate_fitness(chrom, ctx)
                if record.perf is None:
                    log.warning("%s: sweep point %d PEs (%s) cannot schedule %r; skipped",
                                approach, pe, config_id(mult, chrom), workload.name)
                    continue
                rows.append(sweep_row(approach, name, record))
        if cfg.sweep.ga:
            for approach, mult in zip(GA_APPROACHES, (appx, exact)):
                ctx = EvalContext(node, Dims.D3, workload, mult, cfg.fps_target, cfg.area)
                best = evolve(cfg.ga, ctx, cfg.domains).best
                if best.perf is None:
                    raise InfeasibleArchitecture(f"{approach}: no schedulable design in the search space")
                rows.append(sweep_row(approach, name, best))
    return rows


# ---------------------------------------------------------------------------
# commands


def cmd_characterize(args: argparse.Namespace, cfg: RunConfig) -> int:
    table = load_tech(cfg)
    if args.specs:
        specs = [MultiplierSpec.parse(s.strip()) for s in args.specs.split(",") if s.strip()]
        if args.width is not None:
            specs = [dataclasses.replace(s, width=args.width) for s in specs]
    else:
        specs = default_specs(args.width if args.width is not None else 8)
    library = build_library(specs, table)
    path = _write(cfg.out, "characterization.csv", library_to_csv(library, list(table)))
    print(f"wrote {len(library)} multipliers to {path}")
    return EXIT_OK


def cmd_accuracy(args: argparse.Namespace, cfg: RunConfig) -> int:
    table = load_tech(cfg)
    node = table[cfg.node].name
    if cfg.library == "builtin":
        library = build_library(default_specs(), table)
    else:
        library = library_from_csv(Path(cfg.library).read_text())
    library.sort(key=lambda r: (r.area(node), r.id))
    records = measure_library(library, load_model(args.model), load_dataset(args.dataset))
    path = _write(cfg.out, "accuracy.csv", accuracy_to_csv(records))
    chosen = select_multiplier(library, PROXY_WORKLOAD, cfg.delta, node)
    print(f"wrote {len(records)} rows to {path}; delta={cfg.delta:g} at {node} selects {chosen.id}")
    return EXIT_OK


def _pick_multiplier(args, cfg: RunConfig, library, node: str) -> MultiplierRecord:
    if args.multiplier in (None, "auto"):
        return select_multiplier(library, PROXY_WORKLOAD, cfg.delta, node)
    return find_record(library, args.multiplier)


def cmd_report(args: argparse.Namespace, cfg: RunConfig) -> int:
    table = load_tech(cfg)
    node = table[cfg.node]
    library = load_library(cfg, table)
    mult = _pick_multiplier(args, cfg, library, node.name)
    workload = load_workload(cfg.workload)
    chrom = parse_chromosome(args.chromosome)
    areas = compute_areas(node, chrom, mult, cfg.dims, cfg.area)
    carbon = embodied_carbon(node, areas, cfg.dims, cfg.area.bonding_area)
    perf = network_delay(workload, chrom, node, cfg.dims, mult)
    record = FitnessRecord(
        chrom, carbon_delay_product(carbon.total, perf.d_task), carbon, perf.d_task, True, 0.0, areas, perf
    )
    cid = config_id(mult, chrom)
    path = _write(cfg.out, "report.csv", _csv(REPORT_FIELDS, [report_row(cid, node.name, cfg.dims, record)]))
    layers = [
        [layer.name, s.kt, s.pt, s.ct, s.residency, s.compute_cycles, s.dram_bytes, s.onchip_bytes, s.bound, _fmt(s.cycles)]
        for layer, s in zip(workload.layers, perf.schedules)
    ]
    _write(
        cfg.out,
        "layers.csv",
        _csv(["layer", "kt", "pt", "ct", "residency", "compute_cycles", "dram_bytes", "onchip_bytes", "bound", "cycles"], layers),
    )
    print(f"{cid}: carbon {carbon.total:.6g} g, delay {perf.d_task:.6g} s ({perf.fps:.4g} FPS) -> {path}")
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace, cfg: RunConfig) -> int:
    table = load_tech(cfg)
    node = table[cfg.node]
    library = load_library(cfg, table)
    mult = _pick_multiplier(args, cfg, library, node.name)
    workload = load_workload(cfg.workload)
    ctx = EvalContext(node, cfg.dims, workload, mult, cfg.fps_target, cfg.area)
    result = evolve(cfg.ga, ctx, cfg.domains)
    best = result.best
    chrom = best.chromosome
    row = report_row(config_id(mult, chrom), node.name, cfg.dims, best) + [
        mult.id,
        chrom.px,
        chrom.py,
        chrom.b_local,
        chrom.b_global,
        _fmt(best.fps if best.perf is not None else 0.0),
        int(best.feasible),
        _fmt(best.violation),
    ]
    path = _write(cfg.out, "best.csv", _csv(REPORT_FIELDS + BEST_EXTRA_FIELDS, [row]))
    _write(cfg.out, "convergence.csv", history_to_csv(result.history))
    if best.perf is None:
        print(f"no schedulable design found for {workload.name!r}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not best.feasible:
        print(
            f"FPS target {cfg.fps_target:g} not met: best design reaches {best.fps:.4g} FPS "
            f"(shortfall {best.violation:.4g}); reported in {path}",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    print(
        f"best {row[0]}: cdp {best.cdp:.6g} g*s, carbon {best.carbon.total:.6g} g, "
        f"{best.fps:.4g} FPS after {result.evaluations} evaluations -> {path}"
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig) -> int:
    table = load_tech(cfg)
    nodes = list(table) if cfg.node == "all" else [n.strip() for n in cfg.node.split(",")]
    for n in nodes:
        table[n]  # validate names early
    library = load_library(cfg, table)
    workload = load_workload(cfg.workload)
    if args.no_ga:
        cfg.sweep = dataclasses.replace(cfg.sweep, ga=False)
    rows = run_sweep(cfg, table, library, workload, nodes)
    path = _write(cfg.out, "sweep.csv", _csv(SWEEP_FIELDS, rows))
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


def to_long(text: str) -> str:
    """Sweep CSV -> one row per (approach, pe_count, node, metric)."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or any(f not in reader.fieldnames for f in SWEEP_FIELDS):
        raise ConfigError(f"sweep CSV must have columns {','.join(SWEEP_FIELDS)}")
    metrics = SWEEP_FIELDS[3:]
    rows = []
    for row in reader:
        for m in metrics:
            rows.append([row["approach"], row["pe_count"], row["node"], m, row[m]])
    return _csv(LONG_FIELDS, rows)


def cmd_long(args: argparse.Namespace, cfg: RunConfig) -> int:
    src = Path(args.input)
    if not src.exists():
        raise ConfigError(f"sweep file {src} does not exist")
    path = _write(cfg.out, args.output, to_long(src.read_text()))
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help=f"JSON run configuration (default: ${ENV_CONFIG})")
    g.add_argument("--node", help="technology node name (sweep also takes a comma list or 'all')")
    g.add_argument("--dims", choices=["2d", "3d"], help="integration style")
    g.add_argument("--delta", type=float, help="accuracy-drop threshold, e.g. 0.03")
    g.add_argument("--fps", type=float, help="minimum frames per second")
    g.add_argument("--seed", type=int, help="GA random seed")
    g.add_argument("--out", help="output directory")
    g.add_argument("--tech", help="technology table JSON (default: bundled)")
    g.add_argument("--library", help="multiplier library CSV (default: builtin)")
    g.add_argument("--accuracy", help="accuracy CSV (default: measure on the bundled proxy)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="approx3d",
        description="Embodied-carbon and delay exploration for 2D/3D accelerators with approximate multipliers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characterize", parents=[common], help="characterize a multiplier set")
    p.add_argument("--specs", help="comma list such as EXACT,TRUNC:3,LOA:4@8 (default: bundled set)")
    p.add_argument("--width", type=int, help="operand width for every spec")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("accuracy", parents=[common], help="accuracy drop of each library multiplier")
    p.add_argument("--model", help="model .npz (default: bundled proxy)")
    p.add_argument("--dataset", help="dataset stem (default: bundled test split)")
    p.set_defaults(func=cmd_accuracy)

    p = sub.add_parser("report", parents=[common], help="carbon and delay of one architecture")
    p.add_argument("--chromosome", required=True, help="PX,PY,B_LOCAL,B_GLOBAL (bytes)")
    p.add_argument("--workload", help="bundled workload name or JSON path")
    p.add_argument("--multiplier", help="library id or spec (default: auto-select by delta)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("optimize", parents=[common], help="GA search for minimum CDP")
    p.add_argument("--workload", help="bundled workload name or JSON path")
    p.add_argument("--multiplier", help="library id or spec (default: auto-select by delta)")
    p.add_argument("--population", type=int, help="GA population size")
    p.add_argument("--generations", type=int, help="GA generation budget")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", parents=[common], help="compare approaches across PE counts")
    p.add_argument("--workload", help="bundled workload name or JSON path")
    p.add_argument("--population", type=int, help="GA population size")
    p.add_argument("--generations", type=int, help="GA generation budget")
    p.add_argument("--no-ga", action="store_true", help="skip the GA rows")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("long", parents=[common], help="reshape a sweep CSV to long format")
    p.add_argument("input", help="sweep CSV")
    p.add_argument("--output", default="sweep_long.csv", help="file name inside --out")
    p.set_defaults(func=cmd_long)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InfeasibleArchitecture, NoFeasibleDie) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (Approx3dError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
