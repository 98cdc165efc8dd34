"""Genetic-algorithm search for the minimum carbon-delay product.

Genome: ``(px, py, b_local, b_global)``, each gene drawn from a finite domain.
The multiplier is chosen before the search and stays fixed.

Records are ranked by feasibility dominance: any feasible record beats any
infeasible one; feasible records compare on CDP, infeasible ones on their
FPS shortfall.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .approxmul import MultiplierRecord
from .area import DEFAULT_PARAMS, AreaBreakdown, AreaParams, Dims, compute_areas
from .carbon import CarbonBreakdown, carbon_delay_product, embodied_carbon
from .errors import ConfigError, GuardError, InfeasibleArchitecture
from .perf import PerfReport, Workload, network_delay
from .techlib import TechNode

GENES = ("px", "py", "b_local", "b_global")
EXHAUSTIVE_LIMIT = 100_000
IMMIGRANT_TRIES = 8


@dataclass(frozen=True, order=True)
class ArchChromosome:
    px: int
    py: int
    b_local: int
    b_global: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.px, self.py, self.b_local, self.b_global)


@dataclass(frozen=True)
class Domains:
    px: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64)
    py: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64)
    b_local: tuple[int, ...] = tuple(64 << i for i in range(7))  # 64 B .. 4 KiB
    b_global: tuple[int, ...] = tuple((32 * 1024) << i for i in range(9))  # 32 KiB .. 8 MiB

    def __post_init__(self) -> None:
        for gene in GENES:
            values = tuple(int(v) for v in getattr(self, gene))
            if not values:
                raise ConfigError(f"domain for {gene} is empty")
            if any(v < 1 for v in values):
                raise ConfigError(f"domain for {gene} must hold positive integers")
            object.__setattr__(self, gene, values)

    @property
    def size(self) -> int:
        return math.prod(len(getattr(self, g)) for g in GENES)

    def contains(self, chrom: ArchChromosome) -> bool:
        return all(getattr(chrom, g) in getattr(self, g) for g in GENES)

    def __iter__(self):
        for values in itertools.product(*(getattr(self, g) for g in GENES)):
            yield ArchChromosome(*values)


@dataclass(frozen=True)
class EvalContext:
    node: TechNode
    dims: Dims
    workload: Workload
    multiplier: MultiplierRecord
    fps_target: float | None = None
    params: AreaParams = DEFAULT_PARAMS


@dataclass(frozen=True)
class FitnessRecord:
    chromosome: ArchChromosome
    cdp: float
    carbon: CarbonBreakdown
    delay: float
    feasible: bool
    violation: float
    areas: AreaBreakdown | None = field(default=None, compare=False)
    perf: PerfReport | None = field(default=None, compare=False, repr=False)

    @property
    def fps(self) -> float:
        return 1.0 / self.delay if self.delay > 0 else math.inf


def rank_key(record: FitnessRecord) -> tuple[int, float]:
    """Smaller is better; ties must be broken by the caller."""
    if record.feasible:
        return (0, record.cdp)
    return (1, record.violation)


def evaluate_fitness(chrom: ArchChromosome, ctx: EvalContext) -> FitnessRecord:
    """Area -> carbon and perf -> delay for one chromosome. Infeasibility is data."""
    areas = compute_areas(ctx.node, chrom, ctx.multiplier, ctx.dims, ctx.params)
    carbon = embodied_carbon(ctx.node, areas, ctx.dims, ctx.params.bonding_area)
    try:
        perf = network_delay(ctx.workload, chrom, ctx.node, ctx.dims, ctx.multiplier)
    except InfeasibleArchitecture:
        return FitnessRecord(chrom, math.inf, carbon, math.inf, False, math.inf, areas, None)
    delay = perf.d_task
    violation = 0.0
    if ctx.fps_target is not None:
        violation = max(0.0, ctx.fps_target - perf.fps)
    return FitnessRecord(
        chrom,
        carbon_delay_product(carbon.total, delay),
        carbon,
        delay,
        violation == 0.0,
        violation,
        areas,
        perf,
    )


def sample_chromosome(rng: np.random.Generator, domains: Domains) -> ArchChromosome:
    return ArchChromosome(*(int(rng.choice(getattr(domains, g))) for g in GENES))


def tournament_select(
    population: Sequence[FitnessRecord], rng: np.random.Generator, k: int
) -> FitnessRecord:
    """Best of ``k`` draws with replacement; ties go to the lower population index."""
    if not population:
        raise ConfigError("cannot select from an empty population")
    if k < 1:
        raise ConfigError("tournament size must be >= 1")
    picks = rng.integers(0, len(population), size=k)
    best = min(int(i) for i in picks)
    for i in picks:
        i = int(i)
        if (rank_key(population[i]), i) < (rank_key(population[best]), best):
            best = i
    return population[best]


def crossover(
    parent_a: ArchChromosome, parent_b: ArchChromosome, rng: np.random.Generator, rate: float
) -> tuple[ArchChromosome, ArchChromosome]:
    """Uniform crossover applied with probability ``rate``."""
    if rng.random() >= rate:
        return parent_a, parent_b
    swap = rng.random(len(GENES)) < 0.5
    a, b = list(parent_a.as_tuple()), list(parent_b.as_tuple())
    for i, s in enumerate(swap):
        if s:
            a[i], b[i] = b[i], a[i]
    return ArchChromosome(*a), ArchChromosome(*b)


def mutate(chrom: ArchChromosome, rng: np.random.Generator, rate: float, domains: Domains) -> ArchChromosome:
    genes = list(chrom.as_tuple())
    for i, gene in enumerate(GENES):
        if rng.random() < rate:
            genes[i] = int(rng.choice(getattr(domains, gene)))
    return ArchChromosome(*genes)


@dataclass(frozen=True)
class GaConfig:
    """GA hyper-parameters.

    ``unique_offspring`` replaces an offspring that duplicates one already in
    the next generation by a fresh random chromosome (at most
    ``IMMIGRANT_TRIES`` draws), which keeps a converged population exploring.
    """

    population_size: int = 64
    generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    tournament_size: int = 3
    elitism_count: int = 2
    rng_seed: int = 0
    patience: int | None = None
    unique_offspring: bool = True

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        for key in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, key) <= 1.0:
                raise ConfigError(f"{key} must lie in [0, 1]")
        if self.tournament_size < 1:
            raise ConfigError("tournament_size must be >= 1")
        if not 0 <= self.elitism_count < self.population_size:
            raise ConfigError("elitism_count must lie in [0, population_size)")
        if self.patience is not None and self.patience < 1:
            raise ConfigError("patience must be >= 1")


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best: FitnessRecord
    median_cdp: float
    feasible_count: int


@dataclass(frozen=True)
class DseResult:
    best: FitnessRecord
    history: tuple[GenerationStats, ...]
    evaluations: int
    seed: int


class _Evaluator:
    """Memoises fitness per chromosome; the record depends only on the genome."""

    def __init__(self, ctx: EvalContext, fn: Callable[[ArchChromosome, EvalContext], FitnessRecord]):
        self.ctx = ctx
        self.fn = fn
        self.cache: dict[ArchChromosome, FitnessRecord] = {}
        self.calls = 0

    def __call__(self, chrom: ArchChromosome) -> FitnessRecord:
        self.calls += 1
        rec = self.cache.get(chrom)
        if rec is None:
            rec = self.cache[chrom] = self.fn(chrom, self.ctx)
        return rec


def _sorted_indices(population: Sequence[FitnessRecord]) -> list[int]:
    return sorted(range(len(population)), key=lambda i: (rank_key(population[i]), i))


def _median_cdp(population: Sequence[FitnessRecord]) -> float:
    return float(statistics.median(r.cdp for r in population))


def evolve(
    config: GaConfig,
    ctx: EvalContext,
    domains: Domains | None = None,
    fitness: Callable[[ArchChromosome, EvalContext], FitnessRecord] = evaluate_fitness,
) -> DseResult:
    """Generational GA with elitism; deterministic for a given ``rng_seed``.

    ``history`` holds one entry per generation (the population's best by
    rank, its median CDP and the number of feasible members).
    """
    domains = domains or Domains()
    rng = np.random.default_rng(config.rng_seed)
    evaluate = _Evaluator(ctx, fitness)

    population = [evaluate(sample_chromosome(rng, domains)) for _ in range(config.population_size)]
    history: list[GenerationStats] = []
    best = population[_sorted_indices(population)[0]]
    stale = 0
    for gen in range(config.generations):
        order = _sorted_indices(population)
        gen_best = population[order[0]]
        if rank_key(gen_best) < rank_key(best):
            best, stale = gen_best, 0
        else:
            stale += 1
        history.append(
            GenerationStats(gen, gen_best, _median_cdp(population), sum(r.feasible for r in population))
        )
        if gen == config.generations - 1:
            break
        if config.patience is not None and stale > config.patience:
            break
        offspring = [population[i].chromosome for i in order[: config.elitism_count]]
        seen = set(offspring)

        def admit(child: ArchChromosome) -> None:
            if config.unique_offspring:
                for _ in range(IMMIGRANT_TRIES):
                    if child not in seen:
                        break
                    child = sample_chromosome(rng, domains)
                seen.add(child)
            offspring.append(child)

        while len(offspring) < config.population_size:
            pa = tournament_select(population, rng, config.tournament_size).chromosome
            pb = tournament_select(population, rng, config.tournament_size).chromosome
            ca, cb = crossover(pa, pb, rng, config.crossover_rate)
            admit(mutate(ca, rng, config.mutation_rate, domains))
            if len(offspring) < config.population_size:
                admit(mutate(cb, rng, config.mutation_rate, domains))
        population = [evaluate(c) for c in offspring]
    return DseResult(best, tuple(history), evaluate.calls, config.rng_seed)


def exhaustive_baseline(domains: Domains, ctx: EvalContext) -> FitnessRecord:
    """Global optimum by full enumeration; ties broken by the smaller genome tuple."""
    if domains.size > EXHAUSTIVE_LIMIT:
        raise GuardError(f"search space of {domains.size} configurations exceeds {EXHAUSTIVE_LIMIT}")
    best = None
    for chrom in domains:
        rec = evaluate_fitness(chrom, ctx)
        key = (rank_key(rec), chrom.as_tuple())
        if best is None or key < best[0]:
            best = (key, rec)
    return best[1]


HISTORY_FIELDS = [
    "generation",
    "best_cdp",
    "median_cdp",
    "best_px",
    "best_py",
    "best_blocal",
    "best_bglobal",
    "feasible_count",
]


def history_to_csv(history: Iterable[GenerationStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HISTORY_FIELDS)
    for h in history:
        c = h.best.chromosome
        writer.writerow(
            [h.generation, repr(h.best.cdp), repr(h.median_cdp), c.px, c.py, c.b_local, c.b_global, h.feasible_count]
        )
    return buf.getvalue()
