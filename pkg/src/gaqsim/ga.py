"""Generic genetic-algorithm engine: breeding, mutation, merged elitist selection.

The engine is problem-agnostic. A problem object supplies four callables:

    random_genome(rng)                        -> genome
    fitness(genome)                           -> float, lower is better
    crossover(first, second, w_first, w_second, rng) -> genome
    mutate(genome, rate, rng)                 -> genome

Genomes must be tuples of equal-arity tuples of numbers, so they are
hashable (fitness caching) and totally ordered (deterministic tie-breaks).

Each cycle breeds an offspring batch from the rank-sorted population with
hierarchical participation counts, mutates the offspring, then merges old
and new individuals and keeps the best. All randomness is drawn from
streams derived from the run seed; offspring i of generation g always sees
the stream (seed, generation, i), so results do not depend on evaluation
order and fitness evaluation may run in parallel.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

# Stream tags keep derived RNG streams for different purposes disjoint.
_TAG_INIT = 101
_TAG_PAIRING = 202
_TAG_CHILD = 303


def seed_tuple(seed) -> tuple:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def derive_rng(seed, *key: int) -> np.random.Generator:
    """Deterministic RNG stream for (seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence(seed_tuple(seed) + key))


@dataclass(frozen=True)
class GaConfig:
    population: int = 4
    offspring: int = 9
    participation: tuple = (6, 5, 4, 3)
    mutation_rate: float = 0.8
    mutation_rate_low: float | None = 0.2
    stagnation_switch: int = 25
    max_generations: int = 2000
    target_fitness: float = 1e-3
    seed: int | tuple = 0
    workers: int = 1

    def __post_init__(self):
        if len(self.participation) != self.population:
            raise ValueError("need one participation count per population rank")
        if sum(self.participation) != 2 * self.offspring:
            raise ValueError(
                "participation counts must sum to twice the offspring count"
            )
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")

    def rate_at(self, generation: int, stagnant: int, switched: bool) -> float:
        """Mutation-rate schedule: high early, low once half the budget is
        spent or the best fitness has stalled for ``stagnation_switch``
        cycles; the switch is one-way."""
        if self.mutation_rate_low is None:
            return self.mutation_rate
        if switched or generation >= self.max_generations // 2 or stagnant >= self.stagnation_switch:
            return self.mutation_rate_low
        return self.mutation_rate


@dataclass(frozen=True)
class Individual:
    genome: tuple
    fitness: float
    birth: int  # generation index at creation; parents outrank equal-fit children

    def sort_key(self):
        return (self.fitness, self.birth, self.genome)


@dataclass
class GaResult:
    best: Individual
    history: list = field(default_factory=list)  # (generation, best, mean)
    generations: int = 0
    evaluations: int = 0


def proportional_split(length: int, w_first: int, w_second: int) -> int:
    """Crossover split point: the first parent's share of genes, by weight."""
    return round(length * w_first / (w_first + w_second))


def block_crossover(first: tuple, second: tuple, w_first: int, w_second: int) -> tuple:
    """Single-point crossover; the higher-weight parent gives the leading block."""
    s = proportional_split(len(first), w_first, w_second)
    return first[:s] + second[s:]


def pair_parents(config: GaConfig, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Offspring parentage: a shuffled multiset of rank slots, paired off.

    Rank r appears participation[r] times; consecutive slots form the
    offspring pairs, ordered so the better rank comes first.
    """
    slots = [r for r, count in enumerate(config.participation) for _ in range(count)]
    if len(slots) % 2:
        raise ValueError("participation counts must sum to an even number")
    slots = [slots[i] for i in rng.permutation(len(slots))]
    pairs = []
    for i in range(0, len(slots), 2):
        a, b = slots[i], slots[i + 1]
        pairs.append((a, b) if a <= b else (b, a))
    return pairs


def breed(parents: list[tuple], problem, config: GaConfig, rng, child_rngs=None) -> list[tuple]:
    """Pre-mutation offspring genomes from a rank-sorted parent list."""
    pairs = pair_parents(config, rng)
    children = []
    for i, (ra, rb) in enumerate(pairs):
        crng = child_rngs[i] if child_rngs is not None else rng
        wa, wb = config.participation[ra], config.participation[rb]
        children.append(problem.crossover(parents[ra], parents[rb], wa, wb, crng))
    return children


def select(parents: list[Individual], offspring: list[Individual], population: int) -> list[Individual]:
    """Merged elitist selection: keep the best of old and new together."""
    pool = sorted(parents + offspring, key=Individual.sort_key)
    return pool[:population]


def _evaluate(problem, genomes, birth, cache, workers) -> list[Individual]:
    missing = [g for g in genomes if g not in cache]
    unique = list(dict.fromkeys(missing))
    if workers > 1 and len(unique) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(problem.fitness, unique))
    else:
        values = [problem.fitness(g) for g in unique]
    cache.update(zip(unique, values))
    return [Individual(g, cache[g], birth) for g in genomes]


def evolve(problem, config: GaConfig) -> GaResult:
    """Run breeding/mutation/selection cycles and return the best individual.

    Stops when the target fitness is reached or the generation budget is
    spent; the best-ever individual always survives (merged selection), so
    the per-generation best fitness is non-increasing.
    """
    cache: dict = {}
    init_rng = derive_rng(config.seed, _TAG_INIT)
    genomes = [problem.random_genome(init_rng) for _ in range(config.population)]
    population = _evaluate(problem, genomes, -1, cache, config.workers)
    population.sort(key=Individual.sort_key)

    result = GaResult(best=population[0])
    stagnant = 0
    switched = False
    for gen in range(config.max_generations):
        best_before = population[0].fitness
        if best_before <= config.target_fitness:
            break
        rate = config.rate_at(gen, stagnant, switched)
        switched = switched or rate != config.mutation_rate
        pairing_rng = derive_rng(config.seed, _TAG_PAIRING, gen)
        child_rngs = [
            derive_rng(config.seed, _TAG_CHILD, gen, i) for i in range(config.offspring)
        ]
        children = breed(
            [ind.genome for ind in population], problem, config, pairing_rng, child_rngs
        )
        children = [
            problem.mutate(child, rate, crng)
            for child, crng in zip(children, child_rngs)
        ]
        offspring = _evaluate(problem, children, gen, cache, config.workers)
        population = select(population, offspring, config.population)
        fitnesses = [ind.fitness for ind in population]
        result.history.append((gen, fitnesses[0], float(np.mean(fitnesses))))
        result.generations = gen + 1
        stagnant = stagnant + 1 if fitnesses[0] >= best_before else 0

    result.best = population[0]
    result.evaluations = len(cache)
    return result


def with_seed(config: GaConfig, seed) -> GaConfig:
    return replace(config, seed=seed_tuple(seed))
