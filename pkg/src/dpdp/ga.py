"""Genetic search over precedence-feasible stop orderings for one agent.

A genome is a tuple of :class:`~dpdp.world.Stop`. It is feasible when it is
a permutation of the agent's stop set and every pickup precedes the
delivery of the same request. A delivery whose pickup is absent from the
stop set (the goods are already on board) has no predecessor.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .fitness import FitnessBreakdown, PlanEvaluator
from .world import Action, ActionKind, Request, Stop

Genome = tuple[Stop, ...]

MUTATION_ATTEMPTS = 9  # first draw plus 8 redraws


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 20
    max_generations: int = 30
    mutation_prob: float = 0.02
    selection_rate: float = 0.80
    elitism_count: int = 1
    early_stop_fitness: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.pop_size < 2:
            raise ValueError("pop_size must be at least 2")
        if self.max_generations < 1:
            raise ValueError("max_generations must be at least 1")
        if not 0.0 < self.selection_rate <= 1.0:
            raise ValueError("selection_rate must lie in (0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not 0 <= self.elitism_count < self.pop_size:
            raise ValueError("elitism_count must lie in [0, pop_size)")


@dataclass
class EvolutionReport:
    best: Genome
    breakdown: FitnessBreakdown | None
    history: list[float] = field(default_factory=list)
    generations: int = 0
    early_stopped: bool = False

    @property
    def fitness(self) -> float:
        return self.breakdown.aggregate if self.breakdown is not None else float("nan")


def is_feasible(genome: Sequence[Stop], stops: Iterable[Stop] | None = None) -> bool:
    """Check P1 (permutation of ``stops``, when given) and P2 (pickup first)."""
    if len(set(genome)) != len(genome):
        return False
    if stops is not None and set(genome) != set(stops):
        return False
    present = set(genome)
    seen: set[str] = set()
    for s in genome:
        if s.kind == "pickup":
            seen.add(s.request)
        elif Stop("pickup", s.request) in present and s.request not in seen:
            return False
    return True


def random_genome(stops: Sequence[Stop], rng: random.Random) -> Genome:
    """Uniform draw over feasible orderings.

    Shuffle, then swap each misordered pickup/delivery pair back into
    order. Every feasible ordering has exactly 2**m preimages, so the
    result stays uniform.
    """
    g = sorted(stops)
    rng.shuffle(g)
    where = {s: i for i, s in enumerate(g)}
    for s, i in list(where.items()):
        if s.kind != "pickup":
            continue
        j = where.get(Stop("delivery", s.request))
        if j is not None and j < i:
            g[i], g[j] = g[j], g[i]
    return tuple(g)


def select(population: Sequence[Genome], fitness: Sequence[float], rate: float) -> list[Genome]:
    """Truncation selection: the best ceil(rate * n), ties to the lower index."""
    n = len(population)
    keep = min(n, math.ceil(rate * n - 1e-9))
    order = sorted(range(n), key=lambda i: -fitness[i])
    return [population[i] for i in order[:keep]]


def crossover_one_point(p1: Sequence[Stop], p2: Sequence[Stop], cut: int) -> Genome:
    """Prefix of ``p1`` up to ``cut``, then the missing stops in ``p2`` order."""
    head = tuple(p1[:cut])
    taken = set(head)
    return head + tuple(s for s in p2 if s not in taken)


def _swap_ok(a: Stop, b: Stop) -> bool:
    return not (a.request == b.request and a.kind == "pickup" and b.kind == "delivery")


def mutate(genome: Genome, rng: random.Random, prob: float) -> Genome:
    """With probability ``prob``, swap one legal adjacent pair."""
    if len(genome) < 2 or rng.random() >= prob:
        return genome
    for _ in range(MUTATION_ATTEMPTS):
        i = rng.randrange(len(genome) - 1)
        if _swap_ok(genome[i], genome[i + 1]):
            g = list(genome)
            g[i], g[i + 1] = g[i + 1], g[i]
            return tuple(g)
    return genome


def _breed(parents: Sequence[Genome], count: int, length: int, rng: random.Random,
           mutation_prob: float) -> list[Genome]:
    out = []
    k = len(parents)
    for _ in range(count):
        i = rng.randrange(k)
        j = rng.randrange(k)
        while k > 1 and j == i:
            j = rng.randrange(k)
        cut = rng.randint(0, length)
        child = crossover_one_point(parents[i], parents[j], cut)
        out.append(mutate(child, rng, mutation_prob))
    return out


def evolve(stops: Sequence[Stop], evaluator: PlanEvaluator | Callable[[Sequence[Genome]], list[float]],
           config: GaConfig = GaConfig(), rng: random.Random | None = None) -> EvolutionReport:
    """Run the generational loop and return the best plan ever seen.

    ``evaluator`` is usually a :class:`PlanEvaluator`; any callable mapping
    a list of genomes to a list of fitness values also works (the report's
    breakdown is then ``None``).
    """
    rng = rng if rng is not None else random.Random(config.seed)
    many = evaluator.fitness_many if isinstance(evaluator, PlanEvaluator) else evaluator
    stops = sorted(stops)

    def finish(best: Genome, history: list[float], gens: int, early: bool) -> EvolutionReport:
        bd = evaluator.breakdown(best) if isinstance(evaluator, PlanEvaluator) else None
        return EvolutionReport(best, bd, history, gens, early)

    if not stops:
        fit = many([()])[0]
        return finish((), [fit], 1, False)

    population = [random_genome(stops, rng) for _ in range(config.pop_size)]
    best: Genome = population[0]
    best_fit = -math.inf
    history: list[float] = []
    early = False
    for gen in range(config.max_generations):
        fit = many(population)
        top = max(range(len(population)), key=lambda i: (fit[i], -i))
        if fit[top] > best_fit:
            best, best_fit = population[top], fit[top]
        history.append(fit[top])
        if config.early_stop_fitness is not None and best_fit >= config.early_stop_fitness:
            early = True
            break
        if gen == config.max_generations - 1:
            break
        parents = select(population, fit, config.selection_rate)
        elites = select(population, fit, 1.0)[:config.elitism_count]
        offspring = _breed(parents, config.pop_size - len(elites), len(stops), rng,
                           config.mutation_prob)
        population = (list(elites) + offspring)[:config.pop_size]
    return finish(best, history, len(history), early)


def genome_to_actions(genome: Sequence[Stop], requests: dict[str, Request]) -> list[Action]:
    """Each stop becomes a Move to its site followed by the Take or Delivery."""
    out: list[Action] = []
    for s in genome:
        r = requests[s.request]
        if s.kind == "pickup":
            out.append(Action(ActionKind.MOVE, r.depot, request=r.id))
            out.append(Action(ActionKind.TAKE, r.depot, r.article, r.quantity, r.id))
        else:
            out.append(Action(ActionKind.MOVE, r.client, request=r.id))
            out.append(Action(ActionKind.DELIVERY, r.client, r.article, r.quantity, r.id))
    return out
