"""Discrete-time execution of every agent's plan over a shared world.

One tick:

1. events due at this tick fire; the agents they name revise and replan;
2. each agent (in id order) moves up to ``speed`` toward its current Move
   target, draining battery linearly with distance;
3. actions reached this tick are applied, with concurrent Takes on the
   same depot and article arbitrated by ascending request id;
4. zero-length legs that follow are resolved within the same tick;
5. an agent whose battery fell to the low mark gets a charging detour
   spliced in front of its remaining actions. A Move cut short this way
   stays unexecuted and is resumed after charging.

Movement never carries over from one leg to the next within a tick, so
the straight segment between two consecutive trace positions is exactly
the distance moved.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple

from .fitness import AggregationMode, PlanEvaluator
from .ga import EvolutionReport, GaConfig, Genome, evolve, genome_to_actions
from .replanner import RevisionOutcome, on_event, replan, revise_actions
from .world import (
    LOW_BATTERY,
    Action,
    ActionKind,
    AgentSpec,
    Point,
    SystemState,
    apply_action,
    battery_rule,
    id_key,
    stops_of,
)

if TYPE_CHECKING:
    from .scenario import ScenarioDocument, SimConfig

_EPS = 1e-9


class SimError(Exception):
    pass


class SimStalled(SimError):
    pass


class MaxTicksExceeded(SimError):
    def __init__(self, message: str, result: "RunResult"):
        super().__init__(message)
        self.result = result


class TakeClaim(NamedTuple):
    request: str
    agent: str
    quantity: int


def arbitrate(claims: list[TakeClaim], stock: int) -> tuple[list[TakeClaim], list[TakeClaim]]:
    """Grant Takes on one depot/article in ascending request id while stock lasts.

    Returns ``(granted, refused)``; everything after the first claim that
    does not fit is refused.
    """
    ordered = sorted(claims, key=lambda c: id_key(c.request))
    granted: list[TakeClaim] = []
    left = stock
    for k, c in enumerate(ordered):
        if c.quantity > left:
            return granted, ordered[k:]
        granted.append(c)
        left -= c.quantity
    return granted, []


@dataclass
class AgentSnapshot:
    x: float
    y: float
    battery: float
    action_kind: str
    request: str


@dataclass
class TraceRecord:
    tick: int
    agents: dict[str, AgentSnapshot]
    events: list[int] = field(default_factory=list)
    arbitration: list[dict] = field(default_factory=list)
    completed: list[str] = field(default_factory=list)


@dataclass
class PlanRecord:
    agent: str
    index: int
    tick: int
    source: str  # "pinned" | "evolved" | "replanned"
    origin: Point
    report: EvolutionReport


@dataclass
class AgentMetrics:
    distance: float = 0.0
    completion_tick: int | None = None
    replan_count: int = 0
    plan_fitness: list[float] = field(default_factory=list)


@dataclass
class RunMetrics:
    agents: dict[str, AgentMetrics]
    ticks: int = 0
    completed: bool = False

    @property
    def total_distance(self) -> float:
        return sum(m.distance for m in self.agents.values())


@dataclass
class RunResult:
    metrics: RunMetrics
    trace: list[TraceRecord]
    plans: list[PlanRecord]
    state: SystemState
    executed: list[tuple[int, str, str, str]]  # (tick, agent, kind, request)
    revisions: list[tuple[int, RevisionOutcome]] = field(default_factory=list)


class Simulation:
    """Mutable run of one scenario. ``run()`` drives it to completion."""

    def __init__(self, doc: "ScenarioDocument", ga: GaConfig | None = None,
                 sim: "SimConfig | None" = None, mode: AggregationMode | None = None,
                 seed: int | None = None):
        self.doc = doc
        self.ga = ga or doc.ga
        self.sim = sim or doc.sim
        self.mode = mode or doc.aggregation
        self.seed = self.ga.seed if seed is None else seed
        self.state = doc.initial_state()
        self.specs: dict[str, AgentSpec] = {a.id: a for a in doc.agents}
        self.order = sorted(self.specs, key=id_key)
        self.timeline = doc.timeline()
        self.total_requests = len(doc.requests) + sum(len(e.new_requests) for e in doc.events)
        self.genomes: dict[str, Genome] = {}
        self.plans: list[PlanRecord] = []
        self.trace: list[TraceRecord] = []
        self.executed: list[tuple[int, str, str, str]] = []
        self.metrics = RunMetrics({a: AgentMetrics() for a in self.order})
        self._plan_count = {a: 0 for a in self.order}
        self._needs_charge = {a: False for a in self.order}
        self._next_event = 0
        self._blocked: set[str] = set()
        self.revisions: list[tuple[int, RevisionOutcome]] = []

    # -- planning ------------------------------------------------------------

    def _rng(self, agent: str) -> random.Random:
        k = self._plan_count[agent]
        return random.Random(f"{self.seed}/{agent}/{k}")

    def _install(self, agent: str, genome: Genome, report: EvolutionReport, source: str,
                 origin: Point) -> None:
        st = self.state.agents[agent]
        self.genomes[agent] = genome
        st.plan = genome_to_actions(genome, self.state.requests)
        self.plans.append(PlanRecord(agent, self._plan_count[agent], self.state.time, source,
                                     origin, report))
        self.metrics.agents[agent].plan_fitness.append(report.fitness)
        self._plan_count[agent] += 1
        self._maybe_splice_charge(agent)

    def plan_initial(self) -> None:
        for agent in self.order:
            spec = self.specs[agent]
            stops = stops_of(sorted((r for r in self.state.requests.values() if r.agent == agent),
                                    key=lambda r: id_key(r.id)))
            evaluator = PlanEvaluator.for_world(stops, spec.start, self.state, spec.constraints, self.mode)
            if spec.initial_plan is not None:
                genome = tuple(spec.initial_plan)
                report = EvolutionReport(genome, evaluator.breakdown(genome), [], 0, False)
                self._install(agent, genome, report, "pinned", spec.start)
            else:
                report = evolve(stops, evaluator, self.ga, self._rng(agent))
                self._install(agent, report.best, report, "evolved", spec.start)
            if not stops:
                self.metrics.agents[agent].completion_tick = 0

    def _replan(self, agent: str, outcome: RevisionOutcome) -> None:
        self.revisions.append((self.state.time, outcome))
        report = replan(self.specs[agent], outcome, self.ga, self.state, self.mode, self._rng(agent))
        self.metrics.agents[agent].replan_count += 1
        self._install(agent, report.best, report, "replanned", outcome.agent_snapshot.position)

    # -- battery -------------------------------------------------------------

    def _maybe_splice_charge(self, agent: str) -> None:
        st = self.state.agents[agent]
        if st.battery > LOW_BATTERY:
            self._needs_charge[agent] = False
            return
        pending = st.pending_actions
        if not pending or any(a.kind is ActionKind.CHARGE for a in pending):
            self._needs_charge[agent] = not pending
            return
        charge = battery_rule(st, self.state.chargers.values())
        at = st.plan.index(pending[0])
        st.plan[at:at] = [Action(ActionKind.MOVE, charge.target), charge]
        self._needs_charge[agent] = False

    # -- execution -----------------------------------------------------------

    def _current(self, agent: str) -> Action | None:
        for a in self.state.agents[agent].plan:
            if not a.executed:
                return a
        return None

    def _after(self, agent: str, action: Action) -> Action | None:
        plan = self.state.agents[agent].plan
        i = plan.index(action)
        return plan[i + 1] if i + 1 < len(plan) else None

    def _move(self, agent: str, allow_travel: bool) -> tuple[float, Action | None]:
        """Advance ``agent`` on its current Move; return (distance, action reached)."""
        st = self.state.agents[agent]
        spec = self.specs[agent]
        act = self._current(agent)
        if act is None or act.kind is not ActionKind.MOVE or agent in self._blocked:
            return 0.0, None
        target = self.state.location(act.target)
        gap = math.hypot(target.x - st.position.x, target.y - st.position.y)
        if gap > 0 and not allow_travel:
            return 0.0, None
        step = min(spec.speed, gap)
        if spec.consumption > 0:
            step = min(step, st.battery * spec.battery_capacity / spec.consumption)
        if step <= 0 and gap > 0:
            return 0.0, None
        if step >= gap - _EPS * max(1.0, gap):
            moved = gap
            st.position = target
        else:
            moved = step
            f = step / gap
            st.position = Point(st.position.x + (target.x - st.position.x) * f,
                                st.position.y + (target.y - st.position.y) * f)
        if spec.consumption > 0 and moved > 0:
            st.battery = max(0.0, st.battery - spec.consumption * moved / spec.battery_capacity)
            if st.battery <= LOW_BATTERY:
                self._needs_charge[agent] = True
        self.metrics.agents[agent].distance += moved
        if st.position != target:
            return moved, None
        act.mark_executed()
        return moved, self._after(agent, act)

    def _apply_round(self, reached: dict[str, Action], log: TraceRecord) -> set[str]:
        """Apply the actions agents reached; return agents that made progress."""
        progressed: set[str] = set()
        takes: dict[tuple[str, str], list[TakeClaim]] = {}
        for agent, act in reached.items():
            if act.kind is ActionKind.TAKE:
                takes.setdefault((act.target, act.article), []).append(
                    TakeClaim(act.request, agent, act.quantity))
        refused: set[str] = set()
        for (depot, article), claims in sorted(takes.items()):
            stock = self.state.depots[depot].stock.get(article, 0)
            granted, lost = arbitrate(claims, stock)
            if len(claims) > 1 or lost:
                log.arbitration.append({
                    "depot": depot, "article": article, "stock": stock,
                    "granted": [c.request for c in granted], "refused": [c.request for c in lost]})
            refused.update(c.agent for c in lost)
        ordered = sorted(reached.items(), key=lambda kv: (
            0 if kv[1].kind is ActionKind.TAKE else 1, id_key(kv[1].request or ""), id_key(kv[0])))
        for agent, act in ordered:
            if agent in refused:
                continue
            apply_action(self.state, agent, act)
            progressed.add(agent)
            st = self.state.agents[agent]
            if act.kind in (ActionKind.TAKE, ActionKind.DELIVERY):
                st.executed_count += 2
                self.executed.append((self.state.time, agent, act.kind.value, act.request))
                if act.kind is ActionKind.DELIVERY and self.state.requests[act.request].done:
                    log.completed.append(act.request)
            if self._needs_charge[agent]:
                self._maybe_splice_charge(agent)
            if self._current(agent) is None:
                self.metrics.agents[agent].completion_tick = self.state.time
        for agent in sorted(refused, key=id_key):
            self._blocked.add(agent)
            st = self.state.agents[agent]
            outcome = revise_actions(agent, st.plan, [], st, None)
            self._replan(agent, outcome)
        return progressed

    def _fire_events(self, log: TraceRecord) -> None:
        while (self._next_event < len(self.timeline)
               and self.timeline[self._next_event].time == self.state.time):
            event = self.timeline[self._next_event]
            self._next_event += 1
            log.events.append(event.time)
            for agent, outcome in on_event(self.state, event).items():
                self._replan(agent, outcome)

    def step(self) -> TraceRecord:
        self.state.time += 1
        log = TraceRecord(self.state.time, {})
        self._blocked = set()
        self._fire_events(log)

        moved_any = False
        progressed: set[str] = set()
        travel = True
        while True:
            reached: dict[str, Action] = {}
            for agent in self.order:
                moved, act = self._move(agent, travel)
                moved_any = moved_any or moved > 0
                if act is not None:
                    reached[agent] = act
            travel = False
            if not reached:
                break
            progressed |= self._apply_round(reached, log)

        for agent in self.order:
            if self._needs_charge[agent]:
                self._maybe_splice_charge(agent)

        if not moved_any and not progressed and not self.finished() \
                and self._next_event >= len(self.timeline):
            raise SimStalled(f"t={self.state.time}: no agent can make progress")
        self._snapshot(log)
        return log

    def _snapshot(self, log: TraceRecord) -> None:
        for agent in self.order:
            st = self.state.agents[agent]
            act = self._current(agent)
            log.agents[agent] = AgentSnapshot(
                st.position.x, st.position.y, st.battery,
                act.kind.value if act else "Idle", (act.request or "") if act else "")
        self.trace.append(log)

    def finished(self) -> bool:
        return (self._next_event >= len(self.timeline)
                and len(self.state.requests) == self.total_requests
                and all(r.done for r in self.state.requests.values()))

    def _result(self) -> RunResult:
        self.metrics.ticks = self.state.time
        self.metrics.completed = self.finished()
        return RunResult(self.metrics, self.trace, self.plans, self.state, self.executed, self.revisions)

    def run(self) -> RunResult:
        self.plan_initial()
        self._snapshot(TraceRecord(0, {}))
        while not self.finished():
            if self.state.time >= self.sim.max_ticks:
                raise MaxTicksExceeded(f"not complete after {self.sim.max_ticks} ticks", self._result())
            self.step()
        return self._result()


def run(doc: "ScenarioDocument", ga: GaConfig | None = None, sim: "SimConfig | None" = None,
        mode: AggregationMode | None = None, seed: int | None = None) -> RunResult:
    return Simulation(doc, ga, sim, mode, seed).run()
