"""Plan revision when new requests reach agents mid-execution.

The stop set to replan is every stop of the current plan whose Take or
Delivery has not run yet, plus the stops of the new requests. The GA is
then rerun from the agent's live position.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass

from .fitness import WEIGHTED_MEAN, AggregationMode, PlanEvaluator
from .ga import EvolutionReport, GaConfig, evolve
from .world import (
    Action,
    ActionKind,
    AgentSpec,
    AgentState,
    Event,
    Point,
    Request,
    Stop,
    SystemState,
    delivery,
    id_key,
    pickup,
    stops_of,
)


class UnknownAgent(KeyError):
    pass


class RevisionError(ValueError):
    pass


@dataclass
class RevisionOutcome:
    agent: str
    retained: tuple[Stop, ...]
    new: tuple[Stop, ...]
    agent_snapshot: AgentState | None = None
    system_snapshot: SystemState | None = None

    @property
    def stops(self) -> tuple[Stop, ...]:
        return self.retained + self.new


def unexecuted_stops(plan: list[Action]) -> list[Stop]:
    out: dict[Stop, None] = {}
    for a in plan:
        if a.executed or a.request is None:
            continue
        if a.kind is ActionKind.TAKE:
            out[pickup(a.request)] = None
        elif a.kind is ActionKind.DELIVERY:
            out[delivery(a.request)] = None
    return list(out)


def revise_actions(agent: str, old_plan: list[Action], new_requests: list[Request],
                   agent_state: AgentState | None = None,
                   system: SystemState | None = None) -> RevisionOutcome:
    """Split the next stop set into retained (unexecuted) and new stops.

    A stop whose Move ran but whose Take/Delivery did not is retained
    whole; its Move gets replanned. Snapshots are deep copies.
    """
    retained = unexecuted_stops(old_plan)
    new = stops_of(sorted(new_requests, key=lambda r: id_key(r.id)))
    clash = set(retained) & set(new)
    if clash:
        raise RevisionError(f"{agent}: new requests already planned: {sorted(map(str, clash))}")

    have = set(retained)
    owed: dict[str, int] = {}
    for s in retained:
        if s.kind == "delivery" and pickup(s.request) not in have:
            take = next((a for a in old_plan if a.kind is ActionKind.TAKE and a.request == s.request), None)
            if take is not None and not take.executed:
                raise RevisionError(f"{agent}: delivery of {s.request} kept without its pickup")
            if system is not None:
                req = system.requests[s.request]
                owed[req.article] = owed.get(req.article, 0) + req.quantity
    if agent_state is not None:
        for article, qty in owed.items():
            if agent_state.cargo.get(article, 0) < qty:
                raise RevisionError(f"{agent}: owes {qty} {article} but carries "
                                    f"{agent_state.cargo.get(article, 0)}")

    return RevisionOutcome(
        agent,
        tuple(retained),
        tuple(new),
        copy.deepcopy(agent_state) if agent_state is not None else None,
        copy.deepcopy(system) if system is not None else None,
    )


def replan(agent: AgentSpec, outcome: RevisionOutcome, config: GaConfig, world: SystemState,
           mode: AggregationMode = WEIGHTED_MEAN, rng: random.Random | None = None) -> EvolutionReport:
    """Rerun the GA over retained + new stops, starting from the snapshot position."""
    origin: Point = outcome.agent_snapshot.position if outcome.agent_snapshot else agent.start
    evaluator = PlanEvaluator.for_world(outcome.stops, origin, world, agent.constraints, mode)
    return evolve(outcome.stops, evaluator, config, rng)


def on_event(system: SystemState, event: Event) -> dict[str, RevisionOutcome]:
    """Extend the world with ``event`` and revise every agent it names.

    Agents not named by any new request are left alone.
    """
    for r in event.new_requests:
        if r.agent not in system.agents:
            raise UnknownAgent(f"event at t={event.time}: request {r.id} names unknown agent {r.agent}")
    for d in event.new_depots:
        system.depots[d.id] = d
    for c in event.new_clients:
        system.clients[c.id] = c
    by_agent: dict[str, list[Request]] = {}
    for r in event.new_requests:
        system.requests[r.id] = r
        by_agent.setdefault(r.agent, []).append(r)

    outcomes = {}
    for agent_id in sorted(by_agent, key=id_key):
        state = system.agents[agent_id]
        state.total_count += 4 * len(by_agent[agent_id])
        outcomes[agent_id] = revise_actions(agent_id, state.plan, by_agent[agent_id], state, system)
    return outcomes
