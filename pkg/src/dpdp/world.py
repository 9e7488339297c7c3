"""Domain types for the pickup-and-delivery world and the two reactive rules.

Requests expand into four actions (move to depot, take, move to client,
deliver); an agent whose battery falls to a tenth of its capacity gets a
charging action toward the nearest charger.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

LOW_BATTERY = 0.1


class WorldError(Exception):
    """Base class for state-transition failures."""


class NoCharger(WorldError):
    pass


class InsufficientStock(WorldError):
    pass


class InsufficientCargo(WorldError):
    pass


class WrongLocation(WorldError):
    pass


_ID_CHUNK = re.compile(r"(\d+)")


def id_key(ident: str) -> tuple:
    """Natural sort key so that ``R9`` orders before ``R10``."""
    return tuple(int(c) if c.isdigit() else c for c in _ID_CHUNK.split(ident))


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass
class Depot:
    id: str
    position: Point
    stock: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class Client:
    id: str
    position: Point


@dataclass(frozen=True)
class Charger:
    id: str
    position: Point


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned rectangle given by its min and max corners."""

    min: Point
    max: Point

    def __post_init__(self) -> None:
        if self.min.x > self.max.x or self.min.y > self.max.y:
            raise ValueError("obstacle min corner exceeds max corner")


@dataclass
class Request:
    id: str
    depot: str
    article: str
    client: str
    quantity: int
    agent: str
    done: bool = False
    release_time: int = 0

    def __post_init__(self) -> None:
        if self.quantity <= 0:
            raise ValueError(f"request {self.id}: quantity must be positive")


class ActionKind(str, Enum):
    MOVE = "Move"
    TAKE = "Take"
    DELIVERY = "Delivery"
    CHARGE = "ChargeBattery"


@dataclass(eq=False)
class Action:
    """One step of a plan.

    ``target`` is the id of the depot, client or charger involved. Take and
    Delivery carry an article and a quantity. ``executed`` only ever goes
    from False to True (see :meth:`mark_executed`).
    """

    kind: ActionKind
    target: str
    article: str | None = None
    quantity: int = 0
    request: str | None = None
    _executed: bool = field(default=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind in (ActionKind.TAKE, ActionKind.DELIVERY) and self.quantity <= 0:
            raise ValueError(f"{self.kind.value} needs a positive quantity")

    @property
    def executed(self) -> bool:
        return self._executed

    def mark_executed(self) -> None:
        self._executed = True

    def same_step(self, other: "Action") -> bool:
        return (self.kind, self.target, self.article, self.quantity, self.request) == (
            other.kind, other.target, other.article, other.quantity, other.request)

    def label(self) -> str:
        flag = "true" if self._executed else "false"
        if self.kind in (ActionKind.MOVE, ActionKind.CHARGE):
            return f"({self.kind.value} {self.target},{flag})"
        return f"({self.kind.value} {self.target},{self.article},{self.quantity},{flag})"


class Stop(NamedTuple):
    """Genome atom: the pickup or the delivery half of a request."""

    kind: str  # "pickup" | "delivery"
    request: str

    def __str__(self) -> str:
        return f"{self.kind}:{self.request}"

    @classmethod
    def parse(cls, text: str) -> "Stop":
        kind, _, req = text.partition(":")
        if kind not in ("pickup", "delivery") or not req:
            raise ValueError(f"bad stop {text!r}")
        return cls(kind, req)


def pickup(request_id: str) -> Stop:
    return Stop("pickup", request_id)


def delivery(request_id: str) -> Stop:
    return Stop("delivery", request_id)


def stops_of(requests: Iterable[Request]) -> list[Stop]:
    out = []
    for r in requests:
        out.append(pickup(r.id))
        out.append(delivery(r.id))
    return out


@dataclass(frozen=True)
class ConstraintSpec:
    kind: str  # "distance" | "obstacles"
    coefficient: float

    def __post_init__(self) -> None:
        if self.kind not in ("distance", "obstacles"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if not self.coefficient > 0:
            raise ValueError("constraint coefficient must be positive")


@dataclass
class AgentSpec:
    id: str
    start: Point
    battery_capacity: float = 1000.0
    speed: float = 10.0
    consumption: float = 0.0
    constraints: list[ConstraintSpec] = field(default_factory=lambda: [
        ConstraintSpec("distance", 1.0), ConstraintSpec("obstacles", 1.0)])
    battery: float = 1.0
    initial_plan: list[Stop] | None = None

    def __post_init__(self) -> None:
        if self.battery_capacity <= 0:
            raise ValueError(f"agent {self.id}: battery_capacity must be positive")
        if self.speed <= 0:
            raise ValueError(f"agent {self.id}: speed must be positive")
        if self.consumption < 0:
            raise ValueError(f"agent {self.id}: consumption must be non-negative")
        if not 0.0 <= self.battery <= 1.0:
            raise ValueError(f"agent {self.id}: battery must lie in [0, 1]")


@dataclass
class AgentState:
    """Live state of one agent.

    ``plan`` is the agent's current action list including executed entries,
    which is what revision reads; ``pending_actions`` is the unexecuted tail.
    """

    position: Point
    battery: float = 1.0
    executed_count: int = 0
    total_count: int = 0
    plan: list[Action] = field(default_factory=list)
    cargo: dict[str, int] = field(default_factory=dict)

    @property
    def pending_actions(self) -> list[Action]:
        return [a for a in self.plan if not a.executed]

    @property
    def completion_rate(self) -> float:
        return self.executed_count / self.total_count if self.total_count else 0.0


@dataclass
class SystemState:
    time: int
    depots: dict[str, Depot]
    clients: dict[str, Client]
    chargers: dict[str, Charger]
    obstacles: list[Obstacle]
    requests: dict[str, Request]
    agents: dict[str, AgentState]
    delivered: dict[str, int] = field(default_factory=dict)

    def location(self, ident: str) -> Point:
        for table in (self.depots, self.clients, self.chargers):
            if ident in table:
                return table[ident].position
        raise KeyError(ident)


def expand_request(r: Request) -> list[Action]:
    """Reg1: a request becomes move/take/move/deliver, all unexecuted."""
    return [
        Action(ActionKind.MOVE, r.depot, request=r.id),
        Action(ActionKind.TAKE, r.depot, r.article, r.quantity, r.id),
        Action(ActionKind.MOVE, r.client, request=r.id),
        Action(ActionKind.DELIVERY, r.client, r.article, r.quantity, r.id),
    ]


def nearest_charger(position: Point, chargers: Iterable[Charger]) -> Charger | None:
    best = None
    best_key = None
    for c in chargers:
        key = (math.hypot(c.position.x - position.x, c.position.y - position.y), id_key(c.id))
        if best_key is None or key < best_key:
            best, best_key = c, key
    return best


def battery_rule(state: AgentState, chargers: Iterable[Charger]) -> Action | None:
    """Reg2: charge at the nearest charger once battery <= 1/10 (inclusive)."""
    if state.battery > LOW_BATTERY:
        return None
    charger = nearest_charger(state.position, chargers)
    if charger is None:
        raise NoCharger(f"battery at {state.battery:.3f} and no charger available")
    return Action(ActionKind.CHARGE, charger.id)


def apply_action(state: SystemState, agent: str, a: Action) -> SystemState:
    """Apply a Take, Delivery or ChargeBattery in place and return ``state``.

    Moves are driven by the simulator; passing one here only marks it
    executed once the agent stands on its target.
    """
    ag = state.agents[agent]
    here = state.location(a.target)
    if (ag.position.x, ag.position.y) != (here.x, here.y):
        raise WrongLocation(f"{agent} at {tuple(ag.position)} cannot {a.kind.value} at {a.target}")

    if a.kind is ActionKind.TAKE:
        depot = state.depots[a.target]
        have = depot.stock.get(a.article, 0)
        if a.quantity > have:
            raise InsufficientStock(
                f"{a.request}: take {a.quantity} {a.article} at {a.target}, stock {have}")
        depot.stock[a.article] = have - a.quantity
        ag.cargo[a.article] = ag.cargo.get(a.article, 0) + a.quantity
    elif a.kind is ActionKind.DELIVERY:
        carried = ag.cargo.get(a.article, 0)
        if a.quantity > carried:
            raise InsufficientCargo(
                f"{a.request}: deliver {a.quantity} {a.article}, carrying {carried}")
        ag.cargo[a.article] = carried - a.quantity
        if a.request is not None:
            req = state.requests[a.request]
            got = state.delivered.get(req.id, 0) + a.quantity
            state.delivered[req.id] = got
            if got >= req.quantity and req.client == a.target and req.article == a.article:
                req.done = True
    elif a.kind is ActionKind.CHARGE:
        ag.battery = 1.0
    a.mark_executed()
    return state


@dataclass
class Event:
    """Requests (and the sites they need) that appear at ``time``."""

    time: int
    new_depots: list[Depot] = field(default_factory=list)
    new_clients: list[Client] = field(default_factory=list)
    new_requests: list[Request] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.time <= 0:
            raise ValueError("event time must be strictly positive")
