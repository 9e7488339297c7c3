"""Scenario documents: JSON load, validation, dump.

A scenario is one JSON object; see ``docs/scenario-format.md`` for the
schema. Bundled scenarios live in ``dpdp/data`` and can be referred to by
name (``thesis-t0``) wherever a path is accepted.
"""

from __future__ import annotations

import copy
import json
import os
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .fitness import AggregationMode
from .ga import GaConfig, is_feasible
from .world import (
    AgentSpec,
    AgentState,
    Charger,
    Client,
    ConstraintSpec,
    Depot,
    Event,
    Obstacle,
    Point,
    Request,
    Stop,
    SystemState,
    id_key,
    stops_of,
)


class ScenarioError(Exception):
    pass


class ParseError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class SimConfig:
    max_ticks: int = 100_000
    record_trace: bool = True

    def __post_init__(self) -> None:
        if self.max_ticks <= 0:
            raise ValueError("max_ticks must be positive")


@dataclass
class ScenarioDocument:
    name: str = "scenario"
    bounds: tuple[float, float, float, float] | None = None
    obstacles: list[Obstacle] = field(default_factory=list)
    chargers: list[Charger] = field(default_factory=list)
    articles: list[str] = field(default_factory=list)
    depots: list[Depot] = field(default_factory=list)
    clients: list[Client] = field(default_factory=list)
    agents: list[AgentSpec] = field(default_factory=list)
    requests: list[Request] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    ga: GaConfig = field(default_factory=GaConfig)
    aggregation: AggregationMode = field(default_factory=AggregationMode)
    sim: SimConfig = field(default_factory=SimConfig)

    def agent(self, agent_id: str) -> AgentSpec:
        for a in self.agents:
            if a.id == agent_id:
                return a
        raise KeyError(agent_id)

    def timeline(self) -> list[Event]:
        """Explicit events merged with late-released top-level requests, by time."""
        merged: dict[int, Event] = {}
        for e in self.events:
            tgt = merged.setdefault(e.time, Event(e.time))
            tgt.new_depots.extend(e.new_depots)
            tgt.new_clients.extend(e.new_clients)
            tgt.new_requests.extend(e.new_requests)
        for r in self.requests:
            if r.release_time > 0:
                merged.setdefault(r.release_time, Event(r.release_time)).new_requests.append(r)
        return [merged[t] for t in sorted(merged)]

    def initial_state(self) -> SystemState:
        """A fresh mutable world at time 0 (deep-copied from the document)."""
        doc = copy.deepcopy(self)
        reqs = {r.id: r for r in doc.requests if r.release_time == 0}
        agents = {}
        for a in doc.agents:
            n = sum(1 for r in reqs.values() if r.agent == a.id)
            agents[a.id] = AgentState(position=a.start, battery=a.battery, total_count=4 * n)
        return SystemState(
            time=0,
            depots={d.id: d for d in doc.depots},
            clients={c.id: c for c in doc.clients},
            chargers={c.id: c for c in doc.chargers},
            obstacles=list(doc.obstacles),
            requests=reqs,
            agents=agents,
        )


# -- decoding ---------------------------------------------------------------

def _point(v: Any, path: str) -> Point:
    try:
        x, y = v
        return Point(float(x), float(y))
    except (TypeError, ValueError) as exc:
        raise ValidationError(path, f"expected [x, y], got {v!r}") from exc


def _req(obj: dict, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise ValidationError(path, "expected an object")
    if key not in obj:
        raise ValidationError(f"{path}.{key}", "missing")
    return obj[key]


def _int(v: Any, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(path, f"expected an integer, got {v!r}")
    return v


def _depot(d: dict, path: str) -> Depot:
    stock = {}
    for art, q in dict(d.get("stock", {})).items():
        q = _int(q, f"{path}.stock.{art}")
        if q < 0:
            raise ValidationError(f"{path}.stock.{art}", "stock cannot be negative")
        stock[str(art)] = q
    return Depot(str(_req(d, "id", path)), _point(_req(d, "position", path), f"{path}.position"), stock)


def _client(d: dict, path: str) -> Client:
    return Client(str(_req(d, "id", path)), _point(_req(d, "position", path), f"{path}.position"))


def _request(d: dict, path: str, release: int | None = None) -> Request:
    rid = str(_req(d, "id", path))
    qty = _int(_req(d, "quantity", path), f"{path}.quantity")
    if qty <= 0:
        raise ValidationError(f"{path}.quantity", f"request {rid}: quantity must be positive")
    rt = _int(d.get("release_time", release or 0), f"{path}.release_time")
    if release is not None and rt != release:
        raise ValidationError(f"{path}.release_time", f"request {rid}: must equal event time {release}")
    if rt < 0:
        raise ValidationError(f"{path}.release_time", "cannot be negative")
    return Request(rid, str(_req(d, "depot", path)), str(_req(d, "article", path)),
                   str(_req(d, "client", path)), qty, str(_req(d, "agent", path)),
                   bool(d.get("done", False)), rt)


def _agent(d: dict, path: str) -> AgentSpec:
    cons = [ConstraintSpec(str(_req(c, "kind", f"{path}.constraints[{i}]")),
                           float(_req(c, "coefficient", f"{path}.constraints[{i}]")))
            for i, c in enumerate(d.get("constraints", []))] or None
    plan = d.get("initial_plan")
    kwargs = dict(
        id=str(_req(d, "id", path)),
        start=_point(_req(d, "start", path), f"{path}.start"),
        battery_capacity=float(d.get("battery_capacity", 1000.0)),
        speed=float(d.get("speed", 10.0)),
        consumption=float(d.get("consumption", 0.0)),
        battery=float(d.get("battery", 1.0)),
        initial_plan=[Stop.parse(s) for s in plan] if plan is not None else None,
    )
    if cons is not None:
        kwargs["constraints"] = cons
    return AgentSpec(**kwargs)


def from_dict(raw: dict) -> ScenarioDocument:
    if not isinstance(raw, dict):
        raise ValidationError("$", "scenario must be a JSON object")
    try:
        world = raw.get("world", {})
        bounds = world.get("bounds")
        doc = ScenarioDocument(
            name=str(raw.get("name", "scenario")),
            bounds=tuple(float(b) for b in bounds) if bounds is not None else None,
            obstacles=[Obstacle(_point(_req(o, "min", f"world.obstacles[{i}]"), f"world.obstacles[{i}].min"),
                                _point(_req(o, "max", f"world.obstacles[{i}]"), f"world.obstacles[{i}].max"))
                       for i, o in enumerate(world.get("obstacles", []))],
            chargers=[Charger(str(_req(c, "id", f"world.chargers[{i}]")),
                              _point(_req(c, "position", f"world.chargers[{i}]"), f"world.chargers[{i}].position"))
                      for i, c in enumerate(world.get("chargers", []))],
            articles=[str(a) for a in raw.get("articles", [])],
            depots=[_depot(d, f"depots[{i}]") for i, d in enumerate(raw.get("depots", []))],
            clients=[_client(c, f"clients[{i}]") for i, c in enumerate(raw.get("clients", []))],
            agents=[_agent(a, f"agents[{i}]") for i, a in enumerate(raw.get("agents", []))],
            requests=[_request(r, f"requests[{i}]") for i, r in enumerate(raw.get("requests", []))],
            events=[_event(e, f"events[{i}]") for i, e in enumerate(raw.get("events", []))],
            ga=_ga(raw.get("ga", {})),
            aggregation=_aggregation(raw.get("ga", {}).get("aggregation", {})),
            sim=SimConfig(**raw.get("sim", {})),
        )
    except ValidationError:
        raise
    except (TypeError, ValueError, AttributeError) as exc:
        raise ValidationError("$", str(exc)) from exc
    validate(doc)
    return doc


def _event(e: dict, path: str) -> Event:
    t = _int(_req(e, "time", path), f"{path}.time")
    if t <= 0:
        raise ValidationError(f"{path}.time", "event time must be strictly positive")
    return Event(
        t,
        [_depot(d, f"{path}.new_depots[{i}]") for i, d in enumerate(e.get("new_depots", []))],
        [_client(c, f"{path}.new_clients[{i}]") for i, c in enumerate(e.get("new_clients", []))],
        [_request(r, f"{path}.new_requests[{i}]", t) for i, r in enumerate(e.get("new_requests", []))],
    )


_GA_KEYS = ("pop_size", "max_generations", "mutation_prob", "selection_rate",
            "elitism_count", "early_stop_fitness", "seed")


def _ga(d: dict) -> GaConfig:
    return GaConfig(**{k: d[k] for k in _GA_KEYS if k in d})


def _aggregation(d: dict) -> AggregationMode:
    mode = d.get("mode", "weighted_mean")
    if mode == "weighted":
        mode = "weighted_mean"
    return AggregationMode(mode, float(d.get("w1", 8.0)), float(d.get("w2", 2.0)))


# -- validation -------------------------------------------------------------

def _unique(ids: list[tuple[str, str]], what: str) -> None:
    seen: dict[str, str] = {}
    for ident, path in ids:
        if ident in seen:
            raise ValidationError(path, f"duplicate {what} id {ident!r} (first at {seen[ident]})")
        seen[ident] = path


def validate(doc: ScenarioDocument) -> None:
    """Raise :class:`ValidationError` naming the first offending field."""
    ev_depots = [(d, f"events[{i}].new_depots[{j}]") for i, e in enumerate(doc.events)
                 for j, d in enumerate(e.new_depots)]
    ev_clients = [(c, f"events[{i}].new_clients[{j}]") for i, e in enumerate(doc.events)
                  for j, c in enumerate(e.new_clients)]
    ev_reqs = [(r, f"events[{i}].new_requests[{j}]") for i, e in enumerate(doc.events)
               for j, r in enumerate(e.new_requests)]
    all_depots = [(d, f"depots[{i}]") for i, d in enumerate(doc.depots)] + ev_depots
    all_clients = [(c, f"clients[{i}]") for i, c in enumerate(doc.clients)] + ev_clients
    all_reqs = [(r, f"requests[{i}]") for i, r in enumerate(doc.requests)] + ev_reqs

    _unique([(a, f"articles[{i}]") for i, a in enumerate(doc.articles)], "article")
    _unique([(d.id, p) for d, p in all_depots], "depot")
    _unique([(c.id, p) for c, p in all_clients], "client")
    _unique([(c.id, f"world.chargers[{i}]") for i, c in enumerate(doc.chargers)], "charger")
    _unique([(a.id, f"agents[{i}]") for i, a in enumerate(doc.agents)], "agent")
    _unique([(r.id, p) for r, p in all_reqs], "request")
    sites = [d.id for d, _ in all_depots] + [c.id for c, _ in all_clients] + [c.id for c in doc.chargers]
    _unique([(s, "$") for s in sites], "site")

    if doc.bounds is not None:
        xmin, ymin, xmax, ymax = doc.bounds
        if xmin > xmax or ymin > ymax:
            raise ValidationError("world.bounds", "min exceeds max")
        placed = ([(d.position, f"{p}.position") for d, p in all_depots]
                  + [(c.position, f"{p}.position") for c, p in all_clients]
                  + [(c.position, f"world.chargers[{i}].position") for i, c in enumerate(doc.chargers)]
                  + [(a.start, f"agents[{i}].start") for i, a in enumerate(doc.agents)])
        for pt, path in placed:
            if not (xmin <= pt.x <= xmax and ymin <= pt.y <= ymax):
                raise ValidationError(path, f"({pt.x}, {pt.y}) lies outside world bounds")

    articles = set(doc.articles)
    for d, p in all_depots:
        for art in d.stock:
            if art not in articles:
                raise ValidationError(f"{p}.stock.{art}", f"unknown article {art!r}")

    agents = {a.id for a in doc.agents}
    # sites become known when they appear; requests may use only sites known by their release
    known_at: dict[str, int] = {d.id: 0 for d in doc.depots} | {c.id: 0 for c in doc.clients}
    for e in doc.events:
        for s in list(e.new_depots) + list(e.new_clients):
            known_at[s.id] = e.time
    depot_ids = {d.id for d, _ in all_depots}
    client_ids = {c.id for c, _ in all_clients}
    for r, p in all_reqs:
        for fld, pool, what in (("depot", depot_ids, "depot"), ("client", client_ids, "client")):
            ref = getattr(r, fld)
            if ref not in pool:
                raise ValidationError(f"{p}.{fld}", f"request {r.id}: unknown {what} {ref!r}")
            if known_at[ref] > r.release_time:
                raise ValidationError(f"{p}.{fld}", f"request {r.id}: {what} {ref!r} appears only at t={known_at[ref]}")
        if r.article not in articles:
            raise ValidationError(f"{p}.article", f"request {r.id}: unknown article {r.article!r}")
        if r.agent not in agents:
            raise ValidationError(f"{p}.agent", f"request {r.id}: unknown agent {r.agent!r}")

    stock = {(d.id, a): q for d, _ in all_depots for a, q in d.stock.items()}
    need: dict[tuple[str, str], int] = {}
    for r, p in sorted(all_reqs, key=lambda rp: (rp[0].release_time, id_key(rp[0].id))):
        key = (r.depot, r.article)
        need[key] = need.get(key, 0) + r.quantity
        if need[key] > stock.get(key, 0):
            raise ValidationError(f"{p}.quantity", f"request {r.id}: depot {r.depot} stock of "
                                  f"{r.article} ({stock.get(key, 0)}) cannot cover {need[key]} requested")

    if any(a.consumption > 0 for a in doc.agents) and not doc.chargers:
        raise ValidationError("world.chargers", "agents drain battery but no charger is defined")

    for i, a in enumerate(doc.agents):
        if a.initial_plan is None:
            continue
        own = stops_of(r for r in doc.requests if r.agent == a.id and r.release_time == 0)
        if not is_feasible(a.initial_plan, own):
            raise ValidationError(f"agents[{i}].initial_plan",
                                  "must order exactly the agent's time-0 stops, pickups first")


# -- encoding ---------------------------------------------------------------

def _pt(p: Point) -> list[float]:
    return [p.x, p.y]


def _depot_dict(d: Depot) -> dict:
    return {"id": d.id, "position": _pt(d.position), "stock": dict(d.stock)}


def _request_dict(r: Request) -> dict:
    return {"id": r.id, "depot": r.depot, "article": r.article, "client": r.client,
            "quantity": r.quantity, "agent": r.agent, "release_time": r.release_time}


def to_dict(doc: ScenarioDocument) -> dict:
    world: dict[str, Any] = {}
    if doc.bounds is not None:
        world["bounds"] = list(doc.bounds)
    world["obstacles"] = [{"min": _pt(o.min), "max": _pt(o.max)} for o in doc.obstacles]
    world["chargers"] = [{"id": c.id, "position": _pt(c.position)} for c in doc.chargers]
    agents = []
    for a in doc.agents:
        ad = {"id": a.id, "start": _pt(a.start), "battery_capacity": a.battery_capacity,
              "speed": a.speed, "consumption": a.consumption, "battery": a.battery,
              "constraints": [{"kind": c.kind, "coefficient": c.coefficient} for c in a.constraints]}
        if a.initial_plan is not None:
            ad["initial_plan"] = [str(s) for s in a.initial_plan]
        agents.append(ad)
    ga = {k: getattr(doc.ga, k) for k in _GA_KEYS}
    ga["aggregation"] = {"mode": doc.aggregation.kind, "w1": doc.aggregation.w1, "w2": doc.aggregation.w2}
    return {
        "name": doc.name,
        "world": world,
        "articles": list(doc.articles),
        "depots": [_depot_dict(d) for d in doc.depots],
        "clients": [{"id": c.id, "position": _pt(c.position)} for c in doc.clients],
        "agents": agents,
        "requests": [_request_dict(r) for r in doc.requests],
        "events": [{"time": e.time,
                    "new_depots": [_depot_dict(d) for d in e.new_depots],
                    "new_clients": [{"id": c.id, "position": _pt(c.position)} for c in e.new_clients],
                    "new_requests": [_request_dict(r) for r in e.new_requests]}
                   for e in doc.events],
        "ga": ga,
        "sim": {"max_ticks": doc.sim.max_ticks, "record_trace": doc.sim.record_trace},
    }


def dumps(doc: ScenarioDocument) -> str:
    return json.dumps(to_dict(doc), indent=2) + "\n"


def loads(text: str) -> ScenarioDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    return from_dict(raw)


def bundled_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("dpdp.data").iterdir() if p.name.endswith(".json"))


def resolve(path_or_name: str | os.PathLike) -> Path | Any:
    p = Path(path_or_name)
    if p.exists():
        return p
    if str(path_or_name) in bundled_names():
        return resources.files("dpdp.data") / f"{path_or_name}.json"
    raise ScenarioError(f"no such scenario file or bundled scenario: {path_or_name}")


def load_scenario(path_or_name: str | os.PathLike) -> ScenarioDocument:
    return loads(resolve(path_or_name).read_text(encoding="utf-8"))


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` via a temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_scenario(doc: ScenarioDocument, path: str | os.PathLike) -> None:
    write_atomic(path, dumps(doc))
