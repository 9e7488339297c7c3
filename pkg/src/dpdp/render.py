"""Serialized outputs: plan listings, trace CSV, results JSON, route SVG."""

from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from typing import Sequence

from .fitness import FitnessBreakdown
from .simulator import RunResult
from .world import Action, SystemState

TRACE_COLUMNS = ("tick", "agent_id", "x", "y", "battery", "action_kind", "request_id", "event_flag")
AGENT_COLORS = ("red", "blue", "green", "orange", "purple", "brown", "teal", "magenta")


def java_double(v: float) -> str:
    """Format like Java's ``Double.toString``: ``6.323401357583406E-4``, ``0.01``."""
    if v == 0 or not math.isfinite(v):
        return repr(float(v))
    if 1e-3 <= abs(v) < 1e7:
        return repr(float(v))
    # shortest digits that round-trip, in scientific form
    for prec in range(1, 18):
        sci = f"{v:.{prec}e}"
        if float(sci) == v:
            break
    mant, exp = sci.split("e")
    return f"{mant}E{int(exp)}"


def plan_listing(actions: Sequence[Action]) -> str:
    return "".join(a.label() for a in actions)


def fitness_line(bd: FitnessBreakdown) -> str:
    parts = [f"F_C{i + 1} ={java_double(v)}" for i, v in enumerate(bd.values)]
    return " ".join(parts + [f"F_A ={java_double(bd.aggregate)}"])


def _num(v: float) -> str:
    return repr(float(v))


def trace_csv(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for rec in result.trace:
        flag = 1 if rec.events else 0
        for agent, snap in rec.agents.items():
            w.writerow([rec.tick, agent, _num(snap.x), _num(snap.y), _num(snap.battery),
                        snap.action_kind, snap.request, flag])
    return buf.getvalue()


def _bd_dict(bd: FitnessBreakdown | None) -> dict | None:
    if bd is None:
        return None
    return {"kinds": list(bd.kinds), "sums": list(bd.sums), "values": list(bd.values),
            "aggregate": bd.aggregate, "mode": bd.mode}


def results_dict(result: RunResult, seed: int, scenario_name: str) -> dict:
    m = result.metrics
    return {
        "scenario": scenario_name,
        "seed": seed,
        "completed": m.completed,
        "ticks": m.ticks,
        "agents": {a: {"distance": am.distance, "completion_tick": am.completion_tick,
                       "replan_count": am.replan_count, "plan_fitness": am.plan_fitness}
                   for a, am in m.agents.items()},
        "plans": [{"agent": p.agent, "index": p.index, "tick": p.tick, "source": p.source,
                   "origin": [p.origin.x, p.origin.y],
                   "stops": [str(s) for s in p.report.best],
                   "fitness": _bd_dict(p.report.breakdown),
                   "history": p.report.history,
                   "generations": p.report.generations,
                   "early_stopped": p.report.early_stopped}
                  for p in result.plans],
        "events": [r.tick for r in result.trace if r.events],
        "arbitration": [dict(tick=r.tick, **d) for r in result.trace for d in r.arbitration],
        "completed_requests": {req: r.tick for r in result.trace for req in r.completed},
        "final_stock": {d.id: dict(sorted(d.stock.items())) for d in result.state.depots.values()},
    }


def results_json(result: RunResult, seed: int, scenario_name: str) -> str:
    return json.dumps(results_dict(result, seed, scenario_name), indent=2) + "\n"


def route_svg(result: RunResult, bounds: tuple[float, float, float, float] | None = None,
              size: int = 800) -> str:
    """Depots as squares, clients as circles, chargers as triangles, one polyline per agent."""
    state: SystemState = result.state
    pts = [p.position for p in list(state.depots.values()) + list(state.clients.values())
           + list(state.chargers.values())]
    pts += [snap for rec in result.trace for snap in rec.agents.values()]
    if bounds is None:
        xs = [p.x for p in pts] or [0.0]
        ys = [p.y for p in pts] or [0.0]
        pad = 0.05 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        bounds = (min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)
    xmin, ymin, xmax, ymax = bounds
    scale = size / max(xmax - xmin, ymax - ymin, 1e-9)

    def tx(x: float, y: float) -> tuple[str, str]:
        # y axis flipped so the world's +y points up
        return f"{(x - xmin) * scale:.2f}", f"{(ymax - y) * scale:.2f}"

    w = f"{(xmax - xmin) * scale:.0f}"
    h = f"{(ymax - ymin) * scale:.0f}"
    root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=w, height=h,
                      viewBox=f"0 0 {w} {h}")
    g = ET.SubElement(root, "g", id="obstacles")
    for o in state.obstacles:
        x0, y0 = tx(o.min.x, o.max.y)
        ET.SubElement(g, "rect", x=x0, y=y0, width=f"{(o.max.x - o.min.x) * scale:.2f}",
                      height=f"{(o.max.y - o.min.y) * scale:.2f}", fill="#bbbbbb", opacity="0.6")
    routes = ET.SubElement(root, "g", id="routes")
    agents = list(result.trace[0].agents) if result.trace else []
    for i, agent in enumerate(agents):
        coords = " ".join(",".join(tx(rec.agents[agent].x, rec.agents[agent].y)) for rec in result.trace)
        ET.SubElement(routes, "polyline", points=coords, fill="none", stroke=AGENT_COLORS[i % len(AGENT_COLORS)],
                      **{"stroke-width": "2", "data-agent": agent})
    marks = ET.SubElement(root, "g", id="sites")
    for d in state.depots.values():
        x, y = tx(d.position.x, d.position.y)
        ET.SubElement(marks, "rect", x=f"{float(x) - 6:.2f}", y=f"{float(y) - 6:.2f}", width="12", height="12",
                      fill="black", **{"data-id": d.id})
    for c in state.clients.values():
        x, y = tx(c.position.x, c.position.y)
        ET.SubElement(marks, "circle", cx=x, cy=y, r="6", fill="white", stroke="black", **{"data-id": c.id})
    for c in state.chargers.values():
        x, y = map(float, tx(c.position.x, c.position.y))
        tri = f"{x:.2f},{y - 7:.2f} {x - 7:.2f},{y + 6:.2f} {x + 7:.2f},{y + 6:.2f}"
        ET.SubElement(marks, "polygon", points=tri, fill="gold", stroke="black", **{"data-id": c.id})
    for site in list(state.depots.values()) + list(state.clients.values()) + list(state.chargers.values()):
        x, y = tx(site.position.x, site.position.y)
        label = ET.SubElement(marks, "text", x=f"{float(x) + 8:.2f}", y=f"{float(y) - 8:.2f}",
                              **{"font-size": "12"})
        label.text = site.id
    return ET.tostring(root, encoding="unicode") + "\n"
