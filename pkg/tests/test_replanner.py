import copy
import random

import pytest

from dpdp.fitness import AggregationMode, route_of_plan
from dpdp.ga import GaConfig, genome_to_actions, is_feasible
from dpdp.replanner import RevisionError, UnknownAgent, on_event, replan, revise_actions, unexecuted_stops
from dpdp.world import ActionKind, Event, Point, Request, delivery, pickup

from conftest import polyline_length

pu, de = pickup, delivery
LEGACY = AggregationMode.legacy()


def execute(plan, *stops):
    """Mark the Move and Take/Delivery of each given stop as executed."""
    want = set(stops)
    for i in range(0, len(plan), 2):
        move, act = plan[i], plan[i + 1]
        stop = pu(act.request) if act.kind is ActionKind.TAKE else de(act.request)
        if stop in want:
            move.mark_executed()
            act.mark_executed()


@pytest.fixture
def world(thesis_doc):
    return thesis_doc.initial_state()


def a1_plan(world):
    return genome_to_actions([pu("R3"), de("R3"), pu("R1"), de("R1"), pu("R2"), de("R2")], world.requests)


def a3_plan(world):
    return genome_to_actions([pu("R10"), pu("R8"), de("R8"), pu("R9"), de("R10"), de("R9")], world.requests)


R11 = Request("R11", "S5", "Art5", "T1", 400, "A1", release_time=215)
R13 = Request("R13", "S5", "Art5", "T8", 100, "A3", release_time=215)


def test_first_agent_revision(world):
    plan = a1_plan(world)
    execute(plan, pu("R1"), de("R1"), pu("R3"), de("R3"))
    out = revise_actions("A1", plan, [R11])
    assert set(out.retained) == {pu("R2"), de("R2")}
    assert set(out.new) == {pu("R11"), de("R11")}


def test_nothing_executed_keeps_everything(world):
    plan = a1_plan(world)
    out = revise_actions("A1", plan, [])
    assert set(out.retained) == {pu(r) for r in ("R1", "R2", "R3")} | {de(r) for r in ("R1", "R2", "R3")}
    assert out.new == ()


def test_third_agent_keeps_open_delivery(world):
    plan = a3_plan(world)
    execute(plan, pu("R10"), pu("R8"), de("R8"))
    st = world.agents["A3"]
    st.cargo["Art4"] = 200
    out = revise_actions("A3", plan, [R13], st, world)
    assert set(out.retained) == {pu("R9"), de("R9"), de("R10")}
    assert set(out.new) == {pu("R13"), de("R13")}


def test_move_done_but_take_pending_is_retained(world):
    plan = a1_plan(world)
    plan[0].mark_executed()
    assert pu("R3") in unexecuted_stops(plan)


def test_open_delivery_needs_cargo(world):
    plan = a3_plan(world)
    execute(plan, pu("R10"))
    with pytest.raises(RevisionError):
        revise_actions("A3", plan, [], world.agents["A3"], world)


def test_new_request_already_planned(world):
    with pytest.raises(RevisionError):
        revise_actions("A1", a1_plan(world), [world.requests["R1"]])


def test_snapshots_are_copies(world):
    st = world.agents["A1"]
    out = revise_actions("A1", a1_plan(world), [], st, world)
    st.position = Point(1, 1)
    world.depots["S1"].stock["Art1"] = 0
    assert out.agent_snapshot.position == Point(200, 200)
    assert out.system_snapshot.depots["S1"].stock["Art1"] == 10000


def test_replan_from_live_position(thesis_doc, world):
    plan = a1_plan(world)
    execute(plan, pu("R1"), de("R1"), pu("R3"), de("R3"))
    on_event_world = copy.deepcopy(world)
    on_event_world.depots["S5"] = copy.deepcopy(thesis_doc.events[0].new_depots[0])
    on_event_world.requests["R11"] = R11
    st = on_event_world.agents["A1"]
    st.position = Point(1600, 670)
    out = revise_actions("A1", plan, [R11], st, on_event_world)
    rep = replan(thesis_doc.agent("A1"), out, GaConfig(seed=0), on_event_world, LEGACY, random.Random(0))
    assert set(rep.best) == {pu("R2"), de("R2"), pu("R11"), de("R11")}
    assert is_feasible(rep.best)
    # the route starts at the snapshot position, not at the agent's start
    route = route_of_plan(rep.best, Point(1600, 670), on_event_world)
    assert rep.breakdown.sum_of("distance") == pytest.approx(polyline_length([tuple(p) for p in route]), rel=1e-12)


def test_replan_trivial_sets(thesis_doc, world):
    spec = thesis_doc.agent("A3")
    out = revise_actions("A3", [], [])
    assert replan(spec, out, GaConfig(), world, LEGACY).best == ()
    plan = a3_plan(world)
    execute(plan, pu("R10"), pu("R8"), de("R8"), pu("R9"), de("R9"))
    out = revise_actions("A3", plan, [])
    assert replan(spec, out, GaConfig(), world, LEGACY).best == (de("R10"),)


def test_on_event_names_exactly_the_affected_agents(thesis_doc, world):
    event = copy.deepcopy(thesis_doc.events[0])
    outcomes = on_event(world, event)
    assert list(outcomes) == ["A1", "A2", "A3"]
    assert "S5" in world.depots and {"T8", "T9"} <= set(world.clients)
    assert world.agents["A1"].total_count == 12 + 4


def test_on_event_empty(world):
    assert on_event(world, Event(5)) == {}


def test_on_event_leaves_other_agents_untouched(thesis_doc, world):
    for a in world.agents:
        world.agents[a].plan = a1_plan(world) if a == "A1" else []
    before = {a: (id(world.agents[a].plan), [x.label() for x in world.agents[a].plan]) for a in world.agents}
    event = copy.deepcopy(thesis_doc.events[0])
    event.new_requests = [r for r in event.new_requests if r.agent == "A2"]
    outcomes = on_event(world, event)
    assert list(outcomes) == ["A2"]
    for a in ("A1", "A3"):
        assert (id(world.agents[a].plan), [x.label() for x in world.agents[a].plan]) == before[a]


def test_on_event_unknown_agent(world):
    bad = Request("R99", "S1", "Art1", "T1", 1, "A9", release_time=3)
    with pytest.raises(UnknownAgent):
        on_event(world, Event(3, new_requests=[bad]))


def test_two_revisions_compose(world):
    """Revising twice equals revising once against cumulative execution."""
    plan = a1_plan(world)
    execute(plan, pu("R3"), de("R3"))
    first = revise_actions("A1", plan, [R11])
    genome = (pu("R11"), pu("R1"), de("R11"), de("R1"), pu("R2"), de("R2"))
    assert set(genome) == set(first.stops)
    world.requests["R11"] = R11
    second_plan = genome_to_actions(genome, world.requests)
    execute(second_plan, pu("R11"), pu("R1"), de("R1"))
    r14 = Request("R14", "S1", "Art1", "T2", 5, "A1", release_time=300)
    second = revise_actions("A1", second_plan, [r14])

    done = {pu("R3"), de("R3"), pu("R11"), pu("R1"), de("R1")}
    everything = {pu(r) for r in ("R1", "R2", "R3", "R11")} | {de(r) for r in ("R1", "R2", "R3", "R11")}
    assert set(second.retained) == everything - done
    assert set(second.new) == {pu("R14"), de("R14")}


def test_simulated_revision_sets(thesis_run):
    at_event = {o.agent: o for t, o in thesis_run.revisions if t == 215}
    assert set(at_event) == {"A1", "A2", "A3"}
    for o in at_event.values():
        assert not set(o.retained) & set(o.new)
