"""Command line entry point.

    dpdp plan <scenario> --agent A1 [--seed N] [--mode weighted|legacy] [--out FILE]
    dpdp run <scenario> [--seed N] [--max-ticks N] [--trace FILE] [--results FILE] [--svg FILE]
    dpdp fitness-table <scenario> --agent A1 -n 10 [--seed N]
    dpdp validate <scenario>

``<scenario>`` is a path or the name of a bundled scenario (e.g. ``thesis-t0``).
Exit codes: 0 success, 1 validation/parse failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import random
import sys

from .fitness import AggregationMode, PlanEvaluator
from .ga import evolve, genome_to_actions, random_genome
from .render import fitness_line, java_double, plan_listing, results_json, route_svg, trace_csv
from .scenario import ScenarioDocument, ScenarioError, ValidationError, load_scenario, write_atomic
from .simulator import MaxTicksExceeded, SimError, Simulation
from .world import WorldError, id_key, stops_of

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _seed(args: argparse.Namespace, doc: ScenarioDocument) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DPDP_SEED")
    if env:
        return int(env)
    return doc.ga.seed


def _mode(args: argparse.Namespace, doc: ScenarioDocument) -> AggregationMode:
    if getattr(args, "mode", None) is None:
        return doc.aggregation
    if args.mode == "legacy":
        return AggregationMode.legacy(doc.aggregation.w1, doc.aggregation.w2)
    return AggregationMode("weighted_mean", doc.aggregation.w1, doc.aggregation.w2)


def _agent_evaluator(doc: ScenarioDocument, agent_id: str, mode: AggregationMode):
    spec = doc.agent(agent_id)
    world = doc.initial_state()
    reqs = sorted((r for r in world.requests.values() if r.agent == agent_id), key=lambda r: id_key(r.id))
    stops = stops_of(reqs)
    return spec, world, stops, PlanEvaluator.for_world(stops, spec.start, world, spec.constraints, mode)


def cmd_plan(args: argparse.Namespace) -> int:
    doc = load_scenario(args.scenario)
    seed = _seed(args, doc)
    mode = _mode(args, doc)
    _, world, stops, evaluator = _agent_evaluator(doc, args.agent, mode)
    ga = dataclasses.replace(doc.ga, seed=seed)
    report = evolve(stops, evaluator, ga, random.Random(f"{seed}/{args.agent}/0"))
    text = (f"P_{args.agent}={plan_listing(genome_to_actions(report.best, world.requests))}\n"
            f"{fitness_line(report.breakdown)}\n")
    sys.stdout.write(text)
    if args.out:
        write_atomic(args.out, text)
    return EXIT_OK


def cmd_fitness_table(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise ValidationError("-n", "must be at least 1")
    doc = load_scenario(args.scenario)
    seed = _seed(args, doc)
    _, _, stops, evaluator = _agent_evaluator(doc, args.agent, _mode(args, doc))
    rng = random.Random(f"{seed}/{args.agent}/table")
    for i in range(args.n):
        bd = evaluator.breakdown(random_genome(stops, rng))
        cols = "\t".join(f"F_C{k + 1} ={java_double(v)}" for k, v in enumerate(bd.values))
        sys.stdout.write(f"Plan {i}\t{cols}\tF_A ={java_double(bd.aggregate)}\n")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    doc = load_scenario(args.scenario)
    seed = _seed(args, doc)
    sim = doc.sim if args.max_ticks is None else dataclasses.replace(doc.sim, max_ticks=args.max_ticks)
    simulation = Simulation(doc, dataclasses.replace(doc.ga, seed=seed), sim, seed=seed)
    code = EXIT_OK
    try:
        result = simulation.run()
    except MaxTicksExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        result = exc.result
        code = EXIT_RUNTIME
    if args.trace:
        write_atomic(args.trace, trace_csv(result))
    if args.results:
        write_atomic(args.results, results_json(result, seed, doc.name))
    if args.svg:
        write_atomic(args.svg, route_svg(result, doc.bounds))
    m = result.metrics
    done = sum(r.done for r in result.state.requests.values())
    print(f"{doc.name}: {'completed' if m.completed else 'incomplete'} at tick {m.ticks}, "
          f"{done}/{simulation.total_requests} requests done, distance {m.total_distance:.2f}")
    return code


def cmd_validate(args: argparse.Namespace) -> int:
    doc = load_scenario(args.scenario)
    n_req = len(doc.requests) + sum(len(e.new_requests) for e in doc.events)
    print(f"{doc.name}: ok ({len(doc.agents)} agents, {n_req} requests, {len(doc.events)} events)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpdp", description="Multi-agent dynamic pickup-and-delivery planner")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="evolve one agent's initial plan and print it")
    p.add_argument("scenario")
    p.add_argument("--agent", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["weighted", "legacy"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", help="simulate the scenario to completion")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-ticks", type=int)
    p.add_argument("--trace")
    p.add_argument("--results")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fitness-table", help="evaluate n random feasible plans")
    p.add_argument("scenario")
    p.add_argument("--agent", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["weighted", "legacy"])
    p.set_defaults(func=cmd_fitness_table)

    p = sub.add_parser("validate", help="load and validate a scenario")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except KeyError as exc:
        print(f"error: unknown id {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SimError, WorldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
