"""Batch experiment runner: `evohull <command> --config <path>`.

Commands
--------
hull-recover     scramble a convex-position instance per seed, run greedy
                 descent and the EA pipeline, verify against the hull oracle
optimize         run the EA on an LP/QP instance per seed, verify against
                 the vertex-enumeration / grid oracle
operator-laws    randomized property trials of the three operator laws
entropy-report   per-generation Shannon and Renyi-2 entropy CSV of a run

All artifacts are deterministic functions of (config, seeds): files carry no
timestamps and are written atomically. Exit status: 0 all checks passed,
1 a verification failed, 2 config or instance error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .ea_core import config_from_json, run_ea
from .errors import EvoHullError, InvalidConfigError, InvalidProblemError
from .mesh import (FOUR_PI_TOL, SPHERE_TOTAL, greedy_descent, is_convex_position_mesh,
                   random_sphere_points, surface_to_off_text)
from .problems import (LpProblem, QpProblem, make_triangulation_problem,
                       solve_and_verify, triangulation_ea_config)
from .rng import RandomStream
from .simplicial import HalfSpacePolytope, read_points_csv
from . import operator_laws

log = logging.getLogger("evohull")


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_config(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _resolve_seeds(config: dict, override) -> list[int]:
    seeds = override if override else config.get("seeds")
    if not seeds:
        raise InvalidConfigError("at least one seed is required")
    return [int(s) for s in seeds]


def _resolve_out(config: dict, override) -> Path:
    out = override or config.get("out")
    if not out:
        raise InvalidConfigError("an output directory is required")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _instance_points(config: dict) -> np.ndarray:
    inst = config.get("instance") or {}
    if "points_csv" in inst:
        return read_points_csv(inst["points_csv"])
    if "points" in inst:
        return np.asarray(inst["points"], dtype=float)
    if "sphere_points" in inst:
        n = int(inst["sphere_points"])
        seed = int(inst.get("instance_seed", 0))
        return random_sphere_points(n, RandomStream(seed).substream("instance"))
    raise InvalidConfigError("instance needs points_csv, points, or sphere_points")


def cmd_hull_recover(config: dict, seeds, out: Path) -> int:
    points = _instance_points(config)
    tolerance = float(config.get("tolerance", FOUR_PI_TOL))
    factor = float(config.get("scramble_factor", 4.0))
    max_gens = int(config.get("max_generations", 500))
    polish = bool(config.get("polish", True))

    rows = []
    failed = False
    for seed in seeds:
        try:
            n_edges = 3 * len(points) - 6
            problem = make_triangulation_problem(points, round(factor * n_edges), seed)
        except InvalidProblemError as exc:
            raise InvalidProblemError(f"instance rejected: {exc}") from exc
        genome_length = int(config.get("genome_length") or n_edges)
        gene_values = int(config.get("gene_values") or (n_edges + 1))
        if config.get("ea"):
            ea_cfg = config_from_json(config["ea"])
        else:
            ea_cfg = triangulation_ea_config(genome_length, gene_values, max_gens)

        greedy_surface, trace = greedy_descent(problem.initial_mesh)
        greedy_match = is_convex_position_mesh(greedy_surface)
        rows.append([seed, "greedy", repr(trace.terminal_objective),
                     str(greedy_match).lower(), trace.move_count])
        log.info("seed %d greedy: objective %.9f, %d moves, hull-match %s",
                 seed, trace.terminal_objective, trace.move_count, greedy_match)

        report, record = solve_and_verify(problem, ea_cfg, seed,
                                          genome_length=genome_length,
                                          gene_values=gene_values,
                                          polish=polish, tolerance=tolerance)
        rows.append([seed, "ea", repr(report.achieved),
                     str(report.details["hull_match"]).lower(), report.generations])
        log.info("seed %d ea: l1 %.9f, %d generations, hull-match %s",
                 seed, report.achieved, report.generations, report.details["hull_match"])
        failed = failed or not report.passed

        from .encoding import decode as _decode
        from .problems import triangulation_pipeline
        pipe = triangulation_pipeline(problem, genome_length, gene_values, polish=polish)
        best_mesh = _decode(record.best_genotype, pipe.codec).surface()
        _write_atomic(out / f"ea_{seed}.off", surface_to_off_text(best_mesh))
        _write_atomic(out / f"greedy_{seed}.off", surface_to_off_text(greedy_surface))
        _write_atomic(out / f"report_{seed}.json", _dump_json(report.to_json_dict()))
        _write_atomic(out / f"runrecord_{seed}.json", _dump_json(record.to_json_dict()))

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed", "method", "terminal_objective", "hull_match", "moves_or_generations"])
    w.writerows(rows)
    _write_atomic(out / "summary.csv", buf.getvalue())
    return 1 if failed else 0


def _problem_from_config(doc: dict):
    kind = doc.get("type")
    feasible = HalfSpacePolytope(doc["normals"], doc["offsets"])
    if kind == "lp":
        return LpProblem(doc["cost"], feasible, doc.get("direction", "min"))
    if kind == "qp":
        return QpProblem(doc["quadratic"], doc["linear"], feasible,
                         float(doc.get("constant", 0.0)))
    raise InvalidConfigError(f"unknown problem type {kind!r}")


def default_optimize_config(max_generations: int = 500):
    from .ea_core import EAConfig, OperatorParams, TerminationCriteria
    return EAConfig(
        population_size=40,
        recombination=OperatorParams.make("uniform", probability=0.7),
        mutation=OperatorParams.make("flip", rate=0.03),
        selection=OperatorParams.make("tournament", k=3),
        elitism=True,
        termination=TerminationCriteria(max_generations=max_generations,
                                        stagnation_window=150))


def cmd_optimize(config: dict, seeds, out: Path) -> int:
    problem = _problem_from_config(config.get("problem") or {})
    bits = int(config.get("bits_per_dim", 16))
    tolerance = float(config.get("tolerance", 1e-3))
    max_gens = int(config.get("max_generations", 500))
    ea_cfg = config_from_json(config["ea"]) if config.get("ea") \
        else default_optimize_config(max_gens)

    rows = []
    failed = False
    for seed in seeds:
        report, record = solve_and_verify(problem, ea_cfg, seed,
                                          bits_per_dim=bits, tolerance=tolerance)
        rows.append([seed, repr(report.achieved), repr(report.oracle_value),
                     repr(report.gap), str(report.passed).lower()])
        log.info("seed %d: achieved %.9f oracle %.9f gap %.3e",
                 seed, report.achieved, report.oracle_value, report.gap)
        failed = failed or not report.passed
        _write_atomic(out / f"report_{seed}.json", _dump_json(report.to_json_dict()))
        _write_atomic(out / f"runrecord_{seed}.json", _dump_json(record.to_json_dict()))
        _write_atomic(out / f"generations_{seed}.csv", record.csv_text())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed", "achieved", "oracle", "gap", "passed"])
    w.writerows(rows)
    _write_atomic(out / "summary.csv", buf.getvalue())
    return 1 if failed else 0


def cmd_operator_laws(config: dict, seeds, out: Path) -> int:
    trials = int(config.get("trials", 1000))
    if trials < 1:
        raise InvalidConfigError("trial count must be >= 1")
    sabotage = config.get("sabotage")
    seed = seeds[0] if seeds else int(config.get("seed", 1))
    report = operator_laws.operator_law_report(trials, seed, sabotage=sabotage)
    _write_atomic(out / "operator_laws.json", _dump_json(report))
    if report["violations_total"]:
        broken = [k for k, v in report["violations"].items() if v]
        print(f"operator law violated: {', '.join(broken)}", file=sys.stderr)
        return 1
    return 0


def cmd_entropy_report(config: dict, seeds, out: Path) -> int:
    record_path = config.get("runrecord")
    if not record_path:
        raise InvalidConfigError("entropy-report needs a runrecord path")
    with open(record_path) as fh:       # missing file raises FileNotFoundError
        record = json.load(fh)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["generation", "shannon", "renyi2"])
    for g in record["generations"]:
        w.writerow([g["generation"], repr(g["shannon"]), repr(g["renyi2"])])
    _write_atomic(out / "entropy.csv", buf.getvalue())
    return 0


COMMANDS = {
    "hull-recover": cmd_hull_recover,
    "optimize": cmd_optimize,
    "operator-laws": cmd_operator_laws,
    "entropy-report": cmd_entropy_report,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="evohull",
                                     description="EA experiments over polytopes and triangulations")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON experiment configuration")
    parser.add_argument("--seed", type=int, action="append", default=None,
                        help="override config seeds (repeatable)")
    parser.add_argument("--out", default=None, help="override output directory")
    args = parser.parse_args(argv)

    level = os.environ.get("EVOHULL_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        config = _load_config(args.config)
        seeds = None
        if args.command != "entropy-report" or args.seed or config.get("seeds"):
            try:
                seeds = _resolve_seeds(config, args.seed)
            except InvalidConfigError:
                if args.command in ("hull-recover", "optimize"):
                    raise
                seeds = [int(config.get("seed", 1))]
        out = _resolve_out(config, args.out)
        return COMMANDS[args.command](config, seeds, out)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EvoHullError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
