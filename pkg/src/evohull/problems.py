"""Concrete optimization problems: LP/QP over polytopes and hull recovery.

Each problem supplies a codec, an objective, and an independent oracle, so
every EA result can be verified against ground truth computed by a
different route (vertex enumeration for LPs, a dense grid for QPs, the
brute-force hull oracle for triangulations).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import _fastmesh as fm
from .ea_core import EAConfig, FitnessPipeline, OperatorParams, TerminationCriteria, run_ea
from .encoding import Alphabet, Codec, Genotype, scaled_real_codec
from .errors import InvalidParamsError, InvalidProblemError
from .mesh import (FOUR_PI_TOL, SPHERE_TOTAL, TriSurface, is_convex_position_mesh,
                   l1_curvature, random_legal_scramble, surface_from_hull)
from .rng import RandomStream
from .simplicial import HalfSpacePolytope, convex_hull_oracle, enumerate_vertices, polytope_contains


@dataclass
class LpProblem:
    """min (or max) <cost, x> over a compact half-space intersection."""

    cost: np.ndarray
    feasible: HalfSpacePolytope
    direction: str = "min"

    def __post_init__(self):
        self.cost = np.asarray(self.cost, dtype=float)
        if self.direction not in ("min", "max"):
            raise InvalidProblemError(f"direction must be min or max, got {self.direction!r}")
        if self.cost.shape != (self.feasible.dimension,):
            raise InvalidProblemError("cost dimension does not match the feasible set")
        self._vertices = enumerate_vertices(self.feasible)   # raises if unbounded
        if not self._vertices:
            raise InvalidProblemError("feasible set is empty")

    @property
    def vertices(self):
        return self._vertices

    def value(self, x) -> float:
        return float(self.cost @ np.asarray(x, dtype=float))


@dataclass
class QpProblem:
    """min 0.5 x'Qx + <c, x> + constant over a compact polytope; Q PSD."""

    quadratic: np.ndarray
    linear: np.ndarray
    feasible: HalfSpacePolytope
    constant: float = 0.0

    def __post_init__(self):
        self.quadratic = np.asarray(self.quadratic, dtype=float)
        self.linear = np.asarray(self.linear, dtype=float)
        n = self.feasible.dimension
        if self.quadratic.shape != (n, n) or self.linear.shape != (n,):
            raise InvalidProblemError("quadratic/linear dimensions do not match")
        if np.abs(self.quadratic - self.quadratic.T).max() > 1e-12:
            raise InvalidProblemError("quadratic matrix is not symmetric")
        if np.linalg.eigvalsh(self.quadratic).min() < -1e-9:
            raise InvalidProblemError("quadratic matrix is not positive semidefinite")
        self._vertices = enumerate_vertices(self.feasible)
        if not self._vertices:
            raise InvalidProblemError("feasible set is empty")

    @property
    def vertices(self):
        return self._vertices

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.quadratic @ x + self.linear @ x + self.constant)


@dataclass
class TriangulationProblem:
    """Recover the hull of convex-position points from a scrambled start mesh."""

    points: np.ndarray
    initial_mesh: TriSurface

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        hull = convex_hull_oracle(self.points)
        interior = sorted(set(range(len(self.points))) - set(hull.hull_vertices))
        if interior:
            raise InvalidProblemError(
                f"points not in convex position: point {interior[0]} is interior")
        if set(self.initial_mesh.vertex_ids) != set(range(len(self.points))):
            raise InvalidProblemError("initial mesh must use vertex ids 0..n-1")
        self._hull = hull

    @property
    def hull(self):
        return self._hull


def make_triangulation_problem(points, scramble_moves: int, seed: int) -> TriangulationProblem:
    """Hull surface of `points`, scrambled by uniformly random legal swaps."""
    points = np.asarray(points, dtype=float)
    hull = convex_hull_oracle(points)
    start = surface_from_hull(points, hull)
    scrambled = random_legal_scramble(start, scramble_moves,
                                      RandomStream(seed).substream("scramble"))
    return TriangulationProblem(points, scrambled)


# --- LP / QP pipelines ---

def _bounding_box(vertices):
    V = np.array(vertices)
    return V.min(axis=0), V.max(axis=0)


def _violation(poly: HalfSpacePolytope, x) -> float:
    return float(np.maximum(poly.normals @ x - poly.offsets, 0.0).sum())


def _corner_scale(value_fn, lo, hi) -> float:
    corners = itertools.product(*zip(lo, hi))
    return max(abs(value_fn(np.array(c))) for c in corners)


def lp_pipeline(p: LpProblem, bits_per_dim: int, gray: bool = True) -> FitnessPipeline:
    """Binary strings -> the feasible set's bounding box, penalized outside.

    Infeasible decoded points pay rho * (sum of constraint violations) with
    rho = 1e3 * (1 + max |f| over the box corners), so the penalty dominates
    any in-box objective difference and feasible phenotypes score exactly f.
    """
    if bits_per_dim < 4:
        raise InvalidParamsError("bits_per_dim must be >= 4")
    lo, hi = _bounding_box(p.vertices)
    codec = scaled_real_codec(bits_per_dim, lo, hi, gray=gray)
    rho = 1e3 * (1.0 + _corner_scale(p.value, lo, hi))
    sign = 1.0 if p.direction == "min" else -1.0

    def objective(x) -> float:
        return p.value(x) + sign * rho * _violation(p.feasible, x)

    return FitnessPipeline(codec, objective, direction=p.direction)


def qp_pipeline(p: QpProblem, bits_per_dim: int, gray: bool = True) -> FitnessPipeline:
    """Same box codec and penalty scheme as lp_pipeline, quadratic objective."""
    if bits_per_dim < 4:
        raise InvalidParamsError("bits_per_dim must be >= 4")
    lo, hi = _bounding_box(p.vertices)
    codec = scaled_real_codec(bits_per_dim, lo, hi, gray=gray)
    rho = 1e3 * (1.0 + _corner_scale(p.value, lo, hi))

    def objective(x) -> float:
        return p.value(x) + rho * _violation(p.feasible, x)

    return FitnessPipeline(codec, objective, direction="min")


def analytic_lp_optimum(p: LpProblem) -> tuple[np.ndarray, float]:
    """Evaluate the cost on every enumerated vertex; ties to the lowest index."""
    values = [p.value(v) for v in p.vertices]
    if p.direction == "min":
        best = min(range(len(values)), key=lambda i: (values[i], i))
    else:
        best = min(range(len(values)), key=lambda i: (-values[i], i))
    return p.vertices[best], values[best]


def qp_oracle(p: QpProblem, resolution: float = 1e-3) -> tuple[np.ndarray, float]:
    """Unconstrained minimizer when feasible, else a dense grid scan (n <= 2)."""
    eigs = np.linalg.eigvalsh(p.quadratic)
    if eigs.min() > 1e-9:
        x_star = np.linalg.solve(p.quadratic, -p.linear)
        if polytope_contains(p.feasible, x_star):
            return x_star, p.value(x_star)
    n = p.feasible.dimension
    if n > 2:
        raise InvalidProblemError("grid oracle supports n <= 2")
    lo, hi = _bounding_box(p.vertices)
    axes = [np.arange(lo[d], hi[d] + resolution / 2, resolution) for d in range(n)]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    feas = np.all(grid @ p.feasible.normals.T <= p.feasible.offsets + 1e-9, axis=1)
    pts = np.vstack([grid[feas], np.array(p.vertices)])
    vals = 0.5 * np.einsum("ij,jk,ik->i", pts, p.quadratic, pts) + pts @ p.linear + p.constant
    best = int(np.argmin(vals))
    return pts[best], float(vals[best])


# --- triangulation pipeline ---

@dataclass
class DecodedMesh:
    """Swap-program phenotype: terminal mesh state in array form."""

    opp: np.ndarray
    pos: np.ndarray
    _surface: Optional[TriSurface] = field(default=None, repr=False)

    def surface(self) -> TriSurface:
        if self._surface is None:
            self._surface = fm.surface_from_opp(self.opp, self.pos)
        return self._surface


def triangulation_pipeline(p: TriangulationProblem, genome_length: Optional[int] = None,
                           gene_values: Optional[int] = None,
                           polish: bool = False) -> FitnessPipeline:
    """Swap-program pipeline: genes pick legal swaps, fitness scores the endpoint.

    Gene 0 is a no-op; gene g applies the ((g-1) mod n)-th edge of the current
    lexicographic legal-swap list. With polish=False the fitness is the plain
    L1 curvature of the terminal mesh. With polish=True every endpoint first
    descends (with two-swap escapes) on L1 + star-convexity severity and that
    penalized objective is the fitness; its floor is exactly 4*pi, attained
    only by convex hull triangulations, which removes the crumpled-immersion
    plateau of the raw L1 objective.
    """
    if genome_length is None:
        genome_length = 3 * p.initial_mesh.num_edges
    if genome_length < 1:
        raise InvalidParamsError("genome_length must be >= 1")
    if gene_values is None:
        gene_values = p.initial_mesh.num_edges + 1
    if gene_values < 2:
        raise InvalidParamsError("gene_values must be >= 2")

    program = fm.SwapProgram(p.initial_mesh,
                             l1_weight=1.0,
                             sev_weight=1.0 if polish else 0.0,
                             polish_moves=100000 if polish else 0)

    def decode_fn(g: Genotype) -> DecodedMesh:
        return DecodedMesh(program.decode_opp(g.symbols), program.pos)

    def objective(m: DecodedMesh) -> float:
        return program.objective_of_opp(m.opp)

    def phenotype_json(m: DecodedMesh):
        s = m.surface()
        return {"vertices": [list(map(float, s.coordinates[v])) for v in s.vertex_ids],
                "triangles": [list(t) for t in s.triangles]}

    codec = Codec(Alphabet(tuple(range(gene_values))), genome_length, decode_fn,
                  name=f"swap-program[{genome_length}]")
    return FitnessPipeline(codec, objective, direction="min",
                           phenotype_json=phenotype_json)


def triangulation_ea_config(genome_length: int, gene_values: int,
                            max_generations: int = 500,
                            population_size: int = 24,
                            offspring_size: int = 72) -> EAConfig:
    """EA settings that reliably recover hulls with the polished pipeline."""
    return EAConfig(
        population_size=population_size,
        offspring_size=offspring_size,
        recombination=OperatorParams.make("one-point", probability=0.5),
        mutation=OperatorParams.make("resample",
                                     rate=1.5 / genome_length,
                                     burst_prob=0.2,
                                     burst_rate=min(1.0, 12.0 / genome_length),
                                     zero_bias=0.3,
                                     alphabet_size=gene_values),
        selection=OperatorParams.make("truncation"),
        elitism=True,
        dedupe=True,
        termination=TerminationCriteria(max_generations=max_generations,
                                        target=SPHERE_TOTAL + FOUR_PI_TOL))


# --- run + verify ---

@dataclass
class VerificationReport:
    problem_kind: str
    achieved: float
    oracle_value: float
    gap: float
    tolerance: float
    passed: bool
    generations: int
    termination_reason: Optional[str]
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "problem_kind": self.problem_kind,
            "achieved": self.achieved,
            "oracle_value": self.oracle_value,
            "gap": self.gap,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "generations": self.generations,
            "termination_reason": self.termination_reason,
            "details": self.details,
        }


def solve_and_verify(problem, ea_config: EAConfig, seed: int,
                     bits_per_dim: int = 16,
                     genome_length: Optional[int] = None,
                     gene_values: Optional[int] = None,
                     polish: bool = True,
                     tolerance: Optional[float] = None):
    """Run the EA on a problem and compare the result with its oracle.

    Returns (VerificationReport, RunRecord).
    """
    if isinstance(problem, LpProblem):
        pipe = lp_pipeline(problem, bits_per_dim)
        record = run_ea(pipe, ea_config, seed)
        point, oracle_value = analytic_lp_optimum(problem)
        tol = 1e-3 if tolerance is None else tolerance
        gap = abs(record.best_fitness - oracle_value)
        report = VerificationReport(
            "lp", record.best_fitness, oracle_value, gap, tol, gap <= tol,
            record.generations_used, record.termination_reason,
            {"oracle_point": point.tolist(),
             "best_point": record.best_phenotype,
             "direction": problem.direction})
        return report, record

    if isinstance(problem, QpProblem):
        pipe = qp_pipeline(problem, bits_per_dim)
        record = run_ea(pipe, ea_config, seed)
        point, oracle_value = qp_oracle(problem)
        tol = 1e-3 if tolerance is None else tolerance
        gap = abs(record.best_fitness - oracle_value)
        report = VerificationReport(
            "qp", record.best_fitness, oracle_value, gap, tol, gap <= tol,
            record.generations_used, record.termination_reason,
            {"oracle_point": point.tolist(), "best_point": record.best_phenotype})
        return report, record

    if isinstance(problem, TriangulationProblem):
        pipe = triangulation_pipeline(problem, genome_length, gene_values, polish=polish)
        record = run_ea(pipe, ea_config, seed)
        from .encoding import decode as _decode
        best_mesh = _decode(record.best_genotype, pipe.codec).surface()
        l1 = l1_curvature(best_mesh)
        hull_match = is_convex_position_mesh(best_mesh)
        tol = FOUR_PI_TOL if tolerance is None else tolerance
        gap = l1 - SPHERE_TOTAL
        report = VerificationReport(
            "triangulation", l1, SPHERE_TOTAL, gap, tol,
            gap <= tol and hull_match,
            record.generations_used, record.termination_reason,
            {"hull_match": hull_match, "fitness": record.best_fitness})
        return report, record

    raise InvalidProblemError(f"unsupported problem type {type(problem).__name__}")
