"""evohull: seed-reproducible evolutionary search over encoded spaces,
with a simplicial-geometry engine for curvature-driven convex hull recovery."""

from .encoding import (Alphabet, BINARY, Codec, Genotype, Partition,
                       binary_integer_codec, decode, encode, gray_codec,
                       induce_partition, load_codec, renyi2_entropy,
                       scaled_real_codec, shannon_entropy, verify_bijection,
                       verify_partition)
from .ea_core import (EAConfig, FitnessPipeline, GenerationStats, OperatorParams,
                      Population, RunRecord, TerminationCriteria, evaluate,
                      initialize, mutate, recombine, run_ea, select,
                      should_terminate, termination_reason)
from .simplicial import (AbstractComplex, Facet, GeometricComplex, HalfSpacePolytope,
                         HullResult, Simplex, convex_hull_oracle, enumerate_vertices,
                         is_simplicial_map, join, polytope_contains, scheme,
                         stellar_subdivide)
from .mesh import (DescentTrace, SwapMove, TriSurface, angle_deficit, fold_count,
                   greedy_descent, is_convex_position_mesh, is_tight_2surface,
                   l1_curvature, legal_swaps, random_convex_surface,
                   random_legal_scramble, random_sphere_points, read_surface_off,
                   surface_from_hull, surface_from_off_text, surface_to_off_text,
                   swap_edge, tightness_objective, total_signed_curvature,
                   write_surface_off)
from .problems import (LpProblem, QpProblem, TriangulationProblem, VerificationReport,
                       analytic_lp_optimum, lp_pipeline, make_triangulation_problem,
                       qp_oracle, qp_pipeline, solve_and_verify,
                       triangulation_ea_config, triangulation_pipeline)
from .rng import RandomStream

__version__ = "0.1.0"
