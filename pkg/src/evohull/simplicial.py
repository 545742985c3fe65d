"""Simplices, abstract complexes, half-space polytopes, and the hull oracle.

The convex-hull construction here is deliberately brute force: a candidate
facet is kept iff every input point lies weakly on its inner side. It is the
ground truth that the fast mesh machinery is tested against, never a
performance path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateInputError,
    InvalidApexError,
    InvalidInputError,
    NotInGeneralPositionError,
    UnboundedFeasibleSetError,
)

SIDE_TOL = 1e-9     # sidedness tolerance against unit normals
MERGE_TOL = 1e-7    # coincident-point merge radius for vertex enumeration


# --- complexes ---

@dataclass(frozen=True)
class Simplex:
    """Set of distinct point identifiers; dimension = |vertices| - 1."""

    vertices: frozenset

    def __init__(self, vertices: Iterable):
        object.__setattr__(self, "vertices", frozenset(vertices))
        if not self.vertices:
            raise InvalidInputError("simplex needs at least one vertex")

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def faces(self) -> Iterable["Simplex"]:
        """All nonempty subsets, the simplex itself included."""
        vs = sorted(self.vertices)
        for r in range(1, len(vs) + 1):
            for combo in itertools.combinations(vs, r):
                yield Simplex(combo)


@dataclass(frozen=True)
class AbstractComplex:
    """Finite simplex system closed under taking faces."""

    simplices: frozenset

    @staticmethod
    def from_maximal(maximal: Iterable[Simplex]) -> "AbstractComplex":
        closed = set()
        for s in maximal:
            closed.update(s.faces())
        return AbstractComplex(frozenset(closed))

    @property
    def vertices(self) -> frozenset:
        out = set()
        for s in self.simplices:
            out.update(s.vertices)
        return frozenset(out)

    def simplices_of_dim(self, d: int) -> list[Simplex]:
        return sorted((s for s in self.simplices if s.dimension == d),
                      key=lambda s: tuple(sorted(s.vertices)))

    def contains(self, s: Simplex) -> bool:
        return s in self.simplices

    def is_face_closed(self) -> bool:
        return all(f in self.simplices for s in self.simplices for f in s.faces())


def _affinely_independent(points: np.ndarray, tol: float = 1e-9) -> bool:
    if len(points) <= 1:
        return True
    diffs = points[1:] - points[0]
    scale = max(1.0, float(np.abs(diffs).max()))
    sv = np.linalg.svd(diffs, compute_uv=False)
    return len(points) - 1 <= points.shape[1] and bool(sv.min() > tol * scale)


@dataclass
class GeometricComplex:
    """Abstract complex realized by coordinates; simplices affinely independent."""

    coordinates: dict
    complex: AbstractComplex

    def __post_init__(self):
        self.coordinates = {v: np.asarray(p, dtype=float) for v, p in self.coordinates.items()}
        for s in self.complex.simplices:
            if s.dimension >= 1:
                pts = np.array([self.coordinates[v] for v in sorted(s.vertices)])
                if not _affinely_independent(pts):
                    raise DegenerateInputError(
                        f"simplex {sorted(s.vertices)} is affinely dependent")


def scheme(gc: GeometricComplex) -> AbstractComplex:
    """Forget coordinates; keep the simplex system exactly."""
    return gc.complex


def join(s1: Simplex, s2: Simplex, coordinates: Mapping) -> GeometricComplex:
    """Join of two simplices in general position: the simplex on their union."""
    union = sorted(s1.vertices | s2.vertices)
    pts = np.array([np.asarray(coordinates[v], dtype=float) for v in union])
    if not _affinely_independent(pts):
        raise NotInGeneralPositionError(
            f"vertex union {union} is affinely dependent")
    comp = AbstractComplex.from_maximal([Simplex(union)])
    return GeometricComplex({v: coordinates[v] for v in union}, comp)


def _barycentric(point: np.ndarray, simplex_points: np.ndarray) -> np.ndarray | None:
    """Barycentric coordinates of `point` in the affine span, or None if off-span."""
    base = simplex_points[0]
    A = (simplex_points[1:] - base).T          # (n, k)
    if A.size == 0:
        return np.array([1.0]) if np.allclose(point, base, atol=1e-9) else None
    sol, res, rank, _ = np.linalg.lstsq(A, point - base, rcond=None)
    if not np.allclose(A @ sol, point - base, atol=1e-9):
        return None
    return np.concatenate([[1.0 - sol.sum()], sol])


def stellar_subdivide(gc: GeometricComplex, target: Simplex, apex) -> GeometricComplex:
    """Subdivide the star of `target` at an interior apex point.

    Every simplex containing `target` is replaced by its joins with the new
    apex vertex; the underlying point set |K| is unchanged.
    """
    if not gc.complex.contains(target):
        raise InvalidInputError(f"target {sorted(target.vertices)} not in complex")
    apex = np.asarray(apex, dtype=float)
    tgt_pts = np.array([gc.coordinates[v] for v in sorted(target.vertices)])
    bary = _barycentric(apex, tgt_pts)
    if bary is None or np.any(bary <= 1e-9):
        raise InvalidApexError("apex is not in the relative interior of the target")

    apex_id = max(gc.coordinates) + 1
    star = [s for s in gc.complex.simplices if target.vertices <= s.vertices]
    kept = [s for s in gc.complex.simplices if not target.vertices <= s.vertices]

    new_maximal = []
    tverts = sorted(target.vertices)
    proper_faces = [frozenset()] + [
        frozenset(c) for r in range(1, len(tverts))
        for c in itertools.combinations(tverts, r)]
    for s in star:
        rest = s.vertices - target.vertices
        for f in proper_faces:
            new_maximal.append(Simplex(f | rest | {apex_id}))
    closed = AbstractComplex.from_maximal(new_maximal + [Simplex(s.vertices) for s in kept])
    coords = dict(gc.coordinates)
    coords[apex_id] = apex
    return GeometricComplex(coords, closed)


def is_simplicial_map(vertex_map: Mapping, K: AbstractComplex, L: AbstractComplex) -> bool:
    """True iff the image of every simplex of K is a simplex of L."""
    for v in K.vertices:
        if v not in vertex_map:
            raise InvalidInputError(f"vertex map not total: missing {v!r}")
    for s in K.simplices:
        image = Simplex(vertex_map[v] for v in s.vertices)
        if not L.contains(image):
            return False
    return True


# --- convex hull oracle ---

@dataclass(frozen=True)
class Facet:
    """Hull facet: vertex-id tuple (pair in E^2, oriented triple in E^3)."""

    indices: tuple
    normal: tuple


@dataclass(frozen=True)
class FacetPlane:
    """A maximal coplanar hull face before canonical triangulation."""

    ring: tuple          # polygon vertex ids in outward-CCW order (segment endpoints in E^2)
    normal: tuple
    offset: float
    on_plane: tuple      # all input ids lying on the plane, extreme or not


@dataclass(frozen=True)
class HullResult:
    hull_vertices: tuple
    facets: tuple        # of Facet
    planes: tuple        # of FacetPlane


def _hull_ring_2d(pts2: np.ndarray, ids: Sequence[int]) -> list[int]:
    """Strict-turn monotone chain; CCW ring of ids, collinear midpoints dropped."""
    order = sorted(range(len(ids)), key=lambda i: (pts2[i, 0], pts2[i, 1], ids[i]))

    def cross(o, a, b):
        return ((pts2[a, 0] - pts2[o, 0]) * (pts2[b, 1] - pts2[o, 1])
                - (pts2[a, 1] - pts2[o, 1]) * (pts2[b, 0] - pts2[o, 0]))

    def chain(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], i) <= 1e-18:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    ring = lower[:-1] + upper[:-1]
    return [ids[i] for i in ring]


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal (u, v) with cross(u, v) = normal."""
    a = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(a, normal)
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    return u, v


def convex_hull_oracle(points) -> HullResult:
    """Brute-force convex hull in E^2 or E^3.

    A candidate facet (pair in E^2, triple in E^3) is a hull facet iff all
    points lie weakly on one side of its affine span (tolerance SIDE_TOL
    against the unit normal). Coplanar faces are merged and fan-triangulated
    from their lowest-index vertex, so the facet list is deterministic.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] not in (2, 3):
        raise InvalidInputError("points must be an (m, 2) or (m, 3) array")
    m, n = P.shape
    if m < n + 1 or not _affinely_independent_full(P, n):
        raise DegenerateInputError(f"need >= {n + 1} affinely independent points in E^{n}")

    if n == 2:
        planes = _support_planes_2d(P)
    else:
        planes = _support_planes_3d(P)

    facet_planes = []
    facets = []
    hull_vertices: set = set()
    for normal, offset, on_ids in planes:
        on = list(on_ids)
        if n == 2:
            d = P[on] @ _perp2(normal)
            lo = on_ids[int(np.argmin(d))]
            hi = on_ids[int(np.argmax(d))]
            ring = (lo, hi)
            tri_list = [ring]
        else:
            u, v = _plane_basis(normal)
            pts2 = np.column_stack([P[on] @ u, P[on] @ v])
            ring = tuple(_hull_ring_2d(pts2, list(on_ids)))
            start = ring.index(min(ring))
            ring = ring[start:] + ring[:start]
            tri_list = [(ring[0], ring[i], ring[i + 1]) for i in range(1, len(ring) - 1)]
        nt = tuple(float(x) for x in normal)
        facet_planes.append(FacetPlane(ring, nt, float(offset), tuple(on_ids)))
        facets.extend(Facet(t, nt) for t in tri_list)
        hull_vertices.update(ring)

    return HullResult(tuple(sorted(hull_vertices)), tuple(facets), tuple(facet_planes))


def _affinely_independent_full(P: np.ndarray, n: int) -> bool:
    diffs = P[1:] - P[0]
    return np.linalg.matrix_rank(diffs, tol=1e-12) >= n


def _perp2(normal) -> np.ndarray:
    # CCW tangent for outward normal
    return np.array([-normal[1], normal[0]])


def _support_planes_2d(P: np.ndarray):
    m = len(P)
    pairs = list(itertools.combinations(range(m), 2))
    seen: dict = {}
    for i, j in pairs:
        e = P[j] - P[i]
        ln = np.linalg.norm(e)
        if ln < 1e-12:
            continue
        nrm = np.array([e[1], -e[0]]) / ln
        d = P @ nrm - float(P[i] @ nrm)
        if d.max() <= SIDE_TOL:
            pass
        elif d.min() >= -SIDE_TOL:
            nrm, d = -nrm, -d
        else:
            continue
        on = tuple(int(k) for k in np.flatnonzero(np.abs(d) <= SIDE_TOL))
        if on not in seen:
            seen[on] = (nrm, float(P[i] @ nrm))
    return [(nrm, off, on) for on, (nrm, off) in sorted(seen.items())]


def _support_planes_3d(P: np.ndarray):
    m = len(P)
    idx = np.array(list(itertools.combinations(range(m), 3)))
    a, b, c = P[idx[:, 0]], P[idx[:, 1]], P[idx[:, 2]]
    normals = np.cross(b - a, c - a)
    lens = np.linalg.norm(normals, axis=1)
    edge_scale = np.maximum(np.linalg.norm(b - a, axis=1) * np.linalg.norm(c - a, axis=1), 1e-30)
    valid = lens > 1e-12 * edge_scale
    seen: dict = {}
    normals_unit = np.zeros_like(normals)
    normals_unit[valid] = normals[valid] / lens[valid, None]
    # distances of every point to every candidate plane
    D = normals_unit @ P.T - np.einsum("ij,ij->i", normals_unit, a)[:, None]
    upper = D.max(axis=1) <= SIDE_TOL
    lower = D.min(axis=1) >= -SIDE_TOL
    for t in np.flatnonzero(valid & (upper | lower)):
        nrm = normals_unit[t]
        d = D[t]
        if not upper[t]:
            nrm, d = -nrm, -d
        on = tuple(int(k) for k in np.flatnonzero(np.abs(d) <= SIDE_TOL))
        if on not in seen:
            seen[on] = (nrm, float(nrm @ a[t]))
    return [(nrm, off, on) for on, (nrm, off) in sorted(seen.items())]


# --- half-space polytopes ---

@dataclass
class HalfSpacePolytope:
    """Intersection of closed half-spaces <a_i, x> <= b_i."""

    normals: np.ndarray
    offsets: np.ndarray

    def __init__(self, normals, offsets):
        self.normals = np.asarray(normals, dtype=float)
        self.offsets = np.asarray(offsets, dtype=float)
        if self.normals.ndim != 2 or len(self.normals) != len(self.offsets):
            raise InvalidInputError("need an (m, n) normal matrix and m offsets")

    @property
    def dimension(self) -> int:
        return self.normals.shape[1]

    @staticmethod
    def box(lo, hi) -> "HalfSpacePolytope":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        n = len(lo)
        eye = np.eye(n)
        return HalfSpacePolytope(np.vstack([eye, -eye]), np.concatenate([hi, -lo]))


def polytope_contains(p: HalfSpacePolytope, x, tol: float = SIDE_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dimension,):
        raise InvalidInputError(f"point dimension {x.shape} != polytope dimension {p.dimension}")
    return bool(np.all(p.normals @ x <= p.offsets + tol))


def _basic_solutions(normals: np.ndarray, offsets: np.ndarray) -> list[np.ndarray]:
    """Feasible intersections of n-subsets of the constraint planes, deduplicated."""
    m, n = normals.shape
    out: list[np.ndarray] = []
    for subset in itertools.combinations(range(m), n):
        A = normals[list(subset)]
        b = offsets[list(subset)]
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            continue
        if not np.allclose(A @ x, b, atol=1e-7):
            continue
        if np.all(normals @ x <= offsets + SIDE_TOL):
            if not any(np.linalg.norm(x - y) < MERGE_TOL for y in out):
                out.append(x)
    return out


def enumerate_vertices(p: HalfSpacePolytope) -> list[np.ndarray]:
    """Brute-force extreme points of a compact polytope (n <= 3).

    Every n-subset of the inequalities is solved; feasible, nondegenerate
    solutions are merged within MERGE_TOL. Raises on unbounded input
    (nontrivial recession cone) before enumerating.
    """
    n = p.dimension
    if n > 3:
        raise InvalidInputError("vertex enumeration supports n <= 3 only")
    # Recession cone {d : A d <= 0}, boxed to keep it enumerable: any nonzero
    # vertex of the boxed cone is an unbounded direction.
    box = HalfSpacePolytope.box([-1.0] * n, [1.0] * n)
    cone_normals = np.vstack([p.normals, box.normals])
    cone_offsets = np.concatenate([np.zeros(len(p.normals)), box.offsets])
    for d in _basic_solutions(cone_normals, cone_offsets):
        if np.linalg.norm(d, ord=np.inf) > MERGE_TOL:
            raise UnboundedFeasibleSetError(
                f"feasible set is unbounded along direction {d.tolist()}")
    verts = _basic_solutions(p.normals, p.offsets)
    return sorted(verts, key=lambda v: tuple(v))


# --- point-set CSV ---

def points_csv_text(points) -> str:
    lines = [",".join(repr(float(c)) for c in pt) for pt in np.asarray(points, dtype=float)]
    return "\n".join(lines) + "\n"


def parse_points_csv(text: str) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([float(c) for c in line.split(",")])
    if not rows:
        raise InvalidInputError("no points in CSV input")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() not in (2, 3):
        raise InvalidInputError("each CSV line must have 2 or 3 coordinates")
    return np.array(rows, dtype=float)


def read_points_csv(path) -> np.ndarray:
    with open(path) as fh:
        return parse_points_csv(fh.read())


def write_points_csv(points, path) -> None:
    with open(path, "w") as fh:
        fh.write(points_csv_text(points))
