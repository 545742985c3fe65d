"""Closed triangulated surfaces, edge swaps, and the curvature objective.

The optimization target is the L1 norm of discrete Gaussian curvature: the
sum over vertices of |2*pi - (incident triangle angles)|. Edge swapping
(replacing the shared diagonal of two adjacent triangles with the opposite
one) preserves V, E, F and the total signed curvature, and descending the
L1 objective drives a sphere-topology mesh toward the convex hull of its
vertex set.

The module keeps two representations: the immutable, validated
:class:`TriSurface` value, and a private swap engine that maintains angle
sums and the legal-swap list incrementally so long swap sequences (greedy
descent, genotype decoding, scrambling) stay cheap.
"""

from __future__ import annotations

import math
from bisect import insort
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DegenerateTriangleError,
    IllegalSwapError,
    InvalidInputError,
    NonManifoldError,
)
from .rng import RandomStream
from . import offio
from .simplicial import convex_hull_oracle, HullResult

TWO_PI = 2.0 * math.pi
SPHERE_TOTAL = 4.0 * math.pi
FOUR_PI_TOL = 1e-6   # acceptance tolerance on reaching the 4*pi optimum
AREA_EPS = 1e-12                   # minimal triangle area for swap legality
_CROSS2_EPS = (2.0 * AREA_EPS) ** 2  # squared twice-area threshold
_DESCENT_EPS = 1e-12               # minimal strict improvement accepted


def _undirected(u, v):
    return (u, v) if u < v else (v, u)


def _canon(tri):
    i, j, k = tri
    if i <= j and i <= k:
        return (i, j, k)
    if j <= i and j <= k:
        return (j, k, i)
    return (k, i, j)


def _cross2_mag(p, q, r):
    """Squared magnitude of (q-p) x (r-p); 4 * area^2."""
    ux, uy, uz = q[0] - p[0], q[1] - p[1], q[2] - p[2]
    vx, vy, vz = r[0] - p[0], r[1] - p[1], r[2] - p[2]
    cx = uy * vz - uz * vy
    cy = uz * vx - ux * vz
    cz = ux * vy - uy * vx
    return cx * cx + cy * cy + cz * cz


def _angle(p, q, r):
    """Angle at p in triangle (p, q, r)."""
    ux, uy, uz = q[0] - p[0], q[1] - p[1], q[2] - p[2]
    vx, vy, vz = r[0] - p[0], r[1] - p[1], r[2] - p[2]
    cx = uy * vz - uz * vy
    cy = uz * vx - ux * vz
    cz = ux * vy - uy * vx
    dot = ux * vx + uy * vy + uz * vz
    return math.atan2(math.sqrt(cx * cx + cy * cy + cz * cz), dot)


def _tri_angles(p, q, r):
    return _angle(p, q, r), _angle(q, r, p), _angle(r, p, q)


class TriSurface:
    """Closed, consistently oriented triangulated 2-manifold in E^3.

    Parameters
    ----------
    coordinates : mapping vertex id -> 3 coordinates. Mapping order fixes the
        canonical vertex order used by OFF output.
    triangles : iterable of oriented vertex triples.
    validate : check the closed-manifold invariants (default True).
    assert_sphere : additionally require Euler characteristic 2.
    """

    def __init__(self, coordinates: Mapping, triangles: Iterable, *,
                 validate: bool = True, assert_sphere: bool = False):
        self.vertex_ids = tuple(coordinates.keys())
        self.coordinates = {v: np.asarray(p, dtype=float) for v, p in coordinates.items()}
        self.triangles = tuple(tuple(int(i) for i in t) for t in triangles)
        self._opp_cache = None
        if validate:
            self._validate()
        if assert_sphere and self.euler_characteristic != 2:
            raise NonManifoldError(
                f"Euler characteristic {self.euler_characteristic}, expected 2 for a sphere")

    # -- structure --

    @property
    def num_vertices(self):
        return len(self.vertex_ids)

    @property
    def num_faces(self):
        return len(self.triangles)

    @property
    def num_edges(self):
        return (3 * len(self.triangles)) // 2

    @property
    def euler_characteristic(self):
        return self.num_vertices - self.num_edges + self.num_faces

    def opposite_map(self) -> dict:
        """Directed edge (u, v) -> third vertex of the face containing it."""
        if self._opp_cache is None:
            opp = {}
            for (i, j, k) in self.triangles:
                opp[(i, j)] = k
                opp[(j, k)] = i
                opp[(k, i)] = j
            self._opp_cache = opp
        return self._opp_cache

    def edges(self) -> list[tuple]:
        opp = self.opposite_map()
        return sorted({_undirected(u, v) for (u, v) in opp})

    def adjacency(self) -> dict:
        adj: dict = {v: set() for v in self.vertex_ids}
        for (u, v) in self.opposite_map():
            adj[u].add(v)
        return adj

    def _validate(self):
        ids = set(self.vertex_ids)
        if len(ids) != len(self.vertex_ids):
            raise NonManifoldError("duplicate vertex ids")
        opp = {}
        link_next: dict = {v: {} for v in self.vertex_ids}
        for t in self.triangles:
            i, j, k = t
            if len({i, j, k}) != 3:
                raise NonManifoldError(f"triangle {t} repeats a vertex")
            if not {i, j, k} <= ids:
                raise NonManifoldError(f"triangle {t} references unknown vertices")
            for (u, v, w) in ((i, j, k), (j, k, i), (k, i, j)):
                if (u, v) in opp:
                    raise NonManifoldError(f"directed edge {(u, v)} appears twice")
                opp[(u, v)] = w
                if v in link_next[u]:
                    raise NonManifoldError(f"vertex {u} has a non-manifold link")
                link_next[u][v] = w
        for (u, v) in opp:
            if (v, u) not in opp:
                raise NonManifoldError(f"edge {(u, v)} has no oppositely oriented twin")
        for v, succ in link_next.items():
            if not succ:
                raise NonManifoldError(f"vertex {v} is isolated")
            start = next(iter(succ))
            seen = 1
            cur = succ[start]
            while cur != start:
                if cur not in succ:
                    raise NonManifoldError(f"vertex {v} link is not a cycle")
                cur = succ[cur]
                seen += 1
                if seen > len(succ):
                    raise NonManifoldError(f"vertex {v} link is not a single cycle")
            if seen != len(succ):
                raise NonManifoldError(f"vertex {v} link splits into several cycles")
        self._opp_cache = opp

    def replace_faces(self, removed, added) -> "TriSurface":
        """New surface with `removed` faces substituted by `added`, order kept."""
        removed = [_canon(t) for t in removed]
        added = list(added)
        out = []
        for t in self.triangles:
            c = _canon(t)
            if c in removed:
                out.append(_canon(added[removed.index(c)]))
            else:
                out.append(t)
        return TriSurface(self.coordinates, out, validate=True)


# --- curvature ---

def _face_angles_checked(pos, tri):
    p, q, r = pos[tri[0]], pos[tri[1]], pos[tri[2]]
    if _cross2_mag(p, q, r) <= _CROSS2_EPS:
        raise DegenerateTriangleError(f"triangle {tri} is degenerate")
    return _tri_angles(p, q, r)


def _angle_sums(m: TriSurface) -> dict:
    pos = {v: tuple(p) for v, p in m.coordinates.items()}
    sums = {v: 0.0 for v in m.vertex_ids}
    for t in m.triangles:
        a0, a1, a2 = _face_angles_checked(pos, t)
        sums[t[0]] += a0
        sums[t[1]] += a1
        sums[t[2]] += a2
    return sums


def angle_deficit(m: TriSurface, v) -> float:
    """2*pi minus the incident triangle angles at v (discrete Gaussian curvature)."""
    if v not in m.coordinates:
        raise InvalidInputError(f"no vertex {v!r} in mesh")
    pos = {w: tuple(p) for w, p in m.coordinates.items()}
    total = 0.0
    for t in m.triangles:
        if v in t:
            angles = _face_angles_checked(pos, t)
            total += angles[t.index(v)]
    return TWO_PI - total


def l1_curvature(m: TriSurface) -> float:
    """Sum over vertices of |angle deficit|; 4*pi exactly at convex position."""
    return sum(abs(TWO_PI - s) for s in _angle_sums(m).values())


def total_signed_curvature(m: TriSurface) -> float:
    """Sum of signed angle deficits: 2*pi * Euler characteristic, any geometry."""
    return TWO_PI * m.num_vertices - sum(_angle_sums(m).values())


# --- edge swaps ---

@dataclass(frozen=True)
class SwapMove:
    """Replace the two faces at `edge` with the two on `diagonal`."""

    edge: tuple
    triangles: tuple   # the two oriented faces being removed
    diagonal: tuple


class _SwapEngine:
    """Mutable half-edge state with incremental curvature and legality.

    With fold_weight > 0 the engine also tracks, per vertex, whether the
    star is locally convex (every incident face plane supports the whole
    link), and its objective becomes l1 + fold_weight * (folded vertices).
    """

    def __init__(self, surface: TriSurface, fold_weight: float = 0.0):
        self.vertex_order = surface.vertex_ids
        self.pos = {v: tuple(p) for v, p in surface.coordinates.items()}
        self.opp: dict = {}
        self.face_angles: dict = {}
        self.angle_sum = {v: 0.0 for v in self.vertex_order}
        self.l1 = TWO_PI * len(self.vertex_order)   # empty state: every deficit is 2*pi
        for t in surface.triangles:
            i, j, k = t
            self.opp[(i, j)] = k
            self.opp[(j, k)] = i
            self.opp[(k, i)] = j
        for t in surface.triangles:
            self._add_face(_canon(t), checked=True)
        # legality state
        self.edge_pair: dict = {}
        self.pair_index: dict = {}
        self.legal: list = []
        self.legal_set: set = set()
        for e in sorted({_undirected(u, v) for (u, v) in self.opp}):
            self._register_edge(e)
        # fold (local-convexity) state
        self.fold_weight = float(fold_weight)
        self.neighbor_of = {}
        for (u, v) in self.opp:
            self.neighbor_of.setdefault(u, v)
        self.folded: set = set()
        if self.fold_weight > 0.0:
            for v in self.vertex_order:
                if not self._vertex_convex(v):
                    self.folded.add(v)

    def link_cycle(self, v) -> list:
        """Link vertices of v in face order."""
        start = self.neighbor_of[v]
        if (v, start) not in self.opp:          # stale hint; any current neighbor works
            start = next(w for (x, w) in self.opp if x == v)
            self.neighbor_of[v] = start
        cycle = [start]
        cur = self.opp[(v, start)]
        while cur != start:
            cycle.append(cur)
            cur = self.opp[(v, cur)]
        return cycle

    def _vertex_convex(self, v) -> bool:
        """True iff every incident face plane weakly supports the link of v."""
        pv = self.pos[v]
        cycle = self.link_cycle(v)
        rel = []
        for w in cycle:
            pw = self.pos[w]
            rel.append((pw[0] - pv[0], pw[1] - pv[1], pw[2] - pv[2]))
        k = len(rel)
        for i in range(k):
            ax, ay, az = rel[i]
            bx, by, bz = rel[(i + 1) % k]
            nx = ay * bz - az * by
            ny = az * bx - ax * bz
            nz = ax * by - ay * bx
            nn = math.sqrt(nx * nx + ny * ny + nz * nz)
            if nn <= 0.0:
                return False
            lim = 1e-9 * nn
            for j in range(k):
                cx, cy, cz = rel[j]
                if nx * cx + ny * cy + nz * cz > lim:
                    return False
        return True

    @property
    def objective(self) -> float:
        return self.l1 + self.fold_weight * len(self.folded)

    def fold_count(self) -> int:
        if self.fold_weight > 0.0:
            return len(self.folded)
        return sum(0 if self._vertex_convex(v) else 1 for v in self.vertex_order)

    # curvature bookkeeping

    def _bump(self, v, delta):
        s_old = self.angle_sum[v]
        s_new = s_old + delta
        self.angle_sum[v] = s_new
        self.l1 += abs(TWO_PI - s_new) - abs(TWO_PI - s_old)

    def _add_face(self, key, checked=False):
        if checked:
            angles = _face_angles_checked(self.pos, key)
        else:
            angles = _tri_angles(self.pos[key[0]], self.pos[key[1]], self.pos[key[2]])
        self.face_angles[key] = angles
        self._bump(key[0], angles[0])
        self._bump(key[1], angles[1])
        self._bump(key[2], angles[2])

    def _remove_face(self, key):
        angles = self.face_angles.pop(key)
        self._bump(key[0], -angles[0])
        self._bump(key[1], -angles[1])
        self._bump(key[2], -angles[2])

    # legality bookkeeping

    def _diagonal(self, e):
        return _undirected(self.opp[e], self.opp[(e[1], e[0])])

    def _is_legal(self, e):
        x, y = e
        p = self.opp[(x, y)]
        q = self.opp[(y, x)]
        if (p, q) in self.opp:
            return False
        pos = self.pos
        return (_cross2_mag(pos[p], pos[x], pos[q]) > _CROSS2_EPS
                and _cross2_mag(pos[q], pos[y], pos[p]) > _CROSS2_EPS)

    def _register_edge(self, e):
        pair = self._diagonal(e)
        self.edge_pair[e] = pair
        self.pair_index.setdefault(pair, set()).add(e)
        if self._is_legal(e):
            insort(self.legal, e)
            self.legal_set.add(e)

    def _drop_edge(self, e):
        pair = self.edge_pair.pop(e)
        self.pair_index[pair].discard(e)
        if e in self.legal_set:
            self.legal_set.discard(e)
            self.legal.remove(e)

    def _refresh_edge(self, e):
        old_pair = self.edge_pair[e]
        new_pair = self._diagonal(e)
        if new_pair != old_pair:
            self.pair_index[old_pair].discard(e)
            self.pair_index.setdefault(new_pair, set()).add(e)
            self.edge_pair[e] = new_pair
        legal_now = self._is_legal(e)
        if legal_now and e not in self.legal_set:
            insort(self.legal, e)
            self.legal_set.add(e)
        elif not legal_now and e in self.legal_set:
            self.legal_set.discard(e)
            self.legal.remove(e)

    # swaps

    def swap_delta(self, e) -> float:
        """L1 objective change if legal edge e were swapped; no mutation."""
        x, y = e
        opp = self.opp
        p = opp[(x, y)]
        q = opp[(y, x)]
        old1 = self.face_angles[_canon((x, y, p))]
        old2 = self.face_angles[_canon((y, x, q))]
        k1 = _canon((x, y, p))
        k2 = _canon((y, x, q))
        delta = {x: 0.0, y: 0.0, p: 0.0, q: 0.0}
        for key, angles in ((k1, old1), (k2, old2)):
            delta[key[0]] -= angles[0]
            delta[key[1]] -= angles[1]
            delta[key[2]] -= angles[2]
        pos = self.pos
        n1 = _tri_angles(pos[p], pos[x], pos[q])
        n2 = _tri_angles(pos[q], pos[y], pos[p])
        for verts, angles in (((p, x, q), n1), ((q, y, p), n2)):
            delta[verts[0]] += angles[0]
            delta[verts[1]] += angles[1]
            delta[verts[2]] += angles[2]
        out = 0.0
        sums = self.angle_sum
        for v, dv in delta.items():
            s = sums[v]
            out += abs(TWO_PI - s - dv) - abs(TWO_PI - s)
        return out

    def apply(self, e):
        """Swap legal edge e = (x, y); returns the move descriptor pieces."""
        x, y = e
        opp = self.opp
        p = opp[(x, y)]
        q = opp[(y, x)]
        self._remove_face(_canon((x, y, p)))
        self._remove_face(_canon((y, x, q)))
        del opp[(x, y)]
        del opp[(y, x)]
        opp[(p, x)] = q
        opp[(x, q)] = p
        opp[(q, y)] = p
        opp[(y, p)] = q
        opp[(p, q)] = y
        opp[(q, p)] = x
        self._add_face(_canon((p, x, q)))
        self._add_face(_canon((q, y, p)))

        e_new = _undirected(p, q)
        affected = set(self.pair_index.get(e, ()))
        affected.update(self.pair_index.get(e_new, ()))
        for quad_edge in ((p, x), (x, q), (q, y), (y, p)):
            affected.add(_undirected(*quad_edge))
        self._drop_edge(e)
        affected.discard(e)
        self._register_edge(e_new)
        affected.discard(e_new)
        for other in affected:
            self._refresh_edge(other)

        self.neighbor_of[x] = p
        self.neighbor_of[y] = q
        self.neighbor_of[p] = x
        self.neighbor_of[q] = y
        if self.fold_weight > 0.0:
            for v in (x, y, p, q):
                if self._vertex_convex(v):
                    self.folded.discard(v)
                else:
                    self.folded.add(v)
        return x, y, p, q

    def swap_objective_delta(self, e) -> float:
        """Objective change if legal edge e were swapped; no net mutation.

        Pure angle arithmetic when only l1 is tracked; with a fold penalty
        the swap is applied and reverted (swapping the new diagonal undoes
        the move exactly).
        """
        if self.fold_weight == 0.0:
            return self.swap_delta(e)
        before = self.objective
        x, y, p, q = self.apply(e)
        after = self.objective
        self.apply(_undirected(p, q))
        return after - before

    def to_surface(self) -> TriSurface:
        coords = {v: self.pos[v] for v in self.vertex_order}
        return TriSurface(coords, sorted(self.face_angles), validate=False)


def _move_from_state(x, y, p, q) -> SwapMove:
    return SwapMove(edge=_undirected(x, y),
                    triangles=(_canon((x, y, p)), _canon((y, x, q))),
                    diagonal=_undirected(p, q))


def legal_swaps(m: TriSurface) -> list[SwapMove]:
    """All edges whose swap keeps the mesh a valid closed surface.

    A swap is legal iff the opposite vertices are not already joined by an
    edge and both replacement triangles have area above AREA_EPS.
    """
    engine = _SwapEngine(m)
    moves = []
    for e in engine.legal:
        x, y = e
        p = engine.opp[(x, y)]
        q = engine.opp[(y, x)]
        moves.append(_move_from_state(x, y, p, q))
    return moves


def swap_edge(m: TriSurface, move: SwapMove) -> TriSurface:
    """Apply one edge swap; V, E, F are unchanged and all invariants kept."""
    u, v = move.edge
    opp = m.opposite_map()
    if (u, v) not in opp or (v, u) not in opp:
        raise IllegalSwapError(f"edge {move.edge} not present")
    p, q = opp[(u, v)], opp[(v, u)]
    if _undirected(p, q) != tuple(move.diagonal):
        raise IllegalSwapError(f"move diagonal {move.diagonal} is stale for edge {move.edge}")
    if (p, q) in opp or (q, p) in opp:
        raise IllegalSwapError(f"diagonal {move.diagonal} already an edge")
    pos = {w: tuple(c) for w, c in m.coordinates.items()}
    if (_cross2_mag(pos[p], pos[u], pos[q]) <= _CROSS2_EPS
            or _cross2_mag(pos[q], pos[v], pos[p]) <= _CROSS2_EPS):
        raise IllegalSwapError(f"swap of {move.edge} creates a degenerate triangle")
    return m.replace_faces([(u, v, p), (v, u, q)], [(p, u, q), (q, v, p)])


# --- greedy descent ---

@dataclass(frozen=True)
class DescentTrace:
    """Accepted moves with the objective before/after each one."""

    steps: tuple
    terminal_objective: float

    @property
    def move_count(self) -> int:
        return len(self.steps)

    def strictly_decreasing(self) -> bool:
        return all(after < before for _, before, after in self.steps)

    def csv_text(self) -> str:
        lines = ["step,edge,objective"]
        for i, (move, _, after) in enumerate(self.steps):
            lines.append(f"{i},{move.edge[0]}-{move.edge[1]},{after!r}")
        return "\n".join(lines) + "\n"


DEFAULT_FOLD_WEIGHT = 1.0


def fold_count(m: TriSurface) -> int:
    """Number of vertices whose star is not locally convex."""
    return _SwapEngine(m).fold_count()


def tightness_objective(m: TriSurface, fold_weight: float = DEFAULT_FOLD_WEIGHT) -> float:
    """L1 curvature plus a penalty per folded vertex star.

    The pure L1 objective is minimized (at exactly 4*pi) by every mesh whose
    angle deficits are all nonnegative, and swap sequences reach many such
    crumpled, self-intersecting configurations. Penalizing folded stars
    removes the degeneracy: a consistently oriented closed surface that is
    locally convex at every vertex bounds a convex body, so the only
    zero-penalty minimizers are convex hull triangulations.
    """
    return l1_curvature(m) + fold_weight * fold_count(m)


def greedy_descent(m: TriSurface, policy: str = "best-improvement",
                   objective: str = "l1",
                   fold_weight: float = DEFAULT_FOLD_WEIGHT):
    """Swap edges downhill until no swap decreases the objective.

    best-improvement applies the largest decrease each step (ties to the
    lowest edge), first-improvement the first decreasing edge in sorted
    order. The objective is the plain L1 curvature by default, or
    "tightness" for the fold-penalized variant. Returns (surface, trace).
    """
    if policy not in ("best-improvement", "first-improvement"):
        raise InvalidInputError(f"unknown descent policy {policy!r}")
    if objective not in ("l1", "tightness"):
        raise InvalidInputError(f"unknown descent objective {objective!r}")
    engine = _SwapEngine(m, fold_weight if objective == "tightness" else 0.0)
    steps = []
    while True:
        chosen = None
        if policy == "best-improvement":
            best_delta = -_DESCENT_EPS
            for e in engine.legal:
                d = engine.swap_objective_delta(e)
                if d < best_delta:
                    best_delta = d
                    chosen = e
        else:
            for e in engine.legal:
                if engine.swap_objective_delta(e) < -_DESCENT_EPS:
                    chosen = e
                    break
        if chosen is None:
            break
        before = engine.objective
        x, y, p, q = engine.apply(chosen)
        steps.append((_move_from_state(x, y, p, q), before, engine.objective))
    result = engine.to_surface()
    terminal = l1_curvature(result)
    if objective == "tightness":
        terminal += fold_weight * fold_count(result)
    return result, DescentTrace(tuple(steps), terminal)


# --- convexity and tightness ---

def is_convex_position_mesh(m: TriSurface, tol: float = 1e-9) -> bool:
    """True iff the mesh is exactly the convex hull surface of its vertices."""
    ids = list(m.vertex_ids)
    points = np.array([m.coordinates[v] for v in ids])
    hull = convex_hull_oracle(points)
    if set(hull.hull_vertices) != set(range(len(ids))):
        return False
    oracle_tris_local = {frozenset(f.indices) for f in hull.facets}
    mesh_tris_local = {frozenset(ids.index(v) for v in t) for t in m.triangles}
    if mesh_tris_local == oracle_tris_local:
        return True
    # Coplanar hull faces admit several triangulations: accept the mesh if
    # every triangle lies inside one face plane and the total area matches.
    plane_sets = [set(pl.on_plane) for pl in hull.planes]
    for t in mesh_tris_local:
        if not any(t <= s for s in plane_sets):
            return False
    mesh_area = sum(math.sqrt(_cross2_mag(*(tuple(points[i]) for i in tri))) / 2.0
                    for tri in (tuple(t) for t in mesh_tris_local))
    oracle_area = sum(math.sqrt(_cross2_mag(*(tuple(points[i]) for i in f.indices))) / 2.0
                      for f in hull.facets)
    scale = max(1.0, oracle_area)
    return abs(mesh_area - oracle_area) <= tol * scale


def is_tight_2surface(m: TriSurface, directions: int, seed: int = 0) -> bool:
    """Sampled tightness: every half-space must cut out a connected piece.

    For each random direction the vertex set strictly above each separating
    threshold must induce a connected subgraph. Convex surfaces always pass;
    a surface with a deep dent fails for some direction.
    """
    if directions < 1:
        raise InvalidInputError("directions must be >= 1")
    ids = list(m.vertex_ids)
    index = {v: i for i, v in enumerate(ids)}
    X = np.array([m.coordinates[v] for v in ids])
    adj = [[] for _ in ids]
    for (u, v) in m.opposite_map():
        adj[index[u]].append(index[v])
    rng = RandomStream(seed).substream("tightness")
    nv = len(ids)
    for _ in range(directions):
        d = rng.normal(size=3)
        norm = float(np.linalg.norm(d))
        if norm < 1e-12:
            continue
        proj = X @ (d / norm)
        levels = np.unique(proj)
        for t in (levels[:-1] + levels[1:]) / 2.0:
            above = [i for i in range(nv) if proj[i] > t]
            if len(above) <= 1:
                continue
            mask = set(above)
            stack = [above[0]]
            seen = {above[0]}
            while stack:
                cur = stack.pop()
                for nb in adj[cur]:
                    if nb in mask and nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            if len(seen) != len(above):
                return False
    return True


# --- construction helpers ---

def surface_from_hull(points, hull: HullResult) -> TriSurface:
    """Convex-position surface from the oracle's canonical facet triangles."""
    points = np.asarray(points, dtype=float)
    coords = {int(i): points[i] for i in hull.hull_vertices}
    return TriSurface(coords, [f.indices for f in hull.facets], assert_sphere=True)


def random_sphere_points(n: int, rng: RandomStream) -> np.ndarray:
    """n points sampled uniformly on the unit sphere."""
    pts = rng.normal(size=(n, 3))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def random_convex_surface(n: int, rng: RandomStream) -> TriSurface:
    """Hull surface of n uniform sphere points (all in convex position)."""
    pts = random_sphere_points(n, rng)
    return surface_from_hull(pts, convex_hull_oracle(pts))


def random_legal_scramble(m: TriSurface, moves: int, rng: RandomStream) -> TriSurface:
    """Apply `moves` uniformly chosen legal swaps; stops early if none remain."""
    engine = _SwapEngine(m)
    for _ in range(moves):
        if not engine.legal:
            break
        engine.apply(engine.legal[rng.choice_index(len(engine.legal))])
    return engine.to_surface()


# --- OFF interface ---

def surface_to_off_text(m: TriSurface) -> str:
    index = {v: i for i, v in enumerate(m.vertex_ids)}
    verts = [m.coordinates[v] for v in m.vertex_ids]
    faces = [tuple(index[v] for v in t) for t in m.triangles]
    return offio.off_text(verts, faces)


def surface_from_off_text(text: str, **kwargs) -> TriSurface:
    verts, faces = offio.parse_off(text)
    return TriSurface({i: p for i, p in enumerate(verts)}, faces, **kwargs)


def write_surface_off(m: TriSurface, path) -> None:
    with open(path, "w") as fh:
        fh.write(surface_to_off_text(m))


def read_surface_off(path, **kwargs) -> TriSurface:
    with open(path) as fh:
        return surface_from_off_text(fh.read(), **kwargs)
