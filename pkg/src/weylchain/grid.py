"""Periodic sampling lattices on the d-torus and oriented sphere meshes.

Angles live in [0, 2pi) with wraparound; a grid vertex m has angle
2*pi*m_i/n_i on axis i.  Sphere meshes are closed oriented simplicial
(d-1)-spheres used to enclose band crossings: an icosahedron seed for
d=3 and the boundary of the cross-polytope for d=4,5, refined by midpoint
(d=3) or barycentric (d=4,5) subdivision with vertices projected back to
the metric sphere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

TAU = 2.0 * math.pi

SUPPORTED_DIMENSIONS = (3, 4, 5)


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic lattice on T^d."""

    d: int
    n_per_axis: tuple[int, ...]

    def __post_init__(self):
        if self.d not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"unsupported dimension {self.d}; expected one of {SUPPORTED_DIMENSIONS}")
        if len(self.n_per_axis) != self.d:
            raise ValueError("n_per_axis length must equal d")
        if any(n < 4 for n in self.n_per_axis):
            raise ValueError("every axis needs at least 4 samples")
        object.__setattr__(self, "n_per_axis", tuple(int(n) for n in self.n_per_axis))

    @property
    def steps(self) -> np.ndarray:
        return TAU / np.asarray(self.n_per_axis, dtype=float)

    @property
    def num_vertices(self) -> int:
        return int(np.prod(self.n_per_axis))

    def wrap_index(self, m) -> tuple[int, ...]:
        return tuple(int(mi) % ni for mi, ni in zip(m, self.n_per_axis))

    def angle(self, m) -> np.ndarray:
        """Angle coordinates of the (wrapped) vertex m, exactly 2*pi*m_i/n_i."""
        m = self.wrap_index(m)
        return np.array([TAU * mi / ni for mi, ni in zip(m, self.n_per_axis)])

    def vertices(self):
        """Deterministic row-major iteration over vertex index tuples."""
        return np.ndindex(*self.n_per_axis)

    def vertex_angles(self) -> np.ndarray:
        """All vertex angles, shape (num_vertices, d), in vertices() order."""
        axes = [TAU * np.arange(n) / n for n in self.n_per_axis]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def wrap_angle(self, k: np.ndarray) -> np.ndarray:
        return np.mod(k, TAU)


def make_grid(d: int, n_per_axis) -> TorusGrid:
    """Build a periodic sampling grid; rejects d outside {3,4,5} and n < 4."""
    return TorusGrid(d, tuple(n_per_axis))


def torus_delta(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Shortest wrapped angle difference p-q, componentwise in (-pi, pi]."""
    delta = np.mod(np.asarray(p) - np.asarray(q) + math.pi, TAU) - math.pi
    return delta


def torus_distance(p, q) -> float:
    return float(np.linalg.norm(torus_delta(p, q)))


# ---------------------------------------------------------------------------
# Sphere meshes


@dataclass(frozen=True)
class SphereMesh:
    """Closed oriented simplicial (d-1)-sphere around a point of T^d.

    ``unit_vertices`` are unit vectors in the covering chart; actual sample
    positions are center + radius * unit_vertices.  Every simplex is oriented
    outward: det of its vertex-position matrix is positive.
    """

    d: int
    center: np.ndarray
    radius: float
    unit_vertices: np.ndarray  # (K, d)
    simplices: np.ndarray      # (M, d) int indices

    def positions(self) -> np.ndarray:
        return self.center[None, :] + self.radius * self.unit_vertices

    @property
    def num_simplices(self) -> int:
        return int(self.simplices.shape[0])

    def euler_characteristic(self) -> int:
        faces = set()
        for simplex in self.simplices:
            verts = tuple(int(v) for v in simplex)
            for r in range(1, len(verts) + 1):
                for combo in itertools.combinations(sorted(verts), r):
                    faces.add(combo)
        chi = 0
        for f in faces:
            chi += (-1) ** (len(f) - 1)
        return chi

    def check_closed(self) -> None:
        """Assert mod-2 closedness and orientation coherence on every ridge."""
        ridge_count: dict[tuple, int] = {}
        ridge_orient: dict[tuple, int] = {}
        for simplex in self.simplices:
            verts = [int(v) for v in simplex]
            for i in range(len(verts)):
                face = verts[:i] + verts[i + 1:]
                key = tuple(sorted(face))
                sign = (-1) ** i * _sort_parity(face)
                ridge_count[key] = ridge_count.get(key, 0) + 1
                ridge_orient[key] = ridge_orient.get(key, 0) + sign
        bad_count = [k for k, c in ridge_count.items() if c != 2]
        if bad_count:
            raise ValueError(f"mesh not closed: {len(bad_count)} ridges not shared by exactly 2 simplices")
        bad_orient = [k for k, s in ridge_orient.items() if s != 0]
        if bad_orient:
            raise ValueError(f"mesh orientation incoherent on {len(bad_orient)} ridges")


def _sort_parity(seq) -> int:
    """Parity (+1/-1) of the permutation sorting seq ascending."""
    seq = list(seq)
    parity = 1
    for i in range(len(seq)):
        j = min(range(i, len(seq)), key=seq.__getitem__)
        if j != i:
            seq[i], seq[j] = seq[j], seq[i]
            parity = -parity
    return parity


_ICOSA_PHI = (1.0 + math.sqrt(5.0)) / 2.0

_ICOSA_VERTICES = np.array([
    [-1.0, _ICOSA_PHI, 0.0], [1.0, _ICOSA_PHI, 0.0], [-1.0, -_ICOSA_PHI, 0.0], [1.0, -_ICOSA_PHI, 0.0],
    [0.0, -1.0, _ICOSA_PHI], [0.0, 1.0, _ICOSA_PHI], [0.0, -1.0, -_ICOSA_PHI], [0.0, 1.0, -_ICOSA_PHI],
    [_ICOSA_PHI, 0.0, -1.0], [_ICOSA_PHI, 0.0, 1.0], [-_ICOSA_PHI, 0.0, -1.0], [-_ICOSA_PHI, 0.0, 1.0],
])

_ICOSA_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [5, 4, 9], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def _orthoplex(d: int):
    """Boundary of the d-dimensional cross-polytope: 2d vertices, 2^d facets."""
    vertices = np.zeros((2 * d, d))
    for i in range(d):
        vertices[2 * i, i] = 1.0
        vertices[2 * i + 1, i] = -1.0
    facets = []
    for signs in itertools.product((0, 1), repeat=d):
        facets.append([2 * i + s for i, s in enumerate(signs)])
    return vertices, np.array(facets, dtype=int)


def _normalize_rows(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _orient_outward(vertices: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    """Reorder each simplex so det of its vertex positions is positive.

    Valid for vertices in convex position around the origin (all our seeds
    and their projected subdivisions).
    """
    out = simplices.copy()
    mats = vertices[out]
    dets = np.linalg.det(mats)
    if np.any(np.abs(dets) < 1e-12):
        raise ValueError("degenerate simplex in sphere mesh")
    flip = dets < 0
    out[flip, 0], out[flip, 1] = simplices[flip, 1], simplices[flip, 0]
    return out


def _midpoint_subdivide(vertices, simplices):
    """4-fold triangle subdivision with midpoints projected to the sphere."""
    verts = [v for v in vertices]
    cache: dict[tuple[int, int], int] = {}

    def midpoint(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in cache:
            m = verts[a] + verts[b]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    new_simplices = []
    for a, b, c in simplices:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        new_simplices.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]])
    return np.array(verts), np.array(new_simplices, dtype=int)


def _barycentric_subdivide(vertices, simplices):
    """Full barycentric subdivision; barycenters projected to the sphere."""
    verts = [v for v in vertices]
    cache: dict[tuple, int] = {}
    k = simplices.shape[1]
    perms = list(itertools.permutations(range(k)))
    # prefix subsets (as local index tuples) are shared by every simplex
    prefix_sets = [[tuple(sorted(perm[: r + 1])) for r in range(k)] for perm in perms]
    local_subsets = sorted({s for chain in prefix_sets for s in chain})

    new_simplices = []
    for simplex in simplices:
        ids = {}
        for subset in local_subsets:
            global_subset = tuple(sorted(int(simplex[i]) for i in subset))
            if len(global_subset) == 1:
                ids[subset] = global_subset[0]
                continue
            hit = cache.get(global_subset)
            if hit is None:
                p = verts[global_subset[0]].copy()
                for g in global_subset[1:]:
                    p = p + verts[g]
                p /= np.linalg.norm(p)
                verts.append(p)
                hit = len(verts) - 1
                cache[global_subset] = hit
            ids[subset] = hit
        for chain in prefix_sets:
            new_simplices.append([ids[s] for s in chain])
    return np.array(verts), np.array(new_simplices, dtype=int)


def sphere_mesh(center, radius: float, refinement: int, d: int | None = None) -> SphereMesh:
    """Oriented simplicial (d-1)-sphere of the given radius around center.

    refinement r applies r rounds of 4-fold subdivision (d=3) or barycentric
    subdivision (d=4,5) to the seed.
    """
    center = np.asarray(center, dtype=float)
    if d is None:
        d = center.shape[0]
    if d not in SUPPORTED_DIMENSIONS:
        raise ValueError(f"unsupported dimension {d}")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if refinement < 0:
        raise ValueError("refinement must be nonnegative")

    if d == 3:
        vertices = _normalize_rows(_ICOSA_VERTICES)
        simplices = _ICOSA_FACES.copy()
        for _ in range(refinement):
            vertices, simplices = _midpoint_subdivide(vertices, simplices)
    else:
        vertices, simplices = _orthoplex(d)
        for _ in range(refinement):
            vertices, simplices = _barycentric_subdivide(vertices, simplices)

    simplices = _orient_outward(vertices, simplices)
    return SphereMesh(d=d, center=center, radius=float(radius),
                      unit_vertices=vertices, simplices=simplices)
