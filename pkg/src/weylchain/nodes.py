"""Field specifications over the torus and location of their zero sets.

A FieldSpec is either an analytic rule k -> R^d, grid samples interpolated
periodically, or a tangent 2-field (a, b) whose effective magnitude is the
wedge norm |a ^ b|.  locate_zeros scans grid cells with a sign-change /
magnitude-bound criterion and refines candidates by repeated bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import ZeroLocusError
from .grid import TAU, TorusGrid, torus_delta, torus_distance


@dataclass
class DeclaredNode:
    """Builder-declared node with its provenance charge."""

    position: np.ndarray
    charge: int
    ring: str = "Z"          # "Z" | "Z2"
    verified: bool = False   # Z2 charges stay declared-only


@dataclass
class FieldMetadata:
    declared_nodes: list[DeclaredNode] = dataclass_field(default_factory=list)
    builder: str | None = None
    params: dict = dataclass_field(default_factory=dict)


class FieldSpec:
    """A d-component field over T^d (or a pair of fields).

    kind "analytic": func maps an (N, d) array of angles to (N, d) values.
    kind "sampled": values on a TorusGrid, evaluated off-grid by periodic
    multilinear interpolation.
    kind "pair": two analytic closures (a, b); magnitude = |a ^ b|.
    """

    def __init__(self, d, kind, func=None, samples=None, sample_grid=None,
                 pair_funcs=None, metadata=None, check_periodicity=True):
        if kind not in ("analytic", "sampled", "pair"):
            raise ValueError(f"unknown field kind {kind!r}")
        self.d = int(d)
        self.kind = kind
        self.func = func
        self.samples = samples
        self.sample_grid = sample_grid
        self.pair_funcs = pair_funcs
        self.metadata = metadata or FieldMetadata()
        if kind == "analytic" and check_periodicity:
            self._check_periodic(func)
        if kind == "pair" and check_periodicity:
            for f in pair_funcs:
                self._check_periodic(f)
        if kind == "sampled":
            expected = tuple(sample_grid.n_per_axis) + (self.d,)
            if tuple(samples.shape) != expected:
                raise ValueError(f"sample array must have shape {expected}")

    def _check_periodic(self, func, tol=1e-9):
        rng = np.random.default_rng(20200527)
        pts = rng.uniform(0.0, TAU, size=(4, self.d))
        base = func(pts)
        for axis in range(self.d):
            shifted = pts.copy()
            shifted[:, axis] += TAU
            if np.max(np.abs(func(shifted) - base)) > tol:
                raise ValueError(f"field is not 2pi-periodic along axis {axis}")

    # -- evaluation --------------------------------------------------------

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Field values at an (N, d) array of angle points; vector kinds only."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "analytic":
            return np.asarray(self.func(points), dtype=float)
        if self.kind == "sampled":
            return self._interpolate(points)
        raise ValueError("pair fields have no single-vector evaluation; use evaluate_pair")

    def evaluate_pair(self, points: np.ndarray):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind != "pair":
            raise ValueError("not a pair field")
        fa, fb = self.pair_funcs
        return np.asarray(fa(points), dtype=float), np.asarray(fb(points), dtype=float)

    def magnitude(self, points: np.ndarray) -> np.ndarray:
        """|h| for vector kinds, wedge norm |a ^ b| for pair kind."""
        if self.kind == "pair":
            a, b = self.evaluate_pair(points)
            gram = (np.sum(a * a, axis=-1) * np.sum(b * b, axis=-1)
                    - np.sum(a * b, axis=-1) ** 2)
            return np.sqrt(np.maximum(gram, 0.0))
        return np.linalg.norm(self.evaluate(points), axis=-1)

    def _interpolate(self, points: np.ndarray) -> np.ndarray:
        grid = self.sample_grid
        n = np.asarray(grid.n_per_axis)
        t = points / grid.steps
        i0 = np.floor(t).astype(int)
        frac = t - i0
        out = np.zeros((points.shape[0], self.d))
        for corner in np.ndindex(*(2,) * self.d):
            corner = np.asarray(corner)
            idx = tuple(((i0 + corner) % n).T)
            w = np.prod(np.where(corner, frac, 1.0 - frac), axis=-1)
            out += w[:, None] * self.samples[idx]
        return out


def from_function(d: int, func, metadata=None, check_periodicity=True) -> FieldSpec:
    return FieldSpec(d, "analytic", func=func, metadata=metadata,
                     check_periodicity=check_periodicity)


def from_samples(grid: TorusGrid, samples: np.ndarray, metadata=None) -> FieldSpec:
    return FieldSpec(grid.d, "sampled", samples=np.asarray(samples, dtype=float),
                     sample_grid=grid, metadata=metadata)


def from_pair(d: int, func_a, func_b, metadata=None, check_periodicity=True) -> FieldSpec:
    return FieldSpec(d, "pair", pair_funcs=(func_a, func_b), metadata=metadata,
                     check_periodicity=check_periodicity)


@dataclass
class WeylNode:
    """Located band crossing with an enclosing-sphere radius."""

    position: np.ndarray
    radius: float
    charge: int | None = None        # integer local charge, once computed
    z2_charge: int | None = None     # declared Z2 index (unverified)
    charge_verified: bool = False

    def __repr__(self):
        pos = ", ".join(f"{x:.6f}" for x in self.position)
        return f"WeylNode(({pos}), r={self.radius:.4f}, charge={self.charge})"


def min_separation(nodes) -> float:
    """Minimum pairwise toroidal distance; half an axis period as fallback."""
    if len(nodes) < 2:
        return math.pi
    best = math.inf
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            best = min(best, torus_distance(nodes[i].position, nodes[j].position))
    return best


def _cell_flags(field: FieldSpec, grid: TorusGrid, origin_shift: np.ndarray):
    """Boolean flag per cell: candidate for containing a zero.

    A cell fires when every component of h changes sign across its corners,
    or when the smallest corner magnitude is below 10 x cell diameter x the
    cell's gradient estimate (no false negatives for transverse zeros).
    """
    n = grid.n_per_axis
    pts = grid.vertex_angles() + origin_shift
    if field.kind == "pair":
        mags = field.magnitude(pts).reshape(n)
        values = None
    else:
        values = field.evaluate(pts).reshape(n + (grid.d,))
        mags = np.linalg.norm(values, axis=-1)

    # corner-wise reductions over the 2^d corners of each cell
    min_mag = mags.copy()
    for corner in np.ndindex(*(2,) * grid.d):
        if not any(corner):
            continue
        rolled = mags
        for axis, c in enumerate(corner):
            if c:
                rolled = np.roll(rolled, -1, axis=axis)
        min_mag = np.minimum(min_mag, rolled)

    if values is not None:
        sign_change = np.ones(n, dtype=bool)
        for comp in range(grid.d):
            comp_vals = values[..., comp]
            cmin = comp_vals.copy()
            cmax = comp_vals.copy()
            for corner in np.ndindex(*(2,) * grid.d):
                if not any(corner):
                    continue
                rolled = comp_vals
                for axis, c in enumerate(corner):
                    if c:
                        rolled = np.roll(rolled, -1, axis=axis)
                cmin = np.minimum(cmin, rolled)
                cmax = np.maximum(cmax, rolled)
            sign_change &= (cmin < 0.0) & (cmax > 0.0)
    else:
        sign_change = np.zeros(n, dtype=bool)

    # local gradient estimate: largest single-axis forward difference of |h|
    grad = np.zeros(n)
    if values is not None:
        for axis in range(grid.d):
            diff = np.linalg.norm(np.roll(values, -1, axis=axis) - values, axis=-1)
            grad = np.maximum(grad, diff / grid.steps[axis])
    else:
        for axis in range(grid.d):
            diff = np.abs(np.roll(mags, -1, axis=axis) - mags)
            grad = np.maximum(grad, diff / grid.steps[axis])
    # per-cell gradient: max over corners
    cell_grad = grad.copy()
    for corner in np.ndindex(*(2,) * grid.d):
        if not any(corner):
            continue
        rolled = grad
        for axis, c in enumerate(corner):
            if c:
                rolled = np.roll(rolled, -1, axis=axis)
        cell_grad = np.maximum(cell_grad, rolled)

    diam = float(np.linalg.norm(grid.steps))
    magnitude_flag = min_mag < 10.0 * diam * cell_grad
    return (sign_change | magnitude_flag), mags, cell_grad


def _refine_cells(field, grid, cells, origin_shift, cell_grad, tol, max_iter=60):
    """Shrinking-box refinement of flagged cells, batched across candidates.

    Each box halves per iteration around the best sampled point; a box is
    dropped once its sampled minimum provably exceeds what a zero inside
    could allow (2 x local gradient x box diagonal).
    """
    if not len(cells):
        return []
    steps = grid.steps
    centers = np.array([grid.angle(c) for c in cells]) + origin_shift + steps / 2.0
    halves = np.tile(steps / 2.0, (len(cells), 1))
    lipschitz = np.array([max(cell_grad[tuple(c)], 1e-12) for c in cells])
    offsets = np.array(list(np.ndindex(*(3,) * grid.d))) - 1  # 3^d lattice
    active = np.arange(len(cells))
    found = []

    for _ in range(max_iter):
        if not len(active):
            break
        pts = centers[active, None, :] + offsets[None, :, :] * halves[active, None, :]
        flat = pts.reshape(-1, grid.d)
        mags = field.magnitude(np.mod(flat, TAU)).reshape(len(active), -1)
        best = np.argmin(mags, axis=1)
        best_mag = mags[np.arange(len(active)), best]
        centers[active] = pts[np.arange(len(active)), best]
        halves[active] *= 0.5

        converged = best_mag < tol
        for idx in np.nonzero(converged)[0]:
            found.append(np.mod(centers[active[idx]], TAU))
        diag = np.linalg.norm(halves[active], axis=1)
        hopeless = best_mag > 2.0 * lipschitz[active] * diag * 2.0
        active = active[~(converged | hopeless)]
    return found


def locate_zeros(field: FieldSpec, grid: TorusGrid, tol: float = 1e-8) -> list[WeylNode]:
    """Locate the isolated zeros of a field on the torus.

    Grid cells flagged by the sign-change / magnitude criterion are refined
    by repeated bisection until |h| < tol; duplicates within one cell
    diameter merge.  If a grid vertex itself vanishes, the sampling origin
    is shifted by half a cell and the scan retried once.
    """
    if field.d != grid.d:
        raise ValueError("field and grid dimensions differ")
    origin_shift = np.zeros(grid.d)
    for attempt in range(2):
        mags = field.magnitude(grid.vertex_angles() + origin_shift)
        if np.min(mags) >= tol:
            break
        if attempt == 1:
            raise ZeroLocusError("field vanishes on grid vertex even after origin shift")
        origin_shift = grid.steps / 2.0

    flags, _, cell_grad = _cell_flags(field, grid, origin_shift)
    cells = np.array(list(np.ndindex(*grid.n_per_axis)))[flags.ravel()]
    hits = _refine_cells(field, grid, cells, origin_shift, cell_grad, tol)
    if not hits:
        return []

    # merge duplicates within one cell diameter (union-find on closeness)
    diam = float(np.linalg.norm(grid.steps))
    positions = list(hits)
    parent = list(range(len(positions)))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            if torus_distance(positions[i], positions[j]) < diam:
                parent[root(j)] = root(i)

    clusters: dict[int, list[int]] = {}
    for i in range(len(positions)):
        clusters.setdefault(root(i), []).append(i)

    merged = []
    for members in clusters.values():
        pts = np.array([positions[i] for i in members])
        # cluster extent check: isolated zeros cannot spread past 3 cells
        ref = pts[0]
        spread = np.array([np.abs(torus_delta(p, ref)) for p in pts])
        if np.any(spread.max(axis=0) > 3.0 * grid.steps):
            raise ZeroLocusError("zero-locus not isolated: refined zeros form an extended cluster")
        best = int(np.argmin(field.magnitude(pts)))
        merged.append(pts[best])

    merged.sort(key=lambda p: tuple(p))
    sep = math.inf
    if len(merged) >= 2:
        sep = min(torus_distance(p, q)
                  for i, p in enumerate(merged) for q in merged[i + 1:])
    radius = min(float(np.min(grid.steps)), 0.5 * sep)
    return [WeylNode(position=np.asarray(p), radius=radius) for p in merged]


def match_declared(nodes: list[WeylNode], metadata: FieldMetadata, tol: float = 0.35):
    """Bijection between located nodes and builder-declared nodes.

    Returns the matched pairs; raises if the match is not one-to-one within
    the tolerance (in angle units).
    """
    declared = list(metadata.declared_nodes)
    if len(nodes) != len(declared):
        raise ValueError(f"found {len(nodes)} nodes but {len(declared)} were declared")
    pairs = []
    used = set()
    for node in nodes:
        dists = [torus_distance(node.position, d.position) for d in declared]
        j = int(np.argmin(dists))
        if j in used or dists[j] > tol:
            raise ValueError("located nodes do not match declared nodes one-to-one")
        used.add(j)
        pairs.append((node, declared[j]))
    return pairs
