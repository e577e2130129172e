"""Cubical 1-chain algebra on the torus over Z and Z2.

Chains are finite integer (or mod-2) combinations of directed grid edges,
stored canonically: every edge points in the positive axis direction and
carries a signed coefficient (Z) or a mod-2 coefficient (Z2).  Boundaries,
winding classes, intersection pairings, and Euler/Kervaire chain
reconstruction from measured slice profiles live here.

Sign conventions (frozen): an edge crossing a transverse hyperplane in the
positive axis direction counts +1; reconstructed chains run from negative
to positive charges (boundary equals the charge 0-chain); consequently a
slice invariant drops by the local charge when the node is crossed in the
positive axis direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import (BoundaryMismatchError, ChargesUnbalancedError,
                     InconsistentProfilesError, NotACycleError,
                     SliceThroughNodeError)
from .grid import TAU, TorusGrid, torus_delta

Vertex = tuple[int, ...]
Edge = tuple[Vertex, int]  # (tail vertex, axis), pointing in +axis direction


@dataclass
class OneChain:
    """Z- or Z2-combination of directed grid edges."""

    grid: TorusGrid
    ring: str = "Z"
    edges: dict[Edge, int] = dataclass_field(default_factory=dict)

    def __post_init__(self):
        if self.ring not in ("Z", "Z2"):
            raise ValueError("ring must be 'Z' or 'Z2'")
        self.edges = self._canonical(self.edges)

    def _canonical(self, edges):
        out: dict[Edge, int] = {}
        for (vertex, axis), coeff in edges.items():
            v = self.grid.wrap_index(vertex)
            c = coeff % 2 if self.ring == "Z2" else coeff
            if c:
                out[(v, axis)] = out.get((v, axis), 0) + c
        if self.ring == "Z2":
            return {e: c % 2 for e, c in out.items() if c % 2}
        return {e: c for e, c in out.items() if c}

    def copy(self) -> "OneChain":
        return OneChain(self.grid, self.ring, dict(self.edges))

    def add_edge(self, vertex, axis: int, coeff: int = 1) -> None:
        v = self.grid.wrap_index(vertex)
        c = self.edges.get((v, axis), 0) + coeff
        if self.ring == "Z2":
            c %= 2
        if c:
            self.edges[(v, axis)] = c
        else:
            self.edges.pop((v, axis), None)

    def __add__(self, other: "OneChain") -> "OneChain":
        self._check_compatible(other)
        out = self.copy()
        for (v, a), c in other.edges.items():
            out.add_edge(v, a, c)
        return out

    def __sub__(self, other: "OneChain") -> "OneChain":
        self._check_compatible(other)
        out = self.copy()
        for (v, a), c in other.edges.items():
            out.add_edge(v, a, -c if self.ring == "Z" else c)
        return out

    def scaled(self, factor: int) -> "OneChain":
        return OneChain(self.grid, self.ring,
                        {e: c * factor for e, c in self.edges.items()})

    def _check_compatible(self, other):
        if other.grid.n_per_axis != self.grid.n_per_axis or other.ring != self.ring:
            raise ValueError("chains live on different grids or rings")

    def sorted_edges(self):
        return sorted(self.edges.items())

    def is_zero(self) -> bool:
        return not self.edges

    # -- serialization ------------------------------------------------------

    def to_records(self) -> dict:
        return {
            "ring": self.ring,
            "grid": {"d": self.grid.d, "n_per_axis": list(self.grid.n_per_axis)},
            "edges": [{"vertex": list(v), "axis": a, "coeff": c}
                      for (v, a), c in self.sorted_edges()],
        }

    @classmethod
    def from_records(cls, records: dict, grid: TorusGrid | None = None) -> "OneChain":
        if grid is None:
            g = records["grid"]
            grid = TorusGrid(g["d"], tuple(g["n_per_axis"]))
        edges = {(tuple(r["vertex"]), r["axis"]): r["coeff"] for r in records["edges"]}
        return cls(grid, records["ring"], edges)


@dataclass(frozen=True)
class HomologyClass:
    """Winding vector in H_1 of the torus: d integers or d mod-2 values."""

    winding: tuple[int, ...]
    ring: str = "Z"

    def is_zero(self) -> bool:
        return all(w == 0 for w in self.winding)


def boundary(chain: OneChain) -> dict[Vertex, int]:
    """0-chain boundary: head gets +coeff, tail gets -coeff (mod 2 for Z2)."""
    out: dict[Vertex, int] = {}
    mod2 = chain.ring == "Z2"
    for (v, axis), coeff in chain.edges.items():
        head = list(v)
        head[axis] += 1
        head = chain.grid.wrap_index(head)
        for vertex, sign in ((head, coeff), (v, -coeff)):
            c = out.get(vertex, 0) + sign
            if mod2:
                c %= 2
            if c:
                out[vertex] = c
            else:
                out.pop(vertex, None)
    return out


def winding_class(cycle: OneChain) -> HomologyClass:
    """Class of a cycle in H_1: per-axis net crossings of one transverse layer.

    For ring Z the total per-axis coefficient sum must divide exactly by the
    axis size (a malformed chain fails this); for Z2 one layer is counted
    mod 2.
    """
    if boundary(cycle):
        raise NotACycleError("winding class requested for a non-cycle")
    d = cycle.grid.d
    if cycle.ring == "Z":
        totals = [0] * d
        for (v, axis), coeff in cycle.edges.items():
            totals[axis] += coeff
        winding = []
        for axis, total in enumerate(totals):
            n = cycle.grid.n_per_axis[axis]
            if total % n:
                raise NotACycleError("non-integral winding: malformed chain")
            winding.append(total // n)
        return HomologyClass(tuple(winding), "Z")
    winding = []
    for axis in range(d):
        count = sum(c for (v, a), c in cycle.edges.items() if a == axis and v[axis] == 0)
        winding.append(count % 2)
    return HomologyClass(tuple(winding), "Z2")


def intersection_number(chain: OneChain, direction: int, coordinate: float) -> int:
    """Signed crossings of the chain with the hyperplane at the coordinate.

    Positive-direction edges crossing count +coeff.  The coordinate must be
    a regular slice (strictly between grid layers).
    """
    grid = chain.grid
    n = grid.n_per_axis[direction]
    step = TAU / n
    coord = coordinate % TAU
    layer = coord / step
    if abs(layer - round(layer)) < 1e-9:
        raise SliceThroughNodeError("slice through chain vertex layer")
    below = int(math.floor(layer)) % n
    total = 0
    for (v, axis), coeff in chain.edges.items():
        if axis == direction and v[direction] == below:
            total += coeff
    return total % 2 if chain.ring == "Z2" else total


def to_kervaire(chain: OneChain) -> OneChain:
    """Reduce an integer chain mod 2; boundary commutes with the reduction."""
    if chain.ring == "Z2":
        return chain.copy()
    return OneChain(chain.grid, "Z2", {e: c % 2 for e, c in chain.edges.items()})


def generator_loop(grid: TorusGrid, axis: int, basepoint: Vertex, ring: str = "Z",
                   coeff: int = 1) -> OneChain:
    """Full loop of +axis edges through the basepoint."""
    chain = OneChain(grid, ring)
    v = list(grid.wrap_index(basepoint))
    for j in range(grid.n_per_axis[axis]):
        w = list(v)
        w[axis] = (v[axis] + j) % grid.n_per_axis[axis]
        chain.add_edge(tuple(w), axis, coeff)
    return chain


def snap_to_grid(position, grid: TorusGrid) -> Vertex:
    """Nearest grid vertex to an angle position (wrapped)."""
    idx = np.round(np.asarray(position) / grid.steps).astype(int)
    return grid.wrap_index(idx)


def path_chain(grid: TorusGrid, start: Vertex, end: Vertex, ring: str = "Z") -> OneChain:
    """Shortest monotone staircase from start to end, axes in ascending
    order, each axis along its shorter circular direction (+ on ties)."""
    chain = OneChain(grid, ring)
    current = list(grid.wrap_index(start))
    target = grid.wrap_index(end)
    for axis in range(grid.d):
        n = grid.n_per_axis[axis]
        forward = (target[axis] - current[axis]) % n
        backward = (current[axis] - target[axis]) % n
        if forward <= backward:
            for _ in range(forward):
                chain.add_edge(tuple(current), axis, 1)
                current[axis] = (current[axis] + 1) % n
        else:
            for _ in range(backward):
                current[axis] = (current[axis] - 1) % n
                chain.add_edge(tuple(current), axis, -1)
    return chain


def chains_equivalent(l1: OneChain, l2: OneChain):
    """Verdict on chain equivalence plus the difference class in H_1.

    Chains with equal boundary differ by a cycle; they are equivalent when
    that cycle's winding class vanishes.  The difference class is the
    relative invariant separating the two underlying fields.
    """
    if boundary(l1) != boundary(l2):
        raise BoundaryMismatchError("chains represent different charge configurations")
    difference = winding_class(l1 - l2)
    return difference.is_zero(), difference


@dataclass
class ReconstructionCertificate:
    boundary_ok: bool
    profile_ok: bool
    corrections: tuple[int, ...]
    checked_samples: int

    @property
    def passed(self) -> bool:
        return self.boundary_ok and self.profile_ok


def _line_clear_of_nodes(grid: TorusGrid, vertex: Vertex, axis: int,
                         node_positions) -> bool:
    """The axis line through the vertex stays at least one cell away from
    every node in the transverse coordinates."""
    angles = np.array([TAU * m / n for m, n in zip(vertex, grid.n_per_axis)])
    for pos in node_positions:
        delta = np.abs(torus_delta(angles, pos))
        transverse = [delta[a] / grid.steps[a] for a in range(grid.d) if a != axis]
        if max(transverse) < 1.0:
            return False
    return True


def _correction_basepoint(grid: TorusGrid, node_positions) -> Vertex:
    """Lexicographically smallest vertex whose axis lines all avoid node cells."""
    for vertex in np.ndindex(*grid.n_per_axis):
        if all(_line_clear_of_nodes(grid, vertex, axis, node_positions)
               for axis in range(grid.d)):
            return tuple(vertex)
    raise InconsistentProfilesError("no node-free basepoint for correction loops")


def reconstruct_euler_chain(charges, profiles, grid: TorusGrid, ring: str = "Z"):
    """Build a chain whose boundary is the charge 0-chain and whose
    intersection profile reproduces the measured slice profiles.

    Greedy +/- pairing with shortest monotone paths gives a candidate; the
    measured-minus-candidate profile must then be constant per direction (a
    cycle's crossing count does not depend on the layer), and that constant
    is restored with axis generator loops through a node-free basepoint.
    Returns (chain, certificate); both certificate checks are exact.

    With profiles=None (Z2 metadata pipelines) only the boundary
    certificate is produced.
    """
    node_positions = [np.asarray(n.position) for n in charges.nodes]
    snapped = [snap_to_grid(p, grid) for p in node_positions]
    values = list(charges.values)
    if ring == "Z2" or charges.ring == "Z2":
        ring = "Z2"
        values = [v % 2 for v in values]
    total = sum(values) % 2 if ring == "Z2" else sum(values)
    if total != 0:
        raise ChargesUnbalancedError(f"charges unbalanced: total {total}")

    # expand charges into unit tokens and pair greedily
    plus: list[Vertex] = []
    minus: list[Vertex] = []
    for vertex, value in zip(snapped, values):
        if ring == "Z2":
            if value % 2:
                plus.append(vertex)  # Z2: signless; pair tokens among themselves
        else:
            bucket = plus if value > 0 else minus
            bucket.extend([vertex] * abs(value))
    chain = OneChain(grid, ring)
    if ring == "Z2":
        plus.sort()
        while plus:
            a = plus.pop(0)
            if not plus:
                raise ChargesUnbalancedError("odd number of Z2 charges")
            dists = [ _grid_token_distance(grid, a, b) for b in plus ]
            j = int(np.argmin(dists))
            b = plus.pop(j)
            chain = chain + path_chain(grid, a, b, ring)
    else:
        plus.sort()
        minus.sort()
        while minus:
            tail = minus.pop(0)
            dists = [_grid_token_distance(grid, tail, p) for p in plus]
            j = int(np.argmin(dists))
            head = plus.pop(j)
            chain = chain + path_chain(grid, tail, head, ring)

    if profiles is None:
        cert = ReconstructionCertificate(
            boundary_ok=boundary(chain) == _charge_zero_chain(snapped, values, ring),
            profile_ok=True, corrections=(0,) * grid.d, checked_samples=0)
        return chain, cert

    corrections = [0] * grid.d
    for profile in profiles:
        axis = profile.direction
        deltas = set()
        for coordinate, measured in profile.samples:
            candidate = intersection_number(chain, axis, coordinate)
            delta = (measured - candidate) % 2 if ring == "Z2" else measured - candidate
            deltas.add(delta)
        if not deltas:
            continue
        if len(deltas) != 1:
            raise InconsistentProfilesError(
                f"inconsistent profiles along axis {axis}: "
                f"measured minus candidate is not constant ({sorted(deltas)})")
        corrections[axis] = deltas.pop()

    if any(corrections):
        basepoint = _correction_basepoint(grid, node_positions)
        for axis, c in enumerate(corrections):
            if c:
                chain = chain + generator_loop(grid, axis, basepoint, ring, c)

    boundary_ok = boundary(chain) == _charge_zero_chain(snapped, values, ring)
    profile_ok = True
    checked = 0
    for profile in profiles:
        for coordinate, measured in profile.samples:
            got = intersection_number(chain, profile.direction, coordinate)
            if ring == "Z2":
                got %= 2
                measured %= 2
            if got != measured:
                profile_ok = False
            checked += 1
    cert = ReconstructionCertificate(boundary_ok, profile_ok,
                                     tuple(corrections), checked)
    if not cert.passed:
        raise InconsistentProfilesError("reconstruction certificate failed")
    return chain, cert


def _charge_zero_chain(snapped, values, ring) -> dict[Vertex, int]:
    out: dict[Vertex, int] = {}
    for vertex, value in zip(snapped, values):
        c = out.get(vertex, 0) + value
        if ring == "Z2":
            c %= 2
        if c:
            out[vertex] = c
        else:
            out.pop(vertex, None)
    return out


def _grid_token_distance(grid: TorusGrid, a: Vertex, b: Vertex) -> float:
    total = 0.0
    for axis in range(grid.d):
        n = grid.n_per_axis[axis]
        diff = min((a[axis] - b[axis]) % n, (b[axis] - a[axis]) % n)
        total += float(diff) ** 2
    return math.sqrt(total)
