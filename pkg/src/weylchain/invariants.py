"""Independent characteristic-number oracles and slice profiles.

lattice_chern implements the plaquette field-strength method on a 2-torus
slice (gauge-independent integer); wzw_winding discretizes the winding
number -(1/24 pi^2) Int tr((g^-1 dg)^3) of an SU(2)-valued field on a
3-torus; the two calibration integrals reproduce the unit Chern numbers of
the tautological line bundle on S^2 and quaternionic line bundle on S^4.
Slice profiles assemble per-direction piecewise-constant invariants with
jumps at node coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .charge import slice_degree
from .clifford import gamma_rep
from .errors import MeshTooCoarseError, SliceThroughNodeError
from .grid import TAU, TorusGrid, torus_delta
from .nodes import FieldSpec, WeylNode

_INVARIANT_KIND = {3: "c1", 4: "DD", 5: "c2"}


@dataclass
class SliceProfile:
    """Piecewise-constant slice invariant along one axis.

    ``jumps`` records, at each node coordinate, the drop of the invariant
    when the node is crossed in the positive axis direction (value below
    minus value above); under the frozen orientation conventions this drop
    equals the local charge.
    """

    direction: int
    invariant_kind: str
    samples: list[tuple[float, int]]
    node_coordinates: list[float]
    jumps: list[tuple[float, int]] = dataclass_field(default_factory=list)

    def value_at(self, coordinate: float) -> int:
        best = None
        bestdist = math.inf
        for coord, value in self.samples:
            dist = abs((coordinate - coord + math.pi) % TAU - math.pi)
            if dist < bestdist:
                bestdist = dist
                best = value
        if best is None:
            raise ValueError("empty profile")
        return best


# ---------------------------------------------------------------------------
# Lattice Chern number (plaquette field strength)


def _valence_states(unit_h: np.ndarray) -> np.ndarray:
    """Deterministic valence eigenvector of n.sigma per point.

    Takes the larger column of the projector (1 - n.sigma)/2; the branch at
    n3 = 0 is fixed so the state is never the zero column.
    """
    n1, n2, n3 = unit_h[..., 0], unit_h[..., 1], unit_h[..., 2]
    shape = unit_h.shape[:-1]
    u = np.zeros(shape + (2,), dtype=complex)
    lower = n3 <= 0.0  # first projector column has norm (1-n3)/2 >= 1/2
    u[lower, 0] = (1.0 - n3[lower]) / 2.0
    u[lower, 1] = -(n1[lower] + 1j * n2[lower]) / 2.0
    upper = ~lower
    u[upper, 0] = -(n1[upper] - 1j * n2[upper]) / 2.0
    u[upper, 1] = (1.0 + n3[upper]) / 2.0
    return u / np.linalg.norm(u, axis=-1, keepdims=True)


def _chern_from_states(states: np.ndarray, phase_gate: float = 0.95 * math.pi) -> int:
    """Plaquette-argument sum of link phases over a periodic 2D state array.

    Gauge-independent by construction; any smooth per-point phase drops out
    of the plaquette product.
    """
    u = states
    link_x = np.sum(np.conj(u) * np.roll(u, -1, axis=0), axis=-1)
    link_y = np.sum(np.conj(u) * np.roll(u, -1, axis=1), axis=-1)
    if np.min(np.abs(link_x)) < 1e-12 or np.min(np.abs(link_y)) < 1e-12:
        raise MeshTooCoarseError("vanishing link overlap; refine the slice grid")
    plaquette = (link_x * np.roll(link_y, -1, axis=0)
                 * np.conj(np.roll(link_x, -1, axis=1)) * np.conj(link_y))
    angles = np.angle(plaquette)
    if np.max(np.abs(angles)) >= phase_gate:
        raise MeshTooCoarseError("plaquette phase near pi; refine the slice grid")
    raw = float(np.sum(angles) / TAU)
    value = int(round(raw))
    if abs(raw - value) > 1e-6:
        raise MeshTooCoarseError(f"plaquette sum {raw} is not an integer")
    return value


def lattice_chern(field: FieldSpec, direction: int, coordinate: float,
                  grid: TorusGrid) -> int:
    """First Chern number of the valence band of h.sigma on a 2-torus slice.

    d=3 only; an independent cross-check for slice_degree.  The plaquette
    circulation is chosen to match the slice orientation convention.
    """
    if field.d != 3:
        raise ValueError("lattice Chern oracle is defined for d = 3")
    axes = [a for a in range(3) if a != direction]
    ns = [grid.n_per_axis[a] for a in axes]
    coords = [TAU * np.arange(n) / n for n in ns]
    mesh = np.meshgrid(*coords, indexing="ij")
    pts = np.zeros(tuple(ns) + (3,))
    for i, a in enumerate(axes):
        pts[..., a] = mesh[i]
    pts[..., direction] = coordinate
    values = field.evaluate(pts.reshape(-1, 3))
    norms = np.linalg.norm(values, axis=-1)
    if np.min(norms) < 1e-9:
        raise SliceThroughNodeError("slice hits node")
    unit = (values / norms[:, None]).reshape(tuple(ns) + (3,))
    return _chern_from_states(_valence_states(unit))


# ---------------------------------------------------------------------------
# WZW winding of SU(2)-valued fields


def project_su2(u: np.ndarray) -> np.ndarray:
    """Nearest special-unitary field: polar projection then det-phase fix."""
    w, s, vh = np.linalg.svd(u)
    unitary = w @ vh
    det = np.linalg.det(unitary)
    return unitary / np.sqrt(det)[..., None, None]


def wzw_winding(u: np.ndarray, residual_gate: float = 0.05):
    """Winding number -(1/24 pi^2) Int tr((g^-1 dg)^3) on a 3-torus.

    ``u`` holds SU(2) samples with shape (n1, n2, n3, 2, 2) indexed in the
    slice coordinate order; derivatives are central differences after
    unitary re-projection.  Returns (integer, residual).
    """
    u = project_su2(np.asarray(u, dtype=complex))
    n = u.shape[:3]
    steps = [TAU / ni for ni in n]
    a = []
    for axis in range(3):
        du = (np.roll(u, -1, axis=axis) - np.roll(u, 1, axis=axis)) / (2.0 * steps[axis])
        am = np.conj(np.swapaxes(u, -1, -2)) @ du
        a.append(0.5 * (am - np.conj(np.swapaxes(am, -1, -2))))  # anti-Hermitian part
    commutator = a[1] @ a[2] - a[2] @ a[1]
    integrand = 3.0 * np.trace(a[0] @ commutator, axis1=-2, axis2=-1)
    total = np.sum(integrand) * steps[0] * steps[1] * steps[2]
    raw = float((-total / (24.0 * math.pi ** 2)).real)
    value = int(round(raw))
    residual = abs(raw - value)
    if residual >= residual_gate:
        raise MeshTooCoarseError(f"winding residual {residual:.4f} exceeds gate")
    return value, residual


def su2_wrap_map(n_per_axis, center=(math.pi, math.pi, math.pi),
                 radius: float = 2.5) -> np.ndarray:
    """SU(2) samples on T^3 wrapping the group once (winding +1).

    Inside a ball the map is exp(i pi rho x_hat . sigma); outside it is the
    constant -1.  The chirality is fixed so the winding is +1.
    """
    from .clifford import PAULI
    grid = TorusGrid(3, tuple(n_per_axis))
    pts = grid.vertex_angles()
    delta = torus_delta(pts, np.asarray(center))
    r = np.linalg.norm(delta, axis=-1)
    rho = np.minimum(r / radius, 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        xhat = np.where(r[:, None] > 1e-12, delta / np.maximum(r, 1e-12)[:, None], 0.0)
    u = np.zeros((pts.shape[0], 2, 2), dtype=complex)
    cos = np.cos(math.pi * rho)
    sin = np.sin(math.pi * rho)
    u += cos[:, None, None] * np.eye(2)
    for i in range(3):
        u += 1j * (sin * xhat[:, i])[:, None, None] * PAULI[i]
    return u.reshape(tuple(grid.n_per_axis) + (2, 2))


def chiral_unitary_samples(field: FieldSpec, direction: int, coordinate: float,
                           grid: TorusGrid) -> np.ndarray:
    """SU(2) samples of the flattened chiral Hamiltonian on a 3-subtorus
    slice of a d=4 field, in slice coordinate order."""
    if field.d != 4:
        raise ValueError("chiral unitary slices require d = 4")
    axes = [a for a in range(4) if a != direction]
    ns = [grid.n_per_axis[a] for a in axes]
    coords = [TAU * np.arange(n) / n for n in ns]
    mesh = np.meshgrid(*coords, indexing="ij")
    pts = np.zeros(tuple(ns) + (4,))
    for i, a in enumerate(axes):
        pts[..., a] = mesh[i]
    pts[..., direction] = coordinate
    values = field.evaluate(pts.reshape(-1, 4))
    norms = np.linalg.norm(values, axis=-1)
    if np.min(norms) < 1e-9:
        raise SliceThroughNodeError("slice hits node")
    h = values / norms[:, None]
    u = np.zeros((h.shape[0], 2, 2), dtype=complex)
    u[:, 0, 0] = h[:, 3] + 1j * h[:, 2]
    u[:, 0, 1] = h[:, 1] + 1j * h[:, 0]
    u[:, 1, 0] = -h[:, 1] + 1j * h[:, 0]
    u[:, 1, 1] = h[:, 3] - 1j * h[:, 2]
    return u.reshape(tuple(ns) + (2, 2))


# ---------------------------------------------------------------------------
# Calibration integrals (unit characteristic numbers on spheres)


def _theta_derivative(p: np.ndarray, axis: int, step: float) -> np.ndarray:
    """Central differences inside, 2nd-order one-sided at the chart edges."""
    dp = (np.roll(p, -1, axis=axis) - np.roll(p, 1, axis=axis)) / (2.0 * step)
    first = [slice(None)] * p.ndim
    second = [slice(None)] * p.ndim
    third = [slice(None)] * p.ndim
    first[axis], second[axis], third[axis] = 0, 1, 2
    dp[tuple(first)] = (-3.0 * p[tuple(first)] + 4.0 * p[tuple(second)]
                        - p[tuple(third)]) / (2.0 * step)
    first[axis], second[axis], third[axis] = -1, -2, -3
    dp[tuple(first)] = (3.0 * p[tuple(first)] - 4.0 * p[tuple(second)]
                        + p[tuple(third)]) / (2.0 * step)
    return dp


def hopf_c1_calibration(n: int = 32, lower_band: bool = False,
                        flip_orientation: bool = False) -> float:
    """Numerically integrate (1/2 pi i) tr(P dP dP) over S^2 with
    P = (1 + n.sigma)/2; the tautological-bundle value is 1."""
    theta = (np.arange(n) + 0.5) * math.pi / n
    phi = TAU * np.arange(n) / n
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    nvec = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)],
                    axis=-1)
    from .clifford import PAULI
    sign = -1.0 if lower_band else 1.0
    p = 0.5 * np.eye(2, dtype=complex)
    p = np.broadcast_to(p, (n, n, 2, 2)).copy()
    for i in range(3):
        p += sign * 0.5 * nvec[..., i, None, None] * PAULI[i]
    dth = _theta_derivative(p, 0, math.pi / n)
    dph = (np.roll(p, -1, axis=1) - np.roll(p, 1, axis=1)) / (2.0 * TAU / n)
    comm = dth @ dph - dph @ dth
    integrand = np.trace(p @ comm, axis1=-2, axis2=-1)
    total = np.sum(integrand) * (math.pi / n) * (TAU / n)
    orientation = -1.0 if flip_orientation else 1.0
    # chart orientation (theta, phi) fixed so the tautological bundle gives +1
    return float(orientation * (total / (2.0 * math.pi * 1j)).real)


def quaternionic_c2_calibration(n: int = 16, conjugate_band: bool = False,
                                reflect_axis: bool = False) -> float:
    """Numerically integrate (1/4 pi^2) tr(F ^ F), F = P dP dP, over S^4 with
    P = (1 + n.gamma)/2; the tautological quaternionic-bundle value is 1.

    Hyperspherical product chart with cell-centered polar angles (pole
    handling); one-sided stencils at the polar chart edges.
    """
    rep = gamma_rep(5)
    gammas = rep.matrices
    h_polar = math.pi / n
    h_azimuth = TAU / n
    polar = (np.arange(n) + 0.5) * h_polar
    azimuth = np.arange(n) * h_azimuth
    a1, a2, a3, a4 = np.meshgrid(polar, polar, polar, azimuth, indexing="ij")
    nvec = np.empty((n, n, n, n, 5))
    nvec[..., 0] = np.cos(a1)
    nvec[..., 1] = np.sin(a1) * np.cos(a2)
    nvec[..., 2] = np.sin(a1) * np.sin(a2) * np.cos(a3)
    nvec[..., 3] = np.sin(a1) * np.sin(a2) * np.sin(a3) * np.cos(a4)
    nvec[..., 4] = np.sin(a1) * np.sin(a2) * np.sin(a3) * np.sin(a4)
    if reflect_axis:
        nvec[..., 4] = -nvec[..., 4]

    sign = -1.0 if conjugate_band else 1.0
    p = np.broadcast_to(0.5 * np.eye(4, dtype=complex), (n, n, n, n, 4, 4)).copy()
    for c in range(5):
        p += sign * 0.5 * nvec[..., c, None, None] * gammas[c]
    del nvec

    d1 = _theta_derivative(p, 0, h_polar)
    d2 = _theta_derivative(p, 1, h_polar)
    d3 = _theta_derivative(p, 2, h_polar)
    d4 = (np.roll(p, -1, axis=3) - np.roll(p, 1, axis=3)) / (2.0 * h_azimuth)

    f12 = p @ (d1 @ d2 - d2 @ d1)
    f34 = p @ (d3 @ d4 - d4 @ d3)
    f13 = p @ (d1 @ d3 - d3 @ d1)
    f42 = p @ (d4 @ d2 - d2 @ d4)
    f14 = p @ (d1 @ d4 - d4 @ d1)
    f23 = p @ (d2 @ d3 - d3 @ d2)
    integrand = 2.0 * (np.trace(f12 @ f34, axis1=-2, axis2=-1)
                       + np.trace(f13 @ f42, axis1=-2, axis2=-1)
                       + np.trace(f14 @ f23, axis1=-2, axis2=-1))
    total = np.sum(integrand) * h_polar ** 3 * h_azimuth
    # chart orientation fixed so the tautological bundle gives +1
    return float((total / (4.0 * math.pi ** 2)).real)


# ---------------------------------------------------------------------------
# Slice profiles


def profile(field: FieldSpec, direction: int, grid: TorusGrid,
            nodes: list[WeylNode], oracle=None) -> SliceProfile:
    """Piecewise-constant profile of the slice invariant along an axis.

    One regular sample per inter-node interval (midpoint); jumps recorded at
    node coordinates as drops matching the local charges (frozen sign).  An
    optional oracle(field, direction, coordinate, grid) cross-checks each
    sample (exact integer agreement enforced).
    """
    d = grid.d
    step = float(grid.steps[direction])
    coords = sorted({float(np.mod(n.position[direction], TAU)) for n in nodes})
    merged: list[float] = []
    for c in coords:
        if merged and abs(c - merged[-1]) < 1e-9:
            continue
        merged.append(c)
    if merged and (merged[0] + TAU) - merged[-1] < 1e-9:
        merged.pop()

    samples = []
    if not merged:
        sample_coords = [float(np.mod(step / 2.0, TAU))]
    else:
        sample_coords = []
        for i, lo in enumerate(merged):
            hi = merged[(i + 1) % len(merged)]
            width = (hi - lo) % TAU
            if width == 0.0:
                width = TAU
            mid = (lo + width / 2.0) % TAU
            sample_coords.append(mid)

    for coordinate in sample_coords:
        value = slice_degree(field, direction, coordinate, grid)
        if oracle is not None:
            check = oracle(field, direction, coordinate, grid)
            if check != value:
                raise MeshTooCoarseError(
                    f"slice oracle disagreement at {coordinate:.4f}: "
                    f"{value} vs {check}")
        samples.append((coordinate, value))

    jumps = []
    for i, c in enumerate(merged):
        below = samples[(i - 1) % len(samples)][1]
        above = samples[i % len(samples)][1]
        jumps.append((c, below - above))

    return SliceProfile(direction=direction, invariant_kind=_INVARIANT_KIND[d],
                        samples=samples, node_coordinates=merged, jumps=jumps)
