"""Gamma-matrix representations and Dirac-type / bilinear Bloch operators.

The representations are fixed once and carry exact entries (0, +-1, +-i):
Pauli matrices for d=3 and the 4x4 generators

    g1 = s2 x s1,  g2 = s2 x s2,  g3 = s2 x s3,  g4 = s1 x 1,  g5 = s3 x 1

for d=4,5, with the antiunitary Theta = (1 x i*s2) o K squaring to -1 and
commuting with every linear generator.  Bilinear operators (i/2)[a.g, b.g]
anticommute with Theta instead and have spectrum +-( |a^b| +- |c^e| ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)


@dataclass(frozen=True)
class AntiUnitary:
    """Antiunitary operator V o K (K = complex conjugation)."""

    unitary: np.ndarray

    def conjugate(self, m: np.ndarray) -> np.ndarray:
        """Operator conjugation  Theta m Theta^{-1} = V conj(m) V^dagger."""
        v = self.unitary
        return v @ np.conj(m) @ v.conj().T

    def square(self) -> np.ndarray:
        return self.unitary @ np.conj(self.unitary)


@dataclass(frozen=True)
class GammaRep:
    """Irreducible Hermitian Clifford generators for T^d Hamiltonians."""

    d: int
    matrices: tuple[np.ndarray, ...]
    theta: AntiUnitary | None
    chirality: np.ndarray | None

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]


def gamma_rep(d: int) -> GammaRep:
    """Generator set for d in {3,4,5}; entries are exact."""
    if d == 3:
        return GammaRep(d=3, matrices=PAULI, theta=None, chirality=None)
    if d not in (4, 5):
        raise ValueError(f"unsupported dimension {d}")
    eye = np.eye(2, dtype=complex)
    g1 = np.kron(SIGMA_2, SIGMA_1)
    g2 = np.kron(SIGMA_2, SIGMA_2)
    g3 = np.kron(SIGMA_2, SIGMA_3)
    g4 = np.kron(SIGMA_1, eye)
    g5 = np.kron(SIGMA_3, eye)
    theta = AntiUnitary(unitary=np.kron(eye, 1j * SIGMA_2))
    mats = (g1, g2, g3, g4) if d == 4 else (g1, g2, g3, g4, g5)
    return GammaRep(d=d, matrices=mats, theta=theta, chirality=g5)


@dataclass(frozen=True)
class BlochOperator:
    """A single Bloch Hamiltonian value: Hermitian, traceless."""

    matrix: np.ndarray
    kind: str  # "dirac" | "bilinear"
    k: tuple | None = None

    def __post_init__(self):
        m = self.matrix
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > 1e-10 * scale:
            raise ValueError("Bloch operator must be Hermitian")
        if abs(np.trace(m)) > 1e-10 * scale:
            raise ValueError("Bloch operator must be traceless")


def dirac_hamiltonian(h, rep: GammaRep, k=None) -> BlochOperator:
    """H = sum_i h_i gamma_i; eigenvalues +-|h|, each with multiplicity n/2."""
    h = np.asarray(h, dtype=float)
    if h.shape != (rep.d,):
        raise ValueError(f"h must have {rep.d} real components")
    m = sum(hi * gi for hi, gi in zip(h, rep.matrices))
    if np.isscalar(m):  # h = 0 edge case never hits: sum of arrays
        m = np.zeros((rep.dim, rep.dim), dtype=complex)
    return BlochOperator(matrix=np.asarray(m, dtype=complex), kind="dirac", k=k)


def fermi_projector(h, rep: GammaRep) -> np.ndarray:
    """Valence projector P = (1 - h_hat . gamma)/2 for a nonzero h."""
    h = np.asarray(h, dtype=float)
    norm = np.linalg.norm(h)
    if norm < 1e-12:
        raise ValueError("on node: Fermi projector undefined where the field vanishes")
    unit = h / norm
    n = rep.dim
    m = np.eye(n, dtype=complex)
    for hi, gi in zip(unit, rep.matrices):
        m = m - hi * gi
    return 0.5 * m


def bilinear_hamiltonian(a, b, c=None, e=None, rep: GammaRep | None = None, k=None) -> BlochOperator:
    """H = (i/2)[a.g, b.g] + (i/2)[c.g, e.g]; particle-hole symmetric (d=5)."""
    if rep is None:
        rep = gamma_rep(5)
    if rep.d != 5:
        raise ValueError("bilinear Hamiltonians are defined for d = 5")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ag = dirac_hamiltonian(a, rep).matrix
    bg = dirac_hamiltonian(b, rep).matrix
    m = 0.5j * (ag @ bg - bg @ ag)
    if c is not None and e is not None:
        cg = dirac_hamiltonian(np.asarray(c, dtype=float), rep).matrix
        eg = dirac_hamiltonian(np.asarray(e, dtype=float), rep).matrix
        m = m + 0.5j * (cg @ eg - eg @ cg)
    return BlochOperator(matrix=m, kind="bilinear", k=k)


def wedge_magnitude(a, b) -> float:
    """|a ^ b| = sqrt(|a|^2 |b|^2 - (a.b)^2)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    g = np.dot(a, a) * np.dot(b, b) - np.dot(a, b) ** 2
    return float(np.sqrt(max(g, 0.0)))


def bilinear_spectrum(lam: float, mu: float) -> np.ndarray:
    """Sorted eigenvalues {+-(lam+mu), +-(lam-mu)} of a two-pair bilinear operator."""
    if lam < 0 or mu < 0:
        raise ValueError("wedge magnitudes must be nonnegative")
    return np.sort(np.array([lam + mu, -(lam + mu), lam - mu, -(lam - mu)]))


def orthogonalize_second_pair(a, b, c, e):
    """Project the second pair off span(a, b); the closed-form spectrum needs
    the two planes orthogonal."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    basis = []
    for v in (a, b):
        w = v.copy()
        for u in basis:
            w = w - np.dot(w, u) * u
        n = np.linalg.norm(w)
        if n > 1e-14:
            basis.append(w / n)
    out = []
    for v in (np.asarray(c, dtype=float), np.asarray(e, dtype=float)):
        w = v.copy()
        for u in basis:
            w = w - np.dot(w, u) * u
        out.append(w)
    return out[0], out[1]


def chiral_unitary(h) -> np.ndarray:
    """SU(2) value of the flattened chiral Hamiltonian for a unit 4-vector h:

        U = [[h4 + i h3, h2 + i h1], [-h2 + i h1, h4 - i h3]].
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (4,):
        raise ValueError("chiral unitary needs a 4-component vector")
    if abs(np.linalg.norm(h) - 1.0) > 1e-9:
        raise ValueError("chiral unitary needs a unit vector")
    h1, h2, h3, h4 = h
    return np.array([[h4 + 1j * h3, h2 + 1j * h1],
                     [-h2 + 1j * h1, h4 - 1j * h3]])


def symmetry_check(op: BlochOperator, symmetry: str, rep: GammaRep, tol: float = 1e-10) -> int:
    """Signed verdict for a symmetry relation.

    symmetry "T": Theta H Theta^-1 = +H expected;
    symmetry "C": Theta H Theta^-1 = -H expected;
    symmetry "S": g5 H g5^-1 = -H expected.
    Returns +1 if the expected relation holds within tol, -1 if the opposite
    sign holds, 0 if neither (indeterminate).
    """
    h = op.matrix
    if symmetry in ("T", "C"):
        if rep.theta is None:
            raise ValueError("representation carries no antiunitary operator")
        transformed = rep.theta.conjugate(h)
        expected_sign = +1 if symmetry == "T" else -1
    elif symmetry == "S":
        if rep.chirality is None:
            raise ValueError("representation carries no chirality operator")
        s = rep.chirality
        transformed = s @ h @ s  # s^2 = 1
        expected_sign = -1
    else:
        raise ValueError(f"unknown symmetry {symmetry!r}")
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(transformed - expected_sign * h)) < tol * scale:
        return +1
    if np.max(np.abs(transformed + expected_sign * h)) < tol * scale:
        return -1
    return 0


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver for small Hermitian matrices.  Kept dependency-
# light and used as the independent oracle against the closed-form spectra.


def jacobi_eigh(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix by
    cyclic Jacobi rotations; accurate to ~1e-12 for n <= 4."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > 1e-9 * scale:
        raise ValueError("matrix must be Hermitian")
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off < tol * scale:
            break
        for p in range(n):
            for q in range(p + 1, n):
                g = a[p, q]
                if abs(g) <= tol * scale * 1e-2:
                    continue
                alpha = a[p, p].real
                beta = a[q, q].real
                phase = g / abs(g)
                tau = (alpha - beta) / (2.0 * abs(g))
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                r = np.eye(n, dtype=complex)
                r[p, p] = c
                r[q, q] = c
                r[p, q] = -s * phase
                r[q, p] = s * np.conj(phase)
                a = r.conj().T @ a @ r
                v = v @ r
    order = np.argsort(np.diag(a).real)
    return np.diag(a).real[order], v[:, order]


def group_degenerate(values: np.ndarray, rtol: float = 1e-8):
    """Group sorted eigenvalues into degenerate clusters.

    Tolerance is relative to the spectral radius.
    """
    values = np.sort(np.asarray(values, dtype=float))
    radius = max(1e-300, float(np.max(np.abs(values))))
    groups: list[list[float]] = []
    for x in values:
        if groups and abs(x - groups[-1][-1]) <= rtol * radius:
            groups[-1].append(float(x))
        else:
            groups.append([float(x)])
    return [(float(np.mean(g)), len(g)) for g in groups]
