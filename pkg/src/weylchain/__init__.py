"""Topological analysis of semimetal band structures on the Brillouin torus."""

from .charge import ChargeChain, degree_sphere_map, local_charge, poincare_hopf_verify, slice_degree
from .clifford import (BlochOperator, GammaRep, bilinear_hamiltonian, bilinear_spectrum,
                       chiral_unitary, dirac_hamiltonian, fermi_projector, gamma_rep,
                       jacobi_eigh, symmetry_check)
from .grid import SphereMesh, TorusGrid, make_grid, sphere_mesh
from .nodes import FieldSpec, WeylNode, locate_zeros, min_separation

__all__ = [
    "BlochOperator", "ChargeChain", "FieldSpec", "GammaRep", "SphereMesh", "TorusGrid",
    "WeylNode", "bilinear_hamiltonian", "bilinear_spectrum", "chiral_unitary",
    "degree_sphere_map", "dirac_hamiltonian", "fermi_projector", "gamma_rep",
    "jacobi_eigh", "local_charge", "locate_zeros", "make_grid", "min_separation",
    "poincare_hopf_verify", "slice_degree", "sphere_mesh", "symmetry_check",
]

__version__ = "0.1.0"
