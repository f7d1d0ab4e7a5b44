"""Exact torsion invariants of cochain complexes, prime-order symmetries, and
twisted conjugacy in finite groups."""

__version__ = "0.1.0"

from .complexes import CochainComplex, cohomology
from .rtorsion import analytic_torsion_fd, rt_via_cohomology, rt_via_determinant_line

__all__ = ["CochainComplex", "cohomology", "analytic_torsion_fd", "rt_via_cohomology",
           "rt_via_determinant_line", "__version__"]
