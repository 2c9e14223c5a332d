"""Exact workbench for 4-dimensional real Lie bialgebras of symplectic type.

Exact-rational Lie algebra machinery, classical r-matrices, invariant frames
and Poisson bivectors on the corresponding groups, equivalence witnesses,
and two integrable systems -- all cross-checked against a transcribed
reference table corpus.
"""

from .core import (
    StructureConstants,
    TwoFormLA,
    build_double,
    ce_differential,
    cocommutator,
    find_symplectic,
    jacobi_check,
    mixed_jacobi_check,
)
from .rmatrix import (
    TensorElement,
    classify_r,
    cocommutator_from_r,
    schouten,
    solve_coboundary,
)
from .groupgeom import GroupChart, double_adjoint, invariant_frame
from .poisson import (
    PoissonBivector,
    linearization_check,
    pi_bivector,
    poisson_jacobi_check,
    sklyanin_bivector,
    symplectic_classify,
)
from .equivalence import (
    WitnessMatrix,
    search_witness,
    verify_automorphism,
    verify_bialgebra_equivalence,
    verify_isomorphism,
)

__all__ = [
    "StructureConstants",
    "TwoFormLA",
    "TensorElement",
    "PoissonBivector",
    "GroupChart",
    "WitnessMatrix",
    "jacobi_check",
    "mixed_jacobi_check",
    "build_double",
    "cocommutator",
    "ce_differential",
    "find_symplectic",
    "solve_coboundary",
    "schouten",
    "classify_r",
    "cocommutator_from_r",
    "invariant_frame",
    "double_adjoint",
    "sklyanin_bivector",
    "pi_bivector",
    "poisson_jacobi_check",
    "linearization_check",
    "symplectic_classify",
    "verify_isomorphism",
    "verify_automorphism",
    "verify_bialgebra_equivalence",
    "search_witness",
]

__version__ = "0.1.0"
