"""Exact symbolic calculus for necklace Lie algebras on doubled quivers.

The package works entirely over the rationals: cyclic words of a doubled
quiver's path algebra carry a Lie bracket, the noncommutative de Rham
calculus in degrees 0..2 supplies differentials, contractions and an
explicit Poincare homotopy, closed 2-forms admit formal Darboux
normalization, and the trace map sends all of it to honest polynomial
functions on spaces of quiver representations, moment map included.
"""

from .errors import (
    CompositionError,
    DegenerateFormError,
    DuplicateArrowNameError,
    MismatchedQuiversError,
    NonHomogeneousError,
    NotClosedError,
    ParseError,
    QuiverLieError,
    ReservedNameError,
    ShapeMismatchError,
    SingularMatrixError,
    UnknownArrowError,
    UnknownVertexError,
    ValidationError,
    WeightZeroError,
)
from .quiver import (
    DoubledQuiver,
    Path,
    PathAlgebraElement,
    Quiver,
    algebra_combine,
    compose_paths,
    double_quiver,
    one_loop_quiver,
)
from .necklace import (
    Derivation,
    Necklace,
    SymplecticData,
    bracket_tensor_oracle,
    canonical_rotation,
    cyclic_derivative,
    hamiltonian_derivation,
    necklace_bracket,
    project_to_necklace,
)
from .forms import (
    OneForm,
    TwoForm,
    contract,
    d,
    d0,
    d1,
    derivation_from_oneform,
    euler_derivation,
    euler_homotopy,
    lie_derivative,
    symplectic_two_form,
)
from .darboux import FormalAutomorphism, TSeries, darboux_normalize, pullback
from .poly import Poly
from .reps import (
    DimensionVector,
    MomentValue,
    Polarization,
    ProbeResult,
    RepPoint,
    entry_var,
    identify_copies,
    moment_map,
    moment_polynomial,
    poisson_oracle,
    polarize,
    trace_evaluate,
    trace_polynomial,
    trace_vanishing_probe,
    verify_homomorphism,
)
from .calogero import CMPoint, cm_membership, cm_point, cm_rep_point, coadjoint_eval, make_cm_point

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
