"""Exceptional spectrum of the asymmetric quantum Rabi model (AQRM) and its
spectrally matched hyperbolic Schrodinger potentials.

The package computes the quasi-exactly-solved part of the AQRM spectrum
through constraint polynomials and Gaudin-type algebraic (Bethe) equations,
constructs the equivalent generalised Poschl-Teller potentials, and verifies
both the closed-form solutions and the full spectral correspondence
numerically.  See the README for the command-line interface.
"""

from .errors import (
    ConvergenceError,
    DegenerateAtomicLimitWarning,
    EvaluationRangeError,
    MapSingularityError,
    MeshError,
    RabiPtError,
    ResonantParameterError,
    RootCollisionError,
    SingularPointError,
    TruncationError,
)
from .model import (
    Branch,
    EnergyLevel,
    ModelParams,
    Spectrum,
    from_cqed,
    qes_energy,
    regular_spectrum,
    rescaled_level,
)
from .constraint import (
    MAX_DEGREE,
    QesPoint,
    QSequence,
    constraint_poly_coefficients,
    constraint_poly_eval,
    q_sequence,
    qes_points,
    qp_proportionality_residual,
)
from .bethe import (
    BetheRoots,
    GaudinParams,
    bethe_residuals,
    constraint_residual,
    q_from_roots,
    solve_bethe,
    to_gaudin,
)
from .potentials import (
    CanonicalQesForm,
    FullCoefficients,
    KkConstants,
    PotentialForm,
    PotentialKind,
    PotentialSpec,
    canonical_qes_form,
    evaluate_potential,
    full_coefficients,
    full_energy,
    full_potential,
    gaudin_potential,
    gaudin_wavefunction,
    kk_constants,
    partner_component,
    qes_potential,
    qes_wavefunction,
)
from .schrodinger import (
    ConnectionResult,
    Grid,
    connection_wronskian,
    eigenvalue_scan,
    fd_eigensolve,
    indicial_exponent,
    matched_wronskian,
    residual_check,
    segment_wronskian,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "ModelParams",
    "EnergyLevel",
    "Spectrum",
    "from_cqed",
    "qes_energy",
    "rescaled_level",
    "regular_spectrum",
    "MAX_DEGREE",
    "QesPoint",
    "QSequence",
    "constraint_poly_eval",
    "constraint_poly_coefficients",
    "qes_points",
    "q_sequence",
    "qp_proportionality_residual",
    "BetheRoots",
    "GaudinParams",
    "bethe_residuals",
    "solve_bethe",
    "constraint_residual",
    "to_gaudin",
    "q_from_roots",
    "PotentialKind",
    "PotentialForm",
    "PotentialSpec",
    "FullCoefficients",
    "KkConstants",
    "CanonicalQesForm",
    "gaudin_potential",
    "gaudin_wavefunction",
    "qes_potential",
    "qes_wavefunction",
    "full_potential",
    "full_energy",
    "full_coefficients",
    "evaluate_potential",
    "canonical_qes_form",
    "partner_component",
    "kk_constants",
    "Grid",
    "ConnectionResult",
    "residual_check",
    "indicial_exponent",
    "matched_wronskian",
    "connection_wronskian",
    "segment_wronskian",
    "eigenvalue_scan",
    "fd_eigensolve",
    "RabiPtError",
    "ResonantParameterError",
    "RootCollisionError",
    "MapSingularityError",
    "SingularPointError",
    "EvaluationRangeError",
    "TruncationError",
    "ConvergenceError",
    "MeshError",
    "DegenerateAtomicLimitWarning",
    "__version__",
]
