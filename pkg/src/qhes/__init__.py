"""State-vector simulation of quantum eigenvalue estimation and eigenstate selection."""

from .amplify import FixedPointConfig, Initializer, MarkingOracle, fixed_point_amplify
from .circuit import Circuit
from .config import RunConfig, load_config
from .dirac import CoinConfig, dirac_frozen, dirac_primary
from .eigensolver import (
    DichotomyTrace,
    JudgeVerdict,
    SelectorResult,
    dichotomy_lowest,
    estimate_gap,
    ground_state_pipeline,
    next_eigenvalue,
    quantum_judge,
    quantum_selector,
)
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateInputError,
    DomainError,
    LayoutError,
    ParseError,
    QhesError,
    ResourceError,
    ValidationError,
)
from .hamiltonian import AffineSpectrumMap, PauliHamiltonian, ising_chain, normalize_spectrum, spectrum_map
from .heaviside import FilterConfig, heaviside_frozen, heaviside_primary
from .qpe import kappa_analytic, qpe_apply
from .reference import SpectrumReference, brute_force_eigs, predict_dirac, predict_heaviside
from .state import RegisterLayout, StateVector

__version__ = "0.1.0"

__all__ = [
    "AffineSpectrumMap",
    "CapacityError",
    "Circuit",
    "CoinConfig",
    "ConfigError",
    "DegenerateInputError",
    "DichotomyTrace",
    "DomainError",
    "FilterConfig",
    "FixedPointConfig",
    "Initializer",
    "JudgeVerdict",
    "LayoutError",
    "MarkingOracle",
    "ParseError",
    "PauliHamiltonian",
    "QhesError",
    "RegisterLayout",
    "ResourceError",
    "RunConfig",
    "SelectorResult",
    "SpectrumReference",
    "StateVector",
    "ValidationError",
    "brute_force_eigs",
    "dichotomy_lowest",
    "dirac_frozen",
    "dirac_primary",
    "estimate_gap",
    "ising_chain",
    "fixed_point_amplify",
    "ground_state_pipeline",
    "heaviside_frozen",
    "heaviside_primary",
    "kappa_analytic",
    "load_config",
    "next_eigenvalue",
    "normalize_spectrum",
    "predict_dirac",
    "predict_heaviside",
    "qpe_apply",
    "quantum_judge",
    "quantum_selector",
    "spectrum_map",
]
