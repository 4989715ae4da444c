"""Single-photon transport through a waveguide side-coupled to emitters with DDI."""

__version__ = "0.1.0"

from .core import (
    AsymmetricDdiOverride,
    ChainConfig,
    CoincidentEmitters,
    ConfigError,
    DipoleOrientation,
    EmptyChain,
    Emitter,
    NegativeRate,
    NonUnitVector,
    ScatteringResult,
    SingularSystem,
    WaveguideParams,
    validate_chain,
)
from .ddi import build_ddi_matrix, pair_ddi
from .scattering import (
    gap_phases,
    single_emitter,
    solve_chain,
    two_emitter_asymmetric,
    two_emitter_symmetric,
)
from .analysis import (
    estimate_ddi_from_fano,
    find_features,
    predict_two_emitter_features,
    sweep_map,
    sweep_spectrum,
)
