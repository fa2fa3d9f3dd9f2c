"""heraldlab: deterministic simulator of heralded single-photon double-slit
experiments.

A wave-optics core (centered unitary transforms, Fresnel propagation, lenses,
masks, imaging relays) drives a two-photon joint-amplitude model of a
correlated pair source.  Heralding the partner photon through single- or
multimode collection produces the conditional camera-plane densities of four
measurement arrangements (heralded/ghost imaging and diffraction); a seeded
Monte Carlo detection chain then renders photon-by-photon intensified video
frames, and the analysis module measures fringe period, visibility, and
widths.  All randomness derives from one master seed; outputs are
reproducible bit for bit.
"""

from .analysis import (
    Profile,
    band_centroid,
    cross_section,
    fringe_period,
    rms_width,
    visibility,
)
from .biphoton import (
    JointAmplitude,
    MixedEnsemble,
    double_gaussian,
    gaussian_mode,
    herald_multimode,
    herald_project,
    hermite_gauss_modes,
    momentum_joint,
    position_correlation,
    schmidt_decompose,
    validate_energy,
)
from .detect import (
    DetectorParams,
    EventStream,
    FrameStack,
    TriggerStats,
    intensify,
    pixel_pmf,
    plan_video_ramp,
    sample_events,
    timeline_stats,
)
from .errors import (
    AliasingWarning,
    ConfigError,
    ConstraintError,
    MalformedValueError,
    NoFringeError,
    PhysicsError,
    UnknownKeyError,
)
from .experiments import (
    ExperimentConfig,
    ProbabilityMap,
    advanced_wave_predict,
    fringe_period_theory,
    run_experiment,
    unheralded_far_field,
)
from .field import (
    Axis,
    ComplexField,
    fresnel_propagate,
    ft_centered,
    gaussian_field,
    ift_centered,
    resample_field,
)
from .kernels import BACKEND, COMPILED_AVAILABLE
from .optics import (
    FourierLens,
    FreeSpace,
    Imaging4f,
    Mask,
    ThinLens,
    adjoint_system,
    apply_element,
    apply_system,
    double_slit,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "COMPILED_AVAILABLE",
    # errors
    "AliasingWarning",
    "ConfigError",
    "UnknownKeyError",
    "MalformedValueError",
    "ConstraintError",
    "PhysicsError",
    "NoFringeError",
    # field
    "Axis",
    "ComplexField",
    "ft_centered",
    "ift_centered",
    "gaussian_field",
    "fresnel_propagate",
    "resample_field",
    # optics
    "FreeSpace",
    "ThinLens",
    "Mask",
    "FourierLens",
    "Imaging4f",
    "apply_element",
    "apply_system",
    "adjoint_system",
    "double_slit",
    # biphoton
    "JointAmplitude",
    "MixedEnsemble",
    "double_gaussian",
    "momentum_joint",
    "position_correlation",
    "schmidt_decompose",
    "gaussian_mode",
    "hermite_gauss_modes",
    "herald_project",
    "herald_multimode",
    "validate_energy",
    # experiments
    "ExperimentConfig",
    "ProbabilityMap",
    "run_experiment",
    "advanced_wave_predict",
    "unheralded_far_field",
    "fringe_period_theory",
    # detect
    "DetectorParams",
    "TriggerStats",
    "EventStream",
    "FrameStack",
    "timeline_stats",
    "pixel_pmf",
    "sample_events",
    "intensify",
    "plan_video_ramp",
    # analysis
    "Profile",
    "cross_section",
    "fringe_period",
    "visibility",
    "rms_width",
    "band_centroid",
]
