"""Gaussian-state simulator for a four-wave-mixing twin-beam amplifier."""

from ._kernels import BACKEND as kernel_backend
from .amplifier import (
    AngularGainModel,
    CellModel,
    TwoModeSqueezerSpec,
    angular_gain,
    distributed_cell_output,
    estimate_mode_count,
    evolve_fwm,
    gain_for_quadrature_db,
    seeded_amplifier_output,
    squeeze_parameter,
    tms_symplectic,
)
from .core import (
    CONJUGATE,
    PROBE,
    Beam,
    GaussianChannel,
    GaussianState,
    ModeLabel,
    SymplecticOp,
    apply_channel,
    apply_symplectic,
    beamsplitter,
    displace,
    loss_channel,
    phase_rotation,
    photon_stats,
    quadrature_variance,
    symplectic_eigenvalues,
    vacuum_state,
)
from .detection import (
    HomodyneSpec,
    NoiseTrace,
    TechnicalNoiseSpec,
    apply_technical_noise,
    homodyne_variance,
    intensity_difference_db,
    joint_phase_scan,
    sql_intensity_difference,
)
from .entanglement import (
    EntanglementReport,
    generalized_variances,
    inseparability,
    squeezing_db,
)
from .errors import (
    ConfigError,
    MeasurementUndefinedError,
    ModeLookupError,
    PgmFormatError,
    PhysicalityError,
    ResourceBudgetError,
    TwinbeamError,
    ValidationError,
)
from .imaging import (
    BeamImage,
    Mask,
    PairBlockState,
    PixelGrid,
    RegionSelector,
    amplify_image,
    lo_profile_from_mask,
    load_mask,
    load_region,
    masked_seed,
    region_weights,
    subregion_intensity_difference_db,
)

__version__ = "0.1.0"
