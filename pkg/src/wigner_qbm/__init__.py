"""Phase-space dynamics of the damped quantum harmonic oscillator.

The package computes the Gaussian Wigner propagating function of an
oscillator bilinearly coupled to an Ohmic heat bath, the nonclassical
stationary trajectory pairs behind it, its thermal asymptotics, and an
exact finite-bath microscopic cross-check.
"""

from .errors import (
    CausticError,
    ConvergenceError,
    DegenerateCovarianceError,
    DiagonalizationError,
    FitWindowError,
    GridMismatchError,
    PoleDegeneracyError,
    QuadratureError,
    StrictOhmicDeltaError,
    UnderresolvedKernelError,
    WignerQbmError,
)
from .model import (
    DRUDE_OHMIC,
    STRICT_OHMIC,
    CausticSet,
    DampingSpec,
    GreenPair,
    PhasePoint,
    SystemParams,
    caustics,
    classical_map,
    make_green_pair,
)
from .kernels import (
    EXACT_DRUDE,
    HIGH_T_DELTA,
    NoiseKernel,
    friction_delta_strength,
    friction_kernel,
    noise_kernel,
    noise_kernel_real,
    spectral_density,
)
from .correlation import (
    CorrelationTable,
    DrudeCorrelation,
    DrudeGreenPair,
    autocorrelation,
    drude_green_pair,
    green_from_antisymmetric,
)
from .propagator import (
    CovarianceData,
    GaussianWigner,
    abc_closed,
    abc_asymptotic,
    abc_quadrature,
    action_exponents,
    covariance_data,
    fluctuation_prefactor,
    influence_phase,
    propagating_function,
    propagating_kernel,
    psi,
    thermal_state,
    thermal_wigner,
)
from .trajectories import (
    TrajectoryPair,
    pair_invariant,
    phase_space_lift,
    separation_rate,
    stationary_pair,
)
from .evolution import (
    GridWigner,
    evolve_gaussian,
    evolve_grid,
    gaussian_on_grid,
    moments,
)
from .oracle import (
    BathDiscretization,
    FullGaussianState,
    discretize_bath,
    evolve_full,
    flow_matrix,
    reduced_system_state,
    symplectic_form,
    thermal_full_state,
)

__version__ = "0.1.0"
