"""
Gaussian quantum battery charged by a squeezing drive inside a squeezed thermal bath.

Covariance matrices use the vacuum = identity normalization and the quadrature
ordering ``x1, p1, x2, p2, ...``.
"""
from .dynamics import (
    BathSpec,
    DriftDiffusion,
    DriveSpec,
    LindbladSpec,
    StabilityReport,
    Trajectory,
    bona_fide_check,
    closed_energy_analytic,
    drift_diffusion,
    evolve,
    evolve_window,
    hamiltonian_matrix,
    jump_vectors,
    stability_check,
    steady_state,
)
from .errors import (
    BatteryError,
    ConfigError,
    ConvergenceError,
    InvalidParameter,
    NotSymplectic,
    SingularSystem,
    SingularTrajectory,
    UndefinedEfficiency,
    UnphysicalState,
    UnstableDynamics,
)
from .gaussian import (
    ChannelSpec,
    GaussianState,
    apply_symplectic,
    check_physicality,
    direct_sum,
    euler_charged_cov,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_occupation,
    thermal_state,
    vacuum_state,
)
from .protocol import (
    charged_state,
    charging_trajectory,
    power_point,
    select_temperature_convention,
    thermo_point,
)
from .speedlimit import (
    FidelityBreakdown,
    SpeedReport,
    bures_ds,
    bures_length,
    charging_power,
    fidelity,
    fidelity_multimode,
    fidelity_single_mode,
    instantaneous_speed,
    integral_velocity,
)
from .sweep import SweepConfig, closed_report, load_config, load_preset, optimize_theta, run_scenario
from .thermo import (
    ThermoReport,
    closed_delta_E,
    delta_E,
    efficiency,
    free_energy_change,
    internal_energy,
    temperature,
    thermo_report,
    von_neumann_entropy,
    work_heat,
)

__version__ = "0.1.0"
