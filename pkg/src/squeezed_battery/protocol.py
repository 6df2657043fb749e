"""One-call evaluation of a charging stroke: steady state, bookkeeping and power."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import BathSpec, DriveSpec, Trajectory, drift_diffusion, evolve, stability_check, steady_state
from .errors import ConvergenceError, InvalidParameter, UnstableDynamics
from .gaussian import GaussianState, thermal_state
from .speedlimit import SpeedReport, charging_power, truncation_time
from .thermo import DEFAULT_T_CONVENTION, T_CONVENTIONS, ThermoReport, temperature, thermo_report

DEFAULT_EPS_SS = 1e-6
DEFAULT_DT_REPORT = 2e-3


@dataclass(frozen=True, eq=False)
class ChargingResult:
    sigma_A: GaussianState
    sigma_B: GaussianState
    thermo: ThermoReport
    speed: SpeedReport | None = None
    trajectory: Trajectory | None = None


def charged_state(drive: DriveSpec, bath: BathSpec) -> GaussianState:
    """Non-equilibrium steady state reached for an infinitely long charging window."""
    report = stability_check(drive, bath)
    if not report.stable:
        raise UnstableDynamics(
            f"no steady state: max Re eig(A) = {report.eigenvalues.real.max():.4g}"
        )
    return steady_state(drift_diffusion(drive, bath))


def thermo_point(drive: DriveSpec, bath: BathSpec, t_convention: str = DEFAULT_T_CONVENTION):
    sigma_A = thermal_state(bath.N_A)
    sigma_B = charged_state(drive, bath)
    T = temperature(t_convention, drive.mu, bath.N_B)
    return ChargingResult(sigma_A, sigma_B, thermo_report(sigma_A, sigma_B, drive.mu, drive.lam, T))


def charging_trajectory(drive: DriveSpec, bath: BathSpec, dt: float = DEFAULT_DT_REPORT,
                        eps_ss: float = DEFAULT_EPS_SS, horizon: float | None = None,
                        max_horizon: float = 1e4) -> Trajectory:
    """
    Trajectory from the thermal preparation until it sits within ``eps_ss`` of the steady state.

    Without an explicit ``horizon`` the window is estimated from the slowest
    decay rate of the drift and doubled until the truncation criterion is met.
    """
    dd = drift_diffusion(drive, bath)
    sigma_A = thermal_state(bath.N_A)
    sigma_B = steady_state(dd)
    rate = -float(np.max(np.linalg.eigvals(dd.A).real))
    if horizon is None:
        gap = max(np.max(np.abs(sigma_A.cov - sigma_B.cov)), 1e-300)
        logs = math.log(max(gap / (eps_ss * np.max(np.abs(sigma_B.cov))), 1.0))
        horizon = 1.25 * (logs + 8.0) / (2.0 * rate)
        fixed = False
    else:
        fixed = True
    while True:
        n = int(math.ceil(horizon / dt))
        traj = evolve(sigma_A, dd, np.linspace(0.0, n * dt, n + 1))
        try:
            truncation_time(traj, sigma_B, eps_ss)
            return traj
        except ConvergenceError:
            if fixed or horizon * 2 > max_horizon:
                raise
            horizon *= 2


def power_point(drive: DriveSpec, bath: BathSpec, t_convention: str = DEFAULT_T_CONVENTION,
                formula: str = "paper", eps_ss: float = DEFAULT_EPS_SS,
                dt: float = DEFAULT_DT_REPORT, horizon: float | None = None,
                keep_trajectory: bool = False) -> ChargingResult:
    base = thermo_point(drive, bath, t_convention)
    traj = charging_trajectory(drive, bath, dt=dt, eps_ss=eps_ss, horizon=horizon)
    speed = charging_power(traj, base.thermo, base.sigma_B, formula=formula, eps_ss=eps_ss)
    return ChargingResult(base.sigma_A, base.sigma_B, base.thermo, speed,
                          traj if keep_trajectory else None)


def convention_efficiencies(lam: float = 1e-3, occupation: float = 1.0, gamma: float = 1.0,
                            mu: float = 1.0) -> dict:
    """Weak-drive efficiency under each temperature convention (N_A = N_B, unsqueezed bath)."""
    drive = DriveSpec(mu=mu, lam=lam)
    bath = BathSpec(gamma=gamma, N_B=occupation, N_A=occupation)
    return {name: thermo_point(drive, bath, name).thermo.eta for name in T_CONVENTIONS}


def select_temperature_convention(target: float = 0.5, tol: float = 0.01, **kwargs) -> str:
    """
    Pick the temperature convention whose weak-drive efficiency lands on ``target``.

    Raises ``InvalidParameter`` unless exactly one convention is within ``tol``.
    Keyword arguments are forwarded to :func:`convention_efficiencies`.
    """
    etas = convention_efficiencies(**kwargs)
    hits = [name for name, eta in etas.items() if abs(eta - target) <= tol]
    if len(hits) != 1:
        raise InvalidParameter(f"expected one matching convention, got {hits} from {etas}")
    return hits[0]
