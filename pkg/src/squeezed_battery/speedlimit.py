"""
Fidelity, Bures distance and the Gaussian speed-limit estimate of the charging time.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import sqrtm

from .dynamics import Trajectory
from .errors import ConvergenceError, InvalidParameter, SingularTrajectory, UnphysicalState
from .gaussian import TOL_PHYS, GaussianState, symplectic_eigenvalues, symplectic_form

#: Floor for ``nu^2 - 1`` in the speed denominator.
EPS_NU = 1e-12

SPEED_FORMULAS = ("paper", "squared_derivative")


@dataclass(frozen=True)
class FidelityBreakdown:
    """Root fidelity together with the two determinants it is built from."""

    fidelity: float
    delta_cap: float
    lambda_cap: float


@dataclass(frozen=True, eq=False)
class SpeedReport:
    times: np.ndarray
    v: np.ndarray
    V_AB: float
    ds_AB: float
    ds_len: float
    t_trunc: float
    delta_t: float
    power: float

    @property
    def v_samples(self):
        return list(zip(self.times.tolist(), self.v.tolist()))


def _cov(x) -> np.ndarray:
    return x.cov if isinstance(x, GaussianState) else np.asarray(x, dtype=float)


def _check_pair(a, b):
    if a.shape != b.shape:
        raise InvalidParameter(f"shape mismatch {a.shape} vs {b.shape}")
    for c in (a, b):
        if symplectic_eigenvalues(c)[0] < 1 - TOL_PHYS:
            raise UnphysicalState("fidelity needs physical covariance matrices")


def fidelity_single_mode(sigma_A, sigma_B) -> FidelityBreakdown:
    """
    Uhlmann root fidelity of two zero-mean single-mode states.

    ``F^2 = 1/(sqrt(Delta + Lambda) - sqrt(Lambda))`` with
    ``Delta = det((sA + sB)/2)`` and ``Lambda = 4 det((sA + i Omega)/2) det((sB + i Omega)/2)``.
    """
    a, b = _cov(sigma_A), _cov(sigma_B)
    if a.shape != (2, 2):
        raise InvalidParameter("single-mode fidelity needs 2x2 covariance matrices")
    _check_pair(a, b)
    delta = float(np.linalg.det((a + b) / 2))
    # det(s + i Omega) = det(s) - 1 for a single mode
    lam = max(0.0, (np.linalg.det(a) - 1) * (np.linalg.det(b) - 1) / 4)
    # 1/(sqrt(D+L) - sqrt(L)) rewritten without the cancellation
    f2 = (np.sqrt(delta + lam) + np.sqrt(lam)) / delta
    return FidelityBreakdown(float(min(1.0, np.sqrt(f2))), delta, float(lam))


def fidelity_multimode(sigma_A, sigma_B) -> FidelityBreakdown:
    """
    Uhlmann root fidelity of two zero-mean n-mode states.

    Uses the auxiliary matrix ``s_aux = Omega^T ((sA + sB)/2)^{-1} (Omega/4 + sB Omega sA/4)``
    and ``F = F_tot / det((sA + sB)/2)^{1/4}`` with
    ``F_tot^4 = det[2 (sqrt(1 + (s_aux Omega)^{-2}/4) + 1) s_aux]``.
    The breakdown's ``lambda_cap`` holds ``F_tot``.
    """
    a, b = _cov(sigma_A), _cov(sigma_B)
    _check_pair(a, b)
    n = a.shape[0] // 2
    omega = symplectic_form(n)
    avg = (a + b) / 2
    if abs(np.linalg.det(avg)) < 1e-300:
        raise InvalidParameter("sigma_A + sigma_B is singular")
    aux = omega.T @ np.linalg.solve(avg, omega / 4 + b @ omega @ a / 4)
    eye = np.eye(2 * n)
    w = np.linalg.inv(aux @ omega)
    root = sqrtm(eye + w @ w / 4)
    f_tot4 = np.linalg.det(2 * (root + eye) @ aux).real
    f_tot = max(f_tot4, 0.0) ** 0.25
    delta = float(np.linalg.det(avg))
    return FidelityBreakdown(float(min(1.0, f_tot / delta**0.25)), delta, float(f_tot))


def fidelity(sigma_A, sigma_B) -> float:
    a = _cov(sigma_A)
    if a.shape == (2, 2):
        return fidelity_single_mode(sigma_A, sigma_B).fidelity
    return fidelity_multimode(sigma_A, sigma_B).fidelity


def bures_ds(sigma_A, sigma_B) -> float:
    """``2 (1 - F)``, the squared Bures length, used as the distance in the time ratio."""
    return 2.0 * (1.0 - fidelity(sigma_A, sigma_B))


def bures_length(sigma_A, sigma_B) -> float:
    """Bures distance ``sqrt(2 (1 - F))``."""
    return float(np.sqrt(bures_ds(sigma_A, sigma_B)))


def instantaneous_speed(traj: Trajectory, formula: str = "paper", eps_nu: float = EPS_NU):
    """
    Riemannian speed along a trajectory from the symplectic spectrum.

    ``"paper"`` evaluates ``v^2 = 1/4 sum_j dnu_j/dt / (nu_j^2 - 1)`` and takes
    ``v = sqrt(|v^2|)`` because the spectrum need not grow monotonically;
    ``"squared_derivative"`` evaluates ``v^2 = 1/4 sum_j (dnu_j/dt)^2 / (nu_j^2 - 1)``.

    Returns ``(times, v)``. A pure first sample yields ``v[0] = inf`` (an
    integrable ``t^{-1/2}`` endpoint); any other pure sample raises
    ``SingularTrajectory``.
    """
    if formula not in SPEED_FORMULAS:
        raise InvalidParameter(f"unknown speed formula {formula!r}")
    if len(traj) < 3:
        raise InvalidParameter("speed needs at least three trajectory samples")
    t = traj.times
    nu = traj.spectra
    dnu = np.gradient(nu, t, axis=0, edge_order=2)
    gap = nu**2 - 1
    pure = gap < eps_nu
    if np.any(pure[1:]):
        raise SingularTrajectory("trajectory passes through (or stays on) pure states")
    gap = np.maximum(gap, eps_nu)
    num = dnu if formula == "paper" else dnu**2
    v2 = 0.25 * np.sum(num / gap, axis=1)
    v = np.sqrt(np.abs(v2))
    if np.any(pure[0]):
        v[0] = np.inf
    return t.copy(), v


def integral_velocity(times, v, t_end: float | None = None) -> float:
    """
    Trapezoidal integral of the speed from ``times[0]`` to ``t_end``.

    An infinite first sample is treated as a ``c/sqrt(t)`` endpoint, for
    which the first panel integrates to ``2 v[1] (t[1] - t[0])``.
    """
    times, v = np.asarray(times, dtype=float), np.asarray(v, dtype=float)
    if len(times) == 0:
        raise InvalidParameter("no speed samples")
    if len(times) == 1:
        return 0.0
    if t_end is not None and t_end < times[-1]:
        k = int(np.searchsorted(times, t_end, side="right"))
        v_end = np.interp(t_end, times[k - 1:k + 1], v[k - 1:k + 1]) if k < len(times) else v[-1]
        times = np.append(times[:k], t_end)
        v = np.append(v[:k], v_end)
    if np.isinf(v[0]):
        head = 2.0 * v[1] * (times[1] - times[0])
        return float(head + np.trapezoid(v[1:], times[1:]))
    return float(np.trapezoid(v, times))


def truncation_time(traj: Trajectory, sigma_inf, eps_ss: float = 1e-6) -> float:
    """
    First time at which ``max|sigma(t) - s_inf| < eps_ss * max|s_inf|``.

    The crossing is located between samples by interpolating the logarithm of
    the distance, which decays exponentially once the transient is over.
    """
    s_inf = _cov(sigma_inf)
    dist = np.max(np.abs(traj.covs - s_inf), axis=(1, 2))
    level = eps_ss * np.max(np.abs(s_inf))
    below = np.nonzero(dist < level)[0]
    if len(below) == 0:
        raise ConvergenceError(
            f"trajectory does not come within {eps_ss:g} of the steady state by t={traj.times[-1]:.4g}"
        )
    i = below[0]
    if i == 0:
        return float(traj.times[0])
    d0, d1 = np.log(dist[i - 1]), np.log(max(dist[i], 1e-300))
    frac = (d0 - np.log(level)) / (d0 - d1)
    return float(traj.times[i - 1] + frac * (traj.times[i] - traj.times[i - 1]))


def charging_power(traj: Trajectory, report, sigma_inf, formula: str = "paper",
                   eps_ss: float = 1e-6) -> SpeedReport:
    """
    Average charging power ``P = dF / dt`` from the speed-limit time estimate.

    ``dt = ds_AB * t_trunc / V_AB`` where ``ds_AB = 2(1 - F(sigma_A, s_inf))``,
    ``t_trunc`` is the truncation time and ``V_AB`` the speed integrated over
    ``[0, t_trunc]``.

    Parameters
    ----------
    traj : Trajectory
        Charging trajectory starting from the discharged state at ``t = 0``.
    report : ThermoReport
        Supplies ``delta_F``.
    sigma_inf : GaussianState or ndarray
        Charged steady state.
    """
    t_trunc = truncation_time(traj, sigma_inf, eps_ss)
    times, v = instantaneous_speed(traj, formula)
    V = integral_velocity(times, v, t_trunc)
    sigma_A = traj.covs[0]
    ds = bures_ds(sigma_A, sigma_inf)
    ds_len = float(np.sqrt(ds))
    dF = report.delta_F
    if ds == 0 or V == 0:
        delta_t = 0.0 if ds == 0 else float("inf")
        power = 0.0
    else:
        delta_t = ds * (t_trunc - times[0]) / V
        power = dF / delta_t
    return SpeedReport(times, v, V, ds, ds_len, t_trunc, delta_t, float(power))
