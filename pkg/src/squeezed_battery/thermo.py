"""Energy, work, heat, entropy and free-energy bookkeeping on covariance matrices."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import xlogy

from .errors import InvalidParameter, UndefinedEfficiency, UnphysicalState
from .gaussian import TOL_PHYS, ChannelSpec, GaussianState, euler_charged_cov, symplectic_eigenvalues, thermal_state

#: Temperature conventions accepted by :func:`temperature`.
T_CONVENTIONS = ("unit", "bath_b")

#: Convention that reproduces the weak-drive efficiency limit of 1/2; see
#: ``protocol.select_temperature_convention``.
DEFAULT_T_CONVENTION = "bath_b"

_PURE_BAND = 1e-12


def _cov(x) -> np.ndarray:
    return x.cov if isinstance(x, GaussianState) else np.asarray(x, dtype=float)


def _mode_weights(mu, n_modes):
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (n_modes,))
    return np.repeat(mu, 2)


def internal_energy(state, mu) -> float:
    """``sum_j mu_j/4 tr(sigma_jj)`` for zero-mean states; ``mu`` may be per mode."""
    if isinstance(state, GaussianState) and np.any(state.mean):
        raise InvalidParameter("internal_energy assumes zero first moments")
    cov = _cov(state)
    return float(np.sum(_mode_weights(mu, cov.shape[0] // 2) * np.diag(cov)) / 4)


def delta_E(sigma_A, sigma_B, mu) -> float:
    a, b = _cov(sigma_A), _cov(sigma_B)
    if a.shape != b.shape:
        raise InvalidParameter(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sum(_mode_weights(mu, a.shape[0] // 2) * np.diag(b - a)) / 4)


def work_heat(sigma_A, sigma_B, mu, lam) -> tuple[float, float]:
    """
    Work and heat of a charging stroke that switches ``-lam/2 (xp + px)`` on and off.

    The switch-on costs ``-lam/2 <xp+px>_A`` and the switch-off returns
    ``-lam/2 <xp+px>_B``, so ``dW = lam/2 (sigma_B[0,1] - sigma_A[0,1])``.
    Heat is the remainder, ``dQ = dE - dW``, which equals the integrated
    ``tr(H_s dsigma)/4`` over the driven interval.
    """
    a, b = _cov(sigma_A), _cov(sigma_B)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise InvalidParameter("work_heat is defined for a single mode")
    dW = 0.5 * lam * (b[0, 1] - a[0, 1])
    dQ = delta_E(a, b, mu) - dW
    return float(dW), float(dQ)


def entropy_from_spectrum(nus) -> float:
    nus = np.asarray(nus, dtype=float)
    if np.any(nus < 1 - TOL_PHYS):
        raise UnphysicalState(f"symplectic eigenvalue {nus.min():.6g} < 1")
    nus = nus[nus >= 1 + _PURE_BAND]
    up, down = (nus + 1) / 2, (nus - 1) / 2
    return float(np.sum(xlogy(up, up) - xlogy(down, down)))


def von_neumann_entropy(state) -> float:
    """Entropy in nats from the symplectic spectrum."""
    return entropy_from_spectrum(symplectic_eigenvalues(state))


def temperature(convention: str, mu: float = 1.0, N_B: float = 0.0) -> float:
    """
    Temperature entering ``dF = dE - T dS``.

    ``"unit"`` gives 1; ``"bath_b"`` gives the temperature of a thermal bath at
    the oscillator frequency with occupation ``N_B``, ``mu / ln(1 + 1/N_B)``
    (zero for ``N_B = 0``).
    """
    if convention == "unit":
        return 1.0
    if convention == "bath_b":
        if N_B < 0:
            raise InvalidParameter("N_B must be non-negative")
        return 0.0 if N_B == 0 else float(mu / np.log1p(1.0 / N_B))
    raise InvalidParameter(f"unknown temperature convention {convention!r}")


def free_energy_change(sigma_A, sigma_B, mu, T_free) -> float:
    if T_free < 0:
        raise InvalidParameter("temperature must be non-negative")
    dS = von_neumann_entropy(sigma_B) - von_neumann_entropy(sigma_A)
    return delta_E(sigma_A, sigma_B, mu) - T_free * dS


def efficiency(sigma_A, sigma_B, mu, T_free) -> float:
    """``dF / dE``; raises ``UndefinedEfficiency`` when no energy was stored."""
    dE = delta_E(sigma_A, sigma_B, mu)
    if dE == 0:
        raise UndefinedEfficiency("efficiency is undefined for dE = 0")
    return free_energy_change(sigma_A, sigma_B, mu, T_free) / dE


def closed_delta_E(r: float, N_A: float, mu: float) -> float:
    """Energy stored by squeezing a thermal state by ``r``, ``mu (1+2N_A) sinh^2 r``.

    Evaluated from the trace of the charged covariance matrix; the rotation
    angle drops out.
    """
    if r < 0:
        raise InvalidParameter("r must be non-negative")
    charged = euler_charged_cov(N_A, ChannelSpec(theta=0.0, r=r))
    return delta_E(thermal_state(N_A), charged, mu)


@dataclass(frozen=True)
class ThermoReport:
    E_A: float
    E_B: float
    delta_E: float
    delta_W: float
    delta_Q: float
    S_A: float
    S_B: float
    delta_S: float
    T_free: float
    delta_F: float
    eta: float

    def as_dict(self) -> dict:
        return asdict(self)


def thermo_report(sigma_A, sigma_B, mu: float, lam: float, T_free: float) -> ThermoReport:
    E_A, E_B = internal_energy(sigma_A, mu), internal_energy(sigma_B, mu)
    dE = delta_E(sigma_A, sigma_B, mu)
    dW, dQ = work_heat(sigma_A, sigma_B, mu, lam)
    S_A, S_B = von_neumann_entropy(sigma_A), von_neumann_entropy(sigma_B)
    dF = dE - T_free * (S_B - S_A)
    eta = dF / dE if dE != 0 else float("nan")
    return ThermoReport(E_A, E_B, dE, dW, dQ, S_A, S_B, S_B - S_A, T_free, dF, eta)
