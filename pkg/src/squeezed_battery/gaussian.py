"""
Gaussian states of bosonic modes in the quadrature picture.

Conventions used throughout the package:

* quadratures are ordered ``x1, p1, x2, p2, ...``;
* covariance matrices are normalised so that the vacuum has ``cov = 1``,
  i.e. ``cov_ij = <{r_i, r_j}>`` for centred quadratures;
* a physical state satisfies ``cov + i Omega >= 0``, equivalently every
  symplectic eigenvalue is at least one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter, NotSymplectic, UnphysicalState

#: Default tolerance for physicality and symplecticity checks.
TOL_PHYS = 1e-9

_PAIR_TOL = 1e-8


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the 2n x 2n symplectic form, a direct sum of [[0, 1], [-1, 0]]."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidParameter(f"n_modes must be a positive integer, got {n_modes!r}")
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(int(n_modes)), block)


def thermal_occupation(beta: float, mu: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(beta * mu) - 1)``.

    Raises
    ------
    InvalidParameter
        If ``beta * mu <= 0``, where the occupation diverges or turns negative.
    """
    x = beta * mu
    if not x > 0:
        raise InvalidParameter(f"beta*mu must be positive, got {x!r}")
    return 1.0 / math.expm1(x) if x < 700 else 0.0


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First moments and covariance matrix of an n-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise InvalidParameter(f"covariance must be 2n x 2n, got shape {cov.shape}")
        mean = np.zeros(cov.shape[0]) if self.mean is None else np.array(self.mean, dtype=float)
        if mean.shape != (cov.shape[0],):
            raise InvalidParameter(
                f"mean must have length {cov.shape[0]}, got shape {mean.shape}"
            )
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > 1e-10 * scale:
            raise InvalidParameter("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        cov.setflags(write=False)
        mean.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "n_modes", cov.shape[0] // 2)

    @classmethod
    def from_cov(cls, cov) -> "GaussianState":
        return cls(None, cov)

    def mode(self, j: int) -> "GaussianState":
        """Reduced state of mode ``j``."""
        sl = slice(2 * j, 2 * j + 2)
        return GaussianState(self.mean[sl], self.cov[sl, sl])

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes}, cov={self.cov.tolist()})"


def vacuum_state(n_modes: int = 1) -> GaussianState:
    return thermal_state(0.0, n_modes)


def thermal_state(N: float, n_modes: int = 1) -> GaussianState:
    """Thermal state with mean occupation ``N`` in every mode: ``cov = (1 + 2N) * 1``."""
    if N < 0:
        raise InvalidParameter(f"occupation must be non-negative, got {N!r}")
    dim = 2 * int(n_modes)
    return GaussianState(np.zeros(dim), (1.0 + 2.0 * N) * np.eye(dim))


def direct_sum(*states: GaussianState) -> GaussianState:
    """Tensor product of independent Gaussian states."""
    from scipy.linalg import block_diag

    return GaussianState(
        np.concatenate([s.mean for s in states]), block_diag(*[s.cov for s in states])
    )


def symplectic_eigenvalues(state) -> np.ndarray:
    """
    Symplectic spectrum of a covariance matrix.

    Parameters
    ----------
    state : GaussianState or array_like
        State or bare covariance matrix.

    Returns
    -------
    ndarray
        The ``n`` symplectic eigenvalues in ascending order. They are the
        moduli of the eigenvalues of ``i Omega cov``, which come in ``+/-``
        pairs; one member of each pair is kept.
    """
    cov = state.cov if isinstance(state, GaussianState) else np.asarray(state, dtype=float)
    if np.max(np.abs(cov - cov.T)) > 1e-10 * max(1.0, float(np.max(np.abs(cov)))):
        raise InvalidParameter("covariance matrix is not symmetric")
    n = cov.shape[0] // 2
    if n == 1:
        # closed form, avoids eigen-solver noise for the common case
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
        return np.array([np.sqrt(max(det, 0.0))])
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ cov)))
    lo, hi = moduli[0::2], moduli[1::2]
    if np.max(np.abs(hi - lo)) > _PAIR_TOL * max(1.0, float(moduli[-1])):
        raise ArithmeticError("symplectic eigenvalue pairs do not match")
    return 0.5 * (lo + hi)


def check_physicality(state, tol_phys: float = TOL_PHYS) -> bool:
    """True iff every symplectic eigenvalue is at least ``1 - tol_phys``."""
    return bool(symplectic_eigenvalues(state)[0] >= 1.0 - tol_phys)


def require_physical(state, tol_phys: float = TOL_PHYS):
    nu = symplectic_eigenvalues(state)
    if nu[0] < 1.0 - tol_phys:
        raise UnphysicalState(f"smallest symplectic eigenvalue {nu[0]:.3g} < 1")
    return nu


def is_symplectic(S, tol: float = TOL_PHYS) -> bool:
    S = np.asarray(S, dtype=float)
    omega = symplectic_form(S.shape[0] // 2)
    return bool(np.max(np.abs(S @ omega @ S.T - omega)) <= tol * max(1.0, np.max(np.abs(S)) ** 2))


def apply_symplectic(state: GaussianState, S, tol_phys: float = TOL_PHYS) -> GaussianState:
    """Evolve a state through the Gaussian unitary with symplectic matrix ``S``."""
    S = np.asarray(S, dtype=float)
    if S.shape != state.cov.shape:
        raise InvalidParameter(f"S has shape {S.shape}, expected {state.cov.shape}")
    if not is_symplectic(S, tol_phys):
        raise NotSymplectic("S Omega S^T differs from Omega")
    return GaussianState(S @ state.mean, S @ state.cov @ S.T)


def rotation(theta: float) -> np.ndarray:
    """Phase rotation ``cos(theta) 1 + sin(theta) Omega``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeezer(r: float) -> np.ndarray:
    """Single-mode squeezer ``exp(-r sigma_z)``."""
    return np.diag([np.exp(-r), np.exp(r)])


@dataclass(frozen=True)
class ChannelSpec:
    """Closed charging channel ``S = O(theta) K(r)`` (rotation after squeeze)."""

    theta: float
    r: float

    def __post_init__(self):
        if self.r < 0:
            raise InvalidParameter(f"squeeze_r must be >= 0, got {self.r!r}")

    def symplectic(self) -> np.ndarray:
        return rotation(self.theta) @ squeezer(self.r)


def euler_charged_cov(N_A: float, channel: ChannelSpec) -> GaussianState:
    """Thermal state of occupation ``N_A`` after the channel, in closed form."""
    if N_A < 0:
        raise InvalidParameter(f"occupation must be non-negative, got {N_A!r}")
    r, th = channel.r, channel.theta
    c2, s2 = np.cos(th) ** 2, np.sin(th) ** 2
    off = np.sin(2 * th) * np.sinh(2 * r)
    cov = (1 + 2 * N_A) * np.array(
        [
            [np.exp(-2 * r) * c2 + np.exp(2 * r) * s2, off],
            [off, np.exp(2 * r) * c2 + np.exp(-2 * r) * s2],
        ]
    )
    return GaussianState(np.zeros(2), cov)


def random_symplectic(n_modes: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random symplectic matrix as ``exp(Omega H)`` with a random symmetric ``H``."""
    from scipy.linalg import expm

    dim = 2 * n_modes
    h = rng.normal(scale=scale, size=(dim, dim))
    return expm(symplectic_form(n_modes) @ (h + h.T) / 2)


def random_state(n_modes: int, rng: np.random.Generator, max_occupation: float = 3.0,
                 squeeze: float = 0.5) -> GaussianState:
    """Random mixed physical state: thermal spectrum dressed by a random symplectic."""
    nus = 1 + 2 * rng.uniform(0, max_occupation, size=n_modes)
    cov = np.diag(np.repeat(nus, 2))
    S = random_symplectic(n_modes, rng, scale=squeeze)
    return GaussianState(np.zeros(2 * n_modes), S @ cov @ S.T)
