"""
Markovian Gaussian dynamics of a parametrically driven oscillator coupled to a
squeezed thermal bath.

The covariance matrix obeys ``dsigma/dt = A sigma + sigma A^T + D`` and the
first moments ``dr/dt = A r``. ``A`` and ``D`` are built from the quadratic
Hamiltonian matrix and the quadrature coefficients of the jump operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .errors import InvalidParameter, SingularSystem, UnphysicalState, UnstableDynamics
from .gaussian import TOL_PHYS, GaussianState, symplectic_eigenvalues, symplectic_form

_OMEGA = symplectic_form(1)
_COND_MAX = 1e8
#: Real parts within this fraction of the spectral scale count as zero.
_RE_TOL = 1e-12


@dataclass(frozen=True)
class DriveSpec:
    """Oscillator energy ``mu`` and squeezing-drive strength ``lam``.

    The drive is on for ``window[0] <= t <= window[1]``.
    """

    mu: float = 1.0
    lam: float = 0.0
    window: tuple = (0.0, math.inf)

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidParameter(f"mu must be positive, got {self.mu!r}")
        if self.lam < 0:
            raise InvalidParameter(f"lambda must be non-negative, got {self.lam!r}")
        if not self.window[0] < self.window[1]:
            raise InvalidParameter(f"empty charging window {self.window!r}")


@dataclass(frozen=True)
class BathSpec:
    """Squeezed thermal bath (gamma, N_B, r_B, theta_B) and preparation occupation N_A."""

    gamma: float = 1.0
    N_B: float = 0.0
    r_B: float = 0.0
    theta_B: float = 0.0
    N_A: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "N_B", "r_B", "N_A"):
            if getattr(self, name) < 0:
                raise InvalidParameter(f"{name} must be non-negative, got {getattr(self, name)!r}")


@dataclass(frozen=True, eq=False)
class LindbladSpec:
    """Jump operators ``L_k = b_k^T r``; column ``k`` of ``b_matrix`` is ``b_k``."""

    b_matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class DriftDiffusion:
    A: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A, D = np.asarray(self.A, dtype=float), np.asarray(self.D, dtype=float)
        if A.ndim != 2 or A.shape != D.shape or A.shape[0] != A.shape[1] or A.shape[0] % 2:
            raise InvalidParameter(f"drift {A.shape} and diffusion {D.shape} must be equal even squares")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "D", D)

    @property
    def n_modes(self) -> int:
        return self.A.shape[0] // 2

    @classmethod
    def direct_sum(cls, *parts: "DriftDiffusion") -> "DriftDiffusion":
        """Generator of independent modes evolving side by side."""
        return cls(block_diag(*[p.A for p in parts]), block_diag(*[p.D for p in parts]))


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """
    stable
        every eigenvalue of ``A`` has negative real part, so a unique
        steady state exists.
    bounded
        no eigenvalue has positive real part and ``A`` is diagonalisable,
        so the covariance stays bounded (the closed ``mu > lam`` case).
    margin
        ``mu^2 - lam^2 - gamma^2/4``, the commonly quoted form of the
        criterion; it disagrees with ``stable`` wherever ``|mu^2 - lam^2| < gamma^2/4``.
    hurwitz_margin
        ``mu^2 - lam^2 + gamma^2/4``; for ``gamma > 0`` its sign coincides
        with ``stable``.
    """

    stable: bool
    bounded: bool
    margin: float
    hurwitz_margin: float
    eigenvalues: np.ndarray


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    means: np.ndarray
    covs: np.ndarray
    spectra: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.spectra is None:
            object.__setattr__(self, "spectra", spectra_of(self.covs))
        if not len(self.times) == len(self.covs) == len(self.means) == len(self.spectra):
            raise InvalidParameter("trajectory arrays have different lengths")

    def __len__(self):
        return len(self.times)

    @property
    def states(self) -> list:
        return [GaussianState(m, c) for m, c in zip(self.means, self.covs)]

    @property
    def final(self) -> GaussianState:
        return GaussianState(self.means[-1], self.covs[-1])


def spectra_of(covs: np.ndarray) -> np.ndarray:
    """Symplectic spectra of a stack of covariance matrices, shape (T, n)."""
    covs = np.asarray(covs)
    if covs.shape[-1] == 2:
        det = covs[:, 0, 0] * covs[:, 1, 1] - covs[:, 0, 1] * covs[:, 1, 0]
        return np.sqrt(np.clip(det, 0.0, None))[:, None]
    return np.array([symplectic_eigenvalues(c) for c in covs])


def hamiltonian_matrix(drive: DriveSpec, drive_on: bool = True) -> np.ndarray:
    """Matrix ``H_s`` with ``H = r^T H_s r / 2``: ``mu*1 - lam*sigma_x`` while driven."""
    lam = drive.lam if drive_on else 0.0
    return np.array([[drive.mu, -lam], [-lam, drive.mu]])


def jump_vectors(bath: BathSpec) -> LindbladSpec:
    """
    Quadrature coefficients of the two squeezed-bath jump operators.

    ``L+ ~ sqrt(gamma (N_B + 1)) (a cosh r + a^dag sinh r e^{i theta})`` and
    ``L- ~ sqrt(gamma N_B) (a^dag cosh r + a sinh r e^{-i theta})`` with
    ``a = (x + i p)/sqrt(2)``. The rate prefactor makes the amplitude decay
    at ``gamma/2``; the conjugate phase in ``L-`` makes the squeezed thermal
    noise a valid bath for every ``theta``.
    """
    ch, sh = np.cosh(bath.r_B), np.sinh(bath.r_B)
    e = np.exp(1j * bath.theta_B)
    amp_plus = np.sqrt(bath.gamma * (bath.N_B + 1.0) / 2.0)
    amp_minus = np.sqrt(bath.gamma * bath.N_B / 2.0)
    # a = (x + ip)/sqrt2, a^dag = (x - ip)/sqrt2
    b_plus = amp_plus * np.array([ch + sh * e, 1j * (ch - sh * e)])
    b_minus = amp_minus * np.array([ch + sh * np.conj(e), 1j * (-ch + sh * np.conj(e))])
    return LindbladSpec(np.column_stack([b_plus, b_minus]))


def drift_diffusion(drive: DriveSpec, bath: BathSpec, drive_on: bool = True) -> DriftDiffusion:
    """Drift ``A = Omega (H_s - Im BB^dag)`` and diffusion ``D = -2 Omega Re(BB^dag) Omega``."""
    H = hamiltonian_matrix(drive, drive_on)
    B = jump_vectors(bath).b_matrix
    M = B @ B.conj().T
    A = _OMEGA @ (H - M.imag)
    D = -2.0 * _OMEGA @ M.real @ _OMEGA
    return DriftDiffusion(A, 0.5 * (D + D.T))


def closed_drift(drive: DriveSpec, drive_on: bool = True) -> DriftDiffusion:
    return DriftDiffusion(_OMEGA @ hamiltonian_matrix(drive, drive_on), np.zeros((2, 2)))


def _decays(A: np.ndarray) -> bool:
    """True when every eigenvalue of ``A`` lies clearly inside the left half plane."""
    eig = np.linalg.eigvals(A)
    return bool(np.max(eig.real) < -_RE_TOL * max(1.0, float(np.max(np.abs(eig)))))


def _is_diagonalizable(A: np.ndarray) -> bool:
    w, V = np.linalg.eig(A)
    return bool(np.linalg.cond(V) < _COND_MAX)


def stability_check(drive: DriveSpec, bath: BathSpec) -> StabilityReport:
    dd = drift_diffusion(drive, bath)
    eig = np.linalg.eigvals(dd.A)
    re_max = float(np.max(eig.real))
    scale = max(1.0, float(np.max(np.abs(eig))))
    mu2, lam2, g2 = drive.mu**2, drive.lam**2, bath.gamma**2
    return StabilityReport(
        stable=_decays(dd.A),
        bounded=bool(re_max <= 1e-12 * scale and _is_diagonalizable(dd.A)),
        margin=mu2 - lam2 - g2 / 4,
        hurwitz_margin=mu2 - lam2 + g2 / 4,
        eigenvalues=eig,
    )


def bona_fide_check(dd: DriftDiffusion, tol: float = 1e-12) -> bool:
    """
    Single-mode physicality of the diffusion: ``det D >= det(Omega^T A - A^T Omega)``
    together with ``tr D >= 0`` (the determinant alone cannot tell ``D`` from ``-D``).
    """
    if dd.A.shape != (2, 2):
        raise InvalidParameter("bona fide check is implemented for a single mode only")
    K = _OMEGA.T @ dd.A - dd.A.T @ _OMEGA
    scale = max(1.0, float(np.max(np.abs(dd.D))) ** 2, float(np.max(np.abs(K))) ** 2)
    return bool(np.trace(dd.D) >= -tol and np.linalg.det(dd.D) >= np.linalg.det(K) - tol * scale)


def lyapunov_operator(A: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> A X + X A^T`` acting on row-major ``vec(X)``."""
    eye = np.eye(A.shape[0])
    return np.kron(A, eye) + np.kron(eye, A)


def steady_state(dd: DriftDiffusion) -> GaussianState:
    """Solve ``A s + s A^T + D = 0``; requires every eigenvalue of ``A`` in the left half plane."""
    re_max = float(np.max(np.linalg.eigvals(dd.A).real))
    if not _decays(dd.A):
        raise UnstableDynamics(f"drift has an eigenvalue with real part {re_max:.3g} >= 0")
    L = lyapunov_operator(dd.A)
    if np.linalg.cond(L) > 1e14:
        raise SingularSystem("Lyapunov operator is numerically singular")
    dim = dd.A.shape[0]
    sigma = np.linalg.solve(L, -dd.D.reshape(-1)).reshape(dim, dim)
    return GaussianState(np.zeros(dim), 0.5 * (sigma + sigma.T))


def default_dt(drive: DriveSpec, bath: BathSpec | None = None) -> float:
    gamma = bath.gamma if bath is not None else 0.0
    return 1e-3 / max(drive.mu, drive.lam, gamma, 1.0)


def _swap(x):
    return np.swapaxes(x, -1, -2)


def rk4_covariance(A, D, sigma0, t_grid, dt):
    """
    Fixed-step classical Runge-Kutta for ``ds/dt = A s + s A^T + D``.

    Arrays may carry leading batch dimensions; ``t_grid`` is shared. Each
    interval between reporting times is split into equal sub-steps no longer
    than ``dt``.
    """
    A, D = np.asarray(A, dtype=float), np.asarray(D, dtype=float)
    s = np.array(sigma0, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)

    def f(x):
        ax = A @ x
        return ax + _swap(ax) + D

    out = np.empty((len(t_grid),) + s.shape)
    out[0] = s
    for i in range(1, len(t_grid)):
        span = t_grid[i] - t_grid[i - 1]
        n = max(1, int(math.ceil(span / dt - 1e-9)))
        h = span / n
        for _ in range(n):
            k1 = f(s)
            k2 = f(s + 0.5 * h * k1)
            k3 = f(s + 0.5 * h * k2)
            k4 = f(s + h * k3)
            s = s + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i] = s
    return out


def _exp_stack(A: np.ndarray, times: np.ndarray) -> np.ndarray:
    """``exp(A t)`` for every ``t`` via one eigendecomposition."""
    w, V = np.linalg.eig(A)
    Vinv = np.linalg.inv(V)
    ew = np.exp(np.outer(times, w))
    E = np.einsum("ij,tj,jk->tik", V, ew, Vinv)
    return E.real


def evolve(initial: GaussianState, dd: DriftDiffusion, t_grid, method: str = "auto",
           dt: float | None = None, tol_phys: float = TOL_PHYS) -> Trajectory:
    """
    Propagate a state under the diffusive equations.

    Parameters
    ----------
    initial : GaussianState
        State at ``t_grid[0]``.
    dd : DriftDiffusion
    t_grid : array_like
        Increasing reporting times; only differences from ``t_grid[0]`` matter.
    method : {"auto", "exact", "rk4"}
        ``"exact"`` uses ``sigma(t) = e^{At}(sigma0 - s_inf)e^{A^T t} + s_inf``
        with an eigendecomposition of ``A``; it needs a diagonalisable ``A``
        and either a steady state or ``D = 0``. ``"auto"`` picks it when
        possible and otherwise falls back to ``"rk4"``.
    dt : float, optional
        Maximum Runge-Kutta step (default ``1e-3``).

    Raises
    ------
    UnphysicalState
        If an intermediate state leaves the physical region beyond tolerance.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1 or np.any(np.diff(t_grid) <= 0):
        raise InvalidParameter("t_grid must be a strictly increasing 1-d array")
    if dd.A.shape != initial.cov.shape:
        raise InvalidParameter("state and generator have different mode counts")
    rel = t_grid - t_grid[0]

    fixed = None
    if method in ("auto", "exact") and _is_diagonalizable(dd.A):
        if not np.any(dd.D):
            fixed = np.zeros_like(dd.D)
        elif _decays(dd.A):
            fixed = steady_state(dd).cov
    if method == "exact" and fixed is None:
        raise InvalidParameter("exact propagation needs a diagonalisable drift with a fixed point")

    if fixed is not None:
        E = _exp_stack(dd.A, rel)
        covs = E @ (initial.cov - fixed) @ _swap(E) + fixed
        means = E @ initial.mean
    elif method in ("auto", "rk4"):
        covs = rk4_covariance(dd.A, dd.D, initial.cov, rel, dt or 1e-3)
        if np.any(initial.mean):
            means = _rk4_mean(dd.A, initial.mean, rel, dt or 1e-3)
        else:
            means = np.zeros((len(rel), dd.A.shape[0]))
    else:
        raise InvalidParameter(f"unknown method {method!r}")

    covs = 0.5 * (covs + _swap(covs))
    traj = Trajectory(t_grid.copy(), means, covs)
    scale = np.max(np.abs(covs), axis=(1, 2)) ** 2
    slack = np.maximum(tol_phys, 256 * np.finfo(float).eps * scale)
    bad = np.nonzero(traj.spectra[:, 0] < 1.0 - slack)[0]
    if len(bad):
        i = bad[0]
        raise UnphysicalState(
            f"state at t={t_grid[i]:.6g} has symplectic eigenvalue {traj.spectra[i, 0]:.6g}"
        )
    return traj


def _rk4_mean(A, m0, rel, dt):
    m = np.array(m0, dtype=float)
    out = [m.copy()]
    for i in range(1, len(rel)):
        span = rel[i] - rel[i - 1]
        n = max(1, int(math.ceil(span / dt - 1e-9)))
        h = span / n
        for _ in range(n):
            k1 = A @ m
            k2 = A @ (m + 0.5 * h * k1)
            k3 = A @ (m + 0.5 * h * k2)
            k4 = A @ (m + h * k3)
            m = m + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(m.copy())
    return np.array(out)


def evolve_window(initial: GaussianState, drive: DriveSpec, bath: BathSpec, t_grid,
                  **kwargs) -> Trajectory:
    """
    Piecewise charging protocol on an absolute time grid.

    Before ``window[0]`` the battery rotates freely with no bath; inside the
    window both drive and bath act; after ``window[1]`` the drive is off and
    the bath remains.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    t_on, t_off = drive.window
    phases = [
        (-math.inf, t_on, closed_drift(drive, drive_on=False)),
        (t_on, t_off, drift_diffusion(drive, bath, drive_on=True)),
        (t_off, math.inf, drift_diffusion(drive, bath, drive_on=False)),
    ]
    state, t_now = initial, t_grid[0]
    times, means, covs = [], [], []
    for lo, hi, dd in phases:
        if t_now >= hi:
            continue
        inside = t_grid[(t_grid >= max(lo, t_now)) & (t_grid <= hi)]
        pts = np.unique(np.concatenate([[t_now], inside, [hi] if math.isfinite(hi) and hi <= t_grid[-1] else []]))
        if len(pts) > 1:
            seg = evolve(state, dd, pts, **kwargs)
        else:
            seg = Trajectory(pts, state.mean[None], state.cov[None])
        keep = np.isin(pts, t_grid) & (pts >= t_now) & ~np.isin(pts, times)
        times.extend(pts[keep])
        means.extend(seg.means[keep])
        covs.extend(seg.covs[keep])
        state, t_now = seg.final, pts[-1]
        if t_now >= t_grid[-1]:
            break
    return Trajectory(np.array(times), np.array(means), np.array(covs))


def closed_energy_analytic(t, drive: DriveSpec, N_A: float):
    """
    Energy gained by a thermal state under the closed driven Hamiltonian.

    ``mu lam^2 (1 + 2 N_A) t^2 * f(k t)^2`` with ``k^2 = mu^2 - lam^2`` and
    ``f = sin(x)/x`` for ``mu > lam``, ``sinh(x)/x`` for ``lam > mu``; the two
    branches meet at ``f = 1`` when ``mu == lam``.
    """
    t = np.asarray(t, dtype=float)
    k2 = drive.mu**2 - drive.lam**2
    x2 = k2 * t**2
    ratio = np.empty_like(x2)
    small = np.abs(x2) < 1e-6
    # series of sin(x)/x in powers of x^2, valid for either sign of x^2
    xs = x2[small]
    ratio[small] = 1 - xs / 6 + xs**2 / 120
    big = ~small
    if k2 > 0:
        x = np.sqrt(x2[big])
        ratio[big] = np.sin(x) / x
    else:
        x = np.sqrt(-x2[big])
        ratio[big] = np.sinh(x) / x
    out = drive.mu * drive.lam**2 * (1 + 2 * N_A) * t**2 * ratio**2
    return out if out.ndim else float(out)
