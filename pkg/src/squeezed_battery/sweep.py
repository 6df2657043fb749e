"""
Parameter sweeps over charging scenarios with deterministic CSV output.

Configuration files are flat ``key = value`` text. Values are JSON literals:
numbers, double-quoted strings, ``true``/``false`` and inline arrays. ``#``
starts a comment. Sweep axes are given as ``outer_axis`` / ``inner_axis``
arrays ``["name", min, max, steps]``; rows are emitted outer-axis major.
"""
from __future__ import annotations

import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from importlib import resources

import numpy as np

from .dynamics import BathSpec, DriveSpec, closed_drift, closed_energy_analytic, evolve, stability_check
from .errors import BatteryError, ConfigError, InvalidParameter
from .gaussian import ChannelSpec, euler_charged_cov, thermal_state
from .protocol import DEFAULT_DT_REPORT, DEFAULT_EPS_SS, charging_trajectory, power_point, thermo_point
from .speedlimit import SPEED_FORMULAS, instantaneous_speed
from .thermo import DEFAULT_T_CONVENTION, T_CONVENTIONS, delta_E, internal_energy, von_neumann_entropy

log = logging.getLogger(__name__)

SCENARIOS = ("steady", "evolve", "thermo", "power", "closed", "channel")
PHYSICS_AXES = ("lambda", "n_a", "n_b", "r_b", "theta_b")
AXES_BY_SCENARIO = {
    "steady": PHYSICS_AXES,
    "thermo": PHYSICS_AXES,
    "power": PHYSICS_AXES,
    "evolve": (),
    "closed": ("lambda", "n_a"),
    "channel": ("r", "theta", "n_a"),
}
NONNEGATIVE = ("mu", "gamma", "lambda", "n_a", "n_b", "r_b", "r")

INPUT_COLUMNS = ["mu", "gamma", "lambda", "n_a", "n_b", "r_b", "theta_b", "t_free"]
THERMO_COLUMNS = ["E_A", "E_B", "delta_E", "delta_W", "delta_Q", "delta_S", "delta_F", "eta"]
SPEED_COLUMNS = ["V_AB", "ds_AB", "ds_len", "delta_t", "power", "t_trunc"]


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    scenario: str = "thermo"
    mu: float = 1.0
    gamma: float = 1.0
    n_a: float = 1.0
    n_b: float = 1.0
    r_b: float = 0.0
    theta_b: float = 0.0
    # "lambda" in config files
    lam: float = 0.5
    lock_n_b: bool = False
    t_free: str = DEFAULT_T_CONVENTION
    speed_formula: str = "paper"
    outer_axis: Axis | None = None
    inner_axis: Axis | None = None
    dt: float = DEFAULT_DT_REPORT
    horizon: float | None = None
    eps_ss: float = DEFAULT_EPS_SS
    t_max: float = 5.0
    steps: int = 501
    r: float = 0.0
    theta: float = 0.0
    target: str = "eta"
    grid_steps: int = 72
    output: str | None = None
    description: str = ""

    @property
    def axes(self) -> list:
        return [a for a in (self.outer_axis, self.inner_axis) if a is not None]

    def at(self, **values) -> "SweepConfig":
        """Copy with axis-named parameters overridden (``lambda`` maps to ``lam``)."""
        kw = {("lam" if k == "lambda" else k): float(v) for k, v in values.items()}
        if self.lock_n_b and "n_a" in kw:
            kw["n_b"] = kw["n_a"]
        return replace(self, **kw)

    def drive(self) -> DriveSpec:
        return DriveSpec(mu=self.mu, lam=self.lam)

    def bath(self) -> BathSpec:
        n_b = self.n_a if self.lock_n_b else self.n_b
        return BathSpec(gamma=self.gamma, N_B=n_b, r_B=self.r_b, theta_B=self.theta_b, N_A=self.n_a)


_KEY_ALIASES = {"lambda": "lam"}
_FIELD_NAMES = {f.name for f in fields(SweepConfig)}


def _parse_axis(key, value) -> Axis:
    if not (isinstance(value, list) and len(value) == 4 and isinstance(value[0], str)):
        raise ConfigError(f"{key} must be [\"name\", min, max, steps]")
    name, lo, hi, steps = value
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (lo, hi, steps)):
        raise ConfigError(f"{key}: min, max and steps must be numbers")
    if int(steps) != steps or steps < 2:
        raise ConfigError(f"{key}: steps must be an integer >= 2")
    if not lo < hi:
        raise ConfigError(f"{key}: min must be smaller than max")
    return Axis(name, float(lo), float(hi), int(steps))


def parse_config(text: str) -> SweepConfig:
    """Parse flat ``key = value`` text into a validated :class:`SweepConfig`."""
    kw = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key != key.lower() or not key.replace("_", "").isalnum():
            raise ConfigError(f"line {lineno}: keys are lowercase snake_case, got {key!r}")
        name = _KEY_ALIASES.get(key, key)
        if name not in _FIELD_NAMES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if name in kw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            kw[name] = json.loads(value)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {lineno}: cannot parse value {value!r}") from exc
    for key in ("outer_axis", "inner_axis"):
        if key in kw:
            kw[key] = _parse_axis(key, kw[key])
    try:
        cfg = SweepConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: SweepConfig) -> None:
    defaults = SweepConfig()
    for f in fields(SweepConfig):
        val, ref = getattr(cfg, f.name), getattr(defaults, f.name)
        if isinstance(ref, bool):
            ok = isinstance(val, bool)
        elif isinstance(ref, float):
            ok = isinstance(val, (int, float)) and not isinstance(val, bool)
        elif isinstance(ref, (int, str)):
            ok = isinstance(val, type(ref)) and not isinstance(val, bool)
        else:
            ok = True
        if not ok:
            raise ConfigError(f"{f.name} has the wrong type: {val!r}")
    if cfg.horizon is not None and not (isinstance(cfg.horizon, (int, float)) and cfg.horizon > 0):
        raise ConfigError("horizon must be a positive number")
    if cfg.output is not None and not isinstance(cfg.output, str):
        raise ConfigError("output must be a string")
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}; expected one of {SCENARIOS}")
    if cfg.t_free not in T_CONVENTIONS:
        raise ConfigError(f"t_free must be one of {T_CONVENTIONS}")
    if cfg.speed_formula not in SPEED_FORMULAS:
        raise ConfigError(f"speed_formula must be one of {SPEED_FORMULAS}")
    if cfg.target not in ("eta", "power"):
        raise ConfigError("target must be 'eta' or 'power'")
    if cfg.grid_steps < 3 or cfg.steps < 2:
        raise ConfigError("grid_steps must be >= 3 and steps >= 2")
    if cfg.mu <= 0 or cfg.dt <= 0 or cfg.eps_ss <= 0 or cfg.t_max <= 0:
        raise ConfigError("mu, dt, eps_ss and t_max must be positive")
    for name in ("gamma", "lam", "n_a", "n_b", "r_b", "r"):
        if getattr(cfg, name) < 0:
            raise ConfigError(f"{name} must be non-negative")
    names = [a.name for a in cfg.axes]
    if len(set(names)) != len(names):
        raise ConfigError("sweep axes must be distinct")
    allowed = AXES_BY_SCENARIO[cfg.scenario]
    for a in cfg.axes:
        if a.name not in allowed:
            raise ConfigError(f"axis {a.name!r} is not sweepable in scenario {cfg.scenario!r}")
        if a.name in NONNEGATIVE and a.lo < 0:
            raise ConfigError(f"axis {a.name!r} must stay non-negative")
    if cfg.lock_n_b and "n_b" in names:
        raise ConfigError("n_b cannot be swept while lock_n_b = true")
    if cfg.inner_axis is not None and cfg.outer_axis is None:
        raise ConfigError("inner_axis given without outer_axis")


def load_config(path) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def preset_names() -> list:
    files = resources.files(__package__).joinpath("presets").iterdir()
    return sorted(p.name[:-4] for p in files if p.name.endswith(".cfg"))


def preset_text(name: str) -> str:
    path = resources.files(__package__).joinpath("presets", f"{name}.cfg")
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return path.read_text(encoding="utf-8")


def load_preset(name: str) -> SweepConfig:
    return parse_config(preset_text(name))


def grid_points(cfg: SweepConfig) -> list:
    """Parameter dictionaries in output order (outer axis major)."""
    axes = cfg.axes
    if not axes:
        return [{}]
    if len(axes) == 1:
        return [{axes[0].name: v} for v in axes[0].values]
    return [{axes[0].name: u, axes[1].name: w} for u in axes[0].values for w in axes[1].values]


def fmt(x) -> str:
    """CSV cell: 17 significant digits in scientific notation, empty for None."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    return f"{float(x):.16e}"


def _inputs(cfg: SweepConfig) -> dict:
    from .thermo import temperature

    n_b = cfg.n_a if cfg.lock_n_b else cfg.n_b
    return {
        "mu": cfg.mu, "gamma": cfg.gamma, "lambda": cfg.lam, "n_a": cfg.n_a, "n_b": n_b,
        "r_b": cfg.r_b, "theta_b": cfg.theta_b, "t_free": temperature(cfg.t_free, cfg.mu, n_b),
    }


def evaluate_point(cfg: SweepConfig) -> dict:
    """One CSV row for the ``steady``, ``thermo`` or ``power`` scenario at ``cfg``'s parameters."""
    row = _inputs(cfg)
    drive, bath = cfg.drive(), cfg.bath()
    stable = stability_check(drive, bath).stable
    row["stable"] = stable
    if cfg.scenario == "steady":
        cols = ["sigma_xx", "sigma_xp", "sigma_pp", "nu", "E_B"]
        row.update(dict.fromkeys(cols))
        if stable:
            s = thermo_point(drive, bath, cfg.t_free).sigma_B
            row.update(sigma_xx=s.cov[0, 0], sigma_xp=s.cov[0, 1], sigma_pp=s.cov[1, 1],
                       nu=math.sqrt(np.linalg.det(s.cov)), E_B=internal_energy(s, cfg.mu))
        return row
    row.update(dict.fromkeys(THERMO_COLUMNS))
    if cfg.scenario == "power":
        row.update(dict.fromkeys(SPEED_COLUMNS))
    if not stable:
        return row
    if cfg.scenario == "power":
        try:
            res = power_point(drive, bath, cfg.t_free, cfg.speed_formula, cfg.eps_ss, cfg.dt, cfg.horizon)
        except BatteryError as exc:
            if not cfg.axes:
                raise
            log.warning("speed estimate failed at %s: %s", row, exc)
            res = thermo_point(drive, bath, cfg.t_free)
    else:
        res = thermo_point(drive, bath, cfg.t_free)
    th = res.thermo
    row.update(E_A=th.E_A, E_B=th.E_B, delta_E=th.delta_E, delta_W=th.delta_W,
               delta_Q=th.delta_Q, delta_S=th.delta_S, delta_F=th.delta_F, eta=th.eta)
    if res.speed is not None:
        sp = res.speed
        row.update(V_AB=sp.V_AB, ds_AB=sp.ds_AB, ds_len=sp.ds_len, delta_t=sp.delta_t,
                   power=sp.power, t_trunc=sp.t_trunc)
    return row


def _closed_rows(cfg: SweepConfig) -> list:
    rows = []
    for point in grid_points(cfg):
        c = cfg.at(**point)
        for rec in closed_report(c.mu, c.lam, c.n_a, c.t_max, c.steps):
            rows.append({"mu": c.mu, "lambda": c.lam, "n_a": c.n_a, **rec})
    return rows


def _channel_rows(cfg: SweepConfig) -> list:
    rows = []
    for point in grid_points(cfg):
        c = cfg.at(**point)
        sigma_A = thermal_state(c.n_a)
        sigma_C = euler_charged_cov(c.n_a, ChannelSpec(theta=c.theta, r=c.r))
        rows.append({
            "mu": c.mu, "r": c.r, "theta": c.theta, "n_a": c.n_a,
            "delta_E_trace": delta_E(sigma_A, sigma_C, c.mu),
            "delta_E_formula": c.mu * (1 + 2 * c.n_a) * math.sinh(c.r) ** 2,
            "S_A": von_neumann_entropy(sigma_A), "S_C": von_neumann_entropy(sigma_C),
        })
    return rows


def evolve_rows(cfg: SweepConfig) -> list:
    """Time series of the charging trajectory for a single parameter point."""
    drive, bath = cfg.drive(), cfg.bath()
    traj = charging_trajectory(drive, bath, dt=cfg.dt, eps_ss=cfg.eps_ss,
                               horizon=cfg.horizon if cfg.horizon else None)
    _, v = instantaneous_speed(traj, cfg.speed_formula)
    rows = []
    for t, s, nu, vi in zip(traj.times, traj.covs, traj.spectra[:, 0], v):
        rows.append({"t": t, "sigma_xx": s[0, 0], "sigma_xp": s[0, 1], "sigma_pp": s[1, 1],
                     "nu": nu, "energy": internal_energy(s, cfg.mu), "v": vi})
    return rows


def run_scenario(cfg: SweepConfig, threads: int = 1) -> list:
    """Evaluate every grid point of ``cfg`` and return the rows in output order."""
    if cfg.scenario == "closed":
        return _closed_rows(cfg)
    if cfg.scenario == "channel":
        return _channel_rows(cfg)
    if cfg.scenario == "evolve":
        return evolve_rows(cfg)
    points = [cfg.at(**p) for p in grid_points(cfg)]
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(evaluate_point, points))
    return [evaluate_point(p) for p in points]


def rows_to_csv(rows: list) -> str:
    if not rows:
        return ""
    header = list(rows[0])
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(row[k]) for k in header) + "\n")
    return buf.getvalue()


def write_csv(rows: list, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rows_to_csv(rows))


def closed_report(mu: float, lam: float, N_A: float, t_max: float, steps: int) -> list:
    """
    Closed-system energy gain, numerical propagation against the analytic formula.

    Rows carry ``t``, ``delta_E_numeric``, ``delta_E_analytic`` and ``abs_diff``.
    """
    drive = DriveSpec(mu=mu, lam=lam)
    times = np.linspace(0.0, t_max, steps)
    sigma0 = thermal_state(N_A)
    traj = evolve(sigma0, closed_drift(drive), times)
    numeric = np.array([delta_E(sigma0.cov, c, mu) for c in traj.covs])
    analytic = closed_energy_analytic(times, drive, N_A)
    return [
        {"t": t, "delta_E_numeric": n, "delta_E_analytic": a, "abs_diff": abs(n - a)}
        for t, n, a in zip(times, numeric, analytic)
    ]


def golden_section_max(f, a: float, b: float, tol: float = 1e-3):
    """Maximise a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    inv_phi = (math.sqrt(5) - 1) / 2
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def theta_objective(cfg: SweepConfig, target: str):
    """
    Objective in the bath phase: ``eta`` or ``power`` at ``cfg``'s parameters.

    With one remaining sweep axis the objective is the largest value along it,
    i.e. the row of the landscape holding its maximum. Unstable points are skipped.
    """
    scenario = "power" if target == "power" else "thermo"
    base = replace(cfg, scenario=scenario)
    points = grid_points(base)

    def objective(theta: float) -> float:
        best = -math.inf
        for p in points:
            row = evaluate_point(base.at(theta_b=theta % (2 * math.pi), **p))
            val = row[target]
            if row["stable"] and val is not None and math.isfinite(val):
                best = max(best, val)
        return best

    return objective


def optimize_theta(cfg: SweepConfig, target: str | None = None, grid_steps: int | None = None,
                   tol: float = 1e-3):
    """
    Bath phase maximising efficiency or power.

    A uniform grid of ``grid_steps`` phases in ``[0, 2 pi)`` brackets the
    optimum, which golden-section search then refines to ``tol`` radians.

    Returns
    -------
    (theta_star, value)
    """
    target = target or cfg.target
    grid_steps = grid_steps or cfg.grid_steps
    if any(a.name == "theta_b" for a in cfg.axes):
        # a theta_b axis (as in the landscape presets) is replaced by the search itself
        cfg = replace(cfg, **{slot: None for slot in ("outer_axis", "inner_axis")
                              if getattr(cfg, slot) is not None and getattr(cfg, slot).name == "theta_b"})
    if len(cfg.axes) > 1:
        raise ConfigError("optimize_theta accepts at most one remaining sweep axis")
    f = theta_objective(cfg, target)
    grid = 2 * math.pi * np.arange(grid_steps) / grid_steps
    vals = np.array([f(t) for t in grid])
    if not np.any(np.isfinite(vals)):
        raise InvalidParameter("objective is undefined at every grid phase (all unstable)")
    k = int(np.argmax(vals))
    h = 2 * math.pi / grid_steps
    theta, value = golden_section_max(f, grid[k] - h, grid[k] + h, tol)
    if value < vals[k]:
        theta, value = grid[k], vals[k]
    return float(theta % (2 * math.pi)), float(value)
