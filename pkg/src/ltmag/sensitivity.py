"""Shot-noise-limited magnetic-field sensitivity.

The detected quantity is the photon output; the photon shot noise in a
one-second measurement corresponds to a field uncertainty

    eta_dc = sqrt(n / (N_centers * kappa)) / |dn/dB|      (T / sqrt(Hz))

for a static read-out, and for a sinusoidal test field of amplitude B_S
producing a demodulated photon amplitude n_S

    eta_ac = (B_S / n_S) * sqrt(n_mean * excess_noise / (N_centers * kappa))

where ``excess_noise`` accounts for technical noise above the shot
level in the demodulated band.

The slope dn/dB is computed by adaptive central differences with
Richardson extrapolation.  Near the zero-crossing of the slope (the
bottom of the symmetric output dip) the sensitivity genuinely diverges;
that is reported by an explicit ``diverged`` flag rather than a number
pretending to be finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import ac_response
from .errors import (BelowThresholdError, ConvergenceError,
                     InvalidConfigError, PhysicsDomainError)
from .model import (ModelConfig, derive_constants, detuning_to_b_field,
                    with_bias_field, with_drive, with_pump)
from .steady import solve_steady_state

METHOD_DC = "dc_finite_difference"
METHOD_AC_TIME = "ac_timedomain"
METHOD_AC_QUASISTATIC = "ac_quasistatic"

# Demodulated noise above the shot level (dimensionless power factor),
# representative of a lock-in read-out.
DEFAULT_EXCESS_NOISE = 2.43

_SLOPE_TARGET_REL = 1e-3
_MAX_HALVINGS = 40


@dataclass(frozen=True)
class AcSignalModel:
    """Sinusoidal test-field specification for a.c. sensitivity."""

    bias_field: float        # T
    amplitude_field: float   # T
    omega_signal: float      # rad/s
    excess_noise: float = DEFAULT_EXCESS_NOISE

    def __post_init__(self):
        if self.amplitude_field <= 0.0:
            raise InvalidConfigError("amplitude_field must be > 0")
        if self.omega_signal <= 0.0:
            raise InvalidConfigError("omega_signal must be > 0")
        if self.excess_noise < 1.0:
            raise InvalidConfigError("excess_noise must be >= 1")


@dataclass(frozen=True)
class SensitivityResult:
    """Sensitivity at one operating point.

    ``eta`` is in T/sqrt(Hz); it is +inf when ``diverged`` is set (the
    slope fell below the resolvable floor, e.g. at the bottom of the
    output dip).  ``fd_step`` and ``fd_rel_error`` document the final
    finite-difference step and its Richardson error estimate for the
    d.c. methods; a.c. time-domain results carry the demodulated
    amplitude in ``n_signal`` instead.
    """

    eta: float
    b_field: float
    n: float
    slope_dn_db: float
    shot_factor: float
    method: str
    diverged: bool = False
    fd_step: float | None = None
    fd_rel_error: float | None = None
    n_signal: float | None = None
    omega_signal: float | None = None
    amplitude_field: float | None = None
    excess_noise: float | None = None


@dataclass(frozen=True)
class OptimizationOutcome:
    """Result of a sensitivity optimization over device parameters."""

    config: ModelConfig
    eta: float
    b_field: float
    start_eta: float
    evaluations: int
    converged: bool
    varied: tuple[str, ...]


@dataclass(frozen=True)
class RobustnessReport:
    """Sensitivity-curve deviations when the weak crossing L27 is enabled."""

    b_grid: np.ndarray
    ratios: tuple[float, ...]
    base_curve: tuple
    curves: dict
    max_rel_dev: dict
    median_rel_dev: dict
    common_points: dict


def _n_at_field(config: ModelConfig, b_field: float) -> float:
    return solve_steady_state(with_bias_field(config, b_field)).n


class _SlopeFloor(Exception):
    """Internal: slope below the resolvable floor."""

    def __init__(self, slope, step):
        self.slope = slope
        self.step = step


def _slope_dn_db(config: ModelConfig, b_field: float,
                 h0: float | None = None,
                 target_rel: float = _SLOPE_TARGET_REL):
    """Adaptive central-difference slope with Richardson extrapolation.

    Halves the step until the two-point Richardson error estimate is below
    ``target_rel``; shrinks further if a stencil point falls below
    threshold (the slope at a point near the lasing edge must be
    one-sided in field but the stencil must stay on the lasing branch).
    Raises _SlopeFloor when the measured slope is too small to
    distinguish from root-solver noise.
    """
    h = h0 if h0 is not None else max(1e-3 * abs(b_field), 1e-9)

    def stencil(step):
        vals = [_n_at_field(config, b_field + s)
                for s in (-step, -0.5 * step, 0.5 * step, step)]
        return vals

    for _ in range(_MAX_HALVINGS):
        n_m2, n_m1, n_p1, n_p2 = stencil(h)
        if min(n_m2, n_m1, n_p1, n_p2) <= 0.0 and h > 1e-15:
            # stencil straddles the lasing edge; tighten around the point
            h *= 0.5
            continue
        s_h = (n_p2 - n_m2) / (2.0 * h)
        s_h2 = (n_p1 - n_m1) / h
        err = abs(s_h2 - s_h) / 3.0
        slope = s_h2 + (s_h2 - s_h) / 3.0
        floor = 1e-10 * max(n_p2, n_m2, n_p1, n_m1) / h
        if abs(slope) <= 10.0 * floor:
            raise _SlopeFloor(slope, h)
        if err <= target_rel * abs(slope):
            return slope, h, err / abs(slope)
        h *= 0.5
    raise ConvergenceError(
        "finite-difference slope did not stabilize",
        detail={"b_field": b_field, "last_step": h})


def _shot_factor(config: ModelConfig, n: float, derived=None) -> float:
    d = derived if derived is not None else derive_constants(config)
    return math.sqrt(n / (d.n_centers * config.cavity.kappa))


def dc_sensitivity(config: ModelConfig, b_field: float, *,
                   h0: float | None = None) -> SensitivityResult:
    """Shot-noise d.c. sensitivity at a bias field.

    Raises BelowThresholdError when there is no output at the bias.  A
    vanishing slope (symmetry point of the output curve) is reported as
    a diverged result with eta = +inf.
    """
    ss = solve_steady_state(with_bias_field(config, b_field))
    if ss.n <= 0.0:
        raise BelowThresholdError(
            f"no optical output at B = {b_field:.6e} T")
    shot = _shot_factor(config, ss.n)
    try:
        slope, step, rel_err = _slope_dn_db(config, b_field, h0=h0)
    except _SlopeFloor as fl:
        return SensitivityResult(
            eta=math.inf, b_field=b_field, n=ss.n, slope_dn_db=fl.slope,
            shot_factor=shot, method=METHOD_DC, diverged=True,
            fd_step=fl.step, fd_rel_error=None)
    return SensitivityResult(
        eta=shot / abs(slope), b_field=b_field, n=ss.n,
        slope_dn_db=slope, shot_factor=shot, method=METHOD_DC,
        diverged=False, fd_step=step, fd_rel_error=rel_err)


def dc_sensitivity_curve(config: ModelConfig, b_grid
                         ) -> list[SensitivityResult | None]:
    """dc_sensitivity over a field grid.

    Below-threshold points are reported as None (absent), never as zero
    sensitivity; diverged points keep their flag.
    """
    out = []
    for b in np.asarray(b_grid, dtype=float):
        try:
            out.append(dc_sensitivity(config, float(b)))
        except BelowThresholdError:
            out.append(None)
    return out


def ac_sensitivity(config: ModelConfig, signal: AcSignalModel, *,
                   method: str = METHOD_AC_TIME, periods: int = 10,
                   samples_per_period: int = 64) -> SensitivityResult:
    """Sensitivity to a small sinusoidal field at a bias point.

    ``ac_timedomain`` integrates the driven system and demodulates the
    photon output; ``ac_quasistatic`` replaces the demodulated amplitude
    by |dn/dB| * B_S, valid when the signal period is long compared with
    the laser response time.
    """
    d = derive_constants(config)
    if method == METHOD_AC_QUASISTATIC:
        base = dc_sensitivity(config, signal.bias_field)
        if base.diverged:
            return replace(base, method=METHOD_AC_QUASISTATIC,
                           amplitude_field=signal.amplitude_field,
                           omega_signal=signal.omega_signal,
                           excess_noise=signal.excess_noise)
        n_signal = abs(base.slope_dn_db) * signal.amplitude_field
        eta = (signal.amplitude_field / n_signal) * math.sqrt(
            base.n * signal.excess_noise
            / (d.n_centers * config.cavity.kappa))
        return SensitivityResult(
            eta=eta, b_field=signal.bias_field, n=base.n,
            slope_dn_db=base.slope_dn_db, shot_factor=base.shot_factor,
            method=METHOD_AC_QUASISTATIC, diverged=False,
            fd_step=base.fd_step, fd_rel_error=base.fd_rel_error,
            n_signal=n_signal, omega_signal=signal.omega_signal,
            amplitude_field=signal.amplitude_field,
            excess_noise=signal.excess_noise)
    if method != METHOD_AC_TIME:
        raise InvalidConfigError(
            f"unknown a.c. method {method!r}; expected "
            f"{METHOD_AC_TIME!r} or {METHOD_AC_QUASISTATIC!r}")
    hr = ac_response(config, signal.bias_field, signal.amplitude_field,
                     signal.omega_signal, periods=periods,
                     samples_per_period=samples_per_period)
    return sensitivity_from_harmonic(config, signal, hr)


def sensitivity_from_harmonic(config: ModelConfig, signal: AcSignalModel,
                              harmonic) -> SensitivityResult:
    """Sensitivity from an already-demodulated response (a HarmonicResult)."""
    d = derive_constants(config)
    if harmonic.n_signal <= 0.0:
        raise PhysicsDomainError("demodulated amplitude is zero")
    eta = (signal.amplitude_field / harmonic.n_signal) * math.sqrt(
        harmonic.n_mean * signal.excess_noise
        / (d.n_centers * config.cavity.kappa))
    slope_equiv = harmonic.n_signal / signal.amplitude_field
    return SensitivityResult(
        eta=eta, b_field=signal.bias_field, n=harmonic.n_mean,
        slope_dn_db=slope_equiv,
        shot_factor=math.sqrt(harmonic.n_mean
                              / (d.n_centers * config.cavity.kappa)),
        method=METHOD_AC_TIME, diverged=False, n_signal=harmonic.n_signal,
        omega_signal=signal.omega_signal,
        amplitude_field=signal.amplitude_field,
        excess_noise=signal.excess_noise)


def find_bias_point(config: ModelConfig, b_min: float, b_max: float, *,
                    coarse_points: int = 41,
                    refine_rounds: int = 4) -> SensitivityResult:
    """Bias field maximizing |dn/dB| inside [b_min, b_max].

    Searches a coarse grid, then repeatedly zooms around the best point.
    The output-vs-field curve is symmetric in B, so two mirror maximizers
    can exist; exact ties are broken toward positive field.
    """
    if b_max <= b_min:
        raise InvalidConfigError("need b_max > b_min")

    def slope_at(b):
        try:
            slope, _, _ = _slope_dn_db(config, b)
            return abs(slope)
        except (_SlopeFloor, BelowThresholdError):
            return 0.0
        except ConvergenceError:
            return 0.0

    lo, hi = float(b_min), float(b_max)
    points = coarse_points
    best_b = None
    for _ in range(refine_rounds):
        grid = np.linspace(lo, hi, points)
        # skip dark points cheaply before paying for adaptive slopes
        lasing = [b for b in grid
                  if _n_at_field(config, float(b)) > 0.0]
        if not lasing:
            raise BelowThresholdError(
                "no lasing output anywhere in the search window")
        scored = [(slope_at(float(b)), float(b)) for b in lasing]
        # mirror maximizers differ only by grid roundoff; treat slopes
        # within a hair of the top as tied and settle toward positive B
        top = max(sb[0] for sb in scored)
        tied = [sb for sb in scored if sb[0] >= top * (1.0 - 1e-9)]
        best = max(tied, key=lambda sb: (sb[1] > 0.0, sb[1]))
        if top == 0.0:
            raise PhysicsDomainError(
                "output does not vary with field anywhere in the window")
        best_b = best[1]
        width = (hi - lo) / (points - 1)
        lo, hi = best_b - width, best_b + width
        points = 21
    return dc_sensitivity(config, best_b)


_PARAM_PATHS = {
    "kappa": ("cavity", "kappa"),
    "pump": ("drive", "pump"),
    "omega": ("drive", "omega"),
}


def _apply_params(config: ModelConfig, names, values) -> ModelConfig:
    cfg = config
    for name, value in zip(names, values):
        value = float(value)
        if name == "kappa":
            cfg = replace(cfg, cavity=replace(cfg.cavity, kappa=value))
        elif name == "pump":
            cfg = with_pump(cfg, value)
        elif name == "omega":
            cfg = with_drive(cfg, omega=value)
        else:
            raise InvalidConfigError(
                f"unknown optimization parameter {name!r}; "
                f"expected one of {sorted(_PARAM_PATHS)}")
    return cfg


def _param_value(config: ModelConfig, name: str) -> float:
    if name == "kappa":
        return config.cavity.kappa
    if name == "pump":
        return config.drive.pump12
    if name == "omega":
        return config.drive.omega
    raise InvalidConfigError(f"unknown optimization parameter {name!r}")


def best_eta_over_field(config: ModelConfig, b_min: float, b_max: float, *,
                        grid_points: int = 25,
                        refine_iters: int = 16) -> tuple[float, float]:
    """Smallest finite d.c. sensitivity over a field window.

    Returns (eta, b).  Coarse grid scan followed by golden-section
    refinement between the neighbours of the best grid point.  Raises
    BelowThresholdError when nothing in the window lases.
    """
    grid = np.linspace(b_min, b_max, grid_points)
    etas = []
    for b in grid:
        try:
            res = dc_sensitivity(config, float(b))
            etas.append(res.eta if not res.diverged else math.inf)
        except (BelowThresholdError, ConvergenceError):
            etas.append(math.inf)
    etas = np.asarray(etas)
    if not np.any(np.isfinite(etas)):
        raise BelowThresholdError(
            "no finite sensitivity anywhere in the field window")
    k = int(np.argmin(etas))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid_points - 1)]

    def eta_at(b):
        try:
            res = dc_sensitivity(config, float(b))
            return res.eta if not res.diverged else math.inf
        except (BelowThresholdError, ConvergenceError):
            return math.inf

    # golden-section shrink on the bracket
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    dpt = a + invphi * (b - a)
    fc, fd = eta_at(c), eta_at(dpt)
    for _ in range(refine_iters):
        if fc <= fd:
            b, dpt, fd = dpt, c, fc
            c = b - invphi * (b - a)
            fc = eta_at(c)
        else:
            a, c, fc = c, dpt, fd
            dpt = a + invphi * (b - a)
            fd = eta_at(dpt)
    candidates = [(fc, c), (fd, dpt), (float(etas[k]), float(grid[k]))]
    best = min(candidates, key=lambda eb: eb[0])
    return best


def optimize_sensitivity(config: ModelConfig, *,
                         vary: tuple[str, ...] = ("kappa", "pump", "omega"),
                         bounds_decades: float = 1.0,
                         b_window: tuple[float, float] = (0.0, 300e-6),
                         max_evaluations: int = 200,
                         grid_points: int = 25) -> OptimizationOutcome:
    """Minimize the best-over-field d.c. sensitivity over device knobs.

    Works in log10 parameter space with box bounds of
    ``bounds_decades`` around the starting values, using Nelder-Mead
    (derivative-free; the objective has kinks where the lasing window
    changes).  Out-of-bounds proposals are clipped and penalized.  The
    search is deterministic and the returned point is never worse than
    the start.
    """
    for name in vary:
        if name not in _PARAM_PATHS:
            raise InvalidConfigError(
                f"unknown optimization parameter {name!r}")
    from scipy.optimize import minimize

    start = np.array([math.log10(_param_value(config, n)) for n in vary])
    lo = start - bounds_decades
    hi = start + bounds_decades
    start_eta, start_b = best_eta_over_field(
        config, b_window[0], b_window[1], grid_points=grid_points)

    state = {"best_eta": start_eta, "best_logs": start.copy(),
             "best_b": start_b, "evals": 0}

    def objective(logs):
        state["evals"] += 1
        clipped = np.clip(logs, lo, hi)
        penalty = float(np.sum((logs - clipped) ** 2))
        cfg = _apply_params(config, vary, 10.0 ** clipped)
        try:
            eta, b_at = best_eta_over_field(
                cfg, b_window[0], b_window[1], grid_points=grid_points)
        except (PhysicsDomainError, ConvergenceError):
            return 1.0 + penalty
        if eta < state["best_eta"]:
            state["best_eta"] = eta
            state["best_logs"] = clipped.copy()
            state["best_b"] = b_at
        # work on a log scale so the simplex sees O(1) variations
        return math.log10(eta) + penalty

    res = minimize(objective, start, method="Nelder-Mead",
                   options={"maxfev": max_evaluations, "xatol": 1e-3,
                            "fatol": 1e-4, "disp": False})
    best_cfg = _apply_params(config, vary, 10.0 ** state["best_logs"])
    return OptimizationOutcome(
        config=best_cfg, eta=state["best_eta"], b_field=state["best_b"],
        start_eta=start_eta, evaluations=state["evals"],
        converged=bool(res.success), varied=tuple(vary))


def l27_robustness(config: ModelConfig,
                   ratios: tuple[float, ...] = (0.01, 0.1),
                   b_grid=None) -> RobustnessReport:
    """Effect of the weak excited-state crossing on the sensitivity curve.

    For each ratio r the rate L27 is set to r * L57 and the d.c.
    sensitivity curve recomputed on ``b_grid`` (default: +-300 uT).  The
    deviation for a ratio is measured against the L27 = 0 curve on the
    points where both are finite.  Ratio 0 reproduces the base curve
    identically.  ``max_rel_dev`` is +inf for a ratio with no common
    lasing points left.
    """
    if b_grid is None:
        b_grid = np.linspace(-300e-6, 300e-6, 61)
    b_grid = np.asarray(b_grid, dtype=float)

    def curve_for(ratio):
        cfg = replace(config, rates=replace(
            config.rates, L27=ratio * config.rates.L57))
        return dc_sensitivity_curve(cfg, b_grid)

    base = curve_for(0.0)
    curves = {}
    max_dev = {}
    med_dev = {}
    common = {}
    for ratio in ratios:
        cur = curve_for(ratio)
        curves[ratio] = cur
        devs = []
        for rb, rv in zip(base, cur):
            if rb is None or rv is None or rb.diverged or rv.diverged:
                continue
            devs.append(abs(rv.eta - rb.eta) / rb.eta)
        common[ratio] = len(devs)
        if devs:
            max_dev[ratio] = float(max(devs))
            med_dev[ratio] = float(np.median(devs))
        else:
            max_dev[ratio] = math.inf
            med_dev[ratio] = math.inf
    return RobustnessReport(b_grid=b_grid, ratios=tuple(ratios),
                            base_curve=tuple(base), curves=curves,
                            max_rel_dev=max_dev, median_rel_dev=med_dev,
                            common_points=common)
