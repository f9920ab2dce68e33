"""Steady-state solvers.

The level occupations and the ground-spin coherence obey a linear system
at fixed photon number n, because n only enters through the stimulated
rates G*n.  The full steady state is therefore found in two stages:

1. ``populations_at_fixed_n`` solves the 9x9 linear system (seven
   occupations plus Re/Im of the ground coherence) with the trace
   constraint replacing one redundant rate equation;
2. ``solve_steady_state`` finds the photon number at which the net gain
   crosses zero.  Net gain decreases monotonically with n (stimulated
   emission burns the inversion), so a bracketed scalar root is enough.

If the zero-photon gain is not positive there is no lasing solution and
the n = 0 branch is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .errors import (ConvergenceError, DegenerateConfigError, NotLasableError)
from .model import (DerivedQuantities, ModelConfig, derive_constants,
                    with_pump)

BELOW_THRESHOLD = "below_threshold"
LASING = "lasing"

# Relative tolerances of the two solve stages.  The linear stage is
# checked against the largest rate in the system; the root stage is
# checked against the cavity loss.
_LINEAR_RESIDUAL_RTOL = 1e-10
_GAIN_RESIDUAL_RTOL = 1e-8
_N_ROOT_RTOL = 1e-12
_BRACKET_CAP = 1e12


@dataclass(frozen=True)
class PopulationState:
    """Occupations of the seven levels plus the ground-spin coherence.

    Occupations must lie in [0, 1] and the coherence magnitude below 1/2,
    up to solver tolerance.
    """

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho55: float
    rho66: float
    rho77: float
    rho14_re: float
    rho14_im: float

    _BOUND_SLACK = 1e-7

    def __post_init__(self):
        occ = (self.rho11, self.rho22, self.rho33, self.rho44,
               self.rho55, self.rho66, self.rho77)
        s = self._BOUND_SLACK
        if min(occ) < -s or max(occ) > 1.0 + s:
            raise ConvergenceError(
                "occupation outside [0, 1]", detail={"occupations": occ})
        if self.rho14_re ** 2 + self.rho14_im ** 2 > 0.25 + s:
            raise ConvergenceError(
                "ground coherence magnitude above 1/2",
                detail={"rho14_re": self.rho14_re,
                        "rho14_im": self.rho14_im})

    def trace(self) -> float:
        return (self.rho11 + self.rho22 + self.rho33 + self.rho44
                + self.rho55 + self.rho66 + self.rho77)

    def coherence_mag(self) -> float:
        return float(np.hypot(self.rho14_re, self.rho14_im))

    def as_array(self) -> np.ndarray:
        return np.array([self.rho11, self.rho22, self.rho33, self.rho44,
                         self.rho55, self.rho66, self.rho77,
                         self.rho14_re, self.rho14_im])

    @classmethod
    def from_array(cls, v) -> "PopulationState":
        v = np.asarray(v, dtype=float)
        if v.shape != (9,):
            raise ValueError(f"expected 9 components, got shape {v.shape}")
        return cls(*(float(x) for x in v))


@dataclass(frozen=True)
class SteadyStateResult:
    """Self-consistent operating point of the full system.

    ``populations`` holds one entry per sub-ensemble (a single entry in
    single_orientation mode) with matching ``weights`` and ``detunings``.
    ``branch`` is ``"below_threshold"`` exactly when ``n == 0``.
    ``residual`` is the largest occupation/coherence rate at the solution
    relative to the largest rate constant in the system.
    """

    n: float
    branch: str
    net_gain: float
    residual: float
    populations: tuple[PopulationState, ...]
    weights: tuple[float, ...]
    detunings: tuple[float, ...]

    @property
    def aligned(self) -> PopulationState:
        return self.populations[0]


def rate_matrix(config: ModelConfig, gain_coupling: float, n: float,
                delta: float) -> np.ndarray:
    """Generator A of the linear part: d/dt v = A v.

    v = [rho11, rho22, rho33, rho44, rho55, rho66, rho77,
         Re rho14, Im rho14].  The occupation block conserves the trace
    by construction (every loss term reappears as a gain elsewhere), and
    the coherence rows do not feed back into the trace.
    """
    r = config.rates
    d = config.drive
    gn = gain_coupling * n
    gamma = r.gamma14 + 0.5 * (d.pump12 + d.pump45)
    a = np.zeros((9, 9))
    # rho11: pumped out, refilled by decays and the singlet, driven by Im rho14
    a[0, 0] = -d.pump12
    a[0, 1] = r.L21
    a[0, 2] = r.L31
    a[0, 6] = r.L71
    a[0, 8] = -2.0 * d.omega
    # rho22: pump in, decays out, stimulated exchange with rho33
    a[1, 0] = d.pump12
    a[1, 1] = -(r.L21 + r.L23 + r.L27) - gn
    a[1, 2] = gn
    # rho33
    a[2, 1] = r.L23 + gn
    a[2, 2] = -r.L31 - gn
    # rho44
    a[3, 3] = -d.pump45
    a[3, 4] = r.L54
    a[3, 5] = r.L64
    a[3, 6] = r.L74
    a[3, 8] = 2.0 * d.omega
    # rho55
    a[4, 3] = d.pump45
    a[4, 4] = -(r.L54 + r.L56 + r.L57) - gn
    a[4, 5] = gn
    # rho66
    a[5, 4] = r.L56 + gn
    a[5, 5] = -r.L64 - gn
    # rho77: fed by both intersystem crossings
    a[6, 1] = r.L27
    a[6, 4] = r.L57
    a[6, 6] = -(r.L71 + r.L74)
    # Re rho14
    a[7, 7] = -gamma
    a[7, 8] = -delta
    # Im rho14: driven by the ground-state population difference
    a[8, 0] = d.omega
    a[8, 3] = -d.omega
    a[8, 7] = delta
    a[8, 8] = -gamma
    return a


def _max_rate(config: ModelConfig, gain_coupling: float, n: float) -> float:
    r = config.rates
    d = config.drive
    rates = [r.L21, r.L23, r.L31, r.L54, r.L56, r.L64, r.L57, r.L71,
             r.L74, r.L27, r.gamma14, d.pump12, d.pump45, d.omega,
             abs(d.delta), config.cavity.kappa, gain_coupling * n]
    return max(rates)


def _solve_linear(a: np.ndarray) -> np.ndarray:
    """Solve A v = 0 with unit trace, replacing the first row by the
    trace constraint.  One step of iterative refinement keeps the
    residual near machine precision; rank-deficient systems (pump-free
    configurations) fall back to the least-squares minimum-norm solution.
    """
    m = a.copy()
    m[0, :] = 0.0
    m[0, :7] = 1.0
    b = np.zeros(9)
    b[0] = 1.0
    try:
        v = np.linalg.solve(m, b)
        resid = b - m @ v
        v = v + np.linalg.solve(m, resid)
        if not np.all(np.isfinite(v)):
            raise np.linalg.LinAlgError("non-finite solution")
    except np.linalg.LinAlgError:
        v = np.linalg.lstsq(m, b, rcond=None)[0]
    return v


def populations_at_fixed_n(config: ModelConfig, n: float,
                           delta: float | None = None,
                           derived: DerivedQuantities | None = None
                           ) -> PopulationState:
    """Steady occupations of one sub-ensemble at frozen photon number.

    ``delta`` defaults to the configured drive detuning.  Raises
    DegenerateConfigError when every transition rate, pump, and drive is
    zero (the occupation split is then undetermined), and
    ConvergenceError when the linear solve fails its residual check.
    """
    if n < 0.0:
        raise ValueError(f"photon number must be >= 0, got {n!r}")
    if config.rates.all_zero() and config.drive.pump12 == 0.0 \
            and config.drive.pump45 == 0.0 and config.drive.omega == 0.0:
        raise DegenerateConfigError(
            "all transition rates and drives are zero; occupations are "
            "undetermined")
    d = derived if derived is not None else derive_constants(config)
    if delta is None:
        delta = config.drive.delta
    a = rate_matrix(config, d.gain_coupling, n, delta)
    v = _solve_linear(a)
    scale = _max_rate(config, d.gain_coupling, n)
    residual = float(np.max(np.abs(a @ v))) / scale
    if residual > _LINEAR_RESIDUAL_RTOL:
        raise ConvergenceError(
            "fixed-n linear solve residual above tolerance",
            detail={"residual": residual, "n": n, "delta": delta})
    return PopulationState.from_array(v)


def _ensembles(config: ModelConfig) -> tuple[tuple[float, float], ...]:
    """(weight, detuning) for each sub-ensemble."""
    ori = config.orientation
    delta = config.drive.delta
    if ori.mode == "single_orientation":
        return ((1.0, delta),)
    return ((ori.aligned_fraction, delta),
            (1.0 - ori.aligned_fraction, ori.off_axis_detuning))


def _gain_of_state(state: PopulationState, gain_coupling: float) -> float:
    return gain_coupling * ((state.rho22 - state.rho33)
                            + (state.rho55 - state.rho66))


def net_gain(config: ModelConfig, n: float,
             derived: DerivedQuantities | None = None) -> float:
    """Photon growth rate d(ln n)/dt at frozen photon number (rad/s).

    Weighted over sub-ensembles in four_orientation mode, minus the
    cavity loss.
    """
    d = derived if derived is not None else derive_constants(config)
    total = 0.0
    for weight, delta in _ensembles(config):
        state = populations_at_fixed_n(config, n, delta=delta, derived=d)
        total += weight * _gain_of_state(state, d.gain_coupling)
    return total - config.cavity.kappa


def _steady_result(config: ModelConfig, d: DerivedQuantities, n: float,
                   branch: str) -> SteadyStateResult:
    pops = []
    weights = []
    deltas = []
    gain = 0.0
    for weight, delta in _ensembles(config):
        state = populations_at_fixed_n(config, n, delta=delta, derived=d)
        pops.append(state)
        weights.append(weight)
        deltas.append(delta)
        gain += weight * _gain_of_state(state, d.gain_coupling)
    gain -= config.cavity.kappa
    residual = 0.0
    for state, delta in zip(pops, deltas):
        a = rate_matrix(config, d.gain_coupling, n, delta)
        r = float(np.max(np.abs(a @ state.as_array())))
        residual = max(residual, r / _max_rate(config, d.gain_coupling, n))
    return SteadyStateResult(n=n, branch=branch, net_gain=gain,
                             residual=residual, populations=tuple(pops),
                             weights=tuple(weights), detunings=tuple(deltas))


def solve_steady_state(config: ModelConfig,
                       derived: DerivedQuantities | None = None
                       ) -> SteadyStateResult:
    """Self-consistent photon number and populations.

    Zero-photon net gain <= 0 selects the dark branch (exactly zero gain
    included, so marginal configurations report below_threshold).  Above
    threshold, the bracket [0, n_hi] is expanded geometrically and the
    gain root located to relative precision 1e-12 in n; the residual gain
    at the root must be below 1e-8 * kappa.
    """
    d = derived if derived is not None else derive_constants(config)
    g0 = net_gain(config, 0.0, derived=d)
    if g0 <= 0.0:
        return _steady_result(config, d, 0.0, BELOW_THRESHOLD)

    def f(n):
        return net_gain(config, n, derived=d)

    hi = 1e-6
    g_hi = f(hi)
    while g_hi > 0.0:
        hi *= 4.0
        if hi > _BRACKET_CAP:
            raise ConvergenceError(
                "gain stayed positive up to the photon-number cap",
                detail={"last_bracket": (hi / 4.0, hi), "gain_at_cap": g_hi})
        g_hi = f(hi)
    n_root = brentq(f, 0.0, hi, rtol=_N_ROOT_RTOL, xtol=1e-300, maxiter=200)
    gain_res = f(n_root)
    if abs(gain_res) > _GAIN_RESIDUAL_RTOL * config.cavity.kappa:
        raise ConvergenceError(
            "gain residual at the photon-number root above tolerance",
            detail={"n": n_root, "gain_residual": gain_res,
                    "last_bracket": (0.0, hi)})
    return _steady_result(config, d, n_root, LASING)


def threshold_pump(config: ModelConfig, delta: float | None = None,
                   pump_ceiling: float = _BRACKET_CAP) -> float:
    """Pump rate at which zero-photon net gain crosses zero (rad/s).

    Both branch pumps are varied together.  Gain must increase
    monotonically along the bracket; a non-monotone profile aborts rather
    than returning an arbitrary crossing.  Raises NotLasableError when no
    pump below ``pump_ceiling`` reaches threshold.
    """
    if delta is not None:
        config = replace(config,
                         drive=replace(config.drive, delta=delta))

    def g(pump):
        cfg = with_pump(config, pump)
        return net_gain(cfg, 0.0)

    g_lo = g(0.0)
    if g_lo > 0.0:
        raise ConvergenceError(
            "gain positive at zero pump; the model should not lase unpumped",
            detail={"gain_at_zero_pump": g_lo})
    hi = 1e5
    g_hi = g(hi)
    while g_hi <= 0.0:
        hi *= 2.0
        if hi > pump_ceiling:
            raise NotLasableError(
                f"no lasing threshold below pump {pump_ceiling:.3e} rad/s",
                pump_ceiling=pump_ceiling)
        g_hi = g(hi)
    lo = 0.0
    # Sanity-check monotonicity on the bracket before trusting the root.
    samples = [g(lo + frac * (hi - lo)) for frac in (0.25, 0.5, 0.75)]
    seq = [g_lo, *samples, g_hi]
    slack = 1e-12 * config.cavity.kappa
    if any(b < a - slack for a, b in zip(seq, seq[1:])):
        raise ConvergenceError(
            "zero-photon gain is not monotone in the pump on the bracket",
            detail={"bracket": (lo, hi), "gain_samples": seq})
    return brentq(g, lo, hi, rtol=1e-12, xtol=1e-300, maxiter=200)


def find_operating_point(config: ModelConfig,
                         omega: float | None = None) -> float:
    """Threshold pump at zero detuning for the given Rabi rate (rad/s).

    This is the pump setting that parks the resonant (zero-field) system
    exactly at threshold, so any detuning pushes it into lasing.  With
    omega = 0 the microwave drive decouples and the result reduces to
    the plain optical threshold.
    """
    if omega is not None:
        config = replace(config,
                         drive=replace(config.drive, omega=omega))
    return threshold_pump(config, delta=0.0)
