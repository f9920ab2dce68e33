"""Time-domain integration of the full rate equations.

State vector layout (length 10):

    y = [rho11, rho22, rho33, rho44, rho55, rho66, rho77,
         Re rho14, Im rho14, n]

The occupation/coherence block is linear at fixed n (see
``steady.rate_matrix``); the photon equation dn/dt = g(y) * n makes the
system bilinear.  The system is stiff (rates span up to six orders of
magnitude), so integration uses BDF with the analytic Jacobian.

Time-domain operations are defined for single_orientation configurations;
a four_orientation ensemble would need parallel copies of the level block.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (ConvergenceError, DegenerateStepError,
                     InvalidConfigError, NoSignalError, StiffnessError)
from .model import (DerivedQuantities, ModelConfig, b_field_to_detuning,
                    derive_constants, output_power, with_drive)
from .steady import PopulationState, rate_matrix, solve_steady_state

logger = logging.getLogger("ltmag.dynamics")

TIMESERIES_COLUMNS = ("t", "rho11", "rho22", "rho33", "rho44", "rho55",
                      "rho66", "rho77", "rho14_re", "rho14_im", "n",
                      "P_out_W")

# Floor used to seed the photon number when starting from a dark state;
# spontaneous emission into the mode is not modeled, so turn-on needs a
# small classical seed.
DEFAULT_SEED_N = 1e-6

_TRACE_TOL = 1e-9


@dataclass(frozen=True)
class DriveModulation:
    """Time dependence of the microwave detuning.

    kinds:
      * ``constant``: delta = delta0;
      * ``step``: delta0 before ``step_time``, delta1 after;
      * ``sine_field``: delta follows a bias magnetic field plus a cosine
        test signal, bias_field + amplitude_field * cos(omega_signal t).
    """

    kind: str
    delta0: float = 0.0
    delta1: float = 0.0
    step_time: float = 0.0
    bias_field: float = 0.0
    amplitude_field: float = 0.0
    omega_signal: float = 0.0

    @classmethod
    def constant(cls, delta: float) -> "DriveModulation":
        return cls(kind="constant", delta0=delta)

    @classmethod
    def step(cls, delta_before: float, delta_after: float,
             step_time: float = 0.0) -> "DriveModulation":
        return cls(kind="step", delta0=delta_before, delta1=delta_after,
                   step_time=step_time)

    @classmethod
    def sine_field(cls, bias_field: float, amplitude_field: float,
                   omega_signal: float) -> "DriveModulation":
        if omega_signal <= 0.0:
            raise InvalidConfigError("omega_signal must be > 0")
        return cls(kind="sine_field", bias_field=bias_field,
                   amplitude_field=amplitude_field,
                   omega_signal=omega_signal)

    def detuning(self, t: float, config: ModelConfig) -> float:
        if self.kind == "constant":
            return self.delta0
        if self.kind == "step":
            return self.delta0 if t < self.step_time else self.delta1
        if self.kind == "sine_field":
            b = (self.bias_field + self.amplitude_field
                 * math.cos(self.omega_signal * t))
            return b_field_to_detuning(b, config.constants)
        raise InvalidConfigError(f"unknown modulation kind {self.kind!r}")


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trajectory; rows of ``states`` follow the state layout."""

    t: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        if self.states.ndim != 2 or self.states.shape[1] != 10 \
                or self.states.shape[0] != self.t.shape[0]:
            raise ValueError("states must have shape (len(t), 10)")

    @property
    def occupations(self) -> np.ndarray:
        return self.states[:, :7]

    @property
    def n(self) -> np.ndarray:
        return self.states[:, 9]

    def trace_drift(self) -> float:
        return float(np.max(np.abs(self.occupations.sum(axis=1) - 1.0)))

    def final_state(self) -> np.ndarray:
        return self.states[-1].copy()

    def to_csv(self, config: ModelConfig) -> str:
        """CSV with columns t, rho11..rho77, rho14_re, rho14_im, n, P_out_W
        (seconds and watts)."""
        d = derive_constants(config)
        scale = d.n_centers * config.cavity.kappa * d.photon_energy
        lines = [",".join(TIMESERIES_COLUMNS)]
        for ti, row in zip(self.t, self.states):
            vals = [repr(float(ti))]
            vals += [repr(float(x)) for x in row]
            vals.append(repr(float(max(row[9], 0.0) * scale)))
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ResponseResult:
    """Step-response timing extracted from the photon trajectory."""

    t_63: float
    t_90: float
    n_initial: float
    n_final: float
    delta_before: float
    delta_after: float
    seed_n: float
    settled: bool
    series: TimeSeries


@dataclass(frozen=True)
class HarmonicResult:
    """Demodulated response to a sinusoidal test field."""

    n_mean: float
    n_signal: float          # amplitude of the component at omega_signal
    phase: float             # rad, relative to the driving cosine
    distortion: float        # harmonic content relative to the fundamental
    omega_signal: float
    bias_field: float
    amplitude_field: float
    transient_time: float
    periods: int
    samples_per_period: int


def state_from_populations(state: PopulationState, n: float) -> np.ndarray:
    y = np.empty(10)
    y[:9] = state.as_array()
    y[9] = n
    return y


def _require_single_orientation(config: ModelConfig, what: str) -> None:
    if config.orientation.mode != "single_orientation":
        raise InvalidConfigError(
            f"{what} supports single_orientation configurations only")


def rhs(t: float, y: np.ndarray, config: ModelConfig,
        modulation: DriveModulation,
        derived: DerivedQuantities | None = None) -> np.ndarray:
    """Full right-hand side at time t.

    The occupation block conserves the trace exactly and dn/dt vanishes
    identically at n = 0.
    """
    d = derived if derived is not None else derive_constants(config)
    g = d.gain_coupling
    delta = modulation.detuning(t, config)
    a = rate_matrix(config, g, y[9], delta)
    dy = np.empty(10)
    dy[:9] = a @ y[:9]
    net = g * ((y[1] - y[2]) + (y[4] - y[5])) - config.cavity.kappa
    dy[9] = net * y[9]
    return dy


def jacobian(t: float, y: np.ndarray, config: ModelConfig,
             modulation: DriveModulation,
             derived: DerivedQuantities | None = None) -> np.ndarray:
    d = derived if derived is not None else derive_constants(config)
    g = d.gain_coupling
    delta = modulation.detuning(t, config)
    a = rate_matrix(config, g, y[9], delta)
    jac = np.zeros((10, 10))
    jac[:9, :9] = a
    # d/dn of the stimulated exchange terms
    jac[1, 9] = -g * (y[1] - y[2])
    jac[2, 9] = g * (y[1] - y[2])
    jac[4, 9] = -g * (y[4] - y[5])
    jac[5, 9] = g * (y[4] - y[5])
    # photon row
    gn = g * y[9]
    jac[9, 1] = gn
    jac[9, 2] = -gn
    jac[9, 4] = gn
    jac[9, 5] = -gn
    jac[9, 9] = g * ((y[1] - y[2]) + (y[4] - y[5])) - config.cavity.kappa
    return jac


def _sanitize(t: np.ndarray, states: np.ndarray, rtol: float,
              atol: float) -> TimeSeries:
    """Enforce the trajectory invariants on integrator output.

    Occupations may stray from [0, 1] and n below 0 by no more than the
    accumulated tolerance; such excursions are clamped (and logged),
    anything larger is an integration failure.
    """
    occ = states[:, :7]
    n = states[:, 9]
    occ_tol = max(atol, 10.0 * rtol)
    n_tol = max(atol, rtol * float(np.max(np.abs(n), initial=0.0)))
    worst_occ = float(min(np.min(occ), 1.0 - np.max(occ)))
    if worst_occ < -occ_tol:
        raise StiffnessError(
            "occupation left [0, 1] beyond tolerance",
            detail={"excursion": worst_occ, "tolerance": occ_tol})
    worst_n = float(np.min(n))
    if worst_n < -n_tol:
        raise StiffnessError(
            "photon number went negative beyond tolerance",
            detail={"n_min": worst_n, "tolerance": n_tol})
    if worst_occ < 0.0 or worst_n < 0.0:
        logger.debug("clamping small invariant violations "
                     "(occ %.3e, n %.3e)", worst_occ, worst_n)
        states = states.copy()
        np.clip(states[:, :7], 0.0, 1.0, out=states[:, :7])
        states[:, 9] = np.maximum(states[:, 9], 0.0)
    series = TimeSeries(t=np.asarray(t, dtype=float), states=states)
    drift = series.trace_drift()
    if drift > _TRACE_TOL:
        raise StiffnessError("trace drift above tolerance",
                             detail={"trace_drift": drift})
    return series


def _solve(config: ModelConfig, y0: np.ndarray, t_span: tuple[float, float],
           modulation: DriveModulation, rtol: float, atol: float,
           max_step: float = np.inf, dense: bool = False,
           t_eval=None):
    d = derive_constants(config)
    sol = solve_ivp(
        rhs, t_span, np.asarray(y0, dtype=float),
        method="BDF", rtol=rtol, atol=atol, max_step=max_step,
        dense_output=dense, t_eval=t_eval,
        args=(config, modulation, d),
        jac=lambda t, y, *args: jacobian(t, y, config, modulation, d))
    if not sol.success:
        raise StiffnessError(f"time integration failed: {sol.message}",
                             detail={"t_reached": float(sol.t[-1]),
                                     "span": t_span})
    return sol


def integrate(config: ModelConfig, y0: np.ndarray,
              t_span: tuple[float, float], modulation: DriveModulation,
              *, rtol: float = 1e-10, atol: float = 1e-14,
              t_eval=None, max_step: float = np.inf) -> TimeSeries:
    """Integrate the full system over t_span and validate the trajectory."""
    _require_single_orientation(config, "integrate")
    if len(y0) != 10:
        raise InvalidConfigError("initial state must have 10 components")
    sol = _solve(config, y0, t_span, modulation, rtol, atol,
                 max_step=max_step, t_eval=t_eval)
    return _sanitize(sol.t, sol.y.T, rtol, atol)


def _first_crossing(dense_sol, t_lo: float, t_hi: float, target: float,
                    rising: bool, samples: int = 4096) -> float | None:
    """Earliest time where the interpolated n(t) crosses ``target``."""
    from scipy.optimize import brentq

    ts = np.linspace(t_lo, t_hi, samples)
    n = dense_sol(ts)[9]
    f = n - target if rising else target - n
    if f[0] >= 0.0:
        return t_lo
    idx = np.nonzero(f >= 0.0)[0]
    if idx.size == 0:
        return None
    i = int(idx[0])
    return float(brentq(lambda t: float(dense_sol(t)[9]) - target,
                        ts[i - 1], ts[i], rtol=1e-13))


def step_response(config: ModelConfig, delta_before: float,
                  delta_after: float, *, seed_n: float | None = None,
                  rtol: float = 1e-10, atol: float = 1e-14,
                  output_points: int = 2001,
                  max_doublings: int = 10) -> ResponseResult:
    """Photon-number response to an instantaneous detuning step at t = 0.

    The system starts in the steady state of ``delta_before`` with the
    photon number floored at ``seed_n`` (default: max of the old steady
    value and 1e-6, since turn-on from an ideal dark state never starts).
    Reports the times to cover 63.2% and 90% of the photon-number span.
    The horizon grows geometrically until both targets are crossed.
    """
    _require_single_orientation(config, "step_response")
    if delta_after == delta_before:
        raise DegenerateStepError(
            "step requires distinct before/after detunings")
    before = with_drive(config, delta=delta_before)
    after = with_drive(config, delta=delta_after)
    ss_before = solve_steady_state(before)
    ss_after = solve_steady_state(after)
    seed = seed_n if seed_n is not None else max(ss_before.n, DEFAULT_SEED_N)
    if seed <= 0.0:
        raise InvalidConfigError("seed_n must be > 0")
    n_i = seed
    n_f = ss_after.n
    span = n_f - n_i
    if abs(span) <= 1e-9 * max(abs(n_f), abs(n_i)):
        raise DegenerateStepError(
            "steady photon number is unchanged by the step")
    y0 = state_from_populations(ss_before.aligned, seed)
    modulation = DriveModulation.constant(delta_after)

    d_after = derive_constants(after)
    gain0 = (d_after.gain_coupling
             * ((ss_before.aligned.rho22 - ss_before.aligned.rho33)
                + (ss_before.aligned.rho55 - ss_before.aligned.rho66))
             - config.cavity.kappa)
    tau_pop = _singlet_cycle_time(config)
    if span > 0.0 and gain0 > 0.0:
        horizon = math.log(n_f / seed) / gain0 + 10.0 * tau_pop
    else:
        horizon = 20.0 * tau_pop

    rising = span > 0.0
    target_63 = n_i + (1.0 - math.exp(-1.0)) * span
    target_90 = n_i + 0.9 * span
    t_63 = t_90 = None
    settled = False
    sol = None
    for _ in range(max_doublings):
        sol = _solve(after, y0, (0.0, horizon), modulation, rtol, atol,
                     dense=True)
        t_63 = _first_crossing(sol.sol, 0.0, horizon, target_63, rising)
        t_90 = _first_crossing(sol.sol, 0.0, horizon, target_90, rising)
        settled = abs(float(sol.y[9, -1]) - n_f) <= 1e-3 * abs(span)
        if t_63 is not None and t_90 is not None and settled:
            break
        horizon *= 2.0
    if t_63 is None or t_90 is None:
        raise ConvergenceError(
            "photon number never covered the requested span",
            detail={"horizon": horizon / 2.0, "n_final_target": n_f,
                    "n_end": float(sol.y[9, -1])})
    ts = np.linspace(0.0, sol.t[-1], output_points)
    series = _sanitize(ts, sol.sol(ts).T, rtol, atol)
    return ResponseResult(t_63=t_63, t_90=t_90, n_initial=n_i, n_final=n_f,
                          delta_before=delta_before,
                          delta_after=delta_after, seed_n=seed,
                          settled=settled, series=series)


def _singlet_cycle_time(config: ModelConfig) -> float:
    drv = config.drive
    r = config.rates
    return sum(1.0 / x for x in (max(drv.pump12, drv.pump45), r.L57, r.L74,
                                 config.cavity.kappa) if x > 0.0)


def ac_response(config: ModelConfig, bias_field: float,
                amplitude_field: float, omega_signal: float, *,
                periods: int = 10, samples_per_period: int = 64,
                rtol: float = 1e-10, atol: float = 1e-16) -> HarmonicResult:
    """Response to a small sinusoidal field on top of a bias field.

    Integrates through a transient of max(5 periods, 10 relaxation times),
    rounded up to whole periods so the sampling grid stays phase aligned,
    then demodulates exactly ``periods`` periods (at least 10) by
    quadrature sums at the signal frequency.  ``distortion`` collects the
    relative weight of higher harmonics of the signal frequency.
    """
    _require_single_orientation(config, "ac_response")
    if periods < 10:
        raise InvalidConfigError("demodulation needs at least 10 periods")
    if samples_per_period < 8:
        raise InvalidConfigError("need at least 8 samples per period")
    if amplitude_field <= 0.0:
        raise InvalidConfigError("amplitude_field must be > 0")
    if omega_signal <= 0.0:
        raise InvalidConfigError("omega_signal must be > 0")

    biased = with_drive(config, delta=b_field_to_detuning(
        bias_field, config.constants))
    ss_bias = solve_steady_state(biased)
    edge_n = []
    for b in (bias_field - amplitude_field, bias_field + amplitude_field):
        cfg = with_drive(config,
                         delta=b_field_to_detuning(b, config.constants))
        edge_n.append(solve_steady_state(cfg).n)
    if ss_bias.n == 0.0 and max(edge_n) == 0.0:
        raise NoSignalError(
            "below threshold across the whole modulation cycle")

    period = 2.0 * math.pi / omega_signal
    t_relax = _singlet_cycle_time(config)
    transient = max(5.0 * period, 10.0 * t_relax)
    transient = math.ceil(transient / period - 1e-12) * period
    n_samples = periods * samples_per_period

    seed = max(ss_bias.n, DEFAULT_SEED_N)
    y0 = state_from_populations(ss_bias.aligned, seed)
    modulation = DriveModulation.sine_field(bias_field, amplitude_field,
                                            omega_signal)
    t_end = transient + periods * period
    sol = _solve(config, y0, (0.0, t_end), modulation, rtol, atol,
                 max_step=period / samples_per_period, dense=True)
    t_k = transient + np.arange(n_samples) * (periods * period / n_samples)
    n_k = sol.sol(t_k)[9]
    if float(np.max(n_k)) <= 10.0 * atol:
        raise NoSignalError("no photon output during the sampled window")

    spectrum = np.fft.rfft(n_k)
    n_mean = float(spectrum[0].real) / n_samples
    c1 = 2.0 * spectrum[periods] / n_samples
    n_signal = float(np.abs(c1))
    phase = float(np.angle(c1))
    harm_power = 0.0
    h = 2
    while h * periods < n_samples // 2:
        harm_power += float(np.abs(2.0 * spectrum[h * periods]
                                   / n_samples)) ** 2
        h += 1
    distortion = math.sqrt(harm_power) / n_signal if n_signal > 0.0 else 0.0
    return HarmonicResult(n_mean=n_mean, n_signal=n_signal, phase=phase,
                          distortion=distortion, omega_signal=omega_signal,
                          bias_field=bias_field,
                          amplitude_field=amplitude_field,
                          transient_time=transient, periods=periods,
                          samples_per_period=samples_per_period)
