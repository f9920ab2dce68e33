"""Steady-state solvers: fixed-n populations, gain root, thresholds."""

import dataclasses

import numpy as np
import pytest

from ltmag import (BELOW_THRESHOLD, ConvergenceError, DegenerateConfigError,
                   LASING, LevelRates, NotLasableError, OrientationModel,
                   derive_constants, find_operating_point, net_gain,
                   populations_at_fixed_n, solve_steady_state,
                   threshold_pump, with_drive, with_pump)
from ltmag.steady import PopulationState


def test_unpumped_unmixed_splits_ground_states(baseline_config):
    cfg = with_drive(with_pump(baseline_config, 0.0), omega=0.0)
    state = populations_at_fixed_n(cfg, 0.0)
    # nothing drives the system; all excited levels empty, the ground
    # split is undetermined and the minimum-norm solution is symmetric
    assert state.rho11 + state.rho44 == pytest.approx(1.0, abs=1e-8)
    for occ in (state.rho22, state.rho33, state.rho55, state.rho66,
                state.rho77):
        assert abs(occ) < 1e-8


def test_all_zero_rates_is_degenerate(baseline_config):
    zero = LevelRates(L21=0, L23=0, L31=0, L54=0, L56=0, L64=0,
                      L57=0, L71=0, L74=0, L27=0, gamma14=0)
    cfg = dataclasses.replace(
        with_drive(with_pump(baseline_config, 0.0), omega=0.0), rates=zero)
    with pytest.raises(DegenerateConfigError):
        populations_at_fixed_n(cfg, 0.0)


def test_no_pump_means_loss_only_gain(baseline_config):
    cfg = with_pump(baseline_config, 0.0)
    g = net_gain(cfg, 0.0)
    assert g == pytest.approx(-baseline_config.cavity.kappa, rel=1e-12)


def test_trace_and_residual(baseline_config):
    ss = solve_steady_state(with_drive(baseline_config, delta=1e8))
    assert abs(ss.aligned.trace() - 1.0) < 1e-12
    assert ss.residual < 1e-10
    assert abs(ss.net_gain) <= 1e-8 * baseline_config.cavity.kappa


def test_branch_labels_match_photon_number(baseline_config):
    dark = solve_steady_state(with_pump(baseline_config, 1e5))
    assert dark.branch == BELOW_THRESHOLD and dark.n == 0.0
    bright = solve_steady_state(with_drive(baseline_config, delta=1e8))
    assert bright.branch == LASING and bright.n > 0.0


def test_frozen_photon_numbers(baseline_config):
    # regression values, frozen from this implementation
    ss0 = solve_steady_state(baseline_config)
    assert ss0.n == pytest.approx(4.161192e-3, rel=1e-6)
    ss1 = solve_steady_state(with_drive(baseline_config, delta=1e8))
    assert ss1.n == pytest.approx(6.681892e-2, rel=1e-6)


def test_spin_zero_branch_holds_population_off_resonance(baseline_config):
    state = populations_at_fixed_n(baseline_config, 0.0, delta=1e8)
    spin0 = state.rho11 + state.rho22 + state.rho33
    assert spin0 == pytest.approx(0.95077, abs=2e-4)


def test_detuning_sign_symmetry(baseline_config):
    for delta in (3e6, 1.7e7, 1e8):
        np_ = solve_steady_state(with_drive(baseline_config, delta=delta))
        nm_ = solve_steady_state(with_drive(baseline_config, delta=-delta))
        assert abs(np_.n - nm_.n) <= 1e-10 * max(np_.n, 1e-30)
        # the coherence is odd in detuning, its imaginary part even
        assert np_.aligned.rho14_re == pytest.approx(
            -nm_.aligned.rho14_re, rel=1e-8)
        assert np_.aligned.rho14_im == pytest.approx(
            nm_.aligned.rho14_im, rel=1e-8)


def test_photon_number_monotone_in_pump(baseline_config):
    cfg = with_drive(baseline_config, delta=1e8)
    ns = [solve_steady_state(with_pump(cfg, p)).n
          for p in (1.2e6, 1.6e6, 2.2e6, 3.0e6)]
    assert all(b > a for a, b in zip(ns, ns[1:]))


def test_operating_point_and_thresholds(baseline_config):
    op = find_operating_point(baseline_config)
    assert op == pytest.approx(1.046143e6, rel=1e-6)
    th_detuned = threshold_pump(baseline_config, delta=1e8)
    assert th_detuned == pytest.approx(8.548506e5, rel=1e-6)
    # mixing at zero detuning suppresses the inversion, raising threshold
    assert op > th_detuned


def test_operating_point_nondecreasing_in_rabi_rate(baseline_config):
    ops = [find_operating_point(baseline_config, omega=w)
           for w in (0.0, 1.5e6, 3.67e6, 6.0e6)]
    assert all(b >= a for a, b in zip(ops, ops[1:]))


def test_zero_rabi_rate_reduces_to_plain_threshold(baseline_config):
    op0 = find_operating_point(baseline_config, omega=0.0)
    # with the drive far off resonance the mixing is negligible
    th_far = threshold_pump(with_drive(baseline_config, omega=0.0),
                            delta=1e12)
    assert op0 == pytest.approx(th_far, rel=1e-9)


def test_not_lasable(baseline_config):
    heavy_loss = dataclasses.replace(
        baseline_config,
        cavity=dataclasses.replace(baseline_config.cavity, kappa=1e9))
    with pytest.raises(NotLasableError):
        threshold_pump(heavy_loss, delta=1e8)


def test_four_orientation_weights_and_reduction(baseline_config):
    four = dataclasses.replace(
        baseline_config,
        orientation=OrientationModel(mode="four_orientation"))
    ss = solve_steady_state(with_drive(four, delta=1e8))
    assert len(ss.populations) == 2
    assert ss.weights == (0.25, 0.75)
    assert ss.detunings == (1e8, 1e9)
    # when the aligned detuning equals the off-axis pin the split is moot
    pinned = with_drive(four, delta=four.orientation.off_axis_detuning)
    single = with_drive(baseline_config,
                        delta=four.orientation.off_axis_detuning)
    cfg_hot = with_pump(pinned, 2e6)
    ref_hot = with_pump(single, 2e6)
    assert solve_steady_state(cfg_hot).n == pytest.approx(
        solve_steady_state(ref_hot).n, rel=1e-12)


def test_four_orientation_operating_point(baseline_config):
    # regression value, frozen from this implementation
    four = dataclasses.replace(
        baseline_config,
        orientation=OrientationModel(mode="four_orientation"))
    assert find_operating_point(four) == pytest.approx(8.80581e5, rel=1e-5)


def test_population_state_invariants():
    with pytest.raises(ConvergenceError):
        PopulationState(1.5, 0, 0, 0, 0, 0, 0, 0, 0)
    with pytest.raises(ConvergenceError):
        PopulationState(0.5, 0, 0, 0.5, 0, 0, 0, 0.6, 0.5)
    state = PopulationState(0.5, 0, 0, 0.5, 0, 0, 0, 0.1, -0.2)
    assert state.coherence_mag() == pytest.approx(np.hypot(0.1, 0.2))
    arr = state.as_array()
    assert PopulationState.from_array(arr) == state


def test_explicit_delta_overrides_drive(baseline_config):
    via_arg = populations_at_fixed_n(baseline_config, 0.0, delta=5e7)
    via_cfg = populations_at_fixed_n(with_drive(baseline_config, delta=5e7),
                                     0.0)
    assert via_arg == via_cfg


def test_negative_photon_number_rejected(baseline_config):
    with pytest.raises(ValueError):
        populations_at_fixed_n(baseline_config, -1e-6)


def test_gain_monotone_decreasing_in_photon_number(baseline_config):
    cfg = with_drive(baseline_config, delta=1e8)
    d = derive_constants(cfg)
    gains = [net_gain(cfg, n, derived=d) for n in (0.0, 0.02, 0.05, 0.1)]
    assert all(b < a for a, b in zip(gains, gains[1:]))
