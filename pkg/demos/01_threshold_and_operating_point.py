"""Where does the laser switch on, and where should it be parked?

The magnetometer idea in one plot-free walk: the pump threshold depends
on the microwave detuning, so a pump rate between the resonant and the
detuned threshold turns the laser into a field-controlled switch.
"""

import numpy as np

from ltmag import (find_operating_point, preset, solve_steady_state,
                   threshold_pump, with_drive, with_pump)


def main():
    cfg = preset("baseline")

    print("threshold pump vs detuning (baseline preset)")
    print("delta [rad/s],pump_threshold [rad/s]")
    for delta in np.linspace(0.0, 1.5e8, 7):
        th = threshold_pump(cfg, delta=float(delta))
        print(f"{delta:.3e},{th:.6e}")

    op = find_operating_point(cfg)
    print()
    print(f"operating point (threshold on resonance): {op:.6e} rad/s")
    print(f"preset pump rate:                         "
          f"{cfg.drive.pump12:.6e} rad/s")

    # park the pump at the operating point: dark on resonance, bright off
    parked = with_pump(cfg, op)
    for delta in (0.0, 1e8):
        ss = solve_steady_state(with_drive(parked, delta=delta))
        print(f"delta = {delta:.1e} rad/s -> branch = {ss.branch}, "
              f"n = {ss.n:.3e}")


if __name__ == "__main__":
    main()
