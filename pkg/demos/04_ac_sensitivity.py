"""a.c. sensing: drive with a 1 nT test tone and demodulate the light.

Runs the time-domain loop at a few signal frequencies and compares with
the quasistatic estimate; the demodulated amplitude rolls off once the
signal outpaces the laser's own response time.
"""

import numpy as np

from ltmag import (AcSignalModel, METHOD_AC_QUASISTATIC, ac_sensitivity,
                   preset)


def main():
    cfg = preset("high_sensitivity")
    bias, amp = 164e-6, 1e-9

    quasi = ac_sensitivity(
        cfg, AcSignalModel(bias_field=bias, amplitude_field=amp,
                           omega_signal=2e4),
        method=METHOD_AC_QUASISTATIC)
    print(f"quasistatic reference: "
          f"{quasi.eta * 1e15:.3f} fT/sqrt(Hz)")
    print()
    print("omega [rad/s],eta_ac [fT/sqrt(Hz)],n_signal [1]")
    for omega in np.geomspace(2e4, 2e7, 7):
        signal = AcSignalModel(bias_field=bias, amplitude_field=amp,
                               omega_signal=float(omega))
        res = ac_sensitivity(cfg, signal)
        print(f"{omega:.3e},{res.eta * 1e15:.3f},{res.n_signal:.4e}")


if __name__ == "__main__":
    main()
