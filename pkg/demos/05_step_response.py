"""How fast does the laser answer a field step?

Steps the detuning from resonance to 100 Mrad/s and times the photon
build-up.  Pass a path to also dump the full time series as CSV.
"""

import sys

from ltmag import preset, step_response


def main():
    cfg = preset("baseline")
    res = step_response(cfg, delta_before=0.0, delta_after=1e8)

    print(f"n: {res.n_initial:.3e} -> {res.n_final:.3e}")
    print(f"t_63 = {res.t_63 * 1e6:.3f} us")
    print(f"t_90 = {res.t_90 * 1e6:.3f} us")
    print(f"settled within 0.1%: {res.settled}")

    if len(sys.argv) > 1:
        with open(sys.argv[1], "w", encoding="utf-8") as fp:
            fp.write(res.series.to_csv(cfg))
        print(f"time series written to {sys.argv[1]}")


if __name__ == "__main__":
    main()
