"""Does a weak spin-crossing decay spoil the sensitivity curve?

Re-runs the d.c. sensitivity curve with the normally-absent crossing
rate L27 switched on at small fractions of the singlet rate and reports
how far the curves move.
"""

import numpy as np

from ltmag import l27_robustness, preset


def main():
    cfg = preset("high_sensitivity")
    grid = np.linspace(-300e-6, 300e-6, 31)
    report = l27_robustness(cfg, ratios=(0.001, 0.01, 0.1), b_grid=grid)

    print("l27/L57 [1],common_points [1],max_rel_dev [1],median_rel_dev [1]")
    for ratio in report.ratios:
        print(f"{ratio:g},{report.common_points[ratio]},"
              f"{report.max_rel_dev[ratio]:.4g},"
              f"{report.median_rel_dev[ratio]:.4g}")
    print()
    print("a ratio of 0.1 drains the upper manifold and the laser never")
    print("turns on, hence the empty overlap at that setting")


if __name__ == "__main__":
    main()
