"""One-end Möbius strips with a good singular end, and their eps -> 0 limit.

Usage: python demos/one_end_family.py
"""
import numpy as np

from stationary import catalog, check_periods, classify_end, loop_defect, total_curvature
from stationary.cxratio import RationalMap
from stationary.singscan import (
    analytic_bound_threshold,
    epsilon_family_obstruction,
    scan_singular_points,
)
from stationary.surface_mesh import Loop

Z = RationalMap.z()


def main():
    for eps in (0.1, 0.01):
        data = catalog("epsilon_family", eps=eps)
        print(f"--- eps = {eps}")
        per = check_periods(data)
        print("\n".join(per.lines()))
        for p in data.punctures:
            print(classify_end(data, p).line())
        rep = total_curvature(data)
        print(f"cover {rep.cover_value}π, quotient {rep.quotient_value:g}π")
        print(f"loop defect around the end: {np.abs(loop_defect(data, Loop())).max():.1e}")
        print("\n".join(scan_singular_points(data, grid=256).lines()))
        print("\n".join(epsilon_family_obstruction(eps).lines()))

    print(f"\nthe analytic bound stays positive for eps < {analytic_bound_threshold():.6f}")

    # as eps -> 0 the data approach phi = (z - 1)/(z^2 (z + 1)), dh = i (z^2 - 1) dz / z^2
    phi0 = (Z - 1) / (Z * Z * (Z + 1))
    h0 = 1j * (Z * Z - 1) / (Z * Z)
    z = np.array([0.4 + 0.3j, -1.5 + 0.8j, 2.2 - 1.0j])
    for eps in (1e-2, 1e-4, 1e-6, 1e-8):
        d = catalog("epsilon_family", eps=eps)
        gap = max(np.abs(d.phi(z) / phi0(z) - 1).max(), np.abs(d.h(z) / h0(z) - 1).max())
        print(f"eps = {eps:g}: relative distance to the limit data {gap:.2e}")


if __name__ == "__main__":
    main()
