"""Good versus bad singular ends: convergence of the curvature integral.

Usage: python demos/singular_ends.py
"""
import math

from stationary import QuadratureConfig, WeierstrassData, catalog, classify_end, integrate_curvature
from stationary.cxratio import INF, RationalMap

Z = RationalMap.z()


def main():
    good = catalog("epsilon_family", eps=0.1)
    bad = WeierstrassData(Z, 2 * Z, 1 / (Z * Z), (0j, INF))
    print(classify_end(good, 0j).line())
    print(classify_end(bad, 0j).line())
    print(f"{'inner radius':>12} {'good -∫K/π':>14} {'bad ∫|K|':>12}")
    for k in range(6):
        cfg = QuadratureConfig(inner_radius=1e-2 / 2**k)
        g = integrate_curvature(good, cfg)
        b = integrate_curvature(bad, cfg)
        print(f"{cfg.inner_radius:12.3e} {g.minus_K / math.pi:14.9f} {b.abs_total:12.4f}")
    print("the good end converges; the bad end gains a fixed amount per halving (log divergence)")


if __name__ == "__main__":
    main()
