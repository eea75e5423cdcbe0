"""Two-end Möbius-type data: the unique isotropic candidate and why it fails.

Usage: python demos/two_end_candidate.py
"""
import numpy as np

from stationary import (
    catalog,
    check_isotropy,
    laurent_normal_form,
    scan_singular_points,
    total_curvature,
    two_end_obstruction,
    xz_from_data,
)
from stationary.singscan import candidate_singular_root


def main():
    # two regular ends: the conformality system has no solution for any c
    print("two regular ends at {0, inf} and {c, -1/c}:")
    for c in (0.5, 1.0, 2.0, -3.0):
        r = two_end_obstruction(c)
        print(f"  c = {c:5g}: |u1|^2 = {r.u1_sq.real:9.4f}  gap {r.gap:.4f}  {r.verdict}")

    data = catalog("section4_candidate")
    vf = xz_from_data(data)
    print("\nx_z as a vector-valued partial fraction:")
    for b, v in vf.terms:
        where = f"z^{b.power}" if b.kind == "monomial" else f"(z - {b.center.real:g})^-{b.power}"
        print(f"  {where:14s} {np.round(v.array(), 8)}")
    print("\n".join(check_isotropy(vf).lines()))
    print("\n".join(laurent_normal_form(data, 0j, 1).lines()))
    print("\n".join(total_curvature(data).lines()))

    # the candidate is conformal and has zero flux, but phi = conj(psi) somewhere
    print("\n".join(candidate_singular_root(data).lines()))
    print("\n".join(scan_singular_points(data, grid=256).lines()))


if __name__ == "__main__":
    main()
