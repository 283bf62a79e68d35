#!/usr/bin/env python3
"""Rayleigh-Ritz convergence in the basis size, for both trial families.

    python3 scripts/convergence_study.py [--dims 5,10,...] [--out convergence.csv]

For each test problem the energy at the largest dimension serves as the
reference; the printed column is E(N) - E(N_max), which must be >= 0 and
non-increasing since the trial spaces are nested.
"""
import argparse
import csv
import sys
from dataclasses import replace

import numpy as np

from salpeter_bounds.bounds import Problem
from salpeter_bounds.kinetic_potentials import PotentialSum
from salpeter_bounds.oracle import FAMILIES, Kinetic, OracleSettings, ground_state

LINEAR = PotentialSum.from_coefficients(linear=1.0)
FIG2 = PotentialSum.from_coefficients(coulomb=0.1, linear=0.25)

CASES = {
    "p + r": (Kinetic("p"), LINEAR),
    "p^2 + ln r": (Kinetic("p2"), PotentialSum((), 1.0)),
    "p + r^2": (Kinetic("p"), PotentialSum.from_coefficients(quadratic=1.0)),
    "sqrt(p^2) - 0.1/r + 0.25 r": (Kinetic("salpeter", 0.0), FIG2),
    "sqrt(1 + p^2) - 0.1/r + 0.25 r": (Kinetic("salpeter", 1.0), FIG2),
}


def study(dims):
    rows = []
    for name, (kinetic, V) in CASES.items():
        for family in FAMILIES:
            # fix the scale at the optimum of the largest basis so the spaces are nested
            top = ground_state(kinetic, V, OracleSettings(basis_dim=dims[-1], basis=family))
            energies = [ground_state(kinetic, V, replace(top.settings_used, basis_dim=n)).energy for n in dims]
            for n, e in zip(dims, energies):
                rows.append(dict(case=name, basis=family, dim=n, energy=f"{e:.12g}",
                                 excess=f"{e - energies[-1]:.3e}", scale=f"{top.settings_used.scale:.6g}"))
            monotone = bool(np.all(np.diff(energies) <= 1e-12))
            print(f"{name:32s} {family:10s} E({dims[-1]})={energies[-1]:.10f}  "
                  + " ".join(f"{e - energies[-1]:.1e}" for e in energies[:-1])
                  + ("" if monotone else "  NOT MONOTONE"))
    return rows


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", default="5,10,15,20,25,30,40,50,64")
    parser.add_argument("--out", default="convergence.csv")
    args = parser.parse_args()
    dims = sorted(int(x) for x in args.dims.split(","))
    print(f"excess over N={dims[-1]} at N = {', '.join(map(str, dims[:-1]))}")
    rows = study(dims)
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    sys.exit(0)
