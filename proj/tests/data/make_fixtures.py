#!/usr/bin/env python3
# Regenerates the CSV fixtures by forward simulation of a finite capacity
# distribution. Deterministic; rerun only if the fixtures need to change.
import numpy as np


def unit_cost(rho, p, x):
    return np.sum((p * x) ** (-rho)) ** (-1.0 / rho)


def simulate(rho, prices, atoms, masses):
    rows = []
    for t, (p0, p1, p2) in enumerate(prices, start=1):
        p = np.array([p1, p2]) / p0
        y = sum(m for x, m in zip(atoms, masses) if unit_cost(rho, p, x) <= 1.0)
        rows.append((t, y, p0, p1, p2))
    return rows


def write(path, rows):
    with open(path, "w") as f:
        f.write("t,y,p0,p1,p2\n")
        for t, y, p0, p1, p2 in rows:
            f.write(f"{t},{y:.6g},{p0:.6g},{p1:.6g},{p2:.6g}\n")


def main():
    # elasticity instance, rho* = 1.5; this price seed puts critical values
    # on both sides of rho*
    rng = np.random.default_rng(28)
    prices = [(1.0, *np.round(rng.uniform(0.3, 3.0, 2), 3)) for _ in range(6)]
    rng = np.random.default_rng(20240601)
    atoms = [rng.uniform(0.2, 1.5, 2) for _ in range(30)]
    masses = np.round(rng.uniform(0.5, 2.0, 30), 3)
    write("elasticity_rho1p5.csv", simulate(1.5, prices, atoms, masses))

    # three lines, every pair crossing inside the quadrant at rho = 1
    write("crossing_T3.csv", [(1, 2.0, 1.0, 1.0, 4.0), (2, 1.0, 1.0, 2.0, 2.0), (3, 3.0, 1.0, 4.0, 1.0)])

    # three lines through w = (1, 1) at rho = 2: p^-2 = (a, 1 - a)
    with open("concurrent_rho2.csv", "w") as f:
        f.write("t,y,p0,p1,p2\n")
        for t, a in enumerate([0.2, 0.5, 0.7], start=1):
            f.write(f"{t},{t}.0,1,{a ** -0.5:.17g},{(1 - a) ** -0.5:.17g}\n")


if __name__ == "__main__":
    main()
