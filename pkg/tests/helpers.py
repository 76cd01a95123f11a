"""Shared test oracles and reference data.

The threshold-table reference values here are typed row-by-row, matching
the layout of the source tables, while the shipped CSV files were generated
column-by-column; agreement between the two transcriptions is part of what
the tests check.
"""

from __future__ import annotations

from fractions import Fraction

from hmsim.modcod import DVBS2_CODE_RATES

RATES = list(DVBS2_CODE_RATES)

# Hierarchical QPSK thresholds, row-major. Per rate: shared rho=0.5 value,
# then (HE, LE) for rho = 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9.
HQPSK_ROWS = {
    Fraction(1, 4): [-2.6, -3.1, -2.2, -3.5, -1.7, -3.8, -1, -4.2, -0.4, -4.4, 0.4, -4.7, 1.2, -4.9, 2.1, -5.2, 4.5],
    Fraction(1, 3): [-1.4, -1.8, -0.9, -2.2, -0.4, -2.6, 0.2, -2.9, 0.9, -3.2, 1.6, -3.4, 2.5, -3.6, 3.4, -4, 5.8],
    Fraction(2, 5): [-0.5, -1, 0, -1.3, 0.5, -1.7, 1.1, -2, 1.8, -2.3, 2.5, -2.5, 3.3, -2.8, 4.3, -3.1, 6.7],
    Fraction(1, 2): [0.9, 0.5, 1.4, 0.1, 1.2, -0.3, 2.5, -0.6, 3.2, -0.9, 3.9, -1.1, 4.8, -1.3, 5.7, -1.7, 8.1],
    Fraction(3, 5): [2.1, 1.7, 2.6, 1.3, 3.1, 1, 3.7, 0.7, 4.4, 0.4, 5.1, 0.1, 6, -0.1, 6.9, -0.4, 9.3],
    Fraction(2, 3): [3, 2.6, 3.5, 2.2, 4, 1.8, 4.6, 1.5, 5.3, 1.3, 6, 1, 6.9, 0.8, 7.8, 0.4, 10.2],
    Fraction(3, 4): [4, 3.5, 4.5, 3.1, 5, 2.8, 5.6, 2.5, 6.3, 2.2, 7, 2, 7.8, 1.8, 8.8, 1.4, 11.2],
    Fraction(4, 5): [4.6, 4.2, 5.1, 3.8, 5.6, 3.4, 6.2, 3.1, 6.9, 2.8, 7.6, 2.6, 8.5, 2.4, 9.4, 2, 11.8],
    Fraction(5, 6): [5.1, 4.7, 5.6, 4.3, 6.1, 3.9, 6.7, 3.6, 7.4, 3.3, 8.1, 3.1, 9, 2.9, 9.9, 2.5, 12.3],
    Fraction(8, 9): [6.1, 5.7, 6.6, 5.3, 7.1, 5, 7.7, 4.7, 8.4, 4.4, 9.1, 4.1, 10, 3.9, 10.9, 3.6, 13.3],
    Fraction(9, 10): [6.3, 5.9, 6.8, 5.5, 7.4, 5.2, 7.9, 4.9, 8.6, 4.6, 9.4, 4.3, 10.2, 4.1, 11.1, 3.8, 13.5],
}
HQPSK_RHOS = [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9]

# Hierarchical 32-APSK thresholds, row-major: (HE, LE) for
# rho = 0.7, 0.75, 0.8, 0.85, 0.9.
H32APSK_ROWS = {
    Fraction(1, 4): [0, 6, -0.6, 6.6, -1.1, 7.6, -1.6, 9, -1.9, 10.5],
    Fraction(1, 3): [1.7, 7.3, 0.9, 8, 0.4, 9, -0.1, 10.6, -0.6, 12],
    Fraction(2, 5): [3, 8.5, 2.2, 9.2, 1.5, 10.2, 0.9, 11.7, 0.4, 13],
    Fraction(1, 2): [5.2, 10.1, 4.2, 10.8, 3.4, 11.8, 2.7, 13.3, 2, 14.7],
    Fraction(3, 5): [7.5, 11.5, 6.2, 12.3, 5.1, 13.2, 4.3, 14.6, 3.4, 16.2],
    Fraction(2, 3): [9, 12.5, 7.5, 13.3, 6.4, 14.2, 5.4, 15.6, 4.5, 17.2],
    Fraction(3, 4): [11, 13.6, 9.3, 14.4, 8, 15.2, 6.8, 16.6, 5.8, 18.2],
    Fraction(4, 5): [12.3, 14.4, 10.4, 15.2, 9, 15.9, 7.8, 17.2, 6.6, 18.9],
    Fraction(5, 6): [13.3, 15.1, 11.3, 15.9, 9.9, 16.5, 8.5, 17.7, 7.2, 19.5],
    Fraction(8, 9): [15.4, 16.4, 13.2, 17.2, 11.6, 17.6, 10.2, 18.7, 8.7, 20.6],
    Fraction(9, 10): [15.9, 16.6, 13.6, 17.4, 12, 17.9, 10.5, 18.9, 9, 20.8],
}
H32APSK_RHOS = [0.7, 0.75, 0.8, 0.85, 0.9]


def hqpsk_reference_cells() -> dict[tuple[float, str, Fraction], float]:
    """Flatten the row-major hierarchical-QPSK table to cell lookups."""
    cells: dict[tuple[float, str, Fraction], float] = {}
    for rate, row in HQPSK_ROWS.items():
        cells[(0.5, "HE", rate)] = row[0]
        cells[(0.5, "LE", rate)] = row[0]
        for k, rho in enumerate(HQPSK_RHOS):
            cells[(rho, "HE", rate)] = row[1 + 2 * k]
            cells[(rho, "LE", rate)] = row[2 + 2 * k]
    return cells


def h32apsk_reference_cells() -> dict[tuple[float, str, Fraction], float]:
    cells: dict[tuple[float, str, Fraction], float] = {}
    for rate, row in H32APSK_ROWS.items():
        for k, rho in enumerate(H32APSK_RHOS):
            cells[(rho, "HE", rate)] = row[2 * k]
            cells[(rho, "LE", rate)] = row[1 + 2 * k]
    return cells


def equal_rate_oracle(points: list[tuple[float, float]]) -> float:
    """Independent equal-rate solver: brute force over every segment
    between two achievable points (and every single point), no hull.

    Any point of the convex hull lies on a segment between two of the
    original points, so the diagonal's exit point does too.
    """
    pts = list(points)
    if all(p != (0.0, 0.0) for p in pts):
        pts.append((0.0, 0.0))
    best = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        if x1 == y1 and x1 > best:
            best = x1
        for j in range(i + 1, n):
            x2, y2 = pts[j]
            d1, d2 = x1 - y1, x2 - y2
            if d1 == d2:
                continue
            tau = d2 / (d2 - d1)
            if 0.0 <= tau <= 1.0:
                r = tau * x1 + (1.0 - tau) * x2
                if r > best:
                    best = r
    return best
