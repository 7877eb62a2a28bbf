"""Published reference data: densest found bases and their densities.

Matrices are stored exactly as printed.  The printed rows are the lattice
generators (the Case I constraints hold to ~1e-11 only in that reading), so
use :func:`table_basis`, which transposes into this package's columns
convention.  Entries carry 12 significant digits, so checks against them use
a 1e-6 tolerance.
"""

import math

import numpy as np

LOG2_3 = math.log2(3.0)

# Case III bases for the first regime.
CASE_III_BASES = {
    1.0: [
        [-0.333333333333, 0.166666666667, 0.5],
        [0.5, -0.333333333333, 0.166666666667],
        [0.166666666667, 0.5, -0.333333333333],
    ],
    1.1: [
        [-0.364125450067, 0.193419513868, 0.539049770666],
        [0.539049770666, -0.364125450067, 0.193419513867],
        [0.193419513867, 0.539049770666, -0.364125450068],
    ],
    1.2: [
        [-0.392613644302, 0.22381214158, 0.569113821114],
        [0.569113821115, -0.392613644298, 0.223812141583],
        [0.223812141575, 0.569113821114, -0.392613644306],
    ],
    1.3: [
        [-0.419839537546, 0.260336714788, 0.589023079183],
        [0.589023079194, -0.419839537534, 0.260336714788],
        [0.260336714754, 0.589023079183, -0.419839537578],
    ],
    1.4: [
        [-0.446984776893, 0.307534456657, 0.595696355817],
        [0.595696355844, -0.446984776872, 0.307534456649],
        [0.307534456588, 0.595696355814, -0.446984776962],
    ],
    1.5: [
        [-0.475292821919, 0.375983627555, 0.580059051165],
        [0.580059051205, -0.475292821888, 0.375983627545],
        [0.375983627482, 0.58005905116, -0.475292821997],
    ],
}

# Case I bases for the second regime; p = 2 is the fcc lattice.
CASE_I_BASES = {
    1.6: [
        [-0.000274732684343, 0.00144215026174, -0.999980951403],
        [0.509783945989, 0.500572697171, -0.499408517681],
        [0.509509213365, -0.499408255119, -0.500850623006],
    ],
    1.7: [
        [0.458033772615, 0.556735224273, 0.553047497039],
        [-0.530691863753, 0.577007354869, 0.459643833129],
        [-0.0936769789857, -0.0202829019484, 0.988672468644],
    ],
    1.8: [
        [-0.330208442415, -0.696395141028, 0.551458413193],
        [0.624661955256, -0.637870063365, 0.316559795406],
        [0.237379400053, -0.0588146621535, 0.954027742247],
    ],
    1.9: [
        [-0.325366212309, -0.0828873750566, 0.930867632285],
        [0.230698700286, 0.676231149106, 0.66666839749],
        [-0.697856599406, 0.59207566084, 0.335768664213],
    ],
    2.0: [
        [0.000000000000, 0.707106781187, 0.707106781187],
        [0.707106781623, 0.00000000000, 0.70710678075],
        [0.707106781623, 0.70710678075, 0.000000000000],
    ],
}

# Densities of the new family (first regime), truncated to 5 digits.
FAMILY_DENSITY = {
    1.0: 18.0 / 19.0,
    1.1: 0.90913,
    1.2: 0.87861,
    1.3: 0.85375,
    1.4: 0.83284,
    1.5: 0.81395,
    LOG2_3: 0.79594,
}

# Prior (O_1) lattice densities, first regime.
O1_DENSITY = {
    1.0: 18.0 / 19.0,
    1.1: 0.90461,
    1.2: 0.87121,
    1.3: 0.84516,
    1.4: 0.82497,
    1.5: 0.80948,
    LOG2_3: 0.79594,
}

# Densest found lattices in the second regime.
CASE_I_DENSITY = {
    LOG2_3: 0.79594,
    1.6: 0.79084,
    1.7: 0.76610,
    1.8: 0.75303,
    1.9: 0.74550,
    2.0: math.pi / math.sqrt(18.0),
}

# Prior (O_0) lattice densities, second regime.
O0_DENSITY = {
    LOG2_3: 0.79594,
    1.6: 0.79084,
    1.7: 0.76567,
    1.8: 0.75126,
    1.9: 0.74364,
    2.0: math.pi / math.sqrt(18.0),
}

# Published certificate rows (p0, x0, y0, z0, eps, peps).
PRINTED_SCHEDULE_ROWS = [
    (1.0, 0.333333333333, 0.166666666667, 0.5, 0.03, 0.01),
    (1.01, 0.336543320255, 0.169227330456, 0.504294897412, 0.03, 0.01),
    (1.02, 0.339721855623, 0.171809715243, 0.508503843298, 0.03, 0.01),
    (1.5, 0.475292821919, 0.375983627555, 0.580059051165, 0.03, 0.01),
    (1.51, 0.47822053429, 0.384961182567, 0.576346694842, 0.03, 0.01),
    (1.52, 0.481163698665, 0.394556223383, 0.572012690078, 0.006, 0.001),
    (1.521, 0.48145875646, 0.395553814361, 0.571540873724, 0.006, 0.001),
    (1.522, 0.481753934423, 0.396558835694, 0.571061553436, 0.006, 0.001),
    (1.523, 0.482049228267, 0.39757142775, 0.570574584849, 0.006, 0.001),
    (1.577, 0.497880292399, 0.472696125604, 0.523437325276, 0.006, 0.001),
    (1.578, 0.498157887988, 0.475000219764, 0.521630841401, 0.006, 0.001),
    (1.579, 0.498433446144, 0.477421354522, 0.519705097786, 0.006, 0.001),
]

# Isolated near-endpoint row.
ENDPOINT_ROW = (1.5849625, 0.499999999842, 0.499999124646, 0.500000875038, 2e-7, 1e-10)


def table_basis(p: float):
    """Basis (generators as columns) for a printed Table 3 or Table 4 matrix."""
    from .lattice import Basis

    for table in (CASE_III_BASES, CASE_I_BASES):
        if p in table:
            return Basis(np.array(table[p], dtype=float).T)
    raise KeyError(f"no printed basis for p = {p}")
