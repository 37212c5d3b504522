"""Reference fans shipped with the package and their preferred Picard bases.

The six-ray threefold below is non-Q-factorial: its cone C(e1,e2,e3,e4) is
not simplicial.  Its reports use the basis (X1+X2, X1-X3) of Pic(X)_Q.
"""

from __future__ import annotations

from fractions import Fraction

from .fan import Fan

SIX_RAYS = (
    (-1, -1, 1),
    (1, -1, 1),
    (1, 1, 2),
    (-1, 1, 2),
    (0, 1, 1),
    (0, 0, -1),
)


def _cones(*names):
    return tuple(tuple(int(ch) - 1 for ch in name) for name in names)


SIX_RAY_FAN = Fan(3, SIX_RAYS, _cones("1234", "345", "126", "146", "236", "356", "456"))
# Target of contracting the ray through [C35]: e5 disappears.
DIVISORIAL_TARGET = Fan(
    3,
    SIX_RAYS[:4] + SIX_RAYS[5:],
    tuple(
        tuple(i if i < 4 else i - 1 for i in c)
        for c in _cones("1234", "346", "126", "146", "236")
    ),
    ("e1", "e2", "e3", "e4", "e6"),
)
# Target of contracting the ray through [C34]: a small contraction.
SMALL_TARGET = Fan(3, SIX_RAYS, _cones("12345", "126", "146", "236", "356", "456"))
FLIPPED_FAN = Fan(
    3, SIX_RAYS, _cones("123", "135", "145", "126", "146", "236", "356", "456")
)

P2_FAN = Fan(2, ((1, 0), (0, 1), (-1, -1)), ((0, 1), (1, 2), (0, 2)))
P3_FAN = Fan(
    3,
    ((1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)),
    ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)),
)
# Cone over the unit square at height one, split along one diagonal.
SQUARE_RAYS = ((0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1))
SQUARE_SPLIT = Fan(3, SQUARE_RAYS, ((0, 1, 3), (0, 2, 3)))


# Each entry: fan, list of {ray vector: coefficient} basis divisors.
_PREFERRED = [
    (
        SIX_RAY_FAN,
        [
            {SIX_RAYS[0]: 1, SIX_RAYS[1]: 1},
            {SIX_RAYS[0]: 1, SIX_RAYS[2]: -1},
        ],
    ),
]


def preferred_basis(f: Fan):
    for ref, basis in _PREFERRED:
        if f == ref:
            return [
                tuple(Fraction(b.get(r, 0)) for r in f.rays) for b in basis
            ]
    return None


BUNDLED = {
    "paper-X.fan": SIX_RAY_FAN,
    "paper-Y-divisorial.fan": DIVISORIAL_TARGET,
    "paper-Y-small.fan": SMALL_TARGET,
    "paper-Xplus.fan": FLIPPED_FAN,
    "P2.fan": P2_FAN,
    "P3.fan": P3_FAN,
    "square-split.fan": SQUARE_SPLIT,
}
