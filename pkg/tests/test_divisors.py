import random
from fractions import Fraction as F

import pytest

from toricmmp.contraction import contract_ray
from toricmmp.curves import intersect
from toricmmp.divisors import (
    canonical_divisor,
    cartier_constraints,
    contraction_discrepancy_divisor,
    is_effective,
    is_q_cartier,
    picard_basis,
    principal_divisor,
    pullback,
    pushforward,
    q_cartier_data,
)
from toricmmp.errors import NotQCartierError
from toricmmp.linalg import rank
from toricmmp.presets import DIVISORIAL_TARGET, FLIPPED_FAN, P2_FAN, SIX_RAY_FAN, SMALL_TARGET

X, Y, YS = SIX_RAY_FAN, DIVISORIAL_TARGET, SMALL_TARGET


def test_canonical_divisor():
    assert canonical_divisor(X) == (-1,) * 6
    assert canonical_divisor(P2_FAN) == (-1,) * 3


def test_cartier_data():
    data = q_cartier_data(X, (1,) * 6)
    assert data is not None
    assert data.functionals[0] == (0, F(-1, 3), F(2, 3))
    assert q_cartier_data(YS, (1,) * 6) is None
    assert is_q_cartier(P2_FAN, (F(1, 2), 3, -7))


def test_small_target_constraint():
    # a1 - 3a2 + 4a3 - 6a5 = 0 is implied by the constraints of the merged cone
    rows = cartier_constraints(YS)
    target = (1, -3, 4, 0, -6, 0)
    assert rank(rows + [target], 6) == rank(rows, 6)
    assert sum(target) == -4


def test_picard_of_six_ray_fan():
    B = picard_basis(X)
    assert B.dimension == 2
    assert B.class_of((1,) * 6) == (5, -2)


def test_picard_of_divisorial_target():
    B = picard_basis(Y)
    assert B.dimension == 1
    c = B.class_of((1,) * 5)
    assert c != (0,)


def test_picard_of_flipped_fan():
    B = picard_basis(FLIPPED_FAN)
    assert B.dimension == 3
    assert B.basis == ((1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0))
    assert B.class_of((1,) * 6) == (3, 5, 2)


def test_class_of_rejects_non_cartier():
    with pytest.raises(NotQCartierError):
        picard_basis(X).class_of((1, 0, 0, 0, 0, 0))


def test_pushforward():
    assert pushforward(canonical_divisor(X), X, Y) == (-1,) * 5
    assert pushforward((0, 0, 0, 0, 1, 0), X, Y) == (0,) * 5
    D = (1, 2, 3, 4, 5, 6)
    assert pushforward(D, X, YS) == D


def test_pullback():
    assert pullback(canonical_divisor(Y), X, Y)[4] == -2
    assert pullback((0,) * 5, X, Y) == (0,) * 6


def test_pullback_preserves_effectivity():
    rng = random.Random(7)
    seen = 0
    while seen < 60:
        a1, a2, a3, a6 = (F(rng.randint(0, 12), rng.randint(1, 4)) for _ in range(4))
        a4 = a1 - a2 + a3  # the only Cartier constraint on Y
        if a4 < 0:
            continue
        D = (a1, a2, a3, a4, a6)
        assert is_q_cartier(Y, D)
        assert is_effective(pullback(D, X, Y))
        seen += 1


def test_exceptional_divisor():
    assert contraction_discrepancy_divisor(X, Y) == (0, 0, 0, 0, 1, 0)
    assert contraction_discrepancy_divisor(X, X) == (0,) * 6
    with pytest.raises(NotQCartierError):
        contraction_discrepancy_divisor(X, YS)


@pytest.mark.parametrize("fan", [X, FLIPPED_FAN, Y, P2_FAN])
def test_principal_divisors_are_numerically_trivial(fan):
    for u in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (2, -3, 5)]:
        u = u[: fan.rank]
        P = principal_divisor(fan, u)
        for w in fan.walls:
            assert intersect(fan, P, w) == 0


def test_small_contraction_keeps_divisors():
    o = contract_ray(X, (2, 3))
    assert pushforward((F(1, 4), 0, 0, 0, 0, 0), X, o.target) == (F(1, 4), 0, 0, 0, 0, 0)
