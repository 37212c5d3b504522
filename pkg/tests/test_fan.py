import random
from fractions import Fraction as F

import pytest

from toricmmp.errors import FanError
from toricmmp.fan import Fan, check_fan, make_fan, validate_fan
from toricmmp.linalg import dot, solve_unique
from toricmmp.polyhedral import PolyCone, dd_extreme_rays, nonnegative_combination
from toricmmp.presets import FLIPPED_FAN, P2_FAN, SIX_RAY_FAN, SIX_RAYS, SMALL_TARGET

X = SIX_RAY_FAN


def test_six_ray_fan_is_valid_and_complete():
    assert validate_fan(X) is None
    assert X.is_complete()


def test_overlapping_cones_are_rejected():
    f = Fan(2, ((1, 0), (0, 1), (1, 2), (-1, 1)), ((0, 1), (2, 3)))
    assert "intersection not a face" in validate_fan(f)


def test_single_smooth_cone():
    f = Fan(2, ((1, 0), (0, 1)), ((0, 1),))
    assert validate_fan(f) is None
    assert not f.is_complete()


@pytest.mark.parametrize(
    "fan, fragment",
    [
        (Fan(2, ((2, 0), (0, 1)), ((0, 1),)), "not primitive"),
        (Fan(2, ((1, 0), (-1, 0), (0, 1)), ((0, 1, 2),)), "not strongly convex"),
        (Fan(2, ((1, 0), (1, 1), (0, 1)), ((0, 1, 2),)), "not extreme"),
        (Fan(2, ((1, 0), (0, 1), (1, 1)), ((0, 1), (1, 2))), "contained in another"),
    ],
)
def test_axiom_violations(fan, fragment):
    assert fragment in validate_fan(fan)
    with pytest.raises(FanError):
        check_fan(fan)


def _sampling_complete(f, trials=300, seed=1):
    """Random rational directions each land in some cone by an exact
    nonnegative solve, independent of the facet machinery."""
    rng = random.Random(seed)
    for _ in range(trials):
        v = tuple(rng.randint(-50, 50) for _ in range(f.rank))
        if not any(v):
            continue
        if not any(nonnegative_combination(f.rays_of(k), v) is not None for k in range(len(f.cones))):
            return False
    return True


@pytest.mark.parametrize("fan", [X, FLIPPED_FAN, SMALL_TARGET, P2_FAN])
def test_completeness_agrees_with_sampling(fan):
    assert fan.is_complete() == _sampling_complete(fan) == True


def test_incomplete_fan_detected_by_both():
    f = Fan(3, X.rays, X.cones[1:])
    assert not f.is_complete()
    assert not _sampling_complete(f)


def test_cone_properties():
    assert not X.properties_of(0).simplicial
    p = X.properties_of(X.cones.index((0, 1, 5)))
    assert p.simplicial and not p.smooth and p.multiplicity == 2
    f = Fan(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 2),))
    q = f.properties_of(0)
    assert q.smooth and q.multiplicity == 1


def test_walls():
    names = [w.name(X.labels) for w in X.walls]
    assert sorted(names) == sorted(
        ["C12", "C14", "C16", "C23", "C26", "C34", "C35", "C36", "C45", "C46", "C56"]
    )
    names_plus = [w.name(FLIPPED_FAN.labels) for w in FLIPPED_FAN.walls]
    assert len(names_plus) == 12 and "C13" in names_plus and "C15" in names_plus
    assert len(P2_FAN.walls) == 3


def test_wall_normal_orientation():
    for w in X.walls:
        s, t = w.cofaces
        assert all(dot(w.normal, X.rays[i]) >= 0 for i in X.cones[s])
        assert all(dot(w.normal, X.rays[i]) <= 0 for i in X.cones[t])
        assert all(dot(w.normal, X.rays[i]) == 0 for i in w.rays)


def test_membership_certificates():
    e = SIX_RAYS
    # e5 in C(e3,e4,e6), a cone of the divisorial target
    lam = solve_unique([tuple(c) for c in zip(e[2], e[3], e[5])], e[4])
    assert lam == (F(1, 2), F(1, 2), 1)
    ok, coeffs = X.contains(0, e[4])
    assert not ok and coeffs is None
    assert X.contains(0, (0, 0, 0))[0]
    ok, coeffs = X.contains(0, (0, 0, 1))
    assert ok and tuple(sum(c * r[j] for c, r in zip(coeffs, X.rays_of(0))) for j in range(3)) == (0, 0, 1)


def test_dd_cube_cone():
    # x, y, z >= 0 plus x + y >= z
    rays = dd_extreme_rays([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)], 3)
    assert sorted(rays) == sorted([(1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1)])


def test_polycone_basics():
    pc = PolyCone(list(SIX_RAYS[:4]), 3)
    assert pc.dim == 3 and pc.is_pointed
    assert len(pc.facet_normals) == 4
    assert pc.in_relative_interior((0, 0, 1))
    assert not pc.contains((0, 1, 1))
    line = PolyCone([(1, 0), (-1, 0), (0, 1)], 2)
    assert line.lineality_dim == 1 and not line.is_pointed


def test_make_fan_normalises_rays():
    f = make_fan(2, [(2, 0), (0, 3), (-1, -1)], [[(2, 0), (0, 3)], [(0, 1), (-2, -2)], [(1, 0), (-1, -1)]])
    assert f == P2_FAN


def test_equality_ignores_order():
    g = Fan(3, tuple(reversed(X.rays)), tuple(tuple(5 - i for i in c) for c in X.cones))
    assert g == X and hash(g) == hash(X)
