import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricmmp.linalg import (
    LinalgError,
    bareiss_det,
    integer_kernel,
    kernel,
    maximal_minors_gcd,
    primitive,
    rank,
    saturation_index,
    solve_affine,
    to_fraction,
)
from toricmmp.presets import SIX_RAYS

E1, E2, E3, E4 = SIX_RAYS[:4]


@pytest.mark.parametrize(
    "v, expected",
    [((2, 4, 6), (1, 2, 3)), ((0, 0, -1), (0, 0, -1)), ((-2, -2, 2), (-1, -1, 1))],
)
def test_primitive(v, expected):
    assert primitive(v) == expected


def test_primitive_rejects_zero():
    with pytest.raises(LinalgError, match="zero"):
        primitive((0, 0, 0))


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        to_fraction(0.5)


def test_solve_support_functional():
    x, ker = solve_affine([E1, E2, E3, E4], (1, 1, 1, 1))
    assert x == (0, F(-1, 3), F(2, 3))
    assert ker == []


def test_inconsistent_system():
    assert solve_affine([E1, E2, E3, E4], (1, 0, 0, 0)) is None


def test_identity_system():
    x, ker = solve_affine([(1, 0, 0), (0, 1, 0), (0, 0, 1)], (F(3, 7), -2, 5))
    assert x == (F(3, 7), -2, 5) and ker == []


def test_saturation_of_two_rays():
    index, basis = saturation_index([E3, E4])
    assert index == 2
    # (0,1,2) = (e3+e4)/2 lies in the saturated lattice
    lam = solve_affine([tuple(c) for c in zip(*basis)], (0, 1, 2))
    assert lam is not None and all(x.denominator == 1 for x in lam[0])


@pytest.mark.parametrize(
    "vecs, index",
    [([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 1), ([(2, 0, 0)], 2)],
)
def test_saturation_small(vecs, index):
    assert saturation_index(vecs)[0] == index


def test_saturation_rejects_dependent():
    with pytest.raises(LinalgError):
        saturation_index([(1, 0), (2, 0)])


def _minors_oracle(vectors):
    """gcd of all maximal minors by cofactor expansion."""
    k, n = len(vectors), len(vectors[0])

    def cofactor(M):
        if len(M) == 1:
            return M[0][0]
        return sum((-1) ** j * M[0][j] * cofactor([r[:j] + r[j + 1 :] for r in M[1:]]) for j in range(len(M)))

    g = 0
    for cols in itertools.combinations(range(n), k):
        g = math.gcd(g, cofactor([[v[c] for c in cols] for v in vectors]))
    return abs(g)


small = st.integers(-6, 6)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(small, small, small, small), min_size=1, max_size=3))
def test_saturation_index_matches_minors_oracle(vecs):
    if rank(vecs, 4) < len(vecs):
        return
    assert saturation_index(vecs)[0] == _minors_oracle(vecs)
    assert maximal_minors_gcd(vecs) == _minors_oracle(vecs)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=3, max_size=3))
def test_bareiss_matches_cofactor(M):
    assert bareiss_det(M) in (_minors_oracle(M), -_minors_oracle(M))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(small, small, small, small, small), min_size=1, max_size=3))
def test_integer_kernel_is_a_saturated_kernel(rows):
    K = integer_kernel(rows, 5)
    assert len(K) == len(kernel(rows, 5))
    for v in K:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
    if K:
        assert saturation_index(K)[0] == 1
