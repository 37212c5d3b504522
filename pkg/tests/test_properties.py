import random

import pytest

from corpus import CORPUS_SIZE, attempts, corpus
from oracles import divisor_dot
from toricmmp.curves import intersect
from toricmmp.divisors import is_effective, picard_basis, principal_divisor, q_cartier_data
from toricmmp.fan import validate_fan
from toricmmp.polyhedral import nonnegative_combination


def test_corpus_shape():
    fans = corpus()
    assert len(fans) == CORPUS_SIZE
    assert all(f.rank == 3 and len(f.rays) <= 10 for f in fans)
    assert all(validate_fan(f) is None and f.is_complete() for f in fans)
    assert any(not f.is_simplicial() for f in fans)


def test_completeness_by_sampling():
    rng = random.Random(11)
    for f in corpus()[:40]:
        for _ in range(25):
            v = tuple(rng.randint(-30, 30) for _ in range(3))
            if any(v):
                assert any(nonnegative_combination(f.rays_of(k), v) is not None for k in range(len(f.cones)))


def test_principal_divisors_numerically_trivial():
    rng = random.Random(5)
    for f in corpus():
        u = tuple(rng.randint(-5, 5) for _ in range(3))
        P = principal_divisor(f, u)
        data = q_cartier_data(f, P)
        assert all(intersect(f, P, w, data=data) == 0 for w in f.walls)


def test_intersections_independent_of_choices():
    from dataclasses import replace

    for f in corpus()[:80]:
        for D in picard_basis(f).basis:
            data = q_cartier_data(f, D)
            for w in f.walls:
                t = w.cofaces[1]
                vals = {intersect(f, D, w, data=data, w_ray=i) for i in f.cones[t] if i not in w.rays}
                rev = replace(w, cofaces=w.cofaces[::-1], normal=tuple(-x for x in w.normal))
                vals.add(intersect(f, D, rev, data=data))
                assert len(vals) == 1


def test_simplicial_classes_match_relation_oracle():
    checked = 0
    for f in corpus():
        if not f.is_simplicial():
            continue
        for D in picard_basis(f).basis:
            for w in f.walls:
                assert intersect(f, D, w) == divisor_dot(f, D, w)
        checked += 1
    assert checked > 50


def test_every_k_negative_step_is_certified():
    failures = [(a.fan, a.ray, a.error) for a in attempts() if a.error is not None]
    assert failures == []


def test_divisorial_certificates():
    steps = [a.step for a in attempts() if a.step is not None and a.step.kind == "divisorial"]
    assert len(steps) > 50
    for s in steps:
        E = s.divisorial.exceptional
        removed = set(s.outcome.removed_rays)
        assert is_effective(E)
        assert {i for i, c in enumerate(E) if c != 0} == removed
        assert all(v < 0 for _, v in s.divisorial.e_dot_curves)


def test_flip_certificates():
    steps = [a.step for a in attempts() if a.step is not None and a.step.kind == "flip"]
    assert len(steps) > 50
    for s in steps:
        assert s.flip.admissible == len(s.flip.region)  # one per re-subdivided cone
        assert set(s.output.rays) == set(s.outcome.target.rays)
        assert all(v > 0 for _, v in s.flip.walls)
        cert = s.flip_certificate
        assert all(b >= a for _, a, b in cert.discrepancies) and cert.strict
        assert s.output.is_complete() and validate_fan(s.output) is None
