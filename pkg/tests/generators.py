"""Random complete projective Q-Gorenstein fans in rank 3."""

import random
from math import gcd

from toricmmp.divisors import canonical_divisor, q_cartier_data
from toricmmp.fan import Fan, validate_fan
from toricmmp.polyhedral import PolyCone


def _primitive_point(rng, box):
    while True:
        v = tuple(rng.randint(-box, box) for _ in range(3))
        if any(v) and gcd(gcd(v[0], v[1]), v[2]) == 1:
            return v


def face_fan(points):
    """Cones over the facets of conv(points), or None if the origin is not
    interior or a vertex direction repeats."""
    lifted = [p + (1,) for p in points]
    pc = PolyCone(lifted, 4)
    if pc.dim != 4:
        return None
    verts = sorted({points[i] for i in pc.extreme_generators})
    index = {v: i for i, v in enumerate(verts)}
    cones = []
    for normal, tight in pc.facets():
        # facet a.x + c >= 0 needs c > 0 for the origin to be interior
        if normal[3] <= 0:
            return None
        idx = sorted({index[points[i]] for i in tight if points[i] in index})
        cones.append(tuple(idx))
    f = Fan(3, tuple(verts), tuple(sorted(set(cones))))
    return f if validate_fan(f) is None else None


def star_subdivide(f, k):
    """Insert the primitive barycentre direction of simplicial cone ``k``."""
    cone = f.cones[k]
    if len(cone) != 3:
        return None
    s = tuple(sum(f.rays[i][j] for i in cone) for j in range(3))
    g = gcd(gcd(s[0], s[1]), s[2])
    v = tuple(x // g for x in s)
    if v in f.rays:
        return None
    n = len(f.rays)
    new = [c for j, c in enumerate(f.cones) if j != k]
    a, b, c = cone
    new += [tuple(sorted(t)) for t in ((a, b, n), (a, c, n), (b, c, n))]
    g2 = Fan(3, f.rays + (v,), tuple(new))
    if validate_fan(g2) is not None:
        return None
    return g2


def random_fans(count, seed=0, max_rays=10):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        npts = rng.randint(4, 8)
        pts = list({_primitive_point(rng, 2) for _ in range(npts)})
        if len(pts) < 4:
            continue
        f = face_fan(pts)
        if f is None or len(f.rays) > max_rays:
            continue
        if rng.random() < 0.4:
            simp = [k for k, c in enumerate(f.cones) if len(c) == 3]
            if simp:
                g = star_subdivide(f, rng.choice(simp))
                if g is not None and len(g.rays) <= max_rays:
                    f = g
        if q_cartier_data(f, canonical_divisor(f)) is None:
            continue
        out.append(f)
    return out
