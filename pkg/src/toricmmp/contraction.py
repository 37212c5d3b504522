"""Contractions of extremal rays, flips, and their certificates.

A contraction merges the maximal cones across every wall whose curve class
lies on the chosen ray.  A flip re-subdivides each merged cone using only
the rays it already has, keeping the one subdivision on which K (+B) is
Q-Cartier and positive on every new interior wall.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .curves import MoriCone, intersect, mori_cone
from .divisors import (
    add,
    canonical_divisor,
    contraction_discrepancy_divisor,
    divisor,
    picard_basis,
    pushforward,
    q_cartier_data,
    scale,
)
from .errors import (
    CertificateError,
    ContractionError,
    FlopError,
    NoFlipError,
    NotQCartierError,
    PreconditionError,
    UniquenessViolation,
)
from .fan import Fan, make_fan, validate_fan
from .linalg import dot, integer_kernel, integer_kernel_rational, is_zero, primitive, rank, solve_affine
from .polyhedral import PolyCone, intersection_rays
from .singularities import discrepancy, is_klt, is_terminal, low_pairing_points

log = logging.getLogger(__name__)

FIBER, DIVISORIAL, SMALL = "fiber", "divisorial", "small"


@dataclass(frozen=True)
class ContractionOutcome:
    source: Fan
    kind: str
    target: Fan | None
    contracted_walls: tuple[int, ...]  # indices into source.walls
    removed_rays: tuple[int, ...]  # source ray indices
    merged: tuple[tuple[int, ...], ...]  # source cone indices per group
    group_target: tuple[int | None, ...]  # target cone index per group
    ray: tuple[int, ...] | None = None
    lineality: tuple[tuple[int, ...], ...] = ()
    quotient: tuple[tuple[int, ...], ...] = ()

    @property
    def quotient_rank(self) -> int:
        return self.source.rank - len(self.lineality)

    def merged_groups(self):
        """Groups containing more than one source cone."""
        return [g for g in self.merged if len(g) > 1]


def contract_walls(f: Fan, wall_indices, ray=None) -> ContractionOutcome:
    """Merge maximal cones transitively across the given walls."""
    wall_indices = tuple(sorted(wall_indices))
    if not wall_indices:
        raise ContractionError("nothing to contract")
    parent = list(range(len(f.cones)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for wi in wall_indices:
        a, b = f.walls[wi].cofaces
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for k in range(len(f.cones)):
        groups.setdefault(find(k), []).append(k)
    merged = tuple(tuple(g) for _, g in sorted(groups.items()))

    group_cones = []
    for g in merged:
        idx = sorted({i for k in g for i in f.cones[k]})
        group_cones.append((idx, PolyCone([f.rays[i] for i in idx], f.rank)))

    if any(not pc.is_pointed for _, pc in group_cones):
        return _fiber_outcome(f, wall_indices, merged, group_cones, ray)

    keep: set[int] = set()
    target_cones = []
    for idx, pc in group_cones:
        ext = [idx[j] for j in pc.extreme_generators]
        keep.update(ext)
        target_cones.append(ext)
    removed = tuple(i for i in range(len(f.rays)) if i not in keep)
    kept = [i for i in range(len(f.rays)) if i in keep]
    renum = {old: new for new, old in enumerate(kept)}
    target = Fan(
        f.rank,
        tuple(f.rays[i] for i in kept),
        tuple(tuple(renum[i] for i in c) for c in target_cones),
        tuple(f.labels[i] for i in kept),
    )
    msg = validate_fan(target)
    if msg:
        raise ContractionError(f"ray not contractible: {msg}")
    if removed:
        kind = DIVISORIAL
    elif any(len(g) > 1 for g in merged):
        kind = SMALL
    else:
        raise ContractionError("contraction merged nothing")
    return ContractionOutcome(
        f, kind, target, wall_indices, removed, merged, tuple(range(len(merged))), ray
    )


def _fiber_outcome(f, wall_indices, merged, group_cones, ray):
    lin = next(pc for _, pc in group_cones if not pc.is_pointed).lineality_basis
    Q = integer_kernel(lin, f.rank)  # rows: basis of the annihilator of the fibre
    target = None
    if Q:
        images = []
        for idx, _ in group_cones:
            vecs = [tuple(dot(q, f.rays[i]) for q in Q) for i in idx]
            images.append([v for v in vecs if not is_zero(v)])
        try:
            cones = []
            for vecs in images:
                pc = PolyCone(vecs, len(Q))
                if not pc.is_pointed:
                    raise ContractionError("image cone is not strongly convex")
                cones.append(pc.extreme_rays)
            ray_list = sorted({r for c in cones for r in c})
            candidate = make_fan(len(Q), ray_list, _maximal(cones))
            if validate_fan(candidate) is None:
                target = candidate
        except ContractionError:
            target = None
    return ContractionOutcome(
        f,
        FIBER,
        target,
        wall_indices,
        (),
        merged,
        tuple(None for _ in merged),
        ray,
        tuple(lin),
        tuple(Q),
    )


def _maximal(cones):
    sets = [frozenset(c) for c in cones]
    uniq = []
    for s in sets:
        if s not in uniq:
            uniq.append(s)
    return [sorted(s) for s in uniq if not any(s < t for t in uniq)]


def contract_ray(
    f: Fan,
    ray,
    cone: MoriCone | None = None,
    boundary=None,
    require_k_negative: bool = False,
) -> ContractionOutcome:
    """Contract the extremal ray ``ray`` (given in curve-class coordinates)."""
    if cone is None:
        cone = mori_cone(f)
    i = cone.ray_index(ray)
    r = cone.rays[i]
    K = canonical_divisor(f)
    if boundary is not None:
        K = add(K, divisor(boundary))
    if q_cartier_data(f, K) is None:
        if require_k_negative:
            raise NotQCartierError("K_X is not Q-Cartier")
        log.warning("contracting a ray on a non-Q-Gorenstein variety")
    else:
        sign = dot(cone.basis.class_of(K), r)
        if sign >= 0:
            if require_k_negative:
                raise PreconditionError(f"ray {r} is not K-negative")
            log.warning("ray %s is not K-negative", r)
    return contract_walls(f, cone.walls_on_ray[i], ray=r)


# --------------------------------------------------------------- divisorial


@dataclass(frozen=True)
class DivisorialCertificate:
    exceptional: tuple[Fraction, ...]  # E on source rays
    e_dot_curves: tuple[tuple[int, Fraction], ...]  # (wall index, E.C)
    target_picard_rank: int
    source_terminal: bool | None
    target_terminal: bool | None
    target_klt: bool | None


def verify_divisorial(source: Fan, outcome: ContractionOutcome, boundary=None) -> DivisorialCertificate:
    """Check E = K_X + B - phi^*(K_Y + B_Y) is effective, exactly
    exceptional with positive coefficients, and negative on contracted
    curves; transfer terminality (or klt for pairs) to the target."""
    if outcome.kind != DIVISORIAL:
        raise PreconditionError("kind mismatch: not a divisorial contraction")
    target = outcome.target
    stmt = "divisorial contraction theorem"
    E = contraction_discrepancy_divisor(source, target, boundary)
    removed = set(outcome.removed_rays)
    for i, c in enumerate(E):
        if i in removed and c <= 0:
            raise CertificateError(stmt, f"coefficient {c} of E at exceptional ray {source.labels[i]} is not positive")
        if i not in removed and c != 0:
            raise CertificateError(stmt, f"E is not exceptional: coefficient {c} at {source.labels[i]}")
    if all(c == 0 for c in E):
        raise CertificateError(stmt, "E is zero")
    data = q_cartier_data(source, E)
    if data is None:
        raise CertificateError(stmt, "E is not Q-Cartier")
    dots = []
    for wi in outcome.contracted_walls:
        v = intersect(source, E, source.walls[wi], data=data)
        if v >= 0:
            raise CertificateError(stmt, f"E.C = {v} >= 0 on contracted curve {source.walls[wi].name(source.labels)}")
        dots.append((wi, v))
    src_term = tgt_term = tgt_klt = None
    if boundary is None:
        src_term = is_terminal(source).terminal
        if src_term:
            tgt_term = is_terminal(target).terminal
            if not tgt_term:
                raise CertificateError(stmt, "source is terminal but target is not")
    else:
        BY = pushforward(boundary, source, target)
        tgt_klt = is_klt(target, BY).klt
        if is_klt(source, boundary).klt and not tgt_klt:
            raise CertificateError(stmt, "pair on the target is not klt")
    return DivisorialCertificate(
        E, tuple(dots), picard_basis(target).dimension, src_term, tgt_term, tgt_klt
    )


# --------------------------------------------------------------- subdivisions


def _generic_point(vecs, n):
    hyper = []
    for sub in combinations(vecs, n - 1):
        if rank(list(sub), n) == n - 1:
            hyper.append(integer_kernel_rational(list(sub), n)[0])
    t = 2
    while True:
        p = tuple(sum(t ** j * v[i] for j, v in enumerate(vecs)) for i in range(n))
        if all(dot(u, p) != 0 for u in hyper):
            return p
        t += 1


class _Cell:
    __slots__ = ("rays", "pc", "facets", "key")

    def __init__(self, rays, pc, facets):
        self.rays = rays
        self.pc = pc
        self.facets = facets
        self.key = tuple(rays)


def enumerate_subdivisions(f: Fan, region_rays) -> list[frozenset[tuple[int, ...]]]:
    """All subdivisions of cone(region_rays) into full-dimensional cells
    spanned by subsets of those rays (global ray indices of ``f``).

    Each cell has exactly its listed rays as extreme rays and contains no
    other region ray.  The undivided cone is included when valid.
    """
    region_rays = sorted(region_rays)
    n = f.rank
    vecs = {i: f.rays[i] for i in region_rays}
    whole = PolyCone([vecs[i] for i in region_rays], n)
    boundary_normals = whole.facet_normals

    cells: list[_Cell] = []
    for size in range(n, len(region_rays) + 1):
        for sub in combinations(region_rays, size):
            pc = PolyCone([vecs[i] for i in sub], n)
            if pc.dim != n or not pc.is_pointed or len(pc.extreme_generators) != size:
                continue
            if any(pc.contains(vecs[i]) for i in region_rays if i not in sub):
                continue
            facets = []
            for u, tight in pc.facets():
                fr = tuple(sorted(sub[j] for j in tight))
                on_boundary = any(all(dot(b, vecs[i]) == 0 for i in fr) for b in boundary_normals)
                facets.append((fr, on_boundary))
            cells.append(_Cell(sub, pc, facets))

    by_facet: dict[tuple[int, ...], list[_Cell]] = {}
    for c in cells:
        for fr, on_b in c.facets:
            if not on_b:
                by_facet.setdefault(fr, []).append(c)

    compat_cache: dict[tuple, bool] = {}

    def compatible(a: _Cell, b: _Cell) -> bool:
        key = (a.key, b.key) if a.key < b.key else (b.key, a.key)
        if key in compat_cache:
            return compat_cache[key]
        common = sorted(set(a.rays) & set(b.rays))
        common_vecs = {vecs[i] for i in common}
        ok = all(r in common_vecs for r in intersection_rays(a.pc, b.pc))
        if ok:
            for c in (a, b):
                local = [c.rays.index(i) for i in common]
                if set(c.pc.face_of(local)) != set(local):
                    ok = False
                    break
        compat_cache[key] = ok
        return ok

    p = _generic_point([vecs[i] for i in region_rays], n)
    results: list[frozenset] = []

    def extend(chosen: list[_Cell], open_facets: dict):
        if not open_facets:
            results.append(frozenset(c.key for c in chosen))
            return
        fr = min(open_facets)
        owner = open_facets[fr]
        for cell in by_facet.get(fr, ()):
            if cell is owner or any(cell is c for c in chosen):
                continue
            if not all(compatible(cell, c) for c in chosen):
                continue
            nxt = dict(open_facets)
            clash = False
            for g, on_b in cell.facets:
                if on_b:
                    continue
                if g in nxt:
                    del nxt[g]
                elif any(g in (h for h, _ in c.facets) for c in chosen):
                    clash = True
                    break
                else:
                    nxt[g] = cell
            if not clash:
                extend(chosen + [cell], nxt)

    for cell in cells:
        if cell.pc.in_relative_interior(p):
            start = {g: cell for g, on_b in cell.facets if not on_b}
            extend([cell], start)
    return sorted(set(results), key=lambda s: sorted(s))


def interior_walls(f: Fan, cells) -> list[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    """``(wall rays, cell a, cell b)`` for facets shared by two cells."""
    table: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for c in cells:
        pc = PolyCone([f.rays[i] for i in c], f.rank)
        for _, tight in pc.facets():
            table.setdefault(tuple(sorted(c[j] for j in tight)), []).append(tuple(c))
    return [(w, cs[0], cs[1]) for w, cs in sorted(table.items()) if len(cs) == 2]


def local_intersection(f: Fan, D, wall, cell_a, cell_b) -> Fraction | None:
    """D . C_wall computed from the two cells only; None if D is not
    Q-Cartier on them."""
    ms = []
    for cell in (cell_a, cell_b):
        sol = solve_affine([f.rays[i] for i in cell], [D[i] for i in cell])
        if sol is None:
            return None
        ms.append(sol[0])
    (normal,) = integer_kernel_rational([f.rays[i] for i in wall], f.rank)
    w_idx = next(i for i in cell_b if i not in wall)
    w = f.rays[w_idx]
    k = abs(dot(normal, w))
    diff = tuple(b - a for a, b in zip(ms[0], ms[1]))
    return Fraction(dot(diff, w)) / k


# --------------------------------------------------------------- flips


@dataclass(frozen=True)
class FlipResult:
    fan: Fan
    boundary: tuple[Fraction, ...] | None
    region: tuple[tuple[int, ...], ...]  # target cones re-subdivided (target ray indices)
    cells: tuple[tuple[tuple[int, ...], ...], ...]  # new cells per region cone (X+ ray indices)
    walls: tuple[tuple[tuple[int, ...], Fraction], ...]  # new interior walls with (K+B).C
    candidates: int
    admissible: int
    flops: int


def _k_plus_b(f: Fan, boundary):
    K = canonical_divisor(f)
    return add(K, divisor(boundary)) if boundary is not None else K


def flip(source: Fan, outcome: ContractionOutcome, boundary=None) -> FlipResult:
    """Construct the flip of a birational contraction whose target has
    K (+B) not Q-Cartier.

    Raises FlopError when candidates exist but K is trivial on a new wall,
    NoFlipError when no candidate qualifies, UniquenessViolation when more
    than one does.
    """
    if outcome.kind not in (SMALL, DIVISORIAL):
        raise PreconditionError(f"kind mismatch: cannot flip a {outcome.kind} contraction")
    Y = outcome.target
    BY = pushforward(boundary, source, Y) if boundary is not None else None
    KY = _k_plus_b(Y, BY)
    if outcome.kind == DIVISORIAL and q_cartier_data(Y, KY) is not None:
        raise PreconditionError("target is Q-Gorenstein; nothing to flip")

    region = []
    per_region: list[list[frozenset]] = []
    n_candidates = n_flops = 0
    for g, t in zip(outcome.merged, outcome.group_target):
        if len(g) == 1:
            continue
        cone = Y.cones[t]
        local_ok = solve_affine([Y.rays[i] for i in cone], [KY[i] for i in cone]) is not None
        if local_ok and any(i in outcome.removed_rays for k in g for i in source.cones[k]):
            continue  # Q-Gorenstein over this cone: left as is
        region.append(cone)
        shared = _shared_facets(Y, t)
        admissible, flops = [], []
        for sub in enumerate_subdivisions(Y, cone):
            if len(sub) < 2:
                continue
            if not _respects(Y, sub, shared):
                continue
            n_candidates += 1
            walls = interior_walls(Y, sorted(sub))
            vals = [local_intersection(Y, KY, w, a, b) for w, a, b in walls]
            if any(v is None for v in vals):
                continue
            if all(v > 0 for v in vals):
                admissible.append(sub)
            elif all(v >= 0 for v in vals):
                flops.append(sub)
        n_flops += len(flops)
        per_region.append(admissible)
        if not admissible:
            if flops:
                raise FlopError(
                    f"flop, not flip: K is numerically trivial on a new wall in all "
                    f"{len(flops)} candidate subdivision(s) of {Y.cone_name(cone)}"
                )
            raise NoFlipError(f"no flip among ray-preserving subdivisions of {Y.cone_name(cone)}")
        if len(admissible) > 1:
            raise UniquenessViolation(
                "flip uniqueness", f"{len(admissible)} admissible subdivisions of {Y.cone_name(cone)}"
            )
    if not region:
        raise NoFlipError("no merged cone needs re-subdivision")

    chosen = {tuple(c): sorted(sub[0]) for c, sub in zip(region, per_region)}
    cones = []
    for c in Y.cones:
        if tuple(c) in chosen:
            cones.extend(chosen[tuple(c)])
        else:
            cones.append(c)
    Xp = Fan(Y.rank, Y.rays, tuple(cones), Y.labels)
    msg = validate_fan(Xp)
    if msg:
        raise CertificateError("flip construction", f"result is not a fan: {msg}")
    walls = []
    for c in region:
        for w, a, b in interior_walls(Y, chosen[tuple(c)]):
            walls.append((w, local_intersection(Y, KY, w, a, b)))
    return FlipResult(
        Xp,
        BY,
        tuple(tuple(c) for c in region),
        tuple(tuple(tuple(x) for x in chosen[tuple(c)]) for c in region),
        tuple(walls),
        n_candidates,
        sum(len(a) for a in per_region),
        n_flops,
    )


def _shared_facets(Y: Fan, t: int):
    """Facets of target cone ``t`` that are also faces of another cone."""
    own = Y.facets(t)
    out = []
    for fr in own:
        for k in range(len(Y.cones)):
            if k != t and set(fr) <= set(Y.cones[k]):
                out.append(fr)
                break
    return out


def _respects(Y: Fan, sub, shared) -> bool:
    """Shared boundary facets must survive undivided."""
    if not shared:
        return True
    cell_facets = set()
    for c in sub:
        pc = PolyCone([Y.rays[i] for i in c], Y.rank)
        for _, tight in pc.facets():
            cell_facets.add(tuple(sorted(c[j] for j in tight)))
    return all(tuple(fr) in cell_facets for fr in shared)


# --------------------------------------------------------------- flip check


@dataclass(frozen=True)
class FlipCertificate:
    test_set: tuple[tuple[int, ...], ...]
    discrepancies: tuple[tuple[tuple[int, ...], Fraction, Fraction], ...]  # (w, a_X, a_X+)
    strict: tuple[tuple[int, ...], ...]
    wall_values: tuple[tuple[tuple[int, ...], Fraction], ...]
    source_terminal: bool | None
    flipped_terminal: bool | None
    flipped_klt: bool | None


def _region_cells(f: Fan, region_vecs) -> list[int]:
    pcs = [PolyCone(list(r), f.rank) for r in region_vecs]
    return [
        k
        for k in range(len(f.cones))
        if any(all(pc.contains(v) for v in f.rays_of(k)) for pc in pcs)
    ]


def discrepancy_test_set(source: Fan, flipped: Fan, region_vecs, boundary=None) -> list[tuple[int, ...]]:
    """Rays of the common refinement over the region plus low-pairing
    lattice points of the region."""
    src = _region_cells(source, region_vecs)
    dst = _region_cells(flipped, region_vecs)
    W = set()
    for k in src:
        W.update(source.rays_of(k))
    for k in dst:
        W.update(flipped.rays_of(k))
    for a in src:
        for b in dst:
            try:
                W.update(intersection_rays(source.polycone(a), flipped.polycone(b)))
            except ValueError:
                pass
    K = _k_plus_b(source, boundary)
    data = q_cartier_data(source, tuple(-c for c in K))
    for k in src:
        for v, _ in low_pairing_points(source, k, data.functionals[k], 2):
            if primitive(v) == tuple(v):
                W.add(tuple(v))
    return sorted(W)


def verify_flip(
    source: Fan,
    flipped: Fan,
    region_vecs,
    boundary=None,
    flipped_boundary=None,
    target: Fan | None = None,
) -> FlipCertificate:
    """Check K-positivity on the new walls and that discrepancies never
    drop and rise strictly somewhere."""
    stmt = "flip discrepancy monotonicity"
    Kp = _k_plus_b(flipped, flipped_boundary)
    if q_cartier_data(flipped, Kp) is None:
        raise CertificateError("flip theorem", "K of the flip is not Q-Cartier")
    if target is not None and set(flipped.rays) != set(target.rays):
        raise CertificateError("flip theorem", "flip is not small over the target")
    if target is None and set(flipped.rays) != set(source.rays):
        raise CertificateError("flip theorem", "flip changes the ray set")
    wall_vals = []
    for region in region_vecs:
        # walls between two different regions are not contracted curves
        cells = [flipped.cones[k] for k in _region_cells(flipped, [region])]
        for w, a, b in interior_walls(flipped, cells):
            v = local_intersection(flipped, Kp, w, a, b)
            if v is None or v <= 0:
                raise CertificateError("flip theorem", f"(K+B).C = {v} is not positive on a new wall")
            wall_vals.append((w, v))
    W = discrepancy_test_set(source, flipped, region_vecs, boundary)
    rows, strict = [], []
    for w in W:
        a = discrepancy(w, source, boundary)
        ap = discrepancy(w, flipped, flipped_boundary)
        rows.append((w, a, ap))
        if ap < a:
            raise CertificateError(stmt, f"a+({w}) = {ap} < a({w}) = {a}")
        if ap > a:
            strict.append(w)
    if not strict:
        raise CertificateError(stmt, "no discrepancy increases strictly")
    src_term = flp_term = flp_klt = None
    if boundary is None:
        src_term = is_terminal(source).terminal
        if src_term:
            flp_term = is_terminal(flipped).terminal
            if not flp_term:
                raise CertificateError("flip theorem", "source terminal but flip is not")
    else:
        flp_klt = is_klt(flipped, flipped_boundary).klt
        if is_klt(source, boundary).klt and not flp_klt:
            raise CertificateError("flip theorem", "flipped pair is not klt")
    return FlipCertificate(
        tuple(W), tuple(rows), tuple(strict), tuple(wall_vals), src_term, flp_term, flp_klt
    )
