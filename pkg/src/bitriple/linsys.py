"""Dimensions of linear systems on blow-ups of P^2 by interpolation over F_p.

``h0(d*l - sum m_i e_i)`` is the dimension of the space of plane curves of
degree ``d`` with multiplicity at least ``m_i`` at each blown-up point.  The
points are sampled at random over a large prime field subject to the
surface's collinearity and infinitely-near constraints; the interpolation
matrix is then reduced exactly.  Taking the minimum over several independent
configurations estimates the value for a general configuration (the
dimension can only jump up on special ones).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import NamedTuple

from bitriple.kernels import nullity_mod_p, rank_mod_p
from bitriple.picard import BlowupSurface, DivisorClass, intersect, line_class

log = logging.getLogger(__name__)

DEFAULT_PRIME = 2147483647
MIN_PRIME = 10**6
MAX_RETRIES = 64

Point = tuple[int, int]


class ConfigurationError(ValueError):
    """The constraint system cannot be realised, or stays degenerate after retries."""


@dataclass(frozen=True)
class ConcreteConfiguration:
    """Affine coordinates over ``F_prime`` for every blown-up point.

    ``points[i-1]`` holds the coordinates of a proper point (``None`` for an
    infinitely near one) and ``directions[i-1]`` the tangent vector at the
    parent of an infinitely near point.
    """

    surface: BlowupSurface
    prime: int
    points: tuple[Point | None, ...]
    directions: tuple[Point | None, ...]
    seed: int


def _is_prime(p: int) -> bool:
    from sympy import isprime

    return bool(isprime(p))


def _cross(o: Point, a: Point, b: Point, p: int) -> int:
    return ((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])) % p


def _intersect_lines(l1: tuple[Point, Point], l2: tuple[Point, Point], p: int) -> Point | None:
    (ax, ay), (bx, by) = l1
    (cx, cy), (dx, dy) = l2
    ux, uy = bx - ax, by - ay
    vx, vy = dx - cx, dy - cy
    det = (vx * uy - ux * vy) % p
    if det == 0:
        return None
    # solve a + t*u = c + s*v for t
    t = ((vx * (cy - ay) - vy * (cx - ax)) * pow(det, -1, p)) % p
    return ((ax + t * ux) % p, (ay + t * uy) % p)


def _conic_row(pt: Point, p: int) -> list[int]:
    x, y = pt
    return [x * x % p, x * y % p, y * y % p, x, y, 1]


def _try_sample(surface: BlowupSurface, p: int, rng: random.Random) -> ConcreteConfiguration | None:
    n = surface.n
    pts: list[Point | None] = [None] * n

    def rand_point() -> Point:
        return (rng.randrange(p), rng.randrange(p))

    for i in range(1, n + 1):
        if not surface.is_proper(i):
            continue
        lines = []
        for group in surface.collinear_groups:
            if i in group:
                earlier = sorted(j for j in group if j < i)
                if len(earlier) >= 2:
                    lines.append((pts[earlier[0] - 1], pts[earlier[1] - 1]))
        if not lines:
            pt = rand_point()
        elif len(lines) == 1:
            (ax, ay), (bx, by) = lines[0]
            t = rng.randrange(1, p)
            pt = ((ax + t * (bx - ax)) % p, (ay + t * (by - ay)) % p)
        else:
            pt = _intersect_lines(lines[0], lines[1], p)
            if pt is None:
                return None
            for a, b in lines[2:]:
                if _cross(a, b, pt, p):
                    raise ConfigurationError(f"point {i}: its constraint lines are not concurrent")
        pts[i - 1] = pt

    proper = surface.proper_points()
    if len({pts[i - 1] for i in proper}) != len(proper):
        return None
    for trio in combinations(proper, 3):
        constrained = any(set(trio) <= g for g in surface.collinear_groups)
        if not constrained and _cross(pts[trio[0] - 1], pts[trio[1] - 1], pts[trio[2] - 1], p) == 0:
            return None
    if len(proper) >= 6:
        for six in combinations(proper, 6):
            if any(len(set(six) & g) >= 3 for g in surface.collinear_groups):
                continue
            if rank_mod_p([_conic_row(pts[i - 1], p) for i in six], 6, p) < 6:
                return None

    dirs: list[Point | None] = [None] * n
    for q in range(1, n + 1):
        rec = surface.parents[q - 1]
        if rec is None:
            continue
        base = pts[rec.parent - 1]
        if rec.toward is not None:
            tgt = pts[rec.toward - 1]
            vec = ((tgt[0] - base[0]) % p, (tgt[1] - base[1]) % p)
        else:
            vec = (rng.randrange(p), rng.randrange(p))
            if vec == (0, 0):
                return None
            for k in proper:
                if k != rec.parent:
                    other = pts[k - 1]
                    ok = ((other[0] - base[0]) * vec[1] - (other[1] - base[1]) * vec[0]) % p
                    if ok == 0:
                        return None
        for sib in surface.children(rec.parent):
            if sib < q and dirs[sib - 1] is not None:
                u = dirs[sib - 1]
                if (u[0] * vec[1] - u[1] * vec[0]) % p == 0:
                    return None
        dirs[q - 1] = vec
    return ConcreteConfiguration(surface, p, tuple(pts), tuple(dirs), 0)


@lru_cache(maxsize=4096)
def sample_configuration(
    surface: BlowupSurface, prime: int = DEFAULT_PRIME, seed: int = 0
) -> ConcreteConfiguration:
    """Random point configuration realising exactly the declared constraints.

    Deterministic for a fixed ``(surface, prime, seed)``.
    """
    if prime <= MIN_PRIME:
        raise ConfigurationError(f"prime must exceed {MIN_PRIME} to keep configurations generic")
    if not _is_prime(prime):
        raise ConfigurationError(f"{prime} is not prime")
    rng = random.Random(seed)
    for _ in range(MAX_RETRIES):
        cfg = _try_sample(surface, prime, rng)
        if cfg is not None:
            return ConcreteConfiguration(surface, prime, cfg.points, cfg.directions, seed)
    raise ConfigurationError(f"no generic configuration found after {MAX_RETRIES} attempts")


# -- interpolation conditions --------------------------------------------------


def _monomials(d: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(d + 1) for b in range(d + 1 - a)]


def _taylor_rows(monos: list[tuple[int, int]], pt: Point, mult: int, p: int) -> list[list[int]]:
    px, py = pt
    rows = []
    for a in range(mult):
        for b in range(mult - a):
            row = []
            for al, be in monos:
                if a > al or b > be:
                    row.append(0)
                else:
                    row.append(comb(al, a) * comb(be, b) * pow(px, al - a, p) * pow(py, be - b, p) % p)
            rows.append(row)
    return rows


def _chart_coefficient(al: int, be: int, k: int, j: int, base: Point, vec: Point, p: int) -> int:
    """[s^k t^j] of x^al y^be under x = px + s(a + c1 t), y = py + s(b + c2 t)."""
    px, py = base
    a, b = vec
    c1, c2 = (0, 1) if a % p else (1, 0)
    total = 0
    for k1 in range(max(0, k - be), min(al, k) + 1):
        k2 = k - k1
        outer = comb(al, k1) * comb(be, k2) * pow(px, al - k1, p) * pow(py, be - k2, p)
        if outer % p == 0:
            continue
        inner = 0
        for j1 in range(max(0, j - k2), min(k1, j) + 1):
            j2 = j - j1
            inner += (
                comb(k1, j1) * pow(a, k1 - j1, p) * pow(c1, j1, p)
                * comb(k2, j2) * pow(b, k2 - j2, p) * pow(c2, j2, p)
            )
        total += outer * inner
    return total % p


def _chart_rows(
    monos: list[tuple[int, int]], base: Point, vec: Point, m_parent: int, m_child: int, p: int
) -> list[list[int]]:
    # strict transform G = s^{-m_parent} F(chart); G must vanish to order m_child at (0, 0)
    rows = []
    for k in range(max(m_parent, 0), m_child + m_parent):
        for j in range(0, min(k, m_child + m_parent - k - 1) + 1):
            rows.append([_chart_coefficient(al, be, k, j, base, vec, p) for al, be in monos])
    return rows


def interpolation_matrix(c: DivisorClass, cfg: ConcreteConfiguration) -> tuple[list[list[int]], int]:
    """Rows of linear conditions on the coefficients of a degree ``c.d`` curve."""
    surface, p = cfg.surface, cfg.prime
    if c.n != surface.n:
        raise ValueError(f"class has {c.n} points, configuration has {surface.n}")
    monos = _monomials(c.d)
    rows: list[list[int]] = []
    for i in range(1, surface.n + 1):
        mult = c.m[i - 1]
        rec = surface.parents[i - 1]
        if rec is None:
            if mult > 0:
                rows.extend(_taylor_rows(monos, cfg.points[i - 1], mult, p))
        elif mult > 0:
            parent_mult = c.m[rec.parent - 1]
            rows.extend(
                _chart_rows(monos, cfg.points[rec.parent - 1], cfg.directions[i - 1], parent_mult, mult, p)
            )
    return rows, len(monos)


@lru_cache(maxsize=65536)
def _h0_single(c: DivisorClass, cfg: ConcreteConfiguration) -> int:
    if c.d < 0:
        return 0
    rows, ncols = interpolation_matrix(c, cfg)
    return nullity_mod_p(rows, ncols, cfg.prime)


def h0(c: DivisorClass, cfg: ConcreteConfiguration, trials: int = 1) -> int:
    """``h^0`` of ``c``: minimum nullity over ``trials`` configurations.

    The first configuration is ``cfg`` itself; the others are fresh samples
    with seeds ``cfg.seed + 1, cfg.seed + 2, ...``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if c.d < 0:
        return 0
    best = _h0_single(c, cfg)
    for k in range(1, trials):
        if best == 0:
            break
        other = sample_configuration(cfg.surface, cfg.prime, cfg.seed + k)
        best = min(best, _h0_single(c, other))
    return best


@dataclass(frozen=True)
class H0Oracle:
    """Sampling parameters bundled for callers that work on several surfaces."""

    prime: int = DEFAULT_PRIME
    seed: int = 0
    trials: int = 5

    def configuration(self, surface: BlowupSurface) -> ConcreteConfiguration:
        return sample_configuration(surface, self.prime, self.seed)

    def h0(self, c: DivisorClass, surface: BlowupSurface) -> int:
        if c.d < 0:
            return 0
        return h0(c, self.configuration(surface), self.trials)


# -- nef / big certificates -----------------------------------------------------


@dataclass(frozen=True)
class NegativeCurveCatalog:
    surface: BlowupSurface
    entries: tuple[DivisorClass, ...]


def negative_curve_catalog(
    surface: BlowupSurface, cfg: ConcreteConfiguration | None = None
) -> NegativeCurveCatalog:
    """Candidate negative curves used to certify nefness.

    Exceptional curves (strict transforms when infinitely near points sit on
    them), lines through pairs of proper points and through each collinear
    group, and conics through five proper points no three of them collinear.
    With a configuration, entries without sections are dropped.
    """
    n = surface.n
    cands: list[DivisorClass] = []
    for i in range(1, n + 1):
        c = DivisorClass.exceptional(i, n)
        for q in surface.children(i):
            c = c - DivisorClass.exceptional(q, n)
        cands.append(c)
    proper = surface.proper_points()
    for a, b in combinations(proper, 2):
        group = surface.line_through(a, b)
        cands.append(line_class(sorted(group) if group else [a, b], surface))
    if len(proper) >= 5:
        for five in combinations(proper, 5):
            if any(len(set(five) & g) >= 3 for g in surface.collinear_groups):
                continue
            m = [0] * n
            for i in five:
                m[i - 1] = 1
            cands.append(DivisorClass(2, tuple(m)))
    entries: list[DivisorClass] = []
    for c in cands:
        if c in entries or intersect(c, c) >= 0:
            continue
        if cfg is not None and h0(c, cfg) < 1:
            continue
        entries.append(c)
    return NegativeCurveCatalog(surface, tuple(entries))


class NefBig(NamedTuple):
    nef: bool
    big: bool


def is_nef_big(c: DivisorClass, catalog: NegativeCurveCatalog) -> NefBig:
    """Nefness certificate relative to ``catalog``; big means nef with positive square."""
    line = DivisorClass.line(c.n)
    nef = intersect(c, line) >= 0 and all(intersect(c, g) >= 0 for g in catalog.entries)
    return NefBig(nef, nef and intersect(c, c) > 0)
