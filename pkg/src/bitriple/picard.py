"""Divisor classes on iterated blow-ups of the projective plane.

Classes are stored in the total-transform basis ``l, e_1, ..., e_n`` where the
intersection form is diagonal (``l^2 = 1``, ``e_i^2 = -1``), also when some of
the blown-up points are infinitely near.  A class ``d*l - sum m_i e_i`` is kept
as the pair ``(d, (m_1, ..., m_n))``.

Point indices are 1-based everywhere in the public API, matching the usual
``e_1, e_2, ...`` notation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence


class LatticeError(ValueError):
    """Raised for malformed surfaces, mismatched classes or unknown names."""


@dataclass(frozen=True)
class InfinitelyNear:
    """A first-order infinitely near point.

    ``toward`` names a proper point ``j``: the tangent direction at the parent
    is that of the line joining the parent to ``P_j``.  ``None`` means a free
    direction, fixed only when a concrete configuration is sampled.
    """

    parent: int
    toward: int | None = None


@dataclass(frozen=True)
class BlowupSurface:
    """Ordered blow-up of P^2.

    ``parents[i-1]`` is ``None`` for a proper point of the plane, otherwise an
    :class:`InfinitelyNear` record.  ``collinear_groups`` lists sets of proper
    points lying on a common line (at least three members each).
    """

    parents: tuple[InfinitelyNear | None, ...] = ()
    collinear_groups: tuple[frozenset[int], ...] = ()

    def __post_init__(self) -> None:
        groups = tuple(sorted((frozenset(g) for g in self.collinear_groups), key=sorted))
        object.__setattr__(self, "collinear_groups", groups)
        object.__setattr__(self, "parents", tuple(self.parents))
        n = len(self.parents)
        for idx, rec in enumerate(self.parents, start=1):
            if rec is None:
                continue
            if not 1 <= rec.parent < idx:
                raise LatticeError(f"point {idx}: parent {rec.parent} must precede it")
            if self.parents[rec.parent - 1] is not None:
                raise LatticeError(f"point {idx}: only first-order infinitely near points are supported")
            if rec.toward is not None:
                if not 1 <= rec.toward <= n or self.parents[rec.toward - 1] is not None:
                    raise LatticeError(f"point {idx}: direction must point toward a proper point")
                if rec.toward == rec.parent:
                    raise LatticeError(f"point {idx}: direction toward its own parent")
        seen: dict[tuple[int, int | None], int] = {}
        for idx, rec in enumerate(self.parents, start=1):
            if rec is None or rec.toward is None:
                continue
            key = (rec.parent, self._direction_key(rec))
            if key in seen:
                raise LatticeError(f"points {seen[key]} and {idx} share parent and direction")
            seen[key] = idx
        for group in self.collinear_groups:
            if len(group) < 3:
                raise LatticeError(f"collinear group {sorted(group)} has fewer than 3 points")
            for p in group:
                if not 1 <= p <= n or self.parents[p - 1] is not None:
                    raise LatticeError(f"collinear group {sorted(group)}: {p} is not a proper point")
        for g1, g2 in combinations(self.collinear_groups, 2):
            if len(g1 & g2) > 1:
                raise LatticeError(f"collinear groups {sorted(g1)} and {sorted(g2)} share two points")

    def _direction_key(self, rec: InfinitelyNear) -> int | None:
        # two "toward" tags give the same tangent when the targets are on one line with the parent
        group = self.line_through(rec.parent, rec.toward)
        return min(group - {rec.parent}) if group else rec.toward

    # -- construction helpers -------------------------------------------------
    @classmethod
    def plane(
        cls,
        n: int,
        collinear: Iterable[Iterable[int]] = (),
        infinitely_near: Mapping[int, tuple[int, int | None]] | None = None,
    ) -> "BlowupSurface":
        infinitely_near = infinitely_near or {}
        parents = tuple(
            InfinitelyNear(*infinitely_near[i]) if i in infinitely_near else None
            for i in range(1, n + 1)
        )
        groups = tuple(frozenset(g) for g in collinear)
        return cls(parents, groups)

    @property
    def n(self) -> int:
        return len(self.parents)

    def is_proper(self, i: int) -> bool:
        return self.parents[i - 1] is None

    def proper_points(self) -> list[int]:
        return [i for i in range(1, self.n + 1) if self.parents[i - 1] is None]

    def children(self, p: int) -> list[int]:
        return [i for i, rec in enumerate(self.parents, start=1) if rec is not None and rec.parent == p]

    def line_through(self, a: int, b: int | None) -> frozenset[int]:
        """The declared collinear group containing both points, or an empty set."""
        if b is None:
            return frozenset()
        for group in self.collinear_groups:
            if a in group and b in group:
                return group
        return frozenset()

    def append_proper(self, on_lines: Iterable[Iterable[int]] = ()) -> "BlowupSurface":
        """Blow up one more proper point lying on the lines through the given point sets.

        Each entry of ``on_lines`` is the set of proper points already on a line
        that the new point also lies on; groups are merged as needed.
        """
        new = self.n + 1
        groups = [set(g) for g in self.collinear_groups]
        for line in on_lines:
            pts = set(line) | {new}
            if len(pts) < 3:
                continue
            merged = [g for g in groups if len(g & pts) >= 2]
            for g in merged:
                groups.remove(g)
                pts |= g
            groups.append(pts)
        return BlowupSurface(self.parents + (None,), tuple(frozenset(g) for g in groups))

    def append_infinitely_near(self, parent: int, toward: int | None) -> "BlowupSurface":
        return BlowupSurface(self.parents + (InfinitelyNear(parent, toward),), self.collinear_groups)

    def extends(self, other: "BlowupSurface") -> bool:
        """True when ``self`` is ``other`` with further points appended."""
        if self.n < other.n or self.parents[: other.n] != other.parents:
            return False
        return all(any(g <= h for h in self.collinear_groups) for g in other.collinear_groups)


@dataclass(frozen=True)
class DivisorClass:
    """The class ``d*l - sum(m_i * e_i)``."""

    d: int
    m: tuple[int, ...] = field(default=())

    @classmethod
    def zero(cls, n: int) -> "DivisorClass":
        return cls(0, (0,) * n)

    @classmethod
    def line(cls, n: int) -> "DivisorClass":
        return cls(1, (0,) * n)

    @classmethod
    def exceptional(cls, i: int, n: int) -> "DivisorClass":
        """Total transform ``e_i``."""
        if not 1 <= i <= n:
            raise LatticeError(f"no point {i} on a surface with {n} points")
        m = [0] * n
        m[i - 1] = -1
        return cls(0, tuple(m))

    @property
    def n(self) -> int:
        return len(self.m)

    def _check(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass):
            raise TypeError(f"expected DivisorClass, got {type(other).__name__}")
        if len(self.m) != len(other.m):
            raise LatticeError(f"class dimension mismatch: {len(self.m)} vs {len(other.m)} points")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.d + other.d, tuple(a + b for a, b in zip(self.m, other.m)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.d - other.d, tuple(a - b for a, b in zip(self.m, other.m)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(-self.d, tuple(-a for a in self.m))

    def __mul__(self, k: int) -> "DivisorClass":
        if not isinstance(k, int):
            return NotImplemented
        return DivisorClass(self.d * k, tuple(a * k for a in self.m))

    __rmul__ = __mul__

    def __matmul__(self, other: "DivisorClass") -> int:
        return intersect(self, other)

    def square(self) -> int:
        return intersect(self, self)

    def is_zero(self) -> bool:
        return self.d == 0 and not any(self.m)

    def padded(self, n: int) -> "DivisorClass":
        if n < self.n:
            raise LatticeError("cannot pad a class to fewer points")
        return DivisorClass(self.d, self.m + (0,) * (n - self.n))

    def __str__(self) -> str:
        return format_class(self)


def intersect(a: DivisorClass, b: DivisorClass) -> int:
    """Intersection number ``a . b`` in the diagonal total-transform basis."""
    a._check(b)
    return a.d * b.d - sum(x * y for x, y in zip(a.m, b.m))


def canonical_class(surface: BlowupSurface) -> DivisorClass:
    return DivisorClass(-3, (-1,) * surface.n)


def blowup_pullback(c: DivisorClass, old: BlowupSurface, new: BlowupSurface) -> DivisorClass:
    """Total transform of ``c`` from ``old`` to its extension ``new``."""
    if c.n != old.n:
        raise LatticeError(f"class has {c.n} points but surface has {old.n}")
    if not new.extends(old):
        raise LatticeError("target surface does not extend the source surface")
    return c.padded(new.n)


def format_class(c: DivisorClass) -> str:
    """Render as e.g. ``7l - e1 - 3e2``."""
    terms = [(c.d, "l")] + [(-mi, f"e{i}") for i, mi in enumerate(c.m, start=1)]
    out = ""
    for coef, name in terms:
        if coef == 0:
            continue
        mag = "" if abs(coef) == 1 else str(abs(coef))
        if not out:
            out = f"{'-' if coef < 0 else ''}{mag}{name}"
        else:
            out += f" {'-' if coef < 0 else '+'} {mag}{name}"
    return out or "0"


# -- named curve classes ------------------------------------------------------

_NAME = re.compile(r"^(?:(l)|(K)|e(\d+)|eb(\d+)|f(\d+)|h(\d+(?:_\d+)*))$")


def _line_points(name_digits: str) -> list[int]:
    if "_" in name_digits:
        return [int(x) for x in name_digits.split("_")]
    return [int(ch) for ch in name_digits]


def line_class(points: Sequence[int], surface: BlowupSurface) -> DivisorClass:
    """Strict transform of the line through the given proper points."""
    pts = set(points)
    n = surface.n
    if len(pts) != len(points) or len(pts) < 2:
        raise LatticeError(f"a line name needs at least two distinct points, got {list(points)}")
    for p in pts:
        if not 1 <= p <= n:
            raise LatticeError(f"point {p} is not on the surface (n = {n})")
        if not surface.is_proper(p):
            raise LatticeError(f"point {p} is infinitely near; lines are named by proper points")
    group = next((g for g in surface.collinear_groups if len(g & pts) >= 2), None)
    if group is not None:
        if pts != group:
            raise LatticeError(
                f"the line through {sorted(pts)} is the line of collinear group {sorted(group)}; "
                f"name it by the full group"
            )
    elif len(pts) >= 3:
        raise LatticeError(f"points {sorted(pts)} are not declared collinear")
    m = [0] * n
    for p in pts:
        m[p - 1] = 1
    for q, rec in enumerate(surface.parents, start=1):
        if rec is not None and rec.parent in pts and rec.toward in pts:
            m[q - 1] = 1
    return DivisorClass(1, tuple(m))


def named_class(name: str, surface: BlowupSurface) -> DivisorClass:
    """Class of a named curve.

    Vocabulary: ``l``; ``K``; ``e<i>`` total exceptional class; ``eb<i>``
    strict transform of the exceptional curve over ``P_i``; ``f<i>`` a general
    line through ``P_i``; ``h<ij...>`` the line through the listed proper points
    (single-digit indices, or underscore separated such as ``h1_10``).
    """
    match = _NAME.match(name)
    if match is None:
        raise LatticeError(f"unknown curve name {name!r}")
    n = surface.n
    is_l, is_k, e, eb, f, h = match.groups()
    if is_l:
        return DivisorClass.line(n)
    if is_k:
        return canonical_class(surface)
    if e is not None:
        return DivisorClass.exceptional(int(e), n)
    if eb is not None:
        p = int(eb)
        c = DivisorClass.exceptional(p, n)
        for q in surface.children(p):
            c = c - DivisorClass.exceptional(q, n)
        return c
    if f is not None:
        p = int(f)
        if not 1 <= p <= n or not surface.is_proper(p):
            raise LatticeError(f"f{p}: no proper point {p}")
        return DivisorClass.line(n) - DivisorClass.exceptional(p, n)
    return line_class(_line_points(h), surface)


_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*([A-Za-z][A-Za-z0-9_]*)?\s*")


def parse_class(
    expr: str,
    surface: BlowupSurface,
    symbols: Mapping[str, DivisorClass] | None = None,
) -> DivisorClass:
    """Evaluate an integer combination such as ``"f1 + 3f2 - 2e5"`` or ``"K + L01"``.

    ``symbols`` supplies extra names (for example the ``L`` classes of a
    construction); they shadow the curve vocabulary.
    """
    symbols = symbols or {}
    text = expr.strip()
    if not text:
        raise LatticeError("empty class expression")
    total = DivisorClass.zero(surface.n)
    pos = 0
    first = True
    while pos < len(text):
        match = _TERM.match(text, pos)
        if match is None or match.end() == pos:
            raise LatticeError(f"cannot parse class expression {expr!r} at position {pos}")
        sign, coef, name = match.groups()
        if sign is None and not first:
            raise LatticeError(f"missing operator in {expr!r} at position {pos}")
        if coef is None and name is None:
            raise LatticeError(f"dangling operator in {expr!r}")
        k = int(coef) if coef is not None else 1
        if sign == "-":
            k = -k
        if name is None:
            if k != 0:
                raise LatticeError(f"bare integer {k} in class expression {expr!r}")
            term = DivisorClass.zero(surface.n)
        elif name in symbols:
            term = symbols[name]
            if term.n != surface.n:
                raise LatticeError(f"symbol {name} lives on a surface with {term.n} points")
        else:
            term = named_class(name, surface)
        total = total + k * term
        pos = match.end()
        first = False
    return total
