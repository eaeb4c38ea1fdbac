"""Building data of Z3 and Z3^2 covers of blow-ups of the plane.

Group elements and characters of ``G = Z3^2`` are pairs ``(a, b)`` of residues
mod 3.  The character ``chi = (j1, j2)`` takes ``sigma`` to ``zeta^(chi . sigma)``.
The branch divisor ``D_sigma`` is the one labelled by the cyclic subgroup
``<sigma>`` and the generator ``psi`` of its dual that restricts ``chi_sigma``
(the character with the same indices as ``sigma``), so ``psi(sigma) =
zeta^(sigma . sigma)``.

Branch divisors are lists of named :class:`Component` curves so that
incidences and double points can be counted one component pair at a time.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from bitriple.linsys import H0Oracle, is_nef_big, negative_curve_catalog
from bitriple.picard import (
    BlowupSurface,
    DivisorClass,
    LatticeError,
    canonical_class,
    intersect,
    named_class,
)

log = logging.getLogger(__name__)

Elem = tuple[int, int]

CHARACTER_ORDER: tuple[Elem, ...] = ((1, 0), (0, 1), (2, 0), (0, 2), (1, 1), (2, 2), (1, 2), (2, 1))
BRANCH_ORDER: tuple[Elem, ...] = ((0, 1), (0, 2), (1, 0), (2, 0), (1, 1), (2, 2), (1, 2), (2, 1))
NONTRIVIAL = tuple(sorted(CHARACTER_ORDER))


class CoverError(ValueError):
    """Building data that cannot define the requested cover."""


class ArrangementError(CoverError):
    """Declared incidences contradict the lattice intersection numbers."""


def tag(x: Elem) -> str:
    """``(1, 2) -> "12"``."""
    return f"{x[0]}{x[1]}"


def parse_tag(text: str) -> Elem:
    text = text.strip()
    if len(text) != 2 or any(ch not in "012" for ch in text):
        raise ValueError(f"not a Z3^2 index: {text!r}")
    elem = (int(text[0]), int(text[1]))
    if elem == (0, 0):
        raise ValueError("the trivial element has no branch divisor or L class")
    return elem


def pairing(chi: Elem, sigma: Elem) -> int:
    return (chi[0] * sigma[0] + chi[1] * sigma[1]) % 3


# -- the group -------------------------------------------------------------------


@dataclass(frozen=True)
class GroupData:
    """Elements, characters and cyclic subgroups of Z3^2."""

    elements: tuple[Elem, ...] = tuple((a, b) for a in range(3) for b in range(3))

    @property
    def characters(self) -> tuple[Elem, ...]:
        return self.elements

    @staticmethod
    def subgroup(sigma: Elem) -> frozenset[Elem]:
        """``<sigma>``; note ``<sigma> = <2 sigma>``."""
        return frozenset(((k * sigma[0]) % 3, (k * sigma[1]) % 3) for k in range(3))

    @property
    def subgroups(self) -> tuple[frozenset[Elem], ...]:
        seen: list[frozenset[Elem]] = []
        for s in NONTRIVIAL:
            h = self.subgroup(s)
            if h not in seen:
                seen.append(h)
        return tuple(seen)

    def generators(self, h: frozenset[Elem]) -> tuple[Elem, ...]:
        return tuple(sorted(s for s in h if s != (0, 0)))

    @staticmethod
    def perp(gamma: Iterable[Elem]) -> frozenset[Elem]:
        """Characters trivial on every element of ``gamma``."""
        gamma = list(gamma)
        return frozenset(
            (a, b) for a in range(3) for b in range(3) if all(pairing((a, b), g) == 0 for g in gamma)
        )


GROUP = GroupData()


def iota(chi: Elem, sigma: Elem) -> int:
    """Exponent ``i`` with ``chi|H = psi^i`` for the pair ``(H, psi)`` labelling ``D_sigma``."""
    return (pairing(chi, sigma) * pairing(sigma, sigma)) % 3


def _eps(i: int, j: int) -> int:
    return 0 if i + j < 3 else 1


def epsilon(chi: Elem, chi_prime: Elem, sigma: Elem, psi: int | None = None) -> int:
    """Coefficient of ``D_sigma`` in ``L_chi + L_chi' - L_chi chi'``.

    ``psi`` is the exponent ``k`` with ``psi(sigma) = zeta^k``; by default the
    generator used for ``D_sigma``.  Both characters must be nontrivial on
    ``<sigma>``.
    """
    if psi is None:
        psi = pairing(sigma, sigma)
    if psi % 3 == 0:
        raise CoverError(f"psi = zeta^{psi} does not generate the dual of <{tag(sigma)}>")
    inv = psi % 3  # 1 and 2 are their own inverses mod 3
    i = (pairing(chi, sigma) * inv) % 3
    j = (pairing(chi_prime, sigma) * inv) % 3
    if i == 0 or j == 0:
        raise CoverError("epsilon is only defined for characters nontrivial on the subgroup")
    return _eps(i, j)


def _double(chi: Elem) -> Elem:
    return ((2 * chi[0]) % 3, (2 * chi[1]) % 3)


def derive_reduced_relations() -> dict[Elem, dict[Elem, int]]:
    """Coefficient of ``D_sigma`` in ``3 L_chi`` for every nontrivial ``chi``.

    ``L_chi + L_chi = L_chi^2 + sum eps(chi, chi) D`` and
    ``L_chi + L_chi^2 = sum eps(chi, chi^2) D`` add up to
    ``3 L_chi = sum (eps(chi, chi) + eps(chi, chi^2)) D``.
    """
    table: dict[Elem, dict[Elem, int]] = {}
    for chi in CHARACTER_ORDER:
        row = {}
        chi2 = _double(chi)
        for sigma in BRANCH_ORDER:
            i, i2 = iota(chi, sigma), iota(chi2, sigma)
            row[sigma] = 0 if i == 0 else _eps(i, i) + _eps(i, i2)
        table[chi] = row
    return table


RELATIONS = derive_reduced_relations()


# -- components and incidences -----------------------------------------------------


@dataclass(frozen=True)
class Component:
    """A smooth irreducible branch curve with a unique label."""

    label: str
    cls: DivisorClass


@dataclass(frozen=True)
class SpecialPoint:
    """A declared point where several branch components meet.

    ``local`` is the local intersection multiplicity of every pair of
    components at the point; 1 means transverse.
    """

    name: str
    components: tuple[str, ...]
    local: int = 1

    @property
    def transverse(self) -> bool:
        return self.local == 1

    def pairs(self) -> list[tuple[str, str]]:
        return list(combinations(self.components, 2))


@dataclass(frozen=True)
class CurveArrangement:
    """Special points; every other intersection is simple and at a general point."""

    special_points: tuple[SpecialPoint, ...] = ()

    def declared(self, a: str, b: str) -> int:
        return sum(sp.local for sp in self.special_points if a in sp.components and b in sp.components)

    def without(self, name: str) -> "CurveArrangement":
        return CurveArrangement(tuple(sp for sp in self.special_points if sp.name != name))

    def point(self, name: str) -> SpecialPoint:
        for sp in self.special_points:
            if sp.name == name:
                return sp
        raise CoverError(f"no special point named {name!r}")

    def residuals(self, classes: Mapping[str, DivisorClass]) -> dict[tuple[str, str], int]:
        """Undeclared intersection number of every component pair."""
        for sp in self.special_points:
            for lab in sp.components:
                if lab not in classes:
                    raise ArrangementError(f"special point {sp.name} names unknown component {lab}")
            if len(set(sp.components)) != len(sp.components) or len(sp.components) < 2:
                raise ArrangementError(f"special point {sp.name} needs at least two distinct components")
            if sp.local < 1:
                raise ArrangementError(f"special point {sp.name}: local multiplicity must be positive")
        out = {}
        for a, b in combinations(classes, 2):
            res = intersect(classes[a], classes[b]) - self.declared(a, b)
            if res < 0:
                raise ArrangementError(
                    f"{a} and {b} meet {intersect(classes[a], classes[b])} times in the lattice "
                    f"but {self.declared(a, b)} is declared"
                )
            out[(a, b)] = res
        return out


# -- Z3^2 building data -------------------------------------------------------------


@dataclass(frozen=True)
class BuildingDataZ32:
    """Branch components per ``sigma`` and classes ``L_chi`` on a blown-up plane.

    The relations are not enforced here so that broken data can be reported;
    see :func:`verify_building_data`.
    """

    surface: BlowupSurface
    D: Mapping[Elem, tuple[Component, ...]]
    L: Mapping[Elem, DivisorClass]
    arrangement: CurveArrangement = field(default_factory=CurveArrangement)

    def __post_init__(self) -> None:
        D = {s: tuple(self.D.get(s, ())) for s in BRANCH_ORDER}
        extra = set(self.D) - set(BRANCH_ORDER)
        if extra:
            raise CoverError(f"unknown branch indices {sorted(extra)}")
        object.__setattr__(self, "D", D)
        if set(self.L) != set(CHARACTER_ORDER):
            missing = sorted(set(CHARACTER_ORDER) - set(self.L))
            raise CoverError(f"L classes missing for characters {[tag(c) for c in missing]}")
        object.__setattr__(self, "L", {c: self.L[c] for c in CHARACTER_ORDER})
        n = self.surface.n
        for comp in self.components():
            if comp.cls.n != n:
                raise LatticeError(f"component {comp.label} lives on a surface with {comp.cls.n} points")
        for chi, c in self.L.items():
            if c.n != n:
                raise LatticeError(f"L{tag(chi)} lives on a surface with {c.n} points")

    def components(self) -> list[Component]:
        return [c for s in BRANCH_ORDER for c in self.D[s]]

    def branch_of(self) -> dict[str, Elem]:
        return {c.label: s for s in BRANCH_ORDER for c in self.D[s]}

    def classes(self) -> dict[str, DivisorClass]:
        return {c.label: c.cls for c in self.components()}

    def D_class(self, sigma: Elem) -> DivisorClass:
        total = DivisorClass.zero(self.surface.n)
        for c in self.D[sigma]:
            total = total + c.cls
        return total

    def branch_class(self) -> DivisorClass:
        total = DivisorClass.zero(self.surface.n)
        for s in BRANCH_ORDER:
            total = total + self.D_class(s)
        return total


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CheckReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __bool__(self) -> bool:
        return self.passed


def reducedness_problems(components: Sequence[Component]) -> list[str]:
    """Why ``sum(components)`` fails to be a reduced divisor, if it does."""
    problems = []
    seen: dict[str, int] = {}
    for c in components:
        seen[c.label] = seen.get(c.label, 0) + 1
    problems += [f"component {lab} appears {k} times" for lab, k in seen.items() if k > 1]
    rigid: dict[DivisorClass, list[str]] = {}
    for c in components:
        if intersect(c.cls, c.cls) < 0:
            rigid.setdefault(c.cls, []).append(c.label)
    problems += [
        f"components {', '.join(labs)} are the same rigid curve {c}" for c, labs in rigid.items() if len(labs) > 1
    ]
    return problems


def relation_residual(bd: BuildingDataZ32, chi: Elem) -> DivisorClass:
    """``3 L_chi - sum_sigma c(chi, sigma) D_sigma``; zero when the relation holds."""
    rhs = DivisorClass.zero(bd.surface.n)
    for s, coef in RELATIONS[chi].items():
        rhs = rhs + coef * bd.D_class(s)
    return 3 * bd.L[chi] - rhs


def verify_building_data(bd: BuildingDataZ32) -> CheckReport:
    """Relation rows, reducedness of the branch divisor and nontriviality of every L."""
    report = CheckReport()
    for chi in CHARACTER_ORDER:
        res = relation_residual(bd, chi)
        report.add(f"relation 3L{tag(chi)}", res.is_zero(), "" if res.is_zero() else f"off by {res}")
    problems = reducedness_problems(bd.components())
    report.add("branch reduced", not problems, "; ".join(problems))
    for chi in CHARACTER_ORDER:
        trivial = bd.L[chi].is_zero()
        report.add(f"L{tag(chi)} nontrivial", not trivial, "trivial L class" if trivial else "")
    return report


@dataclass(frozen=True)
class Violation:
    point: str
    components: tuple[str, ...]
    reason: str


def _same_inertia(s: Elem, t: Elem) -> bool:
    return GROUP.subgroup(s) == GROUP.subgroup(t)


def check_smoothness(bd: BuildingDataZ32) -> list[Violation]:
    """Points of the branch locus above which the cover is singular."""
    where = bd.branch_of()
    residual = bd.arrangement.residuals(bd.classes())
    out = []
    for sp in bd.arrangement.special_points:
        if len(sp.components) >= 3:
            out.append(Violation(sp.name, sp.components, f"{len(sp.components)} branch components meet"))
            continue
        if not sp.transverse:
            out.append(Violation(sp.name, sp.components, f"tangency of order {sp.local}"))
            continue
        a, b = sp.components
        if _same_inertia(where[a], where[b]):
            out.append(Violation(sp.name, sp.components, f"same inertia group <{tag(where[a])}>"))
    for (a, b), res in residual.items():
        if res > 0 and _same_inertia(where[a], where[b]):
            out.append(
                Violation(f"{a}*{b}", (a, b), f"{res} general point(s) with the same inertia group <{tag(where[a])}>")
            )
    return out


# -- invariants -------------------------------------------------------------------


@dataclass(frozen=True)
class Invariants:
    """Numerical invariants of a cover, with the descent class ``M`` of ``3K``.

    ``pg``, ``chi`` and ``q`` are ``None`` when the cover is singular and the
    smooth-case formulas do not apply.
    """

    K2: int | Fraction
    pg: int | None
    chi: int | None
    q: int | None
    descent: DivisorClass
    h0_terms: Mapping[str, int] = field(default_factory=dict)
    nef: bool | None = None
    big: bool | None = None


def _half(x: int, what: str) -> int:
    if x % 2:
        raise CoverError(f"{what} is odd; the data cannot define a cover")
    return x // 2


def z32_invariants(bd: BuildingDataZ32, oracle: H0Oracle, nef_check: bool = True) -> Invariants:
    """Invariants of the smooth Z3^2-cover (the base is rational: ``p_g = q = 0``)."""
    S = bd.surface
    K = canonical_class(S)
    M = 3 * K + 2 * bd.branch_class()
    terms = {f"K+L{tag(chi)}": oracle.h0(K + L, S) for chi, L in bd.L.items()}
    pg = sum(terms.values())
    chi = 9 + _half(sum(intersect(L + K, L) for L in bd.L.values()), "sum of (L+K).L")
    nef = big = None
    if nef_check:
        cat = negative_curve_catalog(S, oracle.configuration(S))
        nef, big = is_nef_big(M, cat)
    return Invariants(intersect(M, M), pg, chi, 1 + pg - chi, M, terms, nef, big)


# -- Z3 building data ----------------------------------------------------------------


@dataclass(frozen=True)
class BuildingDataZ3:
    """``3 L1 = D1 + 2 D2`` and ``3 L2 = 2 D1 + D2``, checked on construction."""

    surface: BlowupSurface
    D1: tuple[Component, ...]
    D2: tuple[Component, ...]
    L1: DivisorClass
    L2: DivisorClass
    arrangement: CurveArrangement = field(default_factory=CurveArrangement)

    def __post_init__(self) -> None:
        object.__setattr__(self, "D1", tuple(self.D1))
        object.__setattr__(self, "D2", tuple(self.D2))
        if self.L1.is_zero() or self.L2.is_zero():
            raise CoverError("trivial L class")
        d1, d2 = self.D1_class(), self.D2_class()
        if not (3 * self.L1 - d1 - 2 * d2).is_zero():
            raise CoverError(f"3L1 != D1 + 2D2 (off by {3 * self.L1 - d1 - 2 * d2})")
        if not (3 * self.L2 - 2 * d1 - d2).is_zero():
            raise CoverError(f"3L2 != 2D1 + D2 (off by {3 * self.L2 - 2 * d1 - d2})")

    def _sum(self, comps: Sequence[Component]) -> DivisorClass:
        total = DivisorClass.zero(self.surface.n)
        for c in comps:
            total = total + c.cls
        return total

    def D1_class(self) -> DivisorClass:
        return self._sum(self.D1)

    def D2_class(self) -> DivisorClass:
        return self._sum(self.D2)

    def classes(self) -> dict[str, DivisorClass]:
        return {c.label: c.cls for c in self.D1 + self.D2}

    def descent_class(self) -> DivisorClass:
        return 3 * canonical_class(self.surface) + 2 * self.D1_class() + 2 * self.D2_class()


def z3_invariants(bd: BuildingDataZ3, oracle: H0Oracle, allow_singular: bool = False) -> Invariants:
    """Invariants of the Z3-cover; requires ``D1 . D2 = 0`` unless ``allow_singular``.

    With only double points inside each ``D_i`` the cover has ``A_2`` points,
    which do not change ``p_g``, ``chi`` or ``K^2`` of the minimal resolution.
    """
    S = bd.surface
    K = canonical_class(S)
    M = bd.descent_class()
    sq = intersect(M, M)
    K2: int | Fraction = sq // 3 if sq % 3 == 0 else Fraction(sq, 3)
    meet = intersect(bd.D1_class(), bd.D2_class())
    if meet != 0:
        if not allow_singular:
            raise CoverError(f"D1 and D2 meet ({meet} points); blow them up first or pass allow_singular")
        return Invariants(K2, None, None, None, M)
    terms = {"K+L1": oracle.h0(K + bd.L1, S), "K+L2": oracle.h0(K + bd.L2, S)}
    pg = sum(terms.values())
    chi = 3 + _half(intersect(bd.L1, K + bd.L1), "L1.(K+L1)") + _half(intersect(bd.L2, K + bd.L2), "L2.(K+L2)")
    return Invariants(K2, pg, chi, 1 + pg - chi, M, terms)


def quotient_character(gamma: Iterable[Elem]) -> Elem:
    """Lexicographically smallest nontrivial character trivial on ``gamma``."""
    perp = sorted(GROUP.perp(gamma) - {(0, 0)})
    if len(perp) != 2:
        raise CoverError("the subgroup must be cyclic of order 3")
    return perp[0]


def extract_z3_subcover(bd: BuildingDataZ32, gamma: Elem) -> BuildingDataZ3:
    """Building data of ``X / <gamma>`` as a Z3-cover of the same base.

    With ``chi0`` the chosen generator of the characters trivial on
    ``<gamma>``, ``L1 = L_chi0`` and ``L2 = L_chi0^2``; ``D_sigma`` joins
    ``D1`` or ``D2`` according to its coefficient 1 or 2 in ``3 L_chi0``
    (coefficient 0 means ``sigma`` lies in ``<gamma>``, no branching).
    """
    chi0 = quotient_character([gamma])
    row = RELATIONS[chi0]
    d1 = tuple(c for s in BRANCH_ORDER if row[s] == 1 for c in bd.D[s])
    d2 = tuple(c for s in BRANCH_ORDER if row[s] == 2 for c in bd.D[s])
    try:
        return BuildingDataZ3(bd.surface, d1, d2, bd.L[chi0], bd.L[_double(chi0)], bd.arrangement)
    except CoverError as exc:
        raise CoverError(f"sub-cover for <{tag(gamma)}> fails its relations: {exc}") from exc


# -- blowing up points of the branch locus ----------------------------------------------


def _exceptional_parent(c: DivisorClass, surface: BlowupSurface) -> int | None:
    if c.d != 0:
        return None
    for p in surface.proper_points():
        if c == named_class(f"eb{p}", surface):
            return p
    return None


def _line_points(c: DivisorClass, surface: BlowupSurface) -> set[int] | None:
    if c.d != 1:
        return None
    return {i for i in surface.proper_points() if c.m[i - 1] == 1}


def blow_up_at(
    surface: BlowupSurface, classes: Mapping[str, DivisorClass], through: Sequence[str]
) -> tuple[BlowupSurface, dict[str, DivisorClass]]:
    """Blow up a point lying on the named curves and nowhere else special.

    A point on the strict transform of an exceptional curve over ``P_p``
    becomes infinitely near ``p``, in the direction of a line through it when
    one is among the curves.  Any other point is a new proper point, collinear
    with the blown-up points of every line through it.  The curves in
    ``through`` pass to their strict transforms; all other classes are pulled
    back.
    """
    parent = None
    for lab in through:
        parent = _exceptional_parent(classes[lab], surface)
        if parent is not None:
            break
    if parent is not None:
        toward = None
        for lab in through:
            pts = _line_points(classes[lab], surface)
            if pts and parent in pts and len(pts) > 1:
                toward = min(pts - {parent})
                break
        new = surface.append_infinitely_near(parent, toward)
    else:
        lines = [pts for lab in through if (pts := _line_points(classes[lab], surface))]
        new = surface.append_proper(lines)
    e = DivisorClass.exceptional(new.n, new.n)
    out = {}
    for lab, c in classes.items():
        up = c.padded(new.n)
        out[lab] = up - e if lab in through else up
    return new, out


@dataclass(frozen=True)
class IntersectionPoint:
    """A point of ``D1 & D2``: a declared special point or a general crossing."""

    name: str
    components: tuple[str, ...]


def intersection_points(bd: BuildingDataZ3) -> list[IntersectionPoint]:
    classes = bd.classes()
    residual = bd.arrangement.residuals(classes)
    d1 = {c.label for c in bd.D1}
    d2 = {c.label for c in bd.D2}
    pts = []
    for sp in bd.arrangement.special_points:
        if d1 & set(sp.components) and d2 & set(sp.components):
            pts.append(IntersectionPoint(sp.name, sp.components))
    for a in bd.D1:
        for b in bd.D2:
            key = (a.label, b.label) if (a.label, b.label) in residual else (b.label, a.label)
            for k in range(residual[key]):
                pts.append(IntersectionPoint(f"{a.label}*{b.label}#{k + 1}", (a.label, b.label)))
    return pts


def blow_up_transport(bd: BuildingDataZ3, points: Sequence[IntersectionPoint] | None = None) -> BuildingDataZ3:
    """Blow up points of ``D1 & D2`` (all of them by default) and carry the data along.

    At a point on ``mu1`` components of ``D1`` and ``mu2`` of ``D2`` the new
    classes are ``L1 - k1 h`` and ``L2 - k2 h`` with ``3 k1 = mu1 + 2 mu2`` and
    ``3 k2 = 2 mu1 + mu2``.
    """
    if points is None:
        points = intersection_points(bd)
    surface = bd.surface
    classes = bd.classes()
    d1 = {c.label for c in bd.D1}
    d2 = {c.label for c in bd.D2}
    L1, L2 = bd.L1, bd.L2
    arrangement = bd.arrangement
    for pt in points:
        mu1 = sum(1 for lab in pt.components if lab in d1)
        mu2 = sum(1 for lab in pt.components if lab in d2)
        if (mu1 + 2 * mu2) % 3 or (2 * mu1 + mu2) % 3:
            raise CoverError(f"point {pt.name}: multiplicities ({mu1}, {mu2}) cannot be transported")
        surface, classes = blow_up_at(surface, classes, pt.components)
        e = DivisorClass.exceptional(surface.n, surface.n)
        L1 = L1.padded(surface.n) - ((mu1 + 2 * mu2) // 3) * e
        L2 = L2.padded(surface.n) - ((2 * mu1 + mu2) // 3) * e
        arrangement = arrangement.without(pt.name)
    D1 = tuple(Component(c.label, classes[c.label]) for c in bd.D1)
    D2 = tuple(Component(c.label, classes[c.label]) for c in bd.D2)
    try:
        return BuildingDataZ3(surface, D1, D2, L1, L2, arrangement)
    except CoverError as exc:
        raise CoverError(f"relations fail after transport: {exc}") from exc


# -- ordinary triple points ------------------------------------------------------------


def _rebuild(bd: BuildingDataZ32, surface, classes, L, extra=None, arrangement=None) -> BuildingDataZ32:
    D = {
        s: tuple(Component(c.label, classes[c.label]) for c in bd.D[s]) for s in BRANCH_ORDER
    }
    if extra is not None:
        s, comp = extra
        D[s] = D[s] + (comp,)
    return BuildingDataZ32(surface, D, L, arrangement if arrangement is not None else bd.arrangement)


def _assignment(bd: BuildingDataZ32, through: Sequence[str]) -> tuple[Elem | None, dict[Elem, int]]:
    """The unique ``sigma0`` (or ``None``) whose ``D`` must absorb the new exceptional curve."""
    where = bd.branch_of()
    mu = {s: 0 for s in BRANCH_ORDER}
    for lab in through:
        mu[where[lab]] += 1
    found = []
    for s0 in (None,) + BRANCH_ORDER:
        ks = {}
        for chi in CHARACTER_ORDER:
            total = sum(RELATIONS[chi][s] * mu[s] for s in BRANCH_ORDER)
            total -= RELATIONS[chi][s0] if s0 is not None else 0
            if total % 3:
                break
            ks[chi] = total // 3
        else:
            found.append((s0, ks))
    if not found:
        raise CoverError(f"no assignment of the exceptional curve restores the relations at {list(through)}")
    if len(found) > 1:
        raise CoverError(f"ambiguous exceptional assignment at {list(through)}: {[f[0] for f in found]}")
    return found[0]


def _blow_up_branch_point(
    bd: BuildingDataZ32, through: Sequence[str], label: str, arrangement: CurveArrangement
) -> tuple[BuildingDataZ32, Elem | None]:
    s0, ks = _assignment(bd, through)
    surface, classes = blow_up_at(bd.surface, bd.classes(), through)
    e = DivisorClass.exceptional(surface.n, surface.n)
    L = {chi: bd.L[chi].padded(surface.n) - ks[chi] * e for chi in CHARACTER_ORDER}
    extra = None
    if s0 is not None:
        extra = (s0, Component(label, e))
    return _rebuild(bd, surface, classes, L, extra, arrangement), s0


def blow_up_point(bd: BuildingDataZ32, point: str) -> BuildingDataZ32:
    """Blow up a special point once, adding the exceptional curve to the branch if the relations need it."""
    sp = bd.arrangement.point(point)
    label = f"E{bd.surface.n + 1}"
    out, _ = _blow_up_branch_point(bd, sp.components, label, bd.arrangement.without(point))
    return out


def triple_point_case(bd: BuildingDataZ32, point: str) -> str:
    """``"distinct"`` or ``"equal"`` from the coefficients of the three components in ``3 L01``."""
    where = bd.branch_of()
    sp = bd.arrangement.point(point)
    coefs = {RELATIONS[(0, 1)][where[lab]] for lab in sp.components}
    return "equal" if len(coefs) == 1 else "distinct"


def resolve_triple_point(bd: BuildingDataZ32, point: str, case: str) -> BuildingDataZ32:
    """Resolve an ordinary triple point of the branch locus.

    Blows up the point; when the exceptional curve must join some ``D_sigma0``
    it then also blows up its crossings with components of the same inertia.
    """
    if case not in ("distinct", "equal"):
        raise ValueError(f"unknown triple point case {case!r}")
    sp = bd.arrangement.point(point)
    where = bd.branch_of()
    if len(sp.components) != 3 or not sp.transverse:
        raise CoverError(f"{point} is not an ordinary triple point of three components")
    groups = {GROUP.subgroup(where[lab]) for lab in sp.components}
    if len(groups) != 3:
        raise CoverError(f"the components through {point} must have distinct inertia groups")
    actual = triple_point_case(bd, point)
    if actual != case:
        raise CoverError(f"{point} is declared {case} but its 3L01 coefficients are {actual}")
    label = f"E{bd.surface.n + 1}"
    out, s0 = _blow_up_branch_point(bd, sp.components, label, bd.arrangement.without(point))
    if s0 is not None:
        for lab in sp.components:
            if _same_inertia(where[lab], s0):
                out, s1 = _blow_up_branch_point(out, (label, lab), f"E{out.surface.n + 1}", out.arrangement)
                if s1 is not None:
                    raise CoverError(f"resolving {point} needs a further branch curve over {label}")
    rel = verify_building_data(out)
    if not rel.passed:
        raise CoverError(f"relations fail after resolving {point}: {rel.failures()[0].name}")
    pending = {sp.name for sp in out.arrangement.special_points}
    bad = [v for v in check_smoothness(out) if v.point not in pending]
    if bad:
        raise CoverError(f"resolving {point} leaves singular points: {[v.point for v in bad]}")
    return out


def cover_section_h0(A: DivisorClass, bd: BuildingDataZ3, oracle: H0Oracle) -> int:
    """``h^0`` of the pullback of ``A`` to the Z3-cover."""
    S = bd.surface
    return oracle.h0(A, S) + oracle.h0(A - bd.L1, S) + oracle.h0(A - bd.L2, S)
