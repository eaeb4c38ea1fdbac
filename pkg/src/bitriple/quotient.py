"""The Z3 quotient tower ``X -> X1 = X / Gamma -> Y``.

A double point of ``D1`` (or of ``D2``) gives an ``A_2`` point of ``X1``; a
crossing of ``D1`` with ``D2`` gives a ``1/3(1,1)`` point.  These counts tie the
invariants of ``X`` to those of the minimal resolution of ``X1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from bitriple.cover import (
    CHARACTER_ORDER,
    GROUP,
    BuildingDataZ3,
    BuildingDataZ32,
    CheckReport,
    CoverError,
    Invariants,
    cover_section_h0,
    tag,
)
from bitriple.linsys import H0Oracle, _is_prime
from bitriple.picard import DivisorClass, canonical_class, intersect


class NonNormalCrossingError(CoverError):
    """The branch locus has a point that is not an ordinary double point."""


class QuotientError(ValueError):
    """A quotient identity or a precondition of the canonical-map analysis fails."""


@dataclass(frozen=True)
class SingularityCensus:
    """Counts of ``A_2`` (``n``) and ``1/3(1,1)`` (``m``) points of ``X1``.

    ``provenance`` lists ``(kind, a, b, count)`` with ``kind`` one of
    ``"A2"`` or ``"1/3"`` for each component pair that contributes.
    """

    n: int
    m: int
    provenance: tuple[tuple[str, str, str, int], ...] = ()


def singularity_census(bd: BuildingDataZ3) -> SingularityCensus:
    for sp in bd.arrangement.special_points:
        if len(sp.components) > 2 or not sp.transverse:
            raise NonNormalCrossingError(
                f"special point {sp.name} on {', '.join(sp.components)} is not a normal crossing"
            )
    classes = bd.classes()
    bd.arrangement.residuals(classes)  # validates declarations against the lattice
    prov = []
    n = m = 0
    for part in (bd.D1, bd.D2):
        for a, b in combinations(part, 2):
            k = intersect(a.cls, b.cls)
            if k:
                prov.append(("A2", a.label, b.label, k))
                n += k
    for a in bd.D1:
        for b in bd.D2:
            k = intersect(a.cls, b.cls)
            if k:
                prov.append(("1/3", a.label, b.label, k))
                m += k
    return SingularityCensus(n, m, tuple(prov))


def quotient_crosscheck(census: SingularityCensus, inv_X: Invariants, inv_X1: Invariants) -> CheckReport:
    """Relations between ``X``, the census and the resolved quotient."""
    n, m = census.n, census.m
    report = CheckReport()
    report.add(
        "K2(X) = 3 K2(X1~) + m",
        inv_X.K2 == 3 * inv_X1.K2 + m,
        f"{inv_X.K2} vs 3*{inv_X1.K2} + {m}",
    )
    report.add("3 | 2n + m", (2 * n + m) % 3 == 0, f"2n + m = {2 * n + m}")
    report.add(
        "chi(X) = 3 chi(X1~) - (2n + m)/3",
        inv_X.chi is not None
        and inv_X1.chi is not None
        and inv_X.chi == 3 * inv_X1.chi - Fraction(2 * n + m, 3),
        f"{inv_X.chi} vs 3*{inv_X1.chi} - {2 * n + m}/3",
    )
    report.add(
        "2n + m = 6 chi(X1~)",
        inv_X1.chi is not None and 2 * n + m == 6 * inv_X1.chi,
        f"{2 * n + m} vs 6*{inv_X1.chi}",
    )
    return report


def base_point_count(pg_X: int, pg_X1tilde: int, m: int) -> int | None:
    """Base points of ``|K_X|`` forced by the ``1/3(1,1)`` points; ``None`` if undetermined."""
    return m if pg_X == pg_X1tilde else None


@dataclass(frozen=True)
class Factorization:
    subgroup: tuple[int, int]
    h0_values: dict[str, int]

    @property
    def holds(self) -> bool:
        return all(v == 0 for v in self.h0_values.values())

    def __bool__(self) -> bool:
        return self.holds


def factorization_check(bd: BuildingDataZ32, gamma: tuple[int, int], oracle: H0Oracle) -> Factorization:
    """``h^0(K + L_chi)`` for the nontrivial characters not trivial on ``<gamma>``."""
    perp = GROUP.perp([gamma])
    K = canonical_class(bd.surface)
    values = {
        f"K+L{tag(chi)}": oracle.h0(K + bd.L[chi], bd.surface) for chi in CHARACTER_ORDER if chi not in perp
    }
    return Factorization(gamma, values)


def torsion_check(K2_X1tilde: int, chi_X1tilde: int) -> bool:
    """True when an etale triple cover would break Noether's inequality."""
    return 3 * K2_X1tilde < 2 * (3 * chi_X1tilde) - 6


@dataclass(frozen=True)
class CanonicalReport:
    deg_phi: int
    deg_sigma: int
    base_points: int | None
    factorization_subgroup: tuple[int, int]
    birationality_assumed: bool
    prime_degree: bool = False
    assumptions: tuple[str, ...] = ()


def canonical_report(
    inv_X1tilde: Invariants,
    census: SingularityCensus,
    factorization: Factorization,
    bpf_and_birational: bool = True,
    base_points: int | None = None,
) -> CanonicalReport:
    """Degree bookkeeping for ``phi_K(X) = phi_K(X1~) o (X -> X1)``."""
    if not factorization:
        raise QuotientError(f"canonical map does not factor through <{tag(factorization.subgroup)}>")
    K2 = int(inv_X1tilde.K2)
    assumptions = []
    if bpf_and_birational:
        assumptions.append("canonical system of the resolved quotient is base point free")
        assumptions.append("canonical map of the resolved quotient is birational")
    prime = _is_prime(K2) and inv_X1tilde.pg is not None and K2 >= inv_X1tilde.pg - 2
    return CanonicalReport(
        deg_phi=3,
        deg_sigma=K2,
        base_points=base_points,
        factorization_subgroup=factorization.subgroup,
        birationality_assumed=bpf_and_birational,
        prime_degree=prime,
        assumptions=tuple(assumptions),
    )


@dataclass(frozen=True)
class ThetaCheck:
    residue: DivisorClass
    summand: DivisorClass
    section_h0: int
    decomposition: bool
    residue_square: int
    residue_dot_descent: int
    pg: int

    @property
    def passed(self) -> bool:
        return (
            self.decomposition
            and self.residue_square == -6
            and self.residue_dot_descent == 0
            and self.section_h0 != self.pg
        )


def theta_check(bd: BuildingDataZ3, A: DivisorClass, pg: int, oracle: H0Oracle) -> ThetaCheck:
    """Lattice shadow of ``K = theta + pullback(A)`` with ``theta`` a (-2)-curve over ``D2``.

    ``3K`` descends to ``M``; ``theta`` is the reduced pullback of the branch
    curve ``R = D2``, so ``M = R + 3A``, ``R^2 = -6`` and ``R . M = 0``.
    """
    R = bd.D2_class()
    M = bd.descent_class()
    return ThetaCheck(
        residue=R,
        summand=A,
        section_h0=cover_section_h0(A, bd, oracle),
        decomposition=(M - 3 * A) == R,
        residue_square=intersect(R, R),
        residue_dot_descent=intersect(R, M),
        pg=pg,
    )
