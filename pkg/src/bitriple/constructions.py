"""The eight built-in constructions and the verification pipeline.

Each construction is a :class:`ConstructionSpec`: a blown-up plane, branch
components per ``sigma``, classes ``L_chi``, and optionally ordinary triple
points imposed on the branch locus.  :func:`run_pipeline` resolves the triple
points, checks the building data and smoothness, computes the invariants of
the Z3^2-cover ``X`` and of the resolved quotient ``X1~ = X / Gamma``, and
assembles the table row ``(K^2, p_g, q, deg Sigma, base points)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from bitriple.cover import (
    BRANCH_ORDER,
    CHARACTER_ORDER,
    BuildingDataZ3,
    BuildingDataZ32,
    Check,
    Component,
    CoverError,
    CurveArrangement,
    Elem,
    Invariants,
    SpecialPoint,
    blow_up_transport,
    check_smoothness,
    extract_z3_subcover,
    reducedness_problems,
    resolve_triple_point,
    tag,
    verify_building_data,
    z3_invariants,
    z32_invariants,
)
from bitriple.linsys import DEFAULT_PRIME, H0Oracle
from bitriple.picard import BlowupSurface, DivisorClass, parse_class
from bitriple.quotient import (
    CanonicalReport,
    Factorization,
    SingularityCensus,
    ThetaCheck,
    base_point_count,
    canonical_report,
    factorization_check,
    quotient_crosscheck,
    singularity_census,
    theta_check,
    torsion_check,
)

log = logging.getLogger(__name__)


class SpecError(ValueError):
    """A construction spec that is not self-consistent."""


@dataclass(frozen=True)
class TriplePoint:
    name: str
    components: tuple[str, str, str]
    case: str


@dataclass(frozen=True)
class TableRow:
    K2: int
    pg: int
    q: int
    deg_sigma: int
    base_points: int | None

    def as_tuple(self) -> tuple:
        return (self.K2, self.pg, self.q, self.deg_sigma, self.base_points)


@dataclass(frozen=True)
class Expected:
    """Target values carried for comparison only; the pipeline never reads them."""

    row: TableRow
    census: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        values = [v for v in self.row.as_tuple() if v is not None] + list(self.census or ())
        if any(v < 0 for v in values):
            raise SpecError("expected values must be nonnegative")


@dataclass(frozen=True)
class ConstructionSpec:
    name: str
    surface: BlowupSurface
    branch: Mapping[Elem, tuple[Component, ...]]
    L: Mapping[Elem, DivisorClass]
    special_points: tuple[SpecialPoint, ...] = ()
    triple_points: tuple[TriplePoint, ...] = ()
    subgroup: Elem = (1, 0)
    pullback: DivisorClass | None = None
    trials: int = 5
    prime: int = DEFAULT_PRIME
    seed: int = 0
    expected: Expected | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "branch", {s: tuple(self.branch.get(s, ())) for s in BRANCH_ORDER})
        object.__setattr__(self, "special_points", tuple(self.special_points))
        object.__setattr__(self, "triple_points", tuple(self.triple_points))
        for chi in CHARACTER_ORDER:
            if chi not in self.L:
                raise SpecError(f"missing class L{tag(chi)}")
            if self.L[chi].is_zero():
                raise SpecError(f"trivial L class: L{tag(chi)} = 0")
        comps = [c for s in BRANCH_ORDER for c in self.branch[s]]
        problems = reducedness_problems(comps)
        if problems:
            raise SpecError(f"branch not reduced: {problems[0]}")
        labels = {c.label for c in comps}
        for pt in list(self.special_points) + list(self.triple_points):
            unknown = [lab for lab in pt.components if lab not in labels]
            if unknown:
                raise SpecError(f"point {pt.name} names unknown components {unknown}")
        for tp in self.triple_points:
            if len(tp.components) != 3:
                raise SpecError(f"triple point {tp.name} needs exactly three components")
            if tp.case not in ("distinct", "equal"):
                raise SpecError(f"triple point {tp.name}: case must be 'distinct' or 'equal'")
        if self.trials < 1:
            raise SpecError("trials must be at least 1")

    def building_data(self) -> BuildingDataZ32:
        """Data before the imposed triple points are resolved."""
        points = self.special_points + tuple(SpecialPoint(tp.name, tuple(tp.components)) for tp in self.triple_points)
        return BuildingDataZ32(self.surface, self.branch, self.L, CurveArrangement(points))

    def oracle(self, seed: int | None = None, trials: int | None = None, prime: int | None = None) -> H0Oracle:
        return H0Oracle(
            prime=self.prime if prime is None else prime,
            seed=self.seed if seed is None else seed,
            trials=self.trials if trials is None else trials,
        )


# -- built-ins --------------------------------------------------------------------------


def _comps(surface: BlowupSurface, curves=(), pencils: Mapping[int, tuple[int, ...]] | None = None):
    """Named curves, then pencil members ``f<p><k>`` in the class of ``f<p>``."""
    out = [Component(name, parse_class(name, surface)) for name in curves]
    for p, ks in (pencils or {}).items():
        out += [Component(f"f{p}{k}", parse_class(f"f{p}", surface)) for k in ks]
    return tuple(out)


def _L(surface: BlowupSurface, exprs: Mapping[str, str]) -> dict[Elem, DivisorClass]:
    return {(int(k[0]), int(k[1])): parse_class(v, surface) for k, v in exprs.items()}


def _row(*values, census=None) -> Expected:
    return Expected(TableRow(*values), census)


def _main() -> ConstructionSpec:
    S = BlowupSurface.plane(3)
    branch = {
        (0, 1): _comps(S, pencils={1: (1,)}),
        (0, 2): _comps(S, pencils={1: (2,)}),
        (2, 2): _comps(S, pencils={2: (1, 2, 3)}),
        (1, 2): _comps(S, pencils={3: (1, 2, 3)}),
    }
    L = _L(S, {
        "10": "f2 + 2f3", "01": "f1 + f2 + f3", "20": "2f2 + f3", "02": "f1 + 2f2 + 2f3",
        "11": "f1 + 2f2", "22": "f1 + f2", "12": "f1 + f3", "21": "f1 + 2f3",
    })
    return ConstructionSpec(
        "main", S, branch, L, pullback=parse_class("f2 + f3", S), expected=_row(30, 5, 0, 8, 6, census=(15, 6))
    )


def _var1(extra: int) -> ConstructionSpec:
    S = BlowupSurface.plane(5, infinitely_near={5: (4, 1)})
    branch = {
        (0, 1): _comps(S, ["eb4"], {1: (1,)}),
        (0, 2): _comps(S, ["h14"]),
        (2, 2): _comps(S, ["h24"], {2: (1, 2)}),
        (1, 2): _comps(S, ["h34"], {3: (1, 2)}),
    }
    L = _L(S, {
        "10": "f2 + 2f3 - eb4 - e5", "01": "f1 + f2 + f3 - eb4 - 2e5",
        "20": "2f2 + f3 - eb4 - e5", "02": "f1 + 2f2 + 2f3 - eb4 - 2e5",
        "11": "f1 + 2f2 - eb4 - 2e5", "22": "f1 + f2 - e5",
        "12": "f1 + f3 - e5", "21": "f1 + 2f3 - eb4 - 2e5",
    })
    triples = tuple(TriplePoint(f"T{k}", ("h14", f"f2{k}", f"f3{k}"), "distinct") for k in range(1, extra + 1))
    rows = {0: (28, 5, 0, 8, 4, (16, 4)), 1: (26, 5, 0, 8, 2, (17, 2)), 2: (24, 5, 0, 8, 0, (18, 0))}
    *vals, census = rows[extra]
    notes = ()
    if extra:
        notes = ("layout of the additional triple points is a reconstruction: general points of h14",)
    return ConstructionSpec(
        f"var1-{extra + 1}", S, branch, L, triple_points=triples,
        pullback=parse_class("f2 + f3", S), expected=_row(*vals, census=census), notes=notes,
    )


def _var2(extra: int) -> ConstructionSpec:
    S = BlowupSurface.plane(4)
    branch = {
        (0, 1): _comps(S, ["h14"]),
        (0, 2): _comps(S, pencils={1: (1,)}),
        (2, 2): _comps(S, ["h24"], {2: (1, 2)}),
        (1, 2): _comps(S, ["h34"], {3: (1, 2)}),
    }
    L = _L(S, {
        "10": "f2 + 2f3 - e4", "01": "f1 + f2 + f3 - e4", "20": "2f2 + f3 - e4", "02": "f1 + 2f2 + 2f3 - 2e4",
        "11": "f1 + 2f2 - e4", "22": "f1 + f2 - e4", "12": "f1 + f3 - e4", "21": "f1 + 2f3 - e4",
    })
    triples = tuple(TriplePoint(f"T{k}", ("f11", f"f2{k}", f"f3{k}"), "distinct") for k in range(1, extra + 1))
    rows = {0: (21, 4, 0, 5, 6, (12, 6)), 1: (19, 4, 0, 5, 4, (13, 4)), 2: (17, 4, 0, 5, 2, (14, 2))}
    *vals, census = rows[extra]
    notes = ()
    if extra:
        notes = ("layout of the additional triple points is a reconstruction: general points of f11",)
    return ConstructionSpec(
        f"var2-{extra}", S, branch, L, triple_points=triples,
        pullback=parse_class("2l - e2 - e3 - e4", S), expected=_row(*vals, census=census), notes=notes,
    )


def _thm2() -> ConstructionSpec:
    S = BlowupSurface.plane(6, collinear=[{2, 3, 4, 5, 6}])
    branch = {
        (0, 1): _comps(S, ["h14", "h15", "h16"]),
        (0, 2): _comps(S, ["h23456"]),
        (2, 2): _comps(S, ["e3"], {2: (1, 2)}),
        (1, 2): _comps(S, ["e2"], {3: (1, 2)}),
    }
    L = _L(S, {
        "10": "f3 + l", "01": "f1 + f2 + f3 - e4 - e5 - e6", "20": "f2 + l",
        "02": "2f1 + f2 + f3 + f4 - e5 - e6", "11": "f1 + 2f2 - e4 - e5 - e6",
        "22": "2f1 + f2 - e4 - e5 - e6", "12": "2f1 + f3 - e4 - e5 - e6", "21": "f1 + 2f3 - e4 - e5 - e6",
    })
    return ConstructionSpec(
        "thm2", S, branch, L, pullback=parse_class("l + f1", S), expected=_row(35, 6, 0, 11, 2, census=(20, 2))
    )


_BUILDERS = {
    "main": _main,
    "var1-1": lambda: _var1(0),
    "var1-2": lambda: _var1(1),
    "var1-3": lambda: _var1(2),
    "var2-0": lambda: _var2(0),
    "var2-1": lambda: _var2(1),
    "var2-2": lambda: _var2(2),
    "thm2": _thm2,
}
BUILTIN_NAMES = tuple(_BUILDERS)
FIRST_TABLE = BUILTIN_NAMES[:7]
SECOND_TABLE = BUILTIN_NAMES[7:]


def builtin(name: str) -> ConstructionSpec:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown construction {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None


# -- pipeline -------------------------------------------------------------------------------


@dataclass
class ConstructionReport:
    name: str
    checks: list[Check] = field(default_factory=list)
    resolved: BuildingDataZ32 | None = None
    X: Invariants | None = None
    factorization: Factorization | None = None
    subcover: BuildingDataZ3 | None = None
    census: SingularityCensus | None = None
    transported: BuildingDataZ3 | None = None
    X1: Invariants | None = None
    base_points: int | None = None
    canonical: CanonicalReport | None = None
    theta: ThetaCheck | None = None
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def row(self) -> TableRow | None:
        if self.X is None or self.canonical is None:
            return None
        return TableRow(self.X.K2, self.X.pg, self.X.q, self.canonical.deg_sigma, self.base_points)

    @property
    def assumptions(self) -> tuple[str, ...]:
        return self.canonical.assumptions if self.canonical else ()


class PipelineFailure(RuntimeError):
    def __init__(self, stage: str, message: str, report: ConstructionReport):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message
        self.report = report


def run_pipeline(spec: ConstructionSpec, oracle: H0Oracle | None = None) -> ConstructionReport:
    """Run every stage; a failed hard check raises :class:`PipelineFailure`."""
    oracle = oracle or spec.oracle()
    report = ConstructionReport(spec.name, notes=spec.notes)

    def fail(stage: str, message: str):
        report.checks.append(Check(stage, False, message))
        raise PipelineFailure(stage, message, report)

    def record(stage: str, ok: bool, detail: str = "") -> None:
        if not ok:
            fail(stage, detail)
        report.checks.append(Check(stage, True, detail))

    bd = spec.building_data()
    for tp in spec.triple_points:
        try:
            bd = resolve_triple_point(bd, tp.name, tp.case)
        except CoverError as exc:
            fail(f"triple point {tp.name}", str(exc))
        record(f"triple point {tp.name}", True, f"resolved ({tp.case} coefficients)")
    report.resolved = bd

    verdict = verify_building_data(bd)
    for c in verdict.checks:
        report.checks.append(c)
    if not verdict.passed:
        failed = verdict.failures()
        raise PipelineFailure(
            "building data", "; ".join(f"{c.name} failed {c.detail}".strip() for c in failed), report
        )

    try:
        violations = check_smoothness(bd)
    except CoverError as exc:
        fail("smoothness", str(exc))
    record("smoothness", not violations, "; ".join(f"{v.point}: {v.reason}" for v in violations))

    report.X = X = z32_invariants(bd, oracle)
    record("descent class nef and big", bool(X.nef and X.big), f"M = {X.descent}, M^2 = {X.K2}")
    record("chi = 1 - q + p_g", X.chi == 1 - X.q + X.pg)

    fac = factorization_check(bd, spec.subgroup, oracle)
    report.factorization = fac
    record(
        f"factorization through <{tag(spec.subgroup)}>",
        fac.holds,
        ", ".join(f"h0({k}) = {v}" for k, v in fac.h0_values.items()),
    )

    try:
        z3 = extract_z3_subcover(bd, spec.subgroup)
        report.subcover = z3
        report.census = census = singularity_census(z3)
        report.transported = bar = blow_up_transport(z3)
        report.X1 = X1 = z3_invariants(bar, oracle)
    except CoverError as exc:
        fail("quotient", str(exc))
    record("sub-cover relations", True)
    record("census", True, f"n = {census.n}, m = {census.m}")

    cross = quotient_crosscheck(census, X, X1)
    for c in cross.checks:
        record(c.name, c.passed, c.detail)
    record("no 3-torsion (Noether)", torsion_check(X1.K2, X1.chi), f"K2 = {X1.K2}, chi = {X1.chi}")

    report.base_points = base_point_count(X.pg, X1.pg, census.m)
    record("base points determined", report.base_points is not None, f"p_g(X) = {X.pg}, p_g(X1~) = {X1.pg}")

    report.canonical = canonical_report(X1, census, fac, True, report.base_points)
    if spec.pullback is not None:
        A = spec.pullback.padded(bar.surface.n)
        report.theta = th = theta_check(bar, A, X1.pg, oracle)
        record(
            "canonical decomposition",
            th.passed,
            f"R = {th.residue}, R^2 = {th.residue_square}, R.M = {th.residue_dot_descent}, "
            f"h0(pullback) = {th.section_h0} vs p_g = {th.pg}",
        )
    return report


def theorem_tables(oracle_options: Mapping | None = None) -> tuple[list[ConstructionReport], list[ConstructionReport]]:
    """Reports for the rows of the two tables, in order."""
    opts = dict(oracle_options or {})
    first = [run_pipeline(builtin(n), builtin(n).oracle(**opts)) for n in FIRST_TABLE]
    second = [run_pipeline(builtin(n), builtin(n).oracle(**opts)) for n in SECOND_TABLE]
    return first, second
