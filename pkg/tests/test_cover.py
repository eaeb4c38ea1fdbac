"""Building data: relations, smoothness, invariants, sub-covers and blow-ups."""

from __future__ import annotations

from itertools import product

import pytest

from bitriple.constructions import BUILTIN_NAMES, builtin
from bitriple.cover import (
    BRANCH_ORDER,
    CHARACTER_ORDER,
    GROUP,
    RELATIONS,
    BuildingDataZ3,
    BuildingDataZ32,
    Component,
    CoverError,
    CurveArrangement,
    SpecialPoint,
    ArrangementError,
    blow_up_point,
    blow_up_transport,
    check_smoothness,
    cover_section_h0,
    derive_reduced_relations,
    epsilon,
    extract_z3_subcover,
    intersection_points,
    iota,
    resolve_triple_point,
    triple_point_case,
    verify_building_data,
    z3_invariants,
    z32_invariants,
)
from bitriple.picard import BlowupSurface, DivisorClass, canonical_class, parse_class

from conftest import report_for

# rows L10, L01, L20, L02, L11, L22, L12, L21; columns D01, D02, D10, D20, D11, D22, D12, D21
PRINTED_TABLE = (
    (0, 0, 1, 2, 2, 1, 2, 1),
    (1, 2, 0, 0, 2, 1, 1, 2),
    (0, 0, 2, 1, 1, 2, 1, 2),
    (2, 1, 0, 0, 1, 2, 2, 1),
    (1, 2, 1, 2, 1, 2, 0, 0),
    (2, 1, 2, 1, 2, 1, 0, 0),
    (2, 1, 1, 2, 0, 0, 1, 2),
    (1, 2, 2, 1, 0, 0, 2, 1),
)


def _with_points(bd: BuildingDataZ32, *points: SpecialPoint) -> BuildingDataZ32:
    return BuildingDataZ32(bd.surface, bd.D, bd.L, CurveArrangement(points))


def _labels(bd: BuildingDataZ32, sigma) -> list[str]:
    return [c.label for c in bd.D[sigma]]


# -- group data and epsilon ---------------------------------------------------------------


def test_group_structure():
    subs = GROUP.subgroups
    assert len(subs) == 4
    for h in subs:
        sigma = min(h - {(0, 0)})
        nontrivial = [chi for chi in CHARACTER_ORDER if iota(chi, sigma) != 0]
        assert len(nontrivial) == 6
        assert len(GROUP.perp(h) - {(0, 0)}) == 2


@pytest.mark.parametrize("i, j, expected", [(1, 1, 0), (2, 2, 1), (1, 2, 1), (2, 1, 1)])
def test_epsilon_examples(i, j, expected):
    sigma = (0, 1)
    chi = {1: (0, 1), 2: (0, 2)}
    assert epsilon(chi[i], chi[j], sigma) == expected


def test_epsilon_errors():
    with pytest.raises(CoverError):
        epsilon((0, 1), (0, 1), (0, 1), psi=0)
    with pytest.raises(CoverError):
        epsilon((1, 0), (0, 1), (0, 1))


def test_epsilon_depends_only_on_the_generator_choice():
    # changing psi to its square swaps the roles of the exponents 1 and 2
    for sigma in BRANCH_ORDER:
        for chi, chi2 in product(CHARACTER_ORDER, repeat=2):
            if iota(chi, sigma) and iota(chi2, sigma):
                a = epsilon(chi, chi2, sigma, psi=1)
                b = epsilon(chi, chi2, sigma, psi=2)
                i1, j1 = ((chi[0] * sigma[0] + chi[1] * sigma[1]) % 3, (chi2[0] * sigma[0] + chi2[1] * sigma[1]) % 3)
                assert a == (0 if i1 + j1 < 3 else 1)
                assert b == (0 if (2 * i1) % 3 + (2 * j1) % 3 < 3 else 1)


# -- relation table -------------------------------------------------------------------------


def test_derived_table_matches_printed_table():
    table = derive_reduced_relations()
    derived = tuple(tuple(table[chi][s] for s in BRANCH_ORDER) for chi in CHARACTER_ORDER)
    assert derived == PRINTED_TABLE


def test_relation_row_examples():
    assert [RELATIONS[(1, 0)][s] for s in BRANCH_ORDER] == [0, 0, 1, 2, 2, 1, 2, 1]
    assert [RELATIONS[(0, 1)][s] for s in BRANCH_ORDER] == [1, 2, 0, 0, 2, 1, 1, 2]


def test_relation_coefficients_by_brute_force():
    # 3 L_chi = sum over the three pairs (chi^a, chi^b) of the epsilon-terms, recomputed directly
    for chi in CHARACTER_ORDER:
        chi2 = ((2 * chi[0]) % 3, (2 * chi[1]) % 3)
        for sigma in BRANCH_ORDER:
            if iota(chi, sigma) == 0:
                assert RELATIONS[chi][sigma] == 0
                continue
            coefficient = epsilon(chi, chi, sigma) + epsilon(chi, chi2, sigma)
            assert RELATIONS[chi][sigma] == coefficient
            # the two elements of one subgroup carry coefficients summing to 3
            other = ((2 * sigma[0]) % 3, (2 * sigma[1]) % 3)
            assert RELATIONS[chi][sigma] + RELATIONS[chi][other] == 3


# -- verification --------------------------------------------------------------------------


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_data_verifies(name):
    bd = report_for(name).resolved
    report = verify_building_data(bd)
    assert report.passed, report.failures()
    assert check_smoothness(bd) == []


def test_emptied_D12_breaks_rows():
    bd = builtin("main").building_data()
    D = dict(bd.D)
    D[(1, 2)] = ()
    broken = BuildingDataZ32(bd.surface, D, bd.L)
    failed = {c.name for c in verify_building_data(broken).failures()}
    assert {"relation 3L10", "relation 3L01"} <= failed


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_emptying_any_nonempty_D_breaks_a_row(name):
    bd = report_for(name).resolved
    for sigma in BRANCH_ORDER:
        if not bd.D[sigma]:
            continue
        D = dict(bd.D)
        D[sigma] = ()
        failed = [c.name for c in verify_building_data(BuildingDataZ32(bd.surface, D, bd.L)).failures()]
        assert any(n.startswith("relation") for n in failed), (name, sigma)


def test_trivial_L_and_repeated_components_reported():
    bd = builtin("main").building_data()
    L = dict(bd.L)
    L[(0, 1)] = DivisorClass.zero(3)
    failed = {c.name for c in verify_building_data(BuildingDataZ32(bd.surface, bd.D, L)).failures()}
    assert "L01 nontrivial" in failed
    D = dict(bd.D)
    D[(2, 2)] = D[(2, 2)] + (D[(0, 1)][0],)
    failed = {c.name for c in verify_building_data(BuildingDataZ32(bd.surface, D, bd.L)).failures()}
    assert "branch reduced" in failed


# -- smoothness ------------------------------------------------------------------------------


def test_main_is_smooth():
    assert check_smoothness(builtin("main").building_data()) == []


def test_triple_point_is_a_violation():
    bd = _with_points(builtin("main").building_data(), SpecialPoint("P", ("f12", "f23", "f33")))
    (v,) = check_smoothness(bd)
    assert v.point == "P"


def test_tangency_is_a_violation():
    bd = _with_points(builtin("main").building_data(), SpecialPoint("T", ("f11", "f21"), local=2))
    with pytest.raises(ArrangementError):
        check_smoothness(bd)  # two lines meet only once
    bd = _with_points(builtin("thm2").building_data(), SpecialPoint("T", ("h14", "f21"), local=1))
    assert check_smoothness(bd) == []


def test_merging_same_inertia_components_is_a_violation():
    # moving the D02 line into D01's pencil partner set: two lines with inertia <01> cross
    bd = builtin("main").building_data()
    D = dict(bd.D)
    D[(0, 1)] = D[(0, 1)] + (Component("g", parse_class("f2", bd.surface)),)
    D[(2, 2)] = D[(2, 2)][:2]
    merged = BuildingDataZ32(bd.surface, D, bd.L)
    reasons = [v.reason for v in check_smoothness(merged)]
    assert any("same inertia" in r for r in reasons)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_moving_a_component_to_its_partner_creates_a_violation(name):
    bd = report_for(name).resolved
    for s, t in ((BRANCH_ORDER[i], BRANCH_ORDER[i + 1]) for i in range(0, 8, 2)):
        if not bd.D[s] or not bd.D[t]:
            continue
        D = dict(bd.D)
        for comp in bd.D[s]:
            if any(comp.cls @ other.cls > 0 for other in bd.D[t]):
                D[s] = tuple(c for c in bd.D[s] if c != comp)
                D[t] = bd.D[t] + (comp,)
                break
        else:
            continue
        merged = BuildingDataZ32(bd.surface, D, bd.L, bd.arrangement)
        assert any("same inertia" in v.reason for v in check_smoothness(merged)), (name, s)


def test_point_on_three_components_with_general_crossings():
    bd = _with_points(builtin("main").building_data(), SpecialPoint("P", ("f12", "f21", "f31")))
    violations = check_smoothness(bd)
    assert [v.point for v in violations] == ["P"]


def test_declarations_beyond_lattice_rejected():
    bd = _with_points(
        builtin("main").building_data(),
        SpecialPoint("P", ("f21", "f31")),
        SpecialPoint("Q", ("f21", "f31")),
    )
    with pytest.raises(ArrangementError):
        check_smoothness(bd)


# -- triple points ----------------------------------------------------------------------------


def test_first_blow_up_only_leaves_same_inertia_violation():
    bd = _with_points(builtin("main").building_data(), SpecialPoint("P", ("f12", "f23", "f33")))
    once = blow_up_point(bd, "P")
    assert _labels(once, (0, 1)) == ["f11", "E4"]
    reasons = [v.reason for v in check_smoothness(once)]
    assert any("same inertia group <01>" in r for r in reasons)


def test_distinct_case_reproduces_first_variation():
    bd = _with_points(builtin("main").building_data(), SpecialPoint("P", ("f12", "f23", "f33")))
    assert triple_point_case(bd, "P") == "distinct"
    out = resolve_triple_point(bd, "P", "distinct")
    ref = builtin("var1-1").building_data()
    assert out.surface == ref.surface
    assert out.L == ref.L
    S = out.surface
    assert [c.cls for c in out.D[(0, 1)]] == [parse_class("f1", S), parse_class("eb4", S)]
    assert [c.cls for c in out.D[(0, 2)]] == [parse_class("h14", S)]
    assert out.D_class((2, 2)) == ref.D_class((2, 2))
    assert out.D_class((1, 2)) == ref.D_class((1, 2))
    assert check_smoothness(out) == []


def test_equal_case_reproduces_second_variation(oracle):
    bd = _with_points(builtin("main").building_data(), SpecialPoint("P", ("f11", "f23", "f33")))
    assert triple_point_case(bd, "P") == "equal"
    out = resolve_triple_point(bd, "P", "equal")
    ref = builtin("var2-0").building_data()
    assert out.surface == ref.surface and out.L == ref.L
    assert [c.cls for c in out.D[(0, 1)]] == [parse_class("h14", out.surface)]
    assert [c.cls for c in out.D[(0, 2)]] == [parse_class("f1", out.surface)]
    assert verify_building_data(out).passed
    assert check_smoothness(out) == []
    assert z32_invariants(out, oracle).K2 == 21


def test_distinct_case_changes_K2_by_minus_two(oracle):
    bd = builtin("main").building_data()
    before = z32_invariants(bd, oracle)
    out = resolve_triple_point(_with_points(bd, SpecialPoint("P", ("f12", "f23", "f33"))), "P", "distinct")
    after = z32_invariants(out, oracle)
    assert after.K2 - before.K2 == -2
    assert (after.pg, after.chi) == (before.pg, before.chi)


def test_triple_point_case_mismatch_and_bad_points():
    bd = _with_points(
        builtin("main").building_data(),
        SpecialPoint("P", ("f12", "f23", "f33")),
        SpecialPoint("Q", ("f21", "f22", "f31")),
    )
    with pytest.raises(CoverError):
        resolve_triple_point(bd, "P", "equal")
    with pytest.raises(CoverError):
        resolve_triple_point(bd, "Q", "distinct")  # two components share inertia
    with pytest.raises(CoverError):
        resolve_triple_point(bd, "R", "distinct")
    with pytest.raises(ValueError):
        resolve_triple_point(bd, "P", "sideways")


# -- invariants ---------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "name, expected", [("main", (30, 5, 6, 0)), ("var2-0", (21, 4, 5, 0)), ("thm2", (35, 6, 7, 0))]
)
def test_z32_invariants(name, expected, oracle):
    inv = z32_invariants(report_for(name).resolved, oracle)
    assert (inv.K2, inv.pg, inv.chi, inv.q) == expected
    assert inv.nef and inv.big


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_noether_type_identity(name, reports):
    X = reports[name].X
    assert X.chi == 1 - X.q + X.pg


@pytest.mark.parametrize("name, expected", [("main", (5, 6)), ("thm2", (6, 7)), ("var2-0", (4, 5))])
def test_z3_invariants_of_transported_data(name, expected, oracle):
    inv = z3_invariants(report_for(name).transported, oracle)
    assert (inv.pg, inv.chi) == expected


def test_z3_rejects_trivial_L_and_singular_branch(oracle):
    S = builtin("main").surface
    with pytest.raises(CoverError):
        BuildingDataZ3(S, (), (), DivisorClass.zero(3), DivisorClass.zero(3))
    sub = report_for("main").subcover
    with pytest.raises(CoverError):
        z3_invariants(sub, oracle)
    assert z3_invariants(sub, oracle, allow_singular=True).pg is None


# -- sub-covers and transport ------------------------------------------------------------------


@pytest.mark.parametrize("name", ["main", "thm2"])
def test_extraction_grouping(name):
    bd = report_for(name).resolved
    sub = extract_z3_subcover(bd, (1, 0))
    assert [c.label for c in sub.D1] == [c.label for s in ((0, 1), (2, 2), (1, 2)) for c in bd.D[s]]
    assert [c.label for c in sub.D2] == [c.label for c in bd.D[(0, 2)]]
    assert sub.L1 == bd.L[(0, 1)] and sub.L2 == bd.L[(0, 2)]


@pytest.mark.parametrize("name", BUILTIN_NAMES)
@pytest.mark.parametrize("gamma", [(1, 0), (0, 1), (1, 1), (1, 2)])
def test_extraction_satisfies_z3_relations(name, gamma):
    bd = report_for(name).resolved
    sub = extract_z3_subcover(bd, gamma)
    assert (3 * sub.L1 - sub.D1_class() - 2 * sub.D2_class()).is_zero()
    assert (3 * sub.L2 - 2 * sub.D1_class() - sub.D2_class()).is_zero()


@pytest.mark.parametrize("name, points, K2", [("main", 6, 8), ("thm2", 2, 11), ("var1-1", 4, 8), ("var2-0", 6, 5)])
def test_transport(name, points, K2):
    sub = report_for(name).subcover
    assert len(intersection_points(sub)) == points
    bar = blow_up_transport(sub)
    M = bar.descent_class()
    assert M.square() == 3 * K2
    assert bar.surface.n == sub.surface.n + points
    assert bar.D1_class() @ bar.D2_class() == 0


def test_transport_of_no_points_is_identity():
    sub = report_for("main").subcover
    assert blow_up_transport(sub, []) == sub


def test_main_descent_class_after_transport():
    bar = report_for("main").transported
    up = parse_class("f1 + 3f2 + 3f3", BlowupSurface.plane(3)).padded(bar.surface.n)
    for i in range(4, bar.surface.n + 1):
        up = up - DivisorClass.exceptional(i, bar.surface.n)
    assert up.square() == 24
    assert bar.descent_class() == up


@pytest.mark.parametrize("name, value", [("main", 4), ("var2-0", 3), ("thm2", 5)])
def test_cover_section_h0(name, value, oracle):
    rep = report_for(name)
    A = builtin(name).pullback.padded(rep.transported.surface.n)
    assert cover_section_h0(A, rep.transported, oracle) == value


def test_canonical_class_of_transport_base():
    bar = report_for("thm2").transported
    assert canonical_class(bar.surface).square() == 9 - bar.surface.n
