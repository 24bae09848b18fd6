import pytest

from welschinger.lattice import HClass, PROJECTIVE_PLANE, Surface, intersect
from welschinger.splitting import (E_INF, E_ZERO, FIBER, RULED_C1, ConjExceptionalCut,
                                   ConjPairCut, ContextError, ExceptionalCut, PlaneRelativeLine,
                                   RealPointCut, RuledClass, RuledRelativeSection,
                                   TwoSpheresRelative, _system_analytic,
                                   brute_force_degenerations, classify, derive_wall_crossing,
                                   feasible_degenerations, flip_mass_shift)
from welschinger.tangency import TangencyVec, validate_contact

D = TangencyVec.delta
CP2 = Surface(PROJECTIVE_PLANE)
CUBIC = HClass(CP2, (3,))


def cut_class(c):
    """3H - E1 - ... - E_r with c1-degree c."""
    r = 9 - c
    s = Surface(PROJECTIVE_PLANE, r, 0)
    return HClass(s, (3,), (1,) * r)


def contexts(d):
    c = d.c1_dot()
    out = [RealPointCut(d, 0), RealPointCut(d, 1), ExceptionalCut(d, 0), ExceptionalCut(d, 1),
           ExceptionalCut(d, 2), ExceptionalCut(d, 2, "conjugated"), ConjPairCut(d, 0),
           ConjExceptionalCut(d, 0), ConjExceptionalCut(d, 1)]
    if c >= 4:
        out += [RealPointCut(d, 2), RealPointCut(d, 2, "conjugated")]
    if c >= 4:
        out.append(ConjPairCut(d, 1))
    return out


def test_ruled_pairing():
    assert E_INF.dot(E_INF) == 1 and E_ZERO.dot(E_ZERO) == -1 and FIBER.dot(FIBER) == 0
    assert FIBER.dot(E_ZERO) == FIBER.dot(E_INF) == 1 and E_ZERO.dot(E_INF) == 0
    assert RULED_C1 == RuledClass(1, 2)
    assert FIBER.c1_dot() == 2 and E_INF.c1_dot() == 3 and E_ZERO.c1_dot() == 1
    assert str(FIBER) == "F" and str(RuledClass(2, 1)) == "2F + E_inf"


def test_feasible_examples():
    assert feasible_degenerations(RealPointCut(CUBIC, 0)) == [(1, 0, 0)]
    assert feasible_degenerations(RealPointCut(CUBIC, 1)) == [(1, 0, 1)]
    for c in range(4, 10):
        assert feasible_degenerations(RealPointCut(cut_class(c), 2)) == [(1, 0, 1), (1, 0, 2)]
    unrefined = RealPointCut(CUBIC, 2).feasible(refine=False)
    # every two-component limit with b = 1 needs the forced point to be excluded
    assert set(unrefined) - set(RealPointCut(CUBIC, 2).feasible()) == {(2, k, 1) for k in range(3)}
    assert feasible_degenerations(PlaneRelativeLine()) == [(1, 1, 0)]
    assert feasible_degenerations(RuledRelativeSection()) == [(1, 0, 1, 0)]


def test_covering_branch_at_degree_four():
    # one doubly covered component with c1.d = 4 and one plane point
    c, required = 4, 4 - 2
    assert not any(_system_analytic(1, 1, c - b, required) for b in range(0, 7))
    assert _system_analytic(1, 1, c + 2, required)  # b = -2 is the boundary


@pytest.mark.parametrize("c", range(4, 10))
def test_brute_force_agrees(c):
    d = cut_class(c)
    x = d.surface.blow_up(0, 0)
    for ctx in contexts(d):
        assert brute_force_degenerations(ctx) == feasible_degenerations(ctx), ctx
    two = Surface(PROJECTIVE_PLANE, 2, 0)
    ts = TwoSpheresRelative(HClass(two, (3,), (1, 1)), HClass.exceptional(two, 0),
                            HClass.exceptional(two, 1))
    assert brute_force_degenerations(ts) == feasible_degenerations(ts) == [(1, 0, 0, 0)]
    for lemma in (PlaneRelativeLine(), RuledRelativeSection()):
        assert brute_force_degenerations(lemma) == feasible_degenerations(lemma)
    assert x == d.surface


def test_real_point_cut_solutions():
    (n0,) = classify(RealPointCut(CUBIC, 0))
    assert n0.plus_classes == () and str(n0.minus_class) == "3H"
    assert not n0.alpha and not n0.beta and (n0.multiplicity, n0.mass_shift) == (1, 0)
    (n1,) = classify(RealPointCut(CUBIC, 1))
    assert [str(c) for c in n1.plus_classes] == ["H"] and str(n1.minus_class) == "3H - E1"
    assert n1.beta == D(1, 1, "r") and not n1.alpha and (n1.multiplicity, n1.mass_shift) == (1, 0)


@pytest.mark.parametrize("points, beta, shift", [("real", D(1, 2, "r"), 0),
                                                  ("conjugated", D(1, 2, "c"), 1)])
def test_two_plane_points(points, beta, shift):
    one, two = classify(RealPointCut(CUBIC, 2, points))
    assert [str(c) for c in one.plus_classes] == ["H"] and str(one.minus_class) == "3H - E1"
    assert one.alpha == D(1, 1, "r") and not one.beta
    assert (one.multiplicity, one.mass_shift) == (1, 0)
    assert [str(c) for c in two.plus_classes] == ["H", "H"]
    assert str(two.minus_class) == "3H - 2E1"
    assert two.beta == beta and not two.alpha
    assert (two.multiplicity, two.mass_shift) == (2, shift)
    assert two.plus_points in ((("p1",), ("p2",)), (("p2",), ("p1",)))


def test_exceptional_cuts():
    expected = {0: ([], "3H", TangencyVec()), 1: (["F"], "3H - E1", D(1, 1, "r")),
                2: (["F", "F"], "3H - 2E1", D(1, 2, "r"))}
    for j, (plus, minus, beta) in expected.items():
        (sol,) = classify(ExceptionalCut(CUBIC, j))
        assert [str(c) for c in sol.plus_classes] == plus and str(sol.minus_class) == minus
        assert sol.beta == beta and not sol.alpha
        assert (sol.multiplicity, sol.mass_shift) == (1, 0)
    (conj,) = classify(ExceptionalCut(CUBIC, 2, "conjugated"))
    assert conj.beta == D(1, 2, "c") and (conj.multiplicity, conj.mass_shift) == (1, 0)


def test_conjugated_pair_contexts():
    (empty,) = classify(ConjPairCut(CUBIC, 0))
    assert empty.plus_classes == () and str(empty.minus_class) == "3H"
    (one,) = classify(ConjPairCut(CUBIC, 1))
    assert [str(c) for c in one.plus_classes] == ["H", "H"]
    assert str(one.minus_class) == "3H - (E'1+E''1)"
    assert one.beta == D(1, 2, "c") and (one.multiplicity, one.mass_shift) == (1, 0)
    per = D(1, 1, "c", paired=False)
    assert [b for _, b in one.per_divisor] == [per, per]
    (fib,) = classify(ConjExceptionalCut(CUBIC, 1))
    assert [str(c) for c in fib.plus_classes] == ["F", "F"] and fib.beta == D(1, 2, "c")
    (none,) = classify(ConjExceptionalCut(CUBIC, 0))
    assert none.plus_classes == ()


def test_lemma_contexts():
    (line,) = classify(PlaneRelativeLine())
    assert str(line.minus_class) == "H" and line.alpha == D(1) and not line.beta
    (fiber,) = classify(RuledRelativeSection())
    assert fiber.minus_class == FIBER and fiber.alpha == D(1) and not fiber.beta
    two = Surface(PROJECTIVE_PLANE, 2, 0)
    (ts,) = classify(TwoSpheresRelative(HClass(two, (3,), (1, 1)), HClass.exceptional(two, 0),
                                        HClass.exceptional(two, 1)))
    assert ts.plus_classes == () and not ts.alpha


def test_solution_counts():
    counts = [len(classify(ctx)) for ctx in (
        RealPointCut(CUBIC, 0), RealPointCut(CUBIC, 1), RealPointCut(CUBIC, 2),
        ExceptionalCut(CUBIC, 0), ExceptionalCut(CUBIC, 1), ExceptionalCut(CUBIC, 2),
        PlaneRelativeLine(), RuledRelativeSection())]
    assert counts == [1, 1, 2, 1, 1, 1, 1, 1]


@pytest.mark.parametrize("c", range(4, 10))
def test_contact_and_matching_invariants(c):
    d = cut_class(c)
    for ctx in contexts(d):
        for sol in classify(ctx):
            validate_contact(sol.minus_class, sol.divisor, sol.alpha, sol.beta)
            v_minus = intersect(sol.minus_class, sol.divisor)
            ruled = isinstance(ctx, (ExceptionalCut, ConjExceptionalCut))
            v_plus = sum(p.dot(E_INF) if ruled else p.base[0] for p in sol.plus_classes)
            assert v_plus == v_minus
            assert sol.multiplicity >= 1 and sol.mass_shift in (0, 1)


def test_context_errors():
    with pytest.raises(ContextError):
        RealPointCut(HClass(CP2, (1,)), 2)
    with pytest.raises(ContextError):
        RealPointCut(CUBIC, 1, "conjugated")
    with pytest.raises(ContextError):
        RealPointCut(CUBIC, 3)
    with pytest.raises(ContextError):
        ExceptionalCut(CUBIC, 1, "conjugated")
    with pytest.raises(ContextError):
        ConjPairCut(CUBIC, 2)
    two = Surface(PROJECTIVE_PLANE, 2, 0)
    with pytest.raises(ContextError):
        TwoSpheresRelative(HClass(two, (3,), (1, 1)), HClass(two, (1,), (0, 0)),
                           HClass.exceptional(two, 1))


@pytest.mark.parametrize("c", range(4, 10))
def test_wall_crossing_confirmed(c):
    report = derive_wall_crossing(cut_class(c))
    assert report.holds
    assert report.below == {"F1": 1, "F2": 2}
    assert report.above == {"F1": 1, "F3": -2}
    assert report.theta == {"F2": 1, "F3": 1}
    assert "confirmed" in report.render()


def test_default_wall_crossing_and_single_flips():
    lists = {"below": classify(RealPointCut(CUBIC, 2)),
             "above": classify(RealPointCut(CUBIC, 2, "conjugated")),
             "theta_real": classify(ExceptionalCut(CUBIC, 2)),
             "theta_conj": classify(ExceptionalCut(CUBIC, 2, "conjugated"))}
    assert derive_wall_crossing().holds
    assert derive_wall_crossing(None, **lists).holds
    for name, sols in lists.items():
        for i in range(len(sols)):
            broken = dict(lists)
            broken[name] = sols[:i] + [flip_mass_shift(sols[i])] + sols[i + 1:]
            assert not derive_wall_crossing(None, **broken).holds, (name, i)


def test_no_type_two_families_means_no_jump():
    type1 = [s for s in classify(RealPointCut(CUBIC, 2)) if len(s.plus_classes) == 1]
    report = derive_wall_crossing(None, type1, type1, [], [])
    assert report.holds
    below, above, theta = report.evaluate({"F1": 7})
    assert below == above == 7 and theta == 0
