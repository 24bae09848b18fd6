import pytest
from hypothesis import given, settings, strategies as st

from welschinger.errors import InvalidKey, ParityError, SideConditionError
from welschinger.lattice import (HClass, MINIMAL_DEL_PEZZO_2, PROJECTIVE_PLANE, Surface,
                                 conic_bundle, pullback)
from welschinger.relations import (InvariantKey, Relation, blowup_pullback, blowup_subtract,
                                   is_instance, multi_pullback, multi_subtract, pair_pullback,
                                   pair_subtract, real_pullback, real_subtract, relations_of,
                                   solve_wall, theta, transport_labels, wall_applies, wall_keys)

CP2 = Surface(PROJECTIVE_PLANE)
X1 = Surface(MINIMAL_DEL_PEZZO_2)


def key(k, s=0, surface=CP2, **labels):
    return InvariantKey(surface, pullback(HClass(CP2, (k,)), surface), s, **labels)


def test_key_canonical_and_validated():
    t = Surface(PROJECTIVE_PLANE, 2, 0)
    a = InvariantKey(t, HClass(t, (3,), (0, 1)), 0)
    b = InvariantKey(t, HClass(t, (3,), (1, 0)), 0)
    assert a == b and a.d.exc == (1, 0)
    with pytest.raises(InvalidKey):
        key(3, 5)
    assert key(3).s_max == 4 and key(3, 1).r == 6
    assert key(3, 2).describe() == "W_{CP2}(3H, s=2)"


def test_real_pullback_and_subtract():
    up = real_pullback(key(3))
    assert up.surface == CP2.blow_up(1, 0) and up.d.exc == (0,)
    low = real_subtract(key(1))
    assert low.d.exc == (1,) and low.s == 0
    assert str(real_subtract(key(2)).d) == "2H - E1"
    # c1.d - 2s = 1 is rejected
    t = Surface(PROJECTIVE_PLANE, 2, 0)
    with pytest.raises(SideConditionError):
        real_subtract(InvariantKey(t, HClass(t, (1,), (1, 1)), 0))


def test_repeated_real_pullback_reaches_three_points():
    k = key(4)
    for _ in range(3):
        k = real_pullback(k)
    assert k == key(4, 0, Surface(PROJECTIVE_PLANE, 3, 0))
    assert k == multi_pullback(key(4), 3, 0)


def test_pair_rules():
    k = pair_subtract(key(4, 1))
    assert k.surface == CP2.blow_up(0, 1) and k.d.pairs == ((1, 1),) and k.s == 0
    assert pair_pullback(key(3, 1)).d.pairs == ((0, 0),)
    with pytest.raises(SideConditionError):
        pair_subtract(key(4, 0))


def test_multi_subtract():
    k = multi_subtract(key(3, 3), 0, 2)
    assert k.surface == CP2.blow_up(0, 2) and k.s == 1
    assert str(k.d) == "3H - (E'1+E''1) - (E'2+E''2)"
    with pytest.raises(SideConditionError):
        multi_subtract(key(3, 3), 3, 0)  # only two real points when s = 3
    with pytest.raises(SideConditionError):
        multi_subtract(key(3, 1), 0, 2)


def test_composition_pullbacks():
    for k in (key(3, 1), key(4, 0), key(2)):
        assert pair_pullback(real_pullback(k)) == multi_pullback(k, 1, 1)
        assert real_pullback(pair_pullback(k)) == multi_pullback(k, 1, 1)
        assert multi_pullback(multi_pullback(k, 1, 0), 1, 1) == multi_pullback(k, 2, 1)


def test_theta_key():
    t = theta(key(4))
    assert t.surface == CP2.blow_up(1, 0) and str(t.d) == "4H - 2E1"
    x = theta(InvariantKey(X1, HClass.anticanonical(X1, 2), 0))
    assert x == InvariantKey(X1.blow_up(1, 0), HClass.anticanonical(X1.blow_up(1, 0), 2), 0)


def test_wall_solving():
    assert solve_wall(0, None, 18) == (0, -36, 18)
    assert solve_wall(8, None, 6) == (8, -4, 6)
    assert solve_wall(None, 5, 0) == (5, 5, 0)
    assert solve_wall(8, 6, None) == (8, 6, 1)
    with pytest.raises(ParityError):
        solve_wall(8, 5, None)
    assert wall_applies(key(3, 1)) and not wall_applies(key(3, 0))
    with pytest.raises(SideConditionError):
        wall_keys(key(1, 0))


def test_relation_solve_is_exact():
    a, b, t = wall_keys(key(3, 1))
    rel = Relation("Eq7", ((a, 1), (b, -1), (t, -2)))
    assert rel.solve(t, {a: 8, b: 6}) == 1
    assert rel.step_rule(t) == "Theta" and rel.step_rule(b) == "Eq7-down"
    assert rel.step_rule(a) == "Eq7-up"
    with pytest.raises(ParityError):
        rel.solve(t, {a: 8, b: 5})


def test_labels_transport():
    k = key(3, 0, l_label="L", f_label="F")
    assert transport_labels(k, 2) == ("L#RP2#RP2", "F")
    up = real_pullback(k)
    assert (up.l_label, up.f_label) == ("L#RP2", "F")
    assert pair_pullback(k).l_label == "L"
    assert transport_labels(key(3), 1) == (None, None)
    rel = next(r for r in relations_of(k, 1) if r.rule == "Eq1")
    assert rel.step_rule(up) == "Remark1.5"


def test_relations_are_instances():
    k = key(3, 2)
    rels = list(relations_of(k, 2))
    assert {r.rule for r in rels} >= {"Eq1", "Eq2", "Eq3", "Eq4", "Eq5", "Eq6", "Eq7"}
    assert all(is_instance(r, 2) for r in rels)
    fake = Relation("Eq1", ((real_pullback(k), 1), (key(3, 1), -1)))
    assert not is_instance(fake, 2)


def test_conic_bundle_key():
    b = Surface(conic_bundle(1), 0, 2)
    k = InvariantKey(b, HClass.anticanonical(b, 2), 0)
    assert k.c1d == 4 and k.s_max == 1


@settings(max_examples=60)
@given(st.integers(1, 5), st.data())
def test_blowup_order_invariance(k, data):
    s = data.draw(st.integers(0, (3 * k - 1) // 2))
    base = key(k, s)
    steps = data.draw(st.lists(st.sampled_from(["r", "p"]), max_size=4))
    cur = base
    for step in steps:
        cur = real_pullback(cur) if step == "r" else pair_pullback(cur)
    assert cur == blowup_pullback(base, steps.count("r"), steps.count("p"))


@settings(max_examples=60)
@given(st.integers(2, 5), st.data())
def test_subtract_order_invariance(k, data):
    s = data.draw(st.integers(1, (3 * k - 1) // 2))
    base = key(k, s)
    r_max = min(base.r, 2)
    r = data.draw(st.integers(0, r_max))
    p = data.draw(st.integers(0, min(s, 2)))
    order = data.draw(st.permutations(["r"] * r + ["p"] * p))
    cur = base
    for step in order:
        if step == "r":
            cur = blowup_subtract(cur, 1, 0)
        else:
            cur = blowup_subtract(cur, 0, 1)
    assert cur == blowup_subtract(base, r, p)
