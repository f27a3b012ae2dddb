import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from necklace.catalog import fig2_spec, gasket_spec, good4_spec
from necklace.rigidity import (
    all_isomorphisms,
    apply_sigma,
    compose_tables,
    elements,
    embedding_image_copy_check,
    from_perm,
    identity,
    invert_table,
    reflection,
    rigid_maps,
    spec_isomorphic,
    specs_equivalent,
    tau,
    verify_nifs_uniqueness,
)

from oracles import dihedral_perms, prefix_compatible_automorphisms


@pytest.mark.parametrize("n", [3, 4, 5])
def test_group_laws(n):
    t, s, e = tau(n), reflection(n), identity(n)
    g = e
    for _ in range(n):
        g = g.compose(t)
    assert g == e
    assert s.compose(s) == e
    assert s.compose(t).compose(s) == t.inverse()
    assert sorted(x.perm() for x in elements(n)) == sorted(dihedral_perms(n))
    assert [x.index() for x in elements(n)] == list(range(2 * n))


@given(st.integers(3, 6).flatmap(lambda n: st.tuples(st.sampled_from(elements(n)), st.sampled_from(elements(n)))))
def test_compose_inverse(pair):
    a, b = pair
    assert a.compose(a.inverse()) == identity(a.n)
    assert from_perm(a.n, a.compose(b).perm()) == a.compose(b)
    assert all(a.compose(b)(k) == a(b(k)) for k in range(1, a.n + 1))


def test_from_perm_rejects():
    with pytest.raises(ValueError):
        from_perm(4, (1, 3, 2, 4))


def test_apply_sigma_examples(gasket, good4):
    assert apply_sigma(gasket, identity(3)).glue == gasket.glue
    rev = apply_sigma(gasket, reflection(3))
    assert specs_equivalent(rev, gasket)
    assert spec_isomorphic(good4, apply_sigma(good4, tau(4).compose(tau(4))))
    for g in elements(4):
        back = apply_sigma(apply_sigma(good4, g), g.inverse())
        assert specs_equivalent(back, good4)


def test_isomorphism_results(gasket, good4, fig2):
    r = spec_isomorphic(gasket, good4)
    assert not r and r.reason.startswith("m=n fails")
    assert len(all_isomorphisms(gasket, gasket)) == 6
    assert len(all_isomorphisms(good4, good4)) == 8
    assert all_isomorphisms(fig2, fig2) == [identity(4)]


@pytest.mark.parametrize(
    "spec,expected,levels",
    [(gasket_spec(), 6, [1, 2, 3]), (good4_spec(), "uncountable", [1, 2]), (fig2_spec(), 1, [2, 3])],
    ids=["gasket", "good4", "fig2"],
)
def test_rigid_maps_against_oracle(spec, expected, levels):
    c = rigid_maps(spec, spec)
    assert c.count == expected
    for m in levels:
        assert len(c.tables(m)) == prefix_compatible_automorphisms(spec, m)


def test_fig2_table_depth_one_is_sharper_than_contacts(fig2):
    # level-1 contacts alone allow all 8 symmetries of the square ring; pins rule out 7
    assert prefix_compatible_automorphisms(fig2, 1) == 8
    assert len(rigid_maps(fig2, fig2).tables(1)) == 1


def test_gasket_maps_form_a_group(gasket):
    c = rigid_maps(gasket, gasket)
    d = 3
    tabs = c.tables(d)
    for t1 in tabs:
        assert c.admits(invert_table(t1, d), d)
        for t2 in tabs:
            assert c.admits(compose_tables(t2, t1, d), d)


def test_good4_composition_closed_at_depth_two(good4):
    c = rigid_maps(good4, good4)
    tabs = c.tables(2)
    for t1 in tabs[::9]:
        for t2 in tabs[::13]:
            assert c.admits(compose_tables(t2, t1, 2), 2)


def test_cross_spec_maps(gasket, good4, fig2):
    c = rigid_maps(gasket, good4)
    assert c.count == 0 and c.reason.startswith("m=n fails")
    assert rigid_maps(good4, fig2).count == 0
    assert rigid_maps(fig2, good4).count == 0
    rot = apply_sigma(gasket, tau(3))
    assert rigid_maps(gasket, rot).count == 6


def test_automaton_json(gasket):
    js = rigid_maps(gasket, gasket).to_json()
    assert js["count"] == 6 and len(js["maps"]) == 6
    assert 0 in js["accepting"]


def test_embedding_copy_check(gasket, good4):
    for spec in (gasket, good4):
        c = rigid_maps(spec, spec)
        for t in c.tables(4)[:3]:
            for w in [(), (1,), (2, 3)]:
                assert embedding_image_copy_check(spec, w, t, depth=3)["ok"]


def test_uniqueness_suites(gasket, good4, fig2):
    r = verify_nifs_uniqueness(gasket)
    assert r.ok and len(r.per_sigma) == 6
    r = verify_nifs_uniqueness(good4)
    assert r.ok and len(r.per_sigma) == 8
    r = verify_nifs_uniqueness(fig2)
    assert r.skipped and not r.ok
    assert "warning" in r.to_json()
