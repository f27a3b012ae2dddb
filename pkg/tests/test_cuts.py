import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from necklace.address import check_goodness, main_nodes
from necklace.catalog import fig2_spec, gasket_spec, good4_spec
from necklace.contact import complement_closure_cut_points, complement_components
from necklace.cuts import (
    candidate_2cuts,
    copies_with_boundary,
    copy_words,
    cut_points_among_nodes,
    extremal_components,
    n_of_cut,
    node_pair_cuts,
    survey_extremal,
    verify_theorem_suite,
)
from necklace.errors import CapError, NotACutError
from necklace.rigidity import apply_sigma, elements, relabel_point

from perturbed import perturbed_specs

BUILTINS = (gasket_spec(), good4_spec(), fig2_spec())
POOL = BUILTINS + perturbed_specs()


def keyset(cuts):
    return sorted(tuple(sorted(str(p.canonical) for p in pair)) for pair in cuts)


def test_n_of_cut_examples(gasket, fig2):
    z = main_nodes(gasket)
    r = n_of_cut(gasket, [z[0], z[1]])
    assert r.N == 1 and r.ncp_per_component == [1, 0]
    z2 = main_nodes(gasket, (2,))
    r = n_of_cut(gasket, [z2[0], z2[1]])
    assert r.N == 0 and r.ncp_per_component == [0, 0]
    zf = main_nodes(fig2)
    r = n_of_cut(fig2, [zf[1], zf[2]])
    assert len(r.ncp_per_component) == 3 and len(r.extremal_indices) == 2


def test_not_a_cut(gasket):
    with pytest.raises(NotACutError):
        n_of_cut(gasket, [main_nodes(gasket)[0]])


def test_candidate_counts(gasket, good4):
    assert len(candidate_2cuts(gasket, 0)) == 3
    pairs, raw = candidate_2cuts(gasket, 1, raw=True)
    assert raw == 12
    assert len(pairs) == 12  # node pairs of distinct copies never coincide in the gasket
    assert len(candidate_2cuts(good4, 0)) == 6
    with pytest.raises(ValueError):
        candidate_2cuts(gasket, -1)


def test_survey_gasket(gasket):
    sv = survey_extremal(gasket, 2)
    assert sv.N2 == 1
    assert sv.extremal_sets == sorted(tuple(sorted(p.canonical for p in c)) for c in node_pair_cuts(gasket))
    js = sv.to_json()
    assert {"N2", "extremal", "candidates", "caps", "verdicts"} <= js.keys()
    assert js["caps"]["level_cap"] == 2


def test_survey_good4(good4):
    sv = survey_extremal(good4, 2)
    assert sv.N2 == 2 and len(sv.extremal_cuts) == 4
    assert sv.verdicts["extremal_equals_node_pairs"]


def test_survey_fig2(fig2):
    sv = survey_extremal(fig2, 2)
    assert sv.N2 == 2
    found = keyset(r.points for r in sv.extremal_cuts)
    for pair in node_pair_cuts(fig2):
        assert keyset([pair])[0] in found
    extra = keyset([main_nodes(fig2, (3, 3))[0:4:3]])[0]  # boundary of F_33: f_33(z_1), f_33(z_4)
    assert extra in found
    assert ("321(3)", "3311(3)") == extra
    assert not sv.verdicts["extremal_equals_node_pairs"]


def test_survey_threads_deterministic(good4):
    a = survey_extremal(good4, 1).to_json()
    b = survey_extremal(good4, 1, threads=4).to_json()
    assert a == b


def test_extremal_components(gasket, good4, fig2):
    r = extremal_components(gasket, 2)
    assert r.external_extremal and r.unique
    r = extremal_components(good4, 1)
    assert r.unique and r.cut.ncp_per_component[r.external] == 2
    r = extremal_components(fig2, 2)
    assert r.external_extremal


def test_theorem_suites(gasket, good4, fig2):
    assert verify_theorem_suite(gasket).ok
    assert verify_theorem_suite(good4).ok
    rep = verify_theorem_suite(fig2)
    claims = {c.name: c for c in rep.claims}
    assert not claims["only_node_pair_extremal"].asserted
    assert claims["N2_equals_n_minus_2"].asserted and claims["N2_equals_n_minus_2"].passed
    assert rep.ok


# --- properties over built-ins and perturbed tables ----------------------------------


def _no_cut_points(spec):
    try:
        return not cut_points_among_nodes(spec, 2)
    except CapError:
        return False


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(POOL), st.integers(0, 1))
def test_boundary_law_and_N_bound(spec, L):
    try:
        sv = survey_extremal(spec, L)
    except CapError:
        return
    free = _no_cut_points(spec)
    for r in sv.cuts:
        removed = {p.canonical for p in r.points}
        for comp in r.components.components:
            assert {p.canonical for p in comp.boundary} == removed
        if free:
            assert r.N <= spec.n - 2


GOOD_POOL = [s for s in POOL if check_goodness(s).good]


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(GOOD_POOL), st.data())
def test_copy_complements_on_good_specs(spec, data):
    words = [w for w in copy_words(spec.n, 3) if w]
    w = data.draw(st.sampled_from(words))
    try:
        assert complement_components(spec, w) == 1
        if len(w) >= 2 and w in set(copies_with_boundary(spec, len(w))):
            assert len(complement_closure_cut_points(spec, w)) < spec.n - 2
    except CapError:
        return


@pytest.mark.parametrize("spec", [gasket_spec(), good4_spec()], ids=["gasket", "good4"])
def test_relabelling_invariance(spec):
    base = survey_extremal(spec, 1)
    for g in elements(spec.n):
        other = apply_sigma(spec, g)
        sv = survey_extremal(other, 1)
        expect = sorted(tuple(sorted(relabel_point(other, p, g).canonical for p in r.points)) for r in base.extremal_cuts)
        assert sv.extremal_sets == expect
        assert sv.N2 == base.N2


def test_relabelling_invariance_fig2(fig2):
    base = survey_extremal(fig2, 1)
    g = elements(4)[5]
    other = apply_sigma(fig2, g)
    sv = survey_extremal(other, 1)
    expect = sorted(tuple(sorted(relabel_point(other, p, g).canonical for p in r.points)) for r in base.extremal_cuts)
    assert sv.extremal_sets == expect
