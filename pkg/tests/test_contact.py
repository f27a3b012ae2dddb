import networkx as nx
import numpy as np
import pytest

from necklace.address import Address, as_point, main_nodes
from necklace.contact import (
    build_contact_graph,
    closure_cut_points,
    complement_closure_cut_points,
    complement_components,
    components_minus,
    copy_boundary,
    is_cut,
    ncp_closure,
)
from necklace.errors import CapError

from oracles import contact_incidences, contact_nx_graph, heads_of


def test_gasket_levels(gasket):
    g1 = build_contact_graph(gasket, 1)
    assert g1.num_cylinders == 3 and len(g1.contacts) == 3
    assert {c.incident for c in g1.contacts} == {((1,), (2,)), ((2,), (3,)), ((1,), (3,))}
    g2 = build_contact_graph(gasket, 2)
    assert g2.num_cylinders == 9 and len(g2.contacts) == 12


def test_good4_level1_is_a_4_cycle(good4):
    g1 = build_contact_graph(good4, 1)
    assert len(g1.contacts) == 4
    assert {c.incident for c in g1.contacts} == {((1,), (2,)), ((2,), (3,)), ((3,), (4,)), ((1,), (4,))}


@pytest.mark.parametrize("name, m", [("gasket", 3), ("good4", 3), ("fig2", 3)])
def test_contacts_match_union_find_oracle(name, m, request):
    spec = request.getfixturevalue(name)
    g = build_contact_graph(spec, m)
    mine = {frozenset(c.incident) for c in g.contacts}
    assert mine == contact_incidences(spec, m)
    assert g.is_connected()


@pytest.mark.parametrize("name", ["gasket", "good4", "fig2"])
def test_level1_graph_is_cycle(name, request):
    spec = request.getfixturevalue(name)
    g = build_contact_graph(spec, 1)
    G = nx.Graph()
    for c in g.contacts:
        (a,), (b,) = c.incident
        G.add_edge(a, b)
    assert nx.is_isomorphic(G, nx.cycle_graph(spec.n))


def test_graph_exports(gasket):
    g = build_contact_graph(gasket, 2)
    js = g.to_json()
    assert js["level"] == 2 and len(js["cylinders"]) == 9 and len(js["contacts"]) == 12
    assert js["contacts"] == sorted(js["contacts"], key=lambda c: Address.parse(c["canonical"]))
    dot = g.to_dot()
    assert dot.startswith('graph "level2"') and dot.count("--") == 24


def test_cap_error(gasket, monkeypatch):
    monkeypatch.setenv("NECKLACE_MAX_CELLS", "100")
    build_contact_graph.cache_clear()
    with pytest.raises(CapError):
        build_contact_graph(gasket, 5)
    build_contact_graph.cache_clear()


def test_components_examples(gasket, fig2):
    z = main_nodes(gasket)
    cs = components_minus(gasket, [z[0], z[1]])
    assert len(cs) == 2
    # the component avoiding prefix 2 is F minus F_2
    outer = [c for c in cs.components if c.avoids_prefix((2,))]
    assert len(outer) == 1
    assert len(components_minus(gasket, [z[0]])) == 1
    zf = main_nodes(fig2)
    assert len(components_minus(fig2, [zf[1], zf[2]])) == 3


def test_components_agree_with_networkx(fig2):
    zf = main_nodes(fig2)
    S = [zf[1], zf[2]]
    cs = components_minus(fig2, S)
    m = cs.stable_at
    removed = [heads_of(fig2, p.canonical, m) for p in S]
    G = contact_nx_graph(fig2, m, removed)
    cyl_sets = sorted(sorted(w for kind, w in c if kind == "c") for c in nx.connected_components(G))
    mine = sorted(sorted(c.words()) for c in cs.components)
    assert mine == [c for c in cyl_sets if c]


def test_component_count_monotone(gasket, good4, fig2):
    for spec in (gasket, good4, fig2):
        for S in ([main_nodes(spec)[0], main_nodes(spec)[1]], list(main_nodes(spec, (1,))[:2])):
            cs = components_minus(spec, S, window=3)
            counts = [c for _, c in cs.history]
            assert counts == sorted(counts)


def test_m0_is_raised_when_too_low(gasket):
    p = as_point(gasket, Address.parse("21(2)"))
    q = as_point(gasket, Address.parse("21(3)"))
    cs = components_minus(gasket, [p, q], m0=1)
    assert cs.stable_at >= 3


def test_ncp_examples(gasket, good4):
    z = main_nodes(gasket)
    cs = components_minus(gasket, [z[0], z[1]])
    assert [ncp_closure(gasket, c) for c in cs.components] == [1, 0]
    found, _ = closure_cut_points(gasket, cs.components[0])
    assert found == (z[2].canonical,)
    zz = main_nodes(good4)
    cs = components_minus(good4, [zz[3], zz[0]])
    outer = [c for c in cs.components if c.avoids_prefix((1,))][0]
    assert ncp_closure(good4, outer) == 2


def test_is_cut_examples(gasket):
    z = main_nodes(gasket)
    v = is_cut(gasket, [z[0], z[1]])
    assert v.cut and all(count == 1 for _, count in v.subsets)
    assert not is_cut(gasket, [z[0]]).cut
    z2 = main_nodes(gasket, (2,))
    assert is_cut(gasket, [z2[0], z2[1]]).cut
    # three nodes disconnect but are not minimal
    assert not is_cut(gasket, z).cut


def test_boundary_law_on_node_cuts(gasket, good4, fig2):
    for spec in (gasket, good4, fig2):
        z = main_nodes(spec)
        for k in range(1, spec.n + 1):
            S = [z[spec.pred(k) - 1], z[k - 1]]
            cs = components_minus(spec, S)
            for c in cs.components:
                assert {p.canonical for p in c.boundary} == {p.canonical for p in S}


def test_copy_boundary_and_complements(gasket, good4):
    assert len(copy_boundary(gasket, (1,))) == 2
    assert len(copy_boundary(gasket, (1, 2))) == 3
    assert len(copy_boundary(gasket, (1, 1))) == 2
    assert complement_components(gasket, (1, 2)) == 1
    assert len(complement_closure_cut_points(gasket, (1,))) == 1
    assert len(complement_closure_cut_points(good4, (2,))) == 2
    assert complement_closure_cut_points(gasket, (1, 1)) == ()


def test_closure_alive_mask(gasket):
    g = build_contact_graph(gasket, 2)
    mask = np.zeros(g.num_cylinders, dtype=np.uint8)
    mask[[g.cylinder_index((1, 1)), g.cylinder_index((1, 2))]] = 1
    alive = g.closure_alive(mask)
    assert int(alive[g.num_cylinders:].sum()) == 1
