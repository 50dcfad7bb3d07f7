import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import load_mechanism, load_rule, random_catalytic_mechanism
from ogrules.chemgraph import components, is_isomorphic
from ogrules.dpo import Mechanism, StepDelta, apply, find_rule_matches
from ogrules.molparse import parse_smiles
from ogrules.overlay import BondClass, og_from_rule, overlay_rule
from ogrules.substrate import (
    CatalystError, condense, detect_catalysts, fixed_points, mass_balanced, substrate_parts,
    substrate_rule, substrate_rule_of,
)

HIS_N, WATER_O, C1, ESTER_O, H_SER, H_WATER = 8, 9, 11, 13, 30, 37


def element_multiset(g, ids):
    return sorted(g.element(v) for v in ids)


def brute_force_pairings(E, P):
    """Maximal sets of (educt component, product component) pairs of isomorphic molecules."""
    ce, cp = components(E), components(P)
    found = []
    for k in range(min(len(ce), len(cp)), -1, -1):
        for es in itertools.combinations(range(len(ce)), k):
            for ps in itertools.permutations(range(len(cp)), k):
                if all(is_isomorphic(ce[i], cp[j]) for i, j in zip(es, ps)):
                    found.append(frozenset(zip(es, ps)))
        if found:
            break
    return set(found), ce, cp


def water_toy() -> Mechanism:
    # water 0 protonates methoxide; water 3 watches
    g = parse_smiles("O.O.[O-]C")
    # ids: O0 O1 O2 C3, H: 4 5 on O0, 6 7 on O1, 8 9 10 on C3
    delta = StepDelta(((0, 4, 1, 0), (2, 4, 0, 1)), ((0, 0, -1), (2, -1, 0)))
    return Mechanism.from_deltas(g, [delta])


def oxygen_swap_toy() -> Mechanism:
    # acetone (C1=O2) lends its oxygen to acetaldehyde (C5=O6) and keeps O6 instead
    g = parse_smiles("CC(=O)C.CC=O")
    steps = [
        StepDelta(((1, 2, 2, 1), (2, 5, 0, 1))),
        StepDelta(((1, 6, 0, 1), (5, 6, 2, 1))),
        StepDelta(((1, 2, 1, 0), (1, 6, 1, 2), (2, 5, 1, 2), (4, 5, 1, 2), (5, 6, 1, 0))),
    ]
    return Mechanism.from_deltas(g, steps)


class TestDetect:
    def test_lipase(self, lipase):
        _, od = overlay_rule(lipase)
        found = detect_catalysts(od.host, od.result)
        assert len(found) == 1
        comps = components(found[0].catalyst)
        assert [min(c.labels) for c in comps] == [0, 3]
        assert is_isomorphic(comps[0], parse_smiles("CCO"))
        assert is_isomorphic(comps[1], parse_smiles("CC1=CNC=N1"))

    def test_everything_unchanged(self):
        g = parse_smiles("CCO.O")
        found = detect_catalysts(g, g)
        assert len(found) == 1
        assert found[0].educt_atoms() == frozenset(g.labels)
        assert found[0].into_products == {v: v for v in g.labels}

    def test_nothing_in_common(self):
        assert detect_catalysts(parse_smiles("O"), parse_smiles("N")) == []

    def test_two_waters_against_brute_force(self):
        m = water_toy()
        E, P = m.educts, m.final
        found = detect_catalysts(E, P)
        expected, ce, cp = brute_force_pairings(E, P)
        assert len(found) == len(expected) == 2
        got = set()
        for ca in found:
            pairs = set()
            for c in components(ca.catalyst):
                i = next(k for k, x in enumerate(ce) if set(x.labels) == set(c.labels))
                img = {ca.into_products[v] for v in c.labels}
                j = next(k for k, x in enumerate(cp) if set(x.labels) == img)
                pairs.add((i, j))
            got.add(frozenset(pairs))
        assert got == expected

    def test_order_is_deterministic(self):
        m = water_toy()
        a = [ca.key() for ca in detect_catalysts(m.educts, m.final)]
        assert a == sorted(a)

    def test_requested_indices(self, lipase):
        _, od = overlay_rule(lipase)
        assert len(detect_catalysts(od.host, od.result, [0])) == 1
        with pytest.raises(CatalystError, match="out of range"):
            detect_catalysts(od.host, od.result, [7])
        with pytest.raises(CatalystError, match="unchanged"):
            detect_catalysts(od.host, od.result, [3])


class TestSubstrateRule:
    def test_lipase(self, lipase):
        srule, ca = substrate_rule_of(lipase)
        assert srule.created_atoms == {H_SER}
        assert srule.deleted_atoms == {H_WATER}
        assert mass_balanced(srule)
        og = og_from_rule(srule, substrate=True)
        counts = og.class_counts()
        assert counts[BondClass.FORMED] == 2 and counts[BondClass.BROKEN] == 2
        assert {b.pair for b in og.bonds_of(BondClass.FORMED)} == {(WATER_O, C1), (ESTER_O, H_SER)}
        assert {b.pair for b in og.bonds_of(BondClass.BROKEN)} == {(WATER_O, H_WATER), (C1, ESTER_O)}
        flags = {a.id: a.substrate_flag for a in og.atoms if a.substrate_flag}
        assert flags == {H_SER: "created", H_WATER: "deleted"}

    def test_lipase_explicit_indices_agree(self, lipase):
        assert substrate_rule_of(lipase, [0, 1])[0] == substrate_rule_of(lipase)[0]

    def test_no_catalyst_returns_overlay(self):
        m = Mechanism.from_deltas(parse_smiles("C.O"), [StepDelta(((0, 1, 0, 1),))])
        rule, ca = substrate_rule_of(m)
        assert ca is None and rule == overlay_rule(m)[0]

    def test_transient_binding_trades_nothing(self):
        srule, ca = substrate_rule_of(load_mechanism("esterase_1h"))
        assert ca is not None
        assert srule.created_atoms == srule.deleted_atoms == frozenset()
        assert load_rule("core", "hydrolase_1h") == srule

    def test_oxygen_swap(self):
        m = oxygen_swap_toy()
        srule, ca = substrate_rule_of(m)
        assert srule.created_atoms == {2} and srule.deleted_atoms == {6}
        assert element_multiset(srule.right, srule.created_atoms) == ["O"]
        assert element_multiset(srule.left, srule.deleted_atoms) == ["O"]
        _, od = overlay_rule(m)
        e_sub, p_sub = substrate_parts(ca, od.host, od.result)
        res = apply(srule, e_sub, {v: v for v in srule.left.labels}).result
        assert is_isomorphic(res, p_sub)

    def test_inconsistent_assignment(self, lipase):
        _, od = overlay_rule(lipase)
        m = water_toy()
        ca = detect_catalysts(m.educts, m.final)[0]
        with pytest.raises(CatalystError):
            substrate_rule(od.rule, od, ca)


class TestCondense:
    def test_picks_untouched_water(self):
        m = water_toy()
        overlay, od = overlay_rule(m)
        found = detect_catalysts(od.host, od.result)
        best = condense(found, od, overlay)
        assert best.educt_atoms() == {1, 6, 7}
        sizes = {ca.key(): len(substrate_rule(overlay, od, ca).atom_ids()) for ca in found}
        assert sizes[best.key()] == min(sizes.values())
        assert fixed_points(best, od) == 3

    def test_unique(self, lipase):
        _, od = overlay_rule(lipase)
        found = detect_catalysts(od.host, od.result)
        assert condense(found, od) is found[0]

    def test_empty(self, lipase):
        _, od = overlay_rule(lipase)
        with pytest.raises(CatalystError):
            condense([], od)

    def test_choice_does_not_change_function(self):
        m = water_toy()
        overlay, od = overlay_rule(m)
        found = detect_catalysts(od.host, od.result)
        e_ref, p_ref = substrate_parts(found[0], od.host, od.result)
        for ca in found:
            srule = substrate_rule(overlay, od, ca)
            _, p_sub = substrate_parts(ca, od.host, od.result)
            assert is_isomorphic(p_sub, p_ref)
            results = [apply(srule, e_ref, mm).result for mm in find_rule_matches(srule, e_ref)]
            assert any(is_isomorphic(r, p_ref) for r in results)


def check_catalytic(m):
    overlay, od = overlay_rule(m)
    E, P = od.host, od.result
    found = detect_catalysts(E, P)
    assert found
    for ca in found:
        srule = substrate_rule(overlay, od, ca)
        # mass invariance
        assert element_multiset(srule.right, srule.created_atoms) == \
            element_multiset(srule.left, srule.deleted_atoms)
        # projection: every substrate-rule bond is an educt or product bond between the same atoms
        for (a, b), o in srule.left.orders.items():
            assert E.order(a, b) == o
        for (a, b), o in srule.right.orders.items():
            assert P.order(a, b) == o
        # applicability on the catalyst-free educts
        e_sub, p_sub = substrate_parts(ca, E, P)
        ident = {v: v for v in srule.left.labels}
        assert ident in find_rule_matches(srule, e_sub)
        assert is_isomorphic(apply(srule, e_sub, ident).result, p_sub)


@given(st.integers(0, 2**32 - 1))
def test_random_catalytic_mechanisms(seed):
    check_catalytic(random_catalytic_mechanism(random.Random(seed)))


@pytest.mark.parametrize("name", ["lipase", "esterase_2h", "esterase_1h"])
def test_bundled_mechanisms(name):
    check_catalytic(load_mechanism(name))
