"""The universe bundle, classification, equivalence space, verdicts."""

import random

import pytest

from invgpd.core import Functor, classify_functor, find_isomorphism
from invgpd.equivariant import (
    REGISTRY,
    EquivariantFunctor,
    eq_compose,
    eq_identity,
    terminal_map,
    validate_equivariant,
    validate_involutive,
)
from invgpd.errors import BaseTooSmall, NotSmall
from invgpd.generators import random_involutive
from invgpd.lifting import StructureTag
from invgpd.search import iter_functors
from invgpd.universe import (
    build_universe,
    check_funext_counterexample,
    check_univalence,
    classify_small_fibration,
    default_closure_samples,
    diagonal_map,
    double_cover_of_interval,
    equivalence_space,
    funext_instance,
    is_small_fibration,
    projective_univalence_witness,
    pullback_of_universal,
    universe_closure_checks,
)


def test_universe_over_empty_base():
    b = build_universe(())
    assert b.U.base.n_objects == 1
    assert b.Utilde.base.n_objects == 0
    assert validate_involutive(b.U) == []


def test_universe_over_singleton():
    b = build_universe(("v",))
    assert b.U.base.n_objects == 2
    # both objects are morphism-rigid: only identity endomorphisms
    for x in b.U.base.objects:
        assert b.U.base.hom(x, x) == (b.U.base.ident(x),)
    assert b.Utilde.base.n_objects == 1


def test_universe_over_two_elements():
    b = build_universe(("a", "b"))
    assert b.U.base.n_objects == 7
    assert validate_involutive(b.U) == [] and validate_involutive(b.Utilde) == []
    assert validate_equivariant(b.p) == []
    # the two-element identity type carries the swap automorphism
    A = b.u_object_id(("a", "b"), ("a", "b"), {"a": "a", "b": "b"})
    assert A is not None
    assert b.u_morphism_id(A, A, {"a": "b", "b": "a"}) is not None


def test_involution_laws_and_p_equivariance():
    b = build_universe(("a", "b"))
    for X in (b.U, b.Utilde):
        eta = X.involution
        for x in X.base.objects:
            assert eta.obj_map[eta.obj_map[x]] == x
        for m in X.base.morphisms:
            assert eta.mor_map[eta.mor_map[m]] == m
    for po in b.Utilde.base.objects:
        assert b.p.on_obj(b.Utilde.eta_obj(po)) == b.U.eta_obj(b.p.on_obj(po))


def test_p_is_a_discrete_fibration():
    b = build_universe(("a", "b"))
    assert classify_functor(b.p.map).discrete_fibration
    assert is_small_fibration(b.p, b)


def test_small_fibration_examples():
    b = build_universe(("a", "b"))
    _, f = funext_instance()
    # the fold has interval fibers (phi lies over an identity): not small
    assert not is_small_fibration(f, b)
    assert is_small_fibration(double_cover_of_interval(), b)
    # Icheck -> 1! has a non-discrete fiber
    assert not is_small_fibration(terminal_map(REGISTRY.shape("Icheck")), b)


def test_classification_of_the_double_cover():
    b = build_universe(("a", "b"))
    cover = double_cover_of_interval()
    cls = classify_small_fibration(cover, b)
    assert validate_equivariant(cls.classifying) == []
    # chi is an isomorphism onto the pullback over the base
    assert cls.chi.map.dom.n_objects == cls.pullback.base.n_objects
    comp = eq_compose(cls.pullback_map, cls.chi)
    assert comp.map.obj_map == cover.map.obj_map


def test_classification_rejects_non_small():
    b = build_universe(("a", "b"))
    with pytest.raises(NotSmall):
        classify_small_fibration(terminal_map(REGISTRY.shape("Icheck")), b)


def test_classification_roundtrip_on_seeded_pullbacks():
    """Pullbacks of the universal map classify back to isomorphic pullbacks."""
    rng = random.Random(13)
    b = build_universe(("a", "b", "c"))
    done = 0
    while done < 6:
        Bp = random_involutive(rng, max_objects=2, vertex_z2=False)
        maps = []
        for F in iter_functors(Bp.base, b.U.base, equiv=(Bp.involution, b.U.involution)):
            maps.append(F)
            if len(maps) >= 40:
                break
        if not maps:
            continue
        g = EquivariantFunctor(Bp, b.U, rng.choice(maps))
        PB, prB = pullback_of_universal(b, g)
        assert is_small_fibration(prB, b)
        cls = classify_small_fibration(prB, b)
        # chi: PB -> pullback along the recovered classifying map, over Bp
        comp = eq_compose(cls.pullback_map, cls.chi)
        assert comp.map.obj_map == prB.map.obj_map
        assert comp.map.mor_map == prB.map.mor_map
        done += 1


def test_equivalence_space_fibers():
    b = build_universe(("a", "b"))
    sp = equivalence_space(b)
    assert sp.E.base.n_objects == b.U.base.n_morphisms
    A = b.u_object_id(("a", "b"), ("a", "b"), {"a": "a", "b": "b"})
    fib = [e for e in sp.E.base.objects if sp.decode(e)[:2] == (A, A)]
    assert len(fib) == 2  # identity and the swap
    # the swap equivalence is a fixed point of E
    swap = [e for e in fib if sp.decode(e)[2] != b.U.base.ident(A)]
    assert len(swap) == 1 and sp.E.eta_obj(swap[0]) == swap[0]


def test_projective_witness_structure():
    b = build_universe(("a", "b"))
    sp = equivalence_space(b)
    wid = projective_univalence_witness(b, sp)
    A, B, rho = sp.decode(wid)
    assert A == B == b.u_object_id(("a", "b"), ("a", "b"), {"a": "a", "b": "b"})
    assert b.u_morphisms[rho] == {"a": "b", "b": "a"}
    # no witness exists over small bases
    with pytest.raises(BaseTooSmall):
        projective_univalence_witness(build_universe(("v",)))


def test_projective_univalence_verdicts():
    assert check_univalence(build_universe(()), StructureTag.PROJECTIVE).verdict == "HOLDS"
    assert check_univalence(build_universe(("v",)), StructureTag.PROJECTIVE).verdict == "HOLDS"
    rep = check_univalence(build_universe(("a", "b")), StructureTag.PROJECTIVE)
    assert rep.verdict == "FAILS"
    assert not rep.witness["fixed_point_bijection"]
    assert rep.witness["levelwise_equivalence"]


def test_injective_univalence_verdicts():
    for base in (("v",), ("a", "b")):
        rep = check_univalence(build_universe(base), StructureTag.INJECTIVE)
        assert rep.verdict == "HOLDS", rep.witness
        assert all(rep.witness.values())


def test_funext_report():
    rpt = check_funext_counterexample()
    assert rpt.verdict == "FAILS"
    assert rpt.homotopy_equivalence_input
    assert rpt.pi_objects == 4
    assert rpt.pi_fixed_points == 2
    assert rpt.terminal_fixed_points == 1
    assert not rpt.pi_is_homotopy_equivalence


def test_closure_checks():
    b = build_universe(("a", "b", "c"))
    rep = universe_closure_checks(b, default_closure_samples(b))
    verdicts = rep.verdicts()
    assert "FAIL" not in verdicts
    assert "OVERFLOW" in verdicts
    kinds = {e["kind"] for e in rep.entries}
    assert kinds == {"identity", "composite", "diagonal", "pi"}
    for e in rep.entries:
        if e["verdict"] == "OVERFLOW":
            assert e["witness"]["largest_fiber"] > e["witness"]["base_size"]


def test_closure_rejects_non_small_samples():
    b = build_universe(("a", "b"))
    with pytest.raises(NotSmall):
        universe_closure_checks(b, [("bad", terminal_map(REGISTRY.shape("Icheck")))])


def test_diagonal_of_small_fibration_is_small():
    b = build_universe(("a", "b"))
    cover = double_cover_of_interval()
    diag, _ = diagonal_map(cover)
    assert is_small_fibration(diag, b)


def test_projective_injective_dichotomy_same_delta1():
    """The central contrast: one and the same map delta1 is an injective
    trivial cofibration but not a projective homotopy equivalence."""
    from invgpd.homotopy import is_homotopy_equivalence_projective
    from invgpd.lifting import injective_classify

    b = build_universe(("a", "b"))
    sp = equivalence_space(b)
    assert injective_classify(sp.delta1).trivial_cofibration
    assert not is_homotopy_equivalence_projective(sp.delta1)
