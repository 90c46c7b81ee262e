"""Involutive groupoids: shapes, fixed points, cell attachments."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from invgpd.core import find_isomorphism, interval, unit, validate_groupoid
from invgpd.equivariant import (
    REGISTRY,
    EquivariantFunctor,
    attach_cell,
    eq_identity,
    equivariant_coproduct,
    equivariant_product,
    equivariant_pullback,
    fixed_points,
    swap_double,
    terminal_map,
    trivial_action,
    underlying,
    validate_equivariant,
    validate_involutive,
)
from invgpd.errors import InvalidAttachment, ShapeMismatch
from invgpd.generators import involutive_catalog, random_involutive
from invgpd.search import count_functors, iter_functors


def test_registry_shapes_and_maps_are_valid():
    for name, X in REGISTRY.shapes.items():
        assert validate_involutive(X) == [], name
    for name, F in REGISTRY.maps.items():
        assert validate_equivariant(F) == [], name


def test_icheck_has_no_fixed_points():
    full, strict = fixed_points(REGISTRY.shape("Icheck"))
    assert full.n_objects == 0 and strict.n_objects == 0


def test_nabla_fixed_points_are_one_object():
    full, strict = fixed_points(REGISTRY.shape("nabla"))
    assert full.objects == ("2",) and strict.objects == ("2",)
    assert full.n_morphisms == 1 and strict.n_morphisms == 1


def test_terminal_fixed_points():
    full, strict = fixed_points(REGISTRY.shape("1!"))
    assert full.n_objects == 1 and strict.n_objects == 1


def test_three_functors():
    assert trivial_action(unit()).fixed_objects() == ("*",)
    S1 = swap_double(unit())
    assert S1.base.n_objects == 2 and S1.fixed_objects() == ()
    assert underlying(REGISTRY.shape("Icheck")) == interval()


def test_fixed_points_commute_with_equivariant_isomorphisms():
    rng = random.Random(11)
    for _ in range(15):
        X = random_involutive(rng, max_objects=3)
        # conjugate by a random automorphism of the underlying groupoid
        autos = []
        for F in iter_functors(X.base, X.base, bijective=True):
            autos.append(F)
            if len(autos) >= 20:
                break
        a = rng.choice(autos)
        from invgpd.core import Functor, compose_functors
        inv2 = compose_functors(a, compose_functors(X.involution, Functor(
            X.base, X.base,
            {v: k for k, v in a.obj_map.items()},
            {v: k for k, v in a.mor_map.items()},
        )))
        from invgpd.equivariant import InvolutiveGroupoid
        Y = InvolutiveGroupoid(X.base, inv2)
        if validate_involutive(Y):
            continue  # conjugate need not be an involution for non-central a
        iso = EquivariantFunctor(X, Y, a)
        if validate_equivariant(iso):
            continue
        _, sx = fixed_points(X)
        _, sy = fixed_points(Y)
        assert sx.n_objects == sy.n_objects
        assert sx.n_morphisms == sy.n_morphisms


def test_equivariant_product_and_coproduct():
    ic = REGISTRY.shape("Icheck")
    one = REGISTRY.shape("1!")
    P, _, _ = equivariant_product(ic, one)
    assert validate_involutive(P) == []
    assert find_isomorphism(P.base, ic.base) is not None
    s1 = REGISTRY.shape("S1")
    C, _, _ = equivariant_coproduct(s1, s1)
    assert validate_involutive(C) == []
    assert C.base.n_objects == 4 and C.fixed_objects() == ()


def test_equivariant_pullback_of_swapped_fold_swaps_components():
    si, s1 = REGISTRY.shape("SI"), REGISTRY.shape("S1")
    from invgpd.universe import funext_instance
    _, f = funext_instance()
    P, pr1, pr2 = equivariant_pullback(f, f)
    assert validate_involutive(P) == []
    assert validate_equivariant(pr1) == [] and validate_equivariant(pr2) == []
    assert P.fixed_objects() == ()


def test_point_cell_on_empty():
    zero = REGISTRY.shape("0!")
    Y, incl, info = attach_cell(zero, "point", None, "c0")
    assert Y.base.n_objects == 1
    assert len(Y.fixed_objects()) == 1


def test_si_cell_on_icheck_gives_four_objects_no_fixed_points():
    ic = REGISTRY.shape("Icheck")
    Y, incl, info = attach_cell(ic, "Si", "0", "c0")
    assert validate_involutive(Y) == []
    assert Y.base.n_objects == 4 and Y.fixed_objects() == ()
    assert validate_equivariant(incl) == []
    # the inclusion is full: hom-sets are preserved on old objects
    assert all(m in Y.base.morphisms for m in ic.base.morphisms)


def test_iprime_cell_on_icheck_gives_nabla():
    ic, nb = REGISTRY.shape("Icheck"), REGISTRY.shape("nabla")
    Y, incl, info = attach_cell(ic, "iprime", "phi", "c0")
    assert validate_involutive(Y) == []
    assert len(Y.fixed_objects()) == 1
    hits = [
        F
        for F in iter_functors(Y.base, nb.base, bijective=True,
                               equiv=(Y.involution, nb.involution))
    ]
    assert hits, "attaching a fixed-point cell along the identity-type morphism gives nabla"


def test_i_cell_requires_fixed_attachment():
    ic = REGISTRY.shape("Icheck")
    with pytest.raises(InvalidAttachment):
        attach_cell(ic, "i", "0", "c0")


def test_iprime_cell_requires_equivariance_condition():
    # a morphism y -> eta(y) with eta(m) != inv(m): use SI's phi (eta_phi = psi)
    si = REGISTRY.shape("SI")
    with pytest.raises(InvalidAttachment):
        attach_cell(si, "iprime", "l:phi", "c0")
    with pytest.raises(ShapeMismatch):
        attach_cell(si, "wrong-kind", None, "c0")


def test_cells_are_levelwise_trivial_cofibrations():
    from invgpd.core import classify_functor
    cases = [
        attach_cell(REGISTRY.shape("Icheck"), "Si", "0", "c0"),
        attach_cell(REGISTRY.shape("Icheck"), "iprime", "phi", "c0"),
        attach_cell(REGISTRY.shape("1!"), "i", "*", "c0"),
    ]
    for Y, incl, info in cases:
        rep = classify_functor(incl.map)
        assert rep.injective_on_objects and rep.equivalence


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6))
def test_attach_cell_pushout_universal_property(seed):
    """Sampled cocones admit a unique mediating map out of the pushout."""
    rng = random.Random(seed)
    X = random_involutive(rng, max_objects=3, vertex_z2=False)
    kind = rng.choice(["Si", "iprime"])
    if kind == "Si":
        data = rng.choice(sorted(X.base.objects))
        template = REGISTRY.shape("SI")
        tmpl_map = REGISTRY.map("Si")
        attach_map = {"0": ("l:0",), "eta": ("r:0",)}
    else:
        candidates = [
            m for m in X.base.mor_ids()
            if X.base.tgt(m) == X.eta_obj(X.base.src(m)) and X.eta_mor(m) == X.base.inv(m)
        ]
        if not candidates:
            return
        data = rng.choice(candidates)
    Y, incl, info = attach_cell(X, kind, data, "c0")
    assert validate_involutive(Y) == []

    # sample cocones into a small target and count mediating maps
    H = REGISTRY.shape("nabla")
    count = 0
    for m in iter_functors(X.base, H.base, equiv=(X.involution, H.involution)):
        count += 1
        if count > 3:
            break
        comp = EquivariantFunctor(X, H, m)
        # cocone leg on the template: enumerate images for the new data
        for n_obj in H.base.objects:
            anchors = {
                "Si": lambda: (X.base.src(data) if data in X.base.morphisms else data),
                "iprime": lambda: X.eta_obj(X.base.src(data)),
            }[kind]()
            src_img = m.obj_map[anchors]
            isos = [k for k in H.base.mor_ids()
                    if H.base.src(k) == src_img and H.base.tgt(k) == n_obj]
            for iso in isos[:2]:
                if kind == "Si":
                    images_obj = {info.new_objects[0]: n_obj,
                                  info.new_objects[1]: H.eta_obj(n_obj)}
                    images_iso = {info.struct_isos[0]: iso,
                                  info.struct_isos[1]: H.eta_mor(iso)}
                else:
                    if H.eta_obj(n_obj) != n_obj:
                        continue
                    if H.eta_mor(iso) != H.base.comp(iso, m.mor_map[data]):
                        continue
                    images_obj = {info.new_objects[0]: n_obj}
                    images_iso = {info.struct_isos[0]: iso}
                from invgpd.equivariant import extend_over_cell
                ext = extend_over_cell(comp, Y, info, images_obj, images_iso)
                assert validate_equivariant(ext) == []
                # uniqueness: every equivariant functor out of Y agreeing with
                # the cocone equals ext
                seeds_obj = dict(m.obj_map)
                seeds_obj.update(images_obj)
                seeds_mor = dict(m.mor_map)
                seeds_mor.update({s: images_iso[s] for s in images_iso})
                mediators = list(iter_functors(
                    Y.base, H.base, obj_seed=seeds_obj, mor_seed=seeds_mor,
                    equiv=(Y.involution, H.involution),
                ))
                assert len(mediators) == 1
                assert mediators[0].mor_map == ext.map.mor_map
