"""The explicit right adjoint to pullback along a fibration.

For a levelwise isofibration g: A -> B and any map f: C -> A, the value
of the right adjoint on f is built exactly from its finite data:

* objects are pairs (y, s) of a base object and a partial section of f
  over the fiber of g at y (objects over y, morphisms over the identity),
* morphisms are pairs (u, v) of a base morphism and a transport, i.e. a
  functor from the pullback of the walking isomorphism at u to C over A,
* composition stitches two transports using a chosen lift of the first
  base morphism; the result does not depend on the lift (an invariant
  re-checkable with ``lift_independent``), and associativity is verified
  exhaustively on every constructed bundle,
* the involution conjugates base points, sections and transports.

Everything is enumerated, so the adjunction bijection with slice hom-sets
can be tested literally.
"""

from __future__ import annotations

from dataclasses import dataclass

from .budget import Budget, ensure_budget
from .core import (
    Functor,
    Groupoid,
    classify_functor,
    compose_functors,
    interval,
    pullback,
    split_pair,
)
from .equivariant import (
    EquivariantFunctor,
    InvolutiveGroupoid,
    equivariant_pullback,
    validate_equivariant,
    validate_involutive,
)
from .errors import MalformedSliceMorphism, NotAFibration
from .search import iter_functors


@dataclass
class PiObject:
    base_point: str
    section: Functor  # fiber over base_point -> C, a partial section of f


@dataclass
class PiMorphism:
    base_morphism: str
    transport: Functor  # g*u -> C over A


@dataclass
class PiBundle:
    g: EquivariantFunctor
    f: EquivariantFunctor
    dom_pi: InvolutiveGroupoid
    projection: EquivariantFunctor
    objects_info: dict[str, PiObject]
    morphisms_info: dict[str, PiMorphism]
    fibers: dict[str, Groupoid]
    pullbacks: dict[str, Groupoid]  # base morphism u -> the pullback g*u

    def object_id(self, y: str, section_obj: dict, section_mor: dict) -> str | None:
        """Find the object with the given base point and section data."""
        for oid, info in self.objects_info.items():
            if info.base_point == y and info.section.obj_map == section_obj \
                    and info.section.mor_map == section_mor:
                return oid
        return None


def _functor_key(F: Functor) -> tuple:
    return (tuple(sorted(F.obj_map.items())), tuple(sorted(F.mor_map.items())))


def _dict_key(obj_map: dict, mor_map: dict) -> tuple:
    return (tuple(sorted(obj_map.items())), tuple(sorted(mor_map.items())))


def fiber_groupoid(g: EquivariantFunctor, y: str) -> Groupoid:
    """Objects of A over y and morphisms of A over the identity of y."""
    A = g.dom.base
    objs = tuple(x for x in A.objects if g.on_obj(x) == y)
    idy = g.cod.base.ident(y)
    keep = {m for m in A.morphisms if g.on_mor(m) == idy}
    morphisms = {m: A.morphisms[m] for m in keep}
    identity = {x: A.identity[x] for x in objs}
    compose = {(a, b): c for (a, b), c in A.compose.items() if a in keep and b in keep}
    inverse = {m: A.inverse[m] for m in keep}
    return Groupoid(objs, morphisms, identity, compose, inverse)


def interval_functor(B: Groupoid, u: str) -> Functor:
    """The functor from the walking isomorphism picking out u."""
    I = interval()
    s, t = B.morphisms[u]
    return Functor(
        I, B,
        {"0": s, "1": t},
        {"id(0)": B.ident(s), "id(1)": B.ident(t), "phi": u, "inv(phi)": B.inv(u)},
    )


def _restrict(v: Functor, fib: Groupoid, end: str) -> tuple:
    """Key of the section obtained by restricting a transport to one end."""
    idm = f"id({end})"
    obj = {x: v.obj_map[f"({x},{end})"] for x in fib.objects}
    mor = {m: v.mor_map[f"({m},{idm})"] for m in fib.morphisms}
    return _dict_key(obj, mor)


def pi_of(g: EquivariantFunctor, f: EquivariantFunctor,
          budget: Budget | int | None = None, check: bool = True) -> PiBundle:
    """Construct the right-adjoint value on f of pullback along g.

    Raises NotAFibration unless g is a levelwise isofibration. With
    ``check`` (the default) the resulting groupoid is validated in full,
    associativity included, and the projection is checked equivariant.
    """
    budget = ensure_budget(budget)
    if not classify_functor(g.map).isofibration:
        raise NotAFibration("the base map of a dependent product must be an isofibration")
    if f.cod.base != g.dom.base:
        raise MalformedSliceMorphism("f must land in the domain of g")
    A, B, C = g.dom, g.cod, f.dom
    GA, GB, GC = A.base, B.base, C.base

    fibers: dict[str, Groupoid] = {y: fiber_groupoid(g, y) for y in GB.objects}

    # sections over each base object
    sections: dict[str, list[Functor]] = {}
    section_ids: dict[str, dict[tuple, str]] = {}
    objects_info: dict[str, PiObject] = {}
    for y in GB.objects:
        fib = fibers[y]
        incl = Functor(fib, GA, {x: x for x in fib.objects}, {m: m for m in fib.morphisms})
        found = list(iter_functors(fib, GC, post=(f.map, incl), budget=budget))
        sections[y] = found
        section_ids[y] = {}
        for k, s in enumerate(found):
            oid = f"sec({y};{k})"
            objects_info[oid] = PiObject(y, s)
            section_ids[y][_functor_key(s)] = oid

    # transports over each base morphism
    pullbacks: dict[str, Groupoid] = {}
    transport_ids: dict[str, dict[tuple, str]] = {}
    morphisms_info: dict[str, PiMorphism] = {}
    mor_table: dict[str, tuple[str, str]] = {}
    for u in GB.mor_ids():
        PBu, prA, _ = pullback(g.map, interval_functor(GB, u))
        pullbacks[u] = PBu
        found = list(iter_functors(PBu, GC, post=(f.map, prA), budget=budget))
        transport_ids[u] = {}
        for k, v in enumerate(found):
            mid = f"tr({u};{k})"
            morphisms_info[mid] = PiMorphism(u, v)
            transport_ids[u][_functor_key(v)] = mid
            src_id = section_ids[GB.src(u)].get(_restrict(v, fibers[GB.src(u)], "0"))
            tgt_id = section_ids[GB.tgt(u)].get(_restrict(v, fibers[GB.tgt(u)], "1"))
            assert src_id is not None and tgt_id is not None, "transport ends are sections"
            mor_table[mid] = (src_id, tgt_id)

    def find_transport(u: str, v_obj: dict, v_mor: dict, what: str) -> str:
        mid = transport_ids[u].get(_dict_key(v_obj, v_mor))
        if mid is None:
            raise AssertionError(f"{what} is not among the transports at {u}")
        return mid

    # identities: the section itself, read as a transport over the identity
    identity: dict[str, str] = {}
    for oid, info in objects_info.items():
        y, s = info.base_point, info.section
        u = GB.ident(y)
        v_obj, v_mor = {}, {}
        for o in pullbacks[u].objects:
            x, _ = split_pair(o)
            v_obj[o] = s.obj_map[x]
        for m in pullbacks[u].morphisms:
            h, _ = split_pair(m)
            v_mor[m] = s.mor_map[h]
        identity[oid] = find_transport(u, v_obj, v_mor, f"identity of {oid}")

    def least_lift(u: str, x: str) -> str:
        for m in GA.mor_ids():
            if GA.src(m) == x and g.on_mor(m) == u:
                return m
        raise NotAFibration(f"no lift of {u} at {x}")

    def compose_transports(u1: str, v1: Functor, u2: str, v2: Functor,
                           lift_choice=None) -> tuple[str, dict, dict]:
        """The transport of (u2, v2)∘(u1, v1) over u2∘u1."""
        u = GB.comp(u2, u1)
        PBu = pullbacks[u]
        v_obj, v_mor = {}, {}
        for o in PBu.objects:
            x, e = split_pair(o)
            v_obj[o] = v1.obj_map[f"({x},0)"] if e == "0" else v2.obj_map[f"({x},1)"]
        for m in PBu.morphisms:
            h, w = split_pair(m)
            if w == "id(0)":
                v_mor[m] = v1.mor_map[f"({h},id(0))"]
            elif w == "id(1)":
                v_mor[m] = v2.mor_map[f"({h},id(1))"]
            elif w == "phi":
                x = GA.src(h)
                lift = lift_choice(u1, x) if lift_choice else least_lift(u1, x)
                first = v1.mor_map[f"({lift},phi)"]
                rest = v2.mor_map[f"({GA.comp(h, GA.inv(lift))},phi)"]
                v_mor[m] = GC.comp(rest, first)
        for m in PBu.morphisms:
            h, w = split_pair(m)
            if w == "inv(phi)":
                v_mor[m] = GC.inv(v_mor[f"({GA.inv(h)},phi)"])
        return u, v_obj, v_mor

    compose: dict[tuple[str, str], str] = {}
    mids = sorted(mor_table)
    for m1 in mids:
        u1, v1 = morphisms_info[m1].base_morphism, morphisms_info[m1].transport
        for m2 in mids:
            if mor_table[m2][0] != mor_table[m1][1]:
                continue
            budget.spend()
            u2, v2 = morphisms_info[m2].base_morphism, morphisms_info[m2].transport
            u, v_obj, v_mor = compose_transports(u1, v1, u2, v2)
            compose[(m2, m1)] = find_transport(u, v_obj, v_mor, f"composite {m2}∘{m1}")

    # inverses: flip the interval coordinate
    inverse: dict[str, str] = {}
    for mid in mids:
        u = morphisms_info[mid].base_morphism
        v = morphisms_info[mid].transport
        ui = GB.inv(u)
        v_obj, v_mor = {}, {}
        for o in pullbacks[ui].objects:
            x, e = split_pair(o)
            v_obj[o] = v.obj_map[f"({x},{'1' if e == '0' else '0'})"]
        for m in pullbacks[ui].morphisms:
            h, w = split_pair(m)
            if w == "id(0)":
                v_mor[m] = v.mor_map[f"({h},id(1))"]
            elif w == "id(1)":
                v_mor[m] = v.mor_map[f"({h},id(0))"]
            elif w == "phi":
                v_mor[m] = v.mor_map[f"({h},inv(phi))"]
            else:
                v_mor[m] = v.mor_map[f"({h},phi)"]
        inverse[mid] = find_transport(ui, v_obj, v_mor, f"inverse of {mid}")

    dom = Groupoid(tuple(objects_info), dict(mor_table), identity, compose, inverse)

    # the involution conjugates everything by the three involutions
    alpha, beta, gamma = A.involution, B.involution, C.involution
    inv_obj: dict[str, str] = {}
    for oid, info in objects_info.items():
        y, s = info.base_point, info.section
        y2 = beta.obj_map[y]
        fib2 = fibers[y2]
        s_obj = {x: gamma.obj_map[s.obj_map[alpha.obj_map[x]]] for x in fib2.objects}
        s_mor = {m: gamma.mor_map[s.mor_map[alpha.mor_map[m]]] for m in fib2.morphisms}
        target = section_ids[y2].get(_dict_key(s_obj, s_mor))
        assert target is not None, "involution image of a section is a section"
        inv_obj[oid] = target
    inv_mor: dict[str, str] = {}
    for mid in mids:
        u = morphisms_info[mid].base_morphism
        v = morphisms_info[mid].transport
        u2 = beta.mor_map[u]
        v_obj, v_mor = {}, {}
        for o in pullbacks[u2].objects:
            x, e = split_pair(o)
            v_obj[o] = gamma.obj_map[v.obj_map[f"({alpha.obj_map[x]},{e})"]]
        for m in pullbacks[u2].morphisms:
            h, w = split_pair(m)
            v_mor[m] = gamma.mor_map[v.mor_map[f"({alpha.mor_map[h]},{w})"]]
        inv_mor[mid] = find_transport(u2, v_obj, v_mor, f"involution image of {mid}")
    dom_pi = InvolutiveGroupoid(dom, Functor(dom, dom, inv_obj, inv_mor))

    projection = EquivariantFunctor(
        dom_pi, B,
        Functor(
            dom, GB,
            {oid: info.base_point for oid, info in objects_info.items()},
            {mid: morphisms_info[mid].base_morphism for mid in mor_table},
        ),
    )
    bundle = PiBundle(
        g=g, f=f, dom_pi=dom_pi, projection=projection,
        objects_info=objects_info, morphisms_info=morphisms_info,
        fibers=fibers, pullbacks=pullbacks,
    )
    if check:
        problems = validate_involutive(dom_pi) + validate_equivariant(projection)
        assert not problems, "dependent product structure law failure: " + "; ".join(problems[:3])
    return bundle


def lift_independent(bundle: PiBundle, budget: Budget | int | None = None) -> bool:
    """Recompute every composite with every available lift; True if all agree."""
    budget = ensure_budget(budget)
    g = bundle.g
    GA, GB = g.dom.base, g.cod.base
    dom = bundle.dom_pi.base

    def all_lifts(u, x):
        return [m for m in GA.mor_ids() if GA.src(m) == x and g.on_mor(m) == u]

    for (m2, m1), res in dom.compose.items():
        u1 = bundle.morphisms_info[m1].base_morphism
        v1 = bundle.morphisms_info[m1].transport
        u2 = bundle.morphisms_info[m2].base_morphism
        v2 = bundle.morphisms_info[m2].transport
        u = GB.comp(u2, u1)
        want = bundle.morphisms_info[res].transport
        for o in bundle.pullbacks[u].morphisms:
            h, w = split_pair(o)
            if w != "phi":
                continue
            x = GA.src(h)
            for lift in all_lifts(u1, x):
                budget.spend()
                first = v1.mor_map[f"({lift},phi)"]
                rest = v2.mor_map[f"({GA.comp(h, GA.inv(lift))},phi)"]
                if bundle.f.dom.base.comp(rest, first) != want.mor_map[o]:
                    return False
    return True


# -- the adjunction -------------------------------------------------------------


def pullback_along(g: EquivariantFunctor, h: EquivariantFunctor):
    """g*h: the pullback of h: D -> B along g: A -> B, projecting to A."""
    P, prA, prD = equivariant_pullback(g, h)
    return P, prA, prD


def check_slice_over(m: EquivariantFunctor, a: EquivariantFunctor, b: EquivariantFunctor) -> None:
    """Require b∘m = a (m is a slice morphism from a to b)."""
    comp = compose_functors(b.map, m.map)
    if comp.obj_map != a.map.obj_map or comp.mor_map != a.map.mor_map:
        raise MalformedSliceMorphism("triangle does not commute")


def adjunction_forward(bundle: PiBundle, h: EquivariantFunctor,
                       v: EquivariantFunctor) -> EquivariantFunctor:
    """Transpose a slice morphism v: g*h -> f over A to h -> Pi_g f over B.

    v's domain must be the pullback of h along g with pair-ID objects
    (as produced by ``pullback_along``).
    """
    g, f = bundle.g, bundle.f
    P, prA, _ = pullback_along(g, h)
    if v.dom.base != P.base:
        raise MalformedSliceMorphism("v must be defined on the pullback of h along g")
    check_slice_over(v, prA, f)
    D = h.dom.base
    GB = g.cod.base

    obj_map: dict[str, str] = {}
    for x in D.objects:
        y = h.on_obj(x)
        fib = bundle.fibers[y]
        s_obj = {z: v.map.obj_map[f"({z},{x})"] for z in fib.objects}
        s_mor = {t: v.map.mor_map[f"({t},{D.ident(x)})"] for t in fib.morphisms}
        oid = bundle.object_id(y, s_obj, s_mor)
        assert oid is not None, "transposed object is a section"
        obj_map[x] = oid

    transport_lookup = {
        (info.base_morphism, _functor_key(info.transport)): mid
        for mid, info in bundle.morphisms_info.items()
    }
    mor_map: dict[str, str] = {}
    for u in D.mor_ids():
        bu = h.on_mor(u)
        PBu = bundle.pullbacks[bu]
        x, x2 = D.src(u), D.tgt(u)
        w_obj, w_mor = {}, {}
        for o in PBu.objects:
            z, e = split_pair(o)
            w_obj[o] = v.map.obj_map[f"({z},{x if e == '0' else x2})"]
        for m in PBu.morphisms:
            t, w = split_pair(m)
            if w == "id(0)":
                w_mor[m] = v.map.mor_map[f"({t},{D.ident(x)})"]
            elif w == "id(1)":
                w_mor[m] = v.map.mor_map[f"({t},{D.ident(x2)})"]
            elif w == "phi":
                w_mor[m] = v.map.mor_map[f"({t},{u})"]
            else:
                w_mor[m] = v.map.mor_map[f"({t},{D.inv(u)})"]
        mid = transport_lookup.get((bu, _dict_key(w_obj, w_mor)))
        assert mid is not None, "transposed morphism is a transport"
        mor_map[u] = mid
    k = EquivariantFunctor(h.dom, bundle.dom_pi, Functor(D, bundle.dom_pi.base, obj_map, mor_map))
    check_slice_over(k, h, bundle.projection)
    return k


def adjunction_backward(bundle: PiBundle, h: EquivariantFunctor,
                        k: EquivariantFunctor) -> EquivariantFunctor:
    """Transpose k: h -> Pi_g f over B back to a slice morphism g*h -> f."""
    g, f = bundle.g, bundle.f
    if k.cod.base != bundle.dom_pi.base:
        raise MalformedSliceMorphism("k must land in the dependent product")
    check_slice_over(k, h, bundle.projection)
    P, prA, _ = pullback_along(g, h)
    D = h.dom.base

    obj_map: dict[str, str] = {}
    for o in P.base.objects:
        z, x = split_pair(o)
        s = bundle.objects_info[k.on_obj(x)].section
        obj_map[o] = s.obj_map[z]
    mor_map: dict[str, str] = {}
    for m in P.base.morphisms:
        t, u = split_pair(m)
        tr = bundle.morphisms_info[k.on_mor(u)].transport
        mor_map[m] = tr.mor_map[f"({t},phi)"]
    v = EquivariantFunctor(P, f.dom, Functor(P.base, f.dom.base, obj_map, mor_map))
    check_slice_over(v, prA, f)
    return v


def enumerate_slice_homs(a: EquivariantFunctor, b: EquivariantFunctor,
                         budget: Budget | int | None = None) -> list[EquivariantFunctor]:
    """All morphisms from a to b in the slice over their shared codomain."""
    if a.cod.base != b.cod.base:
        raise MalformedSliceMorphism("slice homs need a shared codomain")
    budget = ensure_budget(budget)
    out = []
    for F in iter_functors(
        a.dom.base, b.dom.base,
        post=(b.map, a.map),
        equiv=(a.dom.involution, b.dom.involution),
        budget=budget,
    ):
        out.append(EquivariantFunctor(a.dom, b.dom, F))
    return out
