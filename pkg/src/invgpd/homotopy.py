"""Canonical path objects, right-homotopy search, homotopy equivalences.

The canonical path object of a map f: A -> C has as objects the triples
(x, y, phi) with phi an isomorphism of A over an identity of C, and as
morphisms the pairs (sigma, tau) conjugating one triple into another. It
factors the diagonal A -> A x_C A as an injective-on-objects levelwise
equivalence followed by a map with the right lifting property against the
injective generators.

Right homotopies are always searched against this single construction;
existence does not depend on the choice of path object because all the
objects involved are fibrant in the structures we care about.
"""

from __future__ import annotations

from dataclasses import dataclass

from .budget import Budget, ensure_budget
from .core import Functor, Groupoid, classify_functor, pair_id
from .equivariant import (
    EquivariantFunctor,
    InvolutiveGroupoid,
    eq_compose,
    eq_identity,
    eq_pairing,
    equivariant_pullback,
    fixed_points,
    terminal_map,
)
from .errors import CodomainMismatch
from .search import iter_functors


@dataclass
class PathFactorization:
    source_map: EquivariantFunctor          # f: A -> C
    path: InvolutiveGroupoid                # P_C A
    delta1: EquivariantFunctor              # A -> P_C A
    delta2: EquivariantFunctor              # P_C A -> A x_C A
    product: InvolutiveGroupoid             # A x_C A
    pr1: EquivariantFunctor
    pr2: EquivariantFunctor
    diagonal: EquivariantFunctor            # A -> A x_C A


@dataclass
class HomotopyWitness:
    H: EquivariantFunctor                   # A -> P_C B
    f: EquivariantFunctor
    g: EquivariantFunctor


def path_object(f: EquivariantFunctor) -> PathFactorization:
    """The canonical path object of f, with delta2∘delta1 = diagonal."""
    A, C = f.dom, f.cod
    GA = A.base

    def po(phi):
        return f"po({phi})"

    def pm(phi, sigma, tau):
        return f"pm({phi},{sigma},{tau})"

    objs = [m for m in GA.mor_ids() if C.base.is_identity(f.on_mor(m))]
    objects = tuple(sorted(po(m) for m in objs))

    morphisms: dict[str, tuple[str, str]] = {}
    data: dict[str, tuple[str, str, str]] = {}
    for phi in objs:
        x, y = GA.morphisms[phi]
        for sigma in GA.mor_ids():
            if GA.src(sigma) != x:
                continue
            for tau in GA.mor_ids():
                if GA.src(tau) != y or f.on_mor(sigma) != f.on_mor(tau):
                    continue
                phi2 = GA.comp(GA.comp(tau, phi), GA.inv(sigma))
                mid = pm(phi, sigma, tau)
                morphisms[mid] = (po(phi), po(phi2))
                data[mid] = (phi, sigma, tau)

    identity = {po(phi): pm(phi, GA.ident(GA.src(phi)), GA.ident(GA.tgt(phi))) for phi in objs}
    compose = {}
    for m1, (phi1, s1, t1) in data.items():
        tgt1 = morphisms[m1][1]
        for m2, (phi2, s2, t2) in data.items():
            if po(phi2) != tgt1:
                continue
            compose[(m2, m1)] = pm(phi1, GA.comp(s2, s1), GA.comp(t2, t1))
    inverse = {}
    for m1, (phi, s, t) in data.items():
        phi2 = GA.comp(GA.comp(t, phi), GA.inv(s))
        inverse[m1] = pm(phi2, GA.inv(s), GA.inv(t))
    P = Groupoid(objects, morphisms, identity, compose, inverse)
    inv = Functor(
        P, P,
        {po(phi): po(A.eta_mor(phi)) for phi in objs},
        {m: pm(A.eta_mor(d[0]), A.eta_mor(d[1]), A.eta_mor(d[2])) for m, d in data.items()},
    )
    IP = InvolutiveGroupoid(P, inv)

    product, pr1, pr2 = equivariant_pullback(f, f)
    d1 = EquivariantFunctor(
        A, IP,
        Functor(
            GA, P,
            {x: po(GA.ident(x)) for x in GA.objects},
            {m: pm(GA.ident(GA.src(m)), m, m) for m in GA.morphisms},
        ),
    )
    d2 = EquivariantFunctor(
        IP, product,
        Functor(
            P, product.base,
            {po(phi): pair_id(*GA.morphisms[phi]) for phi in objs},
            {m: pair_id(d[1], d[2]) for m, d in data.items()},
        ),
    )
    diag = eq_pairing(eq_identity(A), eq_identity(A), product)
    return PathFactorization(
        source_map=f, path=IP, delta1=d1, delta2=d2,
        product=product, pr1=pr1, pr2=pr2, diagonal=diag,
    )


def path_factorization(over: EquivariantFunctor, tag=None,
                       budget: Budget | int | None = None,
                       max_gluing_steps: int = 8) -> PathFactorization:
    """A path object for the requested structure.

    The explicit tuple construction is a path object for the injective
    structure (and for plain groupoids, where there is no fixed-point
    condition), but its first leg need not be a projective trivial
    cofibration: a tuple (x, y, phi) of two fixed points and a fixed
    isomorphism is a fixed point not hit by the diagonal. Projective
    homotopies therefore factor the diagonal by the swapped-interval
    gluing construction instead, which attaches no fixed points.
    """
    from .lifting import StructureTag, factorize

    if tag is not None and tag == StructureTag.PROJECTIVE:
        product, pr1, pr2 = equivariant_pullback(over, over)
        A = over.dom
        diag = eq_pairing(eq_identity(A), eq_identity(A), product)
        fact = factorize(diag, StructureTag.PROJECTIVE, max_gluing_steps, budget)
        return PathFactorization(
            source_map=over, path=fact.j.cod, delta1=fact.j, delta2=fact.q,
            product=product, pr1=pr1, pr2=pr2, diagonal=diag,
        )
    return path_object(over)


def homotopy_against(pf: PathFactorization, f: EquivariantFunctor,
                     g: EquivariantFunctor,
                     budget: Budget | int | None = None) -> HomotopyWitness | None:
    """Search H: A -> P with delta2∘H = <f, g> against a fixed path object."""
    budget = ensure_budget(budget)
    target = eq_pairing(f, g, pf.product)
    for H in iter_functors(
        f.dom.base, pf.path.base,
        post=(pf.delta2.map, target.map),
        equiv=(f.dom.involution, pf.path.involution),
        budget=budget,
    ):
        return HomotopyWitness(H=EquivariantFunctor(f.dom, pf.path, H), f=f, g=g)
    return None


def find_natural_iso(
    f: EquivariantFunctor,
    g: EquivariantFunctor,
    over: EquivariantFunctor,
    strict_fixed: bool,
    budget: Budget | int | None = None,
) -> dict[str, str] | None:
    """An equivariant natural isomorphism f => g over the base, if any.

    Components live over identities of the base; with ``strict_fixed``
    the component at every fixed object must be an identity. Naturality
    makes components propagate along morphisms, so the search assigns one
    component per connected piece and derives the rest.
    """
    budget = ensure_budget(budget)
    A, X = f.dom, f.cod
    GA, GX = A.base, X.base
    nu: dict[str, str] = {}

    def ok(a: str, m: str) -> bool:
        if GX.morphisms[m] != (f.on_obj(a), g.on_obj(a)):
            return False
        if not over.cod.base.is_identity(over.on_mor(m)):
            return False
        if strict_fixed and A.eta_obj(a) == a and not GX.is_identity(m):
            return False
        return True

    def propagate(a: str, m: str, trail: list[str]) -> bool:
        stack = [(a, m)]
        while stack:
            budget.spend()
            a, m = stack.pop()
            if a in nu:
                if nu[a] != m:
                    return False
                continue
            if not ok(a, m):
                return False
            nu[a] = m
            trail.append(a)
            partner = (A.eta_obj(a), X.eta_mor(m))
            stack.append(partner)
            for alpha in GA.mor_ids():
                if GA.src(alpha) == a:
                    a2 = GA.tgt(alpha)
                    forced = GX.comp(GX.comp(g.on_mor(alpha), m), GX.inv(f.on_mor(alpha)))
                    stack.append((a2, forced))
        return True

    def solve(order: list[str]) -> bool:
        pending = [a for a in order if a not in nu]
        if not pending:
            return True
        a = pending[0]
        for m in GX.hom(f.on_obj(a), g.on_obj(a)):
            budget.spend()
            trail: list[str] = []
            if propagate(a, m, trail) and solve(order):
                return True
            for key in trail:
                del nu[key]
        return False

    if solve(list(GA.objects)):
        return dict(nu)
    return None


def witness_from_iso(f: EquivariantFunctor, g: EquivariantFunctor,
                     over: EquivariantFunctor, nu: dict[str, str]) -> HomotopyWitness:
    """Package a natural isomorphism as a map into the tuple path object."""
    pf = path_object(over)
    GA = f.dom.base
    obj_map = {a: f"po({nu[a]})" for a in GA.objects}
    mor_map = {
        alpha: f"pm({nu[GA.src(alpha)]},{f.on_mor(alpha)},{g.on_mor(alpha)})"
        for alpha in GA.morphisms
    }
    H = EquivariantFunctor(f.dom, pf.path, Functor(GA, pf.path.base, obj_map, mor_map))
    return HomotopyWitness(H=H, f=f, g=g)


def find_right_homotopy(
    f: EquivariantFunctor,
    g: EquivariantFunctor,
    over: EquivariantFunctor | None = None,
    tag=None,
    budget: Budget | int | None = None,
) -> HomotopyWitness | None:
    """Search for a right homotopy from f to g over the base.

    ``over`` is the structure map B -> C (terminal by default); f and g
    must agree after composing with it. ``tag`` selects the structure the
    homotopy lives in (projective by default, matching the theorems this
    feeds); existence is independent of the choice of path object within
    a fixed structure because all relevant objects are fibrant.

    A homotopy into any path object is the same data as an equivariant
    natural isomorphism over the base; for the projective structure its
    components at fixed objects must additionally be identities, because
    the glued path object has no fixed points outside the diagonal. The
    search runs on that characterization directly, and the returned
    witness is the induced map into the explicit tuple path object (the
    image of the glued witness under the comparison map).
    """
    from .lifting import StructureTag

    if tag is None:
        tag = StructureTag.PROJECTIVE
    if f.dom.base != g.dom.base or f.cod.base != g.cod.base:
        raise CodomainMismatch("homotopy needs parallel maps")
    if over is None:
        over = terminal_map(f.cod)
    cf = eq_compose(over, f)
    cg = eq_compose(over, g)
    if cf.map.obj_map != cg.map.obj_map or cf.map.mor_map != cg.map.mor_map:
        raise CodomainMismatch("maps do not agree over the base")
    budget = ensure_budget(budget)
    nu = find_natural_iso(f, g, over, strict_fixed=(tag == StructureTag.PROJECTIVE),
                          budget=budget)
    if nu is None:
        return None
    return witness_from_iso(f, g, over, nu)


def full_fixed_isomorphism(f: EquivariantFunctor) -> bool:
    """Does f restrict to an isomorphism of the full fixed subgroupoids?"""
    Gf, _ = fixed_points(f.dom)
    Hf, _ = fixed_points(f.cod)
    objs = [f.on_obj(x) for x in Gf.objects]
    if len(set(objs)) != len(objs) or set(objs) != set(Hf.objects):
        return False
    mors = [f.on_mor(m) for m in Gf.morphisms]
    return len(set(mors)) == len(mors) and set(mors) == set(Hf.morphisms)


def strict_fixed_isomorphism(f: EquivariantFunctor) -> bool:
    """Does f restrict to an isomorphism of the strict fixed subgroupoids?"""
    _, Gs = fixed_points(f.dom)
    _, Hs = fixed_points(f.cod)
    objs = [f.on_obj(x) for x in Gs.objects]
    if len(set(objs)) != len(objs) or set(objs) != set(Hs.objects):
        return False
    mors = [f.on_mor(m) for m in Gs.morphisms]
    return len(set(mors)) == len(mors) and set(mors) == set(Hs.morphisms)


def is_homotopy_equivalence_projective(f: EquivariantFunctor) -> bool:
    """Levelwise equivalence inducing an isomorphism of full fixed subgroupoids."""
    rep = classify_functor(f.map)
    return rep.equivalence and full_fixed_isomorphism(f)


def find_homotopy_inverse(
    f: EquivariantFunctor, tag=None, budget: Budget | int | None = None
) -> tuple[EquivariantFunctor, HomotopyWitness, HomotopyWitness] | None:
    """Brute-force homotopy inverse: enumerate candidates g and homotopies
    f∘g ~ id and g∘f ~ id (projective homotopies by default)."""
    budget = ensure_budget(budget)
    A, B = f.dom, f.cod
    for gmap in iter_functors(
        B.base, A.base, equiv=(B.involution, A.involution), budget=budget
    ):
        g = EquivariantFunctor(B, A, gmap)
        H1 = find_right_homotopy(eq_compose(f, g), eq_identity(B), tag=tag, budget=budget)
        if H1 is None:
            continue
        H2 = find_right_homotopy(eq_compose(g, f), eq_identity(A), tag=tag, budget=budget)
        if H2 is not None:
            return g, H1, H2
    return None
