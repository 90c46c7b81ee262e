"""Finite groupoids and functors, with a decidable predicate suite.

Everything is enumerated explicitly: a :class:`Groupoid` stores its full
composition, identity and inverse tables, so every predicate downstream
(equivalence, isofibration, lifting, ...) is decided by finite search.
Values are treated as immutable after construction; all operations are
pure functions of their inputs.

Conventions
-----------
* ``compose[(g, f)]`` is the composite ``g after f``; it is defined exactly
  on the composable pairs ``tgt(f) == src(g)``.
* All iteration orders are sorted by ID, so searches are deterministic and
  "least witness" always means lexicographically least.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .budget import Budget, ensure_budget
from .errors import CodomainMismatch, MalformedFunctor


@dataclass
class Groupoid:
    """A finite groupoid with explicit structure tables.

    objects    -- sorted tuple of object IDs
    morphisms  -- morphism ID -> (src object, tgt object)
    identity   -- object ID -> its identity morphism ID
    compose    -- (g, f) -> g∘f, total on composable pairs
    inverse    -- morphism ID -> inverse morphism ID
    """

    objects: tuple[str, ...]
    morphisms: dict[str, tuple[str, str]]
    identity: dict[str, str]
    compose: dict[tuple[str, str], str]
    inverse: dict[str, str]
    _hom: dict[tuple[str, str], tuple[str, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        self.objects = tuple(sorted(self.objects))
        hom: dict[tuple[str, str], list[str]] = {}
        for m in sorted(self.morphisms):
            hom.setdefault(self.morphisms[m], []).append(m)
        self._hom = {k: tuple(v) for k, v in hom.items()}

    # -- accessors ---------------------------------------------------------

    def src(self, m: str) -> str:
        return self.morphisms[m][0]

    def tgt(self, m: str) -> str:
        return self.morphisms[m][1]

    def comp(self, g: str, f: str) -> str:
        """The composite g∘f (f first)."""
        return self.compose[(g, f)]

    def inv(self, m: str) -> str:
        return self.inverse[m]

    def ident(self, x: str) -> str:
        return self.identity[x]

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        return self._hom.get((x, y), ())

    def is_identity(self, m: str) -> bool:
        s, t = self.morphisms[m]
        return s == t and self.identity.get(s) == m

    def mor_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.morphisms))

    def out_morphisms(self, x: str):
        for m in self.mor_ids():
            if self.src(m) == x:
                yield m

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"Groupoid({self.n_objects} objects, {self.n_morphisms} morphisms)"


@dataclass
class Functor:
    """A functor between finite groupoids, stored extensionally."""

    dom: Groupoid
    cod: Groupoid
    obj_map: dict[str, str]
    mor_map: dict[str, str]

    def on_obj(self, x: str) -> str:
        return self.obj_map[x]

    def on_mor(self, m: str) -> str:
        return self.mor_map[m]

    def image_objects(self) -> set[str]:
        return set(self.obj_map.values())

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"Functor({self.dom!r} -> {self.cod!r})"


@dataclass
class Cleavage:
    """A chosen system of lifts for an isofibration.

    ``lifts[(h, x)]`` is the chosen lift of the codomain isomorphism ``h``
    at the fiber object ``x``; a split cleavage also satisfies
    ``lifts[(id, x)] = id_x`` and closure under composition.
    """

    functor: Functor
    lifts: dict[tuple[str, str], str]

    def is_split(self) -> bool:
        F, G, H = self.functor, self.functor.dom, self.functor.cod
        for (h, x), m in self.lifts.items():
            if H.is_identity(h) and m != G.ident(x):
                return False
        for (h1, x), m1 in self.lifts.items():
            for h2 in H.out_morphisms(H.tgt(h1)):
                m2 = self.lifts.get((h2, G.tgt(m1)))
                want = self.lifts.get((H.comp(h2, h1), x))
                if m2 is None or want is None or want != G.comp(m2, m1):
                    return False
        return True


@dataclass
class FunctorReport:
    """Decidable predicate flags for a functor (see ``classify_functor``)."""

    injective_on_objects: bool
    full: bool
    faithful: bool
    essentially_surjective: bool
    equivalence: bool
    isofibration: bool
    discrete_fibration: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# -- construction helpers ---------------------------------------------------


def build_groupoid(objects, morphisms, identity, compose, inverse) -> Groupoid:
    return Groupoid(tuple(objects), dict(morphisms), dict(identity), dict(compose), dict(inverse))


def discrete(objects) -> Groupoid:
    objects = tuple(sorted(objects))
    morphisms = {f"id({x})": (x, x) for x in objects}
    identity = {x: f"id({x})" for x in objects}
    compose = {(i, i): i for i in morphisms}
    inverse = {i: i for i in morphisms}
    return Groupoid(objects, morphisms, identity, compose, inverse)


def empty_groupoid() -> Groupoid:
    return discrete(())


def unit() -> Groupoid:
    return discrete(("*",))


def codiscrete(objects) -> Groupoid:
    """Exactly one morphism between each ordered pair of objects."""
    objects = tuple(sorted(objects))

    def mid(x, y):
        return f"id({x})" if x == y else f"iso({x},{y})"

    morphisms = {mid(x, y): (x, y) for x in objects for y in objects}
    identity = {x: mid(x, x) for x in objects}
    compose = {}
    for x in objects:
        for y in objects:
            for z in objects:
                compose[(mid(y, z), mid(x, y))] = mid(x, z)
    inverse = {mid(x, y): mid(y, x) for x in objects for y in objects}
    return Groupoid(objects, morphisms, identity, compose, inverse)


def interval() -> Groupoid:
    """The groupoid with two objects 0, 1 and one isomorphism phi between them."""
    objects = ("0", "1")
    morphisms = {
        "id(0)": ("0", "0"),
        "id(1)": ("1", "1"),
        "phi": ("0", "1"),
        "inv(phi)": ("1", "0"),
    }
    identity = {"0": "id(0)", "1": "id(1)"}
    compose = {}
    for m, (s, t) in morphisms.items():
        compose[(m, identity[s])] = m
        compose[(identity[t], m)] = m
    compose[("inv(phi)", "phi")] = "id(0)"
    compose[("phi", "inv(phi)")] = "id(1)"
    inverse = {"id(0)": "id(0)", "id(1)": "id(1)", "phi": "inv(phi)", "inv(phi)": "phi"}
    return Groupoid(objects, morphisms, identity, compose, inverse)


def identity_functor(G: Groupoid) -> Functor:
    return Functor(G, G, {x: x for x in G.objects}, {m: m for m in G.morphisms})


def compose_functors(g: Functor, f: Functor) -> Functor:
    """The composite g∘f."""
    if g.dom is not f.cod and g.dom != f.cod:
        raise CodomainMismatch("functor composition: cod(f) != dom(g)")
    return Functor(
        f.dom,
        g.cod,
        {x: g.obj_map[y] for x, y in f.obj_map.items()},
        {m: g.mor_map[n] for m, n in f.mor_map.items()},
    )


def functors_equal(f: Functor, g: Functor) -> bool:
    return f.obj_map == g.obj_map and f.mor_map == g.mor_map


def full_subgroupoid(G: Groupoid, objs) -> tuple[Groupoid, Functor]:
    """The full subgroupoid on ``objs`` together with its inclusion."""
    objs = tuple(sorted(set(objs)))
    keep = set(objs)
    morphisms = {m: st for m, st in G.morphisms.items() if st[0] in keep and st[1] in keep}
    identity = {x: G.identity[x] for x in objs}
    compose = {
        (g, f): h
        for (g, f), h in G.compose.items()
        if g in morphisms and f in morphisms
    }
    inverse = {m: G.inverse[m] for m in morphisms}
    sub = Groupoid(objs, morphisms, identity, compose, inverse)
    incl = Functor(sub, G, {x: x for x in objs}, {m: m for m in morphisms})
    return sub, incl


# -- validation --------------------------------------------------------------


def validate_groupoid(G: Groupoid) -> list[str]:
    """Check every groupoid law; return one message per violation."""
    problems: list[str] = []
    for m, (s, t) in G.morphisms.items():
        if s not in G.identity or t not in G.identity:
            problems.append(f"morphism {m} has endpoint outside the object set")
    for x in G.objects:
        i = G.identity.get(x)
        if i is None or i not in G.morphisms:
            problems.append(f"object {x} has no identity morphism")
            continue
        if G.morphisms[i] != (x, x):
            problems.append(f"identity {i} of {x} is not an endomorphism of {x}")
    mids = G.mor_ids()
    for g in mids:
        for f in mids:
            composable = G.tgt(f) == G.src(g)
            present = (g, f) in G.compose
            if composable and not present:
                problems.append(f"composite of ({g}, {f}) is missing")
            elif not composable and present:
                problems.append(f"composite of non-composable pair ({g}, {f}) declared")
            elif present:
                h = G.compose[(g, f)]
                if h not in G.morphisms:
                    problems.append(f"composite {h} of ({g}, {f}) is not a morphism")
                elif G.morphisms[h] != (G.src(f), G.tgt(g)):
                    problems.append(f"composite {h} of ({g}, {f}) has wrong endpoints")
    if problems:
        return problems  # structure too broken for the law checks below
    for m in mids:
        s, t = G.morphisms[m]
        if G.comp(m, G.ident(s)) != m or G.comp(G.ident(t), m) != m:
            problems.append(f"identity law fails at {m}")
    for h in mids:
        for g in mids:
            if G.tgt(g) != G.src(h):
                continue
            for f in mids:
                if G.tgt(f) != G.src(g):
                    continue
                if G.comp(G.comp(h, g), f) != G.comp(h, G.comp(g, f)):
                    problems.append(f"associativity fails at ({h}, {g}, {f})")
    for m in mids:
        w = G.inverse.get(m)
        if w is None or w not in G.morphisms:
            problems.append(f"morphism {m} has no inverse")
            continue
        s, t = G.morphisms[m]
        if G.morphisms[w] != (t, s):
            problems.append(f"inverse {w} of {m} has wrong endpoints")
        elif G.comp(w, m) != G.ident(s) or G.comp(m, w) != G.ident(t):
            problems.append(f"inverse law fails at {m} (inverse {w})")
    return problems


def validate_functor(F: Functor) -> list[str]:
    problems: list[str] = []
    for x in F.dom.objects:
        if x not in F.obj_map:
            problems.append(f"object {x} not mapped")
        elif F.obj_map[x] not in F.cod.identity:
            problems.append(f"object {x} mapped outside the codomain")
    for m, (s, t) in F.dom.morphisms.items():
        n = F.mor_map.get(m)
        if n is None:
            problems.append(f"morphism {m} not mapped")
            continue
        if n not in F.cod.morphisms:
            problems.append(f"morphism {m} mapped outside the codomain")
            continue
        if F.cod.morphisms[n] != (F.obj_map.get(s), F.obj_map.get(t)):
            problems.append(f"morphism {m}: source/target not preserved")
    if problems:
        return problems
    for x in F.dom.objects:
        if F.mor_map[F.dom.ident(x)] != F.cod.ident(F.obj_map[x]):
            problems.append(f"identity of {x} not preserved")
    for (g, f), h in F.dom.compose.items():
        if F.cod.compose[(F.mor_map[g], F.mor_map[f])] != F.mor_map[h]:
            problems.append(f"composition not preserved at ({g}, {f})")
    return problems


def require_valid_functor(F: Functor) -> None:
    problems = validate_functor(F)
    if problems:
        raise MalformedFunctor("; ".join(problems))


# -- predicates --------------------------------------------------------------


def lifts_of(F: Functor, h: str, x: str) -> list[str]:
    """All morphisms of dom(F) with source ``x`` mapping to ``h``."""
    return [m for m in F.dom.mor_ids() if F.dom.src(m) == x and F.mor_map[m] == h]


def classify_functor(F: Functor) -> FunctorReport:
    """Decide the standard predicate flags of a functor by enumeration."""
    require_valid_functor(F)
    G, H = F.dom, F.cod

    inj = len(set(F.obj_map.values())) == len(F.obj_map)

    full = True
    faithful = True
    for x in G.objects:
        for y in G.objects:
            images = [F.mor_map[m] for m in G.hom(x, y)]
            if len(set(images)) != len(images):
                faithful = False
            target = H.hom(F.obj_map[x], F.obj_map[y])
            if not set(target) <= set(images):
                full = False

    fiber: dict[str, list[str]] = {}
    for x in G.objects:
        fiber.setdefault(F.obj_map[x], []).append(x)

    ess = all(
        any(H.hom(F.obj_map[x], c) for x in G.objects) for c in H.objects
    )

    lift_count: dict[tuple[str, str], int] = {}
    for m in G.mor_ids():
        key = (G.src(m), F.mor_map[m])
        lift_count[key] = lift_count.get(key, 0) + 1

    isofib = True
    discrete_fib = True
    for h in H.mor_ids():
        for x in fiber.get(H.src(h), ()):
            n = lift_count.get((x, h), 0)
            if n == 0:
                isofib = False
                discrete_fib = False
            elif n > 1:
                discrete_fib = False

    return FunctorReport(
        injective_on_objects=inj,
        full=full,
        faithful=faithful,
        essentially_surjective=ess,
        equivalence=full and faithful and ess,
        isofibration=isofib,
        discrete_fibration=isofib and discrete_fib,
    )


def is_trivial_cofibration_gpd(F: Functor) -> bool:
    """Injective-on-objects equivalence of groupoids."""
    rep = classify_functor(F)
    return rep.injective_on_objects and rep.equivalence


def is_trivial_fibration_gpd(F: Functor) -> bool:
    """Surjective-on-objects, fully faithful functor."""
    rep = classify_functor(F)
    surj = set(F.obj_map.values()) == set(F.cod.objects)
    return surj and rep.full and rep.faithful


def find_split_cleavage(F: Functor, budget: Budget | int | None = None) -> Cleavage | None:
    """Search for a split cleavage of ``F``.

    Backtracks over choice functions (codomain iso, fiber object) -> lift,
    propagating the split laws; candidates are tried in ID order so the
    result is deterministic. Returns ``None`` when no split cleavage exists
    (in particular when ``F`` is not an isofibration).
    """
    require_valid_functor(F)
    budget = ensure_budget(budget)
    G, H = F.dom, F.cod

    pairs = []
    for h in H.mor_ids():
        y = H.src(h)
        for x in G.objects:
            if F.obj_map[x] == y:
                pairs.append((h, x))
    pairs.sort()

    candidates: dict[tuple[str, str], list[str]] = {}
    for (h, x) in pairs:
        ls = lifts_of(F, h, x)
        if not ls:
            return None  # not an isofibration
        candidates[(h, x)] = ls

    lifts: dict[tuple[str, str], str] = {}

    def set_lift(key, value, trail) -> bool:
        if key in lifts:
            return lifts[key] == value
        h, x = key
        if G.src(value) != x or F.mor_map[value] != h:
            return False
        lifts[key] = value
        trail.append(key)
        # split closure against everything already chosen
        stack = [key]
        while stack:
            (h1, x1) = stack.pop()
            m1 = lifts[(h1, x1)]
            for (h2, x2), m2 in list(lifts.items()):
                budget.spend()
                if x2 == G.tgt(m1) and H.src(h2) == H.tgt(h1):
                    comp_key = (H.comp(h2, h1), x1)
                    comp_val = G.comp(m2, m1)
                    if comp_key in lifts:
                        if lifts[comp_key] != comp_val:
                            return False
                    else:
                        if G.src(comp_val) != comp_key[1] or F.mor_map[comp_val] != comp_key[0]:
                            return False
                        lifts[comp_key] = comp_val
                        trail.append(comp_key)
                        stack.append(comp_key)
                if x1 == G.tgt(m2) and H.src(h1) == H.tgt(h2):
                    comp_key = (H.comp(h1, h2), x2)
                    comp_val = G.comp(m1, m2)
                    if comp_key in lifts:
                        if lifts[comp_key] != comp_val:
                            return False
                    else:
                        if G.src(comp_val) != comp_key[1] or F.mor_map[comp_val] != comp_key[0]:
                            return False
                        lifts[comp_key] = comp_val
                        trail.append(comp_key)
                        stack.append(comp_key)
        return True

    # identities are forced by splitness
    base_trail: list = []
    for (h, x) in pairs:
        if H.is_identity(h):
            if not set_lift((h, x), G.ident(x), base_trail):
                return None

    def solve(i: int) -> bool:
        while i < len(pairs) and pairs[i] in lifts:
            i += 1
        if i == len(pairs):
            return True
        key = pairs[i]
        for value in candidates[key]:
            budget.spend()
            trail: list = []
            if set_lift(key, value, trail) and solve(i + 1):
                return True
            for k in trail:
                del lifts[k]
        return False

    if not solve(0):
        return None
    cleavage = Cleavage(F, dict(lifts))
    assert cleavage.is_split()
    return cleavage


# -- finite (co)limits --------------------------------------------------------


def pair_id(a: str, b: str) -> str:
    return f"({a},{b})"


def binary_product(G: Groupoid, H: Groupoid) -> tuple[Groupoid, Functor, Functor]:
    objects = tuple(pair_id(x, y) for x in G.objects for y in H.objects)
    morphisms = {}
    for m in G.mor_ids():
        for n in H.mor_ids():
            morphisms[pair_id(m, n)] = (
                pair_id(G.src(m), H.src(n)),
                pair_id(G.tgt(m), H.tgt(n)),
            )
    identity = {pair_id(x, y): pair_id(G.ident(x), H.ident(y)) for x in G.objects for y in H.objects}
    compose = {}
    for (g1, f1), h1 in G.compose.items():
        for (g2, f2), h2 in H.compose.items():
            compose[(pair_id(g1, g2), pair_id(f1, f2))] = pair_id(h1, h2)
    inverse = {pair_id(m, n): pair_id(G.inv(m), H.inv(n)) for m in G.morphisms for n in H.morphisms}
    P = Groupoid(objects, morphisms, identity, compose, inverse)
    pr1 = Functor(P, G, {pair_id(x, y): x for x in G.objects for y in H.objects},
                  {pair_id(m, n): m for m in G.morphisms for n in H.morphisms})
    pr2 = Functor(P, H, {pair_id(x, y): y for x in G.objects for y in H.objects},
                  {pair_id(m, n): n for m in G.morphisms for n in H.morphisms})
    return P, pr1, pr2


def coproduct(G: Groupoid, H: Groupoid) -> tuple[Groupoid, Functor, Functor]:
    def l(x):
        return f"l:{x}"

    def r(x):
        return f"r:{x}"

    objects = tuple(sorted([l(x) for x in G.objects] + [r(x) for x in H.objects]))
    morphisms = {}
    for m, (s, t) in G.morphisms.items():
        morphisms[l(m)] = (l(s), l(t))
    for m, (s, t) in H.morphisms.items():
        morphisms[r(m)] = (r(s), r(t))
    identity = {l(x): l(G.identity[x]) for x in G.objects}
    identity.update({r(x): r(H.identity[x]) for x in H.objects})
    compose = {(l(g), l(f)): l(h) for (g, f), h in G.compose.items()}
    compose.update({(r(g), r(f)): r(h) for (g, f), h in H.compose.items()})
    inverse = {l(m): l(w) for m, w in G.inverse.items()}
    inverse.update({r(m): r(w) for m, w in H.inverse.items()})
    C = Groupoid(objects, morphisms, identity, compose, inverse)
    inl = Functor(G, C, {x: l(x) for x in G.objects}, {m: l(m) for m in G.morphisms})
    inr = Functor(H, C, {x: r(x) for x in H.objects}, {m: r(m) for m in H.morphisms})
    return C, inl, inr


def pullback(f: Functor, g: Functor) -> tuple[Groupoid, Functor, Functor]:
    """The pullback of ``f`` and ``g`` over their shared codomain."""
    if f.cod != g.cod:
        raise CodomainMismatch("pullback needs a shared codomain")
    A, B = f.dom, g.dom
    obj_match: dict[str, list[str]] = {}
    for y in B.objects:
        obj_match.setdefault(g.obj_map[y], []).append(y)
    objects = tuple(
        pair_id(x, y) for x in A.objects for y in obj_match.get(f.obj_map[x], ())
    )
    mor_match: dict[str, list[str]] = {}
    for n in B.mor_ids():
        mor_match.setdefault(g.mor_map[n], []).append(n)
    morphisms = {}
    for m in A.mor_ids():
        for n in mor_match.get(f.mor_map[m], ()):
            morphisms[pair_id(m, n)] = (
                pair_id(A.src(m), B.src(n)),
                pair_id(A.tgt(m), B.tgt(n)),
            )
    identity = {
        o: pair_id(A.identity[x], B.identity[y])
        for o in objects
        for x, y in [split_pair(o)]
    }
    by_tgt: dict[str, list[str]] = {}
    for p in morphisms:
        by_tgt.setdefault(morphisms[p][1], []).append(p)
    compose = {}
    for p1 in morphisms:
        m1, n1 = split_pair(p1)
        for p2 in by_tgt.get(morphisms[p1][0], ()):
            m2, n2 = split_pair(p2)
            compose[(p1, p2)] = pair_id(A.comp(m1, m2), B.comp(n1, n2))
    inverse = {p: pair_id(A.inv(m), B.inv(n)) for p in morphisms for m, n in [split_pair(p)]}
    P = Groupoid(objects, morphisms, identity, compose, inverse)
    pr1 = Functor(P, A, {o: split_pair(o)[0] for o in objects},
                  {p: split_pair(p)[0] for p in morphisms})
    pr2 = Functor(P, B, {o: split_pair(o)[1] for o in objects},
                  {p: split_pair(p)[1] for p in morphisms})
    return P, pr1, pr2


def split_pair(pid: str) -> tuple[str, str]:
    """Invert :func:`pair_id` (IDs may themselves contain balanced pairs)."""
    assert pid.startswith("(") and pid.endswith(")")
    body = pid[1:-1]
    depth = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i], body[i + 1:]
    raise ValueError(f"not a pair id: {pid}")


def find_isomorphism(G: Groupoid, H: Groupoid, budget: Budget | int | None = None,
                     obj_seed: dict | None = None) -> Functor | None:
    """Search for an isomorphism of groupoids G -> H.

    Backtracks over object bijections, then hom bijections, in ID order;
    the first success wins, so the answer is deterministic. ``obj_seed``
    pins part of the object map (used for over-the-codomain comparisons).
    """
    from .search import iter_functors  # local import to avoid a cycle

    if G.n_objects != H.n_objects or G.n_morphisms != H.n_morphisms:
        return None
    budget = ensure_budget(budget)
    for F in iter_functors(G, H, bijective=True, obj_seed=obj_seed, budget=budget):
        return F
    return None


def pairing(f: Functor, g: Functor, product: Groupoid) -> Functor:
    """The functor <f, g> into a product (or pullback) built from pair IDs."""
    if f.dom != g.dom:
        raise CodomainMismatch("pairing needs a shared domain")
    obj_map = {x: pair_id(f.obj_map[x], g.obj_map[x]) for x in f.dom.objects}
    mor_map = {m: pair_id(f.mor_map[m], g.mor_map[m]) for m in f.dom.morphisms}
    for o in obj_map.values():
        if o not in product.identity:
            raise CodomainMismatch("pairing does not land in the given product")
    return Functor(f.dom, product, obj_map, mor_map)
