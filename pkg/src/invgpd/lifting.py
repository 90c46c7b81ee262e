"""Lifting problems and the two fibration-structure predicate suites.

The solver enumerates diagonal fillers for a commuting square by
constrained functor search. On top of it sit:

* ``has_rlp`` / ``has_llp``  -- orthogonality against a finite set of maps,
  enumerating every commuting square and reporting the least failing one,
* ``projective_classify`` / ``injective_classify`` -- the predicate suites
  for the two structures on groupoids with involution,
* ``decompose_trivial_cofibration`` -- the greedy cell decomposition of a
  trivial cofibration (interval cells for plain groupoids, swapped-pair
  and fixed-point cells in the injective structure),
* ``factorize`` -- the one-step gluing construction, iterated until the
  right factor has the right lifting property against the generators.

Projective cofibrations are only ever reported as *bounded evidence*
(LLP against a finite family of trivial fibrations); trivial cofibrations
are decided exactly via the fixed-point characterization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .budget import Budget, ensure_budget
from .core import (
    Functor,
    classify_functor,
    compose_functors,
    is_trivial_cofibration_gpd,
)
from .equivariant import (
    CellInfo,
    EquivariantFunctor,
    InvolutiveGroupoid,
    REGISTRY,
    attach_cell,
    eq_compose,
    eq_identity,
    equivariant_product,
    extend_over_cell,
    terminal_map,
    trivial_action,
    validate_equivariant,
)
from .errors import (
    IterationCapExceeded,
    NonCommutingSquare,
    NotTrivialCofibration,
)
from .search import iter_functors


class StructureTag(str, Enum):
    PROJECTIVE = "projective"
    INJECTIVE = "injective"
    GPD = "gpd"


def generating_trivial_cofibrations(tag: StructureTag) -> list[tuple[str, EquivariantFunctor]]:
    if tag == StructureTag.GPD:
        return [("i", REGISTRY.map("i"))]
    if tag == StructureTag.PROJECTIVE:
        return [("Si", REGISTRY.map("Si"))]
    return [("Si", REGISTRY.map("Si")), ("iprime", REGISTRY.map("iprime"))]


def as_equivariant(f) -> EquivariantFunctor:
    """Wrap a plain functor as an equivariant one with identity involutions."""
    if isinstance(f, EquivariantFunctor):
        return f
    return EquivariantFunctor(trivial_action(f.dom), trivial_action(f.cod), f)


@dataclass
class LiftingProblem:
    """A commuting square: left i, right p, top and bottom."""

    left: EquivariantFunctor
    right: EquivariantFunctor
    top: EquivariantFunctor
    bottom: EquivariantFunctor

    def check_commutes(self) -> None:
        lhs = compose_functors(self.right.map, self.top.map)
        rhs = compose_functors(self.bottom.map, self.left.map)
        if lhs.obj_map != rhs.obj_map or lhs.mor_map != rhs.mor_map:
            raise NonCommutingSquare("p∘top != bottom∘i")


def square(left, right, top, bottom) -> LiftingProblem:
    return LiftingProblem(
        as_equivariant(left), as_equivariant(right), as_equivariant(top), as_equivariant(bottom)
    )


def iter_fillers(P: LiftingProblem, budget: Budget | int | None = None):
    """All diagonal fillers of the square, in deterministic order."""
    P.check_commutes()
    budget = ensure_budget(budget)
    i, p, top, bottom = P.left, P.right, P.top, P.bottom
    obj_seed: dict[str, str] = {}
    mor_seed: dict[str, str] = {}
    for a in i.dom.base.objects:
        b = i.on_obj(a)
        want = top.on_obj(a)
        if obj_seed.get(b, want) != want:
            return  # the constraint h∘i = top is unsatisfiable
        obj_seed[b] = want
    for m in i.dom.base.morphisms:
        n = i.on_mor(m)
        want = top.on_mor(m)
        if mor_seed.get(n, want) != want:
            return
        mor_seed[n] = want
    for F in iter_functors(
        i.cod.base,
        p.dom.base,
        obj_seed=obj_seed,
        mor_seed=mor_seed,
        post=(p.map, bottom.map),
        equiv=(i.cod.involution, p.dom.involution),
        budget=budget,
    ):
        yield EquivariantFunctor(i.cod, p.dom, F)


def solve_lifting(P: LiftingProblem, budget: Budget | int | None = None,
                  count_all: bool = False):
    """First filler of the square, or None; with ``count_all`` also the
    exact number of fillers (used for discrete-fibration uniqueness)."""
    budget = ensure_budget(budget)
    if count_all:
        first = None
        n = 0
        for h in iter_fillers(P, budget):
            if first is None:
                first = h
            n += 1
        return first, n
    for h in iter_fillers(P, budget):
        return h
    return None


def iter_squares(left: EquivariantFunctor, right: EquivariantFunctor,
                 budget: Budget | int | None = None):
    """All commuting squares with the given left and right maps.

    Enumerated in the engine's lexicographic order, so the first failure
    reported by ``has_rlp`` is the least one.
    """
    budget = ensure_budget(budget)
    A, B = left.dom, left.cod
    X, Y = right.dom, right.cod
    for g in iter_functors(A.base, X.base, equiv=(A.involution, X.involution), budget=budget):
        obj_seed = {left.on_obj(a): right.map.obj_map[g.obj_map[a]] for a in A.base.objects}
        mor_seed = {left.on_mor(m): right.map.mor_map[g.mor_map[m]] for m in A.base.morphisms}
        ok = all(
            obj_seed[left.on_obj(a)] == right.map.obj_map[g.obj_map[a]] for a in A.base.objects
        )
        if not ok:
            continue
        for h in iter_functors(
            B.base, Y.base, obj_seed=obj_seed, mor_seed=mor_seed,
            equiv=(B.involution, Y.involution), budget=budget,
        ):
            yield (EquivariantFunctor(A, X, g), EquivariantFunctor(B, Y, h))


def functor_as_dict(F: EquivariantFunctor) -> dict:
    return {"objects": dict(F.map.obj_map), "morphisms": dict(F.map.mor_map)}


@dataclass
class OrthogonalityReport:
    ok: bool
    squares_checked: int
    witness: dict | None = None  # least failing square, serializable

    def to_dict(self) -> dict:
        d = {"ok": self.ok, "squares_checked": self.squares_checked}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def _normalize_maps(maps) -> list[tuple[str, EquivariantFunctor]]:
    out = []
    for k, m in enumerate(maps):
        if isinstance(m, tuple):
            out.append((m[0], as_equivariant(m[1])))
        else:
            out.append((f"map{k}", as_equivariant(m)))
    return out


def has_rlp(p, generators, budget: Budget | int | None = None) -> OrthogonalityReport:
    """Does p have the right lifting property against every generator?"""
    p = as_equivariant(p)
    budget = ensure_budget(budget)
    checked = 0
    for name, gen in _normalize_maps(generators):
        for g, h in iter_squares(gen, p, budget):
            checked += 1
            prob = LiftingProblem(gen, p, g, h)
            if solve_lifting(prob, budget) is None:
                return OrthogonalityReport(
                    ok=False,
                    squares_checked=checked,
                    witness={
                        "generator": name,
                        "top": functor_as_dict(g),
                        "bottom": functor_as_dict(h),
                    },
                )
    return OrthogonalityReport(ok=True, squares_checked=checked)


def has_llp(i, tests, budget: Budget | int | None = None) -> OrthogonalityReport:
    """Does i have the left lifting property against every test map?"""
    i = as_equivariant(i)
    budget = ensure_budget(budget)
    checked = 0
    for name, p in _normalize_maps(tests):
        for g, h in iter_squares(i, p, budget):
            checked += 1
            prob = LiftingProblem(i, p, g, h)
            if solve_lifting(prob, budget) is None:
                return OrthogonalityReport(
                    ok=False,
                    squares_checked=checked,
                    witness={
                        "test": name,
                        "top": functor_as_dict(g),
                        "bottom": functor_as_dict(h),
                    },
                )
    return OrthogonalityReport(ok=True, squares_checked=checked)


# -- structure predicate suites ------------------------------------------------


def fixed_point_bijection(f: EquivariantFunctor) -> bool:
    dom_fixed = f.dom.fixed_objects()
    cod_fixed = set(f.cod.fixed_objects())
    image = [f.on_obj(x) for x in dom_fixed]
    return len(set(image)) == len(image) and set(image) == cod_fixed


@dataclass
class ProjectiveReport:
    weak_equivalence: bool
    fibration: bool
    trivial_cofibration: bool
    cofibration_evidence: bool
    evidence_family: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "weak_equivalence": self.weak_equivalence,
            "fibration": self.fibration,
            "trivial_cofibration": self.trivial_cofibration,
            "cofibration_evidence": self.cofibration_evidence,
            "evidence_family": list(self.evidence_family),
        }


def sample_trivial_fibrations() -> list[tuple[str, EquivariantFunctor]]:
    """A fixed family of projective trivial fibrations used as LLP evidence."""
    ic = REGISTRY.shape("Icheck")
    nb = REGISTRY.shape("nabla")
    s1, si = REGISTRY.shape("S1"), REGISTRY.shape("SI")
    fold = Functor(
        si.base, s1.base,
        {"l:0": "l:*", "l:1": "l:*", "r:0": "r:*", "r:1": "r:*"},
        {m: (f"l:id(*)" if m.startswith("l:") else "r:id(*)") for m in si.base.morphisms},
    )
    prod, pr1, _ = equivariant_product(ic, ic)
    return [
        ("Icheck->1!", terminal_map(ic)),
        ("nabla->1!", terminal_map(nb)),
        ("SI->S1", EquivariantFunctor(si, s1, fold)),
        ("IcheckxIcheck->Icheck", pr1),
    ]


def projective_classify(f, budget: Budget | int | None = None) -> ProjectiveReport:
    """Projective-structure flags.

    Weak equivalences and fibrations are levelwise and decided exactly;
    trivial cofibrations use the fixed-point characterization. The plain
    cofibration flag is only bounded evidence (LLP against a sampled
    family of trivial fibrations), never presented as a decision.
    """
    f = as_equivariant(f)
    rep = classify_functor(f.map)
    lw_tc = rep.injective_on_objects and rep.equivalence
    family = sample_trivial_fibrations()
    evidence = has_llp(f, family, budget).ok
    return ProjectiveReport(
        weak_equivalence=rep.equivalence,
        fibration=rep.isofibration,
        trivial_cofibration=lw_tc and fixed_point_bijection(f),
        cofibration_evidence=evidence,
        evidence_family=tuple(name for name, _ in family),
    )


@dataclass
class InjectiveReport:
    cofibration: bool
    weak_equivalence: bool
    fibration: bool
    trivial_cofibration: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def injective_classify(f, budget: Budget | int | None = None) -> InjectiveReport:
    """Injective-structure flags; the fibration test is exact (RLP against
    the swapped-interval and fixed-point generators)."""
    f = as_equivariant(f)
    rep = classify_functor(f.map)
    fib = has_rlp(f, generating_trivial_cofibrations(StructureTag.INJECTIVE), budget).ok
    return InjectiveReport(
        cofibration=rep.injective_on_objects,
        weak_equivalence=rep.equivalence,
        fibration=fib,
        trivial_cofibration=rep.injective_on_objects and rep.equivalence,
    )


def is_fibrant(X: InvolutiveGroupoid, tag: StructureTag,
               budget: Budget | int | None = None) -> bool:
    if tag in (StructureTag.PROJECTIVE, StructureTag.GPD):
        return True
    return has_rlp(terminal_map(X), generating_trivial_cofibrations(StructureTag.INJECTIVE), budget).ok


def is_trivial_cofibration(f, tag: StructureTag) -> bool:
    f = as_equivariant(f)
    rep = classify_functor(f.map)
    lw = rep.injective_on_objects and rep.equivalence
    if tag == StructureTag.PROJECTIVE:
        return lw and fixed_point_bijection(f)
    return lw  # GPD levelwise; INJECTIVE trivial cofibrations are levelwise


# -- cell decomposition ---------------------------------------------------------


@dataclass
class CellSequence:
    """A finite list of cell attachments witnessing a decomposition."""

    start: InvolutiveGroupoid
    steps: list[tuple[str, object]] = field(default_factory=list)

    def recompose(self) -> tuple[InvolutiveGroupoid, EquivariantFunctor]:
        X = self.start
        incl = eq_identity(X)
        for k, (kind, data) in enumerate(self.steps):
            X, step_incl, _ = attach_cell(X, kind, data, fresh=f"c{k}")
            incl = eq_compose(step_incl, incl)
        return X, incl


def decompose_trivial_cofibration(f, tag: StructureTag,
                                  budget: Budget | int | None = None) -> CellSequence:
    """Greedy cell decomposition of a trivial cofibration.

    Repeatedly picks the least object of the codomain missing from the
    image and attaches the cell dictated by its fixed/non-fixed status:
    an interval cell for plain groupoids, a swapped pair for a non-fixed
    object, a fixed-point cell (attached along a morphism m with
    eta(m) = inv(m)) for a fixed one.
    """
    f = as_equivariant(f)
    if not is_trivial_cofibration(f, tag):
        raise NotTrivialCofibration(f"not a {tag.value} trivial cofibration")
    B = f.cod
    comp = f
    X = f.dom
    seq = CellSequence(start=X)
    k = 0
    while True:
        image = {comp.on_obj(x) for x in X.base.objects}
        missing = [x for x in B.base.objects if x not in image]
        if not missing:
            break
        x = missing[0]
        choice = None
        for y in X.base.objects:
            for phi in B.base.hom(comp.on_obj(y), x):
                choice = (y, phi)
                break
            if choice:
                break
        assert choice is not None, "essential surjectivity failed"
        y, phi = choice
        fixed = B.eta_obj(x) == x
        if tag == StructureTag.GPD:
            X, incl, info = attach_cell(X, "i", y, fresh=f"c{k}")
            comp = extend_over_cell(
                comp, X, info, {info.new_objects[0]: x}, {info.struct_isos[0]: phi}
            )
            seq.steps.append(("i", y))
        elif fixed:
            if tag == StructureTag.PROJECTIVE:
                raise NotTrivialCofibration(
                    "projective trivial cofibrations hit every fixed point"
                )
            beta_phi = B.eta_mor(phi)
            m_B = B.base.comp(B.base.inv(beta_phi), phi)  # comp(y) -> comp(eta y)
            pre = [
                m for m in X.base.hom(y, X.eta_obj(y)) if comp.on_mor(m) == m_B
            ]
            assert len(pre) == 1, "fully faithful comparison expected"
            m_X = pre[0]
            X, incl, info = attach_cell(X, "iprime", m_X, fresh=f"c{k}")
            comp = extend_over_cell(
                comp, X, info, {info.new_objects[0]: x}, {info.struct_isos[0]: beta_phi}
            )
            seq.steps.append(("iprime", m_X))
        else:
            X, incl, info = attach_cell(X, "Si", y, fresh=f"c{k}")
            n0, n1 = info.new_objects
            c0, c1 = info.struct_isos
            comp = extend_over_cell(
                comp, X, info,
                {n0: x, n1: B.eta_obj(x)},
                {c0: phi, c1: B.eta_mor(phi)},
            )
            seq.steps.append(("Si", y))
        assert validate_equivariant(comp) == []
        k += 1
    return seq


# -- factorization via the gluing construction ----------------------------------


@dataclass
class Factorization:
    j: EquivariantFunctor  # trivial cofibration (a composite of cells)
    q: EquivariantFunctor  # has RLP against the tag's generators
    gluing_steps: int
    cells_attached: int


def factorize(f, tag: StructureTag, max_gluing_steps: int = 8,
              budget: Budget | int | None = None) -> Factorization:
    """Factor f as a cell composite followed by a generator-orthogonal map.

    One gluing step attaches a cell for every commuting square between a
    generator and the current right factor, exactly as in the small object
    argument; steps repeat until the right factor has the RLP or the cap
    is hit.
    """
    f = as_equivariant(f)
    budget = ensure_budget(budget)
    gens = generating_trivial_cofibrations(tag)
    X = f.dom
    q = f
    j = eq_identity(f.dom)
    cells = 0
    for step in range(max_gluing_steps + 1):
        if has_rlp(q, gens, budget).ok:
            return Factorization(j=j, q=q, gluing_steps=step, cells_attached=cells)
        squares = []
        for name, gen in gens:
            for g, h in iter_squares(gen, q, budget):
                squares.append((name, g, h))
        for idx, (name, g, h) in enumerate(squares):
            fresh = f"g{step}.{idx}"
            if name == "i":
                data = g.on_obj("*")
                X, incl, info = attach_cell(X, "i", data, fresh=fresh)
                q = extend_over_cell(
                    q, X, info, {info.new_objects[0]: h.on_obj("1")},
                    {info.struct_isos[0]: h.on_mor("phi")},
                )
            elif name == "Si":
                data = g.on_obj("l:*")
                X, incl, info = attach_cell(X, "Si", data, fresh=fresh)
                n0, n1 = info.new_objects
                c0, c1 = info.struct_isos
                q = extend_over_cell(
                    q, X, info,
                    {n0: h.on_obj("l:1"), n1: h.on_obj("r:1")},
                    {c0: h.on_mor("l:phi"), c1: h.on_mor("r:phi")},
                )
            else:  # iprime
                data = g.on_mor("phi")
                X, incl, info = attach_cell(X, "iprime", data, fresh=fresh)
                q = extend_over_cell(
                    q, X, info, {info.new_objects[0]: h.on_obj("2")},
                    {info.struct_isos[0]: h.on_mor("psi")},
                )
            j = eq_compose(incl, j)
            cells += 1
    raise IterationCapExceeded(
        f"gluing construction did not converge in {max_gluing_steps} steps"
    )
