"""Syntactic formula classification and axiom-schema instantiation.

Classification is literal: a formula is first-order when no concept
quantifier occurs anywhere in it, existential-block (universal-block)
when it is a chain of concept existentials (universals) over a
first-order matrix.  No prenexing happens implicitly; a best-effort
hoister is available separately for callers that want one.
"""

from __future__ import annotations

import enum

from . import syntax as S
from .syntax import (
    OBJ, And, ConcVar, Eq, Exists, Forall, Iff, Implies, Not, ObjVar, Or,
    Pred, Proj, and_all, conc, exists_all, forall_all, free_vars, subst_par,
)


class SchemaError(Exception):
    pass


class NotFirstOrder(SchemaError):
    pass


class WrongClass(SchemaError):
    pass


class VariableCollision(SchemaError):
    pass


class BadArity(SchemaError):
    pass


class FormulaClass(enum.Enum):
    FIRST_ORDER = "FirstOrder"
    SIGMA11 = "Sigma11"
    PI11 = "Pi11"
    UNCLASSIFIED = "Unclassified"


def _has_concept_quantifier(f):
    if isinstance(f, (S.Forall, S.Exists)):
        return f.sort.is_concept or _has_concept_quantifier(f.body)
    if isinstance(f, S.Not):
        return _has_concept_quantifier(f.body)
    if isinstance(f, S._BinConn):
        return _has_concept_quantifier(f.lhs) or _has_concept_quantifier(f.rhs)
    return False


def classify(f):
    if not _has_concept_quantifier(f):
        return FormulaClass.FIRST_ORDER
    g = f
    while isinstance(g, Exists) and g.sort.is_concept:
        g = g.body
    if g is not f and not _has_concept_quantifier(g):
        return FormulaClass.SIGMA11
    g = f
    while isinstance(g, Forall) and g.sort.is_concept:
        g = g.body
    if g is not f and not _has_concept_quantifier(g):
        return FormulaClass.PI11
    return FormulaClass.UNCLASSIFIED


def admits(f, cls):
    """Whether f can play the given role; an empty quantifier block is
    allowed, so first-order formulas admit both block classes."""
    got = classify(f)
    if got is cls:
        return True
    if got is FormulaClass.FIRST_ORDER:
        return cls in (FormulaClass.SIGMA11, FormulaClass.PI11)
    return False


# ---------------------------------------------------------------------------
# schema identifiers

class SchemaId:
    """Identifier of an axiom schema, with its shape parameters."""

    KINDS = ("full-comp", "fo-comp", "delta11-comp", "sigma11-choice",
             "extensionality", "projection", "abstraction", "equiv-sentence")

    def __init__(self, kind, *params):
        if kind not in self.KINDS:
            raise SchemaError("unknown schema kind %r" % kind)
        self.kind = kind
        self.params = tuple(params)

    def __eq__(self, other):
        return (isinstance(other, SchemaId) and self.kind == other.kind
                and self.params == other.params)

    def __hash__(self):
        return hash((self.kind, self.params))

    def __repr__(self):
        if not self.params:
            return "SchemaId(%r)" % self.kind
        return "SchemaId(%r, %s)" % (self.kind, ", ".join(repr(p) for p in self.params))

    def render(self):
        return " ".join([self.kind] + [str(p) for p in self.params])


# ---------------------------------------------------------------------------
# comprehension and choice instances

def _comprehension_shell(phi, tuple_vars, r):
    tuple_vars = list(tuple_vars)
    n = len(tuple_vars)
    if n < 1:
        raise BadArity("comprehension needs at least one tuple variable")
    if len(set(tuple_vars)) != n:
        raise VariableCollision("tuple variables must be distinct")
    fv = free_vars(phi)
    if r in fv:
        raise VariableCollision("%r must not occur free in the matrix" % r)
    if r in tuple_vars:
        raise VariableCollision("%r collides with a tuple variable" % r)
    for v in tuple_vars:
        if v in fv and fv[v] != OBJ:
            raise VariableCollision("tuple variable %r is not object-sorted in the matrix" % v)
    rel = ConcVar(r, n)
    matrix = Iff(Pred(rel, [ObjVar(v) for v in tuple_vars]), phi)
    return Exists(r, conc(n), forall_all([(v, OBJ) for v in tuple_vars], matrix))


def full_comp_instance(phi, tuple_vars, r):
    """Concept-existence instance for an arbitrary matrix; parameters of
    phi other than the tuple variables stay free."""
    return _comprehension_shell(phi, tuple_vars, r)


def fo_comp_instance(phi, tuple_vars, r):
    if classify(phi) is not FormulaClass.FIRST_ORDER:
        raise NotFirstOrder("matrix contains a concept quantifier")
    return _comprehension_shell(phi, tuple_vars, r)


def delta11_comp_instance(phi, psi, tuple_vars, r):
    """(forall x̄ (phi <-> psi)) -> exists R forall x̄ (R x̄ <-> phi), for an
    existential-block phi and a universal-block psi."""
    if not admits(phi, FormulaClass.SIGMA11):
        raise WrongClass("left side does not admit an existential block")
    if not admits(psi, FormulaClass.PI11):
        raise WrongClass("right side does not admit a universal block")
    if r in free_vars(psi):
        raise VariableCollision("%r must not occur free in either side" % r)
    hyp = forall_all([(v, OBJ) for v in tuple_vars], Iff(phi, psi))
    return Implies(hyp, _comprehension_shell(phi, tuple_vars, r))


def sigma11_choice_instance(phi, xs, rprime, r):
    """[forall x̄ exists R' phi] -> exists R forall x̄ phi[R' := R[x̄]].

    xs are the m object variables, rprime the n-ary concept variable the
    choice extracts, r the fresh (m+n)-ary relation variable.
    """
    xs = list(xs)
    m = len(xs)
    if m < 1:
        raise BadArity("choice needs at least one object variable")
    if len(set(xs)) != m:
        raise VariableCollision("choice variables must be distinct")
    fv = free_vars(phi)
    if rprime not in fv or not fv[rprime].is_concept:
        raise WrongClass("%r is not a free concept variable of the matrix" % rprime)
    n = fv[rprime].arity
    if not admits(phi, FormulaClass.SIGMA11):
        raise WrongClass("matrix does not admit an existential block")
    if r in fv or r in xs:
        raise VariableCollision("%r must be fresh" % r)
    hyp = forall_all([(v, OBJ) for v in xs], Exists(rprime, conc(n), phi))
    chosen = Proj(ConcVar(r, m + n), [ObjVar(v) for v in xs])
    concl = Exists(r, conc(m + n),
                   forall_all([(v, OBJ) for v in xs], subst_par(phi, {rprime: chosen})))
    return Implies(hyp, concl)


# ---------------------------------------------------------------------------
# background axioms

def extensionality_axiom(m):
    """forall R S (R = S <-> forall ā (R ā <-> S ā))."""
    if m < 1:
        raise BadArity("extensionality needs arity >= 1")
    r, s = ConcVar("R", m), ConcVar("S", m)
    avars = ["a%d" % (i + 1) for i in range(m)]
    args = [ObjVar(a) for a in avars]
    inner = forall_all([(a, OBJ) for a in avars], Iff(Pred(r, args), Pred(s, args)))
    return forall_all([("R", conc(m)), ("S", conc(m))], Iff(Eq(r, s), inner))


def projection_axiom(m, n):
    """forall R ā b̄ ((R[ā]) b̄ <-> R(ā, b̄)) for an (m+n)-ary R."""
    if m < 1 or n < 1:
        raise BadArity("projection needs m, n >= 1")
    r = ConcVar("R", m + n)
    avars = ["a%d" % (i + 1) for i in range(m)]
    bvars = ["b%d" % (i + 1) for i in range(n)]
    aterms = [ObjVar(a) for a in avars]
    bterms = [ObjVar(b) for b in bvars]
    body = Iff(Pred(Proj(r, aterms), bterms), Pred(r, aterms + bterms))
    return forall_all([("R", conc(m + n))]
                      + [(a, OBJ) for a in avars] + [(b, OBJ) for b in bvars], body)


# ---------------------------------------------------------------------------
# equivalence formulas and abstraction principles

def equiv_parts(e):
    """The two free concept variables of a defining formula, sorted by
    name, plus their common arity; anything else is rejected."""
    fv = free_vars(e)
    concs = sorted((n, s) for n, s in fv.items() if s.is_concept)
    objs = [n for n, s in fv.items() if s.is_object]
    if objs or len(concs) != 2 or concs[0][1] != concs[1][1]:
        raise SchemaError(
            "defining formula must have exactly two free concept variables "
            "of one arity and no other free variables, got %r" % (fv,))
    return concs[0][0], concs[1][0], concs[0][1].arity


def apply_equiv(e, a, b):
    """E(A, B): simultaneous substitution of terms for E's two slots."""
    u, v, _ = equiv_parts(e)
    return subst_par(e, {u: a, v: b})


def equiv_sentence(e):
    """Universal closure of reflexivity, symmetry and transitivity of E."""
    u, v, n = equiv_parts(e)
    cs = conc(n)
    r, s, t = ConcVar("R", n), ConcVar("S", n), ConcVar("T", n)
    body = and_all([
        apply_equiv(e, r, r),
        Implies(apply_equiv(e, r, s), apply_equiv(e, s, r)),
        Implies(And(apply_equiv(e, r, s), apply_equiv(e, s, t)),
                apply_equiv(e, r, t)),
    ])
    return forall_all([("R", cs), ("S", cs), ("T", cs)], body)


def abstraction_principle(e, sym):
    """forall R S (abs(R) = abs(S) <-> E(R, S))."""
    u, v, n = equiv_parts(e)
    if sym.arity != n:
        raise BadArity("symbol %r has arity %d but E relates %d-ary concepts"
                       % (sym.id, sym.arity, n))
    cs = conc(n)
    r, s = ConcVar("R", n), ConcVar("S", n)
    body = Iff(Eq(S.Abs(sym.id, r), S.Abs(sym.id, s)), apply_equiv(e, r, s))
    return forall_all([("R", cs), ("S", cs)], body)


# ---------------------------------------------------------------------------
# named corpus formulas

def _graph_clauses(fname, left_member, right_member):
    """Clauses saying the binary concept `fname` is a bijection between
    the collections described by the two membership builders."""
    f = ConcVar(fname, 2)

    def fp(a, b):
        return Pred(f, [ObjVar(a), ObjVar(b)])

    return [
        forall_all([("a", OBJ), ("b", OBJ)],
                   Implies(fp("a", "b"), And(left_member("a"), right_member("b")))),
        forall_all([("a", OBJ)],
                   Implies(left_member("a"), Exists("b", OBJ, fp("a", "b")))),
        forall_all([("a", OBJ), ("b", OBJ), ("c", OBJ)],
                   Implies(And(fp("a", "b"), fp("a", "c")),
                           Eq(ObjVar("b"), ObjVar("c")))),
        forall_all([("a", OBJ), ("b", OBJ), ("c", OBJ)],
                   Implies(And(fp("a", "c"), fp("b", "c")),
                           Eq(ObjVar("a"), ObjVar("b")))),
        forall_all([("b", OBJ)],
                   Implies(right_member("b"), Exists("a", OBJ, fp("a", "b")))),
    ]


def coextensionality():
    return Eq(ConcVar("X", 1), ConcVar("Y", 1))


def equinumerosity():
    """Existence of a bijection graph between X and Y, written out."""
    def in_x(a):
        return Pred(ConcVar("X", 1), [ObjVar(a)])

    def in_y(b):
        return Pred(ConcVar("Y", 1), [ObjVar(b)])

    return Exists("f", conc(2), and_all(_graph_clauses("f", in_x, in_y)))


def field_membership(rname="R", xname="x"):
    """x is in the field of the binary concept R."""
    r = ConcVar(rname, 2)
    w = S.fresh_name("w", {rname, xname})
    return Exists(w, OBJ, Or(Pred(r, [ObjVar(xname), ObjVar(w)]),
                             Pred(r, [ObjVar(w), ObjVar(xname)])))


def well_order(rname="R"):
    """R is a strict linear order on its field and every non-empty
    subconcept of the field has an R-least element."""
    r = ConcVar(rname, 2)

    def rel(a, b):
        return Pred(r, [ObjVar(a), ObjVar(b)])

    def fld(x):
        return field_membership(rname, x)

    trans = forall_all([("x", OBJ), ("y", OBJ), ("z", OBJ)],
                       Implies(And(rel("x", "y"), rel("y", "z")), rel("x", "z")))
    irrefl = Forall("x", OBJ, Not(rel("x", "x")))
    total = forall_all([("x", OBJ), ("y", OBJ)],
                       Implies(And(fld("x"), And(fld("y"), Not(Eq(ObjVar("x"), ObjVar("y"))))),
                               Or(rel("x", "y"), rel("y", "x"))))
    zx = Pred(ConcVar("Z", 1), [ObjVar("x")])
    zy = Pred(ConcVar("Z", 1), [ObjVar("y")])
    nonempty = Exists("x", OBJ, zx)
    subfield = Forall("x", OBJ, Implies(zx, fld("x")))
    least = Exists("x", OBJ, And(zx, Forall("y", OBJ,
                                            Implies(And(zy, Not(Eq(ObjVar("y"), ObjVar("x")))),
                                                    rel("x", "y")))))
    minimal = Forall("Z", conc(1), Implies(And(nonempty, subfield), least))
    return and_all([trans, irrefl, total, minimal])


def order_isomorphism_exists(rname="R", sname="S"):
    def in_field_r(a):
        return field_membership(rname, a)

    def in_field_s(b):
        return field_membership(sname, b)

    clauses = _graph_clauses("f", in_field_r, in_field_s)
    f = ConcVar("f", 2)
    preserving = forall_all(
        [("a", OBJ), ("b", OBJ), ("c", OBJ), ("d", OBJ)],
        Implies(And(Pred(f, [ObjVar("a"), ObjVar("c")]),
                    Pred(f, [ObjVar("b"), ObjVar("d")])),
                Iff(Pred(ConcVar(rname, 2), [ObjVar("a"), ObjVar("b")]),
                    Pred(ConcVar(sname, 2), [ObjVar("c"), ObjVar("d")]))))
    return Exists("f", conc(2), and_all(clauses + [preserving]))


def ordinal_equivalence():
    """Binary concepts compare equal when, if either is a well-order,
    they are order-isomorphic."""
    return Implies(Or(well_order("R"), well_order("S")),
                   order_isomorphism_exists("R", "S"))


_CORPUS = {
    "blv_equiv": coextensionality,
    "hp_equiv": equinumerosity,
    "ordinal_equiv": ordinal_equivalence,
    "wo": well_order,
    "field": field_membership,
}


def corpus_formula(name):
    try:
        builder = _CORPUS[name]
    except KeyError:
        raise SchemaError("unknown corpus formula %r (known: %s)"
                          % (name, ", ".join(sorted(_CORPUS)))) from None
    return builder()


def corpus_names():
    return sorted(_CORPUS)


# ---------------------------------------------------------------------------
# best-effort hoister

def hoist_concept_quantifiers(f):
    """Pull concept quantifiers outward through conjunction and
    disjunction where that is sound.  Never applied implicitly; callers
    who need a literal block shape invoke it themselves and remain
    responsible for auditing the result."""
    if isinstance(f, (S.Forall, S.Exists)):
        return type(f)(f.var, f.sort, hoist_concept_quantifiers(f.body))
    if isinstance(f, S.Not):
        return Not(hoist_concept_quantifiers(f.body))
    if isinstance(f, (And, Or)):
        lhs = hoist_concept_quantifiers(f.lhs)
        rhs = hoist_concept_quantifiers(f.rhs)
        cls = type(f)
        if isinstance(lhs, (S.Forall, S.Exists)) and lhs.sort.is_concept:
            other = free_vars(rhs)
            v = lhs.var
            if v in other:
                nv = S.fresh_name(v, set(other) | set(free_vars(lhs.body)))
                body = subst_par(lhs.body, {v: S.var_of_sort(nv, lhs.sort)})
                lhs = type(lhs)(nv, lhs.sort, body)
            return type(lhs)(lhs.var, lhs.sort,
                             hoist_concept_quantifiers(cls(lhs.body, rhs)))
        if isinstance(rhs, (S.Forall, S.Exists)) and rhs.sort.is_concept:
            other = free_vars(lhs)
            v = rhs.var
            if v in other:
                nv = S.fresh_name(v, set(other) | set(free_vars(rhs.body)))
                body = subst_par(rhs.body, {v: S.var_of_sort(nv, rhs.sort)})
                rhs = type(rhs)(nv, rhs.sort, body)
            return type(rhs)(rhs.var, rhs.sort,
                             hoist_concept_quantifiers(cls(lhs, rhs.body)))
        return cls(lhs, rhs)
    if isinstance(f, (Implies, Iff)):
        return type(f)(hoist_concept_quantifiers(f.lhs), hoist_concept_quantifiers(f.rhs))
    return f
