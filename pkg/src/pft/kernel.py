"""Trusted checker for Hilbert-style derivation scripts.

A derivation is a numbered list of lines, each carrying a formula and a
justification.  Lines are accepted when they instantiate a logical
axiom, are recognized as a theory axiom, or follow from earlier lines
by modus ponens, generalization, or the equality rules (reflexivity,
replacement at explicit paths, term congruence).  Alpha-equivalence is
the kernel's identity on formulas throughout.

Scripts are hypothesis-free: every line is a theorem of its theory, so
generalization carries no eigenvariable bookkeeping beyond the rule
itself.
"""

from __future__ import annotations

from . import schemas as Sc
from . import syntax as S
from .syntax import (
    OBJ, Abs, And, ConcVar, Eq, Exists, Forall, Iff, Implies, Not, ObjVar,
    Pred, Proj, Signature, AbstractionSymbol, alpha_eq, conc, free_vars,
    free_vars_term, substitute, term_sort, well_sorted,
)


class KernelError(Exception):
    pass


class BadFreeVariables(KernelError):
    pass


class WrongLanguageLevel(KernelError):
    pass


class CertificateRejected(KernelError):
    pass


class LevelMismatch(KernelError):
    pass


# ---------------------------------------------------------------------------
# theories

class TheoryId:
    KINDS = ("sigma11-os", "pft", "pft2", "pft-star")

    def __init__(self, kind):
        if kind not in self.KINDS:
            raise KernelError("unknown theory %r" % kind)
        self.kind = kind

    def __eq__(self, other):
        return isinstance(other, TheoryId) and self.kind == other.kind

    def __hash__(self):
        return hash(self.kind)

    def __repr__(self):
        return "TheoryId(%r)" % self.kind


SIGMA11_OS = TheoryId("sigma11-os")
PFT = TheoryId("pft")
PFT2 = TheoryId("pft2")
PFT_STAR = TheoryId("pft-star")

_THEORY_NAMES = {
    "sigma11os": SIGMA11_OS, "sigma11-os": SIGMA11_OS,
    "pft": PFT, "pft2": PFT2, "pftstar": PFT_STAR, "pft-star": PFT_STAR,
}


def theory_by_name(name):
    try:
        return _THEORY_NAMES[name.lower()]
    except KeyError:
        raise KernelError("unknown theory name %r" % name) from None


def registry_level_for(theory):
    return {"sigma11-os": 0, "pft": 1, "pft2": 2, "pft-star": 0}[theory.kind]


# ---------------------------------------------------------------------------
# certification registry

def canonical_abstraction_id(e, slots=None):
    """Canonical operator id for a defining formula.

    The two concept slots are renamed to fixed placeholders before
    hashing, so the id depends only on the formula up to renaming.  By
    default slots are E's free concept variables in name order.
    """
    if slots is None:
        u, v, n = Sc.equiv_parts(e)
    else:
        u, v = slots
        n = free_vars(e)[u].arity
    normal = S.subst_par(e, {u: ConcVar("#1", n), v: ConcVar("#2", n)})
    return S.canonical_symbol_id(normal)


class RegistryEntry:
    def __init__(self, e, symbol, certificate, level):
        self.e = e
        self.symbol = symbol
        self.certificate = certificate
        self.level = level

    def __repr__(self):
        return "RegistryEntry(%s, arity=%d, level=%d)" % (
            self.symbol.id, self.symbol.arity, self.level)


class Registry:
    """Append-only list of certified defining formulas.

    Level 1 entries are certified in the background theory over the base
    language; level 2 entries may mention level 1 operators and are
    certified in the level 1 theory.
    """

    def __init__(self, level=1, entries=()):
        if level not in (1, 2):
            raise KernelError("registry level must be 1 or 2")
        self.level = level
        self.entries = tuple(entries)
        for entry in self.entries:
            if entry.level > level:
                raise KernelError("entry level exceeds registry level")

    def visible(self, level):
        return [e for e in self.entries if e.level <= level]

    def by_id(self, sym_id, level):
        for e in self.entries:
            if e.level <= level and e.symbol.id == sym_id:
                return e
        return None

    def signature(self, level):
        return Signature([e.symbol for e in self.visible(level)])

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return "Registry(level=%d, entries=%r)" % (self.level, list(self.entries))


EMPTY_REGISTRY = Registry(1)


def theory_signature(theory, registry):
    if theory.kind in ("sigma11-os", "pft-star"):
        return Signature()
    if theory.kind == "pft":
        return registry.signature(1)
    return registry.signature(2)


def assemble_theory(level, registry):
    """The abstraction theory over the registry at the given level."""
    if level not in (1, 2):
        raise LevelMismatch("theory level must be 1 or 2")
    if level > registry.level:
        raise LevelMismatch(
            "level %d theory needs a level %d registry" % (level, level))
    return PFT if level == 1 else PFT2


# ---------------------------------------------------------------------------
# derivations

class Line:
    __slots__ = ("index", "formula", "rule", "args")

    def __init__(self, index, formula, rule, args=()):
        self.index = index
        self.formula = formula
        self.rule = rule
        self.args = tuple(args)

    def __repr__(self):
        return "Line(%d, %s, %r)" % (self.index, S.print_formula(self.formula), self.rule)


class Derivation:
    def __init__(self, lines):
        self.lines = tuple(lines)
        if not self.lines:
            raise KernelError("a derivation needs at least one line")

    @property
    def theorem(self):
        return self.lines[-1].formula

    def __len__(self):
        return len(self.lines)

    def __repr__(self):
        return "Derivation(%d lines, theorem=%s)" % (
            len(self.lines), S.print_formula(self.theorem))


class CheckReport:
    def __init__(self, ok, first_failure=None, admitted=()):
        self.ok = ok
        self.first_failure = first_failure
        self.admitted = tuple(admitted)

    def __repr__(self):
        if self.ok:
            return "CheckReport(ok=True, admitted=%d)" % len(self.admitted)
        return "CheckReport(ok=False, first_failure=%r)" % (self.first_failure,)


# ---------------------------------------------------------------------------
# formula surgery shared by the equality rules

_CHILDREN = {
    Pred: lambda f: (f.rel,) + f.args,
    Eq: lambda f: (f.lhs, f.rhs),
    Not: lambda f: (f.body,),
    And: lambda f: (f.lhs, f.rhs),
    S.Or: lambda f: (f.lhs, f.rhs),
    Implies: lambda f: (f.lhs, f.rhs),
    Iff: lambda f: (f.lhs, f.rhs),
    Forall: lambda f: (f.body,),
    Exists: lambda f: (f.body,),
    Proj: lambda t: (t.base,) + t.args,
    Abs: lambda t: (t.arg,),
}


def _rebuild(node, children):
    k = type(node)
    if k is Pred:
        return Pred(children[0], children[1:])
    if k is Eq:
        return Eq(children[0], children[1])
    if k is Not:
        return Not(children[0])
    if k in (And, S.Or, Implies, Iff):
        return k(children[0], children[1])
    if k in (Forall, Exists):
        return k(node.var, node.sort, children[0])
    if k is Proj:
        return Proj(children[0], children[1:])
    if k is Abs:
        return Abs(node.sym, children[0])
    raise KernelError("cannot rebuild %r" % (node,))


def replace_at_path(node, path, old, new, frozen_names):
    """Replace the subnode at `path` (child indices) by `new`; it must
    equal `old`, and no binder on the way may capture a frozen name."""
    if not path:
        if node != old:
            raise KernelError("path does not lead to the equation's left side")
        return new
    getter = _CHILDREN.get(type(node))
    if getter is None:
        raise KernelError("path descends into a leaf")
    if isinstance(node, (Forall, Exists)) and node.var in frozen_names:
        raise KernelError("replacement under a binder capturing %r" % node.var)
    children = list(getter(node))
    i = path[0]
    if not 0 <= i < len(children):
        raise KernelError("path index %d out of range" % i)
    children[i] = replace_at_path(children[i], path[1:], old, new, frozen_names)
    return _rebuild(node, tuple(children))


# ---------------------------------------------------------------------------
# logical axiom recognizers

def _is_p1(f):
    return (isinstance(f, Implies) and isinstance(f.rhs, Implies)
            and alpha_eq(f.lhs, f.rhs.rhs))


def _is_p2(f):
    # (A -> (B -> C)) -> ((A -> B) -> (A -> C))
    if not (isinstance(f, Implies) and isinstance(f.lhs, Implies)
            and isinstance(f.lhs.rhs, Implies) and isinstance(f.rhs, Implies)
            and isinstance(f.rhs.lhs, Implies) and isinstance(f.rhs.rhs, Implies)):
        return False
    a1, b1, c1 = f.lhs.lhs, f.lhs.rhs.lhs, f.lhs.rhs.rhs
    a2, b2 = f.rhs.lhs.lhs, f.rhs.lhs.rhs
    a3, c3 = f.rhs.rhs.lhs, f.rhs.rhs.rhs
    return (alpha_eq(a1, a2) and alpha_eq(a1, a3)
            and alpha_eq(b1, b2) and alpha_eq(c1, c3))


def _is_p3(f):
    # (!A -> !B) -> ((!A -> B) -> A)
    if not (isinstance(f, Implies) and isinstance(f.lhs, Implies)
            and isinstance(f.lhs.lhs, Not) and isinstance(f.lhs.rhs, Not)
            and isinstance(f.rhs, Implies) and isinstance(f.rhs.lhs, Implies)
            and isinstance(f.rhs.lhs.lhs, Not)):
        return False
    a1, b1 = f.lhs.lhs.body, f.lhs.rhs.body
    a2, b2 = f.rhs.lhs.lhs.body, f.rhs.lhs.rhs
    a3 = f.rhs.rhs
    return (alpha_eq(a1, a2) and alpha_eq(a1, a3) and alpha_eq(b1, b2))


def _is_and_el(f):
    return (isinstance(f, Implies) and isinstance(f.lhs, And)
            and alpha_eq(f.lhs.lhs, f.rhs))


def _is_and_er(f):
    return (isinstance(f, Implies) and isinstance(f.lhs, And)
            and alpha_eq(f.lhs.rhs, f.rhs))


def _is_and_i(f):
    return (isinstance(f, Implies) and isinstance(f.rhs, Implies)
            and isinstance(f.rhs.rhs, And)
            and alpha_eq(f.lhs, f.rhs.rhs.lhs)
            and alpha_eq(f.rhs.lhs, f.rhs.rhs.rhs))


def _is_or_il(f):
    return (isinstance(f, Implies) and isinstance(f.rhs, S.Or)
            and alpha_eq(f.lhs, f.rhs.lhs))


def _is_or_ir(f):
    return (isinstance(f, Implies) and isinstance(f.rhs, S.Or)
            and alpha_eq(f.lhs, f.rhs.rhs))


def _is_or_e(f):
    # (A -> C) -> ((B -> C) -> ((A | B) -> C))
    if not (isinstance(f, Implies) and isinstance(f.lhs, Implies)
            and isinstance(f.rhs, Implies) and isinstance(f.rhs.lhs, Implies)
            and isinstance(f.rhs.rhs, Implies)
            and isinstance(f.rhs.rhs.lhs, S.Or)):
        return False
    a, c = f.lhs.lhs, f.lhs.rhs
    b, c2 = f.rhs.lhs.lhs, f.rhs.lhs.rhs
    ab, c3 = f.rhs.rhs.lhs, f.rhs.rhs.rhs
    return (alpha_eq(c, c2) and alpha_eq(c, c3)
            and alpha_eq(ab.lhs, a) and alpha_eq(ab.rhs, b))


def _is_iff_el(f):
    return (isinstance(f, Implies) and isinstance(f.lhs, Iff)
            and isinstance(f.rhs, Implies)
            and alpha_eq(f.lhs.lhs, f.rhs.lhs) and alpha_eq(f.lhs.rhs, f.rhs.rhs))


def _is_iff_er(f):
    return (isinstance(f, Implies) and isinstance(f.lhs, Iff)
            and isinstance(f.rhs, Implies)
            and alpha_eq(f.lhs.rhs, f.rhs.lhs) and alpha_eq(f.lhs.lhs, f.rhs.rhs))


def _is_iff_i(f):
    # (A -> B) -> ((B -> A) -> (A <-> B))
    if not (isinstance(f, Implies) and isinstance(f.lhs, Implies)
            and isinstance(f.rhs, Implies) and isinstance(f.rhs.lhs, Implies)
            and isinstance(f.rhs.rhs, Iff)):
        return False
    a, b = f.lhs.lhs, f.lhs.rhs
    return (alpha_eq(f.rhs.lhs.lhs, b) and alpha_eq(f.rhs.lhs.rhs, a)
            and alpha_eq(f.rhs.rhs.lhs, a) and alpha_eq(f.rhs.rhs.rhs, b))


_PROP_AXIOMS = {
    "p1": _is_p1, "p2": _is_p2, "p3": _is_p3,
    "and-el": _is_and_el, "and-er": _is_and_er, "and-i": _is_and_i,
    "or-il": _is_or_il, "or-ir": _is_or_ir, "or-e": _is_or_e,
    "iff-el": _is_iff_el, "iff-er": _is_iff_er, "iff-i": _is_iff_i,
}


def _check_q_inst(f, term):
    if not (isinstance(f, Implies) and isinstance(f.lhs, Forall)):
        return "q-inst expects (forall v p) -> p[v := t]"
    q = f.lhs
    if term_sort(term) != q.sort:
        return "instantiating term has the wrong sort"
    if not alpha_eq(f.rhs, substitute(q.body, q.var, q.sort, term)):
        return "conclusion is not the instance at the given term"
    return None


def _check_ex_i(f, term):
    if not (isinstance(f, Implies) and isinstance(f.rhs, Exists)):
        return "ex-i expects p[v := t] -> (exists v p)"
    q = f.rhs
    if term_sort(term) != q.sort:
        return "witnessing term has the wrong sort"
    if not alpha_eq(f.lhs, substitute(q.body, q.var, q.sort, term)):
        return "premise is not the instance at the given term"
    return None


def _check_q_dist(f):
    # (forall v (p -> q)) -> ((forall v p) -> (forall v q))
    if not (isinstance(f, Implies) and isinstance(f.lhs, Forall)
            and isinstance(f.lhs.body, Implies) and isinstance(f.rhs, Implies)
            and isinstance(f.rhs.lhs, Forall) and isinstance(f.rhs.rhs, Forall)):
        return "q-dist shape mismatch"
    v, sort = f.lhs.var, f.lhs.sort
    p, q = f.lhs.body.lhs, f.lhs.body.rhs
    if not alpha_eq(f.rhs.lhs, Forall(v, sort, p)):
        return "antecedent of the conclusion does not match"
    if not alpha_eq(f.rhs.rhs, Forall(v, sort, q)):
        return "consequent of the conclusion does not match"
    return None


def _check_q_vac(f):
    if not (isinstance(f, Implies) and isinstance(f.rhs, Forall)):
        return "q-vac expects p -> (forall v p)"
    q = f.rhs
    if q.var in free_vars(q.body):
        return "quantified variable occurs free in the body"
    if not alpha_eq(f.lhs, q.body):
        return "body does not match the premise"
    return None


def _check_ex_e(f):
    # (forall v (p -> c)) -> ((exists v p) -> c), v not free in c
    if not (isinstance(f, Implies) and isinstance(f.lhs, Forall)
            and isinstance(f.lhs.body, Implies) and isinstance(f.rhs, Implies)
            and isinstance(f.rhs.lhs, Exists)):
        return "ex-e shape mismatch"
    v, sort = f.lhs.var, f.lhs.sort
    p, c = f.lhs.body.lhs, f.lhs.body.rhs
    if v in free_vars(c):
        return "bound variable occurs free in the conclusion"
    if not alpha_eq(f.rhs.lhs, Exists(v, sort, p)):
        return "existential premise does not match"
    if not alpha_eq(f.rhs.rhs, c):
        return "conclusion does not match"
    return None


# ---------------------------------------------------------------------------
# theory axiom recognition

class TheoryAxiom:
    def __init__(self, schema, admitted=False):
        self.schema = schema
        self.admitted = admitted

    def __repr__(self):
        return "TheoryAxiom(%r%s)" % (self.schema, ", admitted" if self.admitted else "")


def _strip_forall_objs(f):
    names = []
    while isinstance(f, Forall) and f.sort == OBJ:
        names.append(f.var)
        f = f.body
    return names, f


def _match_extensionality(f):
    if not (isinstance(f, Forall) and f.sort.is_concept
            and isinstance(f.body, Forall) and f.body.sort == f.sort
            and isinstance(f.body.body, Iff)):
        return None
    m = f.sort.arity
    if alpha_eq(f, Sc.extensionality_axiom(m)):
        return Sc.SchemaId("extensionality", m)
    return None


def _match_projection(f):
    if not (isinstance(f, Forall) and f.sort.is_concept):
        return None
    names, core = _strip_forall_objs(f.body)
    if not (isinstance(core, Iff) and isinstance(core.lhs, Pred)
            and isinstance(core.lhs.rel, Proj)):
        return None
    m = len(core.lhs.rel.args)
    n = len(core.lhs.args)
    if m < 1 or n < 1 or f.sort.arity != m + n:
        return None
    if alpha_eq(f, Sc.projection_axiom(m, n)):
        return Sc.SchemaId("projection", m, n)
    return None


def _split_comprehension(f):
    """Destructure (exists R forall ā (R ā <-> phi)); returns
    (r, n, tuple_vars, phi) or None."""
    if not (isinstance(f, Exists) and f.sort.is_concept):
        return None
    r, n = f.var, f.sort.arity
    names, core = _strip_forall_objs(f.body)
    if len(names) != n or len(set(names)) != n:
        return None
    if not (isinstance(core, Iff) and isinstance(core.lhs, Pred)):
        return None
    if core.lhs.rel != ConcVar(r, n):
        return None
    if list(core.lhs.args) != [ObjVar(a) for a in names]:
        return None
    phi = core.rhs
    if r in free_vars(phi):
        return None
    return r, n, names, phi


def _match_fo_comp(f):
    parts = _split_comprehension(f)
    if parts is None:
        return None
    _, n, _, phi = parts
    if Sc.classify(phi) is not Sc.FormulaClass.FIRST_ORDER:
        return None
    return Sc.SchemaId("fo-comp", n)


def _match_sigma11_choice(f):
    if not isinstance(f, Implies):
        return None
    xs, ante_core = _strip_forall_objs(f.lhs)
    if not xs or len(set(xs)) != len(xs):
        return None
    if not (isinstance(ante_core, Exists) and ante_core.sort.is_concept):
        return None
    rp, n = ante_core.var, ante_core.sort.arity
    phi = ante_core.body
    if rp not in free_vars(phi):
        return None
    if not Sc.admits(phi, Sc.FormulaClass.SIGMA11):
        return None
    m = len(xs)
    if not (isinstance(f.rhs, Exists) and f.rhs.sort == conc(m + n)):
        return None
    r = f.rhs.var
    if r in free_vars(phi) or r in xs:
        r = S.fresh_name(r, set(free_vars(phi)) | set(xs))
    try:
        expected = Sc.sigma11_choice_instance(phi, xs, rp, r)
    except Sc.SchemaError:
        return None
    if alpha_eq(f, expected):
        return Sc.SchemaId("sigma11-choice", m, n)
    return None


def _match_delta11(f):
    if not isinstance(f, Implies):
        return None
    xs, core = _strip_forall_objs(f.lhs)
    if not xs or not isinstance(core, Iff):
        return None
    phi, psi = core.lhs, core.rhs
    if not (Sc.admits(phi, Sc.FormulaClass.SIGMA11) and Sc.admits(psi, Sc.FormulaClass.PI11)):
        return None
    parts = _split_comprehension(f.rhs)
    if parts is None:
        return None
    r = parts[0]
    avoid = set(free_vars(phi)) | set(free_vars(psi)) | set(xs)
    if r in avoid:
        r = S.fresh_name(r, avoid)
    try:
        expected = Sc.delta11_comp_instance(phi, psi, xs, r)
    except Sc.SchemaError:
        return None
    if alpha_eq(f, expected):
        return Sc.SchemaId("delta11-comp", len(xs))
    return None


def _match_registered_abstraction(f, registry, level):
    if not (isinstance(f, Forall) and f.sort.is_concept
            and isinstance(f.body, Forall)
            and isinstance(f.body.body, Iff)
            and isinstance(f.body.body.lhs, Eq)
            and isinstance(f.body.body.lhs.lhs, Abs)):
        return None
    sym_id = f.body.body.lhs.lhs.sym
    entry = registry.by_id(sym_id, level)
    if entry is None:
        return None
    if alpha_eq(f, Sc.abstraction_principle(entry.e, entry.symbol)):
        return Sc.SchemaId("abstraction", sym_id)
    return None


def destructure_conditional_abstraction(f):
    """Read (Equiv(E) -> A[E]) off a formula; returns
    (e, slots, arity, sym_id) or None.  E's slots are taken in the
    binder order of the conclusion."""
    if not (isinstance(f, Implies) and isinstance(f.rhs, Forall)
            and f.rhs.sort.is_concept and isinstance(f.rhs.body, Forall)
            and f.rhs.body.sort == f.rhs.sort
            and isinstance(f.rhs.body.body, Iff)):
        return None
    v1, v2 = f.rhs.var, f.rhs.body.var
    n = f.rhs.sort.arity
    core = f.rhs.body.body
    if not (isinstance(core.lhs, Eq) and isinstance(core.lhs.lhs, Abs)
            and isinstance(core.lhs.rhs, Abs)):
        return None
    a1, a2 = core.lhs.lhs, core.lhs.rhs
    if a1.sym != a2.sym or a1.arg != ConcVar(v1, n) or a2.arg != ConcVar(v2, n):
        return None
    if v1 == v2:
        return None
    e = core.rhs
    fv = free_vars(e)
    if set(fv) - {v1, v2}:
        return None
    if fv.get(v1) != conc(n) or fv.get(v2) != conc(n):
        return None
    return e, (v1, v2), n, a1.sym


def equiv_sentence_oriented(e, u, v):
    """Equivalence sentence for E with an explicit slot orientation."""
    n = free_vars(e)[u].arity
    cs = conc(n)

    def ap(a, b):
        return S.subst_par(e, {u: a, v: b})

    r, s, t = ConcVar("R", n), ConcVar("S", n), ConcVar("T", n)
    body = S.and_all([
        ap(r, r),
        Implies(ap(r, s), ap(s, r)),
        Implies(And(ap(r, s), ap(s, t)), ap(r, t)),
    ])
    return S.forall_all([("R", cs), ("S", cs), ("T", cs)], body)


def _abs_symbols_of(node):
    out = set()

    def walk(x):
        if isinstance(x, Abs):
            out.add(x.sym)
            walk(x.arg)
        elif isinstance(x, Proj):
            walk(x.base)
            for a in x.args:
                walk(a)
        elif isinstance(x, Pred):
            walk(x.rel)
            for a in x.args:
                walk(a)
        elif isinstance(x, Eq):
            walk(x.lhs)
            walk(x.rhs)
        elif isinstance(x, Not):
            walk(x.body)
        elif isinstance(x, S._BinConn):
            walk(x.lhs)
            walk(x.rhs)
        elif isinstance(x, S._Quant):
            walk(x.body)

    walk(node)
    return out


def _match_pft_star(f, minted):
    parts = destructure_conditional_abstraction(f)
    if parts is None:
        return None
    e, (v1, v2), n, sym_id = parts
    if canonical_abstraction_id(e, (v1, v2)) != sym_id:
        return None
    for t in _abs_symbols_of(e):
        if t == sym_id:
            return None  # the operator may not occur in its own definition
        if minted is not None and t not in minted:
            return None
    if not alpha_eq(f.lhs, equiv_sentence_oriented(e, v1, v2)):
        return None
    return Sc.SchemaId("abstraction", sym_id)


def axiom_of(theory, registry, f, minted=None, strict=False):
    """Recognize f (up to alpha-equivalence) as a theory axiom.

    Returns a TheoryAxiom or None.  `minted` carries the already-minted
    operator ids during a pft-star check; outside a check it may be left
    None, which skips the symbols-in-use test.
    """
    m = _match_extensionality(f)
    if m:
        return TheoryAxiom(m)
    m = _match_projection(f)
    if m:
        return TheoryAxiom(m)
    m = _match_fo_comp(f)
    if m:
        return TheoryAxiom(m)
    m = _match_sigma11_choice(f)
    if m:
        return TheoryAxiom(m)
    if not strict:
        m = _match_delta11(f)
        if m:
            return TheoryAxiom(m, admitted=True)
    if theory.kind in ("pft", "pft2"):
        m = _match_registered_abstraction(f, registry, registry_level_for(theory))
        if m:
            return TheoryAxiom(m)
    if theory.kind == "pft-star":
        m = _match_pft_star(f, minted)
        if m:
            return TheoryAxiom(m)
    return None


# ---------------------------------------------------------------------------
# the checker

def bottom():
    """The designated absurdity: a fixed closed theorem conjoined with
    its own negation."""
    phi = Forall("x", OBJ, Eq(ObjVar("x"), ObjVar("x")))
    return And(phi, Not(phi))


def check(derivation, theory, registry=EMPTY_REGISTRY, strict=False):
    """Validate every line of a derivation against a theory.

    Failures are data: the report carries the first failing line index
    and a reason instead of raising.
    """
    sig = theory_signature(theory, registry)
    minted = {} if theory.kind == "pft-star" else None
    by_index = {}
    admitted = []
    prev = 0
    for line in derivation.lines:
        idx = line.index
        if idx <= prev:
            return CheckReport(False, (idx, "line numbers must increase"), admitted)
        prev = idx
        reason, was_admitted = _check_line(line, by_index, theory, registry,
                                           sig, minted, strict)
        if reason is not None:
            return CheckReport(False, (idx, reason), admitted)
        if was_admitted:
            admitted.append(idx)
        if (line.rule == "axiom" and minted is not None and len(line.args) >= 3
                and line.args[0] == "pft-star"):
            sym_id, n = line.args[1], int(line.args[2])
            if sym_id not in minted:
                parts = destructure_conditional_abstraction(line.formula)
                minted[sym_id] = (parts[0], n)
                sig = sig.extend(AbstractionSymbol(sym_id, n))
        by_index[idx] = line.formula
    return CheckReport(True, None, admitted)


def _check_line(line, by_index, theory, registry, sig, minted, strict):
    """Returns (failure reason or None, admitted-axiom flag)."""
    f = line.formula
    rule = line.rule
    args = line.args

    # the line's formula must live in the theory's (current) language
    line_sig = sig
    if minted is not None and rule == "axiom" and len(args) >= 3 and args[0] == "pft-star":
        sym_id, n = args[1], int(args[2])
        if sym_id not in line_sig:
            line_sig = line_sig.extend(AbstractionSymbol(sym_id, n))
    rep = well_sorted(line_sig, f)
    if not rep.ok:
        return "ill-sorted: %s" % rep.errors[0][1], False

    if rule in _PROP_AXIOMS:
        if _PROP_AXIOMS[rule](f):
            return None, False
        return "not an instance of %s" % rule, False

    if rule == "q-inst":
        if len(args) != 1:
            return "q-inst takes one term argument", False
        return _check_q_inst(f, args[0]), False
    if rule == "ex-i":
        if len(args) != 1:
            return "ex-i takes one term argument", False
        return _check_ex_i(f, args[0]), False
    if rule == "q-dist":
        return _check_q_dist(f), False
    if rule == "q-vac":
        return _check_q_vac(f), False
    if rule == "ex-e":
        return _check_ex_e(f), False

    if rule == "mp":
        if len(args) != 2:
            return "mp takes two line references", False
        i, j = args
        fi, fj = by_index.get(i), by_index.get(j)
        if fi is None or fj is None:
            return "mp references a missing line", False
        if not isinstance(fi, Implies):
            return "mp major premise is not an implication", False
        if not alpha_eq(fi.lhs, fj):
            return "mp minor premise does not match", False
        if not alpha_eq(fi.rhs, f):
            return "mp conclusion does not match", False
        return None, False

    if rule == "gen":
        if len(args) != 3:
            return "gen takes a variable, a sort and a line reference", False
        v, sort, i = args
        fi = by_index.get(i)
        if fi is None:
            return "gen references a missing line", False
        if not alpha_eq(f, Forall(v, sort, fi)):
            return "gen conclusion does not match", False
        return None, False

    if rule == "refl":
        if not (isinstance(f, Eq) and f.lhs == f.rhs):
            return "refl expects t = t", False
        return None, False

    if rule == "leibniz":
        if not args:
            return "leibniz takes at least one path", False
        if not (isinstance(f, Implies) and isinstance(f.lhs, Eq)
                and isinstance(f.rhs, Implies)):
            return "leibniz expects (s = t) -> (p -> q)", False
        s_t = f.lhs
        frozen = set(free_vars_term(s_t.lhs)) | set(free_vars_term(s_t.rhs))
        try:
            got = f.rhs.lhs
            for path in args:
                got = replace_at_path(got, tuple(path), s_t.lhs, s_t.rhs, frozen)
        except KernelError as exc:
            return str(exc), False
        if not alpha_eq(got, f.rhs.rhs):
            return "replacement result does not match the conclusion", False
        return None, False

    if rule == "cong":
        if len(args) != 1:
            return "cong takes one path", False
        if not (isinstance(f, Implies) and isinstance(f.lhs, Eq)
                and isinstance(f.rhs, Eq)):
            return "cong expects (s = t) -> (u = u')", False
        s_t = f.lhs
        try:
            got = replace_at_path(f.rhs.lhs, tuple(args[0]), s_t.lhs, s_t.rhs, set())
        except KernelError as exc:
            return str(exc), False
        if got != f.rhs.rhs:
            return "congruence result does not match", False
        return None, False

    if rule == "axiom":
        hint = args[0] if args else None
        if hint == "pft-star":
            if theory.kind != "pft-star":
                return "conditional abstraction axioms need the pft-star theory", False
            if len(args) != 3:
                return "axiom pft-star takes a symbol id and an arity", False
            parts = destructure_conditional_abstraction(f)
            if parts is None:
                return "not a conditional abstraction axiom", False
            _, _, n, sym_id = parts
            if sym_id != args[1] or n != int(args[2]):
                return "declared operator does not match the formula", False
            if _match_pft_star(f, minted) is None:
                return "conditional abstraction axiom rejected", False
            return None, False
        ax = axiom_of(theory, registry, f, minted, strict)
        if ax is None:
            return "not an axiom of this theory", False
        if hint is not None and ax.schema.kind != hint:
            return ("axiom matched %r, not the declared %r"
                    % (ax.schema.kind, hint), False)
        return None, ax.admitted

    return "unknown rule %r" % rule, False


# ---------------------------------------------------------------------------
# certification

def certify_equivalence(e, cert, registry):
    """Check a certificate for Equiv(E) and extend the registry with the
    canonical operator for E.  Idempotent for alpha-equal E."""
    try:
        u, v, n = Sc.equiv_parts(e)
    except Sc.SchemaError as exc:
        raise BadFreeVariables(str(exc)) from None
    abs_used = _abs_symbols_of(e)
    if registry.level == 1:
        if abs_used:
            raise WrongLanguageLevel(
                "level 1 defining formulas must not contain abstraction terms")
        theory = SIGMA11_OS
        base = registry
    else:
        level1 = {en.symbol.id for en in registry.visible(1)}
        if not abs_used <= level1:
            raise WrongLanguageLevel(
                "level 2 defining formulas may only use level 1 operators")
        theory = PFT
        base = Registry(1, registry.visible(1))
    sym_id = canonical_abstraction_id(e)
    for entry in registry.entries:
        if entry.symbol.id == sym_id:
            return registry
    rep = check(cert, theory, base)
    if not rep.ok:
        raise CertificateRejected("certificate fails at line %s: %s" % rep.first_failure)
    if not alpha_eq(cert.theorem, Sc.equiv_sentence(e)):
        raise CertificateRejected("certificate does not conclude Equiv(E)")
    entry = RegistryEntry(e, AbstractionSymbol(sym_id, n, source=e), cert, registry.level)
    return Registry(registry.level, registry.entries + (entry,))


# ---------------------------------------------------------------------------
# scripts on disk

def _render_path(p):
    return "(%s)" % " ".join(str(i) for i in p)


def _print_rule_term(t):
    if isinstance(t, ConcVar):
        return "(var %s (Conc %d))" % (t.name, t.arity)
    if isinstance(t, ObjVar):
        return t.name
    if isinstance(t, Proj):
        return "(proj %s %s)" % (_print_rule_term(t.base),
                                 " ".join(_print_rule_term(a) for a in t.args))
    if isinstance(t, Abs):
        return "(abs %s %s)" % (t.sym, _print_rule_term(t.arg))
    raise TypeError("not a term: %r" % (t,))


def _render_args(rule, args):
    if rule in ("q-inst", "ex-i"):
        return [_print_rule_term(args[0])]
    if rule == "gen":
        return [args[0], S.print_sort(args[1]), str(args[2])]
    if rule == "mp":
        return [str(args[0]), str(args[1])]
    if rule == "leibniz":
        return [_render_path(p) for p in args]
    if rule == "cong":
        return [_render_path(args[0])]
    if rule == "axiom":
        return [str(a) for a in args]
    return []


def print_derivation(derivation):
    out = []
    for line in derivation.lines:
        parts = [line.rule] + _render_args(line.rule, line.args)
        out.append("(line %d %s (%s))" % (line.index, S.print_sof(line.formula),
                                          " ".join(parts).rstrip()))
    return "\n".join(out) + "\n"


def parse_derivation(text, sig=None):
    """Parse a .prf document.  Conditional-abstraction axiom lines extend
    the working signature, so later lines can mention the new operator."""
    sig = sig or Signature()
    items = S.read_sexprs(text)
    lines = []
    for node in items:
        body = node[0]
        if not (isinstance(body, list) and len(body) == 4
                and S._sx_body(body[0]) == "line"):
            raise S.SofSyntaxError("expected (line n formula (rule args...))", node[1])
        idx = int(S._sx_body(body[1]))
        rule_node = S._sx_body(body[3])
        if not (isinstance(rule_node, list) and rule_node
                and isinstance(S._sx_body(rule_node[0]), str)):
            raise S.SofSyntaxError("expected a rule form", body[3][1])
        rule = S._sx_body(rule_node[0])
        raw_args = rule_node[1:]
        if rule == "axiom" and len(raw_args) == 3 and S._sx_body(raw_args[0]) == "pft-star":
            sym_id = S._sx_body(raw_args[1])
            n = int(S._sx_body(raw_args[2]))
            if sym_id not in sig:
                sig = sig.extend(AbstractionSymbol(sym_id, n))
        formula = S.parse_formula_sexpr(body[2], sig)
        args = _parse_args(rule, raw_args, sig, node[1])
        lines.append(Line(idx, formula, rule, args))
    return Derivation(lines)


def _parse_args(rule, raw, sig, pos):
    def atom(n):
        b = S._sx_body(n)
        if not isinstance(b, str):
            raise S.SofSyntaxError("expected an atom", n[1])
        return b

    if rule in ("q-inst", "ex-i"):
        if len(raw) != 1:
            raise S.SofSyntaxError("%s takes one term" % rule, pos)
        return (_parse_rule_term(raw[0], sig),)
    if rule == "gen":
        if len(raw) != 3:
            raise S.SofSyntaxError("gen takes var, sort, line", pos)
        return (atom(raw[0]), S._parse_sort(raw[1]), int(atom(raw[2])))
    if rule == "mp":
        return (int(atom(raw[0])), int(atom(raw[1])))
    if rule in ("leibniz", "cong"):
        paths = []
        for n in raw:
            b = S._sx_body(n)
            if not isinstance(b, list):
                raise S.SofSyntaxError("expected a path", n[1])
            paths.append(tuple(int(S._sx_body(i)) for i in b))
        return tuple(paths)
    if rule == "axiom":
        return tuple(atom(n) for n in raw)
    if raw:
        raise S.SofSyntaxError("rule %s takes no arguments" % rule, pos)
    return ()


def _parse_rule_term(node, sig):
    """Terms in rule arguments: bare names read as object variables,
    concept variables are written (var name (Conc n))."""
    body = S._sx_body(node)
    if isinstance(body, str):
        return ObjVar(body)
    h = S._sx_body(body[0]) if body and isinstance(S._sx_body(body[0]), str) else None
    if h == "var":
        return S.var_of_sort(S._sx_body(body[1]), S._parse_sort(body[2]))
    if h == "proj":
        return Proj(_parse_rule_term(body[1], sig),
                    [_parse_rule_term(a, sig) for a in body[2:]])
    if h == "abs":
        return Abs(S._sx_body(body[1]), _parse_rule_term(body[2], sig))
    raise S.SofSyntaxError("expected a term", node[1])


# ---------------------------------------------------------------------------
# registry persistence

def save_registry(registry, path, cert_paths=None):
    """Write a .reg file; certificate scripts are referenced by path."""
    cert_paths = cert_paths or {}
    out = ["(registry (level %d)" % registry.level]
    for entry in registry.entries:
        cp = cert_paths.get(entry.symbol.id, "")
        out.append("  (entry %s %d %d %s %s)"
                   % (entry.symbol.id, entry.symbol.arity, entry.level,
                      S.print_sof(entry.e), cp or "-"))
    out.append(")")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def load_registry(path, cert_loader=None):
    """Read a .reg file.  Certificates are reloaded through `cert_loader`
    (symbol id, path) -> Derivation when given, else left as None."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    items = S.read_sexprs(text)
    if len(items) != 1:
        raise KernelError("a registry file holds one (registry ...) form")
    body = items[0][0]
    if not (isinstance(body, list) and S._sx_body(body[0]) == "registry"):
        raise KernelError("not a registry file")
    level_form = S._sx_body(body[1])
    level = int(S._sx_body(level_form[1]))
    entries = []
    for node in body[2:]:
        eb = S._sx_body(node)
        if S._sx_body(eb[0]) != "entry":
            raise KernelError("expected an (entry ...) form")
        sym_id = S._sx_body(eb[1])
        arity = int(S._sx_body(eb[2]))
        elevel = int(S._sx_body(eb[3]))
        e = S.parse_formula_sexpr(eb[4], Signature(
            [AbstractionSymbol(en.symbol.id, en.symbol.arity) for en in entries]))
        cert_path = S._sx_body(eb[5])
        cert = None
        if cert_loader is not None and cert_path != "-":
            cert = cert_loader(sym_id, cert_path)
        entries.append(RegistryEntry(e, AbstractionSymbol(sym_id, arity, source=e),
                                     cert, elevel))
    return Registry(level, entries)
