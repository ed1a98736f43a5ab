"""Second-order arithmetic and its interpretation.

The arithmetic language is two-sorted (numbers and sets of numbers)
with 0, successor, sum, product, equality and membership.  Translation
into the abstraction language relativizes number quantifiers to the
inductive-numbers predicate, set quantifiers to subconcepts of it, and
unfolds every function symbol through its graph, flattening nested
terms innermost-first with counter-named existentials so the output is
reproducible byte for byte.
"""

from __future__ import annotations

from . import kernel as K
from . import schemas as Sc
from . import syntax as S
from .syntax import (
    OBJ, Abs, And, ConcVar, Eq, Exists, Forall, Iff, Implies, Not, ObjVar,
    Or, Pred, and_all, conc, forall_all, free_vars,
)


class Pa2Error(Exception):
    pass


# ---------------------------------------------------------------------------
# the arithmetic language

class Pa2Term:
    __slots__ = ()


class NumVar(Pa2Term):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __eq__(self, other):
        return isinstance(other, NumVar) and self.name == other.name

    def __hash__(self):
        return hash(("NumVar", self.name))

    def __repr__(self):
        return self.name


class Zero(Pa2Term):
    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, Zero)

    def __hash__(self):
        return hash("Zero")

    def __repr__(self):
        return "0"


class Succ(Pa2Term):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg

    def __eq__(self, other):
        return isinstance(other, Succ) and self.arg == other.arg

    def __hash__(self):
        return hash(("Succ", self.arg))

    def __repr__(self):
        return "(s %r)" % self.arg


class Plus(Pa2Term):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs):
        self.lhs = lhs
        self.rhs = rhs

    def __eq__(self, other):
        return isinstance(other, Plus) and self.lhs == other.lhs and self.rhs == other.rhs

    def __hash__(self):
        return hash(("Plus", self.lhs, self.rhs))

    def __repr__(self):
        return "(+ %r %r)" % (self.lhs, self.rhs)


class Times(Pa2Term):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs):
        self.lhs = lhs
        self.rhs = rhs

    def __eq__(self, other):
        return isinstance(other, Times) and self.lhs == other.lhs and self.rhs == other.rhs

    def __hash__(self):
        return hash(("Times", self.lhs, self.rhs))

    def __repr__(self):
        return "(* %r %r)" % (self.lhs, self.rhs)


class Pa2Formula:
    __slots__ = ()


class PEq(Pa2Formula):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs):
        self.lhs = lhs
        self.rhs = rhs


class PIn(Pa2Formula):
    __slots__ = ("term", "setvar")

    def __init__(self, term, setvar):
        self.term = term
        self.setvar = setvar


class PNot(Pa2Formula):
    __slots__ = ("body",)

    def __init__(self, body):
        self.body = body


class PBin(Pa2Formula):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs):
        self.lhs = lhs
        self.rhs = rhs


class PAnd(PBin):
    __slots__ = ()


class POr(PBin):
    __slots__ = ()


class PImplies(PBin):
    __slots__ = ()


class PIff(PBin):
    __slots__ = ()


class PQuant(Pa2Formula):
    __slots__ = ("var", "body")

    def __init__(self, var, body):
        self.var = var
        self.body = body


class PForallNum(PQuant):
    __slots__ = ()


class PExistsNum(PQuant):
    __slots__ = ()


class PForallSet(PQuant):
    __slots__ = ()


class PExistsSet(PQuant):
    __slots__ = ()


def pa2_free_vars(f):
    """Free variables as a dict name -> "num" | "set"."""
    out = {}

    def term(t):
        if isinstance(t, NumVar):
            out.setdefault(t.name, "num")
        elif isinstance(t, Succ):
            term(t.arg)
        elif isinstance(t, (Plus, Times)):
            term(t.lhs)
            term(t.rhs)

    def go(g, bound):
        if isinstance(g, PEq):
            for t in (g.lhs, g.rhs):
                _collect_unbound(t, bound, out)
        elif isinstance(g, PIn):
            _collect_unbound(g.term, bound, out)
            if g.setvar not in bound:
                out.setdefault(g.setvar, "set")
        elif isinstance(g, PNot):
            go(g.body, bound)
        elif isinstance(g, PBin):
            go(g.lhs, bound)
            go(g.rhs, bound)
        elif isinstance(g, PQuant):
            go(g.body, bound | {g.var})
        else:
            raise Pa2Error("not an arithmetic formula: %r" % (g,))

    go(f, frozenset())
    return out


def _collect_unbound(t, bound, out):
    if isinstance(t, NumVar):
        if t.name not in bound:
            out.setdefault(t.name, "num")
    elif isinstance(t, Succ):
        _collect_unbound(t.arg, bound, out)
    elif isinstance(t, (Plus, Times)):
        _collect_unbound(t.lhs, bound, out)
        _collect_unbound(t.rhs, bound, out)


# ---------------------------------------------------------------------------
# .pa2 concrete syntax

def parse_pa2(text):
    items = S.read_sexprs(text)
    if len(items) != 1:
        raise S.SofSyntaxError("expected exactly one formula", 0)
    return _parse_pa2_formula(items[0])


def _parse_pa2_term(node):
    body = S._sx_body(node)
    if isinstance(body, str):
        if body == "0":
            return Zero()
        return NumVar(body)
    h = S._sx_body(body[0]) if body else None
    if h == "s" and len(body) == 2:
        return Succ(_parse_pa2_term(body[1]))
    if h == "+" and len(body) == 3:
        return Plus(_parse_pa2_term(body[1]), _parse_pa2_term(body[2]))
    if h == "*" and len(body) == 3:
        return Times(_parse_pa2_term(body[1]), _parse_pa2_term(body[2]))
    raise S.SofSyntaxError("expected a number term", node[1])


def _parse_pa2_formula(node):
    body = S._sx_body(node)
    if not isinstance(body, list) or not body:
        raise S.SofSyntaxError("expected a formula", node[1])
    h = S._sx_body(body[0])
    if h in ("forall", "exists"):
        vb = S._sx_body(body[1])
        name, sort = S._sx_body(vb[0]), S._sx_body(vb[1])
        inner = _parse_pa2_formula(body[2])
        if sort == "Nat":
            return (PForallNum if h == "forall" else PExistsNum)(name, inner)
        if sort == "Set":
            return (PForallSet if h == "forall" else PExistsSet)(name, inner)
        raise S.SofSyntaxError("arithmetic sorts are Nat and Set", body[1][1])
    if h == "not":
        return PNot(_parse_pa2_formula(body[1]))
    if h in ("and", "or", "implies", "iff"):
        cls = {"and": PAnd, "or": POr, "implies": PImplies, "iff": PIff}[h]
        return cls(_parse_pa2_formula(body[1]), _parse_pa2_formula(body[2]))
    if h == "=":
        return PEq(_parse_pa2_term(body[1]), _parse_pa2_term(body[2]))
    if h == "in":
        return PIn(_parse_pa2_term(body[1]), S._sx_body(body[2]))
    raise S.SofSyntaxError("expected an arithmetic formula", node[1])


def print_pa2_term(t):
    if isinstance(t, NumVar):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Succ):
        return "(s %s)" % print_pa2_term(t.arg)
    if isinstance(t, Plus):
        return "(+ %s %s)" % (print_pa2_term(t.lhs), print_pa2_term(t.rhs))
    if isinstance(t, Times):
        return "(* %s %s)" % (print_pa2_term(t.lhs), print_pa2_term(t.rhs))
    raise Pa2Error("not a number term: %r" % (t,))


def print_pa2(f):
    if isinstance(f, PEq):
        return "(= %s %s)" % (print_pa2_term(f.lhs), print_pa2_term(f.rhs))
    if isinstance(f, PIn):
        return "(in %s %s)" % (print_pa2_term(f.term), f.setvar)
    if isinstance(f, PNot):
        return "(not %s)" % print_pa2(f.body)
    if isinstance(f, PAnd):
        return "(and %s %s)" % (print_pa2(f.lhs), print_pa2(f.rhs))
    if isinstance(f, POr):
        return "(or %s %s)" % (print_pa2(f.lhs), print_pa2(f.rhs))
    if isinstance(f, PImplies):
        return "(implies %s %s)" % (print_pa2(f.lhs), print_pa2(f.rhs))
    if isinstance(f, PIff):
        return "(iff %s %s)" % (print_pa2(f.lhs), print_pa2(f.rhs))
    if isinstance(f, PForallNum):
        return "(forall (%s Nat) %s)" % (f.var, print_pa2(f.body))
    if isinstance(f, PExistsNum):
        return "(exists (%s Nat) %s)" % (f.var, print_pa2(f.body))
    if isinstance(f, PForallSet):
        return "(forall (%s Set) %s)" % (f.var, print_pa2(f.body))
    if isinstance(f, PExistsSet):
        return "(exists (%s Set) %s)" % (f.var, print_pa2(f.body))
    raise Pa2Error("not an arithmetic formula: %r" % (f,))


# ---------------------------------------------------------------------------
# the defined notions

def blv_symbol_id():
    return K.canonical_abstraction_id(Sc.corpus_formula("blv_equiv"))


def is_empty(xname, wname="w"):
    w = S.fresh_name(wname, {xname})
    return Forall(w, OBJ, Not(Pred(ConcVar(xname, 1), [ObjVar(w)])))


def is_singleton_of(xname, a, wname="w"):
    """X = {a}, spelled pointwise; `a` is an object variable name."""
    w = S.fresh_name(wname, {xname, a})
    return Forall(w, OBJ, Iff(Pred(ConcVar(xname, 1), [ObjVar(w)]),
                              Eq(ObjVar(w), ObjVar(a))))


def zero_formula(z, sym=None):
    """z is the object abstracted from the empty concept."""
    sym = sym or blv_symbol_id()
    x = S.fresh_name("X", {z})
    return Exists(x, conc(1), And(is_empty(x), Eq(Abs(sym, ConcVar(x, 1)), ObjVar(z))))


def succ_sigma(x, y, sym=None):
    """Existential-block side of the successor graph."""
    sym = sym or blv_symbol_id()
    v = S.fresh_name("X", {x, y})
    return Exists(v, conc(1), And(is_singleton_of(v, x),
                                  Eq(Abs(sym, ConcVar(v, 1)), ObjVar(y))))


def succ_pi(x, y, sym=None):
    """Universal-block side of the successor graph."""
    sym = sym or blv_symbol_id()
    v = S.fresh_name("X", {x, y})
    return Forall(v, conc(1), Implies(is_singleton_of(v, x),
                                      Eq(Abs(sym, ConcVar(v, 1)), ObjVar(y))))


def inductive_clauses(fname, sym=None, succ=None):
    """(contains every zero, closed under the successor graph) for the
    unary concept variable `fname`; `succ` lets callers swap in a graph
    parameter instead of the operator-defined successor."""
    succ = succ or (lambda a, b: succ_sigma(a, b, sym))
    fv = ConcVar(fname, 1)
    z = S.fresh_name("z", {fname})
    base = Forall(z, OBJ, Implies(zero_formula(z, sym), Pred(fv, [ObjVar(z)])))
    u = S.fresh_name("u", {fname})
    v = S.fresh_name("v", {fname, u})
    step = forall_all([(u, OBJ), (v, OBJ)],
                      Implies(And(Pred(fv, [ObjVar(u)]), succ(u, v)),
                              Pred(fv, [ObjVar(v)])))
    return And(base, step)


def n_formula(x, sym=None, succ=None):
    """x belongs to every concept containing zero and closed under
    successor."""
    fname = S.fresh_name("F", {x})
    return Forall(fname, conc(1),
                  Implies(inductive_clauses(fname, sym, succ),
                          Pred(ConcVar(fname, 1), [ObjVar(x)])))


def sub_n_formula(vname, sym=None):
    w = S.fresh_name("w", {vname})
    return Forall(w, OBJ, Implies(Pred(ConcVar(vname, 1), [ObjVar(w)]),
                                  n_formula(w, sym)))


def plus_formula(a, b, c, sym=None):
    """(a, b, c) lies in every ternary relation containing the recursion
    base for sums and closed under the recursion step."""
    sym = sym or blv_symbol_id()
    tname = S.fresh_name("T", {a, b, c})
    t = ConcVar(tname, 3)
    x, z = "x", "z"
    base = forall_all([(x, OBJ), (z, OBJ)],
                      Implies(zero_formula(z, sym),
                              Pred(t, [ObjVar(x), ObjVar(z), ObjVar(x)])))
    y, w, y2, w2 = "y", "w", "y2", "w2"
    step = forall_all(
        [(x, OBJ), (y, OBJ), (w, OBJ), (y2, OBJ), (w2, OBJ)],
        Implies(and_all([Pred(t, [ObjVar(x), ObjVar(y), ObjVar(w)]),
                         succ_sigma(y, y2, sym),
                         succ_sigma(w, w2, sym)]),
                Pred(t, [ObjVar(x), ObjVar(y2), ObjVar(w2)])))
    return Forall(tname, conc(3),
                  Implies(And(base, step), Pred(t, [ObjVar(a), ObjVar(b), ObjVar(c)])))


def times_formula(a, b, c, sym=None):
    """Same shape for products; the step adds through the sum graph."""
    sym = sym or blv_symbol_id()
    tname = S.fresh_name("T", {a, b, c})
    t = ConcVar(tname, 3)
    x, z = "x", "z"
    base = forall_all([(x, OBJ), (z, OBJ)],
                      Implies(zero_formula(z, sym),
                              Pred(t, [ObjVar(x), ObjVar(z), ObjVar(z)])))
    y, w, y2, w2 = "y", "w", "y2", "w2"
    step = forall_all(
        [(x, OBJ), (y, OBJ), (w, OBJ), (y2, OBJ), (w2, OBJ)],
        Implies(and_all([Pred(t, [ObjVar(x), ObjVar(y), ObjVar(w)]),
                         succ_sigma(y, y2, sym),
                         plus_formula(w, x, w2, sym)]),
                Pred(t, [ObjVar(x), ObjVar(y2), ObjVar(w2)])))
    return Forall(tname, conc(3),
                  Implies(And(base, step), Pred(t, [ObjVar(a), ObjVar(b), ObjVar(c)])))


class InterpretationData:
    """The fixed defined notions the translation is built from."""

    def __init__(self, sym):
        self.symbol_id = sym
        self.zero_def = zero_formula("z", sym)
        self.succ_graph = (succ_sigma("x", "y", sym), succ_pi("x", "y", sym))
        self.n_def = n_formula("x", sym)
        self.plus_graph_def = plus_formula("a", "b", "c", sym)
        self.times_graph_def = times_formula("a", "b", "c", sym)


def interpretation_data(registry):
    """The interpretation's defined notions; requires the extension
    operator (the coextensionality abstraction) to be certified."""
    sym = blv_symbol_id()
    if registry.by_id(sym, registry.level) is None:
        raise Pa2Error("the extension operator is not certified in this registry")
    return InterpretationData(sym)


# ---------------------------------------------------------------------------
# translation

class _Names:
    def __init__(self, reserved):
        self.reserved = set(reserved)
        self.counter = 0

    def fresh(self):
        while True:
            self.counter += 1
            name = "_t%d" % self.counter
            if name not in self.reserved:
                return name


def translate(f, sym=None):
    """Translate an arithmetic formula into the abstraction language.

    Free number variables stay object variables of the same name; free
    set variables stay unary concept variables of the same name.
    """
    sym = sym or blv_symbol_id()
    names = _Names(pa2_free_vars(f).keys() | _all_pa2_names(f))
    return _tr(f, sym, names)


def _all_pa2_names(f):
    out = set()

    def go(g):
        if isinstance(g, PQuant):
            out.add(g.var)
            go(g.body)
        elif isinstance(g, PBin):
            go(g.lhs)
            go(g.rhs)
        elif isinstance(g, PNot):
            go(g.body)
        elif isinstance(g, PIn):
            out.add(g.setvar)

    go(f)
    return out


def _flatten_term(t, sym, names, bindings):
    """Reduce a number term to an object variable name, appending
    (fresh name, graph condition) pairs innermost-first."""
    if isinstance(t, NumVar):
        return t.name
    if isinstance(t, Zero):
        v = names.fresh()
        bindings.append((v, zero_formula(v, sym)))
        return v
    if isinstance(t, Succ):
        a = _flatten_term(t.arg, sym, names, bindings)
        v = names.fresh()
        bindings.append((v, succ_sigma(a, v, sym)))
        return v
    if isinstance(t, Plus):
        a = _flatten_term(t.lhs, sym, names, bindings)
        b = _flatten_term(t.rhs, sym, names, bindings)
        v = names.fresh()
        bindings.append((v, plus_formula(a, b, v, sym)))
        return v
    if isinstance(t, Times):
        a = _flatten_term(t.lhs, sym, names, bindings)
        b = _flatten_term(t.rhs, sym, names, bindings)
        v = names.fresh()
        bindings.append((v, times_formula(a, b, v, sym)))
        return v
    raise Pa2Error("not a number term: %r" % (t,))


def _wrap(bindings, core):
    for v, g in reversed(bindings):
        core = Exists(v, OBJ, And(g, core))
    return core


def _tr(f, sym, names):
    if isinstance(f, PEq):
        bindings = []
        a = _flatten_term(f.lhs, sym, names, bindings)
        b = _flatten_term(f.rhs, sym, names, bindings)
        return _wrap(bindings, Eq(ObjVar(a), ObjVar(b)))
    if isinstance(f, PIn):
        bindings = []
        a = _flatten_term(f.term, sym, names, bindings)
        return _wrap(bindings, Pred(ConcVar(f.setvar, 1), [ObjVar(a)]))
    if isinstance(f, PNot):
        return Not(_tr(f.body, sym, names))
    if isinstance(f, PAnd):
        return And(_tr(f.lhs, sym, names), _tr(f.rhs, sym, names))
    if isinstance(f, POr):
        return Or(_tr(f.lhs, sym, names), _tr(f.rhs, sym, names))
    if isinstance(f, PImplies):
        return Implies(_tr(f.lhs, sym, names), _tr(f.rhs, sym, names))
    if isinstance(f, PIff):
        return Iff(_tr(f.lhs, sym, names), _tr(f.rhs, sym, names))
    if isinstance(f, PForallNum):
        return Forall(f.var, OBJ,
                      Implies(n_formula(f.var, sym), _tr(f.body, sym, names)))
    if isinstance(f, PExistsNum):
        return Exists(f.var, OBJ,
                      And(n_formula(f.var, sym), _tr(f.body, sym, names)))
    if isinstance(f, PForallSet):
        return Forall(f.var, conc(1),
                      Implies(sub_n_formula(f.var, sym), _tr(f.body, sym, names)))
    if isinstance(f, PExistsSet):
        return Exists(f.var, conc(1),
                      And(sub_n_formula(f.var, sym), _tr(f.body, sym, names)))
    raise Pa2Error("not an arithmetic formula: %r" % (f,))


# ---------------------------------------------------------------------------
# the axioms and their proof obligations

def pa2_axioms():
    n, m = NumVar("n"), NumVar("m")
    return [
        ("q1-succ-nonzero", PForallNum("n", PNot(PEq(Succ(n), Zero())))),
        ("q2-succ-injective",
         PForallNum("n", PForallNum("m", PImplies(PEq(Succ(n), Succ(m)),
                                                  PEq(n, m))))),
        ("plus-zero", PForallNum("n", PEq(Plus(n, Zero()), n))),
        ("plus-succ",
         PForallNum("n", PForallNum("m", PEq(Plus(n, Succ(m)),
                                             Succ(Plus(n, m)))))),
        ("times-zero", PForallNum("n", PEq(Times(n, Zero()), Zero()))),
        ("times-succ",
         PForallNum("n", PForallNum("m", PEq(Times(n, Succ(m)),
                                             Plus(Times(n, m), n))))),
        ("induction",
         PForallSet("X", PImplies(PAnd(PIn(Zero(), "X"),
                                       PForallNum("n", PImplies(PIn(n, "X"),
                                                                PIn(Succ(n), "X")))),
                                  PForallNum("n", PIn(n, "X"))))),
        ("comprehension-example",
         PExistsSet("X", PForallNum("n", PIff(PIn(n, "X"), PEq(n, n))))),
    ]


class Obligation:
    def __init__(self, name, pa2_formula, translated, script):
        self.name = name
        self.pa2_formula = pa2_formula
        self.translated = translated
        self.script = script

    def __repr__(self):
        return "Obligation(%s, script=%r)" % (self.name, self.script)


# scripts shipped with the corpus; entries without one are open stretch items
_SCRIPTED = {
    "q1-succ-nonzero": "q1.prf",
    "q2-succ-injective": "q2.prf",
    "induction": "induction.prf",
    "comprehension-example": "comprehension_example.prf",
}


def obligations(sym=None):
    """Every axiom with its translation; lemma rows carry the auxiliary
    statements their scripts prove."""
    sym = sym or blv_symbol_id()
    rows = []
    for name, pf in pa2_axioms():
        rows.append(Obligation(name, pf, translate(pf, sym), _SCRIPTED.get(name)))
    # auxiliary lemma: the successor graph exists as a binary concept
    f = ConcVar("f", 2)
    sgraph_exists = Exists(
        "f", conc(2),
        forall_all([("x", OBJ), ("y", OBJ)],
                   Iff(Pred(f, [ObjVar("x"), ObjVar("y")]), succ_sigma("x", "y", sym))))
    rows.append(Obligation("succ-graph-exists", None, sgraph_exists, "succ_graph.prf"))
    return rows
