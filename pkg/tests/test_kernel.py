import pytest

from pft import kernel as K
from pft import schemas as Sc
from pft.syntax import (
    OBJ, Abs, AbstractionSymbol, And, ConcVar, Eq, Exists, Forall, Iff,
    Implies, Not, ObjVar, Pred, Signature, alpha_eq, conc, parse_formula,
)


def line(n, f, rule, args=()):
    return K.Line(n, f, rule, args)


X = ObjVar("x")


def test_two_line_script():
    d = K.Derivation([
        line(1, Eq(X, X), "refl"),
        line(2, Forall("x", OBJ, Eq(X, X)), "gen", ("x", OBJ, 1)),
    ])
    rep = K.check(d, K.SIGMA11_OS)
    assert rep.ok, rep


def test_bad_line_order():
    d = K.Derivation([
        line(2, Eq(X, X), "refl"),
        line(1, Forall("x", OBJ, Eq(X, X)), "gen", ("x", OBJ, 2)),
    ])
    assert not K.check(d, K.SIGMA11_OS).ok


def test_mp_and_p1():
    a = Eq(X, X)
    b = Forall("x", OBJ, Eq(X, X))
    d = K.Derivation([
        line(1, a, "refl"),
        line(2, Implies(a, Implies(b, a)), "p1"),
        line(3, Implies(b, a), "mp", (2, 1)),
    ])
    assert K.check(d, K.SIGMA11_OS).ok


def test_refl_rejects_distinct_terms():
    d = K.Derivation([line(1, Eq(ObjVar("x"), ObjVar("y")), "refl")])
    rep = K.check(d, K.SIGMA11_OS)
    assert not rep.ok and rep.first_failure[0] == 1


def test_extensionality_axiom_recognized():
    f = Sc.extensionality_axiom(1)
    assert K.axiom_of(K.SIGMA11_OS, K.EMPTY_REGISTRY, f) is not None
    d = K.Derivation([line(1, f, "axiom", ("extensionality",))])
    assert K.check(d, K.SIGMA11_OS).ok


def test_projection_axiom_recognized():
    f = Sc.projection_axiom(2, 1)
    ax = K.axiom_of(K.SIGMA11_OS, K.EMPTY_REGISTRY, f)
    assert ax is not None and ax.schema.params == (2, 1)


def test_fo_comp_recognized_and_higher_order_rejected():
    phi = parse_formula("(vars ((G (Conc 1))) (pred G x))")
    inst = Sc.fo_comp_instance(phi, ["x"], "F")
    assert K.axiom_of(K.SIGMA11_OS, K.EMPTY_REGISTRY, inst) is not None
    higher = Sc.full_comp_instance(
        parse_formula("(exists (Z (Conc 1)) (pred Z x))"), ["x"], "F")
    assert K.axiom_of(K.SIGMA11_OS, K.EMPTY_REGISTRY, higher) is None


def test_sigma11_choice_recognized():
    phi = parse_formula(
        "(vars ((Rp (Conc 1))) (forall (y Obj) (iff (pred Rp y) (= y x))))")
    inst = Sc.sigma11_choice_instance(phi, ["x"], "Rp", "R")
    ax = K.axiom_of(K.SIGMA11_OS, K.EMPTY_REGISTRY, inst)
    assert ax is not None and ax.schema.kind == "sigma11-choice"


def test_delta11_admitted_flag_and_strict():
    phi = parse_formula("(exists (Z (Conc 1)) (pred Z x))")
    psi = parse_formula("(forall (Z (Conc 1)) (exists (w Obj) (and (pred Z w) (= w x))))")
    inst = Sc.delta11_comp_instance(phi, psi, ["x"], "F")
    ax = K.axiom_of(K.SIGMA11_OS, K.EMPTY_REGISTRY, inst)
    assert ax is not None and ax.admitted
    assert K.axiom_of(K.SIGMA11_OS, K.EMPTY_REGISTRY, inst, strict=True) is None
    d = K.Derivation([line(1, inst, "axiom")])
    rep = K.check(d, K.SIGMA11_OS)
    assert rep.ok and rep.admitted == (1,)
    assert not K.check(d, K.SIGMA11_OS, strict=True).ok


def test_leibniz_and_cong():
    x, y = ObjVar("x"), ObjVar("y")
    # (x = y) -> ((x = x) -> (y = x))
    f = Implies(Eq(x, y), Implies(Eq(x, x), Eq(y, x)))
    d = K.Derivation([line(1, f, "leibniz", ((0,),))])
    assert K.check(d, K.SIGMA11_OS).ok
    # congruence through a projection term
    R = ConcVar("R", 2)
    from pft.syntax import Proj
    g = Implies(Eq(x, y), Eq(Proj(R, [x]), Proj(R, [y])))
    d2 = K.Derivation([line(1, g, "cong", ((1,),))])
    assert K.check(d2, K.SIGMA11_OS).ok


def test_leibniz_capture_rejected():
    x, y = ObjVar("x"), ObjVar("y")
    # replacing under a binder that captures x is unsound and must fail
    body = Forall("x", OBJ, Eq(x, x))
    bad = Implies(Eq(x, y), Implies(body, Forall("x", OBJ, Eq(y, x))))
    d = K.Derivation([line(1, bad, "leibniz", ((0, 0),))])
    assert not K.check(d, K.SIGMA11_OS).ok


def test_q_axioms():
    a = Forall("x", OBJ, Eq(ObjVar("x"), ObjVar("x")))
    inst = Eq(ObjVar("y"), ObjVar("y"))
    d = K.Derivation([line(1, Implies(a, inst), "q-inst", (ObjVar("y"),))])
    assert K.check(d, K.SIGMA11_OS).ok
    ex = Exists("x", OBJ, Eq(ObjVar("x"), ObjVar("x")))
    d2 = K.Derivation([line(1, Implies(inst, ex), "ex-i", (ObjVar("y"),))])
    assert K.check(d2, K.SIGMA11_OS).ok
    vac = Implies(Eq(ObjVar("y"), ObjVar("y")), Forall("z", OBJ, Eq(ObjVar("y"), ObjVar("y"))))
    d3 = K.Derivation([line(1, vac, "q-vac")])
    assert K.check(d3, K.SIGMA11_OS).ok
    bad_vac = Implies(Eq(ObjVar("y"), ObjVar("y")), Forall("y", OBJ, Eq(ObjVar("y"), ObjVar("y"))))
    d4 = K.Derivation([line(1, bad_vac, "q-vac")])
    assert not K.check(d4, K.SIGMA11_OS).ok


def test_abstraction_axiom_needs_registration():
    e = Sc.corpus_formula("blv_equiv")
    sym = AbstractionSymbol(K.canonical_abstraction_id(e), 1, source=e)
    ap = Sc.abstraction_principle(e, sym)
    # not an axiom of the background theory
    assert K.axiom_of(K.SIGMA11_OS, K.EMPTY_REGISTRY, ap) is None
    d = K.Derivation([line(1, ap, "axiom")])
    rep = K.check(d, K.SIGMA11_OS)
    assert not rep.ok and rep.first_failure[0] == 1
