import random

import pytest

from pft import models as M
from pft import schemas as Sc
from pft.syntax import (
    OBJ, Abs, AbstractionSymbol, And, ConcVar, Eq, Exists, Forall, Iff,
    Implies, Not, ObjVar, Pred, Proj, Signature, alpha_eq, conc, free_vars,
    parse_formula, print_formula, well_sorted,
)
from tests.test_syntax import random_formula

EMPTY = Signature()


# --- classification ----------------------------------------------------------

def test_classify_first_order():
    f = parse_formula("(forall (x Obj) (= x x))")
    assert Sc.classify(f) is Sc.FormulaClass.FIRST_ORDER
    assert Sc.admits(f, Sc.FormulaClass.SIGMA11)
    assert Sc.admits(f, Sc.FormulaClass.PI11)


def test_classify_sigma11():
    f = parse_formula("(exists (X (Conc 1)) (forall (x Obj) (iff (pred X x) (= x x))))")
    assert Sc.classify(f) is Sc.FormulaClass.SIGMA11
    assert not Sc.admits(f, Sc.FormulaClass.PI11)


def test_classify_alternation_unclassified():
    f = parse_formula(
        "(forall (X (Conc 1)) (exists (Y (Conc 1))"
        " (forall (x Obj) (iff (pred X x) (pred Y x)))))")
    assert Sc.classify(f) is Sc.FormulaClass.UNCLASSIFIED


def test_classify_object_quantifier_breaks_block():
    f = parse_formula(
        "(exists (X (Conc 1)) (exists (x Obj) (exists (Y (Conc 1))"
        " (and (pred X x) (pred Y x)))))")
    assert Sc.classify(f) is Sc.FormulaClass.UNCLASSIFIED


def test_classify_alpha_invariant():
    rng = random.Random(5)
    from pft.syntax import subst_par
    for _ in range(60):
        f = random_formula(rng, rng.randint(0, 4))
        # rename every binder by round-tripping through canonical parse
        from pft.syntax import parse_sof, print_sof
        g = parse_sof(print_sof(f))
        assert Sc.classify(f) is Sc.classify(g)


# --- comprehension and choice -------------------------------------------------

def test_fo_comp_simple():
    phi = parse_formula("(vars ((x Obj)) (= x x))")
    inst = Sc.fo_comp_instance(phi, ["x"], "F")
    expected = parse_formula(
        "(exists (F (Conc 1)) (forall (x Obj) (iff (pred F x) (= x x))))")
    assert alpha_eq(inst, expected)


def test_fo_comp_singleton_product():
    # existence of {x} x G as a binary relation, parameters x and G free
    phi = parse_formula("(vars ((G (Conc 1)) (a Obj) (x Obj)) (and (= a x) (pred G b)))")
    inst = Sc.fo_comp_instance(phi, ["a", "b"], "R")
    assert well_sorted(EMPTY, inst).ok
    assert free_vars(inst) == {"x": OBJ, "G": conc(1)}
    assert Sc.classify(phi) is Sc.FormulaClass.FIRST_ORDER


def test_fo_comp_rejects_higher_order():
    phi = parse_formula("(exists (X (Conc 1)) (pred X x))")
    with pytest.raises(Sc.NotFirstOrder):
        Sc.fo_comp_instance(phi, ["x"], "F")


def test_fo_comp_rejects_collision():
    phi = parse_formula("(vars ((F (Conc 1))) (pred F x))")
    with pytest.raises(Sc.VariableCollision):
        Sc.fo_comp_instance(phi, ["x"], "F")


def test_full_comp_accepts_higher_order():
    phi = parse_formula("(exists (X (Conc 1)) (pred X x))")
    inst = Sc.full_comp_instance(phi, ["x"], "F")
    assert well_sorted(EMPTY, inst).ok
    # the inductive-numbers matrix from the arithmetic interpretation
    ind = parse_formula(
        "(vars ((z Obj) (s (Conc 2)))"
        " (forall (F (Conc 1)) (implies (and (pred F z)"
        " (forall (u Obj) (forall (v Obj)"
        " (implies (and (pred F u) (pred s u v)) (pred F v)))))"
        " (pred F x))))")
    inst2 = Sc.full_comp_instance(ind, ["x"], "N")
    assert well_sorted(EMPTY, inst2).ok


def test_full_comp_russell_instance():
    sig = Signature([AbstractionSymbol("d0", 1)])
    phi = parse_formula(
        "(exists (X (Conc 1)) (and (= (abs d0 X) x) (not (pred X x))))", sig)
    inst = Sc.full_comp_instance(phi, ["x"], "F")
    assert well_sorted(sig, inst).ok


def test_delta11_trivial():
    phi = parse_formula("(vars ((x Obj)) (= x x))")
    inst = Sc.delta11_comp_instance(phi, phi, ["x"], "F")
    expected = parse_formula(
        "(implies (forall (x Obj) (iff (= x x) (= x x)))"
        " (exists (F (Conc 1)) (forall (x Obj) (iff (pred F x) (= x x)))))")
    assert alpha_eq(inst, expected)


def test_delta11_wrong_class():
    pi = parse_formula("(forall (X (Conc 1)) (pred X x))")
    sigma = parse_formula("(exists (X (Conc 1)) (pred X x))")
    with pytest.raises(Sc.WrongClass):
        Sc.delta11_comp_instance(pi, pi, ["x"], "F")
    inst = Sc.delta11_comp_instance(sigma, pi, ["x"], "F")
    assert well_sorted(EMPTY, inst).ok


def test_sigma11_choice_singleton():
    phi = parse_formula(
        "(vars ((Rp (Conc 1))) (forall (y Obj) (iff (pred Rp y) (= y x))))")
    inst = Sc.sigma11_choice_instance(phi, ["x"], "Rp", "R")
    expected = parse_formula(
        "(implies"
        " (forall (x Obj) (exists (Rp (Conc 1))"
        "  (forall (y Obj) (iff (pred Rp y) (= y x)))))"
        " (exists (R (Conc 2)) (forall (x Obj)"
        "  (forall (y Obj) (iff (pred (proj R x) y) (= y x))))))")
    assert alpha_eq(inst, expected)


def test_sigma11_choice_inner_witness():
    phi = parse_formula(
        "(vars ((Rp (Conc 1)))"
        " (exists (Z (Conc 1)) (forall (y Obj) (iff (pred Rp y) (pred Z y)))))")
    inst = Sc.sigma11_choice_instance(phi, ["x"], "Rp", "R")
    assert well_sorted(EMPTY, inst).ok


def test_sigma11_choice_wrong_class():
    phi = parse_formula("(vars ((Rp (Conc 1))) (forall (Z (Conc 1)) (pred Z x)))")
    with pytest.raises(Sc.WrongClass):
        Sc.sigma11_choice_instance(phi, ["x"], "Rp", "R")


# --- background axioms --------------------------------------------------------

def test_extensionality_unary():
    ax = Sc.extensionality_axiom(1)
    expected = parse_formula(
        "(forall (R (Conc 1)) (forall (S (Conc 1)) (iff (= R S)"
        " (forall (a Obj) (iff (pred R a) (pred S a))))))")
    assert alpha_eq(ax, expected)
    with pytest.raises(Sc.BadArity):
        Sc.extensionality_axiom(0)


def test_projection_1_1():
    ax = Sc.projection_axiom(1, 1)
    expected = parse_formula(
        "(forall (R (Conc 2)) (forall (a Obj) (forall (b Obj)"
        " (iff (pred (proj R a) b) (pred R a b)))))")
    assert alpha_eq(ax, expected)
    with pytest.raises(Sc.BadArity):
        Sc.projection_axiom(0, 1)


# --- equivalence machinery ----------------------------------------------------

def test_equiv_sentence_blv():
    e = Sc.corpus_formula("blv_equiv")
    assert print_formula(e) == "(= X Y)"
    sent = Sc.equiv_sentence(e)
    assert well_sorted(EMPTY, sent).ok
    assert free_vars(sent) == {}
    assert M.evaluate(M.Structure(2), {}, sent)


def test_equiv_sentence_rejects_extra_free_vars():
    bad = parse_formula(
        "(vars ((X (Conc 1)) (Y (Conc 1)) (Z (Conc 1)))"
        " (and (= X Y) (= Z Z)))")
    with pytest.raises(Sc.SchemaError):
        Sc.equiv_sentence(bad)


def test_abstraction_principle_blv():
    e = Sc.corpus_formula("blv_equiv")
    sym = AbstractionSymbol("d0", 1)
    ap = Sc.abstraction_principle(e, sym)
    expected = parse_formula(
        "(forall (R (Conc 1)) (forall (S (Conc 1))"
        " (iff (= (abs d0 R) (abs d0 S)) (= R S))))",
        Signature([sym]))
    assert alpha_eq(ap, expected)
    with pytest.raises(Sc.BadArity):
        Sc.abstraction_principle(e, AbstractionSymbol("d1", 2))


def test_corpus_formulas_well_sorted():
    for name in Sc.corpus_names():
        f = Sc.corpus_formula(name)
        assert well_sorted(EMPTY, f).ok, name
    with pytest.raises(Sc.SchemaError):
        Sc.corpus_formula("nonsense")


def test_hp_equiv_is_equivalence_small():
    sent = Sc.equiv_sentence(Sc.corpus_formula("hp_equiv"))
    for d in (1, 2):
        assert M.evaluate(M.Structure(d), {}, sent)


def test_hp_class_counts():
    e = Sc.corpus_formula("hp_equiv")
    for d in (1, 2):
        rep = M.check_equiv(e, d)
        assert rep.is_equivalence
        assert rep.class_count == d + 1  # classes are the cardinalities


# --- soundness of generated instances in full structures ----------------------

def test_fo_comp_instances_sound():
    rng = random.Random(41)
    instances = []
    for _ in range(25):
        phi = random_formula(rng, rng.randint(0, 3), first_order=True)
        fv = [n for n, s in free_vars(phi).items() if s == OBJ]
        tuple_vars = fv[:1] or ["x"]
        instances.append(Sc.fo_comp_instance(phi, tuple_vars, "F0"))
    rep = M.validate_instances(instances, 2)
    assert rep.ok, rep.falsifiers[:1]


def test_sigma11_choice_instances_sound():
    rng = random.Random(43)
    instances = []
    for _ in range(15):
        pool = {"x": OBJ, "y": OBJ, "Rp": conc(1), "X": conc(1)}
        matrix = random_formula(rng, rng.randint(0, 2), pool=pool, first_order=True)
        if "Rp" not in free_vars(matrix):
            matrix = And(Pred(ConcVar("Rp", 1), [ObjVar("x")]), matrix)
        instances.append(Sc.sigma11_choice_instance(matrix, ["x"], "Rp", "Rc"))
    rep = M.validate_instances(instances, 2)
    assert rep.ok, rep.falsifiers[:1]


def test_hoister():
    f = parse_formula(
        "(and (exists (X (Conc 1)) (pred X a)) (forall (x Obj) (= x x)))")
    g = Sc.hoist_concept_quantifiers(f)
    assert isinstance(g, Exists) and g.sort.is_concept
    for d in (1, 2):
        s = M.Structure(d)
        for a in range(d):
            assert (M.evaluate(s, {"a": a}, f) == M.evaluate(s, {"a": a}, g))
