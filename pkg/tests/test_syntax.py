import random

import pytest

from pft.syntax import (
    OBJ, Abs, AbstractionSymbol, And, ConcVar, Eq, Exists, Forall, Iff,
    Implies, Not, ObjVar, Or, Pred, Proj, Signature, SofSortError,
    SofSyntaxError, alpha_eq, canon_str, canonical_symbol_id, conc,
    flatten_projection, free_vars, fresh_name, parse_formula, parse_sof,
    print_formula, print_sof, substitute, term_sort, well_sorted,
)

EMPTY = Signature()


def test_parse_identity():
    f = parse_formula("(forall (x Obj) (= x x))")
    assert f == Forall("x", OBJ, Eq(ObjVar("x"), ObjVar("x")))


def test_parse_minimal_predication():
    f = parse_formula("(exists (X (Conc 1)) (pred X a))")
    assert f == Exists("X", conc(1), Pred(ConcVar("X", 1), (ObjVar("a"),)))
    assert free_vars(f) == {"a": OBJ}


def test_parse_abstraction_equality():
    sig = Signature([AbstractionSymbol("dE", 2)])
    f = parse_formula("(= (abs dE R) (abs dE S))", sig)
    assert f == Eq(Abs("dE", ConcVar("R", 2)), Abs("dE", ConcVar("S", 2)))


def test_parse_unknown_abstraction_symbol():
    with pytest.raises(SofSyntaxError, match="unknown abstraction symbol"):
        parse_formula("(= (abs dE R) x)")


def test_parse_error_position():
    with pytest.raises(SofSyntaxError) as exc:
        parse_formula("(forall (x Obj) (= x x)")
    assert exc.value.pos is not None


def test_print_round_trips():
    cases = [
        "(forall (x Obj) (= x x))",
        "(exists (X (Conc 1)) (pred X a))",
        "(forall (R (Conc 2)) (exists (x Obj) (pred (proj R x) x)))",
    ]
    for text in cases:
        f = parse_formula(text)
        assert print_formula(f) == text
        assert alpha_eq(parse_formula(print_formula(f)), f)


def test_print_blv_body():
    f = Eq(ConcVar("X", 1), ConcVar("Y", 1))
    assert print_formula(f) == "(= X Y)"
    # the file layer keeps the free-variable sorts
    g = parse_sof(print_sof(f))
    assert alpha_eq(f, g)


def test_comments_ignored():
    f = parse_sof("; a comment\n(forall (x Obj) (= x x)) ; trailing\n")
    assert isinstance(f, Forall)


def test_well_sorted_ok():
    f = parse_formula("(forall (x Obj) (= x x))")
    assert well_sorted(EMPTY, f).ok


def test_cross_sortal_identity_rejected():
    f = Eq(ObjVar("x"), ConcVar("X", 1))
    rep = well_sorted(EMPTY, f)
    assert not rep.ok
    assert any("cross-sortal" in msg for _, msg in rep.errors)


def test_arity_mismatch_rejected():
    f = Pred(ConcVar("R", 2), (ObjVar("a"),))
    rep = well_sorted(EMPTY, f)
    assert not rep.ok
    assert any("arity mismatch" in msg for _, msg in rep.errors)


def test_substitute_simple():
    f = Eq(ObjVar("x"), ObjVar("y"))
    g = substitute(f, "y", OBJ, ObjVar("x"))
    assert g == Eq(ObjVar("x"), ObjVar("x"))


def test_substitute_capture_avoiding():
    # (forall x. R x y)[y := x] must rename the binder
    f = Forall("x", OBJ, Pred(ConcVar("R", 2), (ObjVar("x"), ObjVar("y"))))
    g = substitute(f, "y", OBJ, ObjVar("x"))
    assert isinstance(g, Forall)
    assert g.var != "x"
    assert g.body == Pred(ConcVar("R", 2), (ObjVar(g.var), ObjVar("x")))


def test_substitute_projection_for_concept_var():
    # (X a)[X := R[b]]
    f = Pred(ConcVar("X", 1), (ObjVar("a"),))
    t = Proj(ConcVar("R", 2), (ObjVar("b"),))
    g = substitute(f, "X", conc(1), t)
    assert g == Pred(t, (ObjVar("a"),))


def test_substitute_sort_mismatch():
    f = Eq(ObjVar("x"), ObjVar("y"))
    with pytest.raises(SofSortError):
        substitute(f, "x", OBJ, ConcVar("X", 1))


def test_alpha_eq_basic():
    f = parse_formula("(forall (x Obj) (= x x))")
    g = parse_formula("(forall (y Obj) (= y y))")
    h = parse_formula("(exists (x Obj) (= x x))")
    assert alpha_eq(f, g)
    assert not alpha_eq(f, h)


def test_alpha_eq_concept_binders():
    f = parse_formula("(exists (X (Conc 1)) (forall (a Obj) (iff (pred X a) (= a a))))")
    g = parse_formula("(exists (F (Conc 1)) (forall (b Obj) (iff (pred F b) (= b b))))")
    assert alpha_eq(f, g)
    assert canon_str(f) == canon_str(g)


def test_alpha_eq_distinguishes_free_names():
    f = Pred(ConcVar("X", 1), (ObjVar("a"),))
    g = Pred(ConcVar("Y", 1), (ObjVar("a"),))
    assert not alpha_eq(f, g)


def test_free_vars():
    f = parse_formula("(forall (x Obj) (pred R x y))")
    assert free_vars(f) == {"R": conc(2), "y": OBJ}
    closed = parse_formula(
        "(forall (X (Conc 1)) (forall (Y (Conc 1)) (= X Y)))")
    assert free_vars(closed) == {}


def test_free_vars_abstraction():
    sig = Signature([AbstractionSymbol("d0", 1)])
    f = parse_formula("(= (abs d0 R) y)", sig)
    assert free_vars(f) == {"R": conc(1), "y": OBJ}


def test_fresh_name():
    assert fresh_name("x", {"x"}) == "x1"
    assert fresh_name("x1", {"x1", "x2"}) == "x3"
    assert fresh_name("x", set()) == "x"


def test_flatten_projection():
    t = Proj(Proj(ConcVar("R", 3), (ObjVar("a"),)), (ObjVar("b"),))
    flat = flatten_projection(t)
    assert flat == Proj(ConcVar("R", 3), (ObjVar("a"), ObjVar("b")))
    assert term_sort(flat) == conc(1)


def test_canonical_symbol_id_stability():
    e1 = Eq(ConcVar("X", 1), ConcVar("Y", 1))
    e2 = Eq(ConcVar("R", 1), ConcVar("S", 1))
    # free variables are part of the identity, so these differ
    assert canonical_symbol_id(e1) != canonical_symbol_id(e2)
    assert canonical_symbol_id(e1) == canonical_symbol_id(Eq(ConcVar("X", 1), ConcVar("Y", 1)))
    closed1 = Forall("X", conc(1), Forall("Y", conc(1), Eq(ConcVar("X", 1), ConcVar("Y", 1))))
    closed2 = Forall("R", conc(1), Forall("S", conc(1), Eq(ConcVar("R", 1), ConcVar("S", 1))))
    assert canonical_symbol_id(closed1) == canonical_symbol_id(closed2)


# --- randomized properties ---------------------------------------------------

def random_formula(rng, depth, pool=None, first_order=False):
    pool = pool or {"x": OBJ, "y": OBJ, "X": conc(1), "R": conc(2)}
    names = sorted(pool)
    if depth <= 0:
        kind = rng.choice(["eq", "pred"])
        objs = [n for n in names if pool[n] == OBJ]
        if kind == "eq":
            a, b = rng.choice(objs), rng.choice(objs)
            return Eq(ObjVar(a), ObjVar(b))
        concs = [n for n in names if pool[n].is_concept]
        r = rng.choice(concs)
        args = [ObjVar(rng.choice(objs)) for _ in range(pool[r].arity)]
        return Pred(ConcVar(r, pool[r].arity), args)
    kind = rng.choice(["not", "and", "or", "implies", "iff", "forall", "exists"])
    if kind == "not":
        return Not(random_formula(rng, depth - 1, pool, first_order))
    if kind in ("and", "or", "implies", "iff"):
        cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[kind]
        return cls(random_formula(rng, depth - 1, pool, first_order),
                   random_formula(rng, depth - 1, pool, first_order))
    v = rng.choice(["x", "y", "z"] if first_order else ["x", "y", "z", "X", "Z"])
    sort = OBJ if v.islower() else conc(rng.choice([1, 2]))
    inner = dict(pool)
    inner[v] = sort
    body = random_formula(rng, depth - 1, inner, first_order)
    return (Forall if kind == "forall" else Exists)(v, sort, body)


def test_random_round_trip():
    rng = random.Random(7)
    for _ in range(200):
        f = random_formula(rng, rng.randint(0, 4))
        assert well_sorted(EMPTY, f).ok
        g = parse_sof(print_sof(f))
        assert alpha_eq(f, g)


def test_alpha_eq_is_equivalence_on_random_formulas():
    rng = random.Random(11)
    fs = [random_formula(rng, rng.randint(0, 3)) for _ in range(60)]
    for f in fs:
        assert alpha_eq(f, f)
    for f in fs:
        for g in fs:
            assert alpha_eq(f, g) == alpha_eq(g, f)
    # transitivity through the canonical rendering
    for f in fs:
        for g in fs:
            assert alpha_eq(f, g) == (canon_str(f) == canon_str(g))


def test_substitution_free_var_contract():
    rng = random.Random(13)
    for _ in range(150):
        f = random_formula(rng, rng.randint(0, 3))
        fv = free_vars(f)
        if not fv:
            continue
        v = sorted(fv)[0]
        sort = fv[v]
        if sort == OBJ:
            t = ObjVar("w")
        else:
            t = ConcVar("W", sort.arity)
        g = substitute(f, v, sort, t)
        gv = set(free_vars(g))
        assert gv == (set(fv) - {v}) | {t.name}  # v occurred free, so equality holds
        assert well_sorted(EMPTY, g).ok
