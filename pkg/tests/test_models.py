import random

import pytest

from pft import models as M
from pft.syntax import (
    OBJ, Abs, And, ConcVar, Eq, Exists, Forall, Iff, Implies, Not, ObjVar,
    Or, Pred, Signature, AbstractionSymbol, conc, free_vars, parse_formula,
)
from tests.test_syntax import random_formula


def ext(*tuples):
    return frozenset(tuples)


def test_exists_whole_domain():
    f = parse_formula("(exists (X (Conc 1)) (forall (x Obj) (pred X x)))")
    assert M.evaluate(M.Structure(2), {}, f)


def test_two_unary_concepts_on_singleton_domain():
    f = parse_formula("(forall (X (Conc 1)) (forall (Y (Conc 1)) (= X Y)))")
    assert not M.evaluate(M.Structure(1), {}, f)


def test_projection_semantics():
    # R[a] = {b : R(a, b)}
    f = parse_formula(
        "(forall (R (Conc 2)) (forall (a Obj) (forall (b Obj)"
        " (iff (pred (proj R a) b) (pred R a b)))))")
    assert M.evaluate(M.Structure(2), {}, f)


def test_unbound_variable_error():
    f = parse_formula("(vars ((x Obj) (y Obj)) (= x y))")
    with pytest.raises(M.UnboundVariable):
        M.evaluate(M.Structure(2), {"x": 0}, f)


def test_unmapped_abstraction_is_hard_error():
    sig = Signature([AbstractionSymbol("d0", 1)])
    f = parse_formula("(vars ((X (Conc 1)) (y Obj)) (= (abs d0 X) y))", sig)
    s = M.Structure(2, {("d0", ext((0,))): 1})
    assert M.evaluate(s, {"X": ext((0,)), "y": 1}, f)
    with pytest.raises(M.UnsupportedAbstractionTerm):
        M.evaluate(s, {"X": ext((1,)), "y": 1}, f)


def test_extension_cap():
    with pytest.raises(M.CapExceeded):
        M.all_extensions(2, 4)  # 2^16 extensions


def test_evaluator_matches_naive_on_random_formulas():
    def naive(s, env, f):
        if isinstance(f, Pred):
            rel = naive_t(s, env, f.rel)
            return tuple(naive_t(s, env, a) for a in f.args) in rel
        if isinstance(f, Eq):
            return naive_t(s, env, f.lhs) == naive_t(s, env, f.rhs)
        if isinstance(f, Not):
            return not naive(s, env, f.body)
        if isinstance(f, And):
            return naive(s, env, f.lhs) and naive(s, env, f.rhs)
        if isinstance(f, Or):
            return naive(s, env, f.lhs) or naive(s, env, f.rhs)
        if isinstance(f, Implies):
            return not naive(s, env, f.lhs) or naive(s, env, f.rhs)
        if isinstance(f, Iff):
            return naive(s, env, f.lhs) == naive(s, env, f.rhs)
        if isinstance(f, (Forall, Exists)):
            dom = range(s.size) if f.sort.is_object else M.all_extensions(s.size, f.sort.arity)
            vals = []
            for v in dom:
                env2 = dict(env)
                env2[f.var] = v
                vals.append(naive(s, env2, f.body))
            return all(vals) if isinstance(f, Forall) else any(vals)
        raise AssertionError

    def naive_t(s, env, t):
        if isinstance(t, (ObjVar, ConcVar)):
            return env[t.name]
        return M.eval_term(s, env, t)

    rng = random.Random(23)
    for _ in range(120):
        f = random_formula(rng, rng.randint(0, 4))
        closed = M.universal_closure(f)
        for d in (1, 2):
            s = M.Structure(d)
            assert M.evaluate(s, {}, closed) == naive(s, {}, closed)


def test_substitution_lemma():
    from pft.syntax import substitute
    rng = random.Random(31)
    for _ in range(120):
        f = random_formula(rng, rng.randint(0, 3))
        fv = free_vars(f)
        if not fv:
            continue
        v = sorted(fv)[0]
        sort = fv[v]
        t = ObjVar("y") if sort == OBJ else ConcVar("R", sort.arity) if sort.arity == 2 else ConcVar("X", 1)
        if free_vars({**fv}.get(v) and f or f).get(t.name, sort) != sort and t.name in fv:
            continue  # t's name already used at another sort; skip
        g = substitute(f, v, sort, t)
        s = M.Structure(2)
        names = set(fv) | set(free_vars(g)) | {t.name}
        for trial in range(6):
            env = {}
            for n in sorted(names):
                ns = free_vars(g).get(n) or fv.get(n) or sort
                dom = list(range(2)) if ns == OBJ else M.all_extensions(2, ns.arity)
                env[n] = rng.choice(dom)
            lhs = M.evaluate(s, env, g)
            env2 = dict(env)
            env2[v] = M.eval_term(s, env, t)
            rhs = M.evaluate(s, env2, f)
            assert lhs == rhs


BLV = parse_formula("(vars ((X (Conc 1)) (Y (Conc 1))) (= X Y))")


def test_check_equiv_identity():
    rep = M.check_equiv(BLV, 2)
    assert rep.is_equivalence
    assert rep.class_count == 4


def test_check_equiv_identity_all_sizes():
    for d in (1, 2, 3):
        rep = M.check_equiv(BLV, d)
        assert rep.is_equivalence
        assert rep.class_count == 2 ** d


def test_check_equiv_counterexamples():
    # "X is a subset of Y" is reflexive and transitive but not symmetric
    sub = parse_formula(
        "(vars ((X (Conc 1)) (Y (Conc 1)))"
        " (forall (w Obj) (implies (pred X w) (pred Y w))))")
    rep = M.check_equiv(sub, 2)
    assert rep.is_reflexive and rep.is_transitive and not rep.is_symmetric
    assert rep.sym_counterexample is not None
    assert rep.class_count is None
    # "X and Y overlap" (on nonempty) fails transitivity; make it reflexive-ish
    overlap = parse_formula(
        "(vars ((X (Conc 1)) (Y (Conc 1)))"
        " (or (and (forall (w Obj) (not (pred X w))) (forall (w Obj) (not (pred Y w))))"
        " (exists (w Obj) (and (pred X w) (pred Y w)))))")
    rep2 = M.check_equiv(overlap, 2)
    assert rep2.is_reflexive and rep2.is_symmetric and not rep2.is_transitive
    a, b, c = rep2.trans_counterexample
    s = M.Structure(2)
    assert M.evaluate(s, {"X": a, "Y": b}, overlap)
    assert M.evaluate(s, {"X": b, "Y": c}, overlap)
    assert not M.evaluate(s, {"X": a, "Y": c}, overlap)


def test_search_abstraction_identity_none():
    # pigeonhole: 2^d classes never fit in d atoms
    for d in (1, 2, 3):
        found, searched = M.search_abstraction(BLV, d)
        assert found is None
        assert searched == d ** (2 ** d)


def test_search_abstraction_one_class_witness():
    always = parse_formula(
        "(vars ((X (Conc 1)) (Y (Conc 1))) (and (= X X) (= Y Y)))")
    found, searched = M.search_abstraction(always, 1)
    assert found is not None
    assert len(set(found.values())) == 1


def test_validate_instances_catches_contradiction():
    good = parse_formula(
        "(exists (F (Conc 1)) (forall (x Obj) (iff (pred F x) (= x x))))")
    bad = parse_formula(
        "(exists (F (Conc 1)) (forall (x Obj) (iff (pred F x) (not (pred F x)))))")
    rep = M.validate_instances([good, bad], 2)
    assert not rep.ok
    assert [idx for idx, _, _ in rep.falsifiers] == [1, 1]
    rep2 = M.validate_instances([good], 2)
    assert rep2.ok
