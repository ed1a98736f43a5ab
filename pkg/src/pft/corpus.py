"""The shipped corpus: named formulas and generated proof scripts.

Scripts are authored here once, as straight-line constructions over the
tactics layer, written to disk, and from then on only ever re-checked by
the kernel.  Builders are deterministic, so regenerating the corpus is
reproducible.
"""

from __future__ import annotations

import os

from . import compiler as C
from . import kernel as K
from . import pa2 as P
from . import schemas as Sc
from . import syntax as S
from . import tactics as T
from .syntax import (
    OBJ, Abs, And, ConcVar, Eq, Exists, Forall, Iff, Implies, Not, ObjVar,
    Pred, conc, forall_all,
)


# ---------------------------------------------------------------------------
# shared lemma builders

def extensionality_pf(m):
    return T.ax(Sc.extensionality_axiom(m), "axiom", ("extensionality",))


def abstraction_axiom_pf(e, sym):
    return T.ax(Sc.abstraction_principle(e, sym), "axiom", ("abstraction",))


def eq_by_coext(u, v, pointwise):
    """From a proof of (forall ā (U ā <-> V ā)) conclude U = V."""
    m = S.term_sort(u).arity
    inst = T.all_elim_many(extensionality_pf(m), [u, v])
    return T.iff_mp_back(inst, pointwise)


def singleton_intro(p_single, x_term):
    """From U = {x} pointwise, conclude U x."""
    inst = T.all_elim(p_single, x_term)
    return T.iff_mp_back(inst, T.eq_refl(x_term))


def singletons_equal(p1, p2):
    """From U = {x} and V = {x} (both pointwise), conclude U = V."""
    u = _singleton_subject(p1)
    v = _singleton_subject(p2)
    w = S.fresh_name("w", set(S.free_vars_term(u)) | set(S.free_vars_term(v)))
    wv = ObjVar(w)
    i1 = T.all_elim(p1, wv)
    i2 = T.all_elim(p2, wv)
    per_w = T.taut(Iff(i1.formula.lhs, i2.formula.lhs), [i1, i2])
    return eq_by_coext(u, v, T.gen(w, OBJ, per_w))


def _singleton_subject(pf):
    # (forall w (U w <-> w = x)) -> the term U
    return pf.formula.body.lhs.rel


def empties_equal(p1, p2):
    """From two pointwise emptiness proofs, conclude U = V."""
    u = p1.formula.body.body.rel
    v = p2.formula.body.body.rel
    w = S.fresh_name("w", set(S.free_vars_term(u)) | set(S.free_vars_term(v)))
    wv = ObjVar(w)
    i1 = T.all_elim(p1, wv)
    i2 = T.all_elim(p2, wv)
    per_w = T.taut(Iff(Pred(u, [wv]), Pred(v, [wv])), [i1, i2])
    return eq_by_coext(u, v, T.gen(w, OBJ, per_w))


def singleton_exists_pf(x_name):
    """The comprehension axiom instance providing {x}."""
    xn = S.fresh_name("X", {x_name})
    phi = Eq(ObjVar(S.fresh_name("w", {x_name, xn})), ObjVar(x_name))
    w = phi.lhs.name
    inst = Sc.fo_comp_instance(phi, [w], xn)
    return T.ax(inst, "axiom", ("fo-comp",))


def empty_exists_pf():
    """The comprehension axiom instance providing the empty concept,
    stated with the always-false matrix."""
    phi = Not(Eq(ObjVar("w"), ObjVar("w")))
    inst = Sc.fo_comp_instance(phi, ["w"], "X")
    return T.ax(inst, "axiom", ("fo-comp",))


def comp_to_empty(p_comp_inst):
    """Turn (forall w (X w <-> not (w = w))) into pointwise emptiness."""
    xterm = p_comp_inst.formula.body.lhs.rel
    w = p_comp_inst.formula.var
    wv = ObjVar(w)
    i = T.all_elim(p_comp_inst, wv)
    notw = T.taut(Not(Pred(xterm, [wv])), [i, T.eq_refl(wv)])
    return T.gen(w, OBJ, notw)


def contradiction_to(target, pf_a, pf_not_a):
    """Anything follows from a contradicted pair."""
    return T.taut(target, [pf_a, pf_not_a])


def bottom_from(pf_a, pf_not_a):
    phi = Forall("x", OBJ, Eq(ObjVar("x"), ObjVar("x")))
    all_refl = T.gen("x", OBJ, T.eq_refl(ObjVar("x")))
    neg = contradiction_to(Not(phi), pf_a, pf_not_a)
    return T.and_intro(all_refl, neg)


# ---------------------------------------------------------------------------
# the coextensionality certificate

def equiv_blv_derivation():
    """Equiv(X = Y) in the background theory: reflexivity by refl,
    symmetry and transitivity through replacement."""
    cs = conc(1)
    r, s, t = ConcVar("R", 1), ConcVar("S", 1), ConcVar("T", 1)
    refl = T.eq_refl(r)
    h_rs, tok1 = T.assume(Eq(r, s))
    sym = T.ded(T.eq_sym(h_rs), tok1)
    h_both, tok2 = T.assume(And(Eq(r, s), Eq(s, t)))
    trans = T.ded(T.eq_trans(T.and_left(h_both), T.and_right(h_both)), tok2)
    body = T.conjoin([refl, sym, trans])
    pf = T.gen_many([("R", cs), ("S", cs), ("T", cs)], body)
    return T.flatten(pf)


def certify_blv(registry=None):
    registry = registry or K.Registry(1)
    return K.certify_equivalence(Sc.corpus_formula("blv_equiv"),
                                 equiv_blv_derivation(), registry)


# ---------------------------------------------------------------------------
# the equinumerosity certificate

def _bij_clause_formulas(fterm, xterm, yterm):
    """The five bijection-graph clauses with a given graph term and
    endpoint concept terms, matching the corpus rendering."""
    def fp(a, b):
        return Pred(fterm, [a, b])

    a, b, c = ObjVar("a"), ObjVar("b"), ObjVar("c")
    return [
        forall_all([("a", OBJ), ("b", OBJ)],
                   Implies(fp(a, b), And(Pred(xterm, [a]), Pred(yterm, [b])))),
        forall_all([("a", OBJ)],
                   Implies(Pred(xterm, [a]), Exists("b", OBJ, fp(a, ObjVar("b"))))),
        forall_all([("a", OBJ), ("b", OBJ), ("c", OBJ)],
                   Implies(And(fp(a, b), fp(a, c)), Eq(b, c))),
        forall_all([("a", OBJ), ("b", OBJ), ("c", OBJ)],
                   Implies(And(fp(a, c), fp(b, c)), Eq(a, b))),
        forall_all([("b", OBJ)],
                   Implies(Pred(yterm, [b]), Exists("a", OBJ, fp(ObjVar("a"), b)))),
    ]


def equiv_hp_derivation():
    """Equiv(equinumerosity) in the background theory.

    Reflexivity takes the identity graph on X, symmetry the converse
    graph, transitivity the relational composite; each graph is supplied
    by a comprehension axiom instance and its clauses are proved by
    first-order reasoning.
    """
    from . import hp_cert
    return hp_cert.build()


def certify_hp(registry):
    return K.certify_equivalence(Sc.corpus_formula("hp_equiv"),
                                 equiv_hp_derivation(), registry)


# ---------------------------------------------------------------------------
# arithmetic obligation scripts

def succ_graph_derivation(sym):
    """The successor graph exists as a binary concept: the two block
    definitions agree, so the admitted comprehension bridge applies."""
    x, y = ObjVar("x"), ObjVar("y")
    sigma = P.succ_sigma("x", "y", sym)
    pi = P.succ_pi("x", "y", sym)

    # sigma -> pi
    h_sig, t_sig = T.assume(sigma)

    def to_pi(h):
        # h proves single(U, x) & abs(U) = y for the witness U
        single_u = T.and_left(h)
        abs_u = T.and_right(h)
        u = _singleton_subject(single_u)
        h_single2, t2 = T.assume(P.is_singleton_of("X2", "x"))
        eq_uv = singletons_equal(h_single2, single_u)
        # abs(X2) = abs(U) = y
        absx2 = T.cong_term(eq_uv, Abs(sym, ConcVar("X2", 1)), (0,))
        got = T.eq_trans(absx2, abs_u)
        return T.gen("X2", conc(1), T.ded(got, t2))

    pi_pf = T.ex_elim(h_sig, "U", to_pi)
    sig_to_pi = T.ded(pi_pf, t_sig)

    # pi -> sigma
    h_pi, t_pi = T.assume(pi)

    def to_sigma(h_single):
        u = _singleton_subject(h_single)
        inst = T.mp(T.all_elim(h_pi, u), h_single)
        return T.ex_intro(sigma, u, T.and_intro(h_single, inst))

    sig_pf = T.ex_elim(singleton_exists_pf("x"), "U", to_sigma)
    pi_to_sig = T.ded(sig_pf, t_pi)

    both = T.iff_intro(sig_to_pi, pi_to_sig)
    ante = T.gen_many([("x", OBJ), ("y", OBJ)], both)
    bridge = T.ax(Sc.delta11_comp_instance(sigma, pi, ["x", "y"], "f"),
                  "axiom", ("delta11-comp",))
    return T.flatten(T.mp(bridge, ante))


def q1_derivation(sym):
    """No successor is the zero object, relativized as translated."""
    e = Sc.corpus_formula("blv_equiv")
    symbol = S.AbstractionSymbol(sym, 1, source=e)
    blv = abstraction_axiom_pf(e, symbol)
    target = P.translate(P.pa2_axioms()[0][1], sym)
    # target: forall n (N n -> not psi)
    n_pred = target.body.lhs
    psi = target.body.rhs.body

    h_psi, t_psi = T.assume(psi)

    def outer(h1):
        sg = T.and_left(h1)       # exists X (single & abs = _t1)
        rest = T.and_right(h1)    # exists _t2 (zero & _t1 = _t2)

        def inner(h2):
            zero = T.and_left(h2)     # exists X (empty & abs X = _t2)
            eq12 = T.and_right(h2)    # _t1 = _t2

            def with_u(h3):
                single_u = T.and_left(h3)
                abs_u = T.and_right(h3)   # abs(U) = _t1

                def with_v(h4):
                    empty_v = T.and_left(h4)
                    abs_v = T.and_right(h4)   # abs(V) = _t2
                    u = _singleton_subject(single_u)
                    v = empty_v.formula.body.body.rel
                    eq_abs = T.eq_trans(T.eq_trans(abs_u, eq12), T.eq_sym(abs_v))
                    iff_uv = T.all_elim_many(blv, [u, v])
                    eq_uv = T.iff_mp(iff_uv, eq_abs)
                    un = singleton_intro(single_u, ObjVar("n"))
                    vn = T.rewrite(eq_uv, un, [(0,)])
                    not_vn = T.all_elim(empty_v, ObjVar("n"))
                    return bottom_from(vn, not_vn)

                return T.ex_elim(zero, "V", with_v)

            return T.ex_elim(sg, "U", with_u)

        return T.ex_elim(rest, "w2", inner)

    bot = T.ex_elim(h_psi, "w1", outer)
    psi_to_bot = T.ded(bot, t_psi)
    not_psi = T.taut(Not(psi), [psi_to_bot])
    goal = T.taut(Implies(n_pred, Not(psi)), [not_psi])
    return T.flatten(T.gen("n", OBJ, goal))


def q2_derivation(sym):
    """The successor operation is injective, as translated."""
    e = Sc.corpus_formula("blv_equiv")
    symbol = S.AbstractionSymbol(sym, 1, source=e)
    blv = abstraction_axiom_pf(e, symbol)
    target = P.translate(P.pa2_axioms()[1][1], sym)
    # forall n (N n -> forall m (N m -> (psi -> n = m)))
    n_pred = target.body.lhs
    inner_all = target.body.rhs
    m_pred = inner_all.body.lhs
    psi = inner_all.body.rhs.lhs
    concl = inner_all.body.rhs.rhs

    h_psi, t_psi = T.assume(psi)

    def outer(h1):
        sg_n = T.and_left(h1)
        rest = T.and_right(h1)

        def inner(h2):
            sg_m = T.and_left(h2)
            eq12 = T.and_right(h2)

            def with_u(h3):
                single_u = T.and_left(h3)
                abs_u = T.and_right(h3)

                def with_v(h4):
                    single_v = T.and_left(h4)
                    abs_v = T.and_right(h4)
                    u = _singleton_subject(single_u)
                    v = _singleton_subject(single_v)
                    eq_abs = T.eq_trans(T.eq_trans(abs_u, eq12), T.eq_sym(abs_v))
                    eq_uv = T.iff_mp(T.all_elim_many(blv, [u, v]), eq_abs)
                    un = singleton_intro(single_u, ObjVar("n"))
                    vn = T.rewrite(eq_uv, un, [(0,)])
                    # V n <-> n = m
                    return T.iff_mp(T.all_elim(single_v, ObjVar("n")), vn)

                return T.ex_elim(sg_m, "V", with_v)

            return T.ex_elim(sg_n, "U", with_u)

        return T.ex_elim(rest, "w2", inner)

    eq_nm = T.ex_elim(h_psi, "w1", outer)
    step = T.ded(eq_nm, t_psi)
    weak_m = T.taut(Implies(m_pred, step.formula), [step])
    allm = T.gen("m", OBJ, weak_m)
    weak_n = T.taut(Implies(n_pred, allm.formula), [allm])
    return T.flatten(T.gen("n", OBJ, weak_n))


def induction_derivation(sym):
    from . import pa2_scripts
    return pa2_scripts.induction_derivation(sym)


def comprehension_example_derivation(sym):
    from . import pa2_scripts
    return pa2_scripts.comprehension_example_derivation(sym)


def russell_derivation():
    from . import pa2_scripts
    return pa2_scripts.russell_derivation()


# ---------------------------------------------------------------------------
# corpus emission

SOF_FILES = {
    "blv_equiv.sof": lambda: Sc.corpus_formula("blv_equiv"),
    "hp_equiv.sof": lambda: Sc.corpus_formula("hp_equiv"),
    "ordinal_equiv.sof": lambda: Sc.corpus_formula("ordinal_equiv"),
    "wo.sof": lambda: Sc.corpus_formula("wo"),
    "succ_graph_sigma.sof": lambda: P.succ_sigma("x", "y", P.blv_symbol_id()),
    "succ_graph_pi.sof": lambda: P.succ_pi("x", "y", P.blv_symbol_id()),
    "zero_def.sof": lambda: P.zero_formula("z", P.blv_symbol_id()),
    "n_def.sof": lambda: P.n_formula("x", P.blv_symbol_id()),
}


def emit_corpus(directory, include_slow=True):
    """Write every corpus artifact; returns the list of file names."""
    os.makedirs(directory, exist_ok=True)
    written = []

    def put(name, text):
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write(text)
        written.append(name)

    sym = P.blv_symbol_id()
    for name, builder in SOF_FILES.items():
        put(name, S.print_sof(builder()) + "\n")
    put("equiv_blv.prf", K.print_derivation(equiv_blv_derivation()))
    put("equiv_hp.prf", K.print_derivation(equiv_hp_derivation()))
    put("succ_graph.prf", K.print_derivation(succ_graph_derivation(sym)))
    put("q1.prf", K.print_derivation(q1_derivation(sym)))
    put("q2.prf", K.print_derivation(q2_derivation(sym)))
    if include_slow:
        put("russell.prf", K.print_derivation(russell_derivation()))
        put("induction.prf", K.print_derivation(induction_derivation(sym)))
        put("comprehension_example.prf",
            K.print_derivation(comprehension_example_derivation(sym)))
        gx = C.compile_formula(
            S.parse_formula("(vars ((G (Conc 1))) (pred G x))"), 1)
        C.write_compilation(gx, directory, prefix="gx")
        written.extend(sorted(gx.file_names("gx")))
    return written
