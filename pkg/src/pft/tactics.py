"""Proof construction helpers (untrusted; everything they emit is
re-checked by the kernel).

Proofs are built as trees over four primitive node kinds: axiom lines,
hypotheses, modus ponens and generalization.  Hypotheses are discharged
through the standard deduction-theorem transformation, a small Kalmar
style engine turns propositional tautologies into Hilbert derivations,
and quantifier and equality combinators wrap the kernel's axiom forms.
`flatten` linearizes a finished (hypothesis-free) tree into a checkable
derivation, deduplicating lines by formula.
"""

from __future__ import annotations

import itertools

from . import kernel as K
from . import syntax as S
from .syntax import (
    OBJ, And, ConcVar, Eq, Exists, Forall, Iff, Implies, Not, ObjVar, Or,
    Pred, alpha_eq, conc, free_vars, substitute, term_sort, var_of_sort,
)


class TacticError(Exception):
    pass


class Token:
    """A hypothesis marker; carries its formula so discharge and
    eigenvariable checks need no context."""

    __slots__ = ("formula", "label", "free")

    def __init__(self, formula, label=None):
        self.formula = formula
        self.label = label
        self.free = frozenset(free_vars(formula))

    def __repr__(self):
        return "Token(%s)" % (self.label or S.print_formula(self.formula))


_EMPTY = frozenset()


class Pf:
    """A proof node; `hyps` is the set of live hypothesis tokens."""

    __slots__ = ("kind", "formula", "a", "b", "var", "sort", "rule", "args",
                 "token", "hyps")

    def __init__(self, kind, formula, hyps, **kw):
        self.kind = kind
        self.formula = formula
        self.hyps = hyps
        self.a = kw.get("a")
        self.b = kw.get("b")
        self.var = kw.get("var")
        self.sort = kw.get("sort")
        self.rule = kw.get("rule")
        self.args = kw.get("args", ())
        self.token = kw.get("token")

    def __repr__(self):
        return "Pf(%s, %s)" % (self.kind, S.print_formula(self.formula))


def ax(formula, rule, args=()):
    return Pf("ax", formula, _EMPTY, rule=rule, args=tuple(args))


def hyp(token):
    return Pf("hyp", token.formula, frozenset((token,)), token=token)


def assume(formula, label=None):
    tok = Token(formula, label)
    return hyp(tok), tok


def mp(imp, ant):
    f = imp.formula
    if not isinstance(f, Implies):
        raise TacticError("mp needs an implication, got %s" % S.print_formula(f))
    if f.lhs != ant.formula and not alpha_eq(f.lhs, ant.formula):
        raise TacticError(
            "mp mismatch:\n  wants %s\n  got   %s"
            % (S.print_formula(f.lhs), S.print_formula(ant.formula)))
    return Pf("mp", f.rhs, imp.hyps | ant.hyps, a=imp, b=ant)


def gen(var, sort, pf):
    for tok in pf.hyps:
        if var in tok.free:
            raise TacticError("generalizing %r which is free in a hypothesis" % var)
    return Pf("gen", Forall(var, sort, pf.formula), pf.hyps, var=var, sort=sort, a=pf)


# ---------------------------------------------------------------------------
# propositional axiom instances

def p1(a, b):
    return ax(Implies(a, Implies(b, a)), "p1")


def p2(a, b, c):
    return ax(Implies(Implies(a, Implies(b, c)),
                      Implies(Implies(a, b), Implies(a, c))), "p2")


def p3(a, b):
    return ax(Implies(Implies(Not(a), Not(b)),
                      Implies(Implies(Not(a), b), a)), "p3")


def and_el(a, b):
    return ax(Implies(And(a, b), a), "and-el")


def and_er(a, b):
    return ax(Implies(And(a, b), b), "and-er")


def and_i(a, b):
    return ax(Implies(a, Implies(b, And(a, b))), "and-i")


def or_il(a, b):
    return ax(Implies(a, Or(a, b)), "or-il")


def or_ir(a, b):
    return ax(Implies(b, Or(a, b)), "or-ir")


def or_e(a, b, c):
    return ax(Implies(Implies(a, c), Implies(Implies(b, c),
                                             Implies(Or(a, b), c))), "or-e")


def iff_el(a, b):
    return ax(Implies(Iff(a, b), Implies(a, b)), "iff-el")


def iff_er(a, b):
    return ax(Implies(Iff(a, b), Implies(b, a)), "iff-er")


def iff_i(a, b):
    return ax(Implies(Implies(a, b), Implies(Implies(b, a), Iff(a, b))), "iff-i")


def imp_id(a):
    """A -> A from p1 and p2."""
    return mp(mp(p2(a, Implies(a, a), a), p1(a, Implies(a, a))), p1(a, a))


# ---------------------------------------------------------------------------
# deduction theorem

def ded(pf, token):
    """Discharge one hypothesis: a proof of X using token:H becomes a
    proof of H -> X not using it."""
    h = token.formula
    memo = {}

    def go(node):
        got = memo.get(id(node))
        if got is not None:
            return got
        if token not in node.hyps:
            out = mp(p1(node.formula, h), node)
        elif node.kind == "hyp" and node.token is token:
            out = imp_id(h)
        elif node.kind == "mp":
            da, db = go(node.a), go(node.b)
            psi = node.b.formula
            out = mp(mp(p2(h, psi, node.formula), da), db)
        elif node.kind == "gen":
            if node.var in token.free:
                raise TacticError("cannot discharge across a capturing generalization")
            da = go(node.a)  # h -> phi
            allimp = gen(node.var, node.sort, da)
            dist = ax(Implies(allimp.formula,
                              Implies(Forall(node.var, node.sort, h), node.formula)),
                      "q-dist")
            step = mp(dist, allimp)
            vac = ax(Implies(h, Forall(node.var, node.sort, h)), "q-vac")
            out = compose(vac, step)
        else:
            raise TacticError("cannot discharge through %r" % node.kind)
        memo[id(node)] = out
        return out

    return go(pf)


def discharge(pf, *tokens):
    """ded over several hypotheses; the first token ends up outermost."""
    for tok in reversed(tokens):
        pf = ded(pf, tok)
    return pf


def compose(pab, pbc):
    """From A -> B and B -> C build A -> C."""
    a = pab.formula.lhs
    h, tok = assume(a)
    return ded(mp(pbc, mp(pab, h)), tok)


def reductio(conclusion, builder):
    """Classical reductio: builder(token for not-conclusion) returns a
    pair (proof of B, proof of not B); concludes the conclusion."""
    tok = Token(Not(conclusion))
    pf_b, pf_nb = builder(tok)
    b = pf_b.formula
    if not (isinstance(pf_nb.formula, Not) and alpha_eq(pf_nb.formula.body, b)):
        raise TacticError("reductio pair does not contradict")
    d_nb = ded(pf_nb, tok)
    d_b = ded(pf_b, tok)
    return mp(mp(p3(conclusion, b), d_nb), d_b)


def dne(pf):
    """not not A  =>  A."""
    f = pf.formula
    if not (isinstance(f, Not) and isinstance(f.body, Not)):
        raise TacticError("dne wants a double negation")
    a = f.body.body
    return reductio(a, lambda tok: (hyp(tok), pf))


def dni(pf):
    """A  =>  not not A."""
    a = pf.formula
    return reductio(Not(Not(a)), lambda tok: (pf, dne(hyp(tok))))


def efq_imp(pf_na, b):
    """not A  =>  A -> B."""
    a = pf_na.formula.body
    ha, tok = assume(a)
    inner = reductio(b, lambda t: (ha, pf_na))
    return ded(inner, tok)


def modus_tollens(pf_ab, pf_nb):
    """A -> B and not B  =>  not A."""
    a = pf_ab.formula.lhs
    return reductio(Not(a), lambda tok: (mp(pf_ab, dne(hyp(tok))), pf_nb))


def and_intro(pa, pb):
    return mp(mp(and_i(pa.formula, pb.formula), pa), pb)


def and_left(pf):
    f = pf.formula
    return mp(and_el(f.lhs, f.rhs), pf)


def and_right(pf):
    f = pf.formula
    return mp(and_er(f.lhs, f.rhs), pf)


def split_chain(pf):
    """Proofs of every conjunct of a right-nested conjunction chain."""
    out = []
    cur = pf
    while isinstance(cur.formula, And):
        out.append(and_left(cur))
        cur = and_right(cur)
    out.append(cur)
    return out


def conjoin(pfs):
    """Right-nested conjunction of the given proofs."""
    pfs = list(pfs)
    out = pfs[-1]
    for p in reversed(pfs[:-1]):
        out = and_intro(p, out)
    return out


def iff_intro(pab, pba):
    a, b = pab.formula.lhs, pab.formula.rhs
    return mp(mp(iff_i(a, b), pab), pba)


def iff_left(piff):
    f = piff.formula
    return mp(iff_el(f.lhs, f.rhs), piff)


def iff_right(piff):
    f = piff.formula
    return mp(iff_er(f.lhs, f.rhs), piff)


def iff_mp(piff, pa):
    return mp(iff_left(piff), pa)


def iff_mp_back(piff, pb):
    return mp(iff_right(piff), pb)


# ---------------------------------------------------------------------------
# propositional tautologies

_MAX_TAUT_ATOMS = 12
_TAUT_CACHE = {}


def _atoms_of(f, acc):
    if isinstance(f, Not):
        _atoms_of(f.body, acc)
    elif isinstance(f, (And, Or, Implies, Iff)):
        _atoms_of(f.lhs, acc)
        _atoms_of(f.rhs, acc)
    else:
        if f not in acc:
            acc[f] = len(acc)


def _bool_eval(f, val):
    if isinstance(f, Not):
        return not _bool_eval(f.body, val)
    if isinstance(f, And):
        return _bool_eval(f.lhs, val) and _bool_eval(f.rhs, val)
    if isinstance(f, Or):
        return _bool_eval(f.lhs, val) or _bool_eval(f.rhs, val)
    if isinstance(f, Implies):
        return (not _bool_eval(f.lhs, val)) or _bool_eval(f.rhs, val)
    if isinstance(f, Iff):
        return _bool_eval(f.lhs, val) == _bool_eval(f.rhs, val)
    return val[f]


def taut(target, premises=()):
    """Prove `target` from premises by propositional reasoning over the
    maximal non-propositional subformulas."""
    premises = list(premises)
    goal = target
    for p in reversed(premises):
        goal = Implies(p.formula, goal)
    pf = _prove_taut(goal)
    for p in premises:
        pf = mp(pf, p)
    return pf


def _prove_taut(goal):
    key = S.canon_str(goal)
    cached = _TAUT_CACHE.get(key)
    if cached is not None:
        return cached
    atoms = {}
    _atoms_of(goal, atoms)
    atom_list = list(atoms)
    if len(atom_list) > _MAX_TAUT_ATOMS:
        raise TacticError("too many atoms (%d) for tautology search" % len(atom_list))
    for bits in itertools.product((True, False), repeat=len(atom_list)):
        if not _bool_eval(goal, dict(zip(atom_list, bits))):
            raise TacticError("not a tautology: %s" % S.print_formula(goal))

    def build(i, lits):
        if i == len(atom_list):
            return _signed(goal, True, lits)
        atom = atom_list[i]
        tok_p = Token(atom)
        tok_n = Token(Not(atom))
        p_pos = build(i + 1, {**lits, atom: (True, tok_p)})
        p_neg = build(i + 1, {**lits, atom: (False, tok_n)})
        d_pos = ded(p_pos, tok_p)
        d_neg = ded(p_neg, tok_n)
        return _case_merge(goal, atom, d_pos, d_neg)

    pf = build(0, {})
    if pf.hyps:
        raise TacticError("tautology proof leaked hypotheses")
    _TAUT_CACHE[key] = pf
    return pf


def _case_merge(goal, atom, d_pos, d_neg):
    # from atom -> goal and not atom -> goal, conclude goal
    def inner(tok):
        ng = hyp(tok)
        na = modus_tollens(d_pos, ng)
        return mp(d_neg, na), ng

    return reductio(goal, inner)


def _signed(f, want, lits):
    if isinstance(f, Not):
        if want:
            return _signed(f.body, False, lits)
        return dni(_signed(f.body, True, lits))
    if isinstance(f, Implies):
        a, b = f.lhs, f.rhs
        if want:
            if _lit_val(b, lits):
                return mp(p1(b, a), _signed(b, True, lits))
            return efq_imp(_signed(a, False, lits), b)
        pa = _signed(a, True, lits)
        pnb = _signed(b, False, lits)
        return reductio(Not(f), lambda tok: (mp(dne(hyp(tok)), pa), pnb))
    if isinstance(f, And):
        a, b = f.lhs, f.rhs
        if want:
            return and_intro(_signed(a, True, lits), _signed(b, True, lits))
        if not _lit_val(a, lits):
            pna = _signed(a, False, lits)
            return reductio(Not(f), lambda tok: (and_left(dne(hyp(tok))), pna))
        pnb = _signed(b, False, lits)
        return reductio(Not(f), lambda tok: (and_right(dne(hyp(tok))), pnb))
    if isinstance(f, Or):
        a, b = f.lhs, f.rhs
        if want:
            if _lit_val(a, lits):
                return mp(or_il(a, b), _signed(a, True, lits))
            return mp(or_ir(a, b), _signed(b, True, lits))
        pna = _signed(a, False, lits)
        pnb = _signed(b, False, lits)

        def inner(tok):
            por = dne(hyp(tok))
            drop = mp(mp(or_e(a, b, b), efq_imp(pna, b)), imp_id(b))
            return mp(drop, por), pnb

        return reductio(Not(f), inner)
    if isinstance(f, Iff):
        a, b = f.lhs, f.rhs
        va, vb = _lit_val(a, lits), _lit_val(b, lits)
        if want:
            if va and vb:
                pa, pb = _signed(a, True, lits), _signed(b, True, lits)
                return iff_intro(mp(p1(b, a), pb), mp(p1(a, b), pa))
            pna, pnb = _signed(a, False, lits), _signed(b, False, lits)
            return iff_intro(efq_imp(pna, b), efq_imp(pnb, a))
        if va:
            pa, pnb = _signed(a, True, lits), _signed(b, False, lits)
            return reductio(Not(f), lambda tok: (iff_mp(dne(hyp(tok)), pa), pnb))
        pb, pna = _signed(b, True, lits), _signed(a, False, lits)
        return reductio(Not(f), lambda tok: (iff_mp_back(dne(hyp(tok)), pb), pna))
    # an atom
    val, tok = lits[f]
    if val != want:
        raise TacticError("internal: inconsistent literal request")
    return hyp(tok)


def _lit_val(f, lits):
    return _bool_eval(f, {k: v[0] for k, v in lits.items()})


# ---------------------------------------------------------------------------
# quantifiers

def all_elim(pf, term):
    f = pf.formula
    if not isinstance(f, Forall):
        raise TacticError("all_elim wants a universal")
    inst = substitute(f.body, f.var, f.sort, term)
    return mp(ax(Implies(f, inst), "q-inst", (term,)), pf)


def all_elim_many(pf, terms):
    for t in terms:
        pf = all_elim(pf, t)
    return pf


def gen_many(pairs, pf):
    for var, sort in reversed(list(pairs)):
        pf = gen(var, sort, pf)
    return pf


def ex_intro(target, term, pf_instance):
    if not isinstance(target, Exists):
        raise TacticError("ex_intro wants an existential target")
    inst = substitute(target.body, target.var, target.sort, term)
    if pf_instance.formula != inst and not alpha_eq(pf_instance.formula, inst):
        raise TacticError(
            "witness proof mismatch:\n  wants %s\n  got   %s"
            % (S.print_formula(inst), S.print_formula(pf_instance.formula)))
    return mp(ax(Implies(inst, target), "ex-i", (term,)), pf_instance)


def ex_elim(pf_ex, fresh, cont):
    """Eliminate an existential: `cont` receives a proof (hypothesis) of
    the body at the fresh variable and must return a proof of a formula
    not mentioning it."""
    f = pf_ex.formula
    if not isinstance(f, Exists):
        raise TacticError("ex_elim wants an existential")
    inst = substitute(f.body, f.var, f.sort, var_of_sort(fresh, f.sort))
    h, tok = assume(inst)
    sub = cont(h)
    chi = sub.formula
    if fresh in free_vars(chi):
        raise TacticError("existential witness %r escapes into the conclusion" % fresh)
    for t in sub.hyps:
        if t is not tok and fresh in t.free:
            raise TacticError("existential witness %r is free in another hypothesis" % fresh)
    imp = ded(sub, tok)
    allimp = gen(fresh, f.sort, imp)
    exe = ax(Implies(allimp.formula, Implies(f, chi)), "ex-e")
    return mp(mp(exe, allimp), pf_ex)


def ex_elim_many(pf_ex, freshes, cont):
    """Peel a chain of existential binders; `cont` receives one proof of
    the body instantiated at all the fresh names."""
    if not freshes:
        return cont(pf_ex)
    return ex_elim(pf_ex, freshes[0],
                   lambda h: ex_elim_many(h, freshes[1:], cont))


# ---------------------------------------------------------------------------
# equality

def eq_refl(t):
    return ax(Eq(t, t), "refl")


def eq_sym(pf):
    f = pf.formula
    if not isinstance(f, Eq):
        raise TacticError("eq_sym wants an equation")
    s, t = f.lhs, f.rhs
    lb = ax(Implies(f, Implies(Eq(s, s), Eq(t, s))), "leibniz", ((0,),))
    return mp(mp(lb, pf), eq_refl(s))


def eq_trans(p_st, p_tu):
    s, t = p_st.formula.lhs, p_st.formula.rhs
    t2, u = p_tu.formula.lhs, p_tu.formula.rhs
    if t != t2:
        raise TacticError("eq_trans middle terms differ")
    lb = ax(Implies(p_tu.formula, Implies(Eq(s, t), Eq(s, u))), "leibniz", ((1,),))
    return mp(mp(lb, p_tu), p_st)


def rewrite(eq_pf, pf, paths):
    """Replace the equation's left side by its right side inside the
    proved formula, at the given paths."""
    f = eq_pf.formula
    if not isinstance(f, Eq):
        raise TacticError("rewrite wants an equation")
    frozen = set(S.free_vars_term(f.lhs)) | set(S.free_vars_term(f.rhs))
    before = pf.formula
    after = before
    for path in paths:
        after = K.replace_at_path(after, tuple(path), f.lhs, f.rhs, frozen)
    lb = ax(Implies(f, Implies(before, after)), "leibniz", tuple(tuple(p) for p in paths))
    return mp(mp(lb, eq_pf), pf)


def cong_term(eq_pf, context_term, path):
    """From s = t, derive C[s] = C[t] for a term context."""
    f = eq_pf.formula
    after = K.replace_at_path(context_term, tuple(path), f.lhs, f.rhs, set())
    cg = ax(Implies(f, Eq(context_term, after)), "cong", (tuple(path),))
    return mp(cg, eq_pf)


# ---------------------------------------------------------------------------
# flattening to kernel derivations

def flatten(pf):
    """Linearize a hypothesis-free proof into a derivation, merging lines
    that prove the same formula."""
    if pf.hyps:
        raise TacticError("cannot flatten a proof with live hypotheses")
    lines = []
    index_of_formula = {}
    node_index = {}
    stack = [pf]
    while stack:
        node = stack.pop()
        if id(node) in node_index:
            continue
        missing = [c for c in (node.a, node.b)
                   if c is not None and id(c) not in node_index]
        if missing:
            stack.append(node)
            stack.extend(missing)
            continue
        existing = index_of_formula.get(node.formula)
        if existing is not None:
            node_index[id(node)] = existing
            continue
        if node.kind == "ax":
            rule, args = node.rule, node.args
        elif node.kind == "mp":
            rule, args = "mp", (node_index[id(node.a)], node_index[id(node.b)])
        elif node.kind == "gen":
            rule, args = "gen", (node.var, node.sort, node_index[id(node.a)])
        else:
            raise TacticError("unexpected node %r in a finished proof" % node.kind)
        idx = len(lines) + 1
        lines.append(K.Line(idx, node.formula, rule, args))
        index_of_formula[node.formula] = idx
        node_index[id(node)] = idx
    # deduplication may have pinned the theorem to an earlier line; every
    # later line is an unused leftover, so cut back to the theorem
    return K.Derivation(lines[:node_index[id(pf)]])
