"""Brute-force full second-order semantics over small finite domains.

Concept variables range over *all* subsets of d^n, which makes every
predicative schema sound here and turns evaluation into an independent
oracle for the symbolic layers.  Enumeration is capped (at most 512
extensions per quantified concept) and evaluation memoizes subformula
results keyed by the values of their free variables, so the quadratic
matrices used by the equivalence checker stay cheap.
"""

from __future__ import annotations

import itertools

from . import syntax as S

EXTENSION_CAP = 512


class ModelError(Exception):
    pass


class UnsupportedAbstractionTerm(ModelError):
    pass


class UnboundVariable(ModelError):
    pass


class CapExceeded(ModelError):
    pass


class Structure:
    """A finite full structure: domain {0..d-1}, optionally a partial map
    interpreting some abstraction terms on explicitly listed extensions."""

    def __init__(self, size, partial_abstraction=None):
        if size < 1:
            raise ModelError("domain size must be >= 1")
        self.size = size
        self.partial_abstraction = dict(partial_abstraction or {})
        for (sym, ext), atom in self.partial_abstraction.items():
            if not (0 <= atom < size):
                raise ModelError("abstraction value %r outside the domain" % (atom,))

    def __repr__(self):
        return "Structure(size=%d, mapped=%d)" % (self.size, len(self.partial_abstraction))


_EXT_CACHE = {}


def all_tuples(d, n):
    return list(itertools.product(range(d), repeat=n))


def all_extensions(d, n):
    """Every n-ary extension over a d-element domain, in a fixed order."""
    key = (d, n)
    cached = _EXT_CACHE.get(key)
    if cached is not None:
        return cached
    count = 2 ** (d ** n)
    if count > EXTENSION_CAP:
        raise CapExceeded(
            "%d extensions of arity %d over %d atoms exceed the cap of %d"
            % (count, n, d, EXTENSION_CAP))
    tuples = all_tuples(d, n)
    exts = []
    for bits in range(count):
        exts.append(frozenset(t for i, t in enumerate(tuples) if bits >> i & 1))
    _EXT_CACHE[key] = exts
    return exts


def _flat_conjuncts(f):
    if isinstance(f, S.And):
        return _flat_conjuncts(f.lhs) + _flat_conjuncts(f.rhs)
    return [f]


class Evaluator:
    """Reusable evaluator for one formula over one structure.

    Subformula values are memoized against the values of their free
    variables; quantifier blocks whose body is an implication (or, for
    existentials, a conjunction) are pruned as soon as a conjunct with
    already-bound variables comes out false.
    """

    def __init__(self, structure, formula):
        self.s = structure
        self.root = formula
        self._free = {}
        self._plans = {}
        self._memo = {}
        self._keep = []

    def evaluate(self, env):
        return self._f(self.root, dict(env))

    # -- helpers

    def _freenames(self, node):
        got = self._free.get(id(node))
        if got is None:
            got = tuple(sorted(S.free_vars(node)))
            self._free[id(node)] = got
            self._keep.append(node)
        return got

    def _domain(self, sort):
        if sort.is_object:
            return range(self.s.size)
        return all_extensions(self.s.size, sort.arity)

    def _f(self, node, env):
        if isinstance(node, (S.Forall, S.Exists)):
            return self._block(node, env)
        if isinstance(node, S.Pred):
            rel = self._t(node.rel, env)
            return tuple(self._t(a, env) for a in node.args) in rel
        if isinstance(node, S.Eq):
            return self._t(node.lhs, env) == self._t(node.rhs, env)
        if isinstance(node, S.Not):
            return not self._f(node.body, env)
        if isinstance(node, S.And):
            return self._f(node.lhs, env) and self._f(node.rhs, env)
        if isinstance(node, S.Or):
            return self._f(node.lhs, env) or self._f(node.rhs, env)
        if isinstance(node, S.Implies):
            return (not self._f(node.lhs, env)) or self._f(node.rhs, env)
        if isinstance(node, S.Iff):
            return self._f(node.lhs, env) == self._f(node.rhs, env)
        raise ModelError("cannot evaluate %r" % (node,))

    def _t(self, t, env):
        if isinstance(t, (S.ObjVar, S.ConcVar)):
            try:
                return env[t.name]
            except KeyError:
                raise UnboundVariable("unbound variable %r" % t.name) from None
        if isinstance(t, S.Proj):
            base = self._t(t.base, env)
            prefix = tuple(self._t(a, env) for a in t.args)
            k = len(prefix)
            return frozenset(tup[k:] for tup in base if tup[:k] == prefix)
        if isinstance(t, S.Abs):
            ext = self._t(t.arg, env)
            try:
                return self.partial_lookup(t.sym, ext)
            except KeyError:
                raise UnsupportedAbstractionTerm(
                    "no interpretation for (abs %s ...) on this extension" % t.sym) from None
        raise ModelError("cannot evaluate term %r" % (t,))

    def partial_lookup(self, sym, ext):
        return self.s.partial_abstraction[(sym, ext)]

    def _plan(self, node):
        """Peel a homogeneous quantifier block and index its clauses."""
        plan = self._plans.get(id(node))
        if plan is not None:
            return plan
        kind = type(node)
        qvars = []
        body = node
        while type(body) is kind:
            qvars.append((body.var, body.sort))
            body = body.body
        names = [v for v, _ in qvars]
        if kind is S.Forall and isinstance(body, S.Implies):
            clauses = _flat_conjuncts(body.lhs)
            tail = body.rhs
        elif kind is S.Exists and isinstance(body, S.And):
            clauses = _flat_conjuncts(body)
            tail = None
        else:
            clauses = []
            tail = body
        # clause -> first depth at which all its quantified variables are bound
        by_depth = [[] for _ in range(len(qvars) + 1)]
        for c in clauses:
            frees = set(self._freenames(c))
            depth = 0
            for i, n in enumerate(names):
                if n in frees:
                    depth = i + 1
            by_depth[depth].append(c)
        plan = (kind, qvars, by_depth, tail)
        self._plans[id(node)] = plan
        self._keep.append(node)
        return plan

    def _block(self, node, env):
        names = self._freenames(node)
        memo_ok = len(names) <= 4
        if memo_ok:
            try:
                key = (id(node), tuple(env[n] for n in names))
            except KeyError:
                raise UnboundVariable(
                    "unbound variable among %r" % (set(names) - set(env),)) from None
            got = self._memo.get(key)
            if got is not None:
                return got
        kind, qvars, by_depth, tail = self._plan(node)
        forall = kind is S.Forall
        result = self._loop(qvars, by_depth, tail, env, 0, forall)
        if memo_ok:
            self._memo[key] = result
        return result

    def _loop(self, qvars, by_depth, tail, env, depth, forall):
        for c in by_depth[depth]:
            if not self._f(c, env):
                # hypothesis (or witness conjunct) failed for this prefix
                return forall
        if depth == len(qvars):
            if tail is None:
                return not forall  # existential block: every conjunct held
            return self._f(tail, env)
        var, sort = qvars[depth]
        saved = env.get(var, _MISSING)
        try:
            for val in self._domain(sort):
                env[var] = val
                sub = self._loop(qvars, by_depth, tail, env, depth + 1, forall)
                if sub != forall:
                    return sub
            return forall
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved


_MISSING = object()


def evaluate(structure, env, formula):
    """Tarskian truth of a formula under an assignment (spec: eval)."""
    return Evaluator(structure, formula).evaluate(env)


def eval_term(structure, env, term):
    return Evaluator(structure, S.Eq(S.ObjVar("_x"), S.ObjVar("_x")))._t(term, dict(env))


def universal_closure(f):
    fv = S.free_vars(f)
    return S.forall_all(sorted(fv.items()), f)


# ---------------------------------------------------------------------------
# equivalence oracle

class EquivReport:
    def __init__(self, arity, extension_count, is_reflexive, is_symmetric,
                 is_transitive, refl_counterexample=None, sym_counterexample=None,
                 trans_counterexample=None, classes=None):
        self.arity = arity
        self.extension_count = extension_count
        self.is_reflexive = is_reflexive
        self.is_symmetric = is_symmetric
        self.is_transitive = is_transitive
        self.refl_counterexample = refl_counterexample
        self.sym_counterexample = sym_counterexample
        self.trans_counterexample = trans_counterexample
        self.classes = classes

    @property
    def is_equivalence(self):
        return self.is_reflexive and self.is_symmetric and self.is_transitive

    @property
    def class_count(self):
        return None if self.classes is None else len(self.classes)

    def __repr__(self):
        return ("EquivReport(refl=%r, sym=%r, trans=%r, classes=%r)"
                % (self.is_reflexive, self.is_symmetric, self.is_transitive,
                   self.class_count))


def _equiv_matrix(e, d):
    fv = S.free_vars(e)
    concs = sorted((n, s) for n, s in fv.items() if s.is_concept)
    objs = [n for n, s in fv.items() if s.is_object]
    if objs or len(concs) != 2 or concs[0][1] != concs[1][1]:
        raise ModelError(
            "an equivalence candidate needs exactly two free concept "
            "variables of one arity, got %r" % (fv,))
    arity = concs[0][1].arity
    exts = all_extensions(d, arity)
    struct = Structure(d)
    ev = Evaluator(struct, e)
    r, s = concs[0][0], concs[1][0]
    n = len(exts)
    rows = []
    env = {}
    for i in range(n):
        env[r] = exts[i]
        row = 0
        for j in range(n):
            env[s] = exts[j]
            if ev.evaluate(env):
                row |= 1 << j
        rows.append(row)
    return exts, rows, arity


def check_equiv(e, d):
    """Exhaustive equivalence check of E over all extensions of its arity.

    E must be abstraction-free.  When E is an equivalence the report
    carries the full partition into classes.
    """
    exts, rows, arity = _equiv_matrix(e, d)
    n = len(exts)
    refl_ce = sym_ce = trans_ce = None
    for i in range(n):
        if not rows[i] >> i & 1:
            refl_ce = exts[i]
            break
    for i in range(n):
        if sym_ce is not None:
            break
        for j in range(i + 1, n):
            if (rows[i] >> j & 1) != (rows[j] >> i & 1):
                sym_ce = (exts[i], exts[j])
                break
    # transitivity: whenever E(i, j), row j must be contained in row i
    for i in range(n):
        if trans_ce is not None:
            break
        ri = rows[i]
        probe = ri
        while probe:
            j = (probe & -probe).bit_length() - 1
            probe &= probe - 1
            extra = rows[j] & ~ri
            if extra:
                k = (extra & -extra).bit_length() - 1
                trans_ce = (exts[i], exts[j], exts[k])
                break
    classes = None
    if refl_ce is None and sym_ce is None and trans_ce is None:
        by_row = {}
        for i in range(n):
            by_row.setdefault(rows[i], []).append(exts[i])
        classes = [by_row[k] for k in sorted(by_row)]
    return EquivReport(
        arity, n,
        refl_ce is None, sym_ce is None, trans_ce is None,
        refl_ce, sym_ce, trans_ce, classes)


def search_abstraction(e, d):
    """Exhaustive search for a finite abstraction operator realizing the
    biconditional of E's abstraction principle; unary E, d <= 3 only.

    Returns (mapping or None, number of maps searched).
    """
    if d > 3:
        raise ModelError("abstraction search supports domains of size <= 3")
    exts, rows, arity = _equiv_matrix(e, d)
    if arity != 1:
        raise ModelError("abstraction search supports unary concepts only")
    n = len(exts)
    searched = 0
    for assignment in itertools.product(range(d), repeat=n):
        searched += 1
        ok = True
        for i in range(n):
            for j in range(n):
                if (assignment[i] == assignment[j]) != bool(rows[i] >> j & 1):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return {exts[i]: assignment[i] for i in range(n)}, searched
    return None, searched


class ValidationReport:
    def __init__(self, checked, falsifiers):
        self.checked = checked
        self.falsifiers = falsifiers

    @property
    def ok(self):
        return not self.falsifiers

    def __repr__(self):
        return "ValidationReport(checked=%d, falsifiers=%d)" % (
            self.checked, len(self.falsifiers))


def validate_instances(instances, d_max):
    """Evaluate each instance, universally closed over its parameters, in
    every full structure with domain size 1..d_max; report falsifiers."""
    falsifiers = []
    checked = 0
    for idx, f in enumerate(instances):
        closed = universal_closure(f)
        for d in range(1, d_max + 1):
            checked += 1
            if not evaluate(Structure(d), {}, closed):
                falsifiers.append((idx, f, d))
    return ValidationReport(checked, falsifiers)
