"""Core language: sorts, terms, formulas, signatures, parsing and printing.

The language is many-sorted: one sort of objects and, for every n >= 1,
a sort of n-ary concepts.  Terms are variables, projections of concepts
along object tuples, and applications of abstraction operators (which
take a concept and return an object).  Formulas are predications,
per-sort equalities, the usual connectives and per-sort quantifiers.

Everything here is immutable; hashes are precomputed so formulas can be
used freely as dictionary keys.
"""

from __future__ import annotations

import hashlib
import re
import sys

sys.setrecursionlimit(40000)


class SofError(Exception):
    """Base error for language-level problems."""


class SofSyntaxError(SofError):
    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = "%s (at offset %d)" % (message, pos)
        super().__init__(message)


class SofSortError(SofError):
    pass


# ---------------------------------------------------------------------------
# sorts

class Sort:
    """Object sort or n-ary concept sort (arity >= 1)."""

    __slots__ = ("arity", "_hash")

    def __init__(self, arity):
        # arity 0 encodes the object sort
        if arity < 0:
            raise SofSortError("negative sort arity")
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "_hash", hash(("Sort", arity)))

    @property
    def is_object(self):
        return self.arity == 0

    @property
    def is_concept(self):
        return self.arity >= 1

    def __eq__(self, other):
        return isinstance(other, Sort) and self.arity == other.arity

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Obj" if self.arity == 0 else "Conc(%d)" % self.arity


OBJ = Sort(0)


def conc(n):
    if n < 1:
        raise SofSortError("concept arity must be >= 1, got %d" % n)
    return Sort(n)


# ---------------------------------------------------------------------------
# terms

class Term:
    __slots__ = ("_hash",)

    def __hash__(self):
        return self._hash


class ObjVar(Term):
    __slots__ = ("name",)

    def __init__(self, name):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("ObjVar", name)))

    def __eq__(self, other):
        return isinstance(other, ObjVar) and self.name == other.name

    __hash__ = Term.__hash__

    def __repr__(self):
        return "ObjVar(%r)" % self.name


class ConcVar(Term):
    __slots__ = ("name", "arity")

    def __init__(self, name, arity):
        if arity < 1:
            raise SofSortError("concept variable %r needs arity >= 1" % name)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "_hash", hash(("ConcVar", name, arity)))

    def __eq__(self, other):
        return (isinstance(other, ConcVar) and self.name == other.name
                and self.arity == other.arity)

    __hash__ = Term.__hash__

    def __repr__(self):
        return "ConcVar(%r, %d)" % (self.name, self.arity)


class Proj(Term):
    """Projection R[a1..am] of an (m+n)-ary concept to an n-ary one."""

    __slots__ = ("base", "args")

    def __init__(self, base, args):
        args = tuple(args)
        if not args:
            raise SofSortError("projection needs at least one object argument")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash(("Proj", base, args)))

    def __eq__(self, other):
        return (isinstance(other, Proj) and self.base == other.base
                and self.args == other.args)

    __hash__ = Term.__hash__

    def __repr__(self):
        return "Proj(%r, %r)" % (self.base, list(self.args))


class Abs(Term):
    """Application of an abstraction operator; always object-sorted."""

    __slots__ = ("sym", "arg")

    def __init__(self, sym, arg):
        object.__setattr__(self, "sym", sym)
        object.__setattr__(self, "arg", arg)
        object.__setattr__(self, "_hash", hash(("Abs", sym, arg)))

    def __eq__(self, other):
        return isinstance(other, Abs) and self.sym == other.sym and self.arg == other.arg

    __hash__ = Term.__hash__

    def __repr__(self):
        return "Abs(%r, %r)" % (self.sym, self.arg)


def var_of_sort(name, sort):
    return ObjVar(name) if sort.is_object else ConcVar(name, sort.arity)


def term_sort(t, sig=None):
    """Sort of a term; needs no signature (abstractions are objects)."""
    if isinstance(t, ObjVar):
        return OBJ
    if isinstance(t, ConcVar):
        return Sort(t.arity)
    if isinstance(t, Proj):
        base = term_sort(t.base, sig)
        if not base.is_concept or base.arity <= len(t.args):
            raise SofSortError("projection base must have arity > argument count")
        return Sort(base.arity - len(t.args))
    if isinstance(t, Abs):
        return OBJ
    raise TypeError("not a term: %r" % (t,))


# ---------------------------------------------------------------------------
# formulas

class Formula:
    __slots__ = ("_hash",)

    def __hash__(self):
        return self._hash


class Pred(Formula):
    __slots__ = ("rel", "args")

    def __init__(self, rel, args):
        args = tuple(args)
        if not args:
            raise SofSortError("predication needs at least one argument")
        object.__setattr__(self, "rel", rel)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash(("Pred", rel, args)))

    def __eq__(self, other):
        return (isinstance(other, Pred) and self.rel == other.rel
                and self.args == other.args)

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "Pred(%r, %r)" % (self.rel, list(self.args))


class Eq(Formula):
    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs):
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "_hash", hash(("Eq", lhs, rhs)))

    def __eq__(self, other):
        return isinstance(other, Eq) and self.lhs == other.lhs and self.rhs == other.rhs

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "Eq(%r, %r)" % (self.lhs, self.rhs)


class Not(Formula):
    __slots__ = ("body",)

    def __init__(self, body):
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "_hash", hash(("Not", body)))

    def __eq__(self, other):
        return isinstance(other, Not) and self.body == other.body

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "Not(%r)" % (self.body,)


class _BinConn(Formula):
    __slots__ = ("lhs", "rhs")
    tag = "?"

    def __init__(self, lhs, rhs):
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "_hash", hash((self.tag, lhs, rhs)))

    def __eq__(self, other):
        return (type(other) is type(self) and self.lhs == other.lhs
                and self.rhs == other.rhs)

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "%s(%r, %r)" % (type(self).__name__, self.lhs, self.rhs)


class And(_BinConn):
    __slots__ = ()
    tag = "And"


class Or(_BinConn):
    __slots__ = ()
    tag = "Or"


class Implies(_BinConn):
    __slots__ = ()
    tag = "Implies"


class Iff(_BinConn):
    __slots__ = ()
    tag = "Iff"


class _Quant(Formula):
    __slots__ = ("var", "sort", "body")
    tag = "?"

    def __init__(self, var, sort, body):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "sort", sort)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "_hash", hash((self.tag, var, sort, body)))

    def __eq__(self, other):
        return (type(other) is type(self) and self.var == other.var
                and self.sort == other.sort and self.body == other.body)

    __hash__ = Formula.__hash__

    def __repr__(self):
        return "%s(%r, %r, %r)" % (type(self).__name__, self.var, self.sort, self.body)


class Forall(_Quant):
    __slots__ = ()
    tag = "Forall"


class Exists(_Quant):
    __slots__ = ()
    tag = "Exists"


def and_all(fs):
    """Right-nested conjunction of one or more formulas."""
    fs = list(fs)
    if not fs:
        raise ValueError("and_all needs at least one conjunct")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def forall_all(pairs, body):
    """Universal closure over [(name, sort), ...], outermost first."""
    for name, sort in reversed(list(pairs)):
        body = Forall(name, sort, body)
    return body


def exists_all(pairs, body):
    for name, sort in reversed(list(pairs)):
        body = Exists(name, sort, body)
    return body


# ---------------------------------------------------------------------------
# signatures

class AbstractionSymbol:
    __slots__ = ("id", "arity", "source")

    def __init__(self, id, arity, source=None):
        if arity < 1:
            raise SofSortError("abstraction symbol arity must be >= 1")
        self.id = id
        self.arity = arity
        self.source = source

    def __eq__(self, other):
        return (isinstance(other, AbstractionSymbol) and self.id == other.id
                and self.arity == other.arity)

    __hash__ = Formula.__hash__

    def __hash__(self):
        return hash((self.id, self.arity))

    def __repr__(self):
        return "AbstractionSymbol(%r, %d)" % (self.id, self.arity)


class Signature:
    """Inventory of abstraction symbols; the base language has none."""

    def __init__(self, symbols=()):
        self._by_id = {}
        for s in symbols:
            self._add(s)

    def _add(self, s):
        if s.id in self._by_id:
            raise SofError("duplicate abstraction symbol id %r" % s.id)
        self._by_id[s.id] = s

    def symbols(self):
        return [self._by_id[k] for k in sorted(self._by_id)]

    def lookup(self, sym_id):
        return self._by_id.get(sym_id)

    def arity_of(self, sym_id):
        s = self._by_id.get(sym_id)
        return None if s is None else s.arity

    def extend(self, symbol):
        new = Signature()
        new._by_id = dict(self._by_id)
        new._add(symbol)
        return new

    def __contains__(self, sym_id):
        return sym_id in self._by_id

    def __len__(self):
        return len(self._by_id)

    def __repr__(self):
        return "Signature(%r)" % (self.symbols(),)


EMPTY_SIGNATURE = Signature()


# ---------------------------------------------------------------------------
# free variables and substitution

def _term_free(t, out):
    if isinstance(t, ObjVar):
        out.setdefault(t.name, OBJ)
    elif isinstance(t, ConcVar):
        out.setdefault(t.name, Sort(t.arity))
    elif isinstance(t, Proj):
        _term_free(t.base, out)
        for a in t.args:
            _term_free(a, out)
    elif isinstance(t, Abs):
        _term_free(t.arg, out)


def free_vars_term(t):
    out = {}
    _term_free(t, out)
    return out


def free_vars(f):
    """Free variables of a formula, as a dict name -> Sort.

    A name is reported with the sort of its first free occurrence; mixed
    sorts for one name are caught by well_sorted, not here.
    """
    out = {}
    _free(f, out, set())
    return out


def _free(f, out, bound):
    if isinstance(f, Pred):
        _term_free_b(f.rel, out, bound)
        for a in f.args:
            _term_free_b(a, out, bound)
    elif isinstance(f, Eq):
        _term_free_b(f.lhs, out, bound)
        _term_free_b(f.rhs, out, bound)
    elif isinstance(f, Not):
        _free(f.body, out, bound)
    elif isinstance(f, _BinConn):
        _free(f.lhs, out, bound)
        _free(f.rhs, out, bound)
    elif isinstance(f, _Quant):
        if f.var in bound:
            _free(f.body, out, bound)
        else:
            bound.add(f.var)
            _free(f.body, out, bound)
            bound.remove(f.var)
    else:
        raise TypeError("not a formula: %r" % (f,))


def _term_free_b(t, out, bound):
    if isinstance(t, (ObjVar, ConcVar)):
        if t.name not in bound:
            out.setdefault(t.name, OBJ if isinstance(t, ObjVar) else Sort(t.arity))
    elif isinstance(t, Proj):
        _term_free_b(t.base, out, bound)
        for a in t.args:
            _term_free_b(a, out, bound)
    elif isinstance(t, Abs):
        _term_free_b(t.arg, out, bound)


_FRESH_RE = re.compile(r"^(.*?)(\d*)$")


def fresh_name(base, avoid):
    """A name not in `avoid`, derived from `base` by counter suffix."""
    if base not in avoid:
        return base
    m = _FRESH_RE.match(base)
    stem = m.group(1) or "v"
    n = int(m.group(2) or "0")
    while True:
        n += 1
        cand = "%s%d" % (stem, n)
        if cand not in avoid:
            return cand


def subst_term(t, mapping):
    if isinstance(t, (ObjVar, ConcVar)):
        return mapping.get(t.name, t)
    if isinstance(t, Proj):
        return Proj(subst_term(t.base, mapping), [subst_term(a, mapping) for a in t.args])
    if isinstance(t, Abs):
        return Abs(t.sym, subst_term(t.arg, mapping))
    raise TypeError("not a term: %r" % (t,))


def subst_par(f, mapping):
    """Simultaneous capture-avoiding substitution name -> Term.

    Sorts are checked at free occurrences: substituting a term of the
    wrong sort for a variable raises SofSortError.
    """
    mapping = {k: v for k, v in mapping.items()}
    fv = free_vars(f)
    for name, t in mapping.items():
        if name in fv and term_sort(t) != fv[name]:
            raise SofSortError(
                "substituting %r (%r) for %r of sort %r"
                % (t, term_sort(t), name, fv[name]))
    return _subst(f, mapping)


def substitute(f, name, sort, t):
    """Single capture-avoiding substitution; `sort` is the variable's sort."""
    if term_sort(t) != sort:
        raise SofSortError("sort mismatch in substitution for %r" % name)
    return _subst(f, {name: t})


def _subst(f, mapping):
    if not mapping:
        return f
    if isinstance(f, Pred):
        return Pred(subst_term(f.rel, mapping), [subst_term(a, mapping) for a in f.args])
    if isinstance(f, Eq):
        return Eq(subst_term(f.lhs, mapping), subst_term(f.rhs, mapping))
    if isinstance(f, Not):
        return Not(_subst(f.body, mapping))
    if isinstance(f, _BinConn):
        return type(f)(_subst(f.lhs, mapping), _subst(f.rhs, mapping))
    if isinstance(f, _Quant):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        if not inner:
            return f
        body_free = free_vars(f.body)
        relevant = {k: v for k, v in inner.items() if k in body_free}
        if not relevant:
            return f
        clash = set()
        for t in relevant.values():
            clash.update(free_vars_term(t))
        if f.var in clash:
            avoid = set(body_free) | clash | set(relevant)
            nv = fresh_name(f.var, avoid)
            body = _subst(f.body, {f.var: var_of_sort(nv, f.sort)})
            return type(f)(nv, f.sort, _subst(body, relevant))
        return type(f)(f.var, f.sort, _subst(f.body, relevant))
    raise TypeError("not a formula: %r" % (f,))


# ---------------------------------------------------------------------------
# alpha equivalence

def alpha_eq(f, g):
    """True iff f and g differ only in bound-variable names."""
    return _aeq(f, g, {}, {})


def _aeq(f, g, lmap, rmap):
    if type(f) is not type(g):
        return False
    if isinstance(f, Pred):
        if len(f.args) != len(g.args) or not _aeq_t(f.rel, g.rel, lmap, rmap):
            return False
        return all(_aeq_t(a, b, lmap, rmap) for a, b in zip(f.args, g.args))
    if isinstance(f, Eq):
        return _aeq_t(f.lhs, g.lhs, lmap, rmap) and _aeq_t(f.rhs, g.rhs, lmap, rmap)
    if isinstance(f, Not):
        return _aeq(f.body, g.body, lmap, rmap)
    if isinstance(f, _BinConn):
        return _aeq(f.lhs, g.lhs, lmap, rmap) and _aeq(f.rhs, g.rhs, lmap, rmap)
    if isinstance(f, _Quant):
        if f.sort != g.sort:
            return False
        mark = object()
        ol, og = lmap.get(f.var, mark), rmap.get(g.var, mark)
        lmap[f.var] = rmap[g.var] = key = (f.var, g.var, len(lmap), len(rmap))
        try:
            return _aeq(f.body, g.body, lmap, rmap)
        finally:
            if ol is mark:
                del lmap[f.var]
            else:
                lmap[f.var] = ol
            if og is mark:
                del rmap[g.var]
            else:
                rmap[g.var] = og
    raise TypeError("not a formula: %r" % (f,))


def _aeq_t(s, t, lmap, rmap):
    if type(s) is not type(t):
        return False
    if isinstance(s, (ObjVar, ConcVar)):
        if isinstance(s, ConcVar) and s.arity != t.arity:
            return False
        ls, rt = lmap.get(s.name), rmap.get(t.name)
        if ls is None and rt is None:
            return s.name == t.name
        return ls is not None and ls is rt
    if isinstance(s, Proj):
        if len(s.args) != len(t.args) or not _aeq_t(s.base, t.base, lmap, rmap):
            return False
        return all(_aeq_t(a, b, lmap, rmap) for a, b in zip(s.args, t.args))
    if isinstance(s, Abs):
        return s.sym == t.sym and _aeq_t(s.arg, t.arg, lmap, rmap)
    raise TypeError("not a term: %r" % (s,))


def canon_str(f):
    """Name-independent rendering; equal strings iff alpha-equal formulas."""
    out = []
    _canon(f, {}, out)
    return "".join(out)


def _canon(f, env, out):
    if isinstance(f, Pred):
        out.append("(p")
        _canon_t(f.rel, env, out)
        for a in f.args:
            _canon_t(a, env, out)
        out.append(")")
    elif isinstance(f, Eq):
        out.append("(=")
        _canon_t(f.lhs, env, out)
        _canon_t(f.rhs, env, out)
        out.append(")")
    elif isinstance(f, Not):
        out.append("(!")
        _canon(f.body, env, out)
        out.append(")")
    elif isinstance(f, _BinConn):
        out.append("(" + f.tag)
        _canon(f.lhs, env, out)
        _canon(f.rhs, env, out)
        out.append(")")
    elif isinstance(f, _Quant):
        out.append("(%s%d " % (f.tag, f.sort.arity))
        saved = env.get(f.var)
        env[f.var] = len(env)
        _canon(f.body, env, out)
        if saved is None:
            del env[f.var]
        else:
            env[f.var] = saved
        out.append(")")
    else:
        raise TypeError("not a formula: %r" % (f,))


def _canon_t(t, env, out):
    if isinstance(t, (ObjVar, ConcVar)):
        idx = env.get(t.name)
        if idx is None:
            out.append(" f:" + t.name)
        else:
            out.append(" b%d" % idx)
        if isinstance(t, ConcVar):
            out.append("/%d" % t.arity)
    elif isinstance(t, Proj):
        out.append("(pr")
        _canon_t(t.base, env, out)
        for a in t.args:
            _canon_t(a, env, out)
        out.append(")")
    elif isinstance(t, Abs):
        out.append("(abs " + t.sym)
        _canon_t(t.arg, env, out)
        out.append(")")
    else:
        raise TypeError("not a term: %r" % (t,))


def canonical_symbol_id(e):
    """Stable abstraction-symbol id for a defining formula, via its
    alpha-normal rendering (same formula, same id, across runs)."""
    digest = hashlib.sha256(canon_str(e).encode("utf-8")).hexdigest()
    return "d" + digest[:12]


# ---------------------------------------------------------------------------
# sort checking

class SortReport:
    def __init__(self, errors=()):
        self.errors = list(errors)

    @property
    def ok(self):
        return not self.errors

    def __repr__(self):
        return "SortReport(ok=%r, errors=%r)" % (self.ok, self.errors)


def well_sorted(sig, f):
    """Check the sort discipline of a formula under a signature.

    Errors are reported as (path, message) pairs; the path is a dotted
    child-index trail from the root.
    """
    errors = []
    env = {}
    _check(f, sig, env, errors, ())
    # a free name must be used at one sort only
    return SortReport(errors)


def _loc(path):
    return ".".join(str(i) for i in path) or "root"


def _check(f, sig, env, errors, path):
    if isinstance(f, Pred):
        rs = _check_term(f.rel, sig, env, errors, path + (0,))
        for i, a in enumerate(f.args):
            s = _check_term(a, sig, env, errors, path + (i + 1,))
            if s is not None and not s.is_object:
                errors.append((_loc(path + (i + 1,)), "predication argument must be an object"))
        if rs is not None:
            if not rs.is_concept:
                errors.append((_loc(path + (0,)), "predication relation must be a concept"))
            elif rs.arity != len(f.args):
                errors.append((_loc(path), "arity mismatch: %d-ary concept applied to %d arguments"
                               % (rs.arity, len(f.args))))
    elif isinstance(f, Eq):
        ls = _check_term(f.lhs, sig, env, errors, path + (0,))
        rs = _check_term(f.rhs, sig, env, errors, path + (1,))
        if ls is not None and rs is not None and ls != rs:
            errors.append((_loc(path), "cross-sortal identity between %r and %r" % (ls, rs)))
    elif isinstance(f, Not):
        _check(f.body, sig, env, errors, path + (0,))
    elif isinstance(f, _BinConn):
        _check(f.lhs, sig, env, errors, path + (0,))
        _check(f.rhs, sig, env, errors, path + (1,))
    elif isinstance(f, _Quant):
        saved = env.get(f.var, None)
        env[f.var] = f.sort
        _check(f.body, sig, env, errors, path + (0,))
        if saved is None:
            del env[f.var]
        else:
            env[f.var] = saved
    else:
        errors.append((_loc(path), "not a formula: %r" % (f,)))


def _check_term(t, sig, env, errors, path):
    if isinstance(t, ObjVar):
        seen = env.get(t.name)
        if seen is None:
            env[t.name] = OBJ
        elif seen != OBJ:
            errors.append((_loc(path), "variable %r used at sorts %r and Obj" % (t.name, seen)))
            return None
        return OBJ
    if isinstance(t, ConcVar):
        s = Sort(t.arity)
        seen = env.get(t.name)
        if seen is None:
            env[t.name] = s
        elif seen != s:
            errors.append((_loc(path), "variable %r used at sorts %r and %r" % (t.name, seen, s)))
            return None
        return s
    if isinstance(t, Proj):
        bs = _check_term(t.base, sig, env, errors, path + (0,))
        for i, a in enumerate(t.args):
            s = _check_term(a, sig, env, errors, path + (i + 1,))
            if s is not None and not s.is_object:
                errors.append((_loc(path + (i + 1,)), "projection argument must be an object"))
        if bs is None:
            return None
        if not bs.is_concept or bs.arity <= len(t.args):
            errors.append((_loc(path), "projection base must have arity > %d" % len(t.args)))
            return None
        return Sort(bs.arity - len(t.args))
    if isinstance(t, Abs):
        arity = sig.arity_of(t.sym) if sig is not None else None
        if arity is None:
            errors.append((_loc(path), "unknown abstraction symbol id %r" % t.sym))
        s = _check_term(t.arg, sig, env, errors, path + (0,))
        if s is not None:
            if not s.is_concept:
                errors.append((_loc(path + (0,)), "abstraction applies to a concept"))
            elif arity is not None and s.arity != arity:
                errors.append((_loc(path), "abstraction %r expects a %d-ary concept, got %d-ary"
                               % (t.sym, arity, s.arity)))
        return OBJ
    errors.append((_loc(path), "not a term: %r" % (t,)))
    return None


def flatten_projection(t):
    """Collapse nested projections: (R[a])[b] -> R[a, b].

    Provided as an explicit helper; nothing in the package applies it
    implicitly.
    """
    if isinstance(t, Proj):
        base = flatten_projection(t.base)
        args = [flatten_projection(a) for a in t.args]
        if isinstance(base, Proj):
            return Proj(base.base, list(base.args) + args)
        return Proj(base, args)
    if isinstance(t, Abs):
        return Abs(t.sym, flatten_projection(t.arg))
    return t


# ---------------------------------------------------------------------------
# s-expression layer

_TOKEN_RE = re.compile(r"""\s*(?:(;[^\n]*)|(\()|(\))|([^\s();]+))""")


def tokenize(text):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].strip()
            if rest:
                raise SofSyntaxError("cannot read %r" % rest[:10], pos)
            break
        pos = m.end()
        if m.group(1):
            continue
        if m.group(2):
            out.append(("(", m.start(2)))
        elif m.group(3):
            out.append((")", m.start(3)))
        elif m.group(4):
            out.append((m.group(4), m.start(4)))
    return out


def read_sexprs(text):
    """All top-level s-expressions in the text, with source offsets."""
    toks = tokenize(text)
    items, pos = [], 0

    def rd(i):
        if i >= len(toks):
            raise SofSyntaxError("unexpected end of input", len(text))
        tok, at = toks[i]
        if tok == "(":
            lst = []
            i += 1
            while True:
                if i >= len(toks):
                    raise SofSyntaxError("unclosed '('", at)
                if toks[i][0] == ")":
                    return (lst, at), i + 1
                node, i = rd(i)
                lst.append(node)
        if tok == ")":
            raise SofSyntaxError("unexpected ')'", at)
        return (tok, at), i + 1

    i = 0
    while i < len(toks):
        node, i = rd(i)
        items.append(node)
    return items


def _sx_body(node):
    return node[0]


def _sx_pos(node):
    return node[1]


def _is_atom(node):
    return isinstance(_sx_body(node), str)


_RESERVED = {"forall", "exists", "and", "or", "not", "implies", "iff",
             "pred", "=", "proj", "abs", "Obj", "Conc", "vars"}


def _parse_sort(node):
    b = _sx_body(node)
    if b == "Obj":
        return OBJ
    if isinstance(b, list) and len(b) == 2 and _sx_body(b[0]) == "Conc":
        ar = _sx_body(b[1])
        if isinstance(ar, str) and ar.isdigit() and int(ar) >= 1:
            return conc(int(ar))
    raise SofSyntaxError("expected a sort: Obj or (Conc n)", _sx_pos(node))


class _Typing:
    """Iterative sort inference for free variables."""

    def __init__(self, sig, presets):
        self.sig = sig
        self.sorts = dict(presets)
        self.changed = False
        self.pending = []

    def assign(self, name, sort, pos):
        old = self.sorts.get(name)
        if old is None:
            self.sorts[name] = sort
            self.changed = True
        elif old != sort:
            raise SofSyntaxError(
                "variable %r used at sorts %r and %r" % (name, old, sort), pos)

    def get(self, name):
        return self.sorts.get(name)


def parse_formula(text, sig=EMPTY_SIGNATURE, var_sorts=None):
    """Parse a single formula from source text.

    Bound variables carry explicit sorts; free-variable sorts are
    inferred from forced positions (predication, projection and
    abstraction arguments, and equality against a known side).  Sorts
    that stay undetermined raise, unless supplied through `var_sorts`.
    """
    items = read_sexprs(text)
    if len(items) != 1:
        raise SofSyntaxError("expected exactly one formula", 0)
    return parse_formula_sexpr(items[0], sig, var_sorts)


def parse_formula_sexpr(node, sig=EMPTY_SIGNATURE, var_sorts=None):
    body = _sx_body(node)
    if isinstance(body, list) and body and _sx_body(body[0]) == "vars":
        if len(body) != 3:
            raise SofSyntaxError("vars form takes a declaration list and a formula",
                                 _sx_pos(node))
        decls = dict(var_sorts or {})
        dl = _sx_body(body[1])
        if not isinstance(dl, list):
            raise SofSyntaxError("expected a declaration list", _sx_pos(body[1]))
        for d in dl:
            db = _sx_body(d)
            if not (isinstance(db, list) and len(db) == 2 and _is_atom(db[0])):
                raise SofSyntaxError("expected (name sort)", _sx_pos(d))
            decls[_sx_body(db[0])] = _parse_sort(db[1])
        return parse_formula_sexpr(body[2], sig, decls)

    typing = _Typing(sig, var_sorts or {})
    # run inference to a fixpoint, then build
    for _ in range(64):
        typing.changed = False
        _infer_formula(node, typing, {})
        if not typing.changed:
            break
    f = _build_formula(node, typing, {})
    rep = well_sorted(sig, f)
    if not rep.ok:
        raise SofSyntaxError("ill-sorted formula: %s" % rep.errors[0][1], _sx_pos(node))
    return f


def _head(node):
    body = _sx_body(node)
    if isinstance(body, list) and body and _is_atom(body[0]):
        return _sx_body(body[0])
    return None


def _binder_parts(node):
    body = _sx_body(node)
    if len(body) != 3:
        raise SofSyntaxError("quantifier takes (var sort) and a body", _sx_pos(node))
    vb = _sx_body(body[1])
    if not (isinstance(vb, list) and len(vb) == 2 and _is_atom(vb[0])):
        raise SofSyntaxError("expected (var sort)", _sx_pos(body[1]))
    name = _sx_body(vb[0])
    if name in _RESERVED:
        raise SofSyntaxError("reserved word %r cannot be a variable" % name, _sx_pos(vb[0]))
    return name, _parse_sort(vb[1]), body[2]


def _infer_formula(node, typing, bound):
    h = _head(node)
    body = _sx_body(node)
    if h in ("forall", "exists"):
        name, sort, inner = _binder_parts(node)
        saved = bound.get(name)
        bound[name] = sort
        _infer_formula(inner, typing, bound)
        if saved is None:
            del bound[name]
        else:
            bound[name] = saved
        return
    if h in ("and", "or", "implies", "iff"):
        if len(body) != 3:
            raise SofSyntaxError("%s takes two arguments" % h, _sx_pos(node))
        _infer_formula(body[1], typing, bound)
        _infer_formula(body[2], typing, bound)
        return
    if h == "not":
        if len(body) != 2:
            raise SofSyntaxError("not takes one argument", _sx_pos(node))
        _infer_formula(body[1], typing, bound)
        return
    if h == "pred":
        if len(body) < 3:
            raise SofSyntaxError("pred takes a relation and arguments", _sx_pos(node))
        _infer_term(body[1], conc(len(body) - 2), typing, bound)
        for a in body[2:]:
            _infer_term(a, OBJ, typing, bound)
        return
    if h == "=":
        if len(body) != 3:
            raise SofSyntaxError("= takes two terms", _sx_pos(node))
        ls = _term_sort_hint(body[1], typing, bound)
        rs = _term_sort_hint(body[2], typing, bound)
        _infer_term(body[1], rs, typing, bound)
        _infer_term(body[2], ls, typing, bound)
        return
    raise SofSyntaxError("expected a formula", _sx_pos(node))


def _term_sort_hint(node, typing, bound):
    body = _sx_body(node)
    if isinstance(body, str):
        return bound.get(body) or typing.get(body)
    h = _head(node)
    if h == "abs":
        return OBJ
    if h == "proj":
        base = _term_sort_hint(body[1], typing, bound) if len(body) >= 2 else None
        if base is not None and base.is_concept and base.arity > len(body) - 2:
            return Sort(base.arity - (len(body) - 2))
        return None
    return None


def _infer_term(node, want, typing, bound):
    body = _sx_body(node)
    if isinstance(body, str):
        if body in _RESERVED:
            raise SofSyntaxError("reserved word %r cannot be a variable" % body, _sx_pos(node))
        if body in bound:
            return
        if want is not None:
            typing.assign(body, want, _sx_pos(node))
        return
    h = _head(node)
    if h == "proj":
        if len(body) < 3:
            raise SofSyntaxError("proj takes a base and arguments", _sx_pos(node))
        m = len(body) - 2
        if want is not None and want.is_concept:
            _infer_term(body[1], conc(want.arity + m), typing, bound)
        else:
            _infer_term(body[1], None, typing, bound)
        for a in body[2:]:
            _infer_term(a, OBJ, typing, bound)
        return
    if h == "abs":
        if len(body) != 3 or not _is_atom(body[1]):
            raise SofSyntaxError("abs takes a symbol id and a concept", _sx_pos(node))
        sym = _sx_body(body[1])
        ar = typing.sig.arity_of(sym)
        if ar is None:
            raise SofSyntaxError("unknown abstraction symbol id %r" % sym, _sx_pos(body[1]))
        _infer_term(body[2], conc(ar), typing, bound)
        return
    raise SofSyntaxError("expected a term", _sx_pos(node))


def _build_formula(node, typing, bound):
    h = _head(node)
    body = _sx_body(node)
    if h in ("forall", "exists"):
        name, sort, inner = _binder_parts(node)
        saved = bound.get(name)
        bound[name] = sort
        sub = _build_formula(inner, typing, bound)
        if saved is None:
            del bound[name]
        else:
            bound[name] = saved
        return (Forall if h == "forall" else Exists)(name, sort, sub)
    if h == "and":
        return And(_build_formula(body[1], typing, bound), _build_formula(body[2], typing, bound))
    if h == "or":
        return Or(_build_formula(body[1], typing, bound), _build_formula(body[2], typing, bound))
    if h == "implies":
        return Implies(_build_formula(body[1], typing, bound), _build_formula(body[2], typing, bound))
    if h == "iff":
        return Iff(_build_formula(body[1], typing, bound), _build_formula(body[2], typing, bound))
    if h == "not":
        return Not(_build_formula(body[1], typing, bound))
    if h == "pred":
        rel = _build_term(body[1], typing, bound)
        return Pred(rel, [_build_term(a, typing, bound) for a in body[2:]])
    if h == "=":
        return Eq(_build_term(body[1], typing, bound), _build_term(body[2], typing, bound))
    raise SofSyntaxError("expected a formula", _sx_pos(node))


def _build_term(node, typing, bound):
    body = _sx_body(node)
    if isinstance(body, str):
        sort = bound.get(body) or typing.get(body)
        if sort is None:
            raise SofSyntaxError(
                "cannot determine the sort of free variable %r" % body, _sx_pos(node))
        return var_of_sort(body, sort)
    h = _head(node)
    if h == "proj":
        return Proj(_build_term(body[1], typing, bound),
                    [_build_term(a, typing, bound) for a in body[2:]])
    if h == "abs":
        return Abs(_sx_body(body[1]), _build_term(body[2], typing, bound))
    raise SofSyntaxError("expected a term", _sx_pos(node))


# ---------------------------------------------------------------------------
# printing

def print_sort(s):
    return "Obj" if s.is_object else "(Conc %d)" % s.arity


def print_term(t):
    if isinstance(t, (ObjVar, ConcVar)):
        return t.name
    if isinstance(t, Proj):
        return "(proj %s %s)" % (print_term(t.base), " ".join(print_term(a) for a in t.args))
    if isinstance(t, Abs):
        return "(abs %s %s)" % (t.sym, print_term(t.arg))
    raise TypeError("not a term: %r" % (t,))


def print_formula(f):
    if isinstance(f, Pred):
        return "(pred %s %s)" % (print_term(f.rel), " ".join(print_term(a) for a in f.args))
    if isinstance(f, Eq):
        return "(= %s %s)" % (print_term(f.lhs), print_term(f.rhs))
    if isinstance(f, Not):
        return "(not %s)" % print_formula(f.body)
    if isinstance(f, And):
        return "(and %s %s)" % (print_formula(f.lhs), print_formula(f.rhs))
    if isinstance(f, Or):
        return "(or %s %s)" % (print_formula(f.lhs), print_formula(f.rhs))
    if isinstance(f, Implies):
        return "(implies %s %s)" % (print_formula(f.lhs), print_formula(f.rhs))
    if isinstance(f, Iff):
        return "(iff %s %s)" % (print_formula(f.lhs), print_formula(f.rhs))
    if isinstance(f, Forall):
        return "(forall (%s %s) %s)" % (f.var, print_sort(f.sort), print_formula(f.body))
    if isinstance(f, Exists):
        return "(exists (%s %s) %s)" % (f.var, print_sort(f.sort), print_formula(f.body))
    raise TypeError("not a formula: %r" % (f,))


def print_sof(f):
    """File-level rendering: open formulas get a vars-declaration header
    so their free-variable sorts survive a round trip."""
    fv = free_vars(f)
    if not fv:
        return print_formula(f)
    decls = " ".join("(%s %s)" % (n, print_sort(fv[n])) for n in sorted(fv))
    return "(vars (%s) %s)" % (decls, print_formula(f))


def parse_sof(text, sig=EMPTY_SIGNATURE):
    """Parse a .sof document: comments, optional vars header, one formula."""
    return parse_formula(text, sig)
