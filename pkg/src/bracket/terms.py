"""Untyped lambda terms, combinatory terms and their normalization.

Lambda terms and CL terms share one set of node classes. A CL term is
simply a term with no ``Abs`` node (see :func:`is_cl`).
"""

from __future__ import annotations

import enum
import sys
from typing import Iterator, Optional, Union

DEFAULT_FUEL = 100_000

# Unfolded combinator terms can get deep; equality and hashing recurse.
if sys.getrecursionlimit() < 20_000:
    sys.setrecursionlimit(20_000)


class FuelExhausted(Exception):
    """Raised when a reduction runs out of its step budget."""

    def __init__(self, fuel: int):
        super().__init__(f"fuel exhausted after {fuel} steps")
        self.fuel = fuel


class Combinator(enum.Enum):
    S = "S"
    K = "K"
    I = "I"  # noqa: E741
    B = "B"
    C = "C"
    S1 = "S'"
    B1 = "B'"
    C1 = "C'"
    BSTAR = "B*"

    def __str__(self) -> str:
        return self.value

    @property
    def definition(self) -> "Term":
        return _DEFINITIONS[self]

    @classmethod
    def from_token(cls, token: str) -> "Combinator":
        return cls(token.replace("′", "'"))


class _Node:
    """Immutable term node.

    ``fv`` caches the free variable names and ``size`` the number of atom
    occurrences (variables and combinator constants; binders not counted).
    """

    __slots__ = ()

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __delattr__(self, name):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __ne__(self, other):
        return not self == other

    def __repr__(self) -> str:
        fields = ", ".join(repr(getattr(self, f)) for f in self.__match_args__)
        return f"{type(self).__name__}({fields})"


_set = object.__setattr__
_fv_cache: dict = {}


class Var(_Node):
    __slots__ = ("name", "fv")
    size = 1
    __match_args__ = ("name",)

    def __init__(self, name: str):
        _set(self, "name", name)
        fv = _fv_cache.get(name)
        if fv is None:
            fv = _fv_cache[name] = frozenset((name,))
        _set(self, "fv", fv)

    def __eq__(self, other):
        return type(other) is Var and other.name == self.name

    def __hash__(self):
        return hash(("Var", self.name))

    def __str__(self) -> str:
        return self.name

    def __reduce__(self):
        return Var, (self.name,)


class Prim(_Node):
    __slots__ = ("comb",)
    __match_args__ = ("comb",)
    fv = frozenset()
    size = 1

    def __init__(self, comb: "Combinator"):
        _set(self, "comb", comb)

    def __eq__(self, other):
        return type(other) is Prim and other.comb is self.comb

    def __hash__(self):
        return hash(("Prim", self.comb))

    def __str__(self) -> str:
        return self.comb.value

    def __reduce__(self):
        return Prim, (self.comb,)


class App(_Node):
    __slots__ = ("fun", "arg", "fv", "size")
    __match_args__ = ("fun", "arg")

    def __init__(self, fun: "Term", arg: "Term"):
        _set(self, "fun", fun)
        _set(self, "arg", arg)
        f, a = fun.fv, arg.fv
        _set(self, "fv", f if a <= f else (a if f <= a else f | a))
        _set(self, "size", fun.size + arg.size)

    def __eq__(self, other):
        # iterative: CL terms can be deep along the function spine
        a, b = self, other
        while type(a) is App:
            if type(b) is not App or a.fv != b.fv or a.arg != b.arg:
                return False
            a, b = a.fun, b.fun
        return a == b

    def __hash__(self):
        return hash(("App", self.fun, self.arg))

    def __reduce__(self):
        return App, (self.fun, self.arg)


class Abs(_Node):
    __slots__ = ("var", "body", "fv", "size")
    __match_args__ = ("var", "body")

    def __init__(self, var: str, body: "Term"):
        _set(self, "var", var)
        _set(self, "body", body)
        _set(self, "fv", body.fv - {var} if var in body.fv else body.fv)
        _set(self, "size", body.size)

    def __eq__(self, other):
        return type(other) is Abs and other.var == self.var and other.body == self.body

    def __hash__(self):
        return hash(("Abs", self.var, self.body))

    def __reduce__(self):
        return Abs, (self.var, self.body)


Term = Union[Var, Prim, App, Abs]

S, K, I, B, C = (Prim(c) for c in (Combinator.S, Combinator.K, Combinator.I,
                                    Combinator.B, Combinator.C))
S1, B1, C1, BSTAR = (Prim(c) for c in (Combinator.S1, Combinator.B1,
                                        Combinator.C1, Combinator.BSTAR))


def app(head: Term, *args: Term) -> Term:
    """Left-nested application ``head a1 ... an``."""
    for a in args:
        head = App(head, a)
    return head


def lam(names: str, body: Term) -> Term:
    """``lam("x y", b)`` is ``λx. λy. b``."""
    for n in reversed(names.split()):
        body = Abs(n, body)
    return body


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``h a1 ... an`` into ``(h, [a1, ..., an])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def _v(n):
    return Var(n)


_DEFINITIONS = {
    Combinator.S: lam("x y z", app(_v("x"), _v("z"), App(_v("y"), _v("z")))),
    Combinator.K: lam("x y", _v("x")),
    Combinator.I: lam("x", _v("x")),
    Combinator.B: lam("x y z", App(_v("x"), App(_v("y"), _v("z")))),
    Combinator.C: lam("x y z", app(_v("x"), _v("z"), _v("y"))),
    Combinator.S1: lam("k x y z", app(_v("k"), App(_v("x"), _v("z")), App(_v("y"), _v("z")))),
    Combinator.B1: lam("k x y z", app(_v("k"), _v("x"), App(_v("y"), _v("z")))),
    Combinator.C1: lam("k x y z", app(_v("k"), App(_v("x"), _v("z")), _v("y"))),
    Combinator.BSTAR: lam("f x y z", App(_v("f"), App(_v("x"), App(_v("y"), _v("z"))))),
}


def free_vars(t: Term) -> frozenset:
    """Names of the free variables of ``t``."""
    return t.fv


def is_cl(t: Term) -> bool:
    """True if ``t`` contains no abstraction."""
    return not any(isinstance(s, Abs) for s in subterms(t))


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack.append(s.arg)
            stack.append(s.fun)
        elif isinstance(s, Abs):
            stack.append(s.body)


def fresh_name(base: str, avoid) -> str:
    """Smallest ``base<n>`` (n >= 1) not in ``avoid``."""
    stem = base.rstrip("0123456789") or base
    n = 1
    while f"{stem}{n}" in avoid:
        n += 1
    return f"{stem}{n}"


def substitute(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding ``t[x := s]``."""
    if x not in t.fv:
        return t
    match t:
        case Var():
            return s
        case App(f, a):
            return App(substitute(f, x, s), substitute(a, x, s))
        case Abs(y, body):
            # x free in t, so y != x
            if y in s.fv:
                y2 = fresh_name(y, s.fv | body.fv | {x})
                body = substitute(body, y, Var(y2))
                y = y2
            return Abs(y, substitute(body, x, s))
    return t


def alpha_equal(t1: Term, t2: Term) -> bool:
    return _alpha(t1, t2, {}, {}, 0)


def _alpha(a: Term, b: Term, env_a: dict, env_b: dict, depth: int) -> bool:
    match a, b:
        case Var(n), Var(m):
            la, lb = env_a.get(n), env_b.get(m)
            if la is None and lb is None:
                return n == m
            return la == lb
        case Prim(c), Prim(d):
            return c is d
        case App(f, x), App(g, y):
            return _alpha(f, g, env_a, env_b, depth) and _alpha(x, y, env_a, env_b, depth)
        case Abs(n, p), Abs(m, q):
            return _alpha(p, q, {**env_a, n: depth}, {**env_b, m: depth}, depth + 1)
    return False


def is_beta_normal(t: Term) -> bool:
    """True iff ``t`` contains no subterm ``(λx. s) u``."""
    return not any(isinstance(s, App) and isinstance(s.fun, Abs) for s in subterms(t))


class _Budget:
    __slots__ = ("left", "total", "values", "thunks")

    def __init__(self, fuel: int):
        self.left = fuel
        self.total = fuel
        self.values = {}  # fast_normalize: shared values of "A" code nodes
        self.thunks = {}

    def spend(self):
        if self.left <= 0:
            raise FuelExhausted(self.total)
        self.left -= 1


def beta_normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Normal-order (leftmost-outermost) β-normal form of ``t``.

    Each contracted redex costs one unit of fuel; raises
    :class:`FuelExhausted` when the budget runs out.
    """
    return _normalize(t, _Budget(fuel))


def _whnf(t: Term, budget: _Budget) -> Term:
    # Head reduction: the head redex is always the leftmost-outermost one.
    head, args = spine(t)
    while isinstance(head, Abs) and args:
        budget.spend()
        head = substitute(head.body, head.var, args[0])
        args = args[1:]
        h2, more = spine(head)
        head, args = h2, more + args
    return app(head, *args)


def _normalize(t: Term, budget: _Budget) -> Term:
    while True:
        match t:
            case Abs(v, body):
                return Abs(v, _normalize(body, budget))
            case App():
                head, args = spine(_whnf(t, budget))
                if isinstance(head, Abs):
                    # no arguments left, otherwise whnf would have reduced it
                    t = head
                    continue
                return app(head, *(_normalize(a, budget) for a in args))
            case _:
                return t


def eta_normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Contract every ``λx. s x`` with ``x`` not free in ``s``, innermost first.

    Expects a β-normal term. Contractions are bounded by the term size, so
    ``fuel`` is accepted for symmetry with :func:`beta_normalize` but never
    runs out.
    """
    return _eta(t)


def _eta(t: Term) -> Term:
    match t:
        case App(f, a):
            return App(_eta(f), _eta(a))
        case Abs(v, body):
            body = _eta(body)
            if isinstance(body, App) and body.arg == Var(v) and v not in body.fun.fv:
                return body.fun
            return Abs(v, body)
    return t


def beta_eta_normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Canonical βη-normal form: normal-order β, then innermost η."""
    return _eta(beta_normalize(t, fuel))


def unfold(t: Term) -> Term:
    """Replace every combinator constant by its defining lambda term."""
    match t:
        case Prim(c):
            return c.definition
        case App(f, a):
            return App(unfold(f), unfold(a))
        case Abs(v, body):
            return Abs(v, unfold(body))
    return t


# ----------------------------------------------------------------------------
# Fast normalizer for the semantic oracle: call-by-need normalization by
# evaluation over de Bruijn code. Finds the same β-normal form as
# beta_normalize (lazy evaluation is normalizing); a shared redex is paid
# for once, so it never spends more fuel than normal order does.

class _Thunk:
    __slots__ = ("code", "env", "value")

    def __init__(self, code, env, value=None):
        self.code = code
        self.env = env
        self.value = value


class _Closure:
    __slots__ = ("body", "env")

    def __init__(self, body, env):
        self.body = body
        self.env = env


class _Neutral:
    __slots__ = ("head", "args")

    def __init__(self, head, args):
        self.head = head
        self.args = args


_COMBINATOR_CODE: dict = {}


def _compile(t: Term, scope: tuple = (), shared: Optional[dict] = None):
    """De Bruijn code for ``t``.

    Applications outside every binder are tagged ``"A"``: their value does
    not depend on the environment. With ``shared`` given, such nodes are
    compiled once per distinct term object, so a DAG stays a DAG.
    """
    match t:
        case Var(name):
            for i, bound in enumerate(scope):
                if bound == name:
                    return ("v", i)
            return ("f", name)
        case Prim(c):
            code = _COMBINATOR_CODE.get(c)
            if code is None:
                code = _COMBINATOR_CODE[c] = _compile(c.definition)
            return code
        case App(f, a):
            if scope:
                return ("a", _compile(f, scope), _compile(a, scope))
            if shared is None:
                return ("A", _compile(f), _compile(a))
            hit = shared.get(id(t))
            if hit is None:
                hit = shared[id(t)] = (t, ("A", _compile(f, (), shared), _compile(a, (), shared)))
            return hit[1]
        case Abs(v, body):
            return ("l", _compile(body, (v, *scope)))
    raise TypeError(t)


def _lookup(env, i):
    while i:
        env = env[1]
        i -= 1
    return env[0]


def _force(th: _Thunk, budget: _Budget):
    if th.value is None:
        th.value = _eval(th.code, th.env, budget)
        th.code = th.env = None
    return th.value


def _eval(code, env, budget: _Budget):
    while True:
        tag = code[0]
        if tag == "a":
            f = _eval(code[1], env, budget)
            arg = _Thunk(code[2], env)
            if isinstance(f, _Closure):
                budget.spend()
                code, env = f.body, (arg, f.env)
                continue
            return _Neutral(f.head, f.args + (arg,))
        if tag == "A":
            return _eval_shared(code, budget)
        if tag == "l":
            return _Closure(code[1], env)
        if tag == "v":
            return _force(_lookup(env, code[1]), budget)
        return _Neutral(code, ())


def _eval_shared(code, budget: _Budget):
    # environment-free application: one value per code node
    key = id(code)
    value = budget.values.get(key)
    if value is None:
        f = _eval(code[1], None, budget)
        arg = budget.thunks.get(id(code[2]))
        if arg is None:
            arg = budget.thunks[id(code[2])] = _Thunk(code[2], None)
        if isinstance(f, _Closure):
            budget.spend()
            value = _eval(f.body, (arg, f.env), budget)
        else:
            value = _Neutral(f.head, f.args + (arg,))
        budget.values[key] = value
    return value


def _readback(value, level: int, budget: _Budget) -> Term:
    if isinstance(value, _Closure):
        fresh = _Thunk(None, None, _Neutral(("lvl", level), ()))
        body = _eval(value.body, (fresh, value.env), budget)
        return Abs(level_name(level), _readback(body, level + 1, budget))
    head = value.head
    out = Var(head[1]) if head[0] == "f" else Var(level_name(head[1]))
    for th in value.args:
        out = App(out, _readback(_force(th, budget), level, budget))
    return out


def level_name(level: int) -> str:
    # cannot clash with parsed variable names, which start with a letter
    return f"_{level}"


def fast_normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """β-normal form of ``t`` (combinators unfolded), by lazy evaluation.

    Bound variables in the result are named ``_0, _1, ...`` by depth, so
    α-equivalent results are structurally equal.
    """
    budget = _Budget(fuel)
    value = _eval(_compile(t, (), {}), None, budget)
    return _readback(value, 0, budget)
