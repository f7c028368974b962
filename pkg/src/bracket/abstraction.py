"""Bracket abstraction algorithms and the translations they induce.

Every algorithm is an ordered table of equations; the first equation whose
side condition holds is used. Optimisation-based algorithms share the
three (abf') equations and differ only in the ``Opt`` table applied once,
at the root of each freshly built ``S s t``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .terms import (B, B1, BSTAR, C, C1, I, K, S, S1, Abs, App, Combinator,
                    Prim, Term, Var, app, spine)


class Algorithm(enum.Enum):
    FAB = "fab"
    ABF = "abf"
    ABF_PRIME = "abf1"
    ABCF_PRIME = "abcf1"
    SCHONFINKEL = "s"
    SCHONFINKEL_PRIME = "s1"
    SCHONFINKEL_NOETA = "s-noeta"
    SCHONFINKEL_PRIME_NOETA = "s1-noeta"
    T = "t"
    T_PRIME = "t1"
    T_DOUBLE_PRIME = "t2"
    T_NOETA = "t-noeta"
    T_PRIME_NOETA = "t1-noeta"
    ABS_DASH_1 = "absdash1"
    TSTAR = "tstar"
    TSTAR_PRIME = "tstar1"
    TSTAR_DOUBLE_PRIME = "tstar2"

    @classmethod
    def from_name(cls, name: str) -> "Algorithm":
        try:
            return cls(name.lower())
        except ValueError:
            pass
        try:
            return cls[name.upper().replace("-", "_")]
        except KeyError:
            raise ValueError(f"unknown algorithm {name!r}") from None

    @property
    def table(self) -> "_Table":
        return _TABLES[self]

    @property
    def basis(self) -> frozenset:
        return self.table.basis

    @property
    def uses_opt(self) -> bool:
        return self.table.opt is not None


ALGORITHM_HELP = {
    Algorithm.FAB: "(fab): S rule before the I and K rules",
    Algorithm.ABF: "(abf): I, then K when x is not free, then S",
    Algorithm.ABF_PRIME: "(abf'): S-only equations plus Opt S(Ks)(Kt) -> K(st)",
    Algorithm.ABCF_PRIME: "(abcf'): (abf') plus Opt S(Ks)I -> s",
    Algorithm.SCHONFINKEL: "S: K, I, eta, B, C and S over SKIBC",
    Algorithm.SCHONFINKEL_PRIME: "S': (abf') equations with the S optimisation table",
    Algorithm.SCHONFINKEL_NOETA: "S without the eta equation",
    Algorithm.SCHONFINKEL_PRIME_NOETA: "S' without the eta optimisation",
    Algorithm.T: "T: Turner's equations over S K I B C S' B' C'",
    Algorithm.T_PRIME: "T': (abf') equations with the Turner optimisation table",
    Algorithm.T_DOUBLE_PRIME: "T'': T with the extracted operand u required closed",
    Algorithm.T_NOETA: "T without the eta equations",
    Algorithm.T_PRIME_NOETA: "T' without the eta optimisation",
    Algorithm.ABS_DASH_1: "Abs/Dash/1: T'' without the B and C shortcuts, eta tried late",
    Algorithm.TSTAR: "T*: T with B* in place of B'",
    Algorithm.TSTAR_PRIME: "T*': (abf') equations with the T* optimisation table",
    Algorithm.TSTAR_DOUBLE_PRIME: "T*'': T*' without the two B* optimisations",
}


@dataclass(frozen=True)
class TraceStep:
    """One fired equation or optimisation.

    ``position`` is the path (0 = function, 1 = argument) from the root of
    the term handed to :func:`abstract` to the subterm being abstracted.
    """

    label: str
    var: str
    position: tuple

    def __str__(self) -> str:
        where = ".".join(map(str, self.position)) or "root"
        return f"{self.label}\t[{self.var}]\t@{where}"


class ReplayError(ValueError):
    pass


def _args(t: Term, comb: Combinator, n: int) -> Optional[list]:
    """Arguments of ``t`` if it is exactly ``comb a1 ... an``."""
    args = []
    for _ in range(n):
        if type(t) is not App:
            return None
        args.append(t.arg)
        t = t.fun
    if type(t) is Prim and t.comb is comb:
        args.reverse()
        return args
    return None


def _split3(t: Term):
    """``u s r`` for ``t = App(App(u, s), r)``, else None."""
    if isinstance(t, App) and isinstance(t.fun, App):
        return t.fun.fun, t.fun.arg, t.arg
    return None


# Position helpers: where s, t live inside ``u s t`` / ``s t``.
_FUN, _ARG = (0,), (1,)
_MID = (0, 1)


# ----------------------------------------------------------------------------
# Equations. Each takes the runner, the variable, the term and its position
# and returns (label, result) or None when its side condition fails. Side
# conditions are all checked before any recursive call.

Equation = Callable[["_Run", str, Term, tuple], Optional[tuple]]


def _eq_const(label):
    def eq(run, x, t, pos):
        if x not in t.fv:
            return label, App(K, t)
    return eq


def _eq_var(label):
    def eq(run, x, t, pos):
        if type(t) is Var and t.name == x:
            return label, I
    return eq


def _eq_eta(label):
    # s x  ->  s   if x not free in s
    def eq(run, x, t, pos):
        if isinstance(t, App) and type(t.arg) is Var and t.arg.name == x and x not in t.fun.fv:
            return label, t.fun
    return eq


def _eq_s(label):
    def eq(run, x, t, pos):
        if isinstance(t, App):
            return label, app(S, run.rec(t.fun, pos + _FUN), run.rec(t.arg, pos + _ARG))
    return eq


def _eq_b(label):
    def eq(run, x, t, pos):
        if isinstance(t, App) and x not in t.fun.fv:
            return label, app(B, t.fun, run.rec(t.arg, pos + _ARG))
    return eq


def _eq_c(label):
    def eq(run, x, t, pos):
        if isinstance(t, App) and x not in t.arg.fv:
            return label, app(C, run.rec(t.fun, pos + _FUN), t.arg)
    return eq


def _closed_ok(u: Term, closed: bool) -> bool:
    return not closed or not u.fv


def _eq_turner_c(label, closed=False):
    # u x t  ->  C u t   if x not free in u t
    def eq(run, x, t, pos):
        p = _split3(t)
        if p and type(p[1]) is Var and p[1].name == x and x not in p[0].fv and x not in p[2].fv \
                and _closed_ok(p[0], closed):
            return label, app(C, p[0], p[2])
    return eq


def _eq_turner_s(label, closed=False):
    # u x t  ->  S u [x]t   if x not free in u
    def eq(run, x, t, pos):
        p = _split3(t)
        if p and type(p[1]) is Var and p[1].name == x and x not in p[0].fv and _closed_ok(p[0], closed):
            return label, app(S, p[0], run.rec(p[2], pos + _ARG))
    return eq


def _eq_b_prime(label, closed=False):
    # u s t  ->  B' u s [x]t   if x not free in u s
    def eq(run, x, t, pos):
        p = _split3(t)
        if p and x not in p[0].fv and x not in p[1].fv and _closed_ok(p[0], closed):
            return label, app(B1, p[0], p[1], run.rec(p[2], pos + _ARG))
    return eq


def _eq_c_prime(label, closed=False):
    # u s t  ->  C' u [x]s t   if x not free in u t
    def eq(run, x, t, pos):
        p = _split3(t)
        if p and x not in p[0].fv and x not in p[2].fv and _closed_ok(p[0], closed):
            return label, app(C1, p[0], run.rec(p[1], pos + _MID), p[2])
    return eq


def _eq_s_prime(label, closed=False):
    # u s t  ->  S' u [x]s [x]t   if x not free in u
    def eq(run, x, t, pos):
        p = _split3(t)
        if p and x not in p[0].fv and _closed_ok(p[0], closed):
            return label, app(S1, p[0], run.rec(p[1], pos + _MID), run.rec(p[2], pos + _ARG))
    return eq


def _eq_bstar_or_b(label_bstar, label_b):
    # s t -> B* s t1 t2 if x not free in s and [x]t = B t1 t2, else B s [x]t.
    # The two equations are adjacent with the same guard, so [x]t is
    # computed once and shared.
    def eq(run, x, t, pos):
        if isinstance(t, App) and x not in t.fun.fv:
            inner = run.rec(t.arg, pos + _ARG)
            bargs = _args(inner, Combinator.B, 2)
            if bargs is not None:
                return label_bstar, app(BSTAR, t.fun, *bargs)
            return label_b, app(B, t.fun, inner)
    return eq


def _eq_opt_app(label):
    def eq(run, x, t, pos):
        if isinstance(t, App):
            s1 = run.rec(t.fun, pos + _FUN)
            s2 = run.rec(t.arg, pos + _ARG)
            return label, run.apply_opt(s1, s2, pos)
    return eq


# ----------------------------------------------------------------------------
# Optimisation rules: (s1, s2) -> replacement for ``S s1 s2`` or None.

OptRule = Callable[[Term, Term], Optional[Term]]


def _opt_kk(s1, s2):
    a, b = _args(s1, Combinator.K, 1), _args(s2, Combinator.K, 1)
    if a and b:
        return App(K, App(a[0], b[0]))


def _opt_ki(s1, s2):
    a = _args(s1, Combinator.K, 1)
    if a and s2 == I:
        return a[0]


def _opt_kb(s1, s2):
    a = _args(s1, Combinator.K, 1)
    if a:
        return app(B, a[0], s2)


def _opt_sc(s1, s2):
    b = _args(s2, Combinator.K, 1)
    if b:
        return app(C, s1, b[0])


def _opt_turner_kapp(s1, s2):
    # S (K (u s)) t -> B' u s t
    a = _args(s1, Combinator.K, 1)
    if a and isinstance(a[0], App):
        return app(B1, a[0].fun, a[0].arg, s2)


def _opt_turner_bk(s1, s2):
    # S (B u s) (K t) -> C' u s t
    a, b = _args(s1, Combinator.B, 2), _args(s2, Combinator.K, 1)
    if a and b:
        return app(C1, a[0], a[1], b[0])


def _opt_turner_b1k(s1, s2):
    # S (B' u1 u2 s) (K t) -> C' (u1 u2) s t
    a, b = _args(s1, Combinator.B1, 3), _args(s2, Combinator.K, 1)
    if a and b:
        return app(C1, App(a[0], a[1]), a[2], b[0])


def _opt_turner_b(s1, s2):
    # S (B u s) t -> S' u s t
    a = _args(s1, Combinator.B, 2)
    if a:
        return app(S1, a[0], a[1], s2)


def _opt_turner_b1(s1, s2):
    # S (B' u1 u2 s) t -> S' (u1 u2) s t
    a = _args(s1, Combinator.B1, 3)
    if a:
        return app(S1, App(a[0], a[1]), a[2], s2)


def _opt_star_kb(s1, s2):
    # S (K u) (B s t) -> B* u s t
    a, b = _args(s1, Combinator.K, 1), _args(s2, Combinator.B, 2)
    if a and b:
        return app(BSTAR, a[0], b[0], b[1])


def _opt_star_bstar_k(s1, s2):
    # S (B* u s1 s2) (K t) -> C' u (B s1 s2) t
    a, b = _args(s1, Combinator.BSTAR, 3), _args(s2, Combinator.K, 1)
    if a and b:
        return app(C1, a[0], app(B, a[1], a[2]), b[0])


def _opt_star_bstar(s1, s2):
    # S (B* u s1 s2) t -> S' u (B s1 s2) t
    a = _args(s1, Combinator.BSTAR, 3)
    if a:
        return app(S1, a[0], app(B, a[1], a[2]), s2)


@dataclass(frozen=True)
class _Table:
    equations: tuple
    opt: Optional[tuple]
    basis: frozenset


def _basis(*combs: Prim) -> frozenset:
    return frozenset(c.comb for c in combs)


_SKI = _basis(S, K, I)
_SKIBC = _basis(S, K, I, B, C)
_TURNER = _basis(S, K, I, B, C, S1, B1, C1)
_TSTAR = _basis(S, K, I, B, C, S1, B1, C1, BSTAR)

_ABF_EQS = (_eq_opt_app("app"), _eq_var("var"), _eq_const("const"))


def _t_eqs(family="T", closed=False, drop=(), star=False):
    eqs = {
        1: _eq_const(f"{family}(1)"),
        2: _eq_var(f"{family}(2)"),
        3: _eq_eta(f"{family}(3)"),
        4: _eq_turner_c(f"{family}(4)", closed),
        5: _eq_turner_s(f"{family}(5)", closed),
        6: _eq_b_prime(f"{family}(6)", closed),
        7: _eq_c_prime(f"{family}(7)", closed),
        8: _eq_s_prime(f"{family}(8)", closed),
        9: _eq_b(f"{family}(9)"),
        10: _eq_c(f"{family}(10)"),
        11: _eq_s(f"{family}(11)"),
    }
    if star:
        # (6) removed; B* equation after (3), then (9).
        order = [1, 2, 3, "bstar", 4, 5, 7, 8, 10, 11]
        eqs["bstar"] = _eq_bstar_or_b(f"{family}(B*)", f"{family}(9)")
    else:
        order = list(range(1, 12))
    return tuple(eqs[k] for k in order if k not in drop)


def _abs_dash_1_eqs():
    base = {k: e for k, e in zip(range(1, 12), _t_eqs("AD1", closed=True))}
    return tuple(base[k] for k in (1, 2, 6, 7, 8, 3, 9, 10, 11))


def _opts(prefix, rules, drop=()):
    return tuple((f"{prefix}-opt({i})", r) for i, r in enumerate(rules, 1) if i not in drop)


# Catch-all S s t is implicit: apply_opt falls back to it.
_S1_RULES = (_opt_kk, _opt_ki, _opt_kb, _opt_sc)
_T1_RULES = (_opt_kk, _opt_ki, _opt_turner_kapp, _opt_kb, _opt_turner_bk,
             _opt_turner_b1k, _opt_sc, _opt_turner_b, _opt_turner_b1)
_TSTAR1_RULES = (_opt_kk, _opt_ki, _opt_star_kb, _opt_kb, _opt_turner_bk,
                 _opt_star_bstar_k, _opt_sc, _opt_turner_b, _opt_star_bstar)

_TABLES = {
    Algorithm.FAB: _Table((_eq_s("fab(1)"), _eq_var("fab(2)"), lambda r, x, t, p: ("fab(3)", App(K, t))),
                          None, _SKI),
    Algorithm.ABF: _Table((_eq_var("abf(1)"), _eq_const("abf(2)"), _eq_s("abf(3)")), None, _SKI),
    Algorithm.ABF_PRIME: _Table(_ABF_EQS, _opts("abf1", (_opt_kk,)), _SKI),
    Algorithm.ABCF_PRIME: _Table(_ABF_EQS, _opts("abcf1", (_opt_kk, _opt_ki)), _SKI),
    Algorithm.SCHONFINKEL: _Table(
        (_eq_const("S(1)"), _eq_var("S(2)"), _eq_eta("S(3)"), _eq_b("S(4)"),
         _eq_c("S(5)"), _eq_s("S(6)")), None, _SKIBC),
    Algorithm.SCHONFINKEL_NOETA: _Table(
        (_eq_const("S(1)"), _eq_var("S(2)"), _eq_b("S(4)"), _eq_c("S(5)"),
         _eq_s("S(6)")), None, _SKIBC),
    Algorithm.SCHONFINKEL_PRIME: _Table(_ABF_EQS, _opts("s1", _S1_RULES), _SKIBC),
    Algorithm.SCHONFINKEL_PRIME_NOETA: _Table(_ABF_EQS, _opts("s1", _S1_RULES, drop=(2,)), _SKIBC),
    Algorithm.T: _Table(_t_eqs(), None, _TURNER),
    Algorithm.T_NOETA: _Table(_t_eqs(drop=(3, 4, 5)), None, _TURNER),
    Algorithm.T_DOUBLE_PRIME: _Table(_t_eqs("T2", closed=True), None, _TURNER),
    Algorithm.ABS_DASH_1: _Table(_abs_dash_1_eqs(), None, _TURNER),
    Algorithm.T_PRIME: _Table(_ABF_EQS, _opts("t1", _T1_RULES), _TURNER),
    Algorithm.T_PRIME_NOETA: _Table(_ABF_EQS, _opts("t1", _T1_RULES, drop=(2,)), _TURNER),
    Algorithm.TSTAR: _Table(_t_eqs("T*", star=True), None, _TSTAR),
    Algorithm.TSTAR_PRIME: _Table(_ABF_EQS, _opts("tstar1", _TSTAR1_RULES), _TSTAR),
    Algorithm.TSTAR_DOUBLE_PRIME: _Table(_ABF_EQS, _opts("tstar1", _TSTAR1_RULES, drop=(6, 9)), _TSTAR),
}

OPT_FALLBACK = "opt(S)"


class _Run:
    """A single abstraction of one variable, optionally traced or replayed."""

    def __init__(self, table: _Table, x: str, trace: Optional[list] = None,
                 forced: Optional[list] = None, opt_hook=None):
        self.table = table
        self.x = x
        self.trace = trace
        self.forced = forced
        self.opt_hook = opt_hook
        self.memo = {} if trace is None and forced is None else None

    def _next_forced(self) -> str:
        if not self.forced:
            raise ReplayError("trace ended early")
        return self.forced.pop(0).label

    def rec(self, t: Term, pos: tuple) -> Term:
        if self.memo is not None:
            # untraced runs depend only on the subterm, so shared input
            # nodes yield shared output nodes
            hit = self.memo.get(id(t))
            if hit is not None:
                return hit[1]
            out = self._rec(t, pos)
            self.memo[id(t)] = (t, out)
            return out
        return self._rec(t, pos)

    def _rec(self, t: Term, pos: tuple) -> Term:
        want = self._next_forced() if self.forced is not None else None
        slot = None
        if self.trace is not None:
            slot = len(self.trace)
            self.trace.append(None)
        for eq in self.table.equations:
            hit = eq(self, self.x, t, pos)
            if hit is None:
                continue
            label, result = hit
            if want is not None and label != want:
                # the recorded equation must be the first applicable one
                raise ReplayError(f"trace says {want} at {pos}, table fires {label}")
            if slot is not None:
                self.trace[slot] = TraceStep(label, self.x, pos)
            return result
        raise AssertionError("equation table has no catch-all")

    def apply_opt(self, s1: Term, s2: Term, pos: tuple) -> Term:
        if self.opt_hook is not None:
            return self.opt_hook(s1, s2)
        label, result = opt_step(self.table.opt, s1, s2)
        if self.forced is not None:
            want = self._next_forced()
            if want != label:
                raise ReplayError(f"trace says {want} at {pos}, Opt fires {label}")
        if self.trace is not None:
            self.trace.append(TraceStep(label, self.x, pos))
        return result


def _name(x) -> str:
    return x.name if isinstance(x, Var) else x


def opt_step(rules: Sequence, s1: Term, s2: Term) -> tuple:
    for label, rule in rules:
        r = rule(s1, s2)
        if r is not None:
            return label, r
    return OPT_FALLBACK, app(S, s1, s2)


def opt(alg: Algorithm, s1: Term, s2: Term) -> Term:
    """The algorithm's Opt function on ``S s1 s2``: first matching rule wins."""
    if not alg.uses_opt:
        raise ValueError(f"{alg.value} is not defined by optimisations")
    return opt_step(alg.table.opt, s1, s2)[1]


def abstract(alg: Algorithm, x, t: Term, trace: Optional[list] = None) -> Term:
    """``[x] t`` under ``alg``. Appends :class:`TraceStep` records to ``trace``."""
    return _Run(alg.table, _name(x), trace=trace).rec(t, ())


def replay(alg: Algorithm, x, t: Term, steps: Sequence[TraceStep]) -> Term:
    """Re-run an abstraction following ``steps``; raises :class:`ReplayError`
    if any step disagrees with the table."""
    forced = list(steps)
    out = _Run(alg.table, _name(x), forced=forced).rec(t, ())
    if forced:
        raise ReplayError(f"{len(forced)} unused trace steps")
    return out


def abstract_multi(alg: Algorithm, xs: Sequence, t: Term) -> Term:
    """``[x1, ..., xn] t``: abstract ``xn`` first, ``x1`` last."""
    names = [_name(x) for x in xs]
    if not names:
        raise ValueError("need at least one variable")
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate variables in {names}")
    for x in reversed(names):
        t = abstract(alg, x, t)
    return t


class OutputTooLarge(Exception):
    def __init__(self, size: int, limit: int):
        super().__init__(f"translation exceeded {limit} atoms ({size})")
        self.size = size
        self.limit = limit


def translate(alg: Algorithm, t: Term, trace: Optional[list] = None,
              max_size: Optional[int] = None) -> Term:
    """Induced translation: abstractions are eliminated innermost first.

    With ``max_size`` set, raises :class:`OutputTooLarge` as soon as an
    intermediate abstract exceeds that many atoms. A single abstraction step
    grows a term by a bounded factor, so this also bounds memory.
    """
    match t:
        case App(f, a):
            return App(translate(alg, f, trace, max_size), translate(alg, a, trace, max_size))
        case Abs(v, body):
            out = abstract(alg, v, translate(alg, body, trace, max_size), trace)
            if max_size is not None and out.size > max_size:
                raise OutputTooLarge(out.size, max_size)
            return out
    return t


def abstract_rewrite_mode(alg: Algorithm, x, t: Term) -> Term:
    """Like :func:`abstract`, but Opt rules rewrite anywhere, to fixpoint.

    After every S-introduction the whole intermediate term is rewritten
    leftmost-innermost until no optimisation rule applies.
    """
    if not alg.uses_opt:
        raise ValueError(f"{alg.value} is not defined by optimisations")
    rules = alg.table.opt

    def hook(s1, s2):
        return rewrite_to_fixpoint(rules, app(S, s1, s2))

    return _Run(alg.table, _name(x), opt_hook=hook).rec(t, ())


def rewrite_to_fixpoint(rules: Sequence, t: Term) -> Term:
    """Leftmost-innermost normalization with the non-trivial Opt rules.

    Terminates: every rewrite removes one ``S``.
    """
    if not isinstance(t, App):
        return t
    t = App(rewrite_to_fixpoint(rules, t.fun), rewrite_to_fixpoint(rules, t.arg))
    s_args = _args(t, Combinator.S, 2)
    if s_args is None:
        return t
    label, out = opt_step(rules, *s_args)
    if label == OPT_FALLBACK:
        return t
    return rewrite_to_fixpoint(rules, out)


# ----------------------------------------------------------------------------
# Normality: forbidden "combinator applied to too many arguments" patterns.

_T_NORMAL_CAPS = {Combinator.K: 1, Combinator.I: 0, Combinator.B: 2, Combinator.B1: 3}
_S_NORMAL_CAPS = {Combinator.K: 1, Combinator.I: 0}
_TSTAR_NORMAL_CAPS = {Combinator.K: 1, Combinator.I: 0, Combinator.B: 2, Combinator.BSTAR: 3}


def within_arity_caps(t: Term, caps: dict) -> bool:
    """True if no combinator in ``t`` is applied to more arguments than ``caps`` allows."""
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, App):
            head, args = spine(s)
            if isinstance(head, Prim) and len(args) > caps.get(head.comb, len(args)):
                return False
            if isinstance(head, Abs):
                stack.append(head)
            stack.extend(args)
        elif isinstance(s, Abs):
            stack.append(s.body)
    return True


def is_t_normal(t: Term) -> bool:
    """No ``K a b``, ``I a``, ``B a b c`` or ``B' a b c d`` anywhere in ``t``."""
    return within_arity_caps(t, _T_NORMAL_CAPS)


def is_s_normal(t: Term) -> bool:
    return within_arity_caps(t, _S_NORMAL_CAPS)


def is_tstar_normal(t: Term) -> bool:
    return within_arity_caps(t, _TSTAR_NORMAL_CAPS)


NORMALITY_CAPS = {"T": _T_NORMAL_CAPS, "S": _S_NORMAL_CAPS, "T*": _TSTAR_NORMAL_CAPS}
