"""Differential-equivalence laboratory.

Random term generators, a βη-equality oracle, a syntactic differential
harness over pairs of algorithms, and a greedy counterexample shrinker.
"""

from __future__ import annotations

import enum
import hashlib
import random
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .abstraction import Algorithm, OutputTooLarge, abstract, translate
from .syntax import print_term
from .terms import (DEFAULT_FUEL, Abs, App, Combinator, FuelExhausted, Prim,
                    Term, Var, alpha_equal, app, eta_normalize,
                    fast_normalize, is_beta_normal, unfold)

ABS_PROB = 0.35


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    max_size: int = 40
    free_var_pool: tuple = ("x", "y", "z")
    binder_pool: tuple = ("x", "y", "z", "a", "b", "c")
    abs_prob: float = ABS_PROB
    outer_lambda: bool = False

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be positive")
        object.__setattr__(self, "free_var_pool", tuple(self.free_var_pool))


def derive_seed(master: int, index: int) -> int:
    """Per-trial seed: a hash of (master seed, trial index)."""
    digest = hashlib.blake2b(f"{master}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def trial_config(cfg: GeneratorConfig, index: int) -> GeneratorConfig:
    return replace(cfg, seed=derive_seed(cfg.seed, index))


def _split(rng: random.Random, total: int, parts: int) -> list[int]:
    """Random composition of ``total`` into ``parts`` positive integers."""
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0, *cuts, total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


class _LambdaGen:
    def __init__(self, cfg: GeneratorConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)

    def binder(self) -> str:
        return self.rng.choice(self.cfg.binder_pool)

    def vars_in(self, scope) -> list[str]:
        return sorted(set(self.cfg.free_var_pool) | scope)

    def target(self) -> int:
        return self.rng.randint(1, self.cfg.max_size)

    def top(self, body_gen) -> Term:
        n = self.target()
        if self.cfg.outer_lambda:
            v = self.binder()
            return Abs(v, body_gen(n, frozenset((v,))))
        return body_gen(n, frozenset())

    def any_term(self, n: int, scope: frozenset) -> Term:
        rng = self.rng
        names = self.vars_in(scope)
        if rng.random() < self.cfg.abs_prob or not names:
            v = self.binder()
            return Abs(v, self.any_term(n, scope | {v}))
        if n == 1:
            return Var(rng.choice(names))
        k = rng.randint(1, n - 1)
        return App(self.any_term(k, scope), self.any_term(n - k, scope))

    def normal(self, n: int, scope: frozenset) -> Term:
        # nf ::= λx. nf | v nf1 ... nfk
        rng = self.rng
        names = self.vars_in(scope)
        if rng.random() < self.cfg.abs_prob or not names:
            v = self.binder()
            return Abs(v, self.normal(n, scope | {v}))
        head = Var(rng.choice(names))
        if n == 1:
            return head
        k = rng.randint(1, n - 1)
        return app(head, *(self.normal(m, scope) for m in _split(rng, n - 1, k)))


def gen_lambda(cfg: GeneratorConfig) -> Term:
    """Arbitrary lambda term (redexes allowed) with at most ``max_size`` atoms."""
    g = _LambdaGen(cfg)
    return g.top(g.any_term)


def gen_beta_normal(cfg: GeneratorConfig) -> Term:
    """β-normal lambda term with at most ``max_size`` atoms."""
    g = _LambdaGen(cfg)
    return g.top(g.normal)


def gen_cl(cfg: GeneratorConfig, basis: Iterable[Combinator] = tuple(Combinator),
           caps: Optional[dict] = None) -> Term:
    """Random CL term over ``basis`` and the free-variable pool.

    ``caps`` bounds how many arguments each combinator may receive; with the
    T-normal caps every output is T-normal.
    """
    rng = random.Random(cfg.seed)
    basis = sorted(basis, key=lambda c: c.value)
    caps = caps or {}
    pool = list(cfg.free_var_pool)

    def atom(min_args: int) -> tuple:
        while True:
            if pool and (not basis or rng.random() < 0.5):
                return Var(rng.choice(pool)), None
            c = rng.choice(basis)
            cap = caps.get(c)
            if cap is None or cap >= min_args:
                return Prim(c), cap

    def gen(n: int) -> Term:
        if n == 1:
            return atom(0)[0]
        head, cap = atom(1)
        top = n - 1 if cap is None else min(cap, n - 1)
        k = rng.randint(1, top)
        return app(head, *(gen(m) for m in _split(rng, n - 1, k)))

    return gen(rng.randint(1, cfg.max_size))


GENERATORS = {
    "beta-normal": gen_beta_normal,
    "lambda": gen_lambda,
    "cl": gen_cl,
}


def generate(cfg: GeneratorConfig, count: int, kind: str = "beta-normal") -> Iterator[Term]:
    """``count`` terms; term ``i`` depends only on ``cfg`` and ``i``."""
    gen = GENERATORS[kind]
    for i in range(count):
        yield gen(trial_config(cfg, i))


# ----------------------------------------------------------------------------
# Semantic oracle

class Semantic(enum.Enum):
    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"
    UNKNOWN = "Unknown"


def canonical_form(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """βη-normal form of ``unfold(t)`` with depth-named binders."""
    return eta_normalize(fast_normalize(t, fuel))


def semantically_equal(t1: Term, t2: Term, fuel: int = DEFAULT_FUEL) -> Semantic:
    """βη-equality of the unfolded terms; UNKNOWN if either side runs out of fuel."""
    try:
        n1 = canonical_form(t1, fuel)
        n2 = canonical_form(t2, fuel)
    except FuelExhausted:
        return Semantic.UNKNOWN
    return Semantic.EQUAL if alpha_equal(n1, n2) else Semantic.NOT_EQUAL


# ----------------------------------------------------------------------------
# Verdicts

@dataclass(frozen=True)
class Equal:
    trials: int

    def to_text(self) -> str:
        return f"verdict: Equal\ntrials: {self.trials}\n"


@dataclass(frozen=True)
class Distinguished:
    witness: Term
    out_a: Term
    out_b: Term
    trial: int
    variable: Optional[str] = None

    def to_text(self) -> str:
        lines = ["verdict: Distinguished", f"trial: {self.trial}"]
        if self.variable is not None:
            lines.append(f"variable: {self.variable}")
        lines += [f"witness: {print_term(self.witness)}",
                  f"out_a: {print_term(self.out_a)}",
                  f"out_b: {print_term(self.out_b)}"]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Unknown:
    reason: str

    def to_text(self) -> str:
        return f"verdict: Unknown\nreason: {self.reason}\n"


Verdict = Union[Equal, Distinguished, Unknown]


def parse_verdict(text: str) -> dict:
    """Inverse of ``to_text`` as a plain ``key -> value`` mapping."""
    out = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition(": ")
            out[key.strip()] = value
    return out


def differential(alg_a: Algorithm, alg_b: Algorithm,
                 source: Union[Sequence[Term], GeneratorConfig],
                 trials: int = 1000, kind: str = "beta-normal",
                 variable: str = "x") -> Verdict:
    """Search for a term on which two algorithms give syntactically different output.

    ``source`` is either a corpus of terms or a generator config. For the
    ``"cl"`` kind the algorithms are compared as abstractions of
    ``variable`` rather than as translations.
    """
    if isinstance(source, GeneratorConfig):
        terms: Iterable[Term] = generate(source, trials, kind)
    else:
        terms = list(source)
        trials = len(terms)
    for i, t in enumerate(terms):
        if kind == "cl":
            a, b = abstract(alg_a, variable, t), abstract(alg_b, variable, t)
        else:
            a, b = translate(alg_a, t), translate(alg_b, t)
        if a != b:
            return Distinguished(t, a, b, i, variable if kind == "cl" else None)
    return Equal(trials)


def distinguishes(alg_a: Algorithm, alg_b: Algorithm,
                  require_beta_normal: bool = False) -> Callable[[Term], bool]:
    def pred(t: Term) -> bool:
        if require_beta_normal and not is_beta_normal(t):
            return False
        return translate(alg_a, t) != translate(alg_b, t)
    return pred


# ----------------------------------------------------------------------------
# Shrinking

def _measure(t: Term) -> tuple:
    atoms = nodes = 0
    stack = [t]
    while stack:
        s = stack.pop()
        nodes += 1
        if isinstance(s, App):
            stack += (s.fun, s.arg)
        elif isinstance(s, Abs):
            stack.append(s.body)
        else:
            atoms += 1
    return atoms, nodes


def _fresh_var(t: Term) -> Var:
    used = {s.name for s in _all_vars(t)} | {s.var for s in _all_abs(t)}
    n = 0
    while f"w{n}" in used:
        n += 1
    return Var(f"w{n}")


def _all_vars(t: Term):
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            yield s
        elif isinstance(s, App):
            stack += (s.fun, s.arg)
        elif isinstance(s, Abs):
            stack.append(s.body)


def _all_abs(t: Term):
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Abs):
            yield s
            stack.append(s.body)
        elif isinstance(s, App):
            stack += (s.fun, s.arg)


def _candidates(t: Term, fresh: Var) -> Iterator[Term]:
    """One-step shrinks of ``t``: at the root first, then inside subterms."""
    match t:
        case App(f, a):
            yield f                      # drop the argument
            yield a
        case Abs(_, body):
            yield body                   # unwrap the abstraction
    if not isinstance(t, Var):
        yield fresh
    match t:
        case App(f, a):
            for f2 in _candidates(f, fresh):
                yield App(f2, a)
            for a2 in _candidates(a, fresh):
                yield App(f, a2)
        case Abs(v, body):
            for b2 in _candidates(body, fresh):
                yield Abs(v, b2)


def shrink(witness: Term, predicate: Callable[[Term], bool]) -> Term:
    """Greedy local minimum of ``witness`` that still satisfies ``predicate``.

    Candidates must strictly decrease (atoms, nodes), so this terminates.
    """
    current = witness
    improved = True
    while improved:
        improved = False
        size = _measure(current)
        fresh = _fresh_var(current)
        for cand in _candidates(current, fresh):
            if _measure(cand) < size and predicate(cand):
                current = cand
                improved = True
                break
    return current


# ----------------------------------------------------------------------------
# Correctness of a translation

OUTPUT_LIMIT = 10 ** 9  # atoms, counted as a tree; outputs are built as DAGs


@dataclass(frozen=True)
class CorrectnessReport:
    """Outcome of checking one translation.

    ``fv_ok`` is None when the translation was abandoned for exceeding the
    output budget; the semantic verdict is then UNKNOWN.
    """

    output: Optional[Term]
    fv_ok: Optional[bool]
    semantic: Semantic
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.fv_ok is not False and self.semantic is not Semantic.NOT_EQUAL


def _semantic_with_reason(a: Term, b: Term, fuel: int) -> tuple:
    verdict = semantically_equal(a, b, fuel)
    return verdict, (f"fuel {fuel} exhausted" if verdict is Semantic.UNKNOWN else "")


def check_correctness(alg: Algorithm, t: Term, fuel: int = DEFAULT_FUEL,
                      output_limit: Optional[int] = OUTPUT_LIMIT) -> CorrectnessReport:
    """FV(⟦t⟧) = FV(t) and ⟦t⟧ =βη t."""
    try:
        out = translate(alg, t, max_size=output_limit)
    except OutputTooLarge as exc:
        return CorrectnessReport(None, None, Semantic.UNKNOWN, str(exc))
    return CorrectnessReport(out, out.fv == t.fv, *_semantic_with_reason(out, t, fuel))


def check_abstraction(alg: Algorithm, x: str, t: Term,
                      fuel: int = DEFAULT_FUEL) -> CorrectnessReport:
    """FV([x]t) = FV(t) - {x} and [x]t =βη λx. t."""
    out = abstract(alg, x, t)
    return CorrectnessReport(out, out.fv == t.fv - {x},
                             *_semantic_with_reason(out, Abs(x, unfold(t)), fuel))


@dataclass
class CheckSummary:
    algorithm: Algorithm
    trials: int = 0
    fv_pass: int = 0
    fv_fail: int = 0
    equal: int = 0
    not_equal: int = 0
    unknown: int = 0
    too_large: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.fv_fail == 0 and self.not_equal == 0

    @property
    def unknown_rate(self) -> float:
        return self.unknown / self.trials if self.trials else 0.0

    def add(self, t: Term, rep: CorrectnessReport):
        self.trials += 1
        if rep.fv_ok is None:
            self.too_large += 1
        elif rep.fv_ok:
            self.fv_pass += 1
        else:
            self.fv_fail += 1
        if rep.semantic is Semantic.EQUAL:
            self.equal += 1
        elif rep.semantic is Semantic.UNKNOWN:
            self.unknown += 1
        else:
            self.not_equal += 1
        if not rep.ok:
            self.failures.append(t)

    def to_text(self) -> str:
        return (f"algorithm: {self.algorithm.value}\n"
                f"trials: {self.trials}\n"
                f"fv_pass: {self.fv_pass}\n"
                f"fv_fail: {self.fv_fail}\n"
                f"fv_skipped: {self.too_large}\n"
                f"equal: {self.equal}\n"
                f"not_equal: {self.not_equal}\n"
                f"unknown: {self.unknown} ({self.unknown_rate:.1%}; "
                f"{self.too_large} over the output limit)\n")


def run_check(alg: Algorithm, cfg: GeneratorConfig, trials: int,
              fuel: int = DEFAULT_FUEL,
              output_limit: Optional[int] = OUTPUT_LIMIT) -> CheckSummary:
    summary = CheckSummary(alg)
    for t in generate(cfg, trials, "lambda"):
        summary.add(t, check_correctness(alg, t, fuel, output_limit))
    return summary
