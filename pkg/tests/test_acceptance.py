"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import time
from contextlib import contextmanager

import pytest

from bracket.abstraction import (NORMALITY_CAPS, Algorithm, abstract,
                                 abstract_rewrite_mode, is_t_normal, translate)
from bracket.lab import (Distinguished, Equal, GeneratorConfig, differential,
                         distinguishes, gen_cl, generate, run_check, shrink,
                         trial_config)
from bracket.metrics import Family, growth_experiment
from bracket.syntax import parse_cl, parse_lambda, print_cl
from bracket.terms import K, App, Var, free_vars, spine

from conftest import ACCEPTANCE

A = Algorithm
TRIALS = 10_000


@contextmanager
def criterion(name):
    """Record the outcome of the enclosed block as one acceptance line."""
    start = time.perf_counter()
    info = {"detail": ""}
    try:
        yield info
    except BaseException as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        ACCEPTANCE.append((name, False, f"{msg} [{time.perf_counter() - start:.1f}s]"))
        print(f"FAIL  {name}")
        raise
    ACCEPTANCE.append((name, True, f"{info['detail']} [{time.perf_counter() - start:.1f}s]"))
    print(f"PASS  {name}")


def tr(alg, src):
    return print_cl(translate(alg, parse_lambda(src)))


def ab(alg, x, src):
    return print_cl(abstract(alg, x, parse_cl(src)))


def test_criterion_1_worked_examples():
    with criterion("1. worked examples reproduce byte-identically") as info:
        start = time.perf_counter()
        got = {
            "fab [x] y y x": ab(A.FAB, "x", "y y x"),
            "abf' [x] y y x": ab(A.ABF_PRIME, "x", "y y x"),
            "abcf' [x] S (K y) (K y) x": ab(A.ABCF_PRIME, "x", "S (K y) (K y) x"),
            "S counterexample": tr(A.SCHONFINKEL, r"\y. (\z. x) y y"),
            "S' counterexample": tr(A.SCHONFINKEL_PRIME, r"\y. (\z. x) y y"),
            "S on K S x (K S x)": ab(A.SCHONFINKEL, "x", "K S x (K S x)"),
            "S' on K S x (K S x)": ab(A.SCHONFINKEL_PRIME, "x", "K S x (K S x)"),
            "S' eta example": tr(A.SCHONFINKEL_PRIME, r"\y. z ((\x. x) y)"),
            "S eta example": tr(A.SCHONFINKEL, r"\y. z ((\x. x) y)"),
            "T''": tr(A.T_DOUBLE_PRIME, r"\x y z. y (x z) x"),
            "T*": tr(A.TSTAR, r"\x y. x (x (x y)) x"),
            "T*''": tr(A.TSTAR_DOUBLE_PRIME, r"\x y. x (x (x y)) x"),
            "S K": tr(A.SCHONFINKEL, r"\x y. x"),
            "S S": tr(A.SCHONFINKEL, r"\x y z. x z (y z)"),
            "S' K": tr(A.SCHONFINKEL_PRIME, r"\x y. x"),
            "S' S": tr(A.SCHONFINKEL_PRIME, r"\x y z. x z (y z)"),
        }
        fab_k = translate(A.FAB, parse_lambda(r"\x y. x"))
        elapsed = time.perf_counter() - start
        expected = {
            "fab [x] y y x": "S (S (K y) (K y)) I",
            "abf' [x] y y x": "S (K (y y)) I",
            "abcf' [x] S (K y) (K y) x": "S (K y) (K y)",
            "S counterexample": "S (K x) I",
            "S' counterexample": "x",
            "S on K S x (K S x)": "S (K S) (K S)",
            "S' on K S x (K S x)": "K (S S)",
            "S' eta example": "z",
            "S eta example": "B z I",
            "T''": "S' (C' C) (C B) I",
            "T*": "S (S C' (S B I)) I",
            "T*''": "S' C (S (S B* I) I) I",
            "S K": "K",
            "S S": "S",
            "S' K": "K",
            "S' S": "S",
        }
        wrong = {k: got[k] for k in expected if got[k] != expected[k]}
        assert not wrong, f"mismatches: {wrong}"
        assert fab_k != K
        assert elapsed < 1.0, f"took {elapsed:.2f}s"
        info["detail"] = f"{len(expected) + 1} examples in {elapsed * 1000:.0f} ms"


def test_criterion_1_t_prime_display():
    # The expected T' output is S (B C (C C')) I. Opt rule 8
    # (S (B u s) t = S' u s t) still matches that term, and the table
    # yields S' C (C C') I, which is also what T gives. The check is kept
    # against the expected string and is expected to fail.
    with criterion("1. T' output on \\x y z. y (x z) x matches the expected display") as info:
        got = tr(A.T_PRIME, r"\x y z. y (x z) x")
        assert got == "S (B C (C C')) I", f"got {got}"
        info["detail"] = got


def _agree(alg_a, alg_b, kind, trials=TRIALS, seed=0, max_size=60):
    v = differential(alg_a, alg_b, GeneratorConfig(seed=seed, max_size=max_size), trials, kind)
    assert isinstance(v, Equal), v.to_text()
    return v.trials


def test_criterion_2_t_equals_t_prime_on_normal_forms():
    with criterion("2. T = T' on 10,000 beta-normal terms") as info:
        start = time.perf_counter()
        n = _agree(A.T, A.T_PRIME, "beta-normal")
        elapsed = time.perf_counter() - start
        assert elapsed < 60, f"took {elapsed:.1f}s"
        info["detail"] = f"{n} trials, 0 mismatches"


def test_criterion_3_eta_free_turner():
    with criterion("3. T-eta = T'-eta on 10,000 lambda terms and 10,000 CL terms") as info:
        n1 = _agree(A.T_NOETA, A.T_PRIME_NOETA, "lambda")
        n2 = _agree(A.T_NOETA, A.T_PRIME_NOETA, "cl")
        info["detail"] = f"{n1} translations, {n2} abstractions, 0 mismatches"


def test_criterion_4_schonfinkel_and_tstar():
    with criterion("4. S = S' and T* = T*' on normal forms, S-eta = S'-eta on all terms") as info:
        n1 = _agree(A.SCHONFINKEL, A.SCHONFINKEL_PRIME, "beta-normal")
        n2 = _agree(A.TSTAR, A.TSTAR_PRIME, "beta-normal")
        n3 = _agree(A.SCHONFINKEL_NOETA, A.SCHONFINKEL_PRIME_NOETA, "lambda")
        info["detail"] = f"{n1} + {n2} + {n3} trials, 0 mismatches"


@pytest.mark.parametrize("a,b", [(A.T_PRIME, A.T_DOUBLE_PRIME),
                                 (A.TSTAR, A.TSTAR_DOUBLE_PRIME)])
def test_criterion_5_non_equivalence(a, b):
    with criterion(f"5. {a.value} vs {b.value} distinguished and shrunk to <= 10 atoms") as info:
        v = differential(a, b, GeneratorConfig(seed=0, max_size=60), TRIALS)
        assert isinstance(v, Distinguished), "no witness in 10,000 trials"
        small = shrink(v.witness, distinguishes(a, b, require_beta_normal=True))
        assert distinguishes(a, b, True)(small)
        assert small.size <= 10, f"shrunk witness has {small.size} atoms"
        info["detail"] = (f"trial {v.trial}, witness {print_cl(small)} "
                          f"({small.size} atoms)")


def _cl_terms(n, caps=None, pool=("x", "y", "z")):
    base = GeneratorConfig(seed=0, max_size=30, free_var_pool=pool)
    return [gen_cl(trial_config(base, i), caps=caps) for i in range(n)]


def test_criterion_6_lemma_suites():
    with criterion("6. T-normality lemmas on 5,000 random terms each") as info:
        violations = []
        t_normal = _cl_terms(5000, caps=NORMALITY_CAPS["T"])
        for t in t_normal:
            assert is_t_normal(t)
            out = abstract(A.T, "x", t)
            if not is_t_normal(out):
                violations.append(("preservation", t))
            if out != abstract(A.T_PRIME, "x", t):
                violations.append(("agreement", t))
            head, args = spine(out)
            if head == K and len(args) == 1 and not (args[0] == t and "x" not in free_vars(t)):
                violations.append(("inversion K", t))
            if out == parse_cl("I") and t != Var("x"):
                violations.append(("inversion I", t))
            if head == parse_cl("B") and len(args) == 2:
                if not (isinstance(t, App) and t.fun == args[0] and "x" not in free_vars(args[0])
                        and args[1] == abstract(A.T, "x", t.arg)):
                    violations.append(("inversion B", t))
            if head == parse_cl("B'") and len(args) == 3:
                if not (isinstance(t, App) and t.fun == App(args[0], args[1])
                        and "x" not in free_vars(t.fun)
                        and args[2] == abstract(A.T, "x", t.arg)):
                    violations.append(("inversion B'", t))
        for t in _cl_terms(5000, pool=("y", "z")):
            if abstract(A.T_PRIME, "x", t) != App(K, t):
                violations.append(("K lemma", t))
            if abstract(A.T_PRIME, "x", App(t, Var("x"))) != t:
                violations.append(("t x lemma", t))
        for t in generate(GeneratorConfig(seed=0, max_size=60), 5000):
            if not is_t_normal(translate(A.T, t)):
                violations.append(("translation is T-normal", t))
        assert not violations, f"{len(violations)} violations, first {violations[0]}"
        info["detail"] = "0 violations"


@pytest.mark.parametrize("alg", list(Algorithm), ids=lambda a: a.value)
def test_criterion_7_correctness_oracle(alg):
    with criterion(f"7. correctness oracle for {alg.value}") as info:
        s = run_check(alg, GeneratorConfig(seed=0, max_size=25), 500, fuel=100_000)
        assert s.fv_fail == 0, f"{s.fv_fail} FV failures"
        assert s.not_equal == 0, f"{s.not_equal} NotEqual"
        assert s.unknown_rate < 0.05, f"unknown rate {s.unknown_rate:.1%}"
        info["detail"] = (f"FV {s.fv_pass}/{s.trials - s.too_large} checked, "
                          f"NotEqual 0, Unknown {s.unknown} ({s.unknown_rate:.1%})")


def test_criterion_8_rewrite_mode():
    with criterion("8. rewrite-mode reading differs from root-only Opt") as info:
        t = parse_cl("S (K a) (K a)")
        target = parse_cl("K (S (K a) (K a))")
        rewritten = abstract_rewrite_mode(A.ABF_PRIME, "x", t)
        assert abstract(A.ABF_PRIME, "x", t) == target
        assert rewritten != target
        info["detail"] = f"rewrite mode gives {print_cl(rewritten)}"


def test_criterion_9_growth():
    with criterion("9. NestedShared growth: slope(T) <= 2.3 < slope(abf), T <= abf pointwise") as info:
        start = time.perf_counter()
        t = growth_experiment(A.T, Family.NESTED_SHARED, 40)
        abf = growth_experiment(A.ABF, Family.NESTED_SHARED, 40)
        elapsed = time.perf_counter() - start
        assert t.fitted_slope <= 2.3
        assert t.fitted_slope < abf.fitted_slope
        assert all(rt[2] <= ra[2] for rt, ra in zip(t.rows, abf.rows))
        assert elapsed < 30, f"took {elapsed:.1f}s"
        info["detail"] = f"slope T {t.fitted_slope:.4f}, abf {abf.fitted_slope:.4f}"
