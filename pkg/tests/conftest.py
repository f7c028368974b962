from hypothesis import strategies as st

from bracket.terms import Abs, App, Combinator, Prim, Var

NAMES = ("x", "y", "z", "a", "b")

variables = st.sampled_from(NAMES).map(Var)
combinators = st.sampled_from(list(Combinator)).map(Prim)


def _apps(children):
    return st.builds(App, children, children)


cl_terms = st.recursive(variables | combinators, _apps, max_leaves=25)

lambda_terms = st.recursive(
    variables | combinators,
    lambda children: _apps(children) | st.builds(Abs, st.sampled_from(NAMES), children),
    max_leaves=25,
)

pure_lambda_terms = st.recursive(
    variables,
    lambda children: _apps(children) | st.builds(Abs, st.sampled_from(NAMES), children),
    max_leaves=20,
)


def golden_cases():
    """``(alg, var or None, source, expected)`` for each golden-corpus line."""
    from importlib import resources

    from bracket.syntax import read_corpus

    text = (resources.files("bracket") / "corpus" / "golden.txt").read_text(encoding="utf-8")
    cases = []
    for line in read_corpus(text):
        alg, rest = (s.strip() for s in line.split("::", 1))
        source, expected = (s.strip() for s in rest.split("=>", 1))
        var = None
        if source.startswith("["):
            var, source = source[1:].split("]", 1)
            source = source.strip()
        cases.append((alg, var, source, expected))
    return cases


def run_golden(alg, var, source):
    from bracket.abstraction import Algorithm, abstract, translate
    from bracket.syntax import parse_cl, parse_lambda, print_cl

    a = Algorithm.from_name(alg)
    if var is None:
        return print_cl(translate(a, parse_lambda(source)))
    return print_cl(abstract(a, var, parse_cl(source)))


# one (criterion, passed, detail) entry per acceptance check, in run order
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
