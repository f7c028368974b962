import math

import pytest

from bracket.abstraction import Algorithm, translate
from bracket.metrics import (Family, GrowthReport, emit_csv, fit_slope,
                             growth_experiment, parse_csv, size, term_family)
from bracket.syntax import parse_cl, parse_lambda
from bracket.terms import App, Var, free_vars, is_beta_normal

A = Algorithm


def test_size_examples():
    # S, S, K, y, K, y, I
    assert size(parse_cl("S (S (K y) (K y)) I")) == 7
    assert size(Var("x")) == 1
    assert size(parse_lambda(r"\x. x")) == 1


def test_size_grows_with_arguments():
    t = parse_cl("f a")
    assert size(App(t, Var("b"))) > size(t)


def test_families():
    assert term_family(Family.FAN_APPLY, 1) == parse_lambda(r"\x1. x1")
    assert term_family(Family.FAN_APPLY, 3) == parse_lambda(r"\x1 x2 x3. x1 x2 x3")
    nested = term_family(Family.NESTED_SHARED, 4)
    assert nested == parse_lambda(r"\x1 x2 x3 x4. x1 x2 x3 x4 (x1 x2 x3 x4)")
    assert is_beta_normal(nested) and free_vars(nested) == frozenset()
    with pytest.raises(ValueError):
        term_family(Family.FAN_APPLY, 0)


def test_fit_slope_recovers_power_law():
    rows = [(n, n, 3 * n ** 2) for n in range(1, 21)]
    assert fit_slope(rows) == pytest.approx(2.0)


@pytest.mark.parametrize("alg", [a for a in Algorithm if a is not A.FAB])
@pytest.mark.parametrize("family", list(Family))
def test_growth_rows(alg, family):
    r = growth_experiment(alg, family, 8)
    assert [n for n, _, _ in r.rows] == list(range(1, 9))
    outs = [o for _, _, o in r.rows]
    assert all(o >= 1 for o in outs)
    assert outs == sorted(outs)


def test_fab_growth_small():
    r = growth_experiment(A.FAB, Family.NESTED_SHARED, 6)
    outs = [o for _, _, o in r.rows]
    assert outs == sorted(outs) and outs[-1] > 10 * outs[2]


def test_t_no_larger_than_abf():
    for family in Family:
        for n in range(1, 21):
            t = term_family(family, n)
            assert size(translate(A.T, t)) <= size(translate(A.ABF, t))


def test_t_nested_slope_pinned():
    r = growth_experiment(A.T, Family.NESTED_SHARED, 40)
    assert r.rows[-1] == (40, 80, 41)
    assert r.fitted_slope == pytest.approx(0.9666, abs=1e-4)


def test_csv_format_and_round_trip():
    r = growth_experiment(A.T, Family.FAN_APPLY, 8)
    text = emit_csv(r)
    lines = text.splitlines()
    assert lines[0] == "n,input_size,output_size"
    assert len(lines) == 10
    assert lines[-1] == f"# slope={r.fitted_slope:.4f}"
    rows, slope = parse_csv(text)
    assert tuple(rows) == r.rows
    assert slope == pytest.approx(r.fitted_slope, abs=5e-5)


def test_one_row_csv():
    r = GrowthReport(A.T, Family.FAN_APPLY, ((1, 1, 1),), math.nan)
    lines = emit_csv(r).splitlines()
    assert lines == ["n,input_size,output_size", "1,1,1", "# slope=nan"]


def test_growth_needs_two_points():
    with pytest.raises(ValueError):
        growth_experiment(A.T, Family.FAN_APPLY, 1)
