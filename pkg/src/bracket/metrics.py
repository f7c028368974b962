"""Translation-size measurement and growth experiments."""

from __future__ import annotations

import enum
import math
import statistics
from dataclasses import dataclass

from .abstraction import Algorithm, translate
from .terms import Term, Var, app, lam


def size(t: Term) -> int:
    """Number of atom occurrences (variables and combinators); binders are free."""
    return t.size


class Family(enum.Enum):
    FAN_APPLY = "fan"
    NESTED_SHARED = "nested"


def _xs(n: int) -> list[Var]:
    return [Var(f"x{i}") for i in range(1, n + 1)]


def term_family(family: Family, n: int) -> Term:
    """``fan``: λx1..xn. x1 x2 .. xn;  ``nested``: λx1..xn. (x1 .. xn) (x1 .. xn)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    xs = _xs(n)
    binders = " ".join(x.name for x in xs)
    body = app(*xs)
    if family is Family.NESTED_SHARED:
        body = app(body, body)
    return lam(binders, body)


@dataclass(frozen=True)
class GrowthReport:
    algorithm: Algorithm
    family: Family
    rows: tuple  # (n, input_size, output_size)
    fitted_slope: float


def fit_slope(rows) -> float:
    """Least-squares slope of log(output) on log(n) over the upper half of n."""
    upper = rows[len(rows) // 2:]
    xs = [math.log(n) for n, _, _ in upper]
    ys = [math.log(out) for _, _, out in upper]
    return statistics.linear_regression(xs, ys).slope


def growth_experiment(alg: Algorithm, family: Family, n_max: int) -> GrowthReport:
    if n_max < 2:
        raise ValueError("need n_max >= 2 to fit a slope")
    rows = []
    for n in range(1, n_max + 1):
        t = term_family(family, n)
        rows.append((n, size(t), size(translate(alg, t))))
    return GrowthReport(alg, family, tuple(rows), fit_slope(rows))


def emit_csv(report: GrowthReport) -> str:
    lines = ["n,input_size,output_size"]
    lines += [f"{n},{i},{o}" for n, i, o in report.rows]
    lines.append(f"# slope={report.fitted_slope:.4f}")
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> tuple[list, float]:
    """Rows and slope back out of :func:`emit_csv` output."""
    rows, slope = [], math.nan
    for line in text.splitlines():
        if line.startswith("# slope="):
            slope = float(line[len("# slope="):])
        elif line and line[0].isdigit():
            n, i, o = line.split(",")
            rows.append((int(n), int(i), int(o)))
    return rows, slope
