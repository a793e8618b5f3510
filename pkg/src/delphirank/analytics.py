"""Response rates, category-shift statistics and concentration measures.

Concentration is measured on the category numerics (1..4), not on the
raw indicator: the question is how evenly the categories themselves are
spread before and after the consultation. The Gini estimator is the
discrete form

    G = sum_i (2i - n - 1) * x_i / (n * sum(x)),  x sorted ascending

which is bounded by (n - 1) / n and needs no small-sample correction
because before/after are compared on the same n.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .delphi import NotFinalized, Panel, PanelState, _reached
from .errors import DomainError
from .ranking import Field, Scope


class AnalyticsError(DomainError):
    code = "ANALYTICS_ERROR"


class AllZeroValues(AnalyticsError):
    code = "ALL_ZERO"


class KeyMismatch(AnalyticsError):
    code = "KEY_MISMATCH"


@dataclass(frozen=True)
class ResponseRateRow:
    """One field-and-round row of a response-rate table.

    For round 2 the sample is the set of round-1 respondents, so its
    sample_n always equals the round-1 answers.
    """

    field: Field
    round_index: int
    sample_n: int
    answers: int
    rate_percent: float
    provisional: bool = False


@dataclass(frozen=True)
class ChangeStats:
    """Mean and population SD of per-publisher category shifts (final - initial)."""

    scope: Scope
    mean: float
    sd: float


@dataclass(frozen=True)
class ConcentrationResult:
    gini: float
    lorenz: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class EqualizationReport:
    before: ConcentrationResult
    after: ConcentrationResult
    delta: float
    change_stats: dict[Scope, ChangeStats]


def _rate(answers: int, sample_n: int) -> float:
    if sample_n <= 0:
        return 0.0
    return round(100.0 * answers / sample_n, 2)


def response_rates(panel: Panel) -> list[ResponseRateRow]:
    """Per-round response rates; rows for open rounds are provisional."""
    rows = []
    if _reached(panel.state, PanelState.ROUND1_OPEN):
        answers1 = len(panel.responses[1])
        rows.append(
            ResponseRateRow(
                field=panel.field,
                round_index=1,
                sample_n=len(panel.experts),
                answers=answers1,
                rate_percent=_rate(answers1, len(panel.experts)),
                provisional=panel.state is PanelState.ROUND1_OPEN,
            )
        )
        if _reached(panel.state, PanelState.ROUND2_OPEN):
            answers2 = len(panel.responses[2])
            rows.append(
                ResponseRateRow(
                    field=panel.field,
                    round_index=2,
                    sample_n=answers1,
                    answers=answers2,
                    rate_percent=_rate(answers2, answers1),
                    provisional=panel.state is PanelState.ROUND2_OPEN,
                )
            )
    return rows


TOTAL_FIELD = Field(id="total", name="TOTAL")


def total_response_rates(rows: Iterable[ResponseRateRow]) -> list[ResponseRateRow]:
    """Sum per-field rows into one TOTAL row per round."""
    by_round: dict[int, list[ResponseRateRow]] = {}
    for row in rows:
        by_round.setdefault(row.round_index, []).append(row)
    totals = []
    for round_index in sorted(by_round):
        group = by_round[round_index]
        sample_n = sum(r.sample_n for r in group)
        answers = sum(r.answers for r in group)
        totals.append(
            ResponseRateRow(
                field=TOTAL_FIELD,
                round_index=round_index,
                sample_n=sample_n,
                answers=answers,
                rate_percent=_rate(answers, sample_n),
                provisional=any(r.provisional for r in group),
            )
        )
    return totals


def change_stats(
    initial: Mapping[str, float], final: Mapping[str, float], scope: Scope
) -> ChangeStats:
    """Descriptive statistics of final-minus-initial category numerics."""
    if set(initial) != set(final):
        missing = set(initial) ^ set(final)
        raise KeyMismatch(f"initial/final publisher sets differ: {sorted(missing)}")
    if not initial:
        raise KeyMismatch("no publishers to compare")
    deltas = [final[p] - initial[p] for p in sorted(initial)]
    return ChangeStats(scope=scope, mean=statistics.fmean(deltas), sd=statistics.pstdev(deltas))


def _checked(values: Sequence[float]) -> np.ndarray:
    xs = np.asarray(values, dtype=np.float64)
    if xs.ndim != 1:
        raise AnalyticsError("values must be one-dimensional")
    if xs.size and np.any(xs < 0):
        raise AnalyticsError("values must be non-negative")
    if xs.size == 0 or not np.any(xs > 0):
        raise AllZeroValues("need at least one strictly positive value")
    return xs


def gini(values: Sequence[float]) -> float:
    """Discrete Gini index of non-negative values, in [0, (n-1)/n]."""
    xs = np.sort(_checked(values))
    n = xs.size
    weights = 2.0 * np.arange(1, n + 1) - n - 1
    return float(np.sum(weights * xs) / (n * np.sum(xs)))


def lorenz(values: Sequence[float]) -> list[tuple[float, float]]:
    """Lorenz points from (0,0) to (1,1): cumulative population vs value share."""
    xs = np.sort(_checked(values))
    n = xs.size
    cum = np.cumsum(xs)
    total = cum[-1]
    points = [(0.0, 0.0)]
    for k in range(1, n + 1):
        points.append((k / n, float(cum[k - 1] / total)))
    points[-1] = (1.0, 1.0)
    return points


def concentration(values: Sequence[float]) -> ConcentrationResult:
    return ConcentrationResult(gini=gini(values), lorenz=tuple(lorenz(values)))


def equalization_report(panel: Panel) -> EqualizationReport:
    """Concentration before vs after finalization, plus per-scope shift stats."""
    if panel.state is not PanelState.FINALIZED or panel.finals is None:
        raise NotFinalized(f"panel {panel.id!r} is not finalized (state {panel.state.value!r})")
    initial_values = [
        entry.category.numeric for lst in panel.lists() for entry in lst.entries
    ]
    final_values = [fc.final_numeric for fc in panel.finals]
    before = concentration(initial_values)
    after = concentration(final_values)
    stats = {}
    for lst in panel.lists():
        initial_map = {e.publisher: float(e.category.numeric) for e in lst.entries}
        final_map = {
            fc.publisher: float(fc.final_numeric)
            for fc in panel.finals
            if fc.scope is lst.scope
        }
        stats[lst.scope] = change_stats(initial_map, final_map, lst.scope)
    return EqualizationReport(
        before=before,
        after=after,
        delta=before.gini - after.gini,
        change_stats=stats,
    )
