"""Shared fixture builders for the test suite."""

from __future__ import annotations

from delphirank.delphi import ExpertResponse, Panel, ResponseItem
from delphirank.ranking import Field, RankedList, Scope, import_ranking

DOMESTIC_ROWS = [
    ("Alpha Press", 2.0),
    ("Beta Editorial", 1.2),
    ("Gamma Books", 1.0),
    ("Delta House", 0.8),
]

FOREIGN_ROWS = [
    ("Cambridge Scholars", 2.0),
    ("Springer", 1.2),
    ("Routledge", 1.0),
    ("Brill", 0.8),
]

HISTORY = Field.from_name("History")


def ranked(rows, scope: Scope, field: Field = HISTORY) -> RankedList:
    return import_ranking(rows, field, scope)


def make_panel(
    n_experts: int = 13,
    panel_id: str = "panel-history",
    field: Field = HISTORY,
    domestic_rows=None,
    foreign_rows=None,
) -> Panel:
    """Panel whose foreign list puts Springer in quartile 3 (numeric 2)."""
    return Panel(
        id=panel_id,
        field=field,
        domestic=ranked(domestic_rows or DOMESTIC_ROWS, Scope.DOMESTIC, field),
        foreign=ranked(foreign_rows or FOREIGN_ROWS, Scope.FOREIGN, field),
        experts=tuple(f"expert-{i:02d}" for i in range(n_experts)),
    )


def rescore(expert_id: str, round_index: int, publisher: str, score: int) -> ExpertResponse:
    return ExpertResponse(
        expert_id=expert_id,
        round_index=round_index,
        items=(ResponseItem(publisher=publisher, known=True, disagree=True, new_score=score),),
    )


def submit_scores(panel: Panel, round_index: int, publisher: str, scores) -> None:
    """One single-item rescore per expert, in expert order."""
    for i, score in enumerate(scores):
        panel.record_response(rescore(f"expert-{i:02d}", round_index, publisher, score))


SPRINGER_ROUND1 = (4, 3, 2, 2, 2, 2, 2, 2, 3, 4, 3, 3, 3)
SPRINGER_ROUND2 = (4, 4, 3, 3, 3, 3, 3, 2, 2)


def run_springer_panel() -> Panel:
    """Drive the worked two-round example through the engine."""
    panel = make_panel()
    panel.open_round(1)
    submit_scores(panel, 1, "Springer", SPRINGER_ROUND1)
    panel.close_round(1)
    panel.open_round(2)
    submit_scores(panel, 2, "Springer", SPRINGER_ROUND2)
    panel.close_round(2)
    panel.finalize()
    return panel
