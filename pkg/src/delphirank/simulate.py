"""Seeded end-to-end consultation simulator.

Generates a synthetic panel (skewed indicator scores, so initial
categories concentrate in the low bins), then drives the full two-round
lifecycle with a simple respondent model: each expert knows a random
subset of publishers, sometimes disagrees with a displayed category, and
proposes a score one step away from it. The step direction is biased
upward with probability ``upward_bias``, which mimics panels that tend
to rate publishers more generously than the indicator did.

Everything is driven by one ``random.Random(seed)``, so a run is fully
determined by its seed and config.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .analytics import EqualizationReport, equalization_report
from .delphi import ExpertResponse, Panel, ResponseItem
from .ranking import Field, Scope, import_ranking

# synthetic submission clock; real timestamps would break seed-reproducibility
_BASE_TIME = datetime(2015, 6, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class SimulationConfig:
    publishers_per_scope: int = 10
    experts: int = 15
    know_prob: float = 0.5
    disagree_prob: float = 0.6
    upward_bias: float = 0.75
    respond_prob_round1: float = 0.8
    respond_prob_round2: float = 0.9
    icee_sigma: float = 1.0


def _synthetic_list(rng: random.Random, field: Field, scope: Scope, config: SimulationConfig):
    rows = [
        (f"{scope.value}-pub-{i:02d}", rng.lognormvariate(0.0, config.icee_sigma))
        for i in range(config.publishers_per_scope)
    ]
    return import_ranking(rows, field, scope)


def _respond(panel: Panel, rng: random.Random, round_index: int, config: SimulationConfig) -> None:
    questionnaire = panel.build_questionnaire(round_index)
    if round_index == 1:
        eligible = list(panel.experts)
        respond_prob = config.respond_prob_round1
    else:
        eligible = sorted(panel.responses[1])
        respond_prob = config.respond_prob_round2
    for expert_id in eligible:
        if rng.random() >= respond_prob:
            continue
        items = []
        for q in questionnaire:
            if rng.random() >= config.know_prob:
                continue
            if rng.random() < config.disagree_prob:
                direction = 1 if rng.random() < config.upward_bias else -1
                proposed = min(4, max(1, q.displayed_numeric + direction))
                if proposed != q.displayed_numeric:
                    items.append(
                        ResponseItem(
                            publisher=q.publisher,
                            known=True,
                            disagree=True,
                            new_score=proposed,
                        )
                    )
                    continue
            items.append(ResponseItem(publisher=q.publisher, known=True))
        when = _BASE_TIME + timedelta(
            days=round_index, minutes=len(panel.responses[round_index])
        )
        panel.record_response(
            ExpertResponse(
                expert_id=expert_id,
                round_index=round_index,
                items=tuple(items),
                submitted_at=when,
            )
        )


def run_consultation(seed: int, config: SimulationConfig | None = None) -> Panel:
    """Simulate a complete two-round consultation; returns the finalized panel."""
    config = config or SimulationConfig()
    rng = random.Random(seed)
    field = Field.from_name("Simulated Field")
    panel = Panel(
        id=f"sim-{seed}",
        field=field,
        domestic=_synthetic_list(rng, field, Scope.DOMESTIC, config),
        foreign=_synthetic_list(rng, field, Scope.FOREIGN, config),
        experts=tuple(f"expert-{i:02d}" for i in range(config.experts)),
    )
    panel.open_round(1)
    _respond(panel, rng, 1, config)
    panel.close_round(1)
    panel.open_round(2)
    _respond(panel, rng, 2, config)
    panel.close_round(2)
    panel.finalize()
    return panel


def run_equalization(seed: int, config: SimulationConfig | None = None) -> EqualizationReport:
    """Simulate one consultation and report its concentration change."""
    return equalization_report(run_consultation(seed, config))
