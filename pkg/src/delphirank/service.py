"""Application service tying the store to the engine and analytics.

One ``PanelService`` owns a store and serializes commands per panel:
each panel has its own lock, so two coordinators cannot interleave
half-applied transitions on the same panel, while commands on different
panels proceed in parallel. Every state change is persisted before the
call returns.

Experts never authenticate; they hold a capability token (128 random
bits, URL-safe) that resolves to one (panel, expert) pair. The service
issues tokens when experts enter a sample and renders them as links for
an external mailer.
"""

from __future__ import annotations

import csv
import io
import secrets
import threading
import warnings
from datetime import datetime, timezone

from .analytics import (
    equalization_report,
    response_rates,
    total_response_rates,
)
from .delphi import (
    DrawRecord,
    ExpertResponse,
    NotFinalized,
    Panel,
    PanelState,
    ResponseItem,
    RoundClosed,
)
from .errors import DomainError
from .ranking import (
    Field,
    RankedList,
    Scope,
    category_from_numeric,
    import_ranking,
    ranking_to_csv,
    read_ranking_csv,
)
from .sampling import (
    Roster,
    SamplingParams,
    Subject,
    draw_sample,
    extend_sample,
    read_roster_csv,
    required_sample_size,
)
from .store import PanelStore


class ServiceError(DomainError):
    code = "SERVICE_ERROR"


class UnknownPanel(ServiceError):
    code = "UNKNOWN_PANEL"


class UnknownRanking(ServiceError):
    code = "UNKNOWN_RANKING"


class UnknownRoster(ServiceError):
    code = "UNKNOWN_ROSTER"


class UnknownToken(ServiceError):
    code = "UNKNOWN_TOKEN"


class DuplicatePanel(ServiceError):
    code = "DUPLICATE_PANEL"


class ConflictingRankings(ServiceError):
    code = "CONFLICTING_RANKINGS"


def _roster_to_doc(roster: Roster) -> dict:
    return {
        "subjects": [
            {"expert_id": s.expert_id, "field": s.field, "email": s.email}
            for s in roster.subjects
        ]
    }


def _roster_from_doc(doc: dict) -> Roster:
    return Roster(
        subjects=tuple(
            Subject(expert_id=s["expert_id"], field=s["field"], email=s["email"])
            for s in doc["subjects"]
        )
    )


FINAL_CSV_HEADER = (
    "publisher",
    "scope",
    "initial_numeric",
    "round1_votes",
    "round1_mean",
    "round2_votes",
    "round2_mean",
    "final_numeric",
    "final_letter",
)


class PanelService:
    """Facade over store + engine; one lock per panel id."""

    def __init__(self, store: PanelStore) -> None:
        self.store = store
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, panel_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(panel_id, threading.Lock())

    # -- imports -----------------------------------------------------------

    def import_ranking_csv(self, text: str, field_name: str, scope: Scope) -> RankedList:
        field = Field.from_name(field_name)
        rows = read_ranking_csv(text)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ranked = import_ranking(rows, field, scope)
        self.store.save_ranking(ranked)
        return ranked

    def import_roster_csv(self, text: str, field_name: str) -> Roster:
        field = Field.from_name(field_name)
        roster = read_roster_csv(text)
        self.store.save_roster(field.id, _roster_to_doc(roster))
        return roster

    def get_ranking(self, field_name: str, scope: Scope) -> RankedList:
        field = Field.from_name(field_name)
        ranked = self.store.load_ranking(field.id, scope)
        if ranked is None:
            raise UnknownRanking(f"no {scope.value} ranking imported for field {field_name!r}")
        return ranked

    def get_roster(self, field_name: str) -> Roster:
        field = Field.from_name(field_name)
        doc = self.store.load_roster(field.id)
        if doc is None:
            raise UnknownRoster(f"no roster imported for field {field_name!r}")
        return _roster_from_doc(doc)

    # -- panel lifecycle ---------------------------------------------------

    def create_panel(
        self,
        field_name: str,
        seed: int,
        params: SamplingParams | None = None,
        panel_id: str | None = None,
    ) -> Panel:
        """Draw a sample from the field's roster and open a draft panel."""
        field = Field.from_name(field_name)
        panel_id = panel_id or f"panel-{field.id}"
        domestic = self.get_ranking(field_name, Scope.DOMESTIC)
        foreign = self.get_ranking(field_name, Scope.FOREIGN)
        shared = set(domestic.publishers) & set(foreign.publishers)
        if shared:
            raise ConflictingRankings(
                "publishers appear in both the domestic and foreign rankings: "
                + ", ".join(sorted(shared))
            )
        roster = self.get_roster(field_name)
        with self._lock(panel_id):
            if self.store.load_panel(panel_id) is not None:
                raise DuplicatePanel(f"panel {panel_id!r} already exists")
            n = required_sample_size(len(roster), params)
            picked = draw_sample(roster, n, seed)
            panel = Panel(
                id=panel_id,
                field=field,
                domestic=domestic,
                foreign=foreign,
                experts=tuple(s.expert_id for s in picked),
                draws=(DrawRecord(seed=seed, expert_ids=tuple(s.expert_id for s in picked)),),
                contacts={s.expert_id: s.email for s in picked},
            )
            self.store.save_panel(panel)
            self._issue_missing_tokens(panel)
        return panel

    def extend_panel(self, panel_id: str, n_extra: int, seed: int) -> Panel:
        """Add n_extra fresh roster members to a panel's sample."""
        with self._lock(panel_id):
            panel = self._load(panel_id)
            roster = self.get_roster(panel.field.name)
            remaining = Roster(
                subjects=tuple(
                    s for s in roster.subjects if s.expert_id not in panel.experts
                )
            )
            picked = extend_sample(panel.experts, remaining, n_extra, seed)
            panel.add_experts(
                tuple(s.expert_id for s in picked),
                draw=DrawRecord(seed=seed, expert_ids=tuple(s.expert_id for s in picked)),
            )
            panel.contacts.update({s.expert_id: s.email for s in picked})
            self.store.save_panel(panel)
            self._issue_missing_tokens(panel)
        return panel

    def open_round(self, panel_id: str, round_index: int) -> Panel:
        with self._lock(panel_id):
            panel = self._load(panel_id)
            panel.open_round(round_index)
            self.store.save_panel(panel)
        return panel

    def close_round(self, panel_id: str, round_index: int) -> Panel:
        with self._lock(panel_id):
            panel = self._load(panel_id)
            panel.close_round(round_index)
            self.store.save_panel(panel)
        return panel

    def finalize(self, panel_id: str) -> Panel:
        with self._lock(panel_id):
            panel = self._load(panel_id)
            panel.finalize()
            self.store.save_panel(panel)
        return panel

    def get_panel(self, panel_id: str) -> Panel:
        panel = self.store.load_panel(panel_id)
        if panel is None:
            raise UnknownPanel(f"no panel {panel_id!r}")
        return panel

    def list_panels(self) -> list[Panel]:
        return [self.get_panel(panel_id) for panel_id in self.store.list_panels()]

    def _load(self, panel_id: str) -> Panel:
        return self.get_panel(panel_id)

    # -- tokens ------------------------------------------------------------

    def _issue_missing_tokens(self, panel: Panel) -> None:
        issued = self.store.tokens_for_panel(panel.id)
        for expert_id in panel.experts:
            if expert_id not in issued:
                self.store.save_token(
                    token=secrets.token_urlsafe(16),
                    panel_id=panel.id,
                    expert_id=expert_id,
                    issued_at=datetime.now(timezone.utc).isoformat(),
                )

    def tokens(self, panel_id: str) -> dict[str, str]:
        """expert_id -> token, for every expert in the panel sample."""
        panel = self.get_panel(panel_id)
        self._issue_missing_tokens(panel)
        return self.store.tokens_for_panel(panel_id)

    def resolve_token(self, token: str) -> tuple[Panel, str]:
        resolved = self.store.resolve_token(token)
        if resolved is None:
            raise UnknownToken("token does not resolve")
        panel_id, expert_id = resolved
        return self.get_panel(panel_id), expert_id

    def mailing_list(self, panel_id: str, base_url: str = "") -> list[tuple[str, str, str]]:
        """(expert_id, email, questionnaire link) for external dispatch."""
        panel = self.get_panel(panel_id)
        tokens = self.tokens(panel_id)
        return [
            (expert_id, panel.contacts.get(expert_id, ""), f"{base_url}/api/q/{tokens[expert_id]}")
            for expert_id in panel.experts
        ]

    def reminders(self, panel_id: str, round_index: int, base_url: str = "") -> list[tuple[str, str, str]]:
        """Mailing list restricted to the round's nonrespondents."""
        panel = self.get_panel(panel_id)
        owing = set(panel.nonrespondents(round_index))
        return [row for row in self.mailing_list(panel_id, base_url) if row[0] in owing]

    # -- expert flow -------------------------------------------------------

    def _open_round_index(self, panel: Panel) -> int:
        if panel.state is PanelState.ROUND1_OPEN:
            return 1
        if panel.state is PanelState.ROUND2_OPEN:
            return 2
        raise RoundClosed(f"no round is open (state {panel.state.value!r})")

    def questionnaire_for_token(self, token: str) -> dict:
        """The open round's questionnaire document for the token's expert.

        Round-2 items also carry the round-1 display so clients can flag
        categories that moved without recomputing anything.
        """
        panel, expert_id = self.resolve_token(token)
        round_index = self._open_round_index(panel)
        items = panel.build_questionnaire(round_index)
        return {
            "panel_id": panel.id,
            "field": panel.field.name,
            "expert_id": expert_id,
            "round": round_index,
            "items": [
                {
                    "publisher": item.publisher,
                    "scope": item.scope.value,
                    "displayed_numeric": item.displayed_numeric,
                    "displayed_letter": _letter(item.displayed_numeric),
                    "previous_numeric": (
                        panel.displayed_numeric(item.publisher, 1) if round_index == 2 else None
                    ),
                }
                for item in items
            ],
        }

    def submit_response(
        self,
        token: str,
        items: list[dict],
        suggested_publishers: list[str] | None = None,
    ) -> dict:
        """Record the token holder's response for the open round."""
        panel, expert_id = self.resolve_token(token)
        with self._lock(panel.id):
            panel = self.get_panel(panel.id)
            round_index = self._open_round_index(panel)
            response = ExpertResponse(
                expert_id=expert_id,
                round_index=round_index,
                items=tuple(
                    ResponseItem(
                        publisher=item["publisher"],
                        known=bool(item["known"]),
                        disagree=bool(item.get("disagree", False)),
                        new_score=item.get("new_score"),
                    )
                    for item in items
                ),
                suggested_publishers=tuple(suggested_publishers or ()),
            )
            stored = panel.record_response(response)
            self.store.save_panel(panel)
        return {
            "panel_id": panel.id,
            "expert_id": expert_id,
            "round": round_index,
            "items_recorded": len(stored.items),
            "submitted_at": stored.submitted_at.isoformat(),
        }

    # -- documents ---------------------------------------------------------

    def panel_summary(self, panel: Panel) -> dict:
        return {
            "id": panel.id,
            "field": panel.field.name,
            "state": panel.state.value,
            "experts": len(panel.experts),
            "publishers": len(panel.domestic.entries) + len(panel.foreign.entries),
            "responses": {str(r): len(panel.responses[r]) for r in (1, 2)},
            "finalized": panel.state is PanelState.FINALIZED,
        }

    def aggregates_document(self, panel_id: str, round_index: int) -> dict:
        panel = self.get_panel(panel_id)
        aggregates = panel.aggregate_round(round_index)
        return {
            "panel_id": panel_id,
            "round": round_index,
            "aggregates": {
                publisher: {
                    "votes": agg.votes,
                    "mean_score": agg.mean_score,
                    "displayed_numeric": panel.displayed_numeric(publisher, round_index),
                }
                for publisher, agg in sorted(aggregates.items())
            },
        }

    def finals_document(self, panel_id: str) -> dict:
        panel = self.get_panel(panel_id)
        if panel.finals is None:
            raise NotFinalized(f"panel {panel_id!r} is not finalized")
        return {
            "panel_id": panel_id,
            "finals": [
                {
                    "publisher": fc.publisher,
                    "scope": fc.scope.value,
                    "initial_numeric": fc.initial_numeric,
                    "round1_votes": fc.round1_votes,
                    "round1_mean": fc.round1_mean,
                    "round2_votes": fc.round2_votes,
                    "round2_mean": fc.round2_mean,
                    "final_numeric": fc.final_numeric,
                    "final_letter": fc.final_letter,
                }
                for fc in panel.finals
            ],
        }

    def final_csv(self, panel_id: str) -> str:
        doc = self.finals_document(panel_id)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FINAL_CSV_HEADER)
        for row in doc["finals"]:
            writer.writerow(
                [
                    row["publisher"],
                    row["scope"],
                    row["initial_numeric"],
                    row["round1_votes"],
                    "" if row["round1_mean"] is None else row["round1_mean"],
                    row["round2_votes"],
                    "" if row["round2_mean"] is None else row["round2_mean"],
                    row["final_numeric"],
                    row["final_letter"],
                ]
            )
        return buf.getvalue()

    def response_rates_document(self, panel_id: str) -> dict:
        panel = self.get_panel(panel_id)
        rows = response_rates(panel)
        totals = total_response_rates(rows)

        def row_doc(row):
            return {
                "field": row.field.name,
                "round": row.round_index,
                "sample_n": row.sample_n,
                "answers": row.answers,
                "rate_percent": row.rate_percent,
                "provisional": row.provisional,
            }

        return {
            "panel_id": panel_id,
            "rows": [row_doc(r) for r in rows],
            "totals": [row_doc(r) for r in totals],
        }

    def analytics_document(self, panel_id: str) -> dict:
        """Full analytics export: rates, shift stats and concentration."""
        panel = self.get_panel(panel_id)
        report = equalization_report(panel)
        rates = self.response_rates_document(panel_id)
        return {
            "panel_id": panel_id,
            "response_rates": rates["rows"],
            "response_rate_totals": rates["totals"],
            "change_stats": {
                scope.value: {"mean": stats.mean, "sd": stats.sd}
                for scope, stats in report.change_stats.items()
            },
            "concentration": {
                "before": {"gini": report.before.gini, "lorenz": [list(p) for p in report.before.lorenz]},
                "after": {"gini": report.after.gini, "lorenz": [list(p) for p in report.after.lorenz]},
                "delta": report.delta,
            },
        }

    def nonrespondents_document(self, panel_id: str, round_index: int) -> dict:
        panel = self.get_panel(panel_id)
        return {
            "panel_id": panel_id,
            "round": round_index,
            "expert_ids": panel.nonrespondents(round_index),
        }

    def ranking_csv(self, field_name: str, scope: Scope) -> str:
        return ranking_to_csv(self.get_ranking(field_name, scope))


def _letter(numeric: int) -> str:
    return category_from_numeric(numeric).letter
