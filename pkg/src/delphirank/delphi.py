"""Two-round consultation engine over a pair of ranked publisher lists.

A panel walks a fixed lifecycle::

    draft -> round1_open -> round1_closed -> round2_open -> round2_closed -> finalized

Experts mark publishers they know, flag the ones whose displayed category
they disagree with, and attach a replacement score (1..4) to each flagged
publisher. Closing a round snapshots per-publisher vote counts and mean
scores. The second-round questionnaire anchors on the first round's
means; finalization averages the two rounds' effective means and rounds
to the nearest category.

The engine is a deterministic state machine: replaying the same commands
yields the same final categories. It never mutates the underlying ranked
lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum

from .errors import DomainError
from .ranking import (
    Field,
    RankedList,
    Scope,
    category_from_numeric,
    round_to_category_numeric,
)


class EngineError(DomainError):
    code = "ENGINE_ERROR"


class IllegalTransition(EngineError):
    code = "ILLEGAL_TRANSITION"


class RoundClosed(EngineError):
    code = "ROUND_CLOSED"


class RoundNotOpen(EngineError):
    code = "ROUND_NOT_OPEN"


class RoundNotClosed(EngineError):
    code = "ROUND_NOT_CLOSED"


class RoundNotStarted(EngineError):
    code = "ROUND_NOT_STARTED"


class NotFinalized(EngineError):
    code = "NOT_FINALIZED"


class UnknownExpert(EngineError):
    code = "UNKNOWN_EXPERT"


class UnknownPublisher(EngineError):
    code = "UNKNOWN_PUBLISHER"


class InconsistentItem(EngineError):
    code = "INCONSISTENT_ITEM"


class PanelState(str, Enum):
    DRAFT = "draft"
    ROUND1_OPEN = "round1_open"
    ROUND1_CLOSED = "round1_closed"
    ROUND2_OPEN = "round2_open"
    ROUND2_CLOSED = "round2_closed"
    FINALIZED = "finalized"


_STATE_ORDER = list(PanelState)

_OPEN_STATE = {1: PanelState.ROUND1_OPEN, 2: PanelState.ROUND2_OPEN}
_CLOSED_STATE = {1: PanelState.ROUND1_CLOSED, 2: PanelState.ROUND2_CLOSED}
_BEFORE_OPEN = {1: PanelState.DRAFT, 2: PanelState.ROUND1_CLOSED}


def _reached(state: PanelState, milestone: PanelState) -> bool:
    return _STATE_ORDER.index(state) >= _STATE_ORDER.index(milestone)


def _check_round_index(round_index: int) -> None:
    if round_index not in (1, 2):
        raise RoundNotStarted(f"round index must be 1 or 2, got {round_index!r}")


@dataclass(frozen=True)
class QuestionnaireItem:
    publisher: str
    scope: Scope
    displayed_numeric: int


@dataclass(frozen=True)
class ResponseItem:
    """One publisher line of an expert response.

    A new score may be given only for publishers the expert knows and
    whose displayed category they disagree with.
    """

    publisher: str
    known: bool
    disagree: bool = False
    new_score: int | None = None

    def validate(self) -> None:
        if self.disagree and not self.known:
            raise InconsistentItem(
                f"{self.publisher!r}: cannot disagree with an unknown publisher"
            )
        if self.disagree and self.new_score is None:
            raise InconsistentItem(f"{self.publisher!r}: disagreement requires a new score")
        if not self.disagree and self.new_score is not None:
            raise InconsistentItem(
                f"{self.publisher!r}: a new score is only allowed with a disagreement"
            )
        if self.new_score is not None and (
            not isinstance(self.new_score, int) or not 1 <= self.new_score <= 4
        ):
            raise InconsistentItem(
                f"{self.publisher!r}: new score must be an integer 1..4, got {self.new_score!r}"
            )


@dataclass(frozen=True)
class ExpertResponse:
    expert_id: str
    round_index: int
    items: tuple[ResponseItem, ...] = ()
    suggested_publishers: tuple[str, ...] = ()
    submitted_at: datetime | None = None


@dataclass(frozen=True)
class PublisherRoundAggregate:
    publisher: str
    votes: int
    mean_score: float


@dataclass(frozen=True)
class FinalCategory:
    publisher: str
    scope: Scope
    initial_numeric: int
    round1_votes: int
    round1_mean: float | None
    round2_votes: int
    round2_mean: float | None
    final_numeric: int
    final_letter: str


@dataclass(frozen=True)
class DrawRecord:
    """Audit record of one random draw contributing experts to the panel."""

    seed: int
    expert_ids: tuple[str, ...]


@dataclass
class Panel:
    """One field's consultation: two ranked lists, sampled experts, rounds."""

    id: str
    field: Field
    domestic: RankedList
    foreign: RankedList
    experts: tuple[str, ...]
    state: PanelState = PanelState.DRAFT
    responses: dict[int, dict[str, ExpertResponse]] = field(
        default_factory=lambda: {1: {}, 2: {}}
    )
    aggregates: dict[int, dict[str, PublisherRoundAggregate]] = field(default_factory=dict)
    finals: tuple[FinalCategory, ...] | None = None
    draws: tuple[DrawRecord, ...] = ()
    contacts: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("panel id must be non-empty")
        if len(set(self.experts)) != len(self.experts):
            raise ValueError("panel experts must be unique")
        if self.domestic.scope is not Scope.DOMESTIC or self.foreign.scope is not Scope.FOREIGN:
            raise ValueError("panel lists must be one domestic and one foreign")
        names = [e.publisher for e in self.domestic.entries + self.foreign.entries]
        if len(set(names)) != len(names):
            raise ValueError("publisher names must be unique across the panel's lists")

    # -- lookups ---------------------------------------------------------

    def lists(self) -> tuple[RankedList, RankedList]:
        return (self.domestic, self.foreign)

    def has_publisher(self, publisher: str) -> bool:
        return any(publisher in lst.publishers for lst in self.lists())

    def scope_of(self, publisher: str) -> Scope:
        for lst in self.lists():
            if publisher in lst.publishers:
                return lst.scope
        raise UnknownPublisher(f"publisher {publisher!r} is not in the panel's lists")

    def initial_numeric(self, publisher: str) -> int:
        for lst in self.lists():
            if publisher in lst.publishers:
                return lst.entry(publisher).category.numeric
        raise UnknownPublisher(f"publisher {publisher!r} is not in the panel's lists")

    # -- lifecycle -------------------------------------------------------

    def open_round(self, round_index: int) -> None:
        _check_round_index(round_index)
        if self.state is not _BEFORE_OPEN[round_index]:
            raise IllegalTransition(
                f"cannot open round {round_index} from state {self.state.value!r}"
            )
        self.state = _OPEN_STATE[round_index]

    def close_round(self, round_index: int) -> None:
        """Close a round and snapshot its aggregates."""
        _check_round_index(round_index)
        if self.state is not _OPEN_STATE[round_index]:
            raise IllegalTransition(
                f"cannot close round {round_index} from state {self.state.value!r}"
            )
        self.aggregates[round_index] = self._compute_aggregates(round_index)
        self.state = _CLOSED_STATE[round_index]

    def add_experts(self, expert_ids: tuple[str, ...], draw: DrawRecord | None = None) -> None:
        """Grow the sample; only allowed before round 1 closes."""
        if self.state not in (PanelState.DRAFT, PanelState.ROUND1_OPEN):
            raise IllegalTransition(
                f"cannot extend the sample in state {self.state.value!r}"
            )
        merged = self.experts + tuple(expert_ids)
        if len(set(merged)) != len(merged):
            raise ValueError("extension would duplicate expert ids")
        self.experts = merged
        if draw is not None:
            self.draws = self.draws + (draw,)

    # -- questionnaires and responses ------------------------------------

    def build_questionnaire(self, round_index: int) -> list[QuestionnaireItem]:
        """Items for an open round, domestic list first.

        Round 1 displays the initial category numeric; round 2 displays
        the rounded round-1 mean for publishers that received new scores
        and the initial numeric for the rest.
        """
        _check_round_index(round_index)
        if self.state is not _OPEN_STATE[round_index]:
            raise RoundNotOpen(f"round {round_index} is not open (state {self.state.value!r})")
        round1 = self.aggregates.get(1, {})
        items = []
        for lst in self.lists():
            for entry in lst.entries:
                displayed = entry.category.numeric
                if round_index == 2 and entry.publisher in round1:
                    displayed = round_to_category_numeric(round1[entry.publisher].mean_score)
                items.append(
                    QuestionnaireItem(
                        publisher=entry.publisher,
                        scope=lst.scope,
                        displayed_numeric=displayed,
                    )
                )
        return items

    def record_response(self, response: ExpertResponse) -> ExpertResponse:
        """Validate and store a response; resubmission replaces the prior one."""
        _check_round_index(response.round_index)
        if self.state is not _OPEN_STATE[response.round_index]:
            raise RoundClosed(
                f"round {response.round_index} is not accepting responses "
                f"(state {self.state.value!r})"
            )
        if response.expert_id not in self.experts:
            raise UnknownExpert(f"expert {response.expert_id!r} is not in the panel sample")
        seen: set[str] = set()
        for item in response.items:
            if not self.has_publisher(item.publisher):
                raise UnknownPublisher(
                    f"publisher {item.publisher!r} is not in the panel's lists"
                )
            if item.publisher in seen:
                raise InconsistentItem(f"duplicate item for publisher {item.publisher!r}")
            seen.add(item.publisher)
            item.validate()
        if response.submitted_at is None:
            response = replace(response, submitted_at=datetime.now(timezone.utc))
        self.responses[response.round_index][response.expert_id] = response
        return response

    # -- aggregation and finalization -------------------------------------

    def _compute_aggregates(self, round_index: int) -> dict[str, PublisherRoundAggregate]:
        scores: dict[str, list[int]] = {}
        for expert_id in sorted(self.responses[round_index]):
            for item in self.responses[round_index][expert_id].items:
                if item.disagree and item.new_score is not None:
                    scores.setdefault(item.publisher, []).append(item.new_score)
        return {
            publisher: PublisherRoundAggregate(
                publisher=publisher,
                votes=len(values),
                mean_score=sum(values) / len(values),
            )
            for publisher, values in scores.items()
        }

    def aggregate_round(self, round_index: int) -> dict[str, PublisherRoundAggregate]:
        """Snapshot taken when the round closed (publishers with no new scores absent)."""
        _check_round_index(round_index)
        if not _reached(self.state, _CLOSED_STATE[round_index]):
            raise RoundNotClosed(
                f"round {round_index} has not been closed (state {self.state.value!r})"
            )
        return dict(self.aggregates[round_index])

    def displayed_numeric(self, publisher: str, round_index: int) -> int:
        """The category numeric shown for a publisher in a round's questionnaire."""
        initial = self.initial_numeric(publisher)
        if round_index == 1:
            return initial
        agg = self.aggregates.get(1, {}).get(publisher)
        return round_to_category_numeric(agg.mean_score) if agg else initial

    def finalize(self) -> tuple[FinalCategory, ...]:
        """Average the two rounds' effective means into final categories.

        A round with no new scores for a publisher contributes that
        round's displayed numeric instead, so every publisher stays
        categorizable.
        """
        if self.state is not PanelState.ROUND2_CLOSED:
            raise IllegalTransition(f"cannot finalize from state {self.state.value!r}")
        finals = []
        for lst in self.lists():
            for entry in lst.entries:
                publisher = entry.publisher
                agg1 = self.aggregates[1].get(publisher)
                agg2 = self.aggregates[2].get(publisher)
                effective1 = agg1.mean_score if agg1 else float(self.displayed_numeric(publisher, 1))
                effective2 = agg2.mean_score if agg2 else float(self.displayed_numeric(publisher, 2))
                final_numeric = round_to_category_numeric((effective1 + effective2) / 2)
                finals.append(
                    FinalCategory(
                        publisher=publisher,
                        scope=lst.scope,
                        initial_numeric=entry.category.numeric,
                        round1_votes=agg1.votes if agg1 else 0,
                        round1_mean=agg1.mean_score if agg1 else None,
                        round2_votes=agg2.votes if agg2 else 0,
                        round2_mean=agg2.mean_score if agg2 else None,
                        final_numeric=final_numeric,
                        final_letter=category_from_numeric(final_numeric).letter,
                    )
                )
        self.finals = tuple(finals)
        self.state = PanelState.FINALIZED
        return self.finals

    def nonrespondents(self, round_index: int) -> list[str]:
        """Experts still owing a response: the sample for round 1, the
        round-1 respondents for round 2."""
        _check_round_index(round_index)
        if not _reached(self.state, _OPEN_STATE[round_index]):
            raise RoundNotStarted(
                f"round {round_index} has not started (state {self.state.value!r})"
            )
        if round_index == 1:
            base = set(self.experts)
        else:
            base = set(self.responses[1])
        return sorted(base - set(self.responses[round_index]))

    def suggested_publishers(self, round_index: int) -> list[tuple[str, str]]:
        """Free-text publisher suggestions, reported but never aggregated."""
        _check_round_index(round_index)
        out = []
        for expert_id in sorted(self.responses[round_index]):
            for text in self.responses[round_index][expert_id].suggested_publishers:
                out.append((expert_id, text))
        return out

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "field": {"id": self.field.id, "name": self.field.name},
            "domestic": self.domestic.to_dict(),
            "foreign": self.foreign.to_dict(),
            "experts": list(self.experts),
            "state": self.state.value,
            "responses": {
                str(round_index): {
                    expert_id: _response_to_dict(resp)
                    for expert_id, resp in by_expert.items()
                }
                for round_index, by_expert in self.responses.items()
            },
            "aggregates": {
                str(round_index): {
                    publisher: {"votes": agg.votes, "mean_score": agg.mean_score}
                    for publisher, agg in by_publisher.items()
                }
                for round_index, by_publisher in self.aggregates.items()
            },
            "finals": None
            if self.finals is None
            else [_final_to_dict(fc) for fc in self.finals],
            "draws": [
                {"seed": d.seed, "expert_ids": list(d.expert_ids)} for d in self.draws
            ],
            "contacts": dict(self.contacts),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Panel":
        panel = cls(
            id=data["id"],
            field=Field(id=data["field"]["id"], name=data["field"]["name"]),
            domestic=RankedList.from_dict(data["domestic"]),
            foreign=RankedList.from_dict(data["foreign"]),
            experts=tuple(data["experts"]),
            state=PanelState(data["state"]),
            responses={
                int(round_index): {
                    expert_id: _response_from_dict(raw)
                    for expert_id, raw in by_expert.items()
                }
                for round_index, by_expert in data["responses"].items()
            },
            aggregates={
                int(round_index): {
                    publisher: PublisherRoundAggregate(
                        publisher=publisher,
                        votes=raw["votes"],
                        mean_score=raw["mean_score"],
                    )
                    for publisher, raw in by_publisher.items()
                }
                for round_index, by_publisher in data["aggregates"].items()
            },
            finals=None
            if data["finals"] is None
            else tuple(_final_from_dict(raw) for raw in data["finals"]),
            draws=tuple(
                DrawRecord(seed=d["seed"], expert_ids=tuple(d["expert_ids"]))
                for d in data["draws"]
            ),
            contacts=dict(data["contacts"]),
        )
        return panel


def _response_to_dict(resp: ExpertResponse) -> dict:
    return {
        "expert_id": resp.expert_id,
        "round_index": resp.round_index,
        "items": [
            {
                "publisher": i.publisher,
                "known": i.known,
                "disagree": i.disagree,
                "new_score": i.new_score,
            }
            for i in resp.items
        ],
        "suggested_publishers": list(resp.suggested_publishers),
        "submitted_at": resp.submitted_at.isoformat() if resp.submitted_at else None,
    }


def _response_from_dict(raw: dict) -> ExpertResponse:
    return ExpertResponse(
        expert_id=raw["expert_id"],
        round_index=raw["round_index"],
        items=tuple(
            ResponseItem(
                publisher=i["publisher"],
                known=i["known"],
                disagree=i["disagree"],
                new_score=i["new_score"],
            )
            for i in raw["items"]
        ),
        suggested_publishers=tuple(raw["suggested_publishers"]),
        submitted_at=datetime.fromisoformat(raw["submitted_at"])
        if raw["submitted_at"]
        else None,
    )


def _final_to_dict(fc: FinalCategory) -> dict:
    return {
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


def _final_from_dict(raw: dict) -> FinalCategory:
    return FinalCategory(
        publisher=raw["publisher"],
        scope=Scope(raw["scope"]),
        initial_numeric=raw["initial_numeric"],
        round1_votes=raw["round1_votes"],
        round1_mean=raw["round1_mean"],
        round2_votes=raw["round2_votes"],
        round2_mean=raw["round2_mean"],
        final_numeric=raw["final_numeric"],
        final_letter=raw["final_letter"],
    )
