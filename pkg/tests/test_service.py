import threading

import pytest

from delphirank.delphi import PanelState, RoundClosed, UnknownPublisher
from delphirank.ranking import Scope
from delphirank.sampling import SamplingParams, SampleTooLarge
from delphirank.service import (
    ConflictingRankings,
    DuplicatePanel,
    PanelService,
    UnknownRanking,
    UnknownRoster,
    UnknownToken,
)
from delphirank.store import PanelStore

DOM_CSV = (
    "publisher,icee\n"
    "Alpha Press,2.0\n"
    "Beta Editorial,1.2\n"
    "Gamma Books,1.0\n"
    "Delta House,0.8\n"
)
FORN_CSV = (
    "publisher,icee\n"
    "Cambridge Scholars,2.0\n"
    "Springer,1.2\n"
    "Routledge,1.0\n"
    "Brill,0.8\n"
)


def roster_csv(n):
    rows = "".join(f"e{i:02d},History,e{i}@uni.example\n" for i in range(n))
    return "expert_id,field,email\n" + rows


@pytest.fixture
def store_path(tmp_path):
    return str(tmp_path / "svc.db")


@pytest.fixture
def service(store_path):
    svc = PanelService(PanelStore(store_path))
    svc.import_ranking_csv(DOM_CSV, "History", Scope.DOMESTIC)
    svc.import_ranking_csv(FORN_CSV, "History", Scope.FOREIGN)
    svc.import_roster_csv(roster_csv(30), "History")
    return svc


def open_panel(service, seed=7):
    panel = service.create_panel("History", seed=seed)
    service.open_round(panel.id, 1)
    return panel.id


class TestImports:
    def test_ranking_persisted(self, service):
        ranked = service.get_ranking("History", Scope.DOMESTIC)
        assert [e.publisher for e in ranked.entries][:2] == ["Alpha Press", "Beta Editorial"]

    def test_missing_ranking(self, service):
        with pytest.raises(UnknownRanking):
            service.get_ranking("Geography", Scope.DOMESTIC)

    def test_roster_persisted(self, service):
        assert len(service.get_roster("History")) == 30

    def test_missing_roster(self, service):
        with pytest.raises(UnknownRoster):
            service.get_roster("Geography")


class TestCreatePanel:
    def test_sample_size_from_roster(self, service):
        panel = service.create_panel("History", seed=7)
        # finite-population formula at the defaults for a roster of 30
        assert len(panel.experts) == 28
        assert panel.state is PanelState.DRAFT
        assert panel.draws[0].seed == 7
        assert panel.draws[0].expert_ids == panel.experts

    def test_sampling_params_respected(self, service):
        panel = service.create_panel(
            "History", seed=7, params=SamplingParams(margin_e=0.1), panel_id="loose"
        )
        assert len(panel.experts) == 24

    def test_draw_is_seed_deterministic(self, store_path, tmp_path):
        def build(path):
            svc = PanelService(PanelStore(path))
            svc.import_ranking_csv(DOM_CSV, "History", Scope.DOMESTIC)
            svc.import_ranking_csv(FORN_CSV, "History", Scope.FOREIGN)
            svc.import_roster_csv(roster_csv(30), "History")
            return svc.create_panel("History", seed=99).experts

        assert build(str(tmp_path / "a.db")) == build(str(tmp_path / "b.db"))

    def test_contacts_carried_from_roster(self, service):
        panel = service.create_panel("History", seed=7)
        expert = panel.experts[0]
        assert panel.contacts[expert] == f"{expert}@uni.example"

    def test_duplicate_rejected(self, service):
        service.create_panel("History", seed=7)
        with pytest.raises(DuplicatePanel):
            service.create_panel("History", seed=8)

    def test_missing_inputs_rejected(self, store_path):
        svc = PanelService(PanelStore(store_path))
        with pytest.raises(UnknownRanking):
            svc.create_panel("History", seed=1)

    def test_overlapping_rankings_rejected(self, store_path):
        svc = PanelService(PanelStore(store_path))
        svc.import_ranking_csv(DOM_CSV, "History", Scope.DOMESTIC)
        overlap = "publisher,icee\nAlpha Press,2.0\nSpringer,1.2\n"
        svc.import_ranking_csv(overlap, "History", Scope.FOREIGN)
        svc.import_roster_csv(roster_csv(4), "History")
        with pytest.raises(ConflictingRankings, match="Alpha Press"):
            svc.create_panel("History", seed=1)

    def test_persisted(self, service, store_path):
        service.create_panel("History", seed=7)
        fresh = PanelService(PanelStore(store_path))
        assert len(fresh.get_panel("panel-history").experts) == 28


class TestExtendPanel:
    def test_grows_sample_and_tokens(self, service):
        panel = service.create_panel("History", seed=7)
        before = set(service.tokens(panel.id))
        extended = service.extend_panel(panel.id, 2, seed=11)
        assert len(extended.experts) == 30
        assert len(extended.draws) == 2
        after = service.tokens(panel.id)
        assert set(after) == set(extended.experts)
        assert before < set(after)

    def test_cannot_exceed_roster(self, service):
        panel = service.create_panel("History", seed=7)
        with pytest.raises(SampleTooLarge):
            service.extend_panel(panel.id, 3, seed=11)


class TestTokens:
    def test_one_per_expert(self, service):
        panel = service.create_panel("History", seed=7)
        tokens = service.tokens(panel.id)
        assert set(tokens) == set(panel.experts)
        assert len(set(tokens.values())) == len(panel.experts)

    def test_urlsafe_128_bit(self, service):
        panel = service.create_panel("History", seed=7)
        for token in service.tokens(panel.id).values():
            # 16 random bytes encode to 22 url-safe characters
            assert len(token) == 22
            assert all(c.isalnum() or c in "-_" for c in token)

    def test_stable_across_calls(self, service):
        panel = service.create_panel("History", seed=7)
        assert service.tokens(panel.id) == service.tokens(panel.id)

    def test_resolve_round_trip(self, service):
        panel = service.create_panel("History", seed=7)
        for expert_id, token in service.tokens(panel.id).items():
            resolved_panel, resolved_expert = service.resolve_token(token)
            assert (resolved_panel.id, resolved_expert) == (panel.id, expert_id)

    def test_unknown_token(self, service):
        with pytest.raises(UnknownToken):
            service.resolve_token("not-a-token")


class TestExpertFlow:
    def test_questionnaire_document(self, service):
        panel_id = open_panel(service)
        token = next(iter(service.tokens(panel_id).values()))
        doc = service.questionnaire_for_token(token)
        assert doc["panel_id"] == panel_id
        assert doc["round"] == 1
        assert len(doc["items"]) == 8
        springer = next(i for i in doc["items"] if i["publisher"] == "Springer")
        assert springer == {
            "publisher": "Springer",
            "scope": "foreign",
            "displayed_numeric": 2,
            "displayed_letter": "C",
            "previous_numeric": None,
        }

    def test_round2_questionnaire_carries_round1_display(self, service):
        panel_id = open_panel(service)
        tokens = dict(sorted(service.tokens(panel_id).items()))
        expert_id, token = next(iter(tokens.items()))
        service.submit_response(
            token,
            items=[{"publisher": "Springer", "known": True, "disagree": True, "new_score": 4}],
        )
        service.close_round(panel_id, 1)
        service.open_round(panel_id, 2)
        doc = service.questionnaire_for_token(token)
        assert doc["round"] == 2
        springer = next(i for i in doc["items"] if i["publisher"] == "Springer")
        assert springer["displayed_numeric"] == 4
        assert springer["previous_numeric"] == 2
        untouched = next(i for i in doc["items"] if i["publisher"] == "Brill")
        assert untouched["previous_numeric"] == untouched["displayed_numeric"] == 1

    def test_no_open_round_rejected(self, service):
        panel = service.create_panel("History", seed=7)
        token = next(iter(service.tokens(panel.id).values()))
        with pytest.raises(RoundClosed):
            service.questionnaire_for_token(token)
        with pytest.raises(RoundClosed):
            service.submit_response(token, items=[])

    def test_submit_records_and_persists(self, service, store_path):
        panel_id = open_panel(service)
        expert_id, token = sorted(service.tokens(panel_id).items())[0]
        receipt = service.submit_response(
            token,
            items=[{"publisher": "Springer", "known": True, "disagree": True, "new_score": 3}],
            suggested_publishers=["Peter Lang"],
        )
        assert receipt["expert_id"] == expert_id
        assert receipt["items_recorded"] == 1
        fresh = PanelService(PanelStore(store_path))
        reloaded = fresh.get_panel(panel_id)
        assert expert_id in reloaded.responses[1]
        assert reloaded.responses[1][expert_id].suggested_publishers == ("Peter Lang",)

    def test_engine_validation_bubbles_up(self, service):
        panel_id = open_panel(service)
        token = next(iter(service.tokens(panel_id).values()))
        with pytest.raises(UnknownPublisher):
            service.submit_response(token, items=[{"publisher": "Elsevier", "known": True}])

    def test_concurrent_submissions_all_recorded(self, service, store_path):
        panel_id = open_panel(service)
        tokens = list(service.tokens(panel_id).values())[:8]

        def submit(token):
            service.submit_response(
                token,
                items=[
                    {"publisher": "Springer", "known": True, "disagree": True, "new_score": 3}
                ],
            )

        threads = [threading.Thread(target=submit, args=(t,)) for t in tokens]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        fresh = PanelService(PanelStore(store_path))
        assert len(fresh.get_panel(panel_id).responses[1]) == 8


class TestMailing:
    def test_mailing_list_covers_sample(self, service):
        panel_id = open_panel(service)
        rows = service.mailing_list(panel_id, base_url="https://host")
        tokens = service.tokens(panel_id)
        assert len(rows) == 28
        expert_id, email, url = rows[0]
        assert email == f"{expert_id}@uni.example"
        assert url == f"https://host/api/q/{tokens[expert_id]}"

    def test_reminders_filter_to_nonrespondents(self, service):
        panel_id = open_panel(service)
        responded, token = sorted(service.tokens(panel_id).items())[0]
        service.submit_response(token, items=[])
        rows = service.reminders(panel_id, 1, base_url="")
        assert responded not in {r[0] for r in rows}
        assert len(rows) == 27


def run_mini_consultation(service):
    """Tiny deterministic consultation over a four-expert roster."""
    service.import_roster_csv(roster_csv(4), "History")
    panel = service.create_panel("History", seed=1, panel_id="mini")
    tokens = service.tokens(panel.id)
    service.open_round(panel.id, 1)
    for expert_id, score in (("e00", 4), ("e01", 3)):
        service.submit_response(
            tokens[expert_id],
            items=[{"publisher": "Springer", "known": True, "disagree": True, "new_score": score}],
        )
    service.close_round(panel.id, 1)
    service.open_round(panel.id, 2)
    service.submit_response(
        tokens["e00"],
        items=[{"publisher": "Springer", "known": True, "disagree": True, "new_score": 3}],
    )
    service.close_round(panel.id, 2)
    service.finalize(panel.id)
    return panel.id


EXPECTED_FINAL_CSV = """\
publisher,scope,initial_numeric,round1_votes,round1_mean,round2_votes,round2_mean,final_numeric,final_letter
Alpha Press,domestic,3,0,,0,,3,B
Beta Editorial,domestic,2,0,,0,,2,C
Gamma Books,domestic,1,0,,0,,1,D
Delta House,domestic,1,0,,0,,1,D
Cambridge Scholars,foreign,3,0,,0,,3,B
Springer,foreign,2,2,3.5,1,3.0,3,B
Routledge,foreign,1,0,,0,,1,D
Brill,foreign,1,0,,0,,1,D
"""


class TestDocuments:
    def test_final_csv_golden(self, service):
        panel_id = run_mini_consultation(service)
        assert service.final_csv(panel_id) == EXPECTED_FINAL_CSV

    def test_aggregates_document(self, service):
        panel_id = run_mini_consultation(service)
        doc = service.aggregates_document(panel_id, 1)
        assert doc["aggregates"] == {
            "Springer": {"votes": 2, "mean_score": 3.5, "displayed_numeric": 2}
        }

    def test_response_rates_document(self, service):
        panel_id = run_mini_consultation(service)
        doc = service.response_rates_document(panel_id)
        assert doc["rows"][0]["sample_n"] == 4
        assert doc["rows"][0]["answers"] == 2
        assert doc["rows"][0]["rate_percent"] == 50.0
        assert doc["rows"][1]["sample_n"] == 2
        assert doc["rows"][1]["rate_percent"] == 50.0
        assert doc["totals"][0]["field"] == "TOTAL"

    def test_analytics_document(self, service):
        panel_id = run_mini_consultation(service)
        doc = service.analytics_document(panel_id)
        conc = doc["concentration"]
        assert conc["before"]["lorenz"][0] == [0.0, 0.0]
        assert conc["before"]["lorenz"][-1] == [1.0, 1.0]
        assert conc["delta"] == pytest.approx(conc["before"]["gini"] - conc["after"]["gini"])
        assert set(doc["change_stats"]) == {"domestic", "foreign"}
        assert doc["change_stats"]["foreign"]["mean"] == pytest.approx(0.25)

    def test_nonrespondents_document(self, service):
        panel_id = run_mini_consultation(service)
        doc = service.nonrespondents_document(panel_id, 2)
        assert doc["expert_ids"] == ["e01"]

    def test_ranking_csv_export(self, service):
        text = service.ranking_csv("History", Scope.DOMESTIC)
        lines = text.splitlines()
        assert lines[0] == (
            "publisher,position,icee,accum_share,quartile,category_letter,category_numeric"
        )
        assert lines[1] == "Alpha Press,1,2.0,40.00,2,B,3"
