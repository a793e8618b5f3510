import json
import sqlite3
import threading

import pytest

from delphirank.ranking import Scope
from delphirank.store import CorruptRecord, PanelStore, StorageError, StorageUnavailable

from .helpers import make_panel, ranked, run_springer_panel, DOMESTIC_ROWS


@pytest.fixture
def store(tmp_path):
    return PanelStore(str(tmp_path / "test.db"))


class TestPanelPersistence:
    @pytest.mark.parametrize("stage", ["draft", "closed", "final"])
    def test_round_trip_equality(self, store, stage):
        if stage == "draft":
            panel = make_panel()
        elif stage == "closed":
            panel = make_panel()
            panel.open_round(1)
            panel.close_round(1)
        else:
            panel = run_springer_panel()
        store.save_panel(panel)
        loaded = store.load_panel(panel.id)
        assert loaded.to_dict() == panel.to_dict()

    def test_save_replaces(self, store):
        panel = make_panel()
        store.save_panel(panel)
        panel.open_round(1)
        store.save_panel(panel)
        assert store.load_panel(panel.id).state.value == "round1_open"

    def test_missing_is_none(self, store):
        assert store.load_panel("nope") is None

    def test_list_panels_sorted(self, store):
        store.save_panel(make_panel(panel_id="b-panel"))
        store.save_panel(make_panel(panel_id="a-panel"))
        assert store.list_panels() == ["a-panel", "b-panel"]

    def test_concurrent_saves_both_readable(self, store):
        panels = [make_panel(panel_id=f"panel-{i}") for i in range(8)]
        threads = [threading.Thread(target=store.save_panel, args=(p,)) for p in panels]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert store.list_panels() == sorted(p.id for p in panels)
        for p in panels:
            assert store.load_panel(p.id).to_dict() == p.to_dict()


class TestCorruption:
    def test_truncated_file(self, tmp_path):
        path = tmp_path / "broken.db"
        path.write_bytes(b"this is not a database file, far too short")
        with pytest.raises(CorruptRecord):
            PanelStore(str(path))

    def test_corrupt_panel_document(self, store):
        with sqlite3.connect(store.path) as conn:
            conn.execute(
                "INSERT INTO panels (panel_id, doc) VALUES (?, ?)", ("bad", "{not json")
            )
        with pytest.raises(CorruptRecord):
            store.load_panel("bad")

    def test_structurally_broken_document(self, store):
        with sqlite3.connect(store.path) as conn:
            conn.execute(
                "INSERT INTO panels (panel_id, doc) VALUES (?, ?)",
                ("bad", json.dumps({"id": "bad"})),
            )
        with pytest.raises(CorruptRecord):
            store.load_panel("bad")

    def test_unwritable_location(self, tmp_path):
        with pytest.raises(StorageUnavailable):
            PanelStore(str(tmp_path / "no" / "such" / "dir" / "x.db"))


class TestRankingsAndRosters:
    def test_ranking_round_trip(self, store):
        lst = ranked(DOMESTIC_ROWS, Scope.DOMESTIC)
        store.save_ranking(lst)
        loaded = store.load_ranking(lst.field.id, Scope.DOMESTIC)
        assert loaded.to_dict() == lst.to_dict()
        assert store.load_ranking(lst.field.id, Scope.FOREIGN) is None
        assert store.list_rankings() == [(lst.field.id, Scope.DOMESTIC)]

    def test_roster_round_trip(self, store):
        doc = {"subjects": [{"expert_id": "e1", "field": "History", "email": ""}]}
        store.save_roster("history", doc)
        assert store.load_roster("history") == doc
        assert store.load_roster("geography") is None


class TestTokens:
    def test_save_and_resolve(self, store):
        store.save_token("tok-abc", "panel-1", "e1", "2015-06-01T00:00:00+00:00")
        assert store.resolve_token("tok-abc") == ("panel-1", "e1")

    def test_unknown_token_is_none(self, store):
        assert store.resolve_token("nope") is None

    def test_tokens_for_panel(self, store):
        store.save_token("t1", "panel-1", "e1", "now")
        store.save_token("t2", "panel-1", "e2", "now")
        store.save_token("t3", "panel-2", "e1", "now")
        assert store.tokens_for_panel("panel-1") == {"e1": "t1", "e2": "t2"}

    def test_one_token_per_expert_per_panel(self, store):
        store.save_token("t1", "panel-1", "e1", "now")
        with pytest.raises(StorageError):
            store.save_token("t2", "panel-1", "e1", "now")
