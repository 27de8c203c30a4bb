"""HTTP facade: optimistic concurrency, error mapping, verbatim numbers."""

import json

import pytest
from fastapi.testclient import TestClient

from sherdkit.assembly import init_assembly
from sherdkit.fixtures import fixture_profiles, write_fixture_files
from sherdkit.service import DEFAULT_PORT, SessionStore, create_app


def fresh_client(log_path=None):
    store = SessionStore(init_assembly(fixture_profiles()), log_path=log_path)
    return TestClient(create_app(store)), store


def decide(client, rev, sherd_id, side="RIGHT", override=False):
    return client.post(
        "/api/decision",
        json={"sherd_id": sherd_id, "side": side, "override": override},
        headers={"If-Match": f'"{rev}"'},
    )


class TestStateView:
    def test_initial_view(self):
        client, _ = fresh_client()
        r = client.get("/api/state")
        assert r.status_code == 200
        assert r.headers["etag"] == '"0"'
        body = r.json()
        assert body["revision"] == 0
        assert body["log_length"] == 0
        assert body["complete"] is False
        assert body["strip"] == ["A4"]
        assert body["pool"] == ["A5", "B10", "C15", "C2"]
        assert len(body["meta"]["samples_mm"]) == 61
        assert body["meta"]["step_mm"] == 1.0
        assert body["meta"]["provenance"] == [1] * 61
        assert len(body["candidates"]) == 4
        top = body["candidates"][0]
        assert top["sherd_id"] == "C15"
        assert top["accepted"] is True
        assert top["match"]["offset"] == 13
        assert top["overlay"]["start_mm"] == 13.0
        assert body["config"]["min_overlap"] == 8

    def test_numbers_pass_through_unrounded(self):
        client, store = fresh_client()
        body = client.get("/api/state").json()
        assert body["meta"]["samples_mm"] == [
            float(x) for x in store.state.meta.profile.samples
        ]
        for cand in body["candidates"]:
            match = next(
                c.match for c in store.state.candidates if c.sherd_id == cand["sherd_id"]
            )
            assert cand["match"]["score"] == match.score
            assert cand["match"]["sad"] == match.sad
            prof = next(p for p in store.state.pool if p.sherd_id == cand["sherd_id"])
            assert cand["overlay"]["samples_mm"] == [float(x) for x in prof.samples]

    def test_store_from_directory(self, tmp_path):
        write_fixture_files(tmp_path)
        store = SessionStore.from_directory(tmp_path)
        view = store.view()
        assert view["strip"] == ["A4"]
        assert len(view["meta"]["samples_mm"]) == 61

    def test_default_port(self):
        assert DEFAULT_PORT == 7131


class TestDecision:
    def test_commit_top_candidate(self):
        client, _ = fresh_client()
        r = decide(client, 0, "C15", "RIGHT")
        assert r.status_code == 200
        assert r.headers["etag"] == '"1"'
        body = r.json()
        assert body["revision"] == 1
        assert body["log_length"] == 1
        assert body["strip"] == ["A4", "C15"]
        assert body["pool"] == ["A5", "B10", "C2"]
        placed = {p["sherd_id"]: p for p in body["placements"]}
        assert placed["C15"]["side"] == "RIGHT"
        assert placed["C15"]["offset_mm"] == 13.0
        assert placed["C15"]["decided_by"] == "HUMAN"

    def test_missing_if_match_is_stale(self):
        client, _ = fresh_client()
        r = client.post(
            "/api/decision", json={"sherd_id": "C15", "side": "RIGHT", "override": False}
        )
        assert r.status_code == 409
        assert "stale" in r.json()["error"]
        assert client.get("/api/state").json()["revision"] == 0

    def test_wrong_if_match_is_stale(self):
        client, _ = fresh_client()
        r = decide(client, 7, "C15")
        assert r.status_code == 409
        assert r.json()["revision"] == 0

    def test_etag_header_spellings(self):
        for raw in ('"0"', "0", 'W/"0"'):
            client, _ = fresh_client()
            r = client.post(
                "/api/decision",
                json={"sherd_id": "C15", "side": "LEFT", "override": False},
                headers={"If-Match": raw},
            )
            assert r.status_code == 200, raw

    def test_unknown_sherd(self):
        client, _ = fresh_client()
        r = decide(client, 0, "Z9")
        assert r.status_code == 404
        assert "Z9" in r.json()["error"]

    def test_non_top_candidate_needs_override(self):
        client, _ = fresh_client()
        r = decide(client, 0, "A5")
        assert r.status_code == 422
        assert "override" in r.json()["error"]

    def test_override_commits_and_logs(self, tmp_path):
        log = tmp_path / "session.log"
        client, _ = fresh_client(log_path=log)
        r = decide(client, 0, "A5", "LEFT", override=True)
        assert r.status_code == 200
        assert r.json()["log_length"] == 1
        lines = [json.loads(x) for x in log.read_text().splitlines()]
        assert lines == [
            {
                "action": "commit",
                "sherd_id": "A5",
                "side": "LEFT",
                "override": True,
                "revision": 1,
            }
        ]

    def test_bad_side_rejected_by_schema(self):
        client, _ = fresh_client()
        r = client.post(
            "/api/decision",
            json={"sherd_id": "C15", "side": "UP", "override": False},
            headers={"If-Match": '"0"'},
        )
        assert r.status_code == 422
        assert "detail" in r.json()

    def test_no_session_everywhere(self):
        client = TestClient(create_app(SessionStore(None)))
        assert client.get("/api/state").status_code == 503
        r = client.post(
            "/api/decision",
            json={"sherd_id": "C15", "side": "LEFT", "override": False},
            headers={"If-Match": '"0"'},
        )
        assert r.status_code == 503
        assert client.post("/api/undo").status_code == 503


class TestUndo:
    def test_undo_on_fresh_session(self):
        client, _ = fresh_client()
        r = client.post("/api/undo")
        assert r.status_code == 409
        assert "undo" in r.json()["error"]

    def test_commit_then_undo_restores_view(self):
        client, _ = fresh_client()
        before = client.get("/api/state").json()
        decide(client, 0, "C15")
        r = client.post("/api/undo", headers={"If-Match": '"1"'})
        assert r.status_code == 200
        after = r.json()
        assert after["revision"] == 2
        assert after["log_length"] == 0
        assert after["strip"] == ["A4"]
        assert after["meta"] == before["meta"]
        assert after["candidates"] == before["candidates"]

    def test_undo_with_stale_revision(self):
        client, _ = fresh_client()
        decide(client, 0, "C15")
        r = client.post("/api/undo", headers={"If-Match": '"0"'})
        assert r.status_code == 409

    def test_revision_strictly_increases(self):
        client, _ = fresh_client()
        revs = [client.get("/api/state").json()["revision"]]
        revs.append(decide(client, revs[-1], "C15").json()["revision"])
        revs.append(
            client.post("/api/undo", headers={"If-Match": f'"{revs[-1]}"'}).json()[
                "revision"
            ]
        )
        revs.append(decide(client, revs[-1], "C15", "LEFT").json()["revision"])
        assert revs == [0, 1, 2, 3]


class TestFullSession:
    def test_run_to_completion(self):
        client, _ = fresh_client()
        body = client.get("/api/state").json()
        while not body["complete"]:
            accepted = [c for c in body["candidates"] if c["accepted"]]
            pick = accepted[0] if accepted else body["candidates"][0]
            r = decide(
                client, body["revision"], pick["sherd_id"], "RIGHT",
                override=not accepted,
            )
            assert r.status_code == 200
            body = r.json()
        assert body["pool"] == []
        assert body["log_length"] == 4
        assert sorted(body["strip"]) == ["A4", "A5", "B10", "C15", "C2"]
        assert body["candidates"] == []


class TestRoot:
    def test_fallback_page(self):
        client, _ = fresh_client()
        r = client.get("/")
        assert r.status_code == 200
        assert "/api" in r.text

    def test_static_dir_mount(self, tmp_path):
        (tmp_path / "index.html").write_text("<p>browser ui</p>")
        store = SessionStore(init_assembly(fixture_profiles()))
        client = TestClient(create_app(store, static_dir=tmp_path))
        r = client.get("/")
        assert r.status_code == 200
        assert "browser ui" in r.text
