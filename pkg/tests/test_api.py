from datetime import timedelta

import pytest
from fastapi.testclient import TestClient

from rallypoint.api import build_app
from rallypoint.timeutil import format_ts
from tests.conftest import T0


@pytest.fixture
def client(rig):
    app = build_app(rig.engine)
    with TestClient(app, raise_server_exceptions=False) as test_client:
        test_client.rig = rig
        yield test_client


def park_body(**overrides):
    body = {
        "name": "Park cleanup",
        "rationale": "our park deserves better",
        "hashtag": "#parkday",
        "selection_deadline": format_ts(T0 + timedelta(hours=24)),
        "execution_time": format_ts(T0 + timedelta(hours=48)),
        "creator": "haoqi",
    }
    body.update(overrides)
    return body


class TestCreate:
    def test_create_returns_view_and_suggested_kickoff(self, client):
        response = client.post("/missions", json=park_body())
        assert response.status_code == 201
        body = response.json()
        assert body["phase"] == "Ideation"
        assert body["mission_id"] == "parkday"
        assert len(body["suggested_kickoff"]) <= 140
        assert "#parkday" in body["suggested_kickoff"]
        assert body["seconds_to_next_stage"] == 4 * 3600

    def test_bad_schedule_is_400(self, client):
        body = park_body(execution_time=park_body()["selection_deadline"])
        response = client.post("/missions", json=body)
        assert response.status_code == 400
        assert response.json()["error"] == "InvalidSchedule"

    def test_bad_hashtag_is_400(self, client):
        response = client.post("/missions", json=park_body(hashtag="#Park Day"))
        assert response.status_code == 400
        assert response.json()["error"] == "InvalidHashtag"

    def test_oversized_kickoff_is_413(self, client):
        body = park_body(kickoff_text="#parkday idea: " + "x" * 140)
        response = client.post("/missions", json=body)
        assert response.status_code == 413

    def test_unparseable_timestamp_is_400(self, client):
        response = client.post("/missions",
                               json=park_body(selection_deadline="tomorrow"))
        assert response.status_code == 400


class TestContribute:
    def create(self, client):
        return client.post("/missions", json=park_body()).json()["mission_id"]

    def test_idea_then_votes_update_view(self, client):
        mission_id = self.create(client)
        response = client.post(f"/missions/{mission_id}/ideas",
                               json={"author": "alice", "text": "Pick up litter"})
        assert response.status_code == 200
        idea_id = response.json()["ideas"][0]["idea_id"]
        response = client.post(f"/missions/{mission_id}/votes",
                               json={"author": "bob", "idea_id": idea_id,
                                     "kind": "favorite"})
        assert response.json()["ideas"][0]["votes"] == 2

    def test_decoration_only_idea_is_400(self, client):
        mission_id = self.create(client)
        response = client.post(f"/missions/{mission_id}/ideas",
                               json={"author": "alice", "text": "#parkday"})
        assert response.status_code == 400
        assert response.json()["error"] == "EmptyAfterCanonicalization"

    def test_vote_for_unknown_idea_is_400(self, client):
        mission_id = self.create(client)
        response = client.post(f"/missions/{mission_id}/votes",
                               json={"author": "bob", "idea_id": "i9999"})
        assert response.status_code == 400
        assert response.json()["error"] == "UnknownIdea"

    def test_vote_during_planning_is_400(self, client):
        mission_id = self.create(client)
        client.post(f"/missions/{mission_id}/ideas",
                    json={"author": "alice", "text": "Pick up litter"})
        idea_id = client.get(f"/missions/{mission_id}").json()["ideas"][0]["idea_id"]
        client.rig.clock.advance(timedelta(hours=25))
        client.rig.engine.tick()
        response = client.post(f"/missions/{mission_id}/votes",
                               json={"author": "bob", "idea_id": idea_id})
        assert response.status_code == 400
        assert response.json()["error"] == "IllegalInPhase"

    def test_details_subscribe_cancel_flow(self, client):
        mission_id = self.create(client)
        client.post(f"/missions/{mission_id}/ideas",
                    json={"author": "alice", "text": "Pick up litter"})
        client.rig.clock.advance(timedelta(hours=25))
        client.rig.engine.tick()
        response = client.post(f"/missions/{mission_id}/details",
                               json={"author": "bob", "text": "north gate"})
        assert response.status_code == 200
        assert response.json()["details"][0]["text"] == "north gate"
        response = client.post(f"/missions/{mission_id}/subscribe",
                               json={"author": "gina",
                                     "phases": ["ActionPending"]})
        assert response.status_code == 200
        response = client.post(f"/missions/{mission_id}/cancel",
                               json={"author": "haoqi"})
        assert response.json()["phase"] == "Cancelled"

    def test_bad_subscribe_phase_is_400(self, client):
        mission_id = self.create(client)
        response = client.post(f"/missions/{mission_id}/subscribe",
                               json={"author": "gina", "phases": ["Sometime"]})
        assert response.status_code == 400


class TestRead:
    def test_unknown_mission_is_404(self, client):
        assert client.get("/missions/ghost").status_code == 404

    def test_listing_and_healthz(self, client):
        client.post("/missions", json=park_body())
        listing = client.get("/missions").json()
        assert [m["mission_id"] for m in listing] == ["parkday"]
        assert listing[0]["phase"] == "Ideation"
        assert client.get("/healthz").json() == {"status": "ok"}

    def test_timeline_and_leaders_routes(self, client):
        client.post("/missions", json=park_body())
        client.post("/missions/parkday/ideas",
                    json={"author": "alice", "text": "Pick up litter"})
        timeline = client.get("/missions/parkday/timeline").json()
        assert timeline[0]["phase"] == "Ideation"
        leaders = client.get("/missions/parkday/leaders").json()
        assert leaders == [{"participant": "alice", "score": 3}]

    def test_idea_order_matches_tally_order(self, client):
        client.post("/missions", json=park_body())
        client.post("/missions/parkday/ideas",
                    json={"author": "alice", "text": "first idea"})
        client.post("/missions/parkday/ideas",
                    json={"author": "bob", "text": "second idea"})
        view = client.get("/missions/parkday").json()
        idea_id = view["ideas"][1]["idea_id"]
        for voter in ("carol", "dave"):
            client.post("/missions/parkday/votes",
                        json={"author": voter, "idea_id": idea_id})
        view = client.get("/missions/parkday").json()
        assert [i["rank"] for i in view["ideas"]] == [1, 2]
        assert view["ideas"][0]["idea_id"] == idea_id

    def test_countdown_monotone_in_now(self, client):
        client.post("/missions", json=park_body())
        first = client.get("/missions/parkday").json()["seconds_to_next_stage"]
        client.rig.clock.advance(timedelta(minutes=30))
        second = client.get("/missions/parkday").json()["seconds_to_next_stage"]
        assert second == first - 1800
