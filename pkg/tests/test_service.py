import json

import pytest
from fastapi.testclient import TestClient

from lrselect.service import create_app

from .conftest import FIXTURES


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def fatty_session(client):
    csv_text = (FIXTURES / "fatty_acids.csv").read_text()
    response = client.post(
        "/sessions", content=csv_text, params={"closure": 100.0}
    )
    assert response.status_code == 201
    return response.json()


TOY = "Season,a,b,c\nw,2,3,5\nw,1,1,8\ns,4,4,2\ns,2,5,3\n"


@pytest.fixture()
def toy_session(client):
    response = client.post("/sessions", content=TOY)
    assert response.status_code == 201
    return response.json()


class TestSessionCreation:
    def test_upload_summary(self, fatty_session):
        assert fatty_session["parts"] == 40
        assert fatty_session["samples"] == 42
        assert fatty_session["replaced_cells"] == 187
        assert fatty_session["group_levels"] == ["spring", "summer", "winter"]
        assert fatty_session["total_logratio_variance"] == pytest.approx(
            0.3358709834, abs=1e-9
        )

    def test_all_zero_column_is_400_naming_part(self, client):
        bad = "Season,a,b\nw,1,0\nw,2,0\n"
        response = client.post("/sessions", content=bad)
        assert response.status_code == 400
        assert "'b'" in response.json()["detail"]

    def test_closure_invariance_of_total(self, client):
        percent = "Season,a,b\nw,25,75\nw,40,60\n"
        proportion = "Season,a,b\nw,0.25,0.75\nw,0.4,0.6\n"
        t1 = client.post("/sessions", content=percent).json()
        t2 = client.post("/sessions", content=proportion).json()
        assert t1["total_logratio_variance"] == pytest.approx(
            t2["total_logratio_variance"], rel=1e-12
        )

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope").status_code == 404


def import_full_hierarchy(client, session_id):
    doc = json.loads((FIXTURES / "fatty_acid_hierarchy.json").read_text())
    response = client.post(f"/sessions/{session_id}/hierarchy", json=doc)
    assert response.status_code == 200
    return response.json()


class TestEvaluate:
    def test_first_step_candidates(self, client, fatty_session):
        sid = fatty_session["id"]
        # define the three major groups as root nodes, then score their SLRs
        doc = json.loads((FIXTURES / "fatty_acid_hierarchy.json").read_text())
        roots_only = {
            "nodes": [n for n in doc["nodes"] if n["name"] in ("SFA", "MUFA", "PUFA")],
            "splits": [],
            "slrs": [],
        }
        client.post(f"/sessions/{sid}/hierarchy", json=roots_only)
        response = client.post(
            f"/sessions/{sid}/evaluate",
            json={
                "candidates": [
                    {"num": "PUFA", "den": "SFA"},
                    {"num": "MUFA", "den": "SFA"},
                    {"num": "PUFA", "den": "MUFA"},
                ]
            },
        )
        body = response.json()
        assert body["base_pct"] == 0.0
        top = body["candidates"][0]
        assert top["label"] == "PUFA/SFA"
        assert top["additional_pct"] == pytest.approx(28.74, abs=0.01)

    def test_evaluate_is_pure(self, client, toy_session):
        sid = toy_session["id"]
        payload = {"candidates": [{"num": ["a"], "den": ["b"]}]}
        first = client.post(f"/sessions/{sid}/evaluate", json=payload).json()
        second = client.post(f"/sessions/{sid}/evaluate", json=payload).json()
        assert first == second

    def test_duplicate_of_committed_scores_zero(self, client, toy_session):
        sid = toy_session["id"]
        client.post(
            f"/sessions/{sid}/split",
            json={
                "parent": None,
                "children": [
                    {"name": "A", "parts": ["a"]},
                    {"name": "B", "parts": ["b"]},
                    {"name": "C", "parts": ["c"]},
                ],
            },
        )
        client.post(f"/sessions/{sid}/commit", json={"num": "A", "den": "B"})
        body = client.post(
            f"/sessions/{sid}/evaluate",
            json={"candidates": [{"num": "A", "den": "B"}]},
        ).json()
        assert body["candidates"][0]["additional_pct"] == 0.0
        assert body["candidates"][0]["is_committed"]

    def test_invalid_spec_422(self, client, toy_session):
        sid = toy_session["id"]
        response = client.post(
            f"/sessions/{sid}/evaluate",
            json={"candidates": [{"num": ["a"], "den": ["zzz"]}]},
        )
        assert response.status_code == 422


class TestCommitUndo:
    def setup_roots(self, client, sid):
        return client.post(
            f"/sessions/{sid}/split",
            json={
                "parent": None,
                "children": [
                    {"name": "A", "parts": ["a"]},
                    {"name": "B", "parts": ["b"]},
                    {"name": "C", "parts": ["c"]},
                ],
            },
        ).json()

    def test_commit_then_undo_restores_state(self, client, toy_session):
        sid = toy_session["id"]
        before = self.setup_roots(client, sid)
        after = client.post(
            f"/sessions/{sid}/commit", json={"num": "A", "den": "B"}
        ).json()
        assert after["trace"]["steps"][0]["chosen"] == "A/B"
        undone = client.post(f"/sessions/{sid}/undo").json()
        assert undone["hierarchy"] == before["hierarchy"]
        assert undone["trace"] == before["trace"]
        redone = client.post(f"/sessions/{sid}/redo").json()
        assert redone["hierarchy"] == after["hierarchy"]
        assert redone["trace"] == after["trace"]

    def test_commit_non_sibling_409_with_state(self, client, toy_session):
        sid = toy_session["id"]
        self.setup_roots(client, sid)
        client.post(
            f"/sessions/{sid}/split",
            json={
                "parent": None,
                "children": [],
            },
        )
        response = client.post(
            f"/sessions/{sid}/commit", json={"num": "A", "den": "A"}
        )
        assert response.status_code == 409
        assert "state" in response.json()["detail"]

    def test_commit_unknown_node_422(self, client, toy_session):
        sid = toy_session["id"]
        response = client.post(
            f"/sessions/{sid}/commit", json={"num": "A", "den": "B"}
        )
        assert response.status_code == 422

    def test_manual_commit_flagged(self, client, toy_session):
        sid = toy_session["id"]
        self.setup_roots(client, sid)
        body = client.post(
            f"/sessions/{sid}/commit", json={"num": "B", "den": "C", "manual": True}
        ).json()
        assert body["trace"]["steps"][0]["manual"] is True

    def test_bad_split_422(self, client, toy_session):
        sid = toy_session["id"]
        response = client.post(
            f"/sessions/{sid}/split",
            json={
                "parent": None,
                "children": [
                    {"name": "A", "parts": ["a", "b"]},
                    {"name": "B", "parts": ["b", "c"]},
                ],
            },
        )
        assert response.status_code == 422

    def test_undo_empty_409(self, client, toy_session):
        assert client.post(f"/sessions/{toy_session['id']}/undo").status_code == 409


class TestExpertWorkflow:
    def test_import_reproduces_sequence(self, client, fatty_session):
        sid = fatty_session["id"]
        state = import_full_hierarchy(client, sid)
        cums = [s["cumulative_pct"] for s in state["trace"]["steps"]]
        assert cums[0] == pytest.approx(28.74, abs=0.01)
        assert cums[1] == pytest.approx(38.11, abs=0.01)
        assert cums[-1] == pytest.approx(63.16, abs=0.01)

    def test_tie_visible_at_step_two(self, client, fatty_session):
        sid = fatty_session["id"]
        state = import_full_hierarchy(client, sid)
        step2 = state["trace"]["steps"][1]
        assert sorted(step2["tie_set"]) == ["MUFA/PUFA", "MUFA/SFA"]
        assert step2["chosen"] in step2["tie_set"]

    def test_ordination_modes(self, client, fatty_session):
        sid = fatty_session["id"]
        import_full_hierarchy(client, sid)

        lra_doc = client.get(
            f"/sessions/{sid}/ordination", params={"mode": "lra", "target": "parts"}
        ).json()
        assert lra_doc["dim_percentages"][0] + lra_doc["dim_percentages"][1] == (
            pytest.approx(53.3, abs=0.1)
        )

        roots_doc = client.get(
            f"/sessions/{sid}/ordination", params={"mode": "lra", "target": "roots"}
        ).json()
        assert roots_doc["dim_percentages"][0] == pytest.approx(86.2, abs=0.1)

        pca_doc = client.get(
            f"/sessions/{sid}/ordination", params={"mode": "pca-slr"}
        ).json()
        assert len(pca_doc["variables"]) == 7
        assert set(pca_doc["group_hulls"]) == {"spring", "summer", "winter"}

        ternary = client.get(
            f"/sessions/{sid}/ordination", params={"mode": "ternary"}
        ).json()
        assert len(ternary["points"]) == 42
        for p in ternary["points"]:
            assert -1e-9 <= p["x"] <= 1 + 1e-9
            assert -1e-9 <= p["y"] <= 0.8661

    def test_ternary_shape_mismatch_422(self, client, toy_session):
        sid = toy_session["id"]
        response = client.get(f"/sessions/{sid}/ordination", params={"mode": "ternary"})
        assert response.status_code == 422

    def test_pca_slr_without_commits_422(self, client, fatty_session):
        sid = fatty_session["id"]
        response = client.get(f"/sessions/{sid}/ordination", params={"mode": "pca-slr"})
        assert response.status_code == 422

    def test_amalgamated_rows(self, client, fatty_session):
        sid = fatty_session["id"]
        import_full_hierarchy(client, sid)
        body = client.get(f"/sessions/{sid}/amalgamated").json()
        assert body["parts"] == ["SFA", "MUFA", "PUFA"]
        assert len(body["rows"]) == 42
        for row in body["rows"]:
            assert sum(row) == pytest.approx(100.0, rel=1e-9)

    def test_export_matches_state(self, client, fatty_session):
        sid = fatty_session["id"]
        import_full_hierarchy(client, sid)
        export = client.get(f"/sessions/{sid}/export").json()
        assert len(export["slr_definitions"]) == 7
        assert len(export["hierarchy"]["nodes"]) == 12
        labels = [d["label"] for d in export["slr_definitions"]]
        assert labels[0] == "PUFA/SFA"
        assert labels[-1] == "SFAbranched/SFAodd"

    def test_export_import_round_trip(self, client, fatty_session):
        sid = fatty_session["id"]
        import_full_hierarchy(client, sid)
        export1 = client.get(f"/sessions/{sid}/export").json()

        fresh = client.post(
            "/sessions",
            content=(FIXTURES / "fatty_acids.csv").read_text(),
            params={"closure": 100.0},
        ).json()
        client.post(f"/sessions/{fresh['id']}/hierarchy", json=export1["hierarchy"])
        export2 = client.get(f"/sessions/{fresh['id']}/export").json()

        assert export1["hierarchy"] == export2["hierarchy"]
        assert export1["trace"] == export2["trace"]
        assert export1["slr_definitions"] == export2["slr_definitions"]

    def test_empty_session_export_valid(self, client, toy_session):
        export = client.get(f"/sessions/{toy_session['id']}/export").json()
        assert export["slr_definitions"] == []
        assert export["trace"]["steps"] == []


class TestCrossInterfaceConsistency:
    def test_service_evaluate_matches_library(self, client, toy_session):
        # exhaustive PLR candidates on the toy session: the service body
        # must carry the exact numbers the engine computes directly
        sid = toy_session["id"]
        names = ["a", "b", "c"]
        payload = {
            "candidates": [
                {"num": [names[j]], "den": [names[k]]}
                for j in range(3)
                for k in range(j + 1, 3)
            ]
        }
        body = client.post(f"/sessions/{sid}/evaluate", json=payload).json()

        from lrselect import (
            LogratioSpec,
            close,
            evaluate_candidates,
            parse_composition_csv,
            replace_zeros,
        )

        m = parse_composition_csv(TOY)
        m, _ = replace_zeros(m)
        m = close(m, 1.0)
        specs = [
            LogratioSpec.plr(j, k, name=f"{names[j]}/{names[k]}")
            for j in range(3)
            for k in range(j + 1, 3)
        ]
        direct = evaluate_candidates(m, candidates=specs)
        expected = {s.label: s.additional_pct for s in direct}
        for row in body["candidates"]:
            assert row["additional_pct"] == pytest.approx(
                expected[row["label"]], abs=1e-12
            )


class TestPersistence:
    def test_write_through(self, tmp_path):
        client = TestClient(create_app(data_dir=str(tmp_path)))
        session = client.post("/sessions", content=TOY).json()
        client.post(
            f"/sessions/{session['id']}/split",
            json={
                "parent": None,
                "children": [
                    {"name": "A", "parts": ["a"]},
                    {"name": "B", "parts": ["b", "c"]},
                ],
            },
        )
        path = tmp_path / f"{session['id']}.json"
        assert path.exists()
        doc = json.loads(path.read_text())
        assert len(doc["hierarchy"]["nodes"]) == 2
