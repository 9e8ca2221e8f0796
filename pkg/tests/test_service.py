from __future__ import annotations

import base64
import io
import zipfile

import pytest
from fastapi.testclient import TestClient

from litkb.annotation import annotation_set_to_dict
from litkb.service import ServiceConfig, create_app
from synth import SHAPE_SCHEMA, shape_corpus, shape_gold

TOKENS = {"tok-alice": "alice", "tok-bob": "bob", "tok-carol": "carol"}


def auth(token):
    return {"Authorization": f"Bearer {token}"}


ALICE = auth("tok-alice")
BOB = auth("tok-bob")
CAROL = auth("tok-carol")


@pytest.fixture
def service(tmp_path):
    app = create_app(ServiceConfig(data_dir=tmp_path, tokens=TOKENS, manual_jobs=True))
    client = TestClient(app)
    yield client, app.state.store
    app.state.store.close()


@pytest.fixture
def project(service):
    client, store = service
    resp = client.post("/v1/projects", json={"name": "demo"}, headers=ALICE)
    assert resp.status_code == 201
    pid = resp.json()["project_id"]
    client.post(
        f"/v1/projects/{pid}/members",
        json={"user_id": "bob", "privilege": "annotator"},
        headers=ALICE,
    )
    client.post(
        f"/v1/projects/{pid}/members",
        json={"user_id": "carol", "privilege": "viewer"},
        headers=ALICE,
    )
    return client, store, pid


def run_jobs(client, store, job_id):
    store.run_pending()
    resp = client.get(f"/v1/jobs/{job_id}", headers=ALICE)
    assert resp.status_code == 200
    body = resp.json()
    assert body["state"] == "done", body["log"]
    return body


@pytest.fixture
def loaded(project):
    """Project with the shape corpus ingested and gold human annotations."""
    client, store, pid = project
    doc = shape_corpus(seed=31, n_paragraphs=8)
    # re-create the payload deterministically from the document text
    payload = "\n\n".join(p.text for p in doc.paragraphs)
    resp = client.post(
        f"/v1/projects/{pid}/documents",
        json={"format": "plain-text", "content": payload},
        headers=ALICE,
    )
    assert resp.status_code == 202
    run_jobs(client, store, resp.json()["job_id"])
    doc_id = client.get(f"/v1/projects/{pid}/documents", headers=ALICE).json()[
        "documents"
    ][0]["doc_id"]

    client.put(
        f"/v1/projects/{pid}/schema",
        json={
            "entities": sorted(SHAPE_SCHEMA.entity_types),
            "rules": [list(r) for r in sorted(SHAPE_SCHEMA.relation_rules)],
        },
        headers=ALICE,
    )
    gold = annotation_set_to_dict(shape_gold(doc))
    resp = client.put(
        f"/v1/projects/{pid}/documents/{doc_id}/annotations",
        json={"entities": gold["entities"], "relations": gold["relations"]},
        headers=BOB,
    )
    assert resp.status_code == 200, resp.json()
    return client, store, pid, doc_id


class TestAuth:
    def test_missing_token(self, service):
        client, _ = service
        assert client.get("/v1/projects").status_code == 401

    def test_unknown_token(self, service):
        client, _ = service
        assert client.get("/v1/projects", headers=auth("wrong")).status_code == 401
        body = client.get("/v1/projects", headers=auth("wrong")).json()
        assert body["code"] == "unauthenticated"


class TestProjects:
    def test_create_and_list(self, service):
        client, _ = service
        resp = client.post("/v1/projects", json={"name": "p1"}, headers=ALICE)
        assert resp.status_code == 201
        listed = client.get("/v1/projects", headers=ALICE).json()["projects"]
        assert [p["name"] for p in listed] == ["p1"]
        assert listed[0]["privilege"] == "owner"

    def test_duplicate_name_conflict(self, service):
        client, _ = service
        client.post("/v1/projects", json={"name": "p1"}, headers=ALICE)
        assert (
            client.post("/v1/projects", json={"name": "p1"}, headers=ALICE).status_code
            == 409
        )

    def test_non_member_forbidden(self, project):
        client, _, pid = project
        resp = client.post("/v1/projects", json={"name": "other"}, headers=BOB)
        other_owner_view = client.get(
            f"/v1/projects/{pid}/documents", headers=auth("tok-carol")
        )
        assert other_owner_view.status_code == 200  # carol is a viewer
        # someone with no membership at all:
        outsider = client.post("/v1/projects", json={"name": "x"}, headers=BOB)
        assert outsider.status_code == 201
        resp = client.get(f"/v1/projects/{resp.json()['project_id']}/documents", headers=CAROL)
        assert resp.status_code == 403

    def test_unknown_project_404(self, service):
        client, _ = service
        assert client.get("/v1/projects/beef00/documents", headers=ALICE).status_code == 404

    def test_member_management_owner_only(self, project):
        client, _, pid = project
        resp = client.post(
            f"/v1/projects/{pid}/members",
            json={"user_id": "dave", "privilege": "viewer"},
            headers=BOB,
        )
        assert resp.status_code == 403


class TestDocuments:
    def test_upload_and_browse(self, project):
        client, store, pid = project
        resp = client.post(
            f"/v1/projects/{pid}/documents",
            json={"format": "plain-text", "content": "One two. Three four.\n\nFive six."},
            headers=ALICE,
        )
        assert resp.status_code == 202
        job = run_jobs(client, store, resp.json()["job_id"])
        assert job["kind"] == "ingest"
        assert "ingested 1" in job["log"]
        docs = client.get(f"/v1/projects/{pid}/documents", headers=CAROL).json()["documents"]
        assert docs[0]["paragraphs"] == 2
        paras = client.get(
            f"/v1/projects/{pid}/documents/{docs[0]['doc_id']}/paragraphs", headers=CAROL
        ).json()["paragraphs"]
        assert paras[0]["text"] == "One two. Three four."
        assert paras[0]["sentences"][0]["tokens"][0]["surface"] == "One"

    def test_upload_archive(self, project):
        client, store, pid = project
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as zf:
            zf.writestr("a.txt", "Alpha beta.")
            zf.writestr("b.txt", "Gamma delta.")
        resp = client.post(
            f"/v1/projects/{pid}/documents",
            json={"archive_b64": base64.b64encode(buf.getvalue()).decode()},
            headers=ALICE,
        )
        assert resp.status_code == 202
        job = run_jobs(client, store, resp.json()["job_id"])
        assert "ingested 2" in job["log"]

    def test_upload_requires_owner(self, project):
        client, _, pid = project
        resp = client.post(
            f"/v1/projects/{pid}/documents",
            json={"format": "plain-text", "content": "Nope."},
            headers=BOB,
        )
        assert resp.status_code == 403

    def test_bad_body_422(self, project):
        client, _, pid = project
        resp = client.post(f"/v1/projects/{pid}/documents", json={}, headers=ALICE)
        assert resp.status_code == 422
        assert resp.json()["code"] == "bad_upload"


class TestSchema:
    def test_put_get(self, project):
        client, _, pid = project
        resp = client.put(
            f"/v1/projects/{pid}/schema",
            json={"entities": ["A", "B"], "rules": [["A", "r", "B"]]},
            headers=ALICE,
        )
        assert resp.status_code == 200
        got = client.get(f"/v1/projects/{pid}/schema", headers=CAROL).json()
        assert got == {"entities": ["A", "B"], "rules": [["A", "r", "B"]]}

    def test_put_requires_owner(self, project):
        client, _, pid = project
        resp = client.put(
            f"/v1/projects/{pid}/schema", json={"entities": ["A"]}, headers=BOB
        )
        assert resp.status_code == 403

    def test_bad_schema_422(self, project):
        client, _, pid = project
        resp = client.put(
            f"/v1/projects/{pid}/schema",
            json={"entities": ["A"], "rules": [["A", "r", "MISSING"]]},
            headers=ALICE,
        )
        assert resp.status_code == 422


class TestAnnotations:
    def test_viewer_put_forbidden(self, loaded):
        client, _, pid, doc_id = loaded
        resp = client.put(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations",
            json={"entities": [], "relations": []},
            headers=CAROL,
        )
        assert resp.status_code == 403

    def test_put_validates_schema_422(self, loaded):
        client, _, pid, doc_id = loaded
        paras = client.get(
            f"/v1/projects/{pid}/documents/{doc_id}/paragraphs", headers=ALICE
        ).json()["paragraphs"]
        para = paras[0]
        resp = client.put(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations",
            json={
                "entities": [
                    {
                        "ann_id": "T1",
                        "entity_type": "NOT_IN_SCHEMA",
                        "para_id": para["para_id"],
                        "span": [0, 3],
                        "surface": para["text"][0:3],
                    }
                ],
                "relations": [],
            },
            headers=BOB,
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "annotation_validation"
        assert resp.json()["details"][0]["kind"] == "unknown_entity_type"

    def test_surface_mismatch_422(self, loaded):
        client, _, pid, doc_id = loaded
        paras = client.get(
            f"/v1/projects/{pid}/documents/{doc_id}/paragraphs", headers=ALICE
        ).json()["paragraphs"]
        resp = client.put(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations",
            json={
                "entities": [
                    {
                        "ann_id": "T1",
                        "entity_type": "CODE",
                        "para_id": paras[0]["para_id"],
                        "span": [0, 3],
                        "surface": "zzz",
                    }
                ],
                "relations": [],
            },
            headers=BOB,
        )
        assert resp.status_code == 422
        kinds = {d["kind"] for d in resp.json()["details"]}
        assert "surface_mismatch" in kinds

    def test_standoff_roundtrip(self, loaded):
        client, _, pid, doc_id = loaded
        stored = client.get(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations", headers=CAROL
        ).json()
        para_ids = {e["para_id"] for e in stored["entities"]}
        para_id = sorted(para_ids)[0]
        standoff = client.get(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations",
            params={"format": "standoff", "para_id": para_id},
            headers=CAROL,
        )
        assert standoff.status_code == 200
        text = standoff.text
        assert text.startswith("T1\t")
        resp = client.put(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations",
            json={"standoff": text, "para_id": para_id},
            headers=BOB,
        )
        assert resp.status_code == 200
        again = client.get(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations",
            params={"format": "standoff", "para_id": para_id},
            headers=CAROL,
        )
        assert again.text == text

    def test_revise_delete_cascades(self, loaded):
        client, _, pid, doc_id = loaded
        stored = client.get(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations", headers=CAROL
        ).json()
        rel = stored["relations"][0]
        resp = client.post(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations/revise",
            json={"base_layer": "human", "edits": [{"op": "delete", "ann_id": rel["arg1"]}]},
            headers=BOB,
        )
        assert resp.status_code == 200
        after = resp.json()
        assert rel["arg1"] not in {e["ann_id"] for e in after["entities"]}
        assert rel["ann_id"] not in {r["ann_id"] for r in after["relations"]}

    def test_revise_unknown_id_422(self, loaded):
        client, _, pid, doc_id = loaded
        resp = client.post(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations/revise",
            json={"edits": [{"op": "delete", "ann_id": "T999"}]},
            headers=BOB,
        )
        assert resp.status_code == 422


class TestPipelineJobs:
    def test_full_cycle(self, loaded):
        client, store, pid, doc_id = loaded
        # train ner, then rc (second submit while first queued conflicts)
        r1 = client.post(
            f"/v1/projects/{pid}/train", json={"target": "ner"}, headers=ALICE
        )
        assert r1.status_code == 202
        conflict = client.post(
            f"/v1/projects/{pid}/train", json={"target": "rc"}, headers=ALICE
        )
        assert conflict.status_code == 409
        # synchronous writes also conflict while the job is active
        put = client.put(
            f"/v1/projects/{pid}/schema", json={"entities": ["X"]}, headers=ALICE
        )
        assert put.status_code == 409
        job = run_jobs(client, store, r1.json()["job_id"])
        assert job["kind"] == "train_ner"

        r2 = client.post(
            f"/v1/projects/{pid}/train", json={"target": "rc"}, headers=ALICE
        )
        assert r2.status_code == 202
        run_jobs(client, store, r2.json()["job_id"])

        r3 = client.post(
            f"/v1/projects/{pid}/auto-annotate", json={"documents": [doc_id]}, headers=BOB
        )
        assert r3.status_code == 202
        job = run_jobs(client, store, r3.json()["job_id"])
        assert job["kind"] == "auto_annotate"

        model_layer = client.get(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations",
            params={"layer": "model"},
            headers=CAROL,
        ).json()
        assert model_layer["entities"]
        assert all(e["provenance"] == "model" for e in model_layer["entities"])

        ev = client.post(
            f"/v1/projects/{pid}/evaluate",
            json={"documents": [doc_id], "pred_layer": "model", "gold_layer": "human"},
            headers=CAROL,
        )
        assert ev.status_code == 200
        body = ev.json()
        assert 0.0 <= body["micro_f1"] <= 1.0
        assert body["support"] > 0

        g = client.post(f"/v1/projects/{pid}/graph/build", headers=ALICE)
        run_jobs(client, store, g.json()["job_id"])
        i = client.post(f"/v1/projects/{pid}/index/build", headers=ALICE)
        run_jobs(client, store, i.json()["job_id"])

        triples = client.get(
            f"/v1/projects/{pid}/graph/triples",
            params={"relation": "activates"},
            headers=CAROL,
        ).json()["triples"]
        assert all(t["relation"] == "activates" for t in triples)

        answer = client.post(
            f"/v1/projects/{pid}/ask",
            json={"text": "What does the first code activate?", "model_id": "mock"},
            headers=CAROL,
        )
        assert answer.status_code == 200
        body = answer.json()
        assert len(body["contexts"]) == 3
        assert len(body["per_context"]) == 3
        assert body["summary"]
        assert body["subgraph"]["nodes"]

    def test_regex_auto_annotate(self, loaded):
        client, store, pid, doc_id = loaded
        resp = client.post(
            f"/v1/projects/{pid}/auto-annotate",
            json={
                "mode": "regex",
                "rules": [{"entity_type": "QTY", "pattern": r"\b[0-9]{4}\b"}],
            },
            headers=BOB,
        )
        assert resp.status_code == 202
        run_jobs(client, store, resp.json()["job_id"])
        layer = client.get(
            f"/v1/projects/{pid}/documents/{doc_id}/annotations",
            params={"layer": "regex"},
            headers=CAROL,
        ).json()
        assert layer["entities"]
        assert all(e["provenance"] == "regex" for e in layer["entities"])

    def test_auto_annotate_without_model_422(self, loaded):
        client, _, pid, doc_id = loaded
        resp = client.post(
            f"/v1/projects/{pid}/auto-annotate", json={"documents": [doc_id]}, headers=BOB
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "no_model"

    def test_ask_on_empty_project(self, project):
        client, _, pid = project
        resp = client.post(
            f"/v1/projects/{pid}/ask", json={"text": "anything?"}, headers=CAROL
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["contexts"] == []
        assert "No relevant context" in body["summary"]

    def test_ask_with_index_but_no_graph_422(self, loaded):
        client, store, pid, _ = loaded
        resp = client.post(f"/v1/projects/{pid}/index/build", headers=ALICE)
        run_jobs(client, store, resp.json()["job_id"])
        resp = client.post(
            f"/v1/projects/{pid}/ask", json={"text": "anything here?"}, headers=CAROL
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "graph_not_built"

    def test_failed_job_state(self, project):
        client, store, pid = project
        resp = client.post(
            f"/v1/projects/{pid}/documents",
            json={"format": "tei-xml", "content": "<broken"},
            headers=ALICE,
        )
        job_id = resp.json()["job_id"]
        store.run_pending()
        job = client.get(f"/v1/jobs/{job_id}", headers=ALICE).json()
        assert job["state"] == "failed"
        assert "IngestError" in job["log"]

    def test_unknown_job_404(self, service):
        client, _ = service
        assert client.get("/v1/jobs/na", headers=ALICE).status_code == 404

    def test_job_states_never_skip_or_reverse(self, project):
        from litkb.service.store import StoreError

        client, store, pid = project
        resp = client.post(
            f"/v1/projects/{pid}/documents",
            json={"format": "plain-text", "content": "One two."},
            headers=ALICE,
        )
        job_id = resp.json()["job_id"]
        with pytest.raises(StoreError, match="illegal"):
            store._transition(job_id, "done")  # queued -> done skips running
        store.run_pending()
        assert client.get(f"/v1/jobs/{job_id}", headers=ALICE).json()["state"] == "done"
        with pytest.raises(StoreError, match="illegal"):
            store._transition(job_id, "running")  # done is terminal
