import threading

from fastapi.testclient import TestClient

from conftest import FIXTURES, RUNNING_EXAMPLE
from geoask.service import create_app


def make_client():
    return TestClient(create_app(str(FIXTURES)))


def test_health_before_startup_is_503():
    app = create_app(str(FIXTURES))
    client = TestClient(app)  # no context manager: lifespan never runs
    assert client.get("/health").status_code == 503


def test_health_after_startup():
    with make_client() as client:
        body = client.get("/health")
        assert body.status_code == 200
        assert body.json()["status"] == "ok"


def test_ask_running_example(engine):
    with make_client() as client:
        response = client.post("/ask", json={"question": RUNNING_EXAMPLE})
        assert response.status_code == 200
        body = response.json()
        got = {row["c1"]["value"] for row in body["answers"]["rows"]}
        want = {row["c1"].value for row in engine.ask(RUNNING_EXAMPLE).answers.rows}
        assert got == want
        assert body["sparql"] == engine.ask(RUNNING_EXAMPLE).sparql


def test_ask_empty_body_is_400():
    with make_client() as client:
        assert client.post("/ask", json={}).status_code == 400
        assert client.post("/ask", json={"question": "  "}).status_code == 400
        assert client.post("/ask", content=b"not json").status_code == 400


def test_ontology_catalog():
    with make_client() as client:
        body = client.get("/ontology").json()
        labels = {c["label"] for c in body["classes"]}
        assert {"river", "region", "image"} <= labels
        prop_labels = {p["label"] for p in body["properties"]}
        assert "cloud coverage" in prop_labels


def test_cli_and_service_same_response(engine):
    question = "Which rivers are in the Emilia Romagna region?"
    with make_client() as client:
        service_body = client.post("/ask", json={"question": question}).json()
    cli_body = engine.ask(question).to_json()
    service_body.pop("timings")
    cli_body.pop("timings")
    assert service_body == cli_body


def test_concurrent_requests_identical():
    question = "Which rivers are in Attica?"
    with make_client() as client:
        results = [None] * 16
        def hit(i):
            body = client.post("/ask", json={"question": question}).json()
            body.pop("timings")
            results[i] = body
        threads = [threading.Thread(target=hit, args=(i,)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r == results[0] for r in results)
