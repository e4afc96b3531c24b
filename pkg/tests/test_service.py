import hashlib
import json

import pytest
from fastapi.testclient import TestClient

from conftest import FIXTURES
from faircompass.data import attach_predictions
from faircompass.service import AuditService, ServiceConfig, create_app
from faircompass.walkthrough import ADULT_CONFIG

SMALL_CSV = (
    "sex,occ,income,pred\n"
    "M,A,1,1\nM,A,0,0\nM,B,1,0\nM,B,0,1\nM,A,1,1\n"
    "F,A,1,0\nF,A,0,1\nF,B,1,1\nF,B,0,0\nF,B,1,1\n"
)
SMALL_CONFIG = {"label_column": "income", "prediction_column": "pred"}


@pytest.fixture()
def client(tmp_path):
    service = AuditService(ServiceConfig(store_path=str(tmp_path / "store")))
    return TestClient(create_app(service))


def _upload(client, text=SMALL_CSV, config=SMALL_CONFIG):
    response = client.post(
        "/api/v1/datasets",
        files={"file": ("data.csv", text)},
        data={"config": json.dumps(config)},
    )
    assert response.status_code == 200, response.text
    return response.json()


def _state_hash(client, session_id):
    state = client.get(f"/api/v1/sessions/{session_id}").json()
    return hashlib.sha256(json.dumps(state, sort_keys=True).encode()).hexdigest()


def test_upload_and_summary(client):
    summary = _upload(client)
    assert summary["row_count"] == 10
    assert [f["name"] for f in summary["features"]] == ["sex", "occ"]
    again = client.get(f"/api/v1/datasets/{summary['id']}")
    assert again.json() == summary


def test_upload_empty_file_is_4xx_missing_column(client):
    response = client.post(
        "/api/v1/datasets",
        files={"file": ("data.csv", "")},
        data={"config": json.dumps(SMALL_CONFIG)},
    )
    assert response.status_code == 422
    assert response.json()["error"] == "MissingColumn"


def test_oversized_upload_rejected(tmp_path):
    service = AuditService(ServiceConfig(store_path=str(tmp_path / "store"),
                                         max_upload_bytes=16))
    client = TestClient(create_app(service))
    response = client.post(
        "/api/v1/datasets",
        files={"file": ("data.csv", SMALL_CSV)},
        data={"config": json.dumps(SMALL_CONFIG)},
    )
    assert response.status_code == 413
    assert response.json()["error"] == "DatasetTooLarge"


def test_distribution_endpoint(client):
    summary = _upload(client)
    response = client.get(f"/api/v1/datasets/{summary['id']}/distribution",
                          params={"feature": "sex"})
    assert response.status_code == 200
    assert dict((label, count) for label, count in response.json()["bins"]) == \
        {"M": 5, "F": 5}
    missing = client.get(f"/api/v1/datasets/{summary['id']}/distribution",
                         params={"feature": "age"})
    assert missing.status_code == 404
    assert missing.json()["error"] == "UnknownFeature"


def _session_with_groups(client):
    summary = _upload(client)
    session = client.post("/api/v1/sessions",
                          json={"dataset_id": summary["id"], "session_id": "t1"}).json()
    client.post("/api/v1/sessions/t1/groups",
                json={"selections": [{"feature": "sex"}]})
    return summary, session


def test_session_flow_and_log_discipline(client):
    _session_with_groups(client)

    def log_length():
        return len(client.get("/api/v1/sessions/t1").json()["stage_log"])

    before = log_length()
    mutations = [
        ("/api/v1/sessions/t1/group-sets", {"name": "sexes"}),
        ("/api/v1/sessions/t1/group-sets/gs-1/restore", {}),
        ("/api/v1/sessions/t1/tree/navigate", {"node_id": "policy", "answer": "No"}),
        ("/api/v1/sessions/t1/tree/backtrack", {"steps": 1}),
        ("/api/v1/sessions/t1/definition", {"definition_id": "demographic_parity"}),
        ("/api/v1/sessions/t1/evaluate", {"inputs": {"favourable_class": 1}}),
        ("/api/v1/sessions/t1/log",
         {"stage": "InformedAnalysis", "action": "observed", "note": "n"}),
    ]
    for path, body in mutations:
        response = client.post(path, json=body)
        assert response.status_code == 200, (path, response.text)
        after = log_length()
        assert after == before + 1, f"{path} appended {after - before} entries"
        before = after


def test_get_endpoints_are_idempotent(client):
    summary, _ = _session_with_groups(client)
    client.post("/api/v1/sessions/t1/pin", json={
        "subgroup_id": client.get("/api/v1/sessions/t1").json()["active_subgroups"][0]["id"],
    })
    hovered = client.get("/api/v1/sessions/t1").json()["active_subgroups"][1]["id"]
    gets = [
        ("/api/v1/sessions/t1", {}),
        ("/api/v1/sessions/t1/metrics", {"rates": "accuracy,fnr"}),
        ("/api/v1/sessions/t1/compare", {"hovered": hovered}),
        ("/api/v1/sessions/t1/suggestions", {"rate": "accuracy", "k": 2, "seed": 1}),
        ("/api/v1/sessions/t1/group-sets", {}),
        ("/api/v1/sessions/t1/report", {"format": "markdown"}),
        ("/api/v1/sessions/t1/distribution", {"feature": "occ"}),
        ("/api/v1/tree", {}),
        ("/api/v1/definitions", {}),
        (f"/api/v1/datasets/{summary['id']}/distribution", {"feature": "sex"}),
    ]
    for path, params in gets:
        before = _state_hash(client, "t1")
        response = client.get(path, params=params)
        assert response.status_code == 200, (path, response.text)
        assert _state_hash(client, "t1") == before, f"{path} mutated session state"


def test_metrics_endpoint_rejects_unknown_rate(client):
    _session_with_groups(client)
    response = client.get("/api/v1/sessions/t1/metrics", params={"rates": "karma"})
    assert response.status_code == 422


def test_restore_unknown_group_set_is_404(client):
    _session_with_groups(client)
    response = client.post("/api/v1/sessions/t1/group-sets/gs-9/restore", json={})
    assert response.status_code == 404
    assert response.json()["error"] == "UnknownGroupSet"


def test_off_path_answer_is_409(client):
    _session_with_groups(client)
    client.post("/api/v1/sessions/t1/tree/navigate",
                json={"node_id": "policy", "answer": "No"})
    response = client.post("/api/v1/sessions/t1/tree/navigate",
                           json={"node_id": "policy", "answer": "Yes"})
    assert response.status_code == 409
    assert response.json()["error"] == "OffPath"


def test_unknown_session_is_404(client):
    assert client.get("/api/v1/sessions/ghost").status_code == 404


def test_bin_endpoint_and_numeric_groups(tmp_path):
    service = AuditService(ServiceConfig(store_path=str(tmp_path / "store")))
    client = TestClient(create_app(service))
    text = "hours,income,pred\n" + "".join(
        f"{h},{i % 2},{(i + 1) % 2}\n" for i, h in enumerate([40, 45, 50, 40, 45, 50, 40, 12])
    )
    summary = _upload(client, text, {
        "label_column": "income", "prediction_column": "pred",
        "numeric_columns": ["hours"],
    })
    client.post("/api/v1/sessions", json={"dataset_id": summary["id"], "session_id": "n1"})
    response = client.post("/api/v1/sessions/n1/bins", json={
        "feature": "hours", "strategy": "explicit",
        "edges": [12, 40, 41, 45, 46, 50, 51],
    })
    assert response.status_code == 200
    assert response.json()["bin_edges"] == [12, 40, 41, 45, 46, 50, 51]
    groups = client.post("/api/v1/sessions/n1/groups", json={
        "selections": [{"feature": "hours", "values": [1, 3, 5]}],
    }).json()["subgroups"]
    assert [g["display_name"] for g in groups] == ["40", "45", "50"]


def test_session_persist_restart_reload_deep_equal(tmp_path):
    store = str(tmp_path / "store")
    service = AuditService(ServiceConfig(store_path=store))
    client = TestClient(create_app(service))
    _session_with_groups(client)
    client.post("/api/v1/sessions/t1/group-sets", json={"name": "sexes"})
    client.post("/api/v1/sessions/t1/tree/navigate",
                json={"node_id": "policy", "answer": "No"})
    client.post("/api/v1/sessions/t1/tree/navigate",
                json={"node_id": "equal-base-rates", "answer": "No, but should be"})
    client.post("/api/v1/sessions/t1/tree/navigate",
                json={"node_id": "explaining-variables", "answer": "Yes"})
    client.post("/api/v1/sessions/t1/evaluate", json={"inputs": {
        "favourable_class": 0, "sensitive_attribute": "sex",
        "legitimate_attributes": ["occ"], "min_stratum_size": 2,
    }})
    client.post("/api/v1/sessions/t1/log", json={
        "stage": "InformedAnalysis", "action": "wrap", "payload": {"k": 1},
    })
    state = client.get("/api/v1/sessions/t1").json()

    restarted = TestClient(create_app(AuditService(ServiceConfig(store_path=store))))
    reloaded = restarted.get("/api/v1/sessions/t1").json()
    assert reloaded == state
    report_a = client.get("/api/v1/sessions/t1/report",
                          params={"format": "markdown"}).text
    report_b = restarted.get("/api/v1/sessions/t1/report",
                             params={"format": "markdown"}).text
    assert report_a == report_b


@pytest.fixture(scope="module")
def adult_client(tmp_path_factory):
    store = tmp_path_factory.mktemp("adult-store")
    service = AuditService(ServiceConfig(store_path=str(store)))
    client = TestClient(create_app(service))
    merged = attach_predictions(
        (FIXTURES / "adult.csv").read_text(encoding="utf-8"),
        (FIXTURES / "adult_predictions.csv").read_text(encoding="utf-8"),
    )
    summary = client.post(
        "/api/v1/datasets",
        files={"file": ("adult.csv", merged)},
        data={"config": json.dumps(ADULT_CONFIG.to_dict())},
    ).json()
    client.post("/api/v1/sessions",
                json={"dataset_id": summary["id"], "session_id": "adult"})
    return client, summary


def test_adult_upload_shape(adult_client):
    _, summary = adult_client
    assert summary["row_count"] == 32561
    assert len(summary["features"]) == 14


def test_adult_pin_hover_compare_error_rate_gaps(adult_client):
    client, _ = adult_client
    groups = client.post("/api/v1/sessions/adult/groups", json={
        "selections": [{"feature": "sex"}, {"feature": "occupation"}],
        "stage": "Guidance",
    }).json()["subgroups"]
    by_name = {g["display_name"]: g["id"] for g in groups}
    client.post("/api/v1/sessions/adult/pin",
                json={"subgroup_id": by_name["Male, Exec-managerial"]})
    response = client.get("/api/v1/sessions/adult/compare", params={
        "hovered": by_name["Female, Exec-managerial"],
    })
    deltas = response.json()["deltas"]
    assert deltas["fnr"] == pytest.approx(-0.25, abs=0.02)
    assert deltas["fpr"] == pytest.approx(0.20, abs=0.02)
