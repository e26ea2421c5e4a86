import os
import sys

import pytest
from fastapi.testclient import TestClient

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack import __version__
from twistrack.main import app


@pytest.fixture
def client() -> TestClient:
    return TestClient(app)


def test_health(client) -> None:
    response = client.get("/health")

    assert response.status_code == 200
    assert response.json() == {"status": "ok", "version": __version__}


def test_classify_endpoint(client) -> None:
    response = client.post("/classify", json={"n": 5, "q": 3, "lam": [2], "eps": [0]})

    assert response.status_code == 200
    body = response.json()
    assert body["outcome"] == "TypeD"
    assert body["justification"] == "Tw.1"


def test_classify_endpoint_with_evidence(client) -> None:
    response = client.post(
        "/classify",
        params={"evidence": "true"},
        json={"n": 6, "q": 7, "lam": [1, 1, 1], "eps": [1, 1, 1]},
    )

    assert response.status_code == 200
    assert "gamma_image" in response.json()["witness"]


def test_classify_reports_known_exceptions(client) -> None:
    response = client.post(
        "/classify",
        json={"n": 6, "q": 7, "lam": [3], "eps": [1], "x_info": {"is_missing_class": True}},
    )

    assert response.status_code == 200
    assert response.json()["table_row"] == "r1e1-2odd"


def test_classify_rejects_bad_input(client) -> None:
    invalid_eps = client.post("/classify", json={"n": 6, "q": 7, "lam": [3], "eps": [2]})
    wrong_partition = client.post("/classify", json={"n": 6, "q": 7, "lam": [2, 2], "eps": [0, 0]})

    assert invalid_eps.status_code == 422
    assert wrong_partition.status_code == 502


def test_sweep_endpoint(client) -> None:
    response = client.post("/classify/sweep", json={"n_max": 6, "q_max": 9})

    assert response.status_code == 200
    body = response.json()
    assert body["golden_match"] is True
    assert {"n": 6, "q": 7, "lam": [3], "eps": [1], "row": "r1e1-2odd"} in body["entries"]


def test_torus_report_endpoint(client) -> None:
    response = client.post("/torus/report", json={"n": 4, "q": 7, "lam": [2], "eps": [1]})

    assert response.status_code == 200
    assert response.json()["torus_order"] == 400


def test_h2_endpoint(client) -> None:
    certified = client.post("/verify/h2", json={"q": 11})
    refused = client.post("/verify/h2", json={"q": 7})

    assert certified.status_code == 200
    assert certified.json()["expected"] == 6
    assert refused.status_code == 502


@pytest.mark.slow
def test_psl43_endpoint(client) -> None:
    response = client.get("/verify/psl43")

    assert response.status_code == 200
    assert response.json()["max_proj_order"] == 4
