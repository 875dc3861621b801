"""
Tests for the optimisation service API endpoints.
"""
from __future__ import annotations

import pytest
from fastapi.testclient import TestClient
from unittest.mock import MagicMock

from app.adapters.datasources.csv_store import CsvStore
from app.api.deps import get_experiment_service
from app.core.config import Settings, get_settings
from app.main import create_app
from app.models import Algorithm, AlgorithmSummary, ExperimentPlan, ExperimentResult, ObjectiveKind
from app.repositories.file_csv import FileRecordRepository
from app.services.errors import ExperimentLimitError, ExperimentNotFoundError
from app.services.experiments import ExperimentService, StoredExperiment


@pytest.fixture
def mock_experiment_service():
    """Create a mock experiment service for testing."""
    return MagicMock(spec=ExperimentService)


@pytest.fixture
def client(mock_experiment_service):
    """Create a test client with mocked dependencies."""
    app = create_app()
    app.dependency_overrides[get_experiment_service] = lambda: mock_experiment_service
    app.dependency_overrides[get_settings] = lambda: Settings(API_MAX_BUDGET=5000)

    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def stored_client(tmp_path):
    """Test client whose experiment service writes CSV files under tmp_path."""
    app = create_app()
    service = ExperimentService(
        repository_for=lambda experiment_id: FileRecordRepository(CsvStore(tmp_path / f"{experiment_id}.csv")),
        max_replications=5,
        max_budget=1000,
        workers=1,
    )
    app.dependency_overrides[get_experiment_service] = lambda: service

    with TestClient(app) as test_client:
        yield test_client


def stored_experiment() -> StoredExperiment:
    plan = ExperimentPlan(algorithms=(Algorithm.DSPKW_2C,), objective=ObjectiveKind.QUADRATIC, budget=200, replications=2)
    summary = AlgorithmSummary(algorithm=Algorithm.DSPKW_2C, mean=2.474e-08, std=0.0, replications=2)
    return StoredExperiment(
        experiment_id="0" * 32,
        result=ExperimentResult(plan=plan, records=(), summaries=(summary,)),
    )


class TestHealth:
    def test_health(self, client):
        response = client.get("/api/health")

        assert response.status_code == 200
        assert response.json()["status"] == "healthy"


class TestVerifyPerturbations:
    """Tests for GET /api/perturbations/{source}/verify."""

    def test_circulant(self, client):
        response = client.get("/api/perturbations/circulant/verify?p=10")

        assert response.status_code == 200
        data = response.json()
        assert data["cycle_length"] == 11
        assert data["passed"] is True
        assert data["p1_residual"] < 1e-10

    def test_hadamard_is_exact(self, client):
        data = client.get("/api/perturbations/hadamard/verify?p=3").json()

        assert data["cycle_length"] == 4
        assert data["p1_residual"] == 0.0

    def test_bernoulli_has_no_cycle(self, client):
        assert client.get("/api/perturbations/bernoulli/verify?p=3").status_code == 422

    def test_invalid_dimension(self, client):
        assert client.get("/api/perturbations/circulant/verify?p=0").status_code == 422

    def test_unknown_source(self, client):
        assert client.get("/api/perturbations/sobol/verify").status_code == 422


class TestCreateRun:
    """Tests for POST /api/runs."""

    def test_run_success(self, client):
        response = client.post("/api/runs", json={"algorithm": "DSPKW-2C", "budget": 2000})

        assert response.status_code == 200
        data = response.json()
        assert data["iterations"] == 1000
        assert data["simulations_used"] == 2000
        assert data["diverged"] is False
        assert data["nmse"] < 1e-3
        assert len(data["theta_end"]) == 10

    def test_invalid_schedule_names_condition(self, client):
        response = client.post("/api/runs", json={"budget": 200, "alpha": 0.4})

        assert response.status_code == 422
        assert "2(alpha-gamma)>1" in response.json()["detail"]

    def test_forced_schedule_runs(self, client):
        response = client.post("/api/runs", json={"budget": 200, "alpha": 0.4, "force": True})
        assert response.status_code == 200

    def test_budget_over_limit(self, client):
        response = client.post("/api/runs", json={"budget": 6000})

        assert response.status_code == 422
        assert "limit" in response.json()["detail"]

    def test_budget_too_small_for_two_sided(self, client):
        assert client.post("/api/runs", json={"algorithm": "RDKW-2H", "budget": 1}).status_code == 422

    def test_unknown_algorithm(self, client):
        assert client.post("/api/runs", json={"algorithm": "SPSA"}).status_code == 422


class TestExperiments:
    """Tests for the experiment archive endpoints."""

    def test_create_experiment(self, client, mock_experiment_service):
        # Arrange
        mock_experiment_service.run_and_store.return_value = stored_experiment()

        # Act
        response = client.post(
            "/api/experiments",
            json={"algorithms": ["DSPKW-2C"], "budget": 200, "replications": 2},
        )

        # Assert
        assert response.status_code == 201
        data = response.json()
        assert data["experiment_id"] == "0" * 32
        assert data["summaries"][0]["text"] == "DSPKW-2C  2.474e-08 ± 0.000e+00"
        plan = mock_experiment_service.run_and_store.call_args.args[0]
        assert plan.algorithms == (Algorithm.DSPKW_2C,)
        assert plan.replications == 2

    def test_over_limit(self, client, mock_experiment_service):
        mock_experiment_service.run_and_store.side_effect = ExperimentLimitError("replications 500 exceeds the limit of 20")

        response = client.post("/api/experiments", json={"algorithms": ["RDKW-2R"], "replications": 500})

        assert response.status_code == 422
        assert "limit" in response.json()["detail"]

    def test_requires_algorithms(self, client):
        assert client.post("/api/experiments", json={"algorithms": []}).status_code == 422

    def test_unknown_experiment(self, client, mock_experiment_service):
        mock_experiment_service.load.side_effect = ExperimentNotFoundError("f" * 32)

        assert client.get(f"/api/experiments/{'f' * 32}").status_code == 404

    def test_stored_statistics_are_recomputed(self, stored_client):
        created = stored_client.post(
            "/api/experiments",
            json={"algorithms": ["DSPKW-2C", "RDKW-2R"], "budget": 200, "replications": 3, "sigma": 0.01},
        )
        assert created.status_code == 201

        fetched = stored_client.get(f"/api/experiments/{created.json()['experiment_id']}")

        assert fetched.status_code == 200
        assert fetched.json()["summaries"] == created.json()["summaries"]
        assert fetched.json()["records"] == 6

    def test_stored_limits_enforced(self, stored_client):
        response = stored_client.post("/api/experiments", json={"algorithms": ["DSPKW-2C"], "budget": 5000})
        assert response.status_code == 422

    def test_missing_stored_experiment(self, stored_client):
        assert stored_client.get("/api/experiments/not-an-id").status_code == 404
