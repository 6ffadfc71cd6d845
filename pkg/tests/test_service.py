"""HTTP service tests, run against the app in process."""

import math

import numpy as np
import pytest
from fastapi.testclient import TestClient
from numpy.testing import assert_array_equal

import oracles
from cfgi import __version__
from cfgi.service import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def checkerboard_rows(size=8):
    grid = np.indices((size, size)).sum(axis=0) % 2
    return grid.astype(float).tolist()


class TestHealth:
    def test_healthz(self, client):
        resp = client.get("/healthz")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["version"] == __version__


class TestProbs:
    def test_blocked_2_13(self, client):
        resp = client.post("/probs", json={"m": 2, "n": 13, "blocked": True})
        assert resp.status_code == 200
        body = resp.json()
        want = oracles.PROTOCOL_BLOCKED_2_13
        for key in ("p_d0", "p_d1", "p_dl", "p_object"):
            assert body[key] == pytest.approx(want[key], abs=1e-12)
        assert body["p_component"] == 0.0
        assert body["m"] == 2 and body["n"] == 13
        assert body["t_abs"] == 0.0

    def test_open_defaults_n_to_1(self, client):
        resp = client.post("/probs", json={"m": 2, "open": True})
        assert resp.status_code == 200
        body = resp.json()
        assert body["n"] == 1
        assert body["p_dl"] == pytest.approx(0.75, abs=1e-12)

    def test_partial_transmittance_with_phase(self, client):
        resp = client.post("/probs",
                           json={"m": 3, "n": 9, "t_abs": 0.5, "t_phase": 1.0})
        assert resp.status_code == 200
        body = resp.json()
        assert body["t_abs"] == pytest.approx(0.5, abs=1e-12)
        assert body["t_phase"] == pytest.approx(1.0, abs=1e-12)
        assert body["p_object"] > 0.0

    def test_losses_echo_with_preset_and_override(self, client):
        resp = client.post("/probs", json={
            "m": 2, "n": 13, "blocked": True,
            "preset": "fig6", "hwp_loss": 0.5})
        assert resp.status_code == 200
        losses = resp.json()["losses"]
        assert losses["hwp_loss"] == 0.5
        assert losses["pbs_loss"] == 0.01
        assert losses["mirror_loss"] == pytest.approx(15.0 / 16.0)
        assert losses["heralding"] == 0.18

    def test_rotation_override_echoed(self, client):
        resp = client.post("/probs", json={
            "m": 2, "n": 13, "blocked": True, "outer_rotation": 0.0})
        assert resp.status_code == 200
        body = resp.json()
        assert body["outer_rotation"] == 0.0
        assert body["p_d0"] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("payload", [
        {"m": 1, "n": 13, "blocked": True},
        {"m": 2, "n": 0, "blocked": True},
        {"m": 2, "n": 13},
        {"m": 2, "n": 13, "blocked": True, "open": True},
        {"m": 2, "n": 13, "blocked": True, "t_abs": 0.5},
        {"m": 2, "n": 13, "t_phase": 1.0},
        {"m": 2, "n": 13, "t_abs": 1.5},
        {"m": 2, "n": 13, "blocked": True, "preset": "nonsense"},
        {"m": 2, "n": 13, "blocked": True, "heralding": 0.0},
    ])
    def test_invalid_requests_get_422(self, client, payload):
        assert client.post("/probs", json=payload).status_code == 422

    def test_core_domain_error_maps_to_422(self, client):
        # 1e400 overflows to inf in JSON parsing; schema validation passes
        # and the core rejects the non-finite angle.
        resp = client.post(
            "/probs",
            content='{"m": 2, "n": 13, "blocked": true, "outer_rotation": 1e400}',
            headers={"content-type": "application/json"})
        assert resp.status_code == 422
        assert "detail" in resp.json()


class TestSweep:
    def test_grid_rows_and_divergence(self, client):
        resp = client.post("/sweep",
                           json={"m_min": 2, "m_max": 3, "n_min": 1, "n_max": 2})
        assert resp.status_code == 200
        rows = resp.json()["rows"]
        assert [(r["m"], r["n"]) for r in rows] == [(2, 1), (2, 2), (3, 1), (3, 2)]
        first = rows[0]
        assert first["p_int"] == 0.0
        assert first["snr_int_ratio"] is None
        assert rows[1]["snr_int_ratio"] is not None

    def test_known_row_values(self, client):
        resp = client.post("/sweep",
                           json={"m_min": 2, "m_max": 2, "n_min": 13, "n_max": 13})
        row = resp.json()["rows"][0]
        assert row["p_int"] == pytest.approx(
            oracles.PROTOCOL_BLOCKED_2_13["p_object"], abs=1e-12)
        assert row["f"] == pytest.approx(oracles.METRICS_2_13["f"], abs=1e-12)
        assert row["snr_int_ratio"] == pytest.approx(
            oracles.METRICS_2_13["ratio"], abs=1e-12)
        assert row["visibility"] == pytest.approx(
            oracles.METRICS_2_13["visibility"], abs=1e-12)
        assert row["p_d0_err"] == pytest.approx(
            oracles.PROTOCOL_BLOCKED_2_13["p_d0"], abs=1e-12)

    def test_reassign_keeps_p_int(self, client):
        base = client.post("/sweep", json={
            "m_min": 2, "m_max": 2, "n_min": 13, "n_max": 13}).json()["rows"][0]
        folded = client.post("/sweep", json={
            "m_min": 2, "m_max": 2, "n_min": 13, "n_max": 13,
            "reassign_dl": True}).json()["rows"][0]
        assert folded["p_int"] == base["p_int"]
        assert folded["visibility"] > base["visibility"]

    def test_lossy_preset_changes_rows(self, client):
        ideal = client.post("/sweep", json={
            "m_min": 2, "m_max": 2, "n_min": 13, "n_max": 13}).json()["rows"][0]
        fig6 = client.post("/sweep", json={
            "m_min": 2, "m_max": 2, "n_min": 13, "n_max": 13,
            "preset": "fig6"}).json()["rows"][0]
        assert fig6["p_int"] != pytest.approx(ideal["p_int"], abs=1e-9)

    def test_binomial_noise_model(self, client):
        resp = client.post("/sweep", json={
            "m_min": 2, "m_max": 2, "n_min": 13, "n_max": 13,
            "noise_model": "binomial"})
        row = resp.json()["rows"][0]
        assert row["f"] == pytest.approx(oracles.METRICS_2_13_BINOMIAL_F, abs=1e-12)

    @pytest.mark.parametrize("payload", [
        {"m_min": 3, "m_max": 2, "n_min": 1, "n_max": 2},
        {"m_min": 2, "m_max": 2, "n_min": 5, "n_max": 4},
        {"m_min": 1, "m_max": 2, "n_min": 1, "n_max": 2},
        {"m_min": 2, "m_max": 2, "n_min": 1, "n_max": 2, "noise_model": "gaussian"},
    ])
    def test_invalid_sweeps_get_422(self, client, payload):
        assert client.post("/sweep", json=payload).status_code == 422


class TestImage:
    def request_body(self, **overrides):
        body = {
            "m": 4, "n": 16, "n_bar": 1000.0, "seed": 7,
            "mask": {"magnitude": checkerboard_rows()},
        }
        body.update(overrides)
        return body

    def test_checkerboard_roundtrip(self, client):
        resp = client.post("/image", json=self.request_body())
        assert resp.status_code == 200
        body = resp.json()
        assert body["width"] == 8 and body["height"] == 8
        board = (np.asarray(checkerboard_rows()) * 255).astype(np.uint8)
        assert_array_equal(np.asarray(body["threshold_map"], dtype=np.uint8), board)
        assert body["threshold_value"] == pytest.approx(
            oracles.THRESHOLD_4_16, abs=1e-12)
        assert body["expected_d_blocked"] == pytest.approx(
            oracles.EXPECTED_D_BLOCKED_4_16, abs=1e-12)
        assert body["expected_d_open"] == pytest.approx(
            oracles.EXPECTED_D_OPEN_4_16, abs=1e-12)
        assert not body["ambiguous"]
        dose = np.asarray(body["dose"])
        assert np.all(dose[board == 255] == 0.0)
        assert np.all(dose[board == 0] > 0.0)

    def test_deterministic_across_calls(self, client):
        a = client.post("/image", json=self.request_body()).json()
        b = client.post("/image", json=self.request_body()).json()
        assert a == b

    def test_seed_changes_counts(self, client):
        a = client.post("/image", json=self.request_body()).json()
        b = client.post("/image", json=self.request_body(seed=8)).json()
        assert a["c_d0"] != b["c_d0"]

    def test_heralding_echo_falls_back_to_preset(self, client):
        resp = client.post("/image", json=self.request_body(preset="fig6"))
        assert resp.status_code == 200
        assert resp.json()["heralding"] == 0.18

    def test_explicit_heralding_wins(self, client):
        resp = client.post("/image",
                           json=self.request_body(preset="fig6", heralding=0.5))
        assert resp.json()["heralding"] == 0.5

    def test_phase_mask_zero_dose(self, client):
        body = {
            "m": 3, "n": 9, "n_bar": 500.0, "seed": 1,
            "mask": {
                "magnitude": [[1.0, 1.0]],
                "phase": [[0.0, math.pi]],
            },
        }
        resp = client.post("/image", json=body)
        assert resp.status_code == 200
        out = resp.json()
        assert out["dose"] == [[0.0, 0.0]]
        # The phase-flipped pixel must separate from the plain open pixel.
        assert abs(out["d"][0][0] - out["d"][0][1]) > 0.5

    @pytest.mark.parametrize("payload_patch", [
        {"mask": {"magnitude": [[0.5, 1.0], [0.5]]}},
        {"mask": {"magnitude": []}},
        {"mask": {"magnitude": [[0.5]], "phase": [[0.0, 0.0]]}},
        {"mask": {"magnitude": [[1.5]]}},
        {"m": 1},
        {"n_bar": 0.0},
        {"seed": -3},
        {"blur": -1.0},
    ])
    def test_invalid_image_requests_get_422(self, client, payload_patch):
        assert client.post("/image",
                           json=self.request_body(**payload_patch)).status_code == 422
