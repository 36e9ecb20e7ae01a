#!/usr/bin/env python3
"""
Tests for the HTTP service and its WebSocket progress broadcast.
"""

import json

import pytest
from fastapi.testclient import TestClient

from app import __version__
from app.config import Settings
from app.main import ConnectionManager, app
from app.rewrite import TRACE_DIR

client = TestClient(app)


@pytest.fixture(autouse=True)
def upload_dir(tmp_path, monkeypatch):
    path = tmp_path / "nested" / "uploads"
    monkeypatch.setattr("app.main.UPLOAD_DIR", path)
    return path


class FakeWebSocket:
    def __init__(self, fail: bool = False):
        self.sent = []
        self.fail = fail
        self.accepted = False

    async def accept(self):
        self.accepted = True

    async def send_text(self, text: str):
        if self.fail:
            raise RuntimeError("connection closed")
        self.sent.append(json.loads(text))


def test_health():
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy", "version": __version__}


def test_index_page():
    response = client.get("/")
    assert response.status_code == 200
    assert "G26" in response.text


def test_catalogue():
    report = client.get("/catalogue").json()
    assert report["outcome"] == "certified"
    assert "g4_torsion" in report["payload"]["traces"]


def test_demazure():
    report = client.get("/demazure", params={"max_degree": 6}).json()
    assert report["command"] == "demazure"
    assert report["outcome"] == "certified"


def test_witness():
    report = client.post("/witness", json={"name": "Gd12-nil", "R": 20, "k": 10}).json()
    assert report["outcome"] == "certified"
    report = client.post("/witness", json={"name": "no-such-module"}).json()
    assert report["outcome"] == "error"


def test_certify_rejects_unknown_family():
    assert client.post("/certify", json={"family": "nope"}).status_code == 400


def test_trace_upload():
    data = (TRACE_DIR / "c_central_s1.trace").read_bytes()
    response = client.post("/trace", files={"file": ("c_central_s1.trace", data, "text/plain")})
    assert response.status_code == 200
    assert response.json()["outcome"] == "certified"


def test_trace_upload_rejects_other_files():
    response = client.post("/trace", files={"file": ("image.png", b"\x89PNG", "image/png")})
    assert response.status_code == 400


def test_websocket_connects():
    with client.websocket_connect("/ws") as websocket:
        websocket.send_text("ping")


async def test_send_progress_reaches_clients_and_drops_dead_ones():
    manager = ConnectionManager()
    alive, dead = FakeWebSocket(), FakeWebSocket(fail=True)
    await manager.connect(alive)
    await manager.connect(dead)
    assert alive.accepted
    await manager.send_progress("Enumerating G4", 40)
    assert alive.sent == [{"message": "Enumerating G4", "progress": 40}]
    assert manager.active_connections == [alive]
    manager.disconnect(dead)
    assert manager.active_connections == [alive]


def test_enumerate_endpoint(tmp_path, monkeypatch):
    monkeypatch.setattr("app.main.settings", Settings(cache_dir=tmp_path))
    report = client.post("/enumerate", json={"presentation": "G4", "group": True}).json()
    assert report["outcome"] == "certified"
    assert report["payload"]["result"]["dimension"] == 24


def test_upload_dir_is_created_on_first_upload(upload_dir):
    assert not upload_dir.exists()
    data = (TRACE_DIR / "g4_torsion.trace").read_bytes()
    response = client.post("/trace", files={"file": ("g4_torsion.trace", data, "text/plain")})
    assert response.json()["outcome"] == "certified"
    assert upload_dir.is_dir()
    assert list(upload_dir.iterdir()) == []
