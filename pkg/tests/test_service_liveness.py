"""Liveness: a stalled chat backend must not block render requests.

Runs a real server (not the in-process test client) so the prompt and the
render travel through the actual request path concurrently.
"""
import threading
import time

import httpx
import pytest
import uvicorn

from desktwin.scene.assets import build_default_assets
from desktwin.service import ServiceConfig, create_app


@pytest.fixture(scope="module")
def live_server(tmp_path_factory):
    root = tmp_path_factory.mktemp("livesvc")
    _, scene_path = build_default_assets(root)
    config = ServiceConfig(scene_path=str(scene_path))

    # a mock that stalls 2 s per completion
    from desktwin.agents.mock_rules import make_default_mock
    config.make_backend = lambda: make_default_mock(delay_s=2.0)  # type: ignore[method-assign]
    app = create_app(config)

    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=8765,
                                           log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    base = "http://127.0.0.1:8765"
    for _ in range(100):
        try:
            httpx.get(base + "/sessions/none/scene", timeout=1.0)
            break
        except httpx.TransportError:
            time.sleep(0.05)
    yield base
    server.should_exit = True
    thread.join(timeout=5)


def test_render_not_blocked_by_stalled_prompt(live_server):
    base = live_server
    sid = httpx.post(base + "/sessions", timeout=5.0).json()["session_id"]

    result = {}

    def slow_prompt():
        result["prompt"] = httpx.post(
            base + f"/sessions/{sid}/prompt",
            json={"text": "Make it rain."}, timeout=30.0)

    t = threading.Thread(target=slow_prompt)
    t.start()
    time.sleep(0.3)  # let the prompt reach the stalled backend
    t0 = time.perf_counter()
    r = httpx.get(base + f"/sessions/{sid}/render",
                  params={"width": 48, "height": 36}, timeout=10.0)
    render_elapsed = time.perf_counter() - t0
    t.join(timeout=30)

    assert r.status_code == 200
    assert render_elapsed < 2.0, f"render took {render_elapsed:.2f}s"
    assert result["prompt"].status_code == 200
