import socket
import threading
import time
from collections import defaultdict, deque
from datetime import datetime, timedelta, timezone

import pytest

from lurelab import CampaignConfig, CampaignEngine, DocumentType, create_app
from lurelab.docgen import infer_type
from lurelab.model import AccessEvent, DocumentLocation

OPERATOR_TOKEN = "test-operator-token"
FIXED_CLOCK = datetime(2024, 3, 1, 12, 0, 0, tzinfo=timezone.utc)

# Access order used throughout: one document of each type at positions 1-6,
# with a second financial document at position 5.
TYPE_ORDER = [
    DocumentType.FINANCIAL,
    DocumentType.IT,
    DocumentType.OPERATIONAL,
    DocumentType.LEGAL,
    DocumentType.FINANCIAL,
    DocumentType.HR,
]


def names_in_type_order(names, type_order=TYPE_ORDER):
    """Pick distinct file names matching a per-position type sequence."""
    pools = defaultdict(deque)
    for name in sorted(names):
        pools[infer_type(name)].append(name)
    return [pools[doc_type].popleft() for doc_type in type_order]


def open_events(engine, names, start=FIXED_CLOCK):
    """Synthesize doc_open events for the active environment, one per name."""
    env = engine.active_environment
    for offset, name in enumerate(names):
        yield AccessEvent(
            campaign_id=engine.campaign_id,
            env_index=env.index,
            location=DocumentLocation(
                path=f"{env.directory}/{name}", host=env.host_name
            ),
            timestamp=start + timedelta(seconds=offset),
        )


def feed_names(engine, names, start=FIXED_CLOCK):
    transitions = []
    for event in list(open_events(engine, names, start)):
        transitions.append(engine.handle_access(event))
    return transitions


@pytest.fixture
def make_config(tmp_path):
    def _make(**overrides) -> CampaignConfig:
        overrides.setdefault("root_dir", str(tmp_path / "campaign"))
        return CampaignConfig(**overrides)

    return _make


@pytest.fixture
def engine(make_config) -> CampaignEngine:
    return CampaignEngine.start_campaign(make_config())


@pytest.fixture
def client(engine):
    from fastapi.testclient import TestClient

    app = create_app(engine, OPERATOR_TOKEN, clock=lambda: FIXED_CLOCK)
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def live_server(engine):
    """Real uvicorn server for streaming endpoints TestClient cannot close."""
    import uvicorn

    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    app = create_app(engine, OPERATOR_TOKEN)
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("test server failed to start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}", engine
    server.should_exit = True
    thread.join(timeout=5)
