import pytest


@pytest.fixture(autouse=True)
def _no_ambient_env(monkeypatch):
    """Keep unit tests independent of the developer's thread setting."""
    monkeypatch.delenv("ASSOCFAM_THREADS", raising=False)
