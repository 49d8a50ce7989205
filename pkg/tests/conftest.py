"""Shared fixtures"""
import pytest

from fracvp.config_manager import ConfigManager
from fracvp.quad import QuadConfig


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep FRACVP_* variables from the developer's shell out of the tests"""
    for name in ('FRACVP_QUAD_TOL', 'FRACVP_LOG_LEVEL', 'FRACVP_LOG_FILE', 'FRACVP_WORKERS'):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def quad_cfg():
    return QuadConfig()


@pytest.fixture
def config_manager():
    return ConfigManager(load_env_file=False)
