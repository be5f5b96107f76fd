import os

from trajent.config.settings import Settings, get_settings


def test_defaults():
    settings = Settings(_env_file=None)
    assert settings.PRECISION == 4
    assert settings.THREADS == 0
    assert settings.ORACLE_RESIDUAL_MASS == 1e-12
    assert settings.worker_threads == (os.cpu_count() or 1)


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("TRAJENT_THREADS", "3")
    monkeypatch.setenv("TRAJENT_PRECISION", "2")
    settings = get_settings()
    assert settings.worker_threads == 3
    assert settings.PRECISION == 2


def test_settings_are_cached():
    assert get_settings() is get_settings()
