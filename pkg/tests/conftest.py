import pytest

from app.chain.model import model_a, model_b
from app.config import load_settings


@pytest.fixture
def critical_a():
    """Model A at alpha = 2, nu = 1: positive recurrent with E tau_00 = 2."""
    return model_a(2.0, nu=1.0, p0=1.0)


@pytest.fixture
def model_b_two():
    """Model B at alpha = 2: positive recurrent with E tau_00 = 1 + zeta(2)."""
    return model_b(2.0)


@pytest.fixture
def tmp_settings(tmp_path, monkeypatch):
    """Settings writing artifacts and the run database under a temporary directory."""
    for name in ("DISASTER_CONFIG", "DISASTER_SEED", "DISASTER_WORKERS", "DISASTER_OUT_DIR",
                 "DISASTER_DATABASE_URL", "DISASTER_RECORD_RUNS"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return load_settings(
        out_dir=str(tmp_path / "artifacts"),
        database_url=f"sqlite:///{tmp_path / 'runs.db'}",
        seed=11,
    )
