"""Database models."""

from app.models.database import Base, configure, get_db, init_db
from app.models.experiment import ExperimentRecord

__all__ = [
    "Base",
    "configure",
    "get_db",
    "init_db",
    "ExperimentRecord",
]
