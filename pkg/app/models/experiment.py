"""Experiment record model: one row per CLI run."""

import uuid
from datetime import datetime

from sqlalchemy import JSON, Column, DateTime, Float, String

from app.models.database import Base


class ExperimentRecord(Base):
    """A command run against a model spec, with its artifacts and oracle comparisons."""

    __tablename__ = "experiment_records"

    id = Column(String(36), primary_key=True, default=lambda: str(uuid.uuid4()))
    command = Column(String(50), nullable=False, index=True)
    spec = Column(JSON, nullable=True)
    outputs = Column(JSON, nullable=False, default=list)  # artifact paths
    oracle_deltas = Column(JSON, nullable=False, default=dict)  # name -> analytic, oracle, tolerance, passed
    wall_time = Column(Float, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)

    @property
    def passed(self) -> bool:
        return all(delta.get("passed", True) for delta in (self.oracle_deltas or {}).values())

    def __repr__(self):
        return f"<ExperimentRecord {self.id[:8]} {self.command}>"
