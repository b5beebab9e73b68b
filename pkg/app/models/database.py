"""Database setup and session management."""

from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

from app.config import settings


def _make_engine(database_url: str):
    return create_engine(
        database_url,
        connect_args={"check_same_thread": False} if "sqlite" in database_url else {},
    )


engine = _make_engine(settings.database_url)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()


def configure(database_url: str):
    """Point the session factory at another database, e.g. one named in a config file."""
    global engine
    if str(engine.url) == database_url:
        return
    engine = _make_engine(database_url)
    SessionLocal.configure(bind=engine)


def get_db():
    """Get a database session."""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_db():
    """Initialize the database tables."""
    from app.models.experiment import ExperimentRecord

    Base.metadata.create_all(bind=engine)
