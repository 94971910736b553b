"""FastAPI service wrapping the synthesis library."""

from .app import app, create_app

__all__ = ["app", "create_app"]
