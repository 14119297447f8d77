"""FastAPI service wrapping the voting library."""

from .app import app, create_app

__all__ = ["app", "create_app"]
