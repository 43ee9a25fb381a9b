"""FastAPI front end over the mtskit core."""

from .app import app

__all__ = ["app"]
