"""HTTP service wrapping the core operations with typed request/response models."""

from .app import create_app

__all__ = ["create_app"]
