from .app import SessionStore, create_app, serve_api

__all__ = ["SessionStore", "create_app", "serve_api"]
