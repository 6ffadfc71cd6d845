"""HTTP service wrapping the simulator (FastAPI).

Run it with ``cfgi serve`` or ``uvicorn cfgi.service:app``.
"""

from .app import app, create_app

__all__ = ["app", "create_app"]
