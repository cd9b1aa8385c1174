"""Network-facing layers: TCP line protocol, HTTP API, and shared state."""

from .config import ServiceConfig
from .core import AdvisorState
from .transcript import render_event, render_transcript
from .tcp import TcpServer
from .http import create_app

__all__ = [
    "ServiceConfig", "AdvisorState", "render_event", "render_transcript",
    "TcpServer", "create_app",
]
