"""The TCP line protocol: one goal line in, a streamed transcript out."""

from __future__ import annotations

import socketserver
import threading

from ..parser import ParseError
from .core import AdvisorState, UnknownProject
from .transcript import loadavg_trailer, render_event

MAX_LINE = 64 * 1024


def split_project_prefix(line: str):
    """Optional `project:NAME;` prefix selecting the project."""
    if line.startswith("project:"):
        rest = line[len("project:"):]
        name, sep, goal = rest.partition(";")
        if sep:
            return name.strip(), goal
    return None, line


class _QueryHandler(socketserver.StreamRequestHandler):
    def handle(self):
        state: AdvisorState = self.server.state
        raw = self.rfile.readline(MAX_LINE + 1)
        if len(raw) > MAX_LINE:
            self._send("* Error: request line exceeds 64 KiB\n")
            return
        try:
            line = raw.decode("utf-8").strip()
        except UnicodeDecodeError:
            self._send("* Error: request is not UTF-8\n")
            return
        if not line:
            self._send("* Error: empty request\n")
            return
        project, goal = split_project_prefix(line)
        if project is None:
            project = state.default_project()
        if project is None:
            self._send("* Error: no projects available\n")
            return
        try:
            for event in state.query(project, goal):
                frag = render_event(event, state.config.replay_token)
                if frag is not None:
                    self._send(frag)
        except UnknownProject:
            self._send(f"* Error: unknown project {project}\n")
            return
        except (BrokenPipeError, ConnectionResetError):
            return
        except Exception as e:
            self._send(f"* Error: {e}\n")
            return
        if state.config.status_trailer:
            self._send(loadavg_trailer())

    def _send(self, text: str):
        try:
            self.wfile.write(text.encode("utf-8"))
            self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError):
            pass


class TcpServer:
    def __init__(self, state: AdvisorState, host: str = "0.0.0.0",
                 port: int = None):
        class _Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        port = state.config.tcp_port if port is None else port
        self._server = _Server((host, port), _QueryHandler)
        self._server.state = state
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True)

    @property
    def address(self):
        return self._server.server_address

    def start(self) -> "TcpServer":
        self._thread.start()
        return self

    def serve_forever(self):
        self._server.serve_forever()

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
