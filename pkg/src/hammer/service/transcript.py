"""Render query events as the wire transcript."""

from __future__ import annotations

import os
from typing import Iterable, Optional


def render_event(e: dict, replay_token: str = "SUGGESTED") -> Optional[str]:
    """One transcript fragment per event; None for internal events, a bare
    '.' (no newline) for progress ticks."""
    kind = e["kind"]
    if kind == "progress":
        return "."
    if kind == "read_ok":
        return "* Read OK\n"
    if kind == "theorem":
        return ("* Theorem! Time: %.2fs Prover: %s Hints: %d Str: %s\n"
                % (e["time_s"], e["prover"], e["hints"], e["strategy"]))
    if kind == "minimize":
        return "* Minimizing, current no: %d\n" % e["count"]
    if kind == "result":
        return "* Result: %s\n" % " ".join(e["names"])
    if kind == "tactic":
        return "* Replaying: %s (%.2fs): %s\n" % (
            replay_token, e["time_s"], e["tactic"])
    if kind == "error":
        return "* Error: %s\n" % e["message"]
    if kind == "noproof":
        return "* NoProof\n"
    return None  # 'outcome' and anything future stays off the wire


def loadavg_trailer() -> str:
    try:
        one, five, fifteen = os.getloadavg()
        return "* Loadavg: %.2f %.2f %.2f\n" % (one, five, fifteen)
    except OSError:
        return "* Loadavg: unavailable\n"


def render_transcript(events: Iterable[dict],
                      replay_token: str = "SUGGESTED") -> str:
    parts = []
    for e in events:
        frag = render_event(e, replay_token)
        if frag is not None:
            parts.append(frag)
    return "".join(parts)
