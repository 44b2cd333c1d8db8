"""Deterministic simulated multi-host runtime."""

from .interpreter import RunResult, run_program
from .script import IoScript, parse_script
from .trace import io_events, serialize_trace
from .world import World

__all__ = ["IoScript", "RunResult", "World", "io_events", "parse_script", "run_program", "serialize_trace"]
