"""Toolchain for thinging machine (TM) conceptual models.

Parse TM and ER sources, check flow laws, dissipate ER relationships into
TM flows and events, derive chronologies, simulate them and draw diagrams.
"""

from tmc.dissipator import Strategy, dissipate, shorthand
from tmc.errors import Diagnostic, ParseError, Severity, TMError
from tmc.eventizer import eventize, region_coverage
from tmc.frontend import parse_er, parse_tm, serialize_er, serialize_tm
from tmc.render import View, render
from tmc.simulator import Trace, simulate, time_share
from tmc.validator import validate

__version__ = "0.1.0"

__all__ = [
    "Diagnostic",
    "ParseError",
    "Severity",
    "Strategy",
    "TMError",
    "Trace",
    "View",
    "dissipate",
    "eventize",
    "parse_er",
    "parse_tm",
    "region_coverage",
    "render",
    "serialize_er",
    "serialize_tm",
    "shorthand",
    "simulate",
    "time_share",
    "validate",
]
