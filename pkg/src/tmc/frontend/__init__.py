"""Text front end: parsers and canonical serializers."""

from tmc.frontend.er import parse_er
from tmc.frontend.serialize import dumps, er_to_dict, model_to_dict, serialize_er, serialize_tm
from tmc.frontend.tm import parse_stage_ref, parse_tm

__all__ = [
    "dumps",
    "er_to_dict",
    "model_to_dict",
    "parse_er",
    "parse_stage_ref",
    "parse_tm",
    "serialize_er",
    "serialize_tm",
]
