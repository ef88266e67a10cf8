"""
Generalised Mermin-type arguments over finite abelian groups: exact
contextuality checks, a qudit simulator and the secret sharing protocol
built on them.
"""

from .registry import jsonify, objectify
from . import abelian
from . import scenario
from . import fixtures
from . import contextuality
from . import quantum
from . import protocol

__all__ = [
    "jsonify",
    "objectify",
    "abelian",
    "scenario",
    "fixtures",
    "contextuality",
    "quantum",
    "protocol",
]
