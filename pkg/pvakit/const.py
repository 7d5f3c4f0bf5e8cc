###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Shared constants for pvakit
"""

from enum import Enum

__author__ = "pvakit developers"


class PvakitError(Exception):
    """Base class of every error raised by the package."""


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    UNDETERMINED = "undetermined"


class Agreement(Enum):
    """Outcome of comparing two operators or symbols."""

    EXACT = "exact"
    TO_FLOOR = "verified-to-floor"
    DIFFERENT = "different"


class Engine(Enum):
    EXACT = "exact"
    WINDOWED = "windowed"
    BOTH = "both"


class OutputFormats(Enum):
    JSON = "json"
    TEXT = "text"


class SeedKind(Enum):
    KERNEL = "kernel"
    DENSITY = "density"


class ExitCode:
    PASS = 0
    FAIL = 1
    UNDETERMINED = 2
    USAGE = 3


CONSOLE = "-"
REPORT_SCHEMA = 1
DEFAULT_FLOOR = -12
FLOOR_ENV = "PVAKIT_FLOOR"
