###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Utility functions and classes.
"""

from dataclasses import dataclass
import logging
import os
from typing import Optional
import warnings

from pvakit.const import DEFAULT_FLOOR, FLOOR_ENV

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Window:
    """Parameters of a windowed zero test.

    Attributes:
        floor: Validity floor used for every series expansion
        surplus: Number of trailing window entries that must vanish after clearing the
                 pole at the non-polar point (the overdetermined rows)
        depth: Number of total degrees examined below the top degree
        max_pole: Largest pole order tried during reconstruction
    """

    floor: int = DEFAULT_FLOOR
    surplus: int = 3
    depth: int = 2
    max_pole: int = 8

    def with_floor(self, floor: Optional[int]) -> "Window":
        if floor is None:
            return self
        return Window(
            floor=floor, surplus=self.surplus, depth=self.depth, max_pole=self.max_pole
        )


class Defaults:
    """Process-wide defaults.

    This class is a singleton.

    Example: `floor = Defaults().floor`

    The validity floor is read once from the environment variable named by
    `pvakit.const.FLOOR_ENV`; it can also be set directly, e.g.::

        Defaults().floor = -20

    """

    _shared_state = {}  # for singleton pattern

    def __new__(cls, *args, **kwargs):
        """Singleton pattern"""
        obj = super(Defaults, cls).__new__(cls, *args, **kwargs)
        obj.__dict__ = cls._shared_state
        return obj

    def __init__(self):
        """Constructor.

        On first call, reads the floor override from the environment.
        A malformed value is ignored with a warning.
        """
        if not hasattr(self, "floor"):
            self.floor = DEFAULT_FLOOR
            value = os.environ.get(FLOOR_ENV, None)
            if value is not None:
                try:
                    self.floor = int(value)
                    _log.debug(f"Validity floor from {FLOOR_ENV}: {self.floor}")
                except ValueError:
                    warnings.warn(f"Ignoring non-integer {FLOOR_ENV}='{value}'")
            self.window = Window(floor=self.floor)

    @classmethod
    def reset(cls):
        """Forget all state, so the environment is read again."""
        cls._shared_state.clear()


def resolve_floor(floor: Optional[int] = None) -> int:
    """Explicit floor if given, else the process default."""
    return Defaults().floor if floor is None else floor
