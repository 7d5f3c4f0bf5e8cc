###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
import pytest


PVAKIT_MARKERS = {
    "unit": "Quick tests of single operations, must run in < 2 s",
    "component": "End-to-end checks on the bundled example operators",
    "integration": "Long duration tests (deep windows, full hierarchies)",
}


def pytest_configure(config: pytest.Config):
    for spec, descr in PVAKIT_MARKERS.items():
        config.addinivalue_line("markers", f"{spec}: {descr}")
