###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Bundled example operators, each ready to use as a job configuration.

In every entry the operator under study is named ``H``; partners for
compatibility checks are ``K`` (and ``T`` for the third member of a triple).
"""
from typing import Dict, List

from pvakit.config import JobConfig

__author__ = "pvakit developers"

ONE = {"variables": ["u"]}

_NLS_A = "[[c*d*u, -u^2*v], [c*d*v, u^3 + c*d*(u*d + 2*u')]]"
_NLS_B = "[[u, 0], [v, u*d + 2*u']]"
_NLS_STRINGS = "[[v*d^-1*v, -v*d^-1*u], [-u*d^-1*v, u*d^-1*u]]"

EXAMPLES: Dict[str, dict] = {
    "gfz": {
        "description": "Gardner-Faddeev-Zakharov structure d",
        "config": {**ONE, "operators": {"H": "d"}},
    },
    "d3": {
        "description": "Local structure d^3",
        "config": {**ONE, "operators": {"H": "d^3"}},
    },
    "toda": {
        "description": "Toda structure d^-1",
        "config": {**ONE, "operators": {"H": "d^-1"}},
    },
    "sokolov": {
        "description": "Sokolov structure u' d^-1 u', with d and d^-1",
        "config": {
            **ONE,
            "operators": {"H": "u'*d^-1*u'", "K": "d", "T": "d^-1", "S": "u'^-1*d*u'^-1"},
        },
    },
    "dorfman": {
        "description": "Dorfman structure d^-1 u' d^-1 u' d^-1, with Sokolov",
        "config": {
            **ONE,
            "operators": {
                "H": "d^-1*u'*d^-1*u'*d^-1",
                "K": "u'*d^-1*u'",
                "S": "d*u'^-1*d*u'^-1*d",
            },
        },
    },
    "potential-vm": {
        "description": "Potential Virasoro-Magri structure d^-1 u' + u' d^-1, with d and d^-1",
        "config": {**ONE, "operators": {"H": "d^-1*u' + u'*d^-1", "K": "d", "T": "d^-1"}},
    },
    "modified-vm": {
        "description": "Modified Virasoro-Magri structure d u d^-1 u d, with d and d^3",
        "config": {**ONE, "operators": {"H": "d*u*d^-1*u*d", "K": "d", "T": "d^3"}},
    },
    "negative-control": {
        "description": "Skewadjoint operator d^3 + u^2 d + u u' failing the Jacobi identity",
        "config": {**ONE, "operators": {"H": "d^3 + u^2*d + u*u'"}},
    },
    "sokolov-symplectic": {
        "description": "Sokolov symplectic operator u'^-1 d u'^-1",
        "config": {**ONE, "operators": {"H": "u'^-1*d*u'^-1", "K": "u'*d^-1*u'"}},
    },
    "dorfman-symplectic": {
        "description": "Dorfman symplectic operator d u'^-1 d u'^-1 d",
        "config": {
            **ONE,
            "operators": {"H": "d*u'^-1*d*u'^-1*d", "K": "d^-1*u'*d^-1*u'*d^-1"},
        },
    },
    "pencil": {
        "description": "H = d^2 u^-1 d u^-1 d^2 and K = d^3",
        "config": {**ONE, "operators": {"H": "d^2*u^-1*d*u^-1*d^2", "K": "d^3"}},
    },
    "linear": {
        "description": "Linear hierarchy for H = d^3, K = d from h0 = u^2/2",
        "config": {
            **ONE,
            "operators": {"H": "d^3", "K": "d"},
            "lenard": {"H": "H", "K": "K", "h0": "u^2/2", "max_steps": 3},
        },
    },
    "nls": {
        "description": "NLS pair H = A B^-1 and K, with the string part N of H and T = d",
        "config": {
            "variables": ["u", "v"],
            "constants": ["c"],
            "operators": {
                "H": {"A": _NLS_A, "B": _NLS_B},
                "K": "[[0, -1], [1, 0]]",
                "T": "[[d, 0], [0, d]]",
                "N": _NLS_STRINGS,
            },
            "densities": {"h0": "(u^2 + v^2)/2"},
            "lenard": {
                "H": "H",
                "K": "K",
                "seed_kernel": ["0", "u^-2"],
                "h0": "h0",
                "max_steps": 3,
            },
        },
    },
    "toda-matrix": {
        "description": "Constant symmetric matrix family c_ij d^-1",
        "config": {
            "variables": ["u", "v"],
            "operators": {"H": "[[2*d^-1, -d^-1], [-d^-1, 2*d^-1]]"},
        },
    },
}


def names() -> List[str]:
    return sorted(EXAMPLES)


def example_config(name: str) -> JobConfig:
    """Configuration of a bundled example.

    Raises:
        KeyError: if there is no such example
    """
    if name not in EXAMPLES:
        raise KeyError(f"No example '{name}'; choose from {', '.join(names())}")
    return JobConfig.model_validate({"name": name, **EXAMPLES[name]["config"]})
