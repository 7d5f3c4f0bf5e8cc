###############################################################################
# pvakit: exact computer algebra for non-local Hamiltonian structures.
# Copyright © 2026 by the pvakit developers. All rights reserved.
# Distributed under the BSD 3-clause license; see LICENSE.md.
###############################################################################
"""
Job configuration: a single JSON document naming the variables, constants,
operators, densities and parameters of a run.

Example::

    {
      "schema": 1,
      "variables": ["u", "v"],
      "constants": ["c"],
      "operators": {
        "H": {"A": "[[c*d*u, -u^2*v], [c*d*v, u^3 + c*d*(u*d + 2*u')]]",
              "B": "[[u, 0], [v, u*d + 2*u']]"},
        "K": "[[0, -1], [1, 0]]"
      },
      "lenard": {"H": "H", "K": "K", "seed_kernel": ["0", "u^(-2)"], "max_steps": 3}
    }
"""
from __future__ import annotations

# stdlib
from io import IOBase
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

# third-party
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
import sympy

# package
from pvakit.const import REPORT_SCHEMA, OutputFormats, PvakitError
from pvakit.diffalg import BadName, DiffAlgebra
from pvakit.dsl import DslError, compile_differential, compile_expression, compile_operator
from pvakit.dsl import compile_string, compile_vector
from pvakit.lenard import LenardConfig
from pvakit.ratop import RationalOp, StringOp, make_fraction
from pvakit.util import Defaults, Window

__author__ = "pvakit developers"

_log = logging.getLogger(__name__)


class ConfigError(PvakitError):
    def __init__(self, detail: str, source: str = ""):
        self.detail = detail
        where = f" in {source}" if source else ""
        super().__init__(f"Bad configuration{where}: {detail}")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class FractionSpec(_Strict):
    """A o B^-1 with differential A and B."""

    A: Union[str, List[List[str]]]
    B: Union[str, List[List[str]]]


class StringSpec(_Strict):
    """differential + sum a d^-1 b."""

    strings: List[List[str]]
    differential: str = "0"


OperatorSpec = Union[str, List[List[str]], FractionSpec, StringSpec]


class WindowSpec(_Strict):
    surplus: Optional[int] = Field(None, ge=1)
    depth: Optional[int] = Field(None, ge=1)
    max_pole: Optional[int] = Field(None, ge=0)


class LenardSpec(_Strict):
    H: str
    K: str
    seed_kernel: Optional[List[str]] = None
    h0: Optional[str] = None
    max_steps: int = Field(3, ge=0)
    order_bound: int = Field(3, ge=0)
    degree_bound: int = Field(3, ge=1)

    @model_validator(mode="after")
    def _has_seed(self):
        if self.seed_kernel is None and self.h0 is None:
            raise ValueError("lenard needs seed_kernel or h0")
        return self


class JobConfig(_Strict):
    schema_: int = Field(REPORT_SCHEMA, alias="schema")
    name: Optional[str] = None
    variables: List[str]
    constants: List[str] = []
    operators: Dict[str, OperatorSpec] = {}
    densities: Dict[str, str] = {}
    floor: Optional[int] = None
    window: WindowSpec = WindowSpec()
    lenard: Optional[LenardSpec] = None
    output: Optional[str] = None
    format: OutputFormats = OutputFormats.JSON

    @model_validator(mode="after")
    def _names_resolve(self):
        if self.schema_ != REPORT_SCHEMA:
            raise ValueError(f"unsupported schema {self.schema_}")
        if self.lenard is not None:
            for role in ("H", "K"):
                name = getattr(self.lenard, role)
                if name not in self.operators:
                    raise ValueError(f"lenard.{role} names unknown operator '{name}'")
        return self

    def to_json(self) -> str:
        data = self.model_dump(mode="json", by_alias=True, exclude_none=True)
        return json.dumps(data, indent=2, sort_keys=True)


def load_config(source: Union[str, Path, IOBase]) -> JobConfig:
    """Read and validate a configuration from a path or an open file.

    Raises:
        ConfigError: for unreadable, malformed or invalid input
    """
    name = getattr(source, "name", str(source))
    try:
        if isinstance(source, IOBase):
            data = json.load(source)
        else:
            with open(source, encoding="utf-8") as f:
                data = json.load(f)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(str(err), name)
    try:
        return JobConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(str(err), name)


def _matrix_text(value: Union[str, List[List[str]]]) -> str:
    if isinstance(value, str):
        return value
    return "[" + ", ".join("[" + ", ".join(row) + "]" for row in value) + "]"


class Job:
    """A configuration with every name compiled.

    Args:
        config: Validated configuration
        floor: Floor given on the command line, which wins over the configuration

    Raises:
        ConfigError: if a name or an expression cannot be compiled
    """

    def __init__(self, config: JobConfig, floor: Optional[int] = None):
        self.config = config
        try:
            self.alg = DiffAlgebra(config.variables, config.constants)
        except BadName as err:
            raise ConfigError(str(err))
        self.floor = floor if floor is not None else config.floor
        if self.floor is None:
            self.floor = Defaults().floor
        base = Defaults().window
        overrides = config.window.model_dump(exclude_none=True)
        self.window = Window(
            floor=self.floor,
            surplus=overrides.get("surplus", base.surplus),
            depth=overrides.get("depth", base.depth),
            max_pole=overrides.get("max_pole", base.max_pole),
        )
        self.operators: Dict[str, Union[RationalOp, StringOp]] = {}
        self.densities: Dict[str, sympy.Expr] = {}
        for key, spec in config.operators.items():
            self.operators[key] = self._compile(key, spec)
        for key, text in config.densities.items():
            self.densities[key] = self._guard(key, compile_expression, text)
        _log.debug(f"Job with operators {sorted(self.operators)}")

    def _guard(self, key, func, *args):
        try:
            return func(self.alg, *args)
        except (DslError, ValueError, PvakitError) as err:
            raise ConfigError(f"'{key}': {err}")

    def _compile(self, key: str, spec) -> Union[RationalOp, StringOp]:
        if isinstance(spec, FractionSpec):
            A = self._guard(key, compile_differential, _matrix_text(spec.A))
            B = self._guard(key, compile_differential, _matrix_text(spec.B))
            try:
                return make_fraction(A, B)
            except (ValueError, PvakitError) as err:
                raise ConfigError(f"'{key}': {err}")
        if isinstance(spec, StringSpec):
            return self._guard(key, compile_string, spec.strings, spec.differential)
        return self._guard(key, compile_operator, _matrix_text(spec))

    def operator(self, name: str) -> RationalOp:
        """Operator by name, string forms as fractions."""
        try:
            op = self.operators[name]
        except KeyError:
            raise ConfigError(f"no operator named '{name}'")
        return op.to_fraction() if isinstance(op, StringOp) else op

    def density(self, text_or_name: str) -> sympy.Expr:
        """Density by name, or compiled from text."""
        if text_or_name in self.densities:
            return self.densities[text_or_name]
        return self._guard(text_or_name, compile_expression, text_or_name)

    def lenard_config(self, max_steps: Optional[int] = None) -> LenardConfig:
        spec = self.config.lenard
        if spec is None:
            raise ConfigError("no 'lenard' section")
        seed = None
        if spec.seed_kernel is not None:
            seed = self._guard("seed_kernel", compile_vector, spec.seed_kernel)
        h0 = self.density(spec.h0) if spec.h0 is not None else None
        return LenardConfig(
            H=self.operator(spec.H),
            K=self.operator(spec.K),
            seed_kernel=seed,
            h0=h0,
            max_steps=spec.max_steps if max_steps is None else max_steps,
            order_bound=spec.order_bound,
            degree_bound=spec.degree_bound,
        )
