"""
Tests for `catalog` module.
"""
import pytest

from pvakit import catalog
from pvakit.config import Job


@pytest.mark.unit
def test_names():
    names = catalog.names()
    assert names == sorted(names)
    for name in ("gfz", "sokolov", "dorfman", "nls", "negative-control", "toda-matrix"):
        assert name in names
    assert all(catalog.EXAMPLES[n]["description"] for n in names)


@pytest.mark.unit
def test_unknown():
    with pytest.raises(KeyError):
        catalog.example_config("no-such-example")


@pytest.mark.unit
@pytest.mark.parametrize("name", catalog.names())
def test_compiles(name):
    config = catalog.example_config(name)
    assert config.name == name
    job = Job(config)
    assert "H" in job.operators
    for key in job.operators:
        assert job.operator(key).shape[0] == len(config.variables)
    if config.lenard is not None:
        assert job.lenard_config().max_steps == config.lenard.max_steps
