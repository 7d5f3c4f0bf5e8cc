"""
Tests for `config` module.
"""
import io
import json

import pytest

from pvakit.catalog import EXAMPLES
from pvakit.config import ConfigError, FractionSpec, Job, JobConfig, StringSpec, load_config
from pvakit.const import DEFAULT_FLOOR
from pvakit.lenard import LenardConfig
from pvakit.ratop import RationalOp


@pytest.fixture
def nls_data():
    return json.loads(json.dumps(EXAMPLES["nls"]["config"]))


@pytest.mark.unit
def test_load(tmp_path, nls_data):
    path = tmp_path / "nls.json"
    path.write_text(json.dumps(nls_data))
    config = load_config(path)
    assert config.variables == ["u", "v"]
    assert isinstance(config.operators["H"], FractionSpec)
    assert config.lenard.max_steps == 3
    from_stream = load_config(io.StringIO(json.dumps(nls_data)))
    assert from_stream == config


@pytest.mark.unit
def test_load_errors(tmp_path, nls_data):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    for key, value in (("extra", 1), ("schema", 2), ("window", {"depth": 0})):
        data = dict(nls_data, **{key: value})
        with pytest.raises(ConfigError):
            load_config(io.StringIO(json.dumps(data)))


@pytest.mark.unit
def test_lenard_section(nls_data):
    data = dict(nls_data, lenard={"H": "H", "K": "nothing", "h0": "u"})
    with pytest.raises(ValueError):
        JobConfig.model_validate(data)
    data = dict(nls_data, lenard={"H": "H", "K": "K"})
    with pytest.raises(ValueError):
        JobConfig.model_validate(data)


@pytest.mark.unit
def test_string_spec():
    spec = {"strings": [["u'", "u'"]], "differential": "d"}
    data = {"variables": ["u"], "operators": {"S": spec}}
    config = JobConfig.model_validate(data)
    assert isinstance(config.operators["S"], StringSpec)
    job = Job(config)
    assert job.operators["S"].to_text() == "d + (u')*d^-1*(u')"
    assert isinstance(job.operator("S"), RationalOp)


@pytest.mark.unit
def test_job(nls_data):
    job = Job(JobConfig.model_validate(nls_data))
    assert sorted(job.operators) == ["H", "K", "N", "T"]
    assert job.operator("K").is_differential()
    assert not job.operator("N").is_differential()
    u, v = job.alg.jet(0), job.alg.jet(1)
    assert job.density("h0") == job.density("(u^2 + v^2)/2")
    assert job.density("u*v") == u * v
    with pytest.raises(ConfigError):
        job.operator("X")
    with pytest.raises(ConfigError):
        job.density("w")


@pytest.mark.unit
def test_job_floor(nls_data):
    job = Job(JobConfig.model_validate(nls_data))
    assert job.floor == DEFAULT_FLOOR
    assert job.window.floor == DEFAULT_FLOOR
    job = Job(JobConfig.model_validate(dict(nls_data, floor=-8, window={"depth": 3})))
    assert job.floor == -8 and job.window.depth == 3
    job = Job(JobConfig.model_validate(dict(nls_data, floor=-8)), floor=-5)
    assert job.window.floor == -5


@pytest.mark.unit
@pytest.mark.parametrize(
    "data",
    [
        {"variables": ["d"]},
        {"variables": ["u"], "operators": {"H": "d +"}},
        {"variables": ["u"], "operators": {"H": {"A": "d", "B": "0"}}},
        {"variables": ["u"], "densities": {"h": "w"}},
    ],
)
def test_job_errors(data):
    with pytest.raises(ConfigError):
        Job(JobConfig.model_validate(data))


@pytest.mark.unit
def test_lenard_config(nls_data):
    job = Job(JobConfig.model_validate(nls_data))
    config = job.lenard_config(max_steps=1)
    assert isinstance(config, LenardConfig)
    assert config.max_steps == 1
    u = job.alg.jet(0)
    assert config.seed_kernel == (0, u**-2)
    assert config.h0 == job.density("h0")
    no_lenard = {k: v for k, v in nls_data.items() if k != "lenard"}
    with pytest.raises(ConfigError):
        Job(JobConfig.model_validate(no_lenard)).lenard_config()


@pytest.mark.unit
def test_to_json(nls_data):
    config = JobConfig.model_validate(nls_data)
    again = JobConfig.model_validate(json.loads(config.to_json()))
    assert again == config
