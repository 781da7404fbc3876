import inspect

import pytest

from rotorlab.config import validate_params
from rotorlab.errors import ConfigError
from rotorlab.experiments import EXPERIMENTS, get_experiment, list_experiments


@pytest.mark.parametrize("name", sorted(EXPERIMENTS))
def test_schema_covers_target(name):
    experiment = EXPERIMENTS[name]
    required = {
        p.name for p in inspect.signature(experiment.target).parameters.values()
        if p.default is inspect.Parameter.empty and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
    }
    provided = set(experiment.param_names()) | set(experiment.derived)
    assert required <= provided, required - provided


@pytest.mark.parametrize("name", sorted(EXPERIMENTS))
def test_defaults_validate(name):
    experiment = EXPERIMENTS[name]
    params = validate_params(experiment.params, {})
    assert set(params) == set(experiment.param_names())
    assert len(set(experiment.param_names())) == len(experiment.params)


def test_lookup():
    assert get_experiment("gauss-sums").name == "gauss-sums"
    with pytest.raises(ConfigError):
        get_experiment("gauss")
    assert len(list_experiments()) == len(EXPERIMENTS)


@pytest.mark.slow
def test_anderson_chain_matches_dynamics():
    experiment = get_experiment("anderson-bridge")
    params = validate_params(experiment.params, {"k": 3.0, "T": 2.0, "dyn_steps": 2000})
    outcome = experiment.runner(params, 0, None, False)
    assert 0.5 <= outcome.diagnostics["l_dyn_over_2l_tb"] <= 2.0
