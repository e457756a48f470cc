import json
import math

import pytest

from sectoria.report import dumps
from sectoria.suite import GROUPS, RunConfig, Suite, hermitian_power_oracle, omega_max_im_grid, run_suite
from sectoria.regions import omega_max_im

SMALL = dict(instances=12, trials=500, product_trials=60, oracle_cases=8, power_nmax=128, angles=360)


def test_defaults():
    cfg = RunConfig()
    assert cfg.seed == 1 and cfg.dims == (2, 4, 8) and cfg.alphas == (0.2, 0.6, 1.0, 1.4)
    assert cfg.trials == 10_000 and cfg.angles == 720
    assert cfg.euler_ns == [2**k for k in range(11)]


@pytest.mark.parametrize("bad", [
    {"alphas": [1.6]}, {"alphas": []}, {"dims": [0]}, {"trials": 0}, {"angles": 2},
    {"euler_ts": [-1.0]}, {"colour": "red"},
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        RunConfig.from_dict(bad)


def test_config_round_trip():
    cfg = RunConfig(seed=5, dims=[3], alphas=[0.5])
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_instance_pool_covers_grid():
    suite = Suite(RunConfig(instances=24, dims=(2, 4), alphas=(0.3, 0.9)))
    seen = {(Sm.dim, Sm.alpha) for Sm in suite.instances}
    assert seen == {(2, 0.3), (4, 0.3), (2, 0.9), (4, 0.9)}


def test_small_suite_passes_and_is_deterministic():
    a = run_suite(RunConfig(**SMALL))
    b = run_suite(RunConfig(**SMALL))
    assert a.passed, [(c.group, c.name, c.params) for c in a.failures()]
    assert dumps(a.to_dict()) == dumps(b.to_dict())
    assert [g.split(":")[0] for g in a.groups()] == [str(g.number) for g in GROUPS]
    assert all(c.anchor for c in a.checks)


def test_seed_changes_report():
    a = run_suite(RunConfig(**SMALL), groups={8})
    b = run_suite(RunConfig(**{**SMALL, "seed": 2}), groups={8})
    assert dumps(a.to_dict()) != dumps(b.to_dict())


def test_near_right_angle_flags_vacuous_rows():
    cfg = RunConfig(**{**SMALL, "alphas": (1.56,), "instances": 3})
    rep = run_suite(cfg, groups={7, 8, 10})
    assert rep.passed
    euler = [c for c in rep.checks if c.name == "Euler error bound"]
    assert euler and all(c.status == "vacuous" for c in euler)
    contain = [c for c in rep.checks if c.group.startswith(("7", "10"))]
    assert contain and all(c.status == "passed" for c in contain)


def test_zero_angle_is_accepted():
    rep = run_suite(RunConfig(**{**SMALL, "alphas": (0.0,), "instances": 3}))
    assert rep.passed, [(c.name, c.params) for c in rep.failures()]


def test_hermitian_oracle_and_grid_helpers():
    ns, values = hermitian_power_oracle(1, 1024)
    assert ns[-1] == 1024
    assert abs(values[-1] - math.exp(-1)) / math.exp(-1) < 0.02
    assert abs(omega_max_im_grid(1.0) - omega_max_im(1.0)) < 1e-8
