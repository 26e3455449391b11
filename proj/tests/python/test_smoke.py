"""End-to-end smoke tests of the chainflow Python module."""

import math

import pytest

import chainflow as cf


@pytest.fixture(scope="module")
def instance():
    config = cf.preset_config("abilene")
    config.seed = 3
    return cf.generate_scenario(config)


def test_presets_and_generation(instance):
    names = cf.preset_names()
    assert "abilene" in names and "sw-linear" in names
    assert instance.node_count == 11
    assert instance.edge_count == 28
    assert instance.app_count == 3
    instance.validate()

    config = cf.preset_config("abilene")
    config.seed = 3
    again = cf.generate_scenario(config)
    assert again.to_json() == instance.to_json()
    assert "abilene" == config.topology


def test_instance_round_trip(instance, tmp_path):
    path = tmp_path / "instance.json"
    instance.save(str(path))
    loaded = cf.Instance.load(str(path))
    assert loaded.to_json() == instance.to_json()
    rebuilt = cf.Instance.from_json(instance.to_json())
    assert rebuilt.edge_count == instance.edge_count


def test_traffic_and_cost(instance):
    strategy = cf.initial_strategy(instance)
    ok, report = cf.validate_strategy(instance, strategy)
    assert ok, report
    flows = cf.solve_traffic(instance, strategy)
    assert len(flows.link_load) == instance.edge_count
    assert len(flows.node_load) == instance.node_count
    cost = cf.total_cost(instance, flows)
    assert math.isfinite(cost) and cost > 0


def test_optimizer_and_checks(instance, tmp_path):
    params = cf.GPParams()
    params.tol = 1e-6
    result = cf.run_gp(instance, cf.initial_strategy(instance), params)
    assert result.status == "converged"
    assert result.final_residual <= params.tol
    assert math.isfinite(result.final_cost)
    assert result.trajectory, "expected at least one trajectory record"
    first = result.trajectory[0]
    assert first[0] == 0 and math.isfinite(first[1])
    assert result.trajectory_csv().startswith("iter,cost,residual,loop_free,messages\n")

    report = cf.check_sufficiency(instance, result.strategy, tol=1e-6)
    assert report.satisfied
    # Stationarity residuals are traffic-weighted, so a run that stopped at a
    # direction-gap of 1e-6 needs proportional headroom here.
    assert cf.check_kkt(instance, result.strategy, tol=1e-5).satisfied

    path = tmp_path / "strategy.json"
    result.strategy.save(instance, str(path))
    warm = cf.Strategy.load(instance, str(path))
    rerun = cf.run_gp(instance, warm, params)
    assert rerun.iterations <= 1  # already optimal


def test_baselines_and_oracle(instance):
    params = cf.GPParams()
    params.tol = 1e-6
    gp = cf.run_gp(instance, cf.initial_strategy(instance), params)

    for result in (cf.spoc(instance, params), cf.lcof(instance, params), cf.lpr_sc(instance)):
        assert result.feasible
        assert gp.final_cost <= result.cost * 1.001

    oracle = cf.frank_wolfe_oracle(instance)
    assert oracle.converged
    assert oracle.lower_bound <= gp.final_cost * (1 + 1e-9)
    assert gp.final_cost <= oracle.cost * 1.01

    outcomes = cf.compare_methods(instance, ["gp", "lcof"], params)
    assert [o.method for o in outcomes] == ["gp", "lcof"]
    assert all(o.feasible for o in outcomes)
    best = min(o.cost for o in outcomes)
    assert math.isclose(best, gp.final_cost, rel_tol=1e-6)


def test_degenerate_family():
    deg = cf.build_degenerate_instance(0.1)
    assert deg.rho == 0.1
    assert cf.check_kkt(deg.instance, deg.kkt_strategy, tol=1e-9).satisfied
    suff = cf.check_sufficiency(deg.instance, deg.kkt_strategy, tol=1e-9)
    assert not suff.satisfied
    assert suff.max_residual == pytest.approx(1 - (5 / 6) * 0.1, rel=1e-9)

    params = cf.GPParams()
    params.tol = 1e-8
    result = cf.run_gp(deg.instance, deg.kkt_strategy, params)
    assert result.status == "converged"
    assert result.final_cost <= 0.101

    with pytest.raises(cf.ValidationError):
        cf.build_degenerate_instance(2.0)


def test_events_are_applied(instance):
    params = cf.GPParams()
    params.tol = 1e-6
    events = '[{"kind": "rate-change", "iter": 2, "app": 0, "node": 0, "rate": 0.25}]'
    result = cf.run_gp(instance, cf.initial_strategy(instance), params, events_json=events)
    assert result.status == "converged"
    assert result.iterations >= 2
    plain = cf.run_gp(instance, cf.initial_strategy(instance), params)
    assert result.final_cost != plain.final_cost
