import json
import math

import numpy as np
import pytest

from qsubgraph.analysis import (convergence_study, cost_model_eval, cost_sweep, crossover, log_grid,
                                loglog_slope, quadratic_form_for, quadratic_form_quantum, sample_distances)
from qsubgraph.encoding import prepare_psi_f
from qsubgraph.graph import builtin_graph, path_graph, quadratic_form_classical
from qsubgraph.statevector import SampleHistogram


@pytest.fixture(scope="module")
def kite2():
    return prepare_psi_f(builtin_graph("kite"), 2)


@pytest.mark.parametrize("name,x", [("p3w", 1), ("kite", 1), ("kite", 2), ("cycle4", 3)])
def test_exact_reconstruction(name, x):
    rep = sample_distances(prepare_psi_f(builtin_graph(name), x), None)
    assert rep.delta <= 1e-9


def test_reconstruction_x_zero(kite):
    rep = sample_distances(prepare_psi_f(kite, 0), None)
    assert len(rep.configs) == 1
    assert rep.D_classical[0] == 0 and rep.delta <= 1e-12


def test_zero_shot_histogram_rejected(kite2):
    from qsubgraph.analysis import reconstruct_distances
    with pytest.raises(ValueError):
        reconstruct_distances(SampleHistogram({}, 0, kite2.layout, 0), kite2)


def test_sampled_report_is_seeded(kite2):
    a = sample_distances(kite2, 10_000, seed=4)
    b = sample_distances(kite2, 10_000, seed=4)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv({"seed": 4}).startswith("# seed: 4\nconfig_bits,")
    rows = list(a.rows())
    assert rows[0][0] == "0011"
    assert rows[0][2] == pytest.approx(14.11)


def test_sampled_error_shrinks(kite2):
    small = np.mean([sample_distances(kite2, 1_000, s).delta for s in range(5)])
    large = np.mean([sample_distances(kite2, 1_000_000, s).delta for s in range(5)])
    assert large < small / 10


def test_convergence_study(kite2):
    study = convergence_study(kite2.graph, 2, [10**3, 10**4, 10**5, 10**6], range(6), prepared=kite2)
    assert -0.65 <= study.slope <= -0.35
    assert study.deltas.shape == (4, 6)
    data = json.loads(study.to_json(graph="kite"))
    assert data["graph"] == "kite" and len(data["table"]) == 4
    p = study.percentiles()
    assert np.all(p[:, 0] <= p[:, 2])


def test_convergence_grid_validation(kite2):
    with pytest.raises(ValueError):
        convergence_study(kite2.graph, 2, [100, 1000], [0], prepared=kite2)
    with pytest.raises(ValueError):
        convergence_study(kite2.graph, 2, [100, 200, 300], [0], prepared=kite2)


def test_loglog_slope_exact():
    x = np.array([1e2, 1e3, 1e4])
    slope, intercept = loglog_slope(x, 3 * x**-0.5)
    assert slope == pytest.approx(-0.5) and intercept == pytest.approx(math.log(3))


def test_quadratic_form_path_unit_vector():
    g = path_graph(3)
    assert quadratic_form_for(g, [0, 0], [1.0, 0.0, 0.0]) == pytest.approx(1.0, abs=1e-10)


def test_quadratic_form_constant_vector(kite):
    for d in ([0, 0, 0, 0], [1, 0, 0, 1]):
        assert abs(quadratic_form_for(kite, d, np.ones(kite.M) * 2.5)) < 1e-10


def test_quadratic_form_random(kite, rng):
    d = np.array([0, 1, 1, 0])
    prepared = prepare_psi_f(kite, 2, config=d, classical_config=True)
    for _ in range(10):
        a = rng.normal(size=kite.M)
        assert quadratic_form_quantum(prepared, d, a) == pytest.approx(
            quadratic_form_classical(kite, d, a), abs=1e-8)


def test_quadratic_form_from_superposition(kite, kite2, rng):
    # the branch of the full Dicke-superposed state gives the same value
    d = np.array([1, 0, 1, 0])
    a = rng.normal(size=kite.M)
    assert quadratic_form_quantum(kite2, d, a) == pytest.approx(quadratic_form_classical(kite, d, a), abs=1e-8)


def test_quadratic_form_errors(kite):
    with pytest.raises(ValueError):
        quadratic_form_for(kite, [0, 0, 0, 0], [1.0, 2.0])
    with pytest.raises(ValueError):
        quadratic_form_for(kite, [0, 0, 0, 0], np.zeros(kite.M))


def test_cost_model_formulas():
    c = cost_model_eval(100, x=2)
    assert c.S == pytest.approx(5000)
    assert c.t_cla == pytest.approx(5e5)
    assert c.t_min == pytest.approx(math.sqrt(5000) * 100 * math.log2(math.log2(100)))
    assert cost_model_eval(2).t_min == 0.0
    assert set(c.to_dict()) >= {"N", "M", "x", "eps", "S", "t_min", "t_cla", "n_min", "components"}
    assert cost_model_eval(100, eps=0.5).t_min == pytest.approx(2 * cost_model_eval(100).t_min)
    with pytest.raises(ValueError):
        cost_model_eval(1)
    with pytest.raises(ValueError):
        cost_model_eval(10, eps=0)


@pytest.mark.parametrize("x", [1, 2, 3])
def test_cost_crossover_and_monotone(x):
    rows = cost_sweep(log_grid(2, 1e6, 4), xs=(x,))
    thr = crossover(rows, x)
    assert thr is not None
    assert all(r["t_min"] < r["t_cla"] for r in rows if r["N"] >= thr)
    for key in ("t_min", "t_cla"):
        vals = [r[key] for r in rows]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_crossover_none_when_never_below():
    rows = [{"x": 1, "N": 10, "t_min": 5.0, "t_cla": 1.0}, {"x": 1, "N": 20, "t_min": 6.0, "t_cla": 2.0}]
    assert crossover(rows, 1) is None


def test_log_grid():
    g = log_grid(10, 1000, 2)
    assert g[0] == 10 and g[-1] == 1000 and len(g) == 5
