import math

import numpy as np
import pytest

from privtrim.calibration import (
    CalibrationProblem,
    default_t_grid,
    grid_search,
    lln_cubic,
    optimize_lln_sigma,
    shape_for,
)
from privtrim.errors import InfeasibleError, ParameterError
from privtrim.harness import Algorithm, DataFamily, DataModel, ExperimentSpec, run_experiment
from privtrim.noise import NoiseFamily, NoiseSpec, calibrate_scale, variance


def test_cubic_root_residual_and_bracket():
    rng = np.random.default_rng(12)
    for _ in range(50):
        eps = float(np.exp(rng.uniform(math.log(0.01), math.log(10.0))))
        t = float(np.exp(rng.uniform(math.log(1e-4), math.log(5.0))))
        sigma = optimize_lln_sigma(eps, t)
        assert abs(lln_cubic(eps, t, sigma)) < 1e-10
        assert sigma > t / eps
        assert lln_cubic(eps, t, t / eps) < 0
        assert lln_cubic(eps, t, max(2 * t / eps, 0.5)) > 0
        # derivative strictly positive at the root (unique real root)
        assert 15.0 * eps / t * sigma ** 2 - 10.0 * sigma > 0


def test_cubic_root_matches_dense_variance_argmin():
    # the root should minimize 2 / (e^{-5 sigma^2} (eps - t/sigma)^2)
    eps, t = 1.0, 0.1
    sigma = optimize_lln_sigma(eps, t)
    grid = np.linspace(t / eps * 1.0001, 3.0, 200_000)
    objective = 2.0 / (np.exp(-5 * grid ** 2) * (eps - t / grid) ** 2)
    assert sigma == pytest.approx(grid[np.argmin(objective)], abs=2e-5)


def test_sigma_monotone_decreasing_in_eps():
    t = 0.3
    sigmas = [optimize_lln_sigma(eps, t) for eps in (0.2, 0.5, 1.0, 2.0, 5.0)]
    assert all(x > y for x, y in zip(sigmas, sigmas[1:]))


def test_sigma_vanishes_as_t_vanishes():
    sigmas = [optimize_lln_sigma(1.0, t) for t in (1e-2, 1e-4, 1e-6)]
    assert all(x > y for x, y in zip(sigmas, sigmas[1:]))
    assert sigmas[-1] < 1e-2


def test_optimize_rejects_nonpositive():
    with pytest.raises(ParameterError):
        optimize_lln_sigma(0.0, 0.1)
    with pytest.raises(ParameterError):
        optimize_lln_sigma(1.0, -0.1)


def test_default_t_grid_shape():
    grid = default_t_grid()
    assert len(grid) == 150
    assert grid[0] == pytest.approx(1e-9)
    assert grid[-1] == pytest.approx(9.0)
    single = default_t_grid(1)
    assert len(single) == 1


def test_grid_search_argmin_contract():
    problem = CalibrationProblem(eps=1.0, family=NoiseFamily.LLN, t_grid=default_t_grid(25))

    def objective(t, s, shape):
        return variance(NoiseSpec(NoiseFamily.LLN, shape)) / (s * s)

    best = grid_search(problem, objective)
    for t in problem.t_grid:
        try:
            shape = shape_for(NoiseFamily.LLN, 1.0, float(t))
            s = calibrate_scale(NoiseSpec(NoiseFamily.LLN, shape), float(t), 1.0)
        except InfeasibleError:
            continue
        assert best.value <= objective(float(t), s, shape) + 1e-12


def test_grid_search_single_point():
    problem = CalibrationProblem(eps=1.0, family=NoiseFamily.STUDENT_T,
                                 t_grid=np.asarray([0.05]))
    best = grid_search(problem, lambda t, s, shape: s)
    assert best.t == 0.05
    assert best.shape == 3.0


def test_grid_search_reproducible_and_order_independent():
    grid = default_t_grid(20)
    p1 = CalibrationProblem(eps=0.5, family=NoiseFamily.ULN, t_grid=grid)
    p2 = CalibrationProblem(eps=0.5, family=NoiseFamily.ULN, t_grid=grid[::-1].copy())
    obj = lambda t, s, shape: variance(NoiseSpec(NoiseFamily.ULN, shape)) / (s * s)
    assert grid_search(p1, obj) == grid_search(p2, obj)


def test_grid_search_all_infeasible():
    problem = CalibrationProblem(eps=0.01, family=NoiseFamily.STUDENT_T,
                                 t_grid=np.asarray([1.0, 2.0]))
    with pytest.raises(InfeasibleError):
        grid_search(problem, lambda t, s, shape: s)


def test_tuned_t_beats_fixed_t_empirically():
    """Monte Carlo: the grid-tuned t is no worse than any fixed t, shared data."""
    base = dict(
        data=DataModel(DataFamily.GAUSSIAN), n=51, reps=4000, eps=1.0,
        algorithms=(Algorithm.LLN,), m_grid=(8,), a=-20.0, b=20.0, seed=2024,
    )
    tuned = run_experiment(ExperimentSpec(t_grid=default_t_grid(25), **base)).rows[0]
    for t in (0.01, 0.1, 1.0):
        fixed = run_experiment(ExperimentSpec(t_grid=np.asarray([t]), **base)).rows[0]
        assert tuned.excess_var <= fixed.excess_var + 1e-9
