import math

import numpy as np
import pytest

from privtrim.bounds import (
    BoundInputs,
    lower_bound_tail,
    lower_bound_variance,
    mechanism_mse_bound,
    ss_second_moment_bound,
    trim_var_bound_general,
    trim_var_bound_symmetric,
    truncation_error_bound,
)
from privtrim.errors import ParameterError
from privtrim.sensitivity import TruncationMode


# ----------------------------------------------------------- trimming bounds


def test_trim_var_bound_symmetric_values():
    assert trim_var_bound_symmetric(100, 0, 1.7) == pytest.approx(1.7 / 100)
    assert trim_var_bound_symmetric(1001, 100, 1.0) == pytest.approx(0.0015601596630927944)


def test_trim_var_bound_general_values():
    assert trim_var_bound_general(100, 0, 2.0) == pytest.approx(0.02)
    assert trim_var_bound_general(100, 5, 1.0) == pytest.approx(0.18693994597198704)


def test_trim_bound_dominates_monte_carlo_symmetric():
    """Symmetric data: trimmed-mean MSE stays below n/(n-2m)^2 E[X^2]."""
    rng = np.random.default_rng(31)
    n, m, reps = 41, 8, 4000
    samplers = [
        lambda size: rng.standard_normal(size),
        lambda size: rng.uniform(-1, 1, size),
        lambda size: rng.laplace(0, 1, size),
        lambda size: rng.standard_t(5, size),
        lambda size: rng.standard_t(3, size),
        lambda size: np.where(rng.random(size) < 0.8, rng.normal(0, 1, size), rng.normal(0, 3, size)),
        lambda size: rng.choice([-1.0, 1.0], size),
        lambda size: rng.normal(0, 0.3, size),
        lambda size: rng.laplace(0, 2, size),
        lambda size: np.where(rng.random(size) < 0.5, rng.normal(0, 0.1, size), rng.normal(0, 2, size)),
    ]
    for draw in samplers:
        x = np.sort(draw((reps, n)), axis=1)
        trims = x[:, m : n - m].mean(axis=1)
        second = draw((200_000,))
        bound = trim_var_bound_symmetric(n, m, float(np.mean(second ** 2)))
        mse = float(np.mean(trims ** 2))
        se = float(np.std(trims ** 2) / math.sqrt(reps))
        assert mse <= bound + 3 * se


def test_bernoulli_tightness_witness():
    # mean mu = m/2n: trimming removes the ones, MSE >= 0.8 mu^2
    rng = np.random.default_rng(32)
    n, m = 200, 10
    mu = m / (2 * n)
    x = (rng.random((20_000, n)) < mu).astype(float)
    x.sort(axis=1)
    trims = x[:, m : n - m].mean(axis=1)
    assert np.mean((trims - mu) ** 2) >= 0.8 * mu * mu


# ---------------------------------------------------------- truncation bound


def test_truncation_error_bound_value():
    assert truncation_error_bound(100, 10, 1.0, -6.0, 6.0, 0.0) == pytest.approx(7.614989872356314e-08)


def test_truncation_error_bound_vanishes_for_wide_interval():
    assert truncation_error_bound(100, 10, 1.0, -200.0, 200.0, 0.0) == pytest.approx(0.0, abs=1e-300)


def test_truncation_error_bound_additive_in_sides():
    both = truncation_error_bound(50, 5, 1.0, -4.0, 4.0, 0.0)
    one = truncation_error_bound(50, 5, 1.0, -4.0, 400.0, 0.0)
    assert one == pytest.approx(both / 2, rel=1e-9)


def test_truncation_error_bound_requires_mu_inside():
    with pytest.raises(ParameterError):
        truncation_error_bound(100, 10, 1.0, 0.0, 1.0, 2.0)


# ------------------------------------------------- smooth-sensitivity bound


def test_ss_second_moment_bound_limits():
    n, m = 100, 10
    # large t: input mode keeps only the log term
    val = ss_second_moment_bound(TruncationMode.INPUT, n, m, 50.0, -1.0, 1.0, 1.0)
    assert val == pytest.approx(8 * math.log(2 * n) / (n - 2 * m) ** 2)
    # output mode at m=0 keeps the full span
    val = ss_second_moment_bound(TruncationMode.OUTPUT, n, 0, 1.0, -1.0, 1.0, 1.0)
    assert val == pytest.approx(2.0 / n + 4.0)


def test_ss_second_moment_bound_dominates_monte_carlo():
    from privtrim.sensitivity import padded_order_stats, smooth_over_t_compact

    rng = np.random.default_rng(33)
    n, m, t, reps = 201, 10, 0.5, 4000
    a, b = -50.0, 1050.0
    x = np.sort(np.clip(rng.standard_normal((reps, n)), a, b), axis=1)
    s_vals = smooth_over_t_compact(padded_order_stats(x, a, b), n, m, np.asarray([t]))[:, 0]
    bound = ss_second_moment_bound(TruncationMode.INPUT, n, m, t, a, b, 1.0)
    emp = float(np.mean(s_vals ** 2))
    assert emp <= bound


# ----------------------------------------------------------- mechanism bound


def standard_inputs(**overrides):
    kw = dict(n=201, m=10, a=-50.0, b=1050.0, sigma_data=1.0, sigma_subg=1.0,
              mu=0.0, t=0.5, s=0.2)
    kw.update(overrides)
    return BoundInputs(**kw)


def test_mechanism_mse_bound_large_s_collapses():
    small = mechanism_mse_bound(TruncationMode.INPUT, standard_inputs(s=1e9), 1.0)
    est_only = mechanism_mse_bound(TruncationMode.INPUT, standard_inputs(s=1e9), 0.0)
    assert small == pytest.approx(est_only, rel=1e-6)


def test_mechanism_mse_bound_halves_with_n():
    lo = mechanism_mse_bound(TruncationMode.INPUT, standard_inputs(n=100_000, m=10), 1.0)
    hi = mechanism_mse_bound(TruncationMode.INPUT, standard_inputs(n=200_000, m=10), 1.0)
    assert hi / lo == pytest.approx(0.5, abs=0.02)


def test_mechanism_mse_bound_output_mode_terms():
    inputs = standard_inputs()
    val = mechanism_mse_bound(TruncationMode.OUTPUT, inputs, 2.0)
    expected = (
        trim_var_bound_general(201, 10, 1.0)
        + ss_second_moment_bound(TruncationMode.OUTPUT, 201, 10, 0.5, -50.0, 1050.0, 1.0)
        / 0.04 * 2.0
    )
    assert val == pytest.approx(expected, rel=1e-12)


# -------------------------------------------------------------- lower bounds


def test_lower_bound_tail_values():
    # x -> 0+ collapses to the k = 1 term
    assert lower_bound_tail(1.0, 0.5, 1.0, 1e-12) == pytest.approx(0.25 * math.exp(-1.0))
    xs = np.geomspace(0.01, 1000, 40)
    vals = [lower_bound_tail(0.3, 0.4, 1.0, float(x)) for x in xs]
    assert all(u >= v for u, v in zip(vals, vals[1:]))  # nonincreasing in x
    with pytest.raises(ParameterError):
        lower_bound_tail(0.0, 0.5, 1.0, 1.0)


def test_lower_bound_variance_t_zero_limit():
    # k=1, l=0 term survives: s^2 / (e^{eps^2} - 1)
    assert lower_bound_variance(1.0, 1e-6, 1.0) == pytest.approx(1.0 / (math.e - 1.0), rel=1e-4)
    assert lower_bound_variance(0.5, 1e-6, 1.0) == pytest.approx(0.25 / (math.e - 1.0), rel=1e-4)


def test_lower_bound_variance_monotone_in_eps():
    for t in (0.1, 0.5, 2.0):
        vals = [lower_bound_variance(1.0, t, eps) for eps in (0.2, 0.5, 1.0, 2.0, 4.0)]
        assert all(x >= y for x, y in zip(vals, vals[1:]))


def test_lower_bound_variance_vanishes_for_large_eps():
    assert lower_bound_variance(1.0, 0.5, 25.0) < 1e-200


def test_lower_bound_variance_finite_and_nonnegative():
    for t in (1e-9, 0.01, 0.5, 3.0, 9.0):
        for eps in (0.2, 1.0, 5.0):
            v = lower_bound_variance(1.0, t, eps)
            assert math.isfinite(v) and v >= 0.0


def test_noise_variance_dominates_lower_bound_across_families():
    """Every implemented family at its calibrated (s, t, eps) respects the bound."""
    from privtrim.errors import InfeasibleError
    from privtrim.noise import (arsinh_normal, calibrate_scale, lln, student_t, uln,
                                variance)
    from privtrim.calibration import optimize_lln_sigma

    eps = 1.0
    checked = 0
    for t in np.geomspace(1e-4, 0.5, 8):
        specs = [
            lln(optimize_lln_sigma(eps, float(t))),
            uln(math.sqrt(2.0)),
            arsinh_normal(2.0 / math.sqrt(3.0)),
            student_t(3),
        ]
        for spec in specs:
            try:
                s = calibrate_scale(spec, float(t), eps)
            except InfeasibleError:
                continue
            assert variance(spec) >= lower_bound_variance(s, float(t), eps)
            checked += 1
    assert checked >= 24


def test_bounds_continuous_under_perturbation():
    base = mechanism_mse_bound(TruncationMode.INPUT, standard_inputs(), 1.0)
    nudged = mechanism_mse_bound(TruncationMode.INPUT, standard_inputs(t=0.5 + 1e-9), 1.0)
    assert nudged == pytest.approx(base, rel=1e-6)
