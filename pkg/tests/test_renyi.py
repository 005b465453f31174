import math

import numpy as np
import pytest

from privtrim.noise import gaussian, lln, log_density, uln
from privtrim.renyi import divergence_pair, renyi_divergence, _grid


def test_density_normalization_on_grid():
    grid = _grid()
    for spec in (lln(1.0), lln(0.5), uln(math.sqrt(2.0)), gaussian()):
        mass = np.trapezoid(np.exp(np.asarray(log_density(spec, grid))), grid)
        assert abs(mass - 1.0) < 5e-5


def test_gaussian_shift_closed_form():
    """D_alpha(N(0,1) || N(mu,1)) = alpha mu^2 / 2, an exact external anchor."""
    for alpha in (1.5, 2.0, 5.0):
        for mu in (0.1, 0.5, 1.0):
            d_fwd, d_rev = divergence_pair(gaussian(), 0.0, mu, alpha)
            exact = alpha * mu * mu / 2.0
            assert abs(d_fwd - exact) < 2e-5 + 1e-3 * exact
            assert abs(d_rev - exact) < 2e-5 + 1e-3 * exact


def test_zero_distortion_gives_zero_divergence():
    d_fwd, d_rev = divergence_pair(lln(1.0), 0.0, 0.0, 2.0)
    assert abs(d_fwd) < 1e-4
    assert abs(d_rev) < 1e-4


def test_lln_pure_dilation_respects_lemma_bound():
    # multiplicative-only lemma: D_alpha(Z || e^t Z) <= alpha t^2 / (2 sigma^2)
    sigma, t = 1.0, 0.2
    for alpha in (1.5, 5.0):
        d_fwd, d_rev = divergence_pair(lln(sigma), t, 0.0, alpha)
        bound = alpha * t * t / (2 * sigma * sigma)
        assert max(d_fwd, d_rev) <= bound


def test_invalid_alpha():
    with pytest.raises(ValueError):
        renyi_divergence(lambda z: z, lambda z: z, 1.0)
