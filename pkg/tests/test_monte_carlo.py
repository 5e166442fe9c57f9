"""Tests for the monte_carlo module."""
import pytest

from ou_kernels.monte_carlo import MCEstimate, feynman_kac_estimate
from ou_kernels.quadrature import GAUSSIAN_BUMP, Probe


def test_same_seed_is_bit_identical(l_plus):
    first = feynman_kac_estimate(l_plus, 0.5, 0.0, Probe(), 3000, 1e-2, seed=42)
    second = feynman_kac_estimate(l_plus, 0.5, 0.0, Probe(), 3000, 1e-2, seed=42)
    assert first.to_dict() == second.to_dict()


def test_worker_count_does_not_change_the_estimate(l_minus):
    probe = Probe(GAUSSIAN_BUMP, center=0.2, width=0.7)
    serial = feynman_kac_estimate(l_minus, 0.4, 0.5, probe, 2500, 1e-2, seed=7, workers=1,
                                  block_size=600)
    pooled = feynman_kac_estimate(l_minus, 0.4, 0.5, probe, 2500, 1e-2, seed=7, workers=3,
                                  block_size=600)
    assert serial.mean == pooled.mean
    assert serial.standard_error == pooled.standard_error


def test_different_seeds_differ(l_plus):
    a = feynman_kac_estimate(l_plus, 0.5, 0.0, Probe(), 2000, 1e-2, seed=1)
    b = feynman_kac_estimate(l_plus, 0.5, 0.0, Probe(), 2000, 1e-2, seed=2)
    assert a.mean != b.mean


def test_positive_potential_weight_is_below_one(l_plus):
    est = feynman_kac_estimate(l_plus, 0.5, 0.3, Probe(), 2000, 1e-2, seed=3)
    assert 0.0 < est.mean < 1.0
    assert est.standard_error > 0.0
    assert est.paths == 2000


def test_effective_step_divides_t(l_plus):
    est = feynman_kac_estimate(l_plus, 0.25, 0.0, Probe(), 100, 0.1, seed=0)
    assert est.dt == pytest.approx(0.25 / 3)


@pytest.mark.parametrize("kwargs", [
    {"paths": 0},
    {"dt": 0.0},
    {"dt": -1e-3},
    {"seed": -1},
    {"block_size": 0},
])
def test_invalid_arguments(l_plus, kwargs):
    args = {"paths": 100, "dt": 1e-2, "seed": 0, "block_size": 64}
    args.update(kwargs)
    with pytest.raises(ValueError):
        feynman_kac_estimate(l_plus, 0.5, 0.0, Probe(), args["paths"], args["dt"], args["seed"],
                             block_size=args["block_size"])


def test_estimate_to_dict():
    d = MCEstimate(0.5, 0.01, 10, 42, 1e-3).to_dict()
    assert d == {"mean": 0.5, "standard_error": 0.01, "paths": 10, "seed": 42, "dt": 1e-3}
