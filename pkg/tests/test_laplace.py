import numpy as np
import pytest
from hypothesis import given, strategies as st

from regdae.errors import NonConvergent, RhoTooSmall
from regdae.laplace import LaplaceConfig, default_rho, transform_residual, truncation_horizon, weighted_l2_norm
from regdae.pencil import generate_regular

# first component of (2 pi)^{-1/2} int_0^inf e^{-(i w + 1) s} e^{-s} ds, from symbolic integration
FIRST_COMPONENT = {
    0.0: 0.19947114020071634,
    1.0: 0.15957691216057307 - 0.079788456080286536j,
    5.0: 0.027513260717340185 - 0.068783151793350462j,
}


def test_weighted_norm_examples():
    assert weighted_l2_norm(lambda t: np.exp(-t), 1.0) == pytest.approx(0.5, abs=1e-9)
    assert weighted_l2_norm(lambda t: np.zeros_like(t), 1.0) == 0.0
    assert weighted_l2_norm(lambda t: np.ones_like(t), 1.0, envelope=(1.0, 0.0)) == pytest.approx(
        0.70710678118654752, abs=1e-9
    )


def test_weighted_norm_truncated():
    val = weighted_l2_norm(lambda t: np.ones_like(t), 1.0, truncation_t=1.0)
    assert val == pytest.approx(np.sqrt((1 - np.exp(-2.0)) / 2), abs=1e-10)


def test_weighted_norm_refuses_growth():
    with pytest.raises(NonConvergent):
        weighted_l2_norm(lambda t: np.exp(t), 0.5, envelope=(1.0, 1.0))
    with pytest.raises(NonConvergent):
        weighted_l2_norm(lambda t: np.exp(0.999 * t), 1.0)


@given(st.floats(0.1, 3.0), st.floats(0.05, 2.0))
def test_weighted_norm_decreases_in_rho(rho, step):
    u = lambda t: np.exp(-0.5 * t) * (1 + np.sin(3 * t) ** 2)
    env = (2.0, -0.5)
    assert weighted_l2_norm(u, rho + step, envelope=env) < weighted_l2_norm(u, rho, envelope=env)


def test_scalar_transform(scalar):
    rep = transform_residual(scalar, [1.0], LaplaceConfig(rho=1.0, frequencies=(0.0,)))
    assert rep.transforms[0, 0] == pytest.approx(1 / (2 * np.sqrt(2 * np.pi)), abs=1e-9)
    assert rep.max_residual <= 1e-8


def test_example_transform(example):
    rep = transform_residual(example, [1.0, 0.0], LaplaceConfig(rho=1.0, frequencies=(0.0, 1.0, 5.0)))
    assert np.all(rep.residuals <= 1e-6) and rep.rho_pair_discrepancy <= 1e-6
    for k, w in enumerate((0.0, 1.0, 5.0)):
        assert abs(rep.transforms[k, 0] - FIRST_COMPONENT[w]) <= 1e-8
        assert abs(rep.transforms[k, 1] + 2 * FIRST_COMPONENT[w]) <= 1e-8
    assert rep.rho_alt == 2.0


def test_null_space_data_has_zero_residual(example):
    rep = transform_residual(example, [0.0, 1.0], LaplaceConfig(rho=1.0))
    assert rep.max_residual == 0.0 and rep.rho_pair_discrepancy == 0.0


def test_rho_too_small(saddle, example):
    with pytest.raises(RhoTooSmall):
        transform_residual(saddle, [1.0, 0.0], LaplaceConfig(rho=1.0))
    with pytest.raises(RhoTooSmall):
        transform_residual(example, [1.0, 0.0], LaplaceConfig(rho=0.0))


def test_default_rho(saddle, example):
    assert default_rho(saddle) == pytest.approx(2.0)
    assert default_rho(example) == 1.0


def test_unstable_pencil_with_large_rho(saddle):
    rep = transform_residual(saddle, [1.0, 1.0], LaplaceConfig(rho=2.0, frequencies=(-1.0, 3.0)))
    assert rep.max_residual <= 1e-6 and rep.rho_pair_discrepancy <= 1e-6


def test_truncation_horizon_bound():
    t = truncation_horizon(3.0, -0.5, 1.0, 1e-9)
    assert 3.0 * np.exp(-1.5 * t) / 1.5 <= 1e-9 * (1 + 1e-12)
    with pytest.raises(NonConvergent):
        truncation_horizon(1.0, 1.0, 1.0, 1e-9)


@given(st.integers(1, 6), st.integers(0, 10**6))
def test_transform_identity_random(r, seed):
    rng = np.random.default_rng(seed)
    n = r + int(rng.integers(0, 3))
    hint = rng.uniform(-2.0, -0.2, r) + 1j * rng.uniform(-2, 2, r)
    p = generate_regular(n, r, seed, spectrum_hint=hint, kind=["accretive", "general"][seed % 2])
    u0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    u0 /= np.linalg.norm(u0)
    rep = transform_residual(p, u0, LaplaceConfig(rho=1.0, frequencies=(-10.0, 0.0, 10.0)))
    assert np.all(rep.residuals >= 0)
    assert rep.max_residual <= 1e-6 and rep.rho_pair_discrepancy <= 1e-6
