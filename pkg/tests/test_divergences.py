import math

import numpy as np
import pytest
from scipy import integrate

from covertawgn import divergences as dv
from covertawgn import planner as pl
from covertawgn import truncgauss as tg
from covertawgn.errors import DomainError

LOG2E = math.log2(math.e)
LN2 = math.log(2.0)


def test_unit_conversions_roundtrip():
    assert dv.nats_to_bits(dv.bits_to_nats(0.7)) == pytest.approx(0.7, rel=1e-15)
    assert dv.bits_to_nats(1.0) == pytest.approx(LN2, rel=1e-15)


def test_pair_validation():
    with pytest.raises(DomainError):
        dv.IsotropicGaussianPair(0, 1.5)
    with pytest.raises(DomainError):
        dv.IsotropicGaussianPair(4, 0.0)
    with pytest.raises(DomainError):
        dv.IsotropicGaussianPair(4, float("inf"))
    assert dv.IsotropicGaussianPair(4, 1.25).excess_power == pytest.approx(0.25)


def test_kl_isotropic_anchor():
    # n=2, sigma^2=2: KL = (1 - ln 2) log2 e = log2 e - 1
    pair = dv.IsotropicGaussianPair(2, 2.0)
    assert dv.kl_isotropic(pair) == pytest.approx(LOG2E - 1.0, rel=1e-14)


def test_kl_isotropic_equal_pair_is_zero():
    assert dv.kl_isotropic(dv.IsotropicGaussianPair(100, 1.0)) == 0.0


def test_kl_isotropic_small_x_quadratic():
    # leading term (n/4) x^2 log2 e
    n, x = 64, 1e-6
    got = dv.kl_isotropic(dv.IsotropicGaussianPair(n, 1.0 + x))
    assert got == pytest.approx(0.25 * n * x * x * LOG2E, rel=1e-5)


def test_hellinger_sq_anchor():
    # n=2, sigma^2=4: H^2 = 1 - 2*2/(1+4) = 0.2
    pair = dv.IsotropicGaussianPair(2, 4.0)
    assert dv.hellinger_sq_isotropic(pair) == pytest.approx(0.2, rel=1e-14)


def test_tvd_isotropic_exact_anchor_1d():
    pair = dv.IsotropicGaussianPair(1, 4.0)
    assert dv.tvd_isotropic_exact(pair) == pytest.approx(0.32267456883476875, rel=1e-12)


def test_tvd_isotropic_quadrature_cross_check():
    # independent 1-D quadrature of |p1 - p0| / 2
    s2 = 2.5
    p1 = lambda t: math.exp(-t * t / (2 * s2)) / math.sqrt(2 * math.pi * s2)
    p0 = lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi)
    val, err = integrate.quad(lambda t: abs(p1(t) - p0(t)), -40, 40, limit=400)
    got = dv.tvd_isotropic_exact(dv.IsotropicGaussianPair(1, s2))
    assert got == pytest.approx(0.5 * val, abs=max(1e-10, 10 * err))


def test_tvd_isotropic_shrinking_and_widening():
    # V_T must also be exact for sigma^2 < 1 (quiet channel side)
    pair = dv.IsotropicGaussianPair(1, 0.25)
    flipped = dv.IsotropicGaussianPair(1, 4.0)
    # scaling t -> t/2 maps one problem onto the other, TVD is invariant
    assert dv.tvd_isotropic_exact(pair) == pytest.approx(
        dv.tvd_isotropic_exact(flipped), rel=1e-12
    )
    assert dv.tvd_isotropic_exact(dv.IsotropicGaussianPair(7, 1.0)) == 0.0


def test_tvd_isotropic_monotone_in_power():
    vals = [
        dv.tvd_isotropic_exact(dv.IsotropicGaussianPair(32, 1.0 + x))
        for x in (0.01, 0.05, 0.2, 1.0, 4.0)
    ]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert 0.0 < vals[0] < vals[-1] < 1.0


def test_kl_general_covariance_reduces_to_isotropic():
    n, s2 = 12, 1.35
    spec = dv.CovarianceSpec(n, (s2,) * n, s2 - 1.0)
    pair = dv.IsotropicGaussianPair(n, s2)
    assert dv.kl_general_covariance(spec) == pytest.approx(dv.kl_isotropic(pair), rel=1e-13)


def test_isotropic_minimizes_kl_at_fixed_trace():
    rng = np.random.default_rng(7)
    n, excess = 8, 0.4
    iso = dv.kl_isotropic(dv.IsotropicGaussianPair(n, 1.0 + excess))
    for _ in range(200):
        w = rng.uniform(0.05, 1.0, n)
        lam = 1.0 + excess * n * w / w.sum()
        spec = dv.CovarianceSpec(n, tuple(lam), float(lam.mean() - 1.0))
        assert dv.kl_general_covariance(spec) >= iso - 1e-12


def test_covariance_spec_validation():
    with pytest.raises(DomainError):
        dv.CovarianceSpec(3, (1.0, 1.0), 0.0)  # wrong length
    with pytest.raises(DomainError):
        dv.CovarianceSpec(2, (1.0, -0.5), -0.25)
    with pytest.raises(DomainError):
        dv.CovarianceSpec(2, (1.5, 1.5), 0.9)  # trace_power inconsistent


def test_report_construction_and_serialization():
    rep = dv.isotropic_report(dv.IsotropicGaussianPair(16, 1.2))
    assert rep.method == "closed_form"
    assert rep.hellinger_sq <= rep.tvd <= math.sqrt(1 - (1 - rep.hellinger_sq) ** 2) + 1e-12
    d = rep.to_dict()
    assert set(d) == {"kl_bits", "tvd", "hellinger_sq", "chi_sq", "method", "mc_std_err", "samples"}
    assert "kl_bits" in rep.to_json()


def test_report_rejects_sandwich_violation():
    with pytest.raises(DomainError):
        dv.DivergenceReport(kl_bits=1.0, tvd=0.9, hellinger_sq=0.1, chi_sq=None, method="closed_form")


def test_report_rejects_pinsker_violation():
    # tvd far above sqrt(KL_nats / 2)
    with pytest.raises(DomainError):
        dv.DivergenceReport(kl_bits=0.001, tvd=0.5, hellinger_sq=0.2, chi_sq=None, method="monte_carlo")


def test_report_rejects_bad_method_and_ranges():
    with pytest.raises(DomainError):
        dv.DivergenceReport(kl_bits=0.1, tvd=0.1, hellinger_sq=0.05, chi_sq=None, method="guess")
    with pytest.raises(DomainError):
        dv.DivergenceReport(kl_bits=0.1, tvd=1.5, hellinger_sq=0.05, chi_sq=None, method="closed_form")
    with pytest.raises(DomainError):
        dv.DivergenceReport(kl_bits=0.1, tvd=0.1, hellinger_sq=0.05, chi_sq=-0.5, method="closed_form")


def test_report_mc_slack_allows_noise():
    # same numbers pass once a 3-sigma error bar covers the gap
    dv.DivergenceReport(
        kl_bits=0.001, tvd=0.04, hellinger_sq=0.0005, chi_sq=None,
        method="monte_carlo", mc_std_err=0.01, samples=1000,
    )


def test_chi_sq_mc_1d_anchor():
    # chi^2(N(0,1.2) || N(0,1)) = 1/sqrt(2*1.2 - 1.2^2) - 1
    closed = 1.0 / math.sqrt(2 * 1.2 - 1.2**2) - 1.0
    assert closed == pytest.approx(0.0206207261596576, rel=1e-13)

    def sampler(rng, m):
        return rng.standard_normal((m, 1))

    log_p = lambda x: -0.5 * (x[:, 0] ** 2) / 1.2 - 0.5 * math.log(2 * math.pi * 1.2)
    log_q = lambda x: -0.5 * (x[:, 0] ** 2) - 0.5 * math.log(2 * math.pi)
    est, se = dv.chi_sq_mc(sampler, log_p, log_q, samples=200_000, seed=13)
    assert abs(est - closed) <= 4 * se
    assert se < 0.001


def test_chi_sq_mc_worker_invariance():
    def sampler(rng, m):
        return rng.standard_normal((m, 2))

    log_p = lambda x: -0.25 * (x * x).sum(axis=1) - math.log(2 * math.pi * math.sqrt(2.0))
    log_q = lambda x: -0.5 * (x * x).sum(axis=1) - math.log(2 * math.pi)
    a = dv.chi_sq_mc(sampler, log_p, log_q, samples=50_000, seed=5, workers=1)
    b = dv.chi_sq_mc(sampler, log_p, log_q, samples=50_000, seed=5, workers=4)
    assert a == b


def test_chi_sq_mc_rejects_tiny_sample():
    with pytest.raises(DomainError):
        dv.chi_sq_mc(lambda rng, m: rng.standard_normal((m, 1)), lambda x: x[:, 0], lambda x: x[:, 0], 10, 0)


def _witness_model(n, delta):
    psi = pl.psi_suf(n, delta, 0.8, 1.0 + 1.0 / n)
    return tg.radial_output_density(tg.TruncatedGaussianSpec(n, psi, 0.8))


def test_h_witness_exceeds_unit_bound_at_small_n():
    # n=16, delta=0.05: the remainder h is NOT uniformly below 1 on the bulk
    model = _witness_model(16, 0.05)
    rep = tg.output_divergences_quadrature(model)
    assert rep.chi_sq == pytest.approx(0.0682359884915, abs=2e-8)
    eps = math.sqrt(rep.chi_sq)
    grid = np.linspace(0.0, math.sqrt(3 * 16.0), 2001)
    w = dv.h_function_witness(model, eps, grid)
    assert w.exceeds_unit_bound
    assert w.sup_abs_h == pytest.approx(9.58, abs=0.05)
    assert w.grid_values[0] == pytest.approx(-1.9714017, abs=1e-3)
    assert len(w.radii) == len(w.grid_values) == 2001


def test_h_witness_validation():
    model = _witness_model(16, 0.05)
    with pytest.raises(DomainError):
        dv.h_function_witness(model, 0.0, [0.0, 1.0])
    with pytest.raises(DomainError):
        dv.h_function_witness(model, 0.5, [-1.0, 2.0])
    with pytest.raises(DomainError):
        dv.h_function_witness(model, 0.5, [])


@pytest.mark.parametrize("n,delta", [(8, 0.01), (8, 0.05), (16, 0.01), (16, 0.05)])
def test_chi_sq_quasi_neighborhood(n, delta):
    # chi^2(output || noise) <= 2 delta ln 2 at the sufficient power
    rep = tg.output_divergences_quadrature(_witness_model(n, delta))
    assert rep.chi_sq <= 2.0 * delta * LN2
    # ... and the classical chain bounds hold with room to spare
    assert rep.kl_bits <= rep.chi_sq * LOG2E
    assert rep.tvd <= 0.5 * math.sqrt(rep.chi_sq)


def test_ratio_expansion_controls_divergences():
    # with eps := max(sqrt(chi^2), grid sup |f1/f0 - 1|):
    # V_T <= eps/2 and KL <= (eps^2/2) log2 e
    model = _witness_model(16, 0.05)
    rep = tg.output_divergences_quadrature(model)
    grid = np.linspace(0.0, math.sqrt(3 * 16.0), 4001)
    sup_ratio = float(np.abs(np.expm1(model.log_density_ratio(grid))).max())
    eps = max(math.sqrt(rep.chi_sq), sup_ratio)
    assert rep.tvd <= 0.5 * eps
    assert rep.kl_bits <= 0.5 * eps * eps * LOG2E
