import math

import numpy as np
import pytest
from scipy import stats

from covertawgn import divergences as dv
from covertawgn import planner as pl
from covertawgn import simkit as sk
from covertawgn import truncgauss as tg
from covertawgn.errors import DomainError, InputError


def _spec(n=16, psi=0.5, mu=0.7):
    return tg.TruncatedGaussianSpec(n=n, psi=psi, mu=mu)


def test_stream_tags_are_frozen():
    # substream keys are part of the reproducibility contract
    assert int(sk.StreamTag.CODEBOOK) == 1
    assert int(sk.StreamTag.BOB_NOISE) == 2
    assert int(sk.StreamTag.WILLIE_H1) == 3
    assert int(sk.StreamTag.WILLIE_H0) == 4
    assert int(sk.StreamTag.DIVERGENCE) == 5


def test_build_codebook_deterministic():
    spec = _spec()
    a = sk.build_codebook(spec, 8, seed=101)
    b = sk.build_codebook(spec, 8, seed=101)
    c = sk.build_codebook(spec, 8, seed=102)
    np.testing.assert_array_equal(a.codewords, b.codewords)
    assert not np.array_equal(a.codewords, c.codewords)
    assert a.n == 16 and a.M == 8 and a.seed == 101


def test_build_codebook_validation():
    with pytest.raises(DomainError):
        sk.build_codebook(_spec(), 1, seed=0)


def test_codebook_rejects_rows_off_shell():
    spec = _spec()
    rows = sk.build_codebook(spec, 4, seed=0).codewords.copy()
    rows[2] *= 1.5  # pushed outside r_outer
    with pytest.raises(DomainError):
        sk.Codebook(spec=spec, codewords=rows, seed=0)


def test_codebook_avg_power_within_shell_band():
    spec = _spec(n=32, psi=0.25, mu=0.6)
    cb = sk.build_codebook(spec, 64, seed=5)
    assert spec.mu**2 * spec.psi - 1e-12 <= cb.avg_power <= spec.psi + 1e-12


def test_codebook_save_load_roundtrip(tmp_path):
    spec = _spec()
    cb = sk.build_codebook(spec, 4, seed=77)
    path = str(tmp_path / "cb.bin")
    sk.save_codebook(cb, path)
    back = sk.load_codebook(path)
    np.testing.assert_array_equal(back.codewords, cb.codewords)
    assert back.spec == cb.spec
    assert back.seed == 77


def test_transmit_adds_unit_noise():
    spec = _spec(n=64)
    cb = sk.build_codebook(spec, 4, seed=3)
    rng = np.random.default_rng(11)
    z2 = [np.sum((sk.transmit(cb, 1, rng) - cb.codewords[1]) ** 2) for _ in range(2000)]
    # chi^2_64 mean 64, var 2*64
    assert np.mean(z2) == pytest.approx(64.0, abs=3 * math.sqrt(128.0 / 2000))
    with pytest.raises(InputError):
        sk.transmit(cb, 4, rng)
    with pytest.raises(InputError):
        sk.transmit(cb, -1, rng)


def test_bob_decode_noiseless_and_batch_agree():
    cb = sk.build_codebook(_spec(), 8, seed=21)
    for w in range(8):
        assert sk.bob_decode(cb, cb.codewords[w]) == w
    rng = np.random.default_rng(0)
    ys = cb.codewords[rng.integers(0, 8, 100)] + 0.3 * rng.standard_normal((100, 16))
    batch = sk.bob_decode_batch(cb, ys)
    assert [sk.bob_decode(cb, y) for y in ys] == batch.tolist()


def test_bob_decode_tie_goes_to_lowest_index():
    spec = tg.TruncatedGaussianSpec(n=2, psi=1.0, mu=0.5)
    c0 = np.array([0.9, 0.0])
    c1 = np.array([-0.9, 0.0])
    cb = sk.Codebook(spec=spec, codewords=np.vstack([c0, c1]), seed=0)
    assert sk.bob_decode(cb, np.zeros(2)) == 0
    assert sk.bob_decode_batch(cb, np.zeros((3, 2))).tolist() == [0, 0, 0]


def test_antipodal_error_rate_matches_q_function():
    # n=1, codewords {+a, -a}: ML error probability is Q(a) exactly
    a = 1.0
    spec = tg.TruncatedGaussianSpec(n=1, psi=a * a, mu=0.5)
    cb = sk.Codebook(spec=spec, codewords=np.array([[a], [-a]]), seed=0)
    rng = np.random.default_rng(8)
    trials = 200_000
    w = rng.integers(0, 2, trials)
    y = cb.codewords[w] + rng.standard_normal((trials, 1))
    err = float(np.mean(sk.bob_decode_batch(cb, y) != w))
    q_a = float(stats.norm.sf(a))
    se = math.sqrt(q_a * (1 - q_a) / trials)
    assert abs(err - q_a) <= 3 * se


def test_decoder_reliable_at_generous_power():
    spec = tg.TruncatedGaussianSpec(n=64, psi=4.0, mu=0.8)
    res = sk.simulate(spec, M=4, trials=20_000, seed=1)
    assert res.decode_error_rate < 1e-3
    assert res.decode_error_worst_message < 5e-3


def test_willie_detect_energy_equals_lrt():
    spec = _spec(n=16, psi=0.9, mu=0.7)
    model = tg.radial_output_density(spec)
    rng = np.random.default_rng(5)
    h0 = rng.standard_normal((4000, 16))
    h1 = tg.sample_codewords(spec, 4000, rng) + rng.standard_normal((4000, 16))
    de = sk.willie_detect(h0, h1, model=model, detector="energy")
    dl = sk.willie_detect(h0, h1, model=model, detector="lrt")
    assert de.alpha == dl.alpha and de.beta == dl.beta
    assert de.detector == "energy" and dl.detector == "lrt"
    assert 0.0 <= de.alpha <= 1.0 and 0.0 <= de.beta <= 1.0
    assert de.trials_h0 == de.trials_h1 == 4000
    assert de.std_err > 0.0
    assert de.to_dict()["sum_error"] == pytest.approx(de.alpha + de.beta)


def test_willie_detect_explicit_threshold():
    rng = np.random.default_rng(2)
    h0 = rng.standard_normal((1000, 4))
    h1 = 10.0 + rng.standard_normal((1000, 4))
    res = sk.willie_detect(h0, h1, detector="energy", threshold_rule=150.0)
    assert res.threshold == 150.0
    assert res.sum_error < 0.05  # trivially separable at this offset


def test_willie_detect_input_errors():
    spec = _spec()
    model = tg.radial_output_density(spec)
    rng = np.random.default_rng(0)
    obs = rng.standard_normal((10, 16))
    with pytest.raises(InputError):
        sk.willie_detect(obs[:0], obs, model=model)
    with pytest.raises(InputError):
        sk.willie_detect(obs, obs, model=model, detector="matched")
    with pytest.raises(InputError):
        sk.willie_detect(obs, obs, detector="lrt")  # lrt needs the model
    with pytest.raises(InputError):
        sk.willie_detect(obs, obs, detector="energy")  # bayes rule needs it too


def test_detection_floor_matches_total_variation():
    # alpha + beta >= 1 - V_T - 3 se for the Bayes threshold
    n, delta = 64, 0.05
    psi = pl.psi_suf(n, delta, 0.8, 1.0 + 1.0 / n)
    spec = tg.TruncatedGaussianSpec(n=n, psi=psi, mu=0.8)
    model = tg.radial_output_density(spec)
    rep = tg.output_divergences_quadrature(model)
    rng = np.random.default_rng(31)
    m = 30_000
    h0 = rng.standard_normal((m, n))
    h1 = tg.sample_codewords(spec, m, rng) + rng.standard_normal((m, n))
    det = sk.willie_detect(h0, h1, model=model)
    assert det.sum_error >= 1.0 - rep.tvd - 3.0 * det.std_err


def test_empirical_divergences_match_quadrature():
    n, delta = 64, 0.05
    psi = pl.psi_suf(n, delta, 0.8, 1.0 + 1.0 / n)
    spec = tg.TruncatedGaussianSpec(n=n, psi=psi, mu=0.8)
    model = tg.radial_output_density(spec)
    rep = tg.output_divergences_quadrature(model)
    kl, tvd = sk.empirical_divergences(spec, 150_000, seed=9, workers=2, model=model)
    assert abs(kl.value - rep.kl_bits) <= 4 * kl.std_err
    assert abs(tvd.value - rep.tvd) <= 4 * tvd.std_err


def test_empirical_divergences_worker_invariant():
    spec = _spec(n=8, psi=0.4, mu=0.6)
    a = sk.empirical_divergences(spec, 30_000, seed=4, workers=1)
    b = sk.empirical_divergences(spec, 30_000, seed=4, workers=4)
    assert a == b


def test_empirical_tvd_does_not_saturate_when_laws_separate():
    # positive-part estimator keeps working when the hypotheses are far apart
    spec = tg.TruncatedGaussianSpec(n=64, psi=4.0, mu=0.8)
    _, tvd = sk.empirical_divergences(spec, 20_000, seed=3)
    assert tvd.value > 0.99


def test_empirical_divergences_validation():
    with pytest.raises(DomainError):
        sk.empirical_divergences(_spec(), 1, seed=0)


def test_triangle_chain_bounds_codebook_output():
    # V_T(code output, noise) <= V_T(isotropic) + (1 - Delta) + 3 se
    n, delta = 64, 0.05
    psi = pl.psi_suf(n, delta, 0.8, 1.0 + 1.0 / n)
    spec = tg.TruncatedGaussianSpec(n=n, psi=psi, mu=0.8)
    _, tvd = sk.empirical_divergences(spec, 100_000, seed=12)
    iso = dv.tvd_isotropic_exact(dv.IsotropicGaussianPair(n, 1.0 + spec.mu * spec.psi))
    assert tvd.value <= iso + (1.0 - spec.delta_mass) + 3.0 * tvd.std_err


def _strip_volatile(d):
    d = dict(d)
    d.pop("wall_time")
    d["config"] = {k: v for k, v in d["config"].items() if k != "workers"}
    return d


def test_simulate_reproducible_across_workers():
    spec = _spec(n=16, psi=0.8, mu=0.7)
    r1 = sk.simulate(spec, M=4, trials=4000, seed=42, workers=1)
    r4 = sk.simulate(spec, M=4, trials=4000, seed=42, workers=4)
    assert _strip_volatile(r1.to_dict()) == _strip_volatile(r4.to_dict())


def test_simulate_result_fields():
    spec = _spec(n=16, psi=0.8, mu=0.7)
    res = sk.simulate(
        spec, M=4, trials=3000, seed=7, detector="lrt",
        divergence_samples=5000, willie_ensemble=False,
    )
    assert res.decode_trials == 3000
    assert 0.0 <= res.decode_error_rate <= 1.0
    assert res.decode_error_worst_message >= res.decode_error_rate
    assert res.detection.detector == "lrt"
    assert res.detection.trials_h0 == res.detection.trials_h1 == 3000
    assert res.config["divergence_samples"] == 5000
    assert res.config["willie_ensemble"] is False
    d = res.to_dict()
    assert d["config"]["n"] == 16
    assert "value" in d["empirical_kl_bits"]
    assert res.to_json().startswith("{")
    with pytest.raises(DomainError):
        sk.simulate(spec, M=4, trials=0, seed=7)
