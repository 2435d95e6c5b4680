"""Self-contained acceptance suite: ten numbered checks, each pairing a
closed-form implementation with an independent oracle (Monte Carlo against
numpy's samplers, or exact side conditions).

Every check returns a CheckResult with its measured values in `detail`, so a
failure message identifies the offending sub-case without rerunning. Checks
1 and 9 assert literal published targets that the implemented formulas do not
meet (see the README's acceptance table); they are reported red rather than
loosened.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import bounds as bd
from . import divergences as dv
from . import planner as pl
from . import simkit as sk
from . import truncgauss as tg
from .specfn import LOG2E

__all__ = ["CheckResult", "run_all", "CHECKS"]

# test power configs use this shell ratio: the asymptotic default mu = 1 - 1/(n+1)
# leaves the shell too thin for the small n exercised here (mass check fails)
_MU_TEST = 0.8


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    runtime: float
    limit: float
    detail: str

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.criterion:2d}  {status}  {self.runtime:7.2f}s/{self.limit:.0f}s  "
            f"{self.name}: {self.detail}"
        )


def _result(criterion, name, passed, t0, limit, detail) -> CheckResult:
    rt = time.perf_counter() - t0
    return CheckResult(
        criterion=criterion,
        name=name,
        passed=bool(passed) and rt < limit,
        runtime=rt,
        limit=limit,
        detail=detail,
    )


def check_01_shell_mass_claim() -> CheckResult:
    """1 - Delta < 0.005 at n=400 for mu in {0.70, 0.75, 0.80, 0.85}."""
    t0 = time.perf_counter()
    vals = {mu: 1.0 - tg.shell_mass(400, mu) for mu in (0.70, 0.75, 0.80, 0.85)}
    ok = all(v < 0.005 for v in vals.values())
    detail = ", ".join(f"mu={m}: {v:.3e}" for m, v in vals.items())
    return _result(1, "shell mass below 0.005 at n=400", ok, t0, 1.0, detail)


def check_02_shell_mass_mc() -> CheckResult:
    """Closed-form Delta vs Monte-Carlo mass of the chi-square norm law."""
    t0 = time.perf_counter()
    msgs, ok = [], True
    trials = 10**6
    for i, (n, mu) in enumerate([(n, m) for n in (2, 8, 64, 400) for m in (0.5, 0.8)]):
        rng = np.random.default_rng(np.random.SeedSequence([90102, i]))
        c = rng.chisquare(n, size=trials)  # ||g||^2 of a standard Gaussian vector
        phat = float(np.mean((c >= mu * n) & (c <= n / mu)))
        se = math.sqrt(max(phat * (1.0 - phat), 1e-12) / trials)
        delta = tg.shell_mass(n, mu)
        dev = abs(delta - phat)
        if dev > 3.0 * se:
            ok = False
            msgs.append(f"(n={n},mu={mu}): |{delta:.6f}-{phat:.6f}|={dev:.2e}>3se={3*se:.2e}")
    detail = "all 8 configs within 3 std errors" if ok else "; ".join(msgs)
    return _result(2, "shell mass vs MC oracle", ok, t0, 30.0, detail)


def check_03_kl_isotropic_mc() -> CheckResult:
    """kl_isotropic vs MC mean log-ratio on 12 parameter points."""
    t0 = time.perf_counter()
    points = [
        (1, 1.5), (2, 1.2), (4, 0.8), (8, 1.1), (16, 2.0), (32, 0.95),
        (64, 1.05), (128, 1.02), (256, 0.99), (512, 1.01), (1024, 1.005),
        (2048, 0.998),
    ]
    samples = 200_000
    msgs, ok = [], True
    for i, (n, s2) in enumerate(points):
        rng = np.random.default_rng(np.random.SeedSequence([90103, i]))
        c = rng.chisquare(n, size=samples)
        # log(f1/f0) at z ~ N(0, s2 I): ||z||^2 = s2 * c
        lr = (-0.5 * n * math.log(s2) + 0.5 * s2 * c * (1.0 - 1.0 / s2)) * LOG2E
        mean = float(np.mean(lr))
        se = float(np.std(lr, ddof=1)) / math.sqrt(samples)
        kl = dv.kl_isotropic(dv.IsotropicGaussianPair(n=n, sigma1_sq=s2))
        if abs(kl - mean) > 4.0 * se:
            ok = False
            msgs.append(f"(n={n},s2={s2}): |{kl:.5f}-{mean:.5f}|>4se={4*se:.1e}")
    detail = "12 points within 4 std errors" if ok else "; ".join(msgs)
    return _result(3, "isotropic KL vs MC oracle", ok, t0, 60.0, detail)


def check_04_detection_matches_tvd() -> CheckResult:
    """Optimal-test advantage 1-(alpha+beta) vs the MC TVD estimate."""
    t0 = time.perf_counter()
    n, delta = 64, 0.05
    psi = pl.psi_suf(n, delta, _MU_TEST, pl.nu_lemma_shell(n))
    spec = tg.TruncatedGaussianSpec(n=n, psi=psi, mu=_MU_TEST)
    model = tg.radial_output_density(spec)
    trials = 100_000

    def h1_block(b: int, cnt: int) -> np.ndarray:
        rng = sk._rng(90104, sk.StreamTag.WILLIE_H1, b)
        return tg.sample_codewords(spec, cnt, rng) + rng.standard_normal((cnt, n))

    def h0_block(b: int, cnt: int) -> np.ndarray:
        return sk._rng(90104, sk.StreamTag.WILLIE_H0, b).standard_normal((cnt, n))

    h1 = np.vstack(sk._map_blocks(h1_block, trials, 1))
    h0 = np.vstack(sk._map_blocks(h0_block, trials, 1))
    det = sk.willie_detect(h0, h1, model=model, detector="energy")
    kl_est, tvd_est = sk.empirical_divergences(spec, trials, 90104, model=model)
    adv = 1.0 - det.sum_error
    comb = math.sqrt(det.std_err**2 + tvd_est.std_err**2)
    dev = abs(adv - tvd_est.value)
    ok = dev <= 3.0 * comb
    detail = (
        f"1-(a+b)={adv:.5f}, MC V_T={tvd_est.value:.5f}±{tvd_est.std_err:.5f}, "
        f"|diff|={dev:.2e} <= 3*comb={3*comb:.2e}: {ok}"
    )
    return _result(4, "detector advantage equals V_T", ok, t0, 300.0, detail)


def check_05_isotropic_minimizes_kl() -> CheckResult:
    """Random covariance spectra at fixed trace never beat the isotropic KL."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(np.random.SeedSequence([90105]))
    n, excess = 16, 0.3
    iso = dv.kl_isotropic(dv.IsotropicGaussianPair(n=n, sigma1_sq=1.0 + excess))
    worst = math.inf
    for _ in range(1000):
        w = rng.random(n) + 0.05
        lam = 1.0 + excess * n * w / w.sum()
        spec = dv.CovarianceSpec(
            n=n, eigenvalues=tuple(lam), trace_power=float(lam.mean() - 1.0)
        )
        worst = min(worst, dv.kl_general_covariance(spec) - iso)
    ok = worst >= -1e-9
    detail = f"min(KL_general - KL_iso) = {worst:.3e} over 1000 spectra (n={n}, excess={excess})"
    return _result(5, "isotropic covariance minimizes KL", ok, t0, 10.0, detail)


def check_06_taylor_sandwich() -> CheckResult:
    """x^2/(4 eta) < (x - ln(1+x))/2 < x^2/4 on dense grids below threshold."""
    t0 = time.perf_counter()
    msgs, ok = [], True
    for eta in (1.001, 1.01, 1.1):
        thr = 1.5 * (eta - 1.0) / eta
        xs = np.linspace(thr * 1e-4, thr * (1.0 - 1e-9), 10_000)
        mid = 0.5 * (xs - np.log1p(xs))
        lower_ok = bool(np.all(xs * xs / (4.0 * eta) < mid))
        upper_ok = bool(np.all(mid < 0.25 * xs * xs))
        if not (lower_ok and upper_ok):
            ok = False
            msgs.append(f"eta={eta}: lower={lower_ok}, upper={upper_ok}")
    detail = "3 eta values x 1e4 grid points" if ok else "; ".join(msgs)
    return _result(6, "Taylor bracket inside validity range", ok, t0, 5.0, detail)


def check_07_planner_end_to_end() -> CheckResult:
    """Empirical output KL respects delta at psi_suf and breaks it at 2 psi_nec."""
    t0 = time.perf_counter()
    msgs, ok = [], True
    for i, (n, delta) in enumerate([(n, d) for n in (16, 64, 128) for d in (0.01, 0.05)]):
        nu2 = pl.nu_lemma_shell(n)
        eta = 1.0 + 1.0 / n
        psi_s = pl.psi_suf(n, delta, _MU_TEST, nu2)
        psi_n2 = 2.0 * pl.psi_nec(n, delta, eta)
        spec_s = tg.TruncatedGaussianSpec(n=n, psi=psi_s, mu=_MU_TEST)
        spec_n = tg.TruncatedGaussianSpec(n=n, psi=psi_n2, mu=_MU_TEST)
        kl_s, _ = sk.empirical_divergences(spec_s, 400_000, 90107 + i)
        kl_n, _ = sk.empirical_divergences(spec_n, 100_000, 90207 + i)
        within = kl_s.value <= delta + 3.0 * kl_s.std_err
        broken = kl_n.value > delta
        if not (within and broken):
            ok = False
        msgs.append(
            f"(n={n},d={delta}): suf {kl_s.value:.5f}±{kl_s.std_err:.5f} "
            f"{'<=' if within else '>'} d+3se; 2nec {kl_n.value:.5f} {'>' if broken else '<='} d"
        )
    return _result(7, "covertness both directions", ok, t0, 600.0, "; ".join(msgs))


def check_08_schedule_regimes() -> CheckResult:
    """tau = 0.25 / 0.5 / 0.75 sweeps land in the three predicted regimes."""
    t0 = time.perf_counter()
    grid = bd.default_n_grid(100, 10**8)
    msgs, ok = [], True
    sw = {tau: bd.asymptotic_sweep(1.0, tau, grid) for tau in (0.25, 0.5, 0.75)}
    if not (sw[0.25].classification == "divergent" and sw[0.25].tvd[-1] > 0.9):
        ok = False
    if not (sw[0.75].classification == "vanishing"
            and sw[0.75].tvd[-1] < 0.01 and sw[0.75].kl_bits[-1] < 1e-3):
        ok = False
    plateau = 0.25 * LOG2E  # c^2/4 log2 e at c=1
    top = sw[0.5].n_grid >= 10**7
    dev = float(np.max(np.abs(sw[0.5].kl_bits[top] - plateau))) / plateau
    if not (sw[0.5].classification == "plateau" and dev <= 0.01):
        ok = False
    msgs.append(
        f"tau=.25 {sw[0.25].classification} V_T(end)={sw[0.25].tvd[-1]:.3f}; "
        f"tau=.5 {sw[0.5].classification} top-decade dev={dev:.2e}; "
        f"tau=.75 {sw[0.75].classification} KL(end)={sw[0.75].kl_bits[-1]:.2e}"
    )
    return _result(8, "power-schedule regime classification", ok, t0, 10.0, "; ".join(msgs))


def check_09_bounds_structure() -> CheckResult:
    """Ordering, first-order ratios at n=1e8 (2% target), epsilon monotonicity,
    and boundedness of converse - achievability - log2 n."""
    t0 = time.perf_counter()
    delta, eps = 0.01, 0.1
    grid = bd.default_n_grid(10**3, 10**8)
    rows = bd.bounds_grid(grid, delta, eps)
    ordering = all(r.achievability_bits <= r.converse_bits for r in rows)
    gaps = [r.converse_bits - r.achievability_bits - math.log2(r.n) for r in rows]
    bounded = max(abs(g) for g in gaps) < 10.0
    r8 = bd.throughput_bounds(pl.CovertParams.defaults(10**8, delta, eps))
    ach_ratio = r8.achievability_bits / r8.first_order
    conv_ratio = r8.converse_bits / r8.first_order
    ratios_ok = abs(ach_ratio - 1.0) <= 0.02 and abs(conv_ratio - 1.0) <= 0.02
    mono = all(
        bd.achievability_bound(pl.CovertParams.defaults(n, delta, 0.05))
        < bd.achievability_bound(pl.CovertParams.defaults(n, delta, 0.1))
        and bd.converse_bound(pl.CovertParams.defaults(n, delta, 0.05))
        < bd.converse_bound(pl.CovertParams.defaults(n, delta, 0.1))
        for n in (10**4, 10**6)
    )
    ok = ordering and bounded and ratios_ok and mono
    detail = (
        f"ordering={ordering}, max|conv-ach-log2n|={max(abs(g) for g in gaps):.3f}, "
        f"ach/first={ach_ratio:.5f}, conv/first={conv_ratio:.5f} (target within 2% of 1: "
        f"{ratios_ok}), eps-monotone={mono}"
    )
    return _result(9, "bound structure and first-order ratio", ok, t0, 60.0, detail)


def check_10_sandwich_and_pinsker() -> CheckResult:
    """Hellinger sandwich and Pinsker on every divergence report produced by
    the closed forms, the quadrature path, and the MC chi-square path."""
    t0 = time.perf_counter()
    count = 0
    try:
        for n in (1, 2, 8, 64, 400, 4096):
            for s2 in (0.7, 0.98, 1.02, 1.5, 3.0):
                dv.isotropic_report(dv.IsotropicGaussianPair(n=n, sigma1_sq=s2))
                count += 1
        grid = bd.default_n_grid(100, 10**6)[::24]
        for tau in (0.25, 0.5, 0.75):
            for n in grid:
                x = float(n) ** (-tau)
                dv.isotropic_report(dv.IsotropicGaussianPair(n=int(n), sigma1_sq=1.0 + x))
                count += 1
        for n, delta in ((8, 0.05), (16, 0.05), (64, 0.05)):
            psi = pl.psi_suf(n, delta, _MU_TEST, pl.nu_lemma_shell(n))
            spec = tg.TruncatedGaussianSpec(n=n, psi=psi, mu=_MU_TEST)
            tg.output_divergences_quadrature(tg.radial_output_density(spec))
            count += 1
        ok, detail = True, f"{count} reports validated at construction"
    except Exception as exc:  # report the first violation verbatim
        ok, detail = False, f"after {count} reports: {exc}"
    return _result(10, "sandwich and Pinsker cross-cutting", ok, t0, 120.0, detail)


CHECKS = [
    check_01_shell_mass_claim,
    check_02_shell_mass_mc,
    check_03_kl_isotropic_mc,
    check_04_detection_matches_tvd,
    check_05_isotropic_minimizes_kl,
    check_06_taylor_sandwich,
    check_07_planner_end_to_end,
    check_08_schedule_regimes,
    check_09_bounds_structure,
    check_10_sandwich_and_pinsker,
]


def run_all() -> list[CheckResult]:
    return [c() for c in CHECKS]
