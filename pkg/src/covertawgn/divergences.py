"""Divergences between the Gaussian families of the covert-communication setup.

Closed forms for isotropic pairs N(0, sigma1^2 I_n) vs N(0, I_n): KL (bits),
exact total variation via the monotone radial likelihood ratio, squared
Hellinger, the eigenvalue form of KL for general covariances, and an
importance-sampling chi-square estimator. Every report is checked against the
Hellinger sandwich H^2 <= V_T <= sqrt(1 - (1 - H^2)^2) and Pinsker.

All divergences are reported in bits; helpers convert nats <-> bits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import specfn
from .errors import DomainError, NumericError

__all__ = [
    "IsotropicGaussianPair",
    "CovarianceSpec",
    "DivergenceReport",
    "HWitness",
    "bits_to_nats",
    "nats_to_bits",
    "kl_isotropic",
    "kl_general_covariance",
    "hellinger_sq_isotropic",
    "tvd_isotropic_exact",
    "chi_sq_mc",
    "h_function_witness",
    "isotropic_report",
]


def bits_to_nats(v: float) -> float:
    return v * specfn.LN2


def nats_to_bits(v: float) -> float:
    return v * specfn.LOG2E


@dataclass(frozen=True)
class IsotropicGaussianPair:
    """N(0, sigma1_sq * I_n) against the unit-variance reference N(0, I_n)."""

    n: int
    sigma1_sq: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"IsotropicGaussianPair: need n >= 1, got {self.n}")
        if not (self.sigma1_sq > 0.0 and math.isfinite(self.sigma1_sq)):
            raise DomainError(
                f"IsotropicGaussianPair: need sigma1_sq > 0, got {self.sigma1_sq!r}"
            )

    @property
    def excess_power(self) -> float:
        """x = sigma1_sq - 1, the per-coordinate power riding on the noise floor."""
        return self.sigma1_sq - 1.0


@dataclass(frozen=True)
class CovarianceSpec:
    """Eigenvalues of K + I_n for a general zero-mean Gaussian against N(0, I_n)."""

    n: int
    eigenvalues: tuple[float, ...]
    trace_power: float

    def __post_init__(self) -> None:
        if self.n < 1 or len(self.eigenvalues) != self.n:
            raise DomainError(
                f"CovarianceSpec: need n eigenvalues, got n={self.n}, "
                f"len={len(self.eigenvalues)}"
            )
        if any(not (lam > 0.0) for lam in self.eigenvalues):
            raise DomainError("CovarianceSpec: all eigenvalues must be positive")
        mean_excess = math.fsum(self.eigenvalues) / self.n - 1.0
        if abs(mean_excess - self.trace_power) > 1e-12:
            raise DomainError(
                f"CovarianceSpec: trace_power {self.trace_power} inconsistent with "
                f"eigenvalues (mean excess {mean_excess})"
            )


_METHODS = ("closed_form", "quadrature", "monte_carlo")


@dataclass(frozen=True)
class DivergenceReport:
    """KL / TVD / Hellinger^2 (and optionally chi^2) for one pair of distributions.

    Construction validates the Hellinger sandwich and Pinsker with slack
    3 * mc_std_err + 1e-9, so an inconsistent report cannot exist.
    """

    kl_bits: float
    tvd: float
    hellinger_sq: float
    chi_sq: float | None
    method: str
    mc_std_err: float = 0.0
    samples: int = 0

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise DomainError(f"DivergenceReport: unknown method {self.method!r}")
        if self.mc_std_err < 0.0 or self.samples < 0:
            raise DomainError("DivergenceReport: negative error bar or sample count")
        if self.chi_sq is not None and self.chi_sq < -1e-12:
            raise DomainError(f"DivergenceReport: chi_sq={self.chi_sq} negative")
        for name in ("tvd", "hellinger_sq"):
            v = getattr(self, name)
            if not (-1e-12 <= v <= 1.0 + 1e-12):
                raise DomainError(f"DivergenceReport: {name}={v} outside [0, 1]")
        slack = 3.0 * self.mc_std_err + 1e-9
        hi = math.sqrt(max(0.0, 1.0 - (1.0 - self.hellinger_sq) ** 2))
        if self.tvd < self.hellinger_sq - slack or self.tvd > hi + slack:
            raise DomainError(
                f"DivergenceReport: TVD {self.tvd} violates the Hellinger sandwich "
                f"[{self.hellinger_sq}, {hi}] beyond slack {slack}"
            )
        pinsker = math.sqrt(max(0.0, bits_to_nats(self.kl_bits) / 2.0))
        if self.tvd > pinsker + slack:
            raise DomainError(
                f"DivergenceReport: TVD {self.tvd} violates Pinsker bound {pinsker}"
            )

    def to_dict(self) -> dict:
        return {
            "kl_bits": self.kl_bits,
            "tvd": self.tvd,
            "hellinger_sq": self.hellinger_sq,
            "chi_sq": self.chi_sq,
            "method": self.method,
            "mc_std_err": self.mc_std_err,
            "samples": self.samples,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def kl_isotropic(pair: IsotropicGaussianPair) -> float:
    """D(N(0, s^2 I_n) || N(0, I_n)) = (n/2) [x - ln(1+x)] log2 e bits, x = s^2 - 1."""
    x = pair.excess_power
    # x > -1 is guaranteed by sigma1_sq > 0; series form keeps x ~ 0 exact
    return 0.5 * pair.n * specfn.x_minus_log1p(x) * specfn.LOG2E


def kl_general_covariance(spec: CovarianceSpec) -> float:
    """(1/2) sum_i (lambda_i - 1 - ln lambda_i) log2 e bits; isotropic when all equal."""
    total = math.fsum(lam - 1.0 - math.log(lam) for lam in spec.eigenvalues)
    return 0.5 * total * specfn.LOG2E


def hellinger_sq_isotropic(pair: IsotropicGaussianPair) -> float:
    """H^2 = 1 - (2 sigma1 / (1 + sigma1^2))^(n/2), evaluated in the log domain."""
    x = pair.excess_power
    # ln(2 s / (1 + s^2)) = (1/2) ln(1+x) - ln(1 + x/2), stable near x = 0
    log_base = 0.5 * math.log1p(x) - math.log1p(0.5 * x)
    return -math.expm1(0.5 * pair.n * log_base)


def _crossing_radius_sq(n: float, sigma1_sq: float) -> float:
    """||y||^2 where the densities of the pair cross: n s^2 ln(s^2) / (s^2 - 1)."""
    x = sigma1_sq - 1.0
    if abs(x) < 1e-8:
        # ln(1+x)/x -> 1 - x/2 + x^2/3
        ratio = 1.0 - 0.5 * x + x * x / 3.0
    else:
        ratio = math.log1p(x) / x
    return n * sigma1_sq * ratio


def tvd_isotropic_exact(pair: IsotropicGaussianPair) -> float:
    """Exact V_T between N(0, s^2 I_n) and N(0, I_n).

    The likelihood ratio is monotone in ||y||, so the optimal decision region
    is a ball/shell boundary at the density-crossing radius r*, and
    V_T = |P(n/2, r*^2/2) - P(n/2, r*^2/(2 s^2))|.
    """
    s2 = pair.sigma1_sq
    if s2 == 1.0:
        return 0.0
    r2 = _crossing_radius_sq(pair.n, s2)
    a = 0.5 * pair.n
    v = specfn.reg_inc_gamma_lower(a, 0.5 * r2) - specfn.reg_inc_gamma_lower(
        a, 0.5 * r2 / s2
    )
    return abs(v)


def isotropic_report(pair: IsotropicGaussianPair, chi_sq: float | None = None) -> DivergenceReport:
    """Assemble the closed-form DivergenceReport for an isotropic pair."""
    return DivergenceReport(
        kl_bits=kl_isotropic(pair),
        tvd=tvd_isotropic_exact(pair),
        hellinger_sq=hellinger_sq_isotropic(pair),
        chi_sq=chi_sq,
        method="closed_form",
    )


_MC_BLOCK = 4096


def chi_sq_mc(
    sampler: Callable[[np.random.Generator, int], np.ndarray],
    log_density_p: Callable[[np.ndarray], np.ndarray],
    log_density_q: Callable[[np.ndarray], np.ndarray],
    samples: int,
    seed: int,
    workers: int = 1,
) -> tuple[float, float]:
    """Importance-sampling estimate of chi^2(P || Q) = E_Q[(p/q - 1)^2].

    ``sampler`` draws from the *reference* distribution Q (the integral runs
    against q, and the reference here is cheap, light-tailed noise). Sampling
    is blocked on substreams keyed by (seed, block), so the result is identical
    for any worker count. Returns (estimate, standard error).
    """
    if samples < 1000:
        raise DomainError(f"chi_sq_mc: need samples >= 1000, got {samples}")
    total, total_sq, count = 0.0, 0.0, 0
    n_blocks = (samples + _MC_BLOCK - 1) // _MC_BLOCK

    def one_block(b: int) -> tuple[float, float, int]:
        m = min(_MC_BLOCK, samples - b * _MC_BLOCK)
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC2, b]))
        x = sampler(rng, m)
        lp, lq = np.asarray(log_density_p(x)), np.asarray(log_density_q(x))
        bad = ~(np.isfinite(lp) & np.isfinite(lq))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise NumericError(
                f"chi_sq_mc: non-finite log density at block {b}, sample {i}"
            )
        g = np.expm1(lp - lq) ** 2
        return float(g.sum()), float((g * g).sum()), m

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(one_block, range(n_blocks)))
    else:
        parts = [one_block(b) for b in range(n_blocks)]
    for s, sq, m in parts:  # fixed block order -> bit-identical reduction
        total += s
        total_sq += sq
        count += m
    mean = total / count
    var = max(0.0, total_sq / count - mean * mean)
    return mean, math.sqrt(var / count)


@dataclass(frozen=True)
class HWitness:
    """Grid supremum of |h| where (f_bar/f0 - 1) = eps * h on a radial grid."""

    sup_abs_h: float
    radii: tuple[float, ...]
    grid_values: tuple[float, ...]
    exceeds_unit_bound: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "exceeds_unit_bound", self.sup_abs_h > 1.0)


def h_function_witness(
    output_model, epsilon: float, radial_grid: Sequence[float]
) -> HWitness:
    """Evaluate h(y) = (f_bar(y)/f0(y) - 1) / epsilon on a radial grid.

    Both densities are spherically symmetric, so the grid is over ||y||. The
    returned supremum is a grid supremum; whether it stays below 1 for the
    blocklength at hand is reported, not assumed (``exceeds_unit_bound``).
    """
    if not (epsilon > 0.0):
        raise DomainError(f"h_function_witness: need epsilon > 0, got {epsilon!r}")
    radii = np.asarray(radial_grid, dtype=float)
    if radii.ndim != 1 or len(radii) == 0 or radii.min() < 0.0:
        raise DomainError("h_function_witness: radial_grid must be nonnegative radii")
    log_ratio = output_model.log_density_ratio(radii)
    if not np.all(np.isfinite(log_ratio)):
        raise NumericError("h_function_witness: density ratio evaluation failed")
    h = np.expm1(log_ratio) / epsilon
    return HWitness(
        sup_abs_h=float(np.abs(h).max()),
        radii=tuple(float(r) for r in radii),
        grid_values=tuple(float(v) for v in h),
    )
