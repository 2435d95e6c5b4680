"""End-to-end Monte-Carlo experiments on the unit-noise AWGN channel.

Codebooks of i.i.d. shell codewords, Bob's minimum-distance (ML) decoder,
Willie's optimal binary test between "noise only" and "code output", and
empirical estimates of the divergences whose closed forms live in
`divergences` and `truncgauss`.

Determinism: every random quantity is drawn from a stream keyed by
(seed, stream tag, block index) with a fixed block size, and partial results
are reduced in block order — so results are bit-identical for any worker
count. The stream tags below are part of the reproducibility contract;
changing them changes every seeded result.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DomainError, InputError, NumericError
from .specfn import LOG2E
from .truncgauss import (
    RadialOutputDensity,
    TruncatedGaussianSpec,
    radial_output_density,
    read_codebook_file,
    sample_codewords,
    write_codebook_file,
)

__all__ = [
    "StreamTag",
    "Codebook",
    "DetectionResult",
    "Estimate",
    "SimulationResult",
    "build_codebook",
    "save_codebook",
    "load_codebook",
    "transmit",
    "bob_decode",
    "bob_decode_batch",
    "willie_detect",
    "empirical_divergences",
    "simulate",
]

_MC_BLOCK = 4096


class StreamTag(IntEnum):
    """Substream labels entering the SeedSequence key (seed, tag, block)."""

    CODEBOOK = 1
    BOB_NOISE = 2
    WILLIE_H1 = 3
    WILLIE_H0 = 4
    DIVERGENCE = 5


def _rng(seed: int, tag: StreamTag, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, int(tag), block]))


def _blocks(total: int) -> list[tuple[int, int, int]]:
    """(block_index, start, count) partition of range(total)."""
    out = []
    b = 0
    for lo in range(0, total, _MC_BLOCK):
        out.append((b, lo, min(_MC_BLOCK, total - lo)))
        b += 1
    return out


def _map_blocks(fn, total: int, workers: int) -> list:
    """Apply fn(block_index, count) over the partition; results in block order."""
    blocks = _blocks(total)
    if workers <= 1:
        return [fn(b, cnt) for b, _, cnt in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(fn, b, cnt) for b, _, cnt in blocks]
        return [f.result() for f in futs]


# --- codebooks ----------------------------------------------------------------


@dataclass(frozen=True)
class Codebook:
    """M codewords of blocklength n, all inside the power shell of `spec`."""

    spec: TruncatedGaussianSpec
    codewords: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        if self.codewords.ndim != 2 or self.codewords.shape[1] != self.spec.n:
            raise DomainError(
                f"Codebook: shape {self.codewords.shape} does not match n={self.spec.n}"
            )
        r = np.linalg.norm(self.codewords, axis=1)
        tol = 1e-9 * self.spec.r_outer
        if (r < self.spec.r_inner - tol).any() or (r > self.spec.r_outer + tol).any():
            raise DomainError("Codebook: row norm outside [r_inner, r_outer]")

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def M(self) -> int:
        return self.codewords.shape[0]

    @property
    def avg_power(self) -> float:
        """Mean per-coordinate power of the rows (average-power accounting;
        the shell already enforces the maximal constraint)."""
        return float(np.mean(np.sum(self.codewords**2, axis=1))) / self.spec.n


def build_codebook(spec: TruncatedGaussianSpec, M: int, seed: int) -> Codebook:
    """M i.i.d. draws from the shell law; deterministic in (spec, M, seed)."""
    if M < 2:
        raise DomainError(f"build_codebook: need M >= 2, got {M}")
    rng = _rng(seed, StreamTag.CODEBOOK, 0)
    return Codebook(spec=spec, codewords=sample_codewords(spec, M, rng), seed=seed)


def save_codebook(cb: Codebook, path: str) -> None:
    write_codebook_file(path, cb.codewords, cb.seed, cb.spec.mu, cb.spec.psi)


def load_codebook(path: str) -> Codebook:
    rows, meta = read_codebook_file(path)
    spec = TruncatedGaussianSpec(n=meta["n"], psi=meta["psi"], mu=meta["mu"])
    return Codebook(spec=spec, codewords=rows, seed=meta["seed"])


# --- channel and decoder --------------------------------------------------------


def transmit(cb: Codebook, message_index: int, rng: np.random.Generator) -> np.ndarray:
    """Codeword plus fresh standard Gaussian noise (unit noise power at both
    receivers; Bob's and Willie's observations use independent draws)."""
    if not (0 <= message_index < cb.M):
        raise InputError(f"transmit: message index {message_index} not in [0, {cb.M})")
    return cb.codewords[message_index] + rng.standard_normal(cb.n)


def bob_decode(cb: Codebook, received: np.ndarray) -> int:
    """Minimum-distance (= ML under Gaussian noise) decision, lowest index on ties."""
    d = np.linalg.norm(cb.codewords - np.asarray(received), axis=1)
    return int(np.argmin(d))


def bob_decode_batch(cb: Codebook, received: np.ndarray) -> np.ndarray:
    """Vectorized bob_decode over rows of `received` (shape (k, n))."""
    # argmin of ||y - c||^2 = ||c||^2 - 2 y.c over codewords, per row
    cross = received @ cb.codewords.T
    scores = np.sum(cb.codewords**2, axis=1)[None, :] - 2.0 * cross
    return np.argmin(scores, axis=1)


# --- Willie's detector ----------------------------------------------------------


@dataclass(frozen=True)
class DetectionResult:
    """Binary-test outcome: alpha = missed detection, beta = false alarm.

    The Bayes-optimal test cannot push alpha + beta below 1 - V_T of the two
    observation laws; std_err is the binomial error of the sum.
    """

    detector: str
    threshold: float
    alpha: float
    beta: float
    trials_h0: int
    trials_h1: int

    @property
    def sum_error(self) -> float:
        return self.alpha + self.beta

    @property
    def std_err(self) -> float:
        va = self.alpha * (1.0 - self.alpha) / self.trials_h1
        vb = self.beta * (1.0 - self.beta) / self.trials_h0
        return math.sqrt(va + vb)

    def to_dict(self) -> dict:
        return {
            "detector": self.detector,
            "threshold": self.threshold,
            "alpha": self.alpha,
            "beta": self.beta,
            "sum_error": self.sum_error,
            "trials_h0": self.trials_h0,
            "trials_h1": self.trials_h1,
            "std_err": self.std_err,
        }


def _ratio_grid(model: RadialOutputDensity, points: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Dense (radius, log f_bar/f0) table for interpolation; the ratio is
    monotone increasing in the radius, so linear interpolation stays monotone."""
    spec = model.spec
    s_hi = math.sqrt(spec.n * (1.0 + spec.psi) + 16.0 * math.sqrt(2.0 * spec.n) + 80.0)
    s = np.linspace(1e-9, s_hi, points)
    return s, np.asarray(model.log_density_ratio(s))


def _bayes_crossing(grid_s: np.ndarray, grid_v: np.ndarray) -> float:
    """Radius where the interpolated log ratio crosses 0 (Bayes threshold
    for equal priors). Uses the same piecewise-linear table as the bulk
    statistic so energy and lrt decisions agree exactly."""
    if grid_v[0] > 0.0:
        return float(grid_s[0])
    idx = np.nonzero(grid_v > 0.0)[0]
    if idx.size == 0:
        raise NumericError("willie_detect: log-likelihood ratio never crosses 0")
    i = int(idx[0])
    s0, s1, v0, v1 = grid_s[i - 1], grid_s[i], grid_v[i - 1], grid_v[i]
    return float(s0 + (s1 - s0) * (-v0) / (v1 - v0))


def willie_detect(
    h0_obs: np.ndarray,
    h1_obs: np.ndarray,
    model: RadialOutputDensity | None = None,
    detector: str = "energy",
    threshold_rule: str | float = "bayes",
) -> DetectionResult:
    """Binary hypothesis test on observation batches (rows are observations).

    detector "energy" thresholds ||z||^2; "lrt" thresholds the radial
    log-likelihood ratio. threshold_rule "bayes" places the threshold at the
    zero crossing of the log ratio (equal priors), which needs `model`; a
    float is used as an explicit threshold on the chosen statistic. For
    spherically symmetric alternatives the likelihood ratio is monotone in
    ||z||, so both detectors make identical decisions under the Bayes rule.
    """
    h0 = np.atleast_2d(np.asarray(h0_obs, dtype=float))
    h1 = np.atleast_2d(np.asarray(h1_obs, dtype=float))
    if h0.shape[0] == 0 or h1.shape[0] == 0:
        raise InputError("willie_detect: both hypothesis sample sets must be nonempty")
    if detector not in ("energy", "lrt"):
        raise InputError(f"willie_detect: unknown detector {detector!r}")
    r0 = np.linalg.norm(h0, axis=1)
    r1 = np.linalg.norm(h1, axis=1)
    if threshold_rule == "bayes" or detector == "lrt":
        if model is None:
            raise InputError(
                "willie_detect: Bayes rule and lrt detector need a RadialOutputDensity"
            )
        grid_s, grid_v = _ratio_grid(model)
    if detector == "energy":
        if threshold_rule == "bayes":
            thr = _bayes_crossing(grid_s, grid_v) ** 2
        else:
            thr = float(threshold_rule)
        dec0 = r0 * r0 > thr
        dec1 = r1 * r1 > thr
    else:
        thr = 0.0 if threshold_rule == "bayes" else float(threshold_rule)
        dec0 = np.interp(r0, grid_s, grid_v) > thr
        dec1 = np.interp(r1, grid_s, grid_v) > thr
    beta = float(np.mean(dec0))   # false alarm: H1 declared under H0
    alpha = float(np.mean(~dec1))  # missed detection: H0 declared under H1
    return DetectionResult(
        detector=detector,
        threshold=thr,
        alpha=alpha,
        beta=beta,
        trials_h0=h0.shape[0],
        trials_h1=h1.shape[0],
    )


# --- empirical divergences -------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    value: float
    std_err: float

    def to_dict(self) -> dict:
        return {"value": self.value, "std_err": self.std_err}


def empirical_divergences(
    spec: TruncatedGaussianSpec,
    n_samples: int,
    seed: int,
    workers: int = 1,
    model: RadialOutputDensity | None = None,
) -> tuple[Estimate, Estimate]:
    """(KL in bits, total variation), each with a standard error.

    KL is the sample mean of log2(f_bar/f0) under codeword-plus-noise draws.
    TVD uses the split identity V_T = (1/2)[E_P0 (1 - f_bar/f0)^+ +
    E_P1 (1 - f0/f_bar)^+]: each integrand lives in [0, 1] under its own
    measure, so the estimate cannot saturate the way the absolute-ratio form
    does when the hypotheses are nearly disjoint. The density ratio is read
    off a dense monotone interpolation table; its horizon lies ~16 sigma
    beyond the bulk, so the clipped tail is negligible.
    """
    if n_samples < 2:
        raise DomainError(f"empirical_divergences: need n_samples >= 2, got {n_samples}")
    if model is None:
        model = radial_output_density(spec)
    grid_s, grid_v = _ratio_grid(model)

    def one_block(b: int, count: int):
        rng = _rng(seed, StreamTag.DIVERGENCE, b)
        x = sample_codewords(spec, count, rng)
        z1 = x + rng.standard_normal((count, spec.n))
        z0 = rng.standard_normal((count, spec.n))
        lr1 = np.interp(np.linalg.norm(z1, axis=1), grid_s, grid_v)
        lr0 = np.interp(np.linalg.norm(z0, axis=1), grid_s, grid_v)
        if not (np.isfinite(lr1).all() and np.isfinite(lr0).all()):
            raise NumericError(f"empirical_divergences: non-finite ratio in block {b}")
        t0 = np.maximum(-np.expm1(lr0), 0.0)
        t1 = np.maximum(-np.expm1(-lr1), 0.0)
        return (
            lr1.sum(), (lr1**2).sum(),
            t0.sum(), (t0**2).sum(),
            t1.sum(), (t1**2).sum(),
        )

    parts = _map_blocks(one_block, n_samples, workers)
    sums = [math.fsum(p[i] for p in parts) for i in range(6)]
    m = float(n_samples)

    def mean_se(s: float, s2: float) -> tuple[float, float]:
        mean = s / m
        var = max(s2 / m - mean * mean, 0.0)
        return mean, math.sqrt(var / m)

    kl_mean, kl_se = mean_se(sums[0], sums[1])
    t0_mean, t0_se = mean_se(sums[2], sums[3])
    t1_mean, t1_se = mean_se(sums[4], sums[5])
    kl = Estimate(value=kl_mean * LOG2E, std_err=kl_se * LOG2E)
    tvd = Estimate(
        value=0.5 * (t0_mean + t1_mean),
        std_err=0.5 * math.sqrt(t0_se**2 + t1_se**2),
    )
    return kl, tvd


# --- full experiment ------------------------------------------------------------


@dataclass(frozen=True)
class SimulationResult:
    decode_error_rate: float
    decode_error_worst_message: float
    decode_trials: int
    detection: DetectionResult
    empirical_kl_bits: Estimate
    empirical_tvd: Estimate
    config: dict
    wall_time: float

    def to_dict(self) -> dict:
        return {
            "decode_error_rate": self.decode_error_rate,
            "decode_error_worst_message": self.decode_error_worst_message,
            "decode_trials": self.decode_trials,
            "detection": self.detection.to_dict(),
            "empirical_kl_bits": self.empirical_kl_bits.to_dict(),
            "empirical_tvd": self.empirical_tvd.to_dict(),
            "config": self.config,
            "wall_time": self.wall_time,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def simulate(
    spec: TruncatedGaussianSpec,
    M: int,
    trials: int,
    seed: int,
    workers: int = 1,
    detector: str = "energy",
    divergence_samples: int | None = None,
    willie_ensemble: bool = True,
) -> SimulationResult:
    """Build a codebook, run Bob-decode and Willie-detect trials, and estimate
    the output divergences, all from one master seed.

    Decode error is pooled over uniformly drawn messages (the worst per-message
    rate is reported alongside). Willie's alternative
    draws a fresh shell codeword per trial when willie_ensemble is set (the
    code-ensemble output law whose V_T the closed forms predict); otherwise a
    uniformly random row of the fixed codebook.
    """
    if trials < 1:
        raise DomainError(f"simulate: need trials >= 1, got {trials}")
    t0 = time.perf_counter()
    cb = build_codebook(spec, M, seed)
    model = radial_output_density(spec)

    def bob_block(b: int, count: int):
        rng = _rng(seed, StreamTag.BOB_NOISE, b)
        w = rng.integers(0, M, size=count)
        y = cb.codewords[w] + rng.standard_normal((count, spec.n))
        wrong = bob_decode_batch(cb, y) != w
        return (
            np.bincount(w, minlength=M),
            np.bincount(w[wrong], minlength=M),
        )

    sent = np.zeros(M, dtype=np.int64)
    wrong = np.zeros(M, dtype=np.int64)
    for s, e in _map_blocks(bob_block, trials, workers):
        sent += s
        wrong += e
    decode_errors = int(wrong.sum())
    per_message = wrong[sent > 0] / sent[sent > 0]
    worst_message = float(per_message.max()) if per_message.size else 0.0

    def willie_h1_block(b: int, count: int):
        rng = _rng(seed, StreamTag.WILLIE_H1, b)
        if willie_ensemble:
            x = sample_codewords(spec, count, rng)
        else:
            x = cb.codewords[rng.integers(0, M, size=count)]
        return x + rng.standard_normal((count, spec.n))

    def willie_h0_block(b: int, count: int):
        rng = _rng(seed, StreamTag.WILLIE_H0, b)
        return rng.standard_normal((count, spec.n))

    h1 = np.vstack(_map_blocks(willie_h1_block, trials, workers))
    h0 = np.vstack(_map_blocks(willie_h0_block, trials, workers))
    detection = willie_detect(h0, h1, model=model, detector=detector)

    div_n = trials if divergence_samples is None else divergence_samples
    kl, tvd = empirical_divergences(spec, div_n, seed, workers=workers, model=model)

    config = {
        "n": spec.n,
        "psi": spec.psi,
        "mu": spec.mu,
        "M": M,
        "trials": trials,
        "seed": seed,
        "workers": workers,
        "detector": detector,
        "divergence_samples": div_n,
        "willie_ensemble": willie_ensemble,
    }
    return SimulationResult(
        decode_error_rate=decode_errors / trials,
        decode_error_worst_message=worst_message,
        decode_trials=trials,
        detection=detection,
        empirical_kl_bits=kl,
        empirical_tvd=tvd,
        config=config,
        wall_time=time.perf_counter() - t0,
    )
