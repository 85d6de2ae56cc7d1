"""Noise-sensitivity correlation estimates for the box events.

A configuration is paired with its epsilon-resampling: every bit independently
replaced, with probability epsilon, by a fresh Bernoulli(q) draw.  The
estimate is Cov(1_G(x), 1_G(N_eps(x))) against Var(1_G) over paired samples.
Masks and resample values come from dedicated counter-RNG streams, so sweeping
epsilon with one seed uses nested masks (coupling), and epsilon = 0 evaluates
the identical array, making the ratio exactly 1 by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closure import ClosurePrep, INF_TIME, run_closure
from .families import UpdateFamily
from .onearm import OneArmConfig, _detect_kernel, _step_offsets
from .regions import Region
from .rng import box_field, config_digest, derive_key

EVENTS = ("one-arm", "origin-escape")


@dataclass(frozen=True)
class NoiseEstimate:
    covariance: float
    variance: float
    ratio: float
    stderr: float  # approximate standard error of the ratio
    samples: int
    epsilon: float
    seed: int
    config_digest: str

    def as_dict(self) -> dict:
        return {
            "covariance": self.covariance,
            "variance": self.variance,
            "ratio": self.ratio,
            "stderr": self.stderr,
            "samples": self.samples,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "config_digest": self.config_digest,
        }


def noise_correlation(
    family: UpdateFamily,
    event: str,
    q: float,
    epsilon: float,
    n: int,
    samples: int,
    seed: int,
    C: int | None = None,
) -> NoiseEstimate:
    if event not in EVENTS:
        raise ValueError(f"event must be one of {EVENTS}")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    config = OneArmConfig(n=n, C=C if C is not None else family.range())
    prep = ClosurePrep(n, family, Region.empty())
    ox, oy = _step_offsets(family)
    m = n + prep.reach

    def evaluate(infected: np.ndarray) -> bool:
        if event == "origin-escape":
            times = run_closure(prep, infected, stop_at_origin=True)
            return bool(times[m, m] == INF_TIME)
        times = prep.slice_box(run_closure(prep, infected))
        return bool(_detect_kernel(times, n, config.C, n, ox, oy))

    k_sample = derive_key(seed, "noise-sample")
    k_mask = derive_key(seed, "noise-mask")
    k_fresh = derive_key(seed, "noise-fresh")

    sx = sy = sxy = 0
    for trial in range(samples):
        x = box_field(k_sample, trial, n) < q
        if epsilon == 0.0:
            y = x
        else:
            mask = box_field(k_mask, trial, n) < epsilon
            fresh = box_field(k_fresh, trial, n) < q
            y = np.where(mask, fresh, x)
        fx = evaluate(x)
        fy = fx if epsilon == 0.0 else evaluate(y)
        sx += fx
        sy += fy
        sxy += fx and fy

    px, py, pxy = sx / samples, sy / samples, sxy / samples
    cov = pxy - px * py
    var = px - px * py if epsilon == 0.0 else 0.5 * (px * (1 - px) + py * (1 - py))
    # At epsilon == 0 cov and var are the same expression evaluated on the same
    # numbers, so the ratio is exactly 1 whenever the variance is nonzero.
    ratio = 1.0 if epsilon == 0.0 else (cov / var if var > 0 else 0.0)
    # delta-method spread of the covariance estimator, product-term noise included
    se_cov = math.sqrt(
        max(
            pxy * (1 - pxy) + px**2 * py * (1 - py) + py**2 * px * (1 - px),
            0.0,
        )
        / samples
    )
    stderr = se_cov / var if var > 0 else math.inf
    digest = config_digest(
        {"op": "noise", "family": family.to_json(), "event": event, "q": q,
         "epsilon": epsilon, "n": n, "C": config.C, "samples": samples}
    )
    return NoiseEstimate(cov, var, ratio, stderr, samples, epsilon, seed, digest)
