"""Classical bounds, hypothesis ratios, and cross-route diagnostics.

Every inequality involving only integers is checked in exact arithmetic;
asymptotic claims appear as reported ratios, never as hard assertions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .quadrature import (
    QuadratureConfig,
    near_gaussian_difference,
    region_integrals,
    wallis_bound,
)
from .sets import IntegerSet
from .smoothing import (
    SmoothedDensity,
    cross_term,
    l2_norm_sq_gaussian,
    l2_norm_sq_smoothed,
    matched_gaussian,
)
from .spectrum import SumSpectrum, build_spectrum

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BoundsReport:
    """Ledger of the classical lower-bound machinery evaluated on one set.

    Boolean fields are exact integer comparisons; ratio fields are floating
    point and >= 1 means "consistent with the named bound" for distinct sets.
    """

    n: int
    a_n: int
    sum: int
    sum_sq: int
    erdos_moser_sum_ok: bool          # sum a_i >= 2^n - 1
    variance_bound_ok: bool           # n a_n^2 >= (4^n - 1)/3
    dfx_ratio: float                  # a_n sqrt(n) sqrt(pi/2) / 2^n
    elkies_ratio: float               # a_n sqrt(pi n) / 2^n
    moser_4n_ratio: float             # 3 sum a_i^2 / (4^n - 1)
    hypothesis_ratio_sqrt_n: float    # a_n^2 sqrt(n) / sum a_i^2
    hypothesis_ratio_n_2_3: float     # a_n^2 n^{2/3} / sum a_i^2
    gaussian_match: float             # 2^{n+1} / sqrt(2 pi sum a_i^2)


def bounds_report(s: IntegerSet) -> BoundsReport:
    """Evaluate the bounds ledger; integer comparisons are exact."""
    n = s.n
    a_n = s.a_n
    total = s.total
    sum_sq = s.sum_sq
    pow2 = 1 << n
    pow4_minus_1 = (1 << (2 * n)) - 1
    return BoundsReport(
        n=n,
        a_n=a_n,
        sum=total,
        sum_sq=sum_sq,
        erdos_moser_sum_ok=total >= pow2 - 1,
        variance_bound_ok=3 * n * a_n * a_n >= pow4_minus_1,
        dfx_ratio=a_n * math.sqrt(n) * math.sqrt(math.pi / 2.0) / pow2,
        elkies_ratio=a_n * math.sqrt(math.pi * n) / pow2,
        moser_4n_ratio=3.0 * sum_sq / pow4_minus_1,
        hypothesis_ratio_sqrt_n=a_n * a_n * math.sqrt(n) / sum_sq,
        hypothesis_ratio_n_2_3=a_n * a_n * n ** (2.0 / 3.0) / sum_sq,
        gaussian_match=2.0 ** (n + 1) / math.sqrt(2.0 * math.pi * sum_sq),
    )


def lemma2_floor(sum_sq: float) -> float:
    """(sqrt(2) - 1) / (2 sqrt(pi)) * (sum a_i^2)^{-1/2}, the far-region floor."""
    return (math.sqrt(2.0) - 1.0) / (2.0 * math.sqrt(math.pi) * math.sqrt(sum_sq))


def cdf_max_gap(spec: SumSpectrum) -> float:
    """Berry-Esseen-style sup |walk CDF - Gaussian CDF|, taken at the jump
    points (both one-sided limits) where the sup is attained."""
    values, mults = spec.support()
    sigma = math.sqrt(float(_variance(spec)))
    r = mults.astype(np.float64)
    cum = np.cumsum(r)
    mass = 2.0**spec.n
    gauss = ndtr(values.astype(np.float64) / sigma)
    after = np.abs(cum / mass - gauss)
    before = np.abs((cum - r) / mass - gauss)
    return float(max(after.max(), before.max()))


def _variance(spec: SumSpectrum) -> int:
    from .spectrum import moments

    return moments(spec)[1]


def diagnostics(s: IntegerSet, cfg: QuadratureConfig = QuadratureConfig()) -> dict:
    """Assemble the full cross-route diagnostic record for one set.

    Compares the spatial closed-form Gaussian distance against the far-region
    integral (the two sides of the density-proximity identity), reports the
    near-region floors, and the CDF max-gap. Everything is a reported number;
    nothing asymptotic is asserted.
    """
    report = bounds_report(s)
    spec = build_spectrum(s)
    sd = SmoothedDensity(spec)
    g = matched_gaussian(spec)

    smoothed, _ = l2_norm_sq_smoothed(sd)
    gauss_sq = l2_norm_sq_gaussian(g)
    cross = cross_term(sd, g)
    distance = smoothed - 2.0 * cross + gauss_sq

    regions = region_integrals(s, cfg)
    wallis = wallis_bound(s.n, s.a_n)
    near_diff = near_gaussian_difference(s, cfg)
    floor2 = lemma2_floor(s.sum_sq)

    return {
        "schema_version": SCHEMA_VERSION,
        "n": s.n,
        "a_n": s.a_n,
        "sum": str(report.sum),
        "sum_sq": str(report.sum_sq),
        "erdos_moser_sum_ok": report.erdos_moser_sum_ok,
        "variance_bound_ok": report.variance_bound_ok,
        "dfx_ratio": report.dfx_ratio,
        "elkies_ratio": report.elkies_ratio,
        "moser_4n_ratio": report.moser_4n_ratio,
        "hypothesis_ratio_sqrt_n": report.hypothesis_ratio_sqrt_n,
        "hypothesis_ratio_n_2_3": report.hypothesis_ratio_n_2_3,
        "gaussian_match": report.gaussian_match,
        "l2_smoothed": smoothed,
        "l2_gaussian": gauss_sq,
        "cross": cross,
        "spatial_distance": distance,
        "near": regions.near,
        "far": regions.far,
        "full": regions.full,
        "exact_full": None if regions.exact_full is None else str(regions.exact_full),
        "theorem1_floor": 0.5**(s.n + 1),
        "spatial_minus_far_times_2n": (distance - regions.far) * 2.0**s.n,
        "lemma1_near_ratio": regions.near / wallis.value,
        "lemma2_far_ratio": regions.far / floor2,
        "near_gaussian_difference": near_diff,
        "near_gaussian_ratio_2n": near_diff * 2.0**s.n,
        "cdf_max_gap": cdf_max_gap(spec),
    }
