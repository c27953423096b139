"""The smoothed walk distribution, its comparison Gaussian, and their L2 gap.

Convolving the walk's law with the box kernel h = (1/2) on [-1, 1] spreads
each atom into an interval of length 2; the resulting density is compared to
the centered Gaussian with the walk's exact variance. All integrals here have
closed forms over the multiplicity table, so no 2^n enumeration ever happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import ndtr

from .errors import VarianceMismatchError
from .spectrum import SumSpectrum, _sum_sq_counts


@dataclass(frozen=True)
class GaussianModel:
    """Centered normal with the signed walk's variance sum a_i^2."""

    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def density(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.exp(-x * x / (2.0 * self.variance)) / math.sqrt(2.0 * math.pi * self.variance)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class SmoothedDensity:
    """The walk's law convolved with the box kernel of half-width 1.

    Takes only the values {0, multiples of 2^{-n-1}}; for a 1-separated set
    it is exactly 2^{-n-1} on 2^n disjoint intervals of length 2.
    """

    spectrum: SumSpectrum
    kernel_halfwidth: float = 1.0

    def density(self, x):
        """Pointwise value sum_{v: |x - v| <= 1} r(v) / 2^{n+1}."""
        spec = self.spectrum
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        # subset-sum index k covers walk value 2k + offset
        lo = np.ceil((x - 1.0 - spec.offset) / 2.0).astype(np.int64)
        hi = np.floor((x + 1.0 - spec.offset) / 2.0).astype(np.int64)
        lo = np.clip(lo, 0, len(spec.counts))
        hi = np.clip(hi, -1, len(spec.counts) - 1)
        cum = np.concatenate([[0], np.cumsum(spec.counts, dtype=np.float64)])
        mass = cum[hi + 1] - cum[lo]
        out = mass / 2.0 ** (spec.n + 1)
        return out if len(out) > 1 else float(out[0])


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the C library's erfc; well below 1e-12
    relative error over the range used here."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def l2_norm_sq_smoothed(sd: SmoothedDensity) -> tuple[float, Fraction]:
    """Integral of (h * mu)^2, exactly.

    Lattice support with spacing >= 2 collapses the pairwise-overlap sum to
    sum r(v)^2 * 2 / (4 * 4^n): half the collision probability. Returns
    (float value, exact rational). Always >= 2^{-n-1}, with equality iff the
    subset sums are 1-separated.
    """
    spec = sd.spectrum
    numerator = _sum_sq_counts(spec.counts)
    exact = Fraction(numerator, 2 * 4**spec.n)
    return float(exact), exact


def l2_norm_sq_gaussian(g: GaussianModel) -> float:
    """Integral of the Gaussian density squared: 1 / (2 sqrt(pi) sigma)."""
    return 1.0 / (2.0 * math.sqrt(math.pi) * g.sigma)


def cross_term(sd: SmoothedDensity, g: GaussianModel) -> float:
    """Integral of (h * mu) * gamma.

    Each box contributes its Gaussian mass: the closed form is
    (1/2^{n+1}) sum_v r(v) [Phi((v+1)/sigma) - Phi((v-1)/sigma)].
    The palindromic support is folded to v >= 0 so every CDF difference is
    evaluated on the precise negative tail.
    """
    spec = sd.spectrum
    sigma = g.sigma
    values, mults = spec.support()
    pos = values >= 0
    v = values[pos].astype(np.float64)
    r = mults[pos].astype(np.float64)
    weight = np.where(v == 0, 1.0, 2.0)
    # Phi((v+1)/s) - Phi((v-1)/s) = Phi((1-v)/s) - Phi((-1-v)/s)
    delta = ndtr((1.0 - v) / sigma) - ndtr((-1.0 - v) / sigma)
    total = float(np.dot(weight * r, delta))
    return total / 2.0 ** (spec.n + 1)


def gaussian_l2_distance(sd: SmoothedDensity, g: GaussianModel) -> float:
    """Integral of ((h * mu) - gamma)^2 over the line, assembled from the
    three closed forms. The Gaussian must carry the walk's own variance."""
    spec_variance = _spectrum_variance(sd.spectrum)
    if not math.isclose(g.variance, spec_variance, rel_tol=1e-12):
        raise VarianceMismatchError(
            f"Gaussian variance {g.variance} != walk variance {spec_variance}"
        )
    smoothed, _ = l2_norm_sq_smoothed(sd)
    return smoothed - 2.0 * cross_term(sd, g) + l2_norm_sq_gaussian(g)


def _spectrum_variance(spec: SumSpectrum) -> float:
    from .spectrum import moments

    return float(moments(spec)[1])


def matched_gaussian(spec: SumSpectrum) -> GaussianModel:
    """The Gaussian the walk is compared against: mean 0, variance sum a_i^2."""
    return GaussianModel(variance=_spectrum_variance(spec))


def proximity_record(sd: SmoothedDensity, g: GaussianModel) -> dict:
    """Diagnostic JSON record for the spatial-side comparison."""
    smoothed, _ = l2_norm_sq_smoothed(sd)
    gauss = l2_norm_sq_gaussian(g)
    cross = cross_term(sd, g)
    distance = smoothed - 2.0 * cross + gauss
    return {
        "l2_smoothed": smoothed,
        "l2_gaussian": gauss,
        "cross": cross,
        "distance": distance,
        "distance_times_2n": distance * 2.0**sd.spectrum.n,
    }
