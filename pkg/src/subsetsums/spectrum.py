"""Exact distribution of the signed walk X = +-a_1 +- ... +- a_n.

The walk takes values v = 2S - total where S ranges over subset sums, so the
whole distribution is stored as a dense table counts[S] = r(2S - total): the
number of sign patterns landing on that value. All invariants (total mass,
symmetry, variance) are verified in exact integer arithmetic on every build.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Union

import numpy as np

from .errors import CapacityError
from .sets import IntegerSet

MAX_SPECTRUM_SUM = 1 << 31          # dense table length cap
MAX_SPECTRUM_BYTES = 1 << 31        # 2 GiB allocation guard
MAX_SPECTRUM_N = 64

# Chunk size for exact reductions: keeps uint64 partial sums overflow-free
# for every chunk that passes the per-chunk bound test.
_CHUNK = 1 << 14


@dataclass(frozen=True)
class SumSpectrum:
    """Multiplicity table of the signed walk over its lattice support.

    counts[k] is the number of sign patterns with walk value offset + 2k,
    where offset = -(sum of elements). Support points have fixed parity and
    spacing >= 2, which is why subset-sum indexing halves the table.
    """

    offset: int
    counts: np.ndarray
    n: int

    @property
    def total(self) -> int:
        """Sum of the generating elements (= -offset)."""
        return -self.offset

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """(values, multiplicities) of the nonzero entries, values ascending."""
        idx = np.flatnonzero(self.counts)
        values = 2 * idx.astype(np.int64) + self.offset
        return values, self.counts[idx]

    def iter_nonzero(self) -> Iterator[tuple[int, int]]:
        values, mults = self.support()
        for v, r in zip(values.tolist(), mults.tolist()):
            yield int(v), int(r)


@dataclass(frozen=True)
class CollisionProbability:
    """P(two independent walks coincide) = sum r(v)^2 / 4^n, held exactly."""

    numerator: int          # sum of squared multiplicities (arbitrary precision)
    denominator_log2: int   # = 2n
    value: float

    @property
    def exact(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.denominator_log2)


def _chunked_exact_dot(counts: np.ndarray, weight) -> int:
    """Exact sum of counts[k] * weight(k) as a Python int.

    weight(ks) maps an index array to uint64 weights. Each chunk is reduced
    with uint64 vector ops when a conservative bound proves no overflow, and
    falls back to Python big ints otherwise.
    """
    total = 0
    length = len(counts)
    for lo in range(0, length, _CHUNK):
        hi = min(lo + _CHUNK, length)
        c = counts[lo:hi].astype(np.uint64)
        chunk_mass = int(c.sum(dtype=np.uint64))
        if chunk_mass == 0:
            continue
        w = weight(np.arange(lo, hi, dtype=np.uint64))
        w_max = int(w.max())
        if chunk_mass * w_max < (1 << 64):
            total += int(np.dot(c, w))
        else:
            total += sum(int(ci) * int(wi) for ci, wi in zip(c, w) if ci)
    return total


def _exact_moment_sums(counts: np.ndarray) -> tuple[int, int, int]:
    """(sum c_k, sum c_k*k, sum c_k*k^2) as exact Python ints."""
    s0 = _chunked_exact_dot(counts, lambda ks: np.ones_like(ks))
    s1 = _chunked_exact_dot(counts, lambda ks: ks)
    s2 = _chunked_exact_dot(counts, lambda ks: ks * ks)
    return s0, s1, s2


def build_spectrum(s: IntegerSet, max_bytes: int = MAX_SPECTRUM_BYTES) -> SumSpectrum:
    """Exact multiplicity table via iterated convolution with (d_{-a} + d_a)/2,
    scaled to integer counts.

    Verifies total mass 2^n, palindromic symmetry, and the variance identity
    sum r(v) v^2 = 2^n * sum a_i^2 in exact arithmetic before returning.
    """
    total = s.total
    if total > MAX_SPECTRUM_SUM:
        raise CapacityError(f"element sum {total} exceeds the dense-table cap 2^31")
    if s.n > MAX_SPECTRUM_N:
        raise CapacityError(f"n = {s.n} exceeds the count-width cap {MAX_SPECTRUM_N}")
    dtype = np.uint32 if s.n <= 32 else np.uint64
    if (total + 1) * np.dtype(dtype).itemsize > max_bytes:
        raise CapacityError(
            f"dense table would need {(total + 1) * np.dtype(dtype).itemsize} bytes"
        )

    counts = np.ones(1, dtype=dtype)
    for a in s.elements:
        grown = np.zeros(len(counts) + a, dtype=dtype)
        grown[: len(counts)] = counts
        grown[a:] += counts
        counts = grown

    spec = SumSpectrum(offset=-total, counts=counts, n=s.n)
    _validate(spec, s.sum_sq)
    return spec


def _validate(spec: SumSpectrum, sum_sq: int) -> None:
    s0, s1, s2 = _exact_moment_sums(spec.counts)
    if s0 != 1 << spec.n:
        raise AssertionError(f"mass {s0} != 2^{spec.n}")
    if not np.array_equal(spec.counts, spec.counts[::-1]):
        raise AssertionError("spectrum is not palindromic")
    mean_sum = 2 * s1 + spec.offset * s0
    if mean_sum != 0:
        raise AssertionError(f"nonzero mean sum {mean_sum}")
    var_sum = 4 * s2 + 4 * spec.offset * s1 + spec.offset * spec.offset * s0
    if var_sum != (1 << spec.n) * sum_sq:
        raise AssertionError(f"variance sum {var_sum} != 2^n * {sum_sq}")


def collision_probability(spec: SumSpectrum) -> CollisionProbability:
    """sum r(v)^2 / 4^n, the probability two independent walks coincide.

    For integer sets this equals the single-period integral
    int_0^1 prod cos^2(2 pi a_i x) dx exactly; the numerator is 2^n iff all
    subset sums are distinct.
    """
    if spec.n > 63:
        raise OverflowError(f"n = {spec.n} > 63: 4^n exceeds the exact-value contract")
    numerator = _sum_sq_counts(spec.counts)
    return CollisionProbability(
        numerator=numerator,
        denominator_log2=2 * spec.n,
        value=numerator / 4.0**spec.n,
    )


def _sum_sq_counts(counts: np.ndarray) -> int:
    """Exact sum of squared counts as a Python int."""
    total = 0
    for lo in range(0, len(counts), _CHUNK):
        c = counts[lo : lo + _CHUNK].astype(np.uint64)
        chunk_mass = int(c.sum(dtype=np.uint64))
        if chunk_mass == 0:
            continue
        c_max = int(c.max())
        if chunk_mass * c_max < (1 << 64):
            total += int(np.dot(c, c))
        else:
            total += sum(int(ci) * int(ci) for ci in c if ci)
    return total


def moments(spec: SumSpectrum) -> tuple[float, int]:
    """(mean, variance) of the walk: mean is 0 exactly, variance is the exact
    integer sum of squared elements (verified at build time)."""
    _, s1, s2 = _exact_moment_sums(spec.counts)
    var_sum = 4 * s2 + 4 * spec.offset * s1 + spec.offset**2 * (1 << spec.n)
    variance, rem = divmod(var_sum, 1 << spec.n)
    if rem:
        raise AssertionError("variance identity violated")
    return 0.0, variance


@dataclass(frozen=True)
class HistogramBin:
    center: float
    mass: float


def histogram(spec: SumSpectrum, bins: int) -> list[HistogramBin]:
    """Equal-width binning of the walk distribution over [-total, total].

    Bins are half-open [lo, hi), last bin closed. Bin assignment uses exact
    integer arithmetic, so the output is bit-reproducible and symmetric bins
    receive exactly mirrored mass. Masses are exact for n <= 52.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    total = spec.total
    values, mults = spec.support()
    # bin index floor((v + total) * bins / (2 total)), clamped at the top edge
    if total > 0:
        idx = (values + total) * bins // (2 * total)
    else:
        idx = np.zeros(len(values), dtype=np.int64)
    idx = np.minimum(idx, bins - 1)
    masses = np.bincount(idx, weights=mults.astype(np.float64), minlength=bins)
    masses /= 2.0**spec.n
    width = 2.0 * total / bins
    return [
        HistogramBin(center=-total + (j + 0.5) * width, mass=float(masses[j]))
        for j in range(bins)
    ]


def characteristic_function(spec: SumSpectrum, x: float) -> float:
    """E cos(2 pi X x) = sum_v r(v) cos(2 pi v x) / 2^n.

    Agrees with the direct product prod cos(2 pi a_i x) (the Fourier transform
    of the walk's law); the two routes cross-validate each other in tests.
    Phase accuracy degrades once |2 pi v x| approaches 1e6, so the 1e-10
    agreement contract is scoped to moderate supports (n <= 20 scale).
    """
    values, mults = spec.support()
    terms = np.cos(2.0 * np.pi * values * float(x))
    return float(np.dot(mults.astype(np.float64), terms)) / 2.0**spec.n


def write_spectrum_csv(spec: SumSpectrum, path: Union[str, Path]) -> None:
    """Stream the nonzero entries as 'value,count' rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "count"])
        for v, r in spec.iter_nonzero():
            writer.writerow([v, r])


def write_histogram_csv(hbins: list[HistogramBin], path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_center", "mass"])
        for b in hbins:
            writer.writerow([repr(b.center), repr(b.mass)])
