"""Set types, subset-sum distinctness checks, and the Conway-Guy construction.

The central objects are finite sets of positive step sizes a_1 < ... < a_n.
A set has *distinct subset sums* when all 2^n subsets have pairwise different
element sums; the real-valued generalization is *1-separation*: every pair of
distinct subset sums differs by at least 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import CapacityError

# Hard caps for the dense/enumerative routes.
MAX_BITARRAY_SUM = 1 << 32   # bit-array distinctness: one bit per reachable sum
MAX_BITARRAY_N = 32
MAX_ENUMERATION_N = 26       # 2^26 float64 subset sums ~ 0.5 GB


@dataclass(frozen=True)
class IntegerSet:
    """Strictly increasing positive integers a_1 < ... < a_n."""

    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(int(a) for a in self.elements)
        object.__setattr__(self, "elements", elems)
        if not elems:
            raise ValueError("set must contain at least one element")
        if elems[0] < 1:
            raise ValueError("elements must be >= 1")
        if any(b <= a for a, b in zip(elems, elems[1:])):
            raise ValueError("elements must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def a_n(self) -> int:
        """Largest element."""
        return self.elements[-1]

    @property
    def total(self) -> int:
        """Sum of all elements (exact)."""
        return sum(self.elements)

    @property
    def sum_sq(self) -> int:
        """Sum of squared elements (exact); the signed walk's variance."""
        return sum(a * a for a in self.elements)

    def to_real(self) -> "RealSet":
        return RealSet(tuple(float(a) for a in self.elements))


@dataclass(frozen=True)
class RealSet:
    """Strictly increasing positive reals, in the units of the separation scale 1."""

    elements: tuple[float, ...]

    def __post_init__(self):
        elems = tuple(float(a) for a in self.elements)
        object.__setattr__(self, "elements", elems)
        if not elems:
            raise ValueError("set must contain at least one element")
        if elems[0] <= 0.0:
            raise ValueError("elements must be positive")
        if any(b <= a for a, b in zip(elems, elems[1:])):
            raise ValueError("elements must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def a_n(self) -> float:
        return self.elements[-1]


AnySet = Union[IntegerSet, RealSet]


@dataclass(frozen=True)
class DistinctnessVerdict:
    """Outcome of a distinctness check, with a witness pair on failure.

    `witness` holds two different subsets (as tuples of elements) whose sums
    collide; it is None when the set passes.
    """

    is_distinct: bool
    witness: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None


def _require_bitarray_capacity(s: IntegerSet) -> None:
    if s.n > MAX_BITARRAY_N:
        raise CapacityError(
            f"n = {s.n} exceeds the bit-array cap {MAX_BITARRAY_N}; "
            "use count_distinct on a reduced set"
        )
    if s.total > MAX_BITARRAY_SUM:
        raise CapacityError(
            f"element sum {s.total} exceeds the bit-array cap 2^32"
        )


def _subset_with_sum(elements: Sequence[int], target: int) -> tuple[int, ...]:
    """Backtrack a subset of `elements` summing to `target` (must exist)."""
    reachable = [1]
    for a in elements:
        reachable.append(reachable[-1] | (reachable[-1] << a))
    chosen = []
    s = target
    for i in range(len(elements) - 1, -1, -1):
        a = elements[i]
        if s >= a and (reachable[i] >> (s - a)) & 1:
            chosen.append(a)
            s -= a
    if s != 0:
        raise AssertionError(f"no subset of {elements} sums to {target}")
    return tuple(sorted(chosen))


def check_distinct(s: IntegerSet) -> DistinctnessVerdict:
    """Decide whether all 2^n subset sums of `s` are pairwise distinct.

    Maintains the set of reachable subset sums as a bit array (a Python int);
    adding a_i shifts a copy and tests intersection -- a nonempty intersection
    is a collision, and the lowest colliding sum yields a witness pair.
    Equivalent to the generating polynomial prod(1 + x^{a_i}) having all
    coefficients <= 1.
    """
    _require_bitarray_capacity(s)
    reachable = 1
    for i, a in enumerate(s.elements):
        shifted = reachable << a
        overlap = reachable & shifted
        if overlap:
            collision_sum = (overlap & -overlap).bit_length() - 1
            prefix = s.elements[:i]
            with_a = _subset_with_sum(prefix, collision_sum - a) + (a,)
            without_a = _subset_with_sum(prefix, collision_sum)
            return DistinctnessVerdict(False, (tuple(sorted(with_a)), without_a))
        reachable |= shifted
    return DistinctnessVerdict(True)


def count_distinct(s: IntegerSet) -> int:
    """Number of distinct values among the 2^n subset sums.

    Equals 2^n exactly when check_distinct passes.
    """
    if s.total > MAX_BITARRAY_SUM:
        raise CapacityError(f"element sum {s.total} exceeds the bit-array cap 2^32")
    reachable = 1
    for a in s.elements:
        reachable |= reachable << a
    return reachable.bit_count()


def separation(s: AnySet) -> float:
    """Minimum |sum(S) - sum(T)| over pairs of distinct subsets.

    The set is 1-separated iff the result is >= 1. Full 2^n enumeration;
    capped at n = 26.
    """
    if s.n > MAX_ENUMERATION_N:
        raise CapacityError(f"n = {s.n} exceeds the enumeration cap {MAX_ENUMERATION_N}")
    sums = np.zeros(1)
    for a in s.elements:
        sums = np.concatenate([sums, sums + float(a)])
    sums.sort(kind="stable")
    gap = np.inf
    step = 1 << 22
    for lo in range(0, len(sums) - 1, step):
        chunk = sums[lo : lo + step + 1]
        if len(chunk) > 1:
            gap = min(gap, float(np.diff(chunk).min()))
    return gap


_CONWAY_GUY_ANCHOR_INDEX = 22
_CONWAY_GUY_ANCHOR_VALUE = 1051905
_u_cache: list[int] = [0, 1]


def _conway_guy_u(k_max: int) -> list[int]:
    """First differences sequence u_0=0, u_1=1, u_{k+1} = 2 u_k - u_{k-r},
    r = nearest integer to sqrt(2k).

    sqrt(2k) is never a half-integer (8k = (2m+1)^2 has no integer solution),
    so "nearest" is unambiguous. Validated once against the u_22 anchor.
    """
    u = _u_cache
    while len(u) <= max(k_max, _CONWAY_GUY_ANCHOR_INDEX):
        k = len(u) - 1
        r = round((2 * k) ** 0.5)
        u.append(2 * u[k] - u[k - r])
    if u[_CONWAY_GUY_ANCHOR_INDEX] != _CONWAY_GUY_ANCHOR_VALUE:
        raise RuntimeError(
            "Conway-Guy recurrence failed its anchor: "
            f"u_22 = {u[_CONWAY_GUY_ANCHOR_INDEX]} != {_CONWAY_GUY_ANCHOR_VALUE}"
        )
    return u[: k_max + 1]


def conway_guy(n: int) -> IntegerSet:
    """The n-term Conway-Guy set {u_n - u_{n-j} : j = 1..n}.

    Distinct subset sums with a_n noticeably below 2^{n-1}; the classic
    candidate family for the smallest possible largest element.
    """
    if not 1 <= n <= 64:
        raise ValueError(f"n must be in 1..64, got {n}")
    u = _conway_guy_u(n)
    return IntegerSet(tuple(u[n] - u[n - j] for j in range(1, n + 1)))


def parse_elements(text: str) -> AnySet:
    """Parse a comma- or whitespace-separated list of numbers into a set."""
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("no elements given")
    if all(_looks_integral(p) for p in parts):
        return IntegerSet(tuple(int(p) for p in parts))
    return RealSet(tuple(float(p) for p in parts))


def _looks_integral(token: str) -> bool:
    try:
        int(token)
        return True
    except ValueError:
        return False


def load_set(path: Union[str, Path]) -> AnySet:
    """Read a set file: one number per line ('#' comments), or JSON {"elements": [...]}."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        values = data["elements"]
        if all(isinstance(v, int) or float(v).is_integer() for v in values):
            return IntegerSet(tuple(int(v) for v in values))
        return RealSet(tuple(float(v) for v in values))
    tokens = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            tokens.append(line)
    return parse_elements(" ".join(tokens))


def dump_set(s: AnySet, path: Union[str, Path]) -> None:
    """Write a set file in the one-number-per-line format."""
    lines = [format_element(a) for a in s.elements]
    Path(path).write_text("\n".join(lines) + "\n")


def format_element(a: Union[int, float]) -> str:
    return str(int(a)) if isinstance(a, int) else repr(float(a))
