"""Prime moduli, signals on the integers and on Z_n, and a reproducible random stream."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    IoFailureError,
    NotPrimeError,
    OverlappingIntervalsError,
    ProbabilityOutOfRangeError,
    TooLargeError,
    TooSmallError,
)

# Counting kernels and exponent reductions stay exact in int64 below this bound.
MAX_MODULUS = 2**31

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; this base set is exact for all 64-bit inputs."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Modulus:
    """A prime modulus n >= 5 (so 2 and 3 are invertible). Build via make_modulus."""

    n: int


def make_modulus(n: int) -> Modulus:
    """Validate n and return a Modulus, or raise TooSmall / TooLarge / NotPrime."""
    if n < 5:
        raise TooSmallError(f"modulus must be at least 5, got {n}")
    if n >= MAX_MODULUS:
        raise TooLargeError(f"moduli must be below 2**31, got {n}")
    if not is_prime(n):
        raise NotPrimeError(f"{n} is not prime")
    return Modulus(n)


@dataclass(frozen=True)
class IntervalZn:
    """The residues {start, start+1, ..., start+length-1} reduced mod n."""

    start: int
    length: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError("interval start must be a non-negative residue")
        if self.length < 1:
            raise ValueError("interval length must be positive")

    def residues(self, m: Modulus) -> np.ndarray:
        if self.length > m.n or self.start >= m.n:
            raise ValueError("interval does not fit modulus")
        return (self.start + np.arange(self.length, dtype=np.int64)) % m.n


class ZnSignal:
    """A dense function on Z_n; index x in [0, n) is the residue x.

    Integer-valued signals are stored as int64 with ``exact=True`` so that the
    counting kernels can run in exact integer arithmetic.  Real and complex
    signals use float64/complex128.  Instances are immutable and safe to share
    across threads.
    """

    __slots__ = ("modulus", "values", "exact")

    def __init__(self, modulus: Modulus, values) -> None:
        arr = np.asarray(values)
        if arr.ndim != 1 or arr.shape[0] != modulus.n:
            raise ValueError(f"expected {modulus.n} values, got shape {arr.shape}")
        if np.issubdtype(arr.dtype, np.integer) or arr.dtype == bool:
            arr = arr.astype(np.int64)
            exact = True
        elif np.issubdtype(arr.dtype, np.complexfloating):
            arr = arr.astype(np.complex128)
            exact = False
        else:
            arr = arr.astype(np.float64)
            exact = False
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ZnSignal is immutable")

    def __len__(self) -> int:
        return self.modulus.n

    @property
    def n(self) -> int:
        return self.modulus.n

    @property
    def is_complex(self) -> bool:
        return np.issubdtype(self.values.dtype, np.complexfloating)


def constant_signal(m: Modulus, value) -> ZnSignal:
    if isinstance(value, (int, np.integer)):
        return ZnSignal(m, np.full(m.n, int(value), dtype=np.int64))
    return ZnSignal(m, np.full(m.n, value))


def signal_from_weighted_intervals(
    m: Modulus, parts: Sequence[tuple[IntervalZn, int]]
) -> ZnSignal:
    """Build the +/-1 combination of disjoint interval indicators.

    Raises OverlappingIntervalsError if any residue is covered twice.
    """
    values = np.zeros(m.n, dtype=np.int64)
    covered = np.zeros(m.n, dtype=bool)
    for interval, weight in parts:
        if weight not in (-1, 1):
            raise ValueError(f"weights must be +1 or -1, got {weight}")
        idx = interval.residues(m)
        if covered[idx].any():
            raise OverlappingIntervalsError(
                f"interval starting at {interval.start} overlaps a previous one"
            )
        covered[idx] = True
        values[idx] = weight
    return ZnSignal(m, values)


class SignalStats(NamedTuple):
    mean: float
    l2_mean: float
    minimum: float
    maximum: float


def signal_stats(s: ZnSignal) -> SignalStats:
    """Mean, mean square, min and max of a real signal; the mean equals dft(s)[0]."""
    if s.is_complex:
        raise ValueError("signal_stats is defined for real signals only")
    n = s.n
    if s.exact:
        total = int(s.values.sum(dtype=np.int64))
        sq = int((s.values * s.values).sum(dtype=np.int64))
        return SignalStats(total / n, sq / n, float(s.values.min()), float(s.values.max()))
    vals = s.values.tolist()
    return SignalStats(
        math.fsum(vals) / n,
        math.fsum(v * v for v in vals) / n,
        float(s.values.min()),
        float(s.values.max()),
    )


@dataclass(frozen=True)
class IntSignalZ:
    """A finitely supported integer-valued function on Z.

    Stored canonically: ``values[i]`` is the value at ``offset + i``, leading and
    trailing zeros trimmed, every value in [-4, 4].  The all-zero function is
    ``IntSignalZ(0, ())``.
    """

    offset: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        vals = tuple(int(v) for v in self.values)
        if any(abs(v) > 4 for v in vals):
            raise ValueError("values must lie in [-4, 4]")
        lo = 0
        hi = len(vals)
        while lo < hi and vals[lo] == 0:
            lo += 1
        while hi > lo and vals[hi - 1] == 0:
            hi -= 1
        object.__setattr__(self, "values", vals[lo:hi])
        object.__setattr__(self, "offset", self.offset + lo if lo < hi else 0)

    def value_at(self, x: int) -> int:
        i = x - self.offset
        if 0 <= i < len(self.values):
            return self.values[i]
        return 0

    def support(self) -> tuple[int, ...]:
        return tuple(
            self.offset + i for i, v in enumerate(self.values) if v != 0
        )


# --- reproducible random stream ---------------------------------------------

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * _MIX1 & _MASK64
    z = (z ^ (z >> 27)) * _MIX2 & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class RngStream:
    """Counter-mode splitmix64 stream.

    Word k (k = 0, 1, ...) is ``mix(seed + (k+1) * 0x9E3779B97F4A7C15 mod 2**64)``
    where ``mix`` is the splitmix64 finalizer (xor-shift 30, multiply
    0xBF58476D1CE4E5B9, xor-shift 27, multiply 0x94D049BB133111EB, xor-shift 31).
    The same seed yields the identical word sequence on every platform; frozen
    test vectors guard this.  A stream is single-consumer: parallel use must go
    through ``child`` streams, whose seeds are derived as
    ``mix(mix(seed) + (index+1) * 0x9E3779B97F4A7C15 mod 2**64)``.
    """

    algorithm = "splitmix64-counter"

    def __init__(self, seed: int) -> None:
        self.seed = seed & _MASK64
        self._position = 0

    def next_word(self) -> int:
        """The next 64-bit word, as a Python int."""
        self._position += 1
        return _mix64((self.seed + self._position * _GAMMA) & _MASK64)

    def words(self, count: int) -> np.ndarray:
        """The next ``count`` words as a uint64 array (same sequence as next_word)."""
        ks = np.arange(self._position + 1, self._position + count + 1, dtype=np.uint64)
        self._position += count
        states = np.uint64(self.seed) + ks * np.uint64(_GAMMA)
        return _mix64_array(states)

    def bernoulli(self, p: float) -> bool:
        """One Bernoulli(p) draw: next word compared against p scaled to 2**64."""
        if not 0.0 <= p <= 1.0:
            raise ProbabilityOutOfRangeError(f"probability {p} outside [0, 1]")
        return self.next_word() < int(p * 2.0**64)

    def child(self, index: int) -> "RngStream":
        """Derive an independent stream for parallel or per-trial use."""
        if index < 0:
            raise ValueError("child index must be non-negative")
        return RngStream(_mix64((_mix64(self.seed) + (index + 1) * _GAMMA) & _MASK64))


# --- signal file format ------------------------------------------------------


def save_signal(s: ZnSignal, path) -> None:
    """Write the JSON signal format {"n": n, "values": [...]} (real signals only)."""
    if s.is_complex:
        raise ValueError("the signal file format holds real signals only")
    if s.exact:
        vals = [int(v) for v in s.values]
    else:
        vals = [float(v) for v in s.values]
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"n": s.n, "values": vals}, fh)
            fh.write("\n")
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


def load_signal(path) -> ZnSignal:
    """Load the JSON signal format; rejects wrong length or unknown fields."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailureError(str(exc)) from exc
    if not isinstance(obj, dict) or set(obj.keys()) != {"n", "values"}:
        raise IoFailureError("signal file must contain exactly the fields 'n' and 'values'")
    if not isinstance(obj["n"], int) or not isinstance(obj["values"], list):
        raise IoFailureError("'n' must be an integer and 'values' a list")
    m = make_modulus(obj["n"])
    values = obj["values"]
    if len(values) != m.n:
        raise IoFailureError(f"expected {m.n} values, got {len(values)}")
    if all(isinstance(v, int) for v in values):
        return ZnSignal(m, np.array(values, dtype=np.int64))
    return ZnSignal(m, np.array(values, dtype=np.float64))
