"""Counting of weighted arithmetic-progression patterns.

Means over Z_n run over all n^2 pairs (x, d) with d = 0 included; sums over Z
run over every integer pair, d of any sign.  There is no Fourier shortcut for
the 4-term mean, so the Z_n kernels are O(n^2): the per-d inner sum is
vectorized and the d-partials are combined in fixed order (exact integers when
every input signal is integer-valued, compensated summation otherwise), which
makes results bit-stable run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import IntSignalZ, ZnSignal
from .errors import ModulusMismatchError, NotIndicatorError
from .spectra import dft


@dataclass(frozen=True)
class ApMean:
    """A progression mean: value = exact_numerator / pair_count when exact."""

    value: float
    exact_numerator: int | None
    pair_count: int


def ap4_sum_z(f: IntSignalZ) -> int:
    """Exact integer sum over all (x, d) in Z^2 of f(x)f(x+d)f(x+2d)f(x+3d).

    Only d with |3d| at most the support diameter can contribute.
    """
    vals = np.asarray(f.values, dtype=np.int64)
    length = len(vals)
    if length == 0:
        return 0
    total = 0
    dmax = (length - 1) // 3
    for d in range(-dmax, dmax + 1):
        x0 = max(0, -3 * d)
        x1 = min(length - 1, length - 1 - 3 * d)
        if x0 > x1:
            continue
        prod = vals[x0 : x1 + 1].copy()
        for j in (1, 2, 3):
            prod *= vals[x0 + j * d : x1 + j * d + 1]
        total += int(prod.sum(dtype=np.int64))
    return total


def _per_d_partials(arrays: list[np.ndarray]) -> np.ndarray:
    """partials[d] = sum_x prod_i arrays[i][(x + i*d) mod n], one entry per d."""
    n = arrays[0].shape[0]
    dtype = np.result_type(*arrays)
    doubled = [np.concatenate((a, a)) for a in arrays[1:]]
    out = np.empty(n, dtype=dtype)
    buf = np.empty(n, dtype=dtype)
    for d in range(n):
        np.multiply(arrays[0], doubled[0][d : d + n], out=buf)
        for i in range(2, len(arrays)):
            start = (i * d) % n
            buf *= doubled[i - 1][start : start + n]
        out[d] = buf.sum()
    return out


def apk_mean_zn(signals: list[ZnSignal]) -> ApMean:
    """Mean over all n^2 pairs (x, d) of prod_i signals[i](x + i*d), k = len(signals).

    Exact integer path when every signal is integer-valued.
    """
    k = len(signals)
    if k not in (3, 4, 5):
        raise ValueError(f"k must be 3, 4 or 5, got {k}")
    m = signals[0].modulus
    if any(s.modulus != m for s in signals):
        raise ModulusMismatchError("all signals must share one modulus")
    if any(s.is_complex for s in signals):
        raise ValueError("progression means are defined for real signals")
    n = m.n
    if all(s.exact for s in signals):
        # per-d sums stay below 2^63 for |values| <= 64 at any supported n
        if any(int(np.abs(s.values).max(initial=0)) > 64 for s in signals):
            raise ValueError("exact kernel requires integer values in [-64, 64]")
        partials = _per_d_partials([s.values for s in signals])
        numerator = int(partials.sum(dtype=np.int64))
        return ApMean(numerator / (n * n), numerator, n * n)
    arrays = [s.values.astype(np.float64) for s in signals]
    partials = _per_d_partials(arrays)
    return ApMean(math.fsum(partials.tolist()) / (n * n), None, n * n)


def ap4_mean_profile(s: ZnSignal) -> np.ndarray:
    """Per-d means: entry d is E_x s(x)s(x+d)s(x+2d)s(x+3d); their average is the 4-AP mean."""
    if s.is_complex:
        raise ValueError("profile is defined for real signals")
    arrays = [s.values.astype(np.float64)] * 4
    return _per_d_partials(arrays) / s.n


def linear_form_mean_fourier(b: ZnSignal) -> float:
    """E over solutions of x - 3y + 3z - w = 0 of B(x)B(y)B(z)B(w).

    Computed as sum_r |B^(r)|^2 |B^(3r)|^2, which also shows the value is at
    least density(B)^4: the nonzero frequencies contribute non-negatively.
    """
    if not b.exact or not np.isin(b.values, (0, 1)).all():
        raise NotIndicatorError("expected a 0/1-valued signal")
    n = b.n
    coeffs = dft(b).coeffs
    mags2 = (coeffs * coeffs.conj()).real
    idx3 = (3 * np.arange(n, dtype=np.int64)) % n
    return math.fsum((mags2 * mags2[idx3]).tolist())
