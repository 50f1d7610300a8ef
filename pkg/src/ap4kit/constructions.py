"""The construction chain from a signed grid design to a sampled subset of Z_n.

A 16-point design in the {1,2,3,4}^3 grid meets every 4-point line except the
four space diagonals exactly once, so the grid function that is -1 on the
design and +1 elsewhere has a negative sum over 4-term progressions (-72).
An additive embedding (a Freiman homomorphism) transfers that function to the
integers, interval blocks spread it over Z_n without creating new
progressions, quadratic-phase modulation flattens its spectrum while roughly
doubling the progression sum, and an affine rescale plus independent Bernoulli
rounding turns it into an actual subset of Z_n of density about 1/2 whose
4-term progression count falls below the random benchmark 1/16.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple

import numpy as np

from .core import IntervalZn, IntSignalZ, Modulus, RngStream, ZnSignal
from .errors import (
    InvalidDesignError,
    ModulusTooSmallError,
    OutOfDomainError,
    ProbabilityOutOfRangeError,
)

Triple = tuple[int, int, int]

GRID_SIDE = 4

# The 16 built-in design triples, as digit strings "abc" -> (a, b, c).
_DESIGN_DIGITS = (
    "113", "121", "132", "144",
    "212", "224", "233", "241",
    "314", "322", "331", "343",
    "411", "423", "434", "442",
)

AXIS = "axis-parallel"
PLANE_DIAGONAL = "plane-diagonal"
MAIN_DIAGONAL = "main-diagonal"


@dataclass(frozen=True)
class GridDesign:
    """A set of grid points proposed as a design; validate_design checks the property."""

    points: frozenset[Triple]

    def __post_init__(self) -> None:
        for p in self.points:
            _check_point(p)

    def __contains__(self, point: Triple) -> bool:
        return point in self.points


@dataclass(frozen=True)
class GridLine:
    """Four collinear grid points; kind says how many coordinates vary."""

    points: tuple[Triple, Triple, Triple, Triple]
    kind: str


class DesignCheck(NamedTuple):
    ok: bool
    violations: tuple[GridLine, ...]


class FreimanCheck(NamedTuple):
    ok: bool
    collision: tuple | None


def _check_point(p: Triple) -> None:
    if len(p) != 3 or any(not 1 <= c <= GRID_SIDE for c in p):
        raise OutOfDomainError(f"{p} is not a point of the 4x4x4 grid")


def reference_design() -> GridDesign:
    """The built-in 16-point design (one point per off-diagonal 4-point line)."""
    return GridDesign(frozenset(tuple(int(ch) for ch in s) for s in _DESIGN_DIGITS))


# Canonical line directions: 3 axis-parallel, 6 plane-diagonal, 4 main-diagonal.
_DIRECTIONS = (
    ((1, 0, 0), AXIS), ((0, 1, 0), AXIS), ((0, 0, 1), AXIS),
    ((1, 1, 0), PLANE_DIAGONAL), ((1, -1, 0), PLANE_DIAGONAL),
    ((1, 0, 1), PLANE_DIAGONAL), ((1, 0, -1), PLANE_DIAGONAL),
    ((0, 1, 1), PLANE_DIAGONAL), ((0, 1, -1), PLANE_DIAGONAL),
    ((1, 1, 1), MAIN_DIAGONAL), ((1, 1, -1), MAIN_DIAGONAL),
    ((1, -1, 1), MAIN_DIAGONAL), ((1, -1, -1), MAIN_DIAGONAL),
)


@lru_cache(maxsize=1)
def enumerate_lines() -> tuple[GridLine, ...]:
    """All 76 four-point lines of the grid: 48 axis-parallel, 24 plane-diagonal, 4 main."""
    lines = []
    for (dx, dy, dz), kind in _DIRECTIONS:
        starts = []
        for d in (dx, dy, dz):
            if d == 1:
                starts.append((1,))
            elif d == -1:
                starts.append((GRID_SIDE,))
            else:
                starts.append(tuple(range(1, GRID_SIDE + 1)))
        for sx, sy, sz in itertools.product(*starts):
            pts = tuple(
                sorted((sx + i * dx, sy + i * dy, sz + i * dz) for i in range(GRID_SIDE))
            )
            lines.append(GridLine(pts, kind))
    return tuple(lines)


def validate_design(design: GridDesign) -> DesignCheck:
    """True iff every line other than the four main diagonals meets the design exactly once."""
    violations = []
    for line in enumerate_lines():
        if line.kind == MAIN_DIAGONAL:
            continue
        hits = sum(1 for p in line.points if p in design.points)
        if hits != 1:
            violations.append(line)
    return DesignCheck(not violations, tuple(violations))


def sign_grid(design: GridDesign) -> dict[Triple, int]:
    """The grid function: -1 on design points, +1 on the other 48 grid points."""
    check = validate_design(design)
    if not check.ok:
        raise InvalidDesignError(f"{len(check.violations)} lines fail the one-point condition")
    rng = range(1, GRID_SIDE + 1)
    return {
        p: -1 if p in design.points else 1
        for p in itertools.product(rng, rng, rng)
    }


def grid_ap4_sum(signs: Mapping[Triple, int]) -> int:
    """Sum over all (x, d) in (Z^3)^2 of g(x)g(x+d)g(x+2d)g(x+3d), g = 0 off the grid."""
    total = 0
    steps = range(-3, 4)
    for x in signs:
        for d in itertools.product(steps, steps, steps):
            prod = 1
            for i in range(4):
                q = (x[0] + i * d[0], x[1] + i * d[1], x[2] + i * d[2])
                v = signs.get(q, 0)
                if v == 0:
                    prod = 0
                    break
                prod *= v
            total += prod
    return total


def embed_triple(a: int, b: int, c: int) -> int:
    """The base-8 style embedding a + 8b + 64c, mapping the grid into [73, 292]."""
    _check_point((a, b, c))
    return a + 8 * b + 64 * c


def _default_embedding(p: tuple) -> int:
    return embed_triple(*p)


def freiman_check(
    embedding: Callable[[tuple], int] | None = None,
    points: Iterable[tuple] | None = None,
) -> FreimanCheck:
    """Check that phi(x) - phi(y) = phi(z) - phi(w) iff x - y = z - w on the domain.

    Runs over all pairs of domain points (64^2 for the grid), checking that the
    difference of images depends only on the vector difference and that
    distinct vector differences give distinct image differences.  On failure
    the collision field holds two pairs witnessing it.
    """
    if embedding is None:
        embedding = _default_embedding
    pts = list(points) if points is not None else [
        p for p in itertools.product(*(range(1, GRID_SIDE + 1),) * 3)
    ]
    by_vector: dict[tuple, int] = {}
    by_image: dict[int, tuple] = {}
    first_pair: dict[tuple, tuple] = {}
    for x, y in itertools.product(pts, pts):
        vec = tuple(a - b for a, b in zip(x, y))
        img = embedding(x) - embedding(y)
        if vec in by_vector:
            if by_vector[vec] != img:
                return FreimanCheck(False, (first_pair[vec], (x, y)))
        else:
            by_vector[vec] = img
            first_pair[vec] = (x, y)
        if img in by_image:
            if by_image[img] != vec:
                return FreimanCheck(False, (first_pair[by_image[img]], (x, y)))
        else:
            by_image[img] = vec
    return FreimanCheck(True, None)


def lift_signal(signs: Mapping[Triple, int]) -> IntSignalZ:
    """Transfer the grid function to Z along the embedding; zero off the image."""
    values = [0] * (292 - 73 + 1)
    for p, v in signs.items():
        values[embed_triple(*p) - 73] = v
    return IntSignalZ(73, tuple(values))


# --- interval spreading over Z_n ----------------------------------------------


def interval_block_length(m: Modulus) -> int:
    """The block length t = floor(n/1200), rejected when 1500 t < n."""
    t = m.n // 1200
    if t < 1 or 1500 * t < m.n:
        raise ModulusTooSmallError(
            f"no integer block length in [n/1500, n/1200] for n = {m.n}"
        )
    return t


def interval_block(k: int, t: int) -> IntervalZn:
    """Block k (1-based): the residues {(2k-1)t + 1, ..., 2kt}."""
    return IntervalZn((2 * k - 1) * t + 1, t)


def build_interval_signal(m: Modulus, block_length: int | None = None) -> ZnSignal:
    """Spread the lifted sequence over 300 length-t blocks with gaps of t.

    Block k carries the constant value f(k), so the signal is a +/-1
    combination of 64 disjoint interval indicators; an arithmetic progression
    can only pass through blocks whose indices themselves form a progression,
    which pins the exact 4-AP numerator at -72 * p(t) with p(t) the number of
    progressions inside {1..t}.  ``block_length`` overrides the automatic gate
    (used by small-modulus diagnostics); all 600 block endpoints must stay
    distinct mod n.
    """
    t = interval_block_length(m) if block_length is None else int(block_length)
    if t < 1 or 600 * t >= m.n:
        raise ModulusTooSmallError(f"block length {t} does not fit n = {m.n}")
    f = lift_signal(sign_grid(reference_design()))
    values = np.zeros(m.n, dtype=np.int64)
    for k in range(1, 301):
        v = f.value_at(k)
        if v != 0:
            start = (2 * k - 1) * t + 1
            values[start : start + t] = v
    return ZnSignal(m, values)


def interval_progression_count(t: int) -> int:
    """p(t): 4-APs (any integer step, degenerate included) inside {1..t}.

    Equals sum over residues j mod 3 of m_j^2, where m_j counts elements of
    {1..t} congruent to j: a progression is determined by its endpoints, which
    must agree mod 3.
    """
    counts = [0, 0, 0]
    for x in range(1, t + 1):
        counts[x % 3] += 1
    return sum(c * c for c in counts)


def build_modulated_signal(m: Modulus, block_length: int | None = None) -> ZnSignal:
    """The interval signal times the real phase combination.

    G(x) = F(x) (2 cos(2 pi x^2 / n) + 2 cos(2 pi 3 x^2 / n)), the real form of
    the four quadratic phases with exponents +-x^2, +-3x^2.  Values lie in
    [-4, 4] and every Fourier coefficient is below 512 n^-1/2 ln n.
    """
    f = build_interval_signal(m, block_length)
    n = m.n
    xs = np.arange(n, dtype=np.int64)
    x2 = (xs * xs) % n
    phases = 2.0 * np.cos(2.0 * np.pi * x2 / n) + 2.0 * np.cos(
        2.0 * np.pi * ((3 * x2) % n) / n
    )
    return ZnSignal(m, f.values * phases)


def build_probability_signal(m: Modulus, block_length: int | None = None) -> ZnSignal:
    """P = (G + 4)/8: values in [0, 1], coefficients G^(r)/8 for r != 0."""
    g = build_modulated_signal(m, block_length)
    return ZnSignal(m, (g.values + 4.0) / 8.0)


def sample_indicator(p_signal: ZnSignal, rng: RngStream) -> ZnSignal:
    """Independent Bernoulli draws: x enters the set with probability P(x).

    One 64-bit word per coordinate, consumed in order x = 0..n-1 and compared
    against the probability scaled to 2**64, so the result is a deterministic
    function of the stream seed.
    """
    if p_signal.is_complex:
        raise ProbabilityOutOfRangeError("probabilities must be real")
    vals = p_signal.values
    if float(vals.min()) < 0.0 or float(vals.max()) > 1.0:
        raise ProbabilityOutOfRangeError("probabilities must lie in [0, 1]")
    thresholds = [int(float(v) * 2.0**64) for v in vals]
    words = rng.words(p_signal.n).tolist()
    out = np.fromiter(
        (1 if w < t else 0 for w, t in zip(words, thresholds)),
        dtype=np.int64,
        count=p_signal.n,
    )
    return ZnSignal(p_signal.modulus, out)


def quadratic_level_set(m: Modulus, c: float) -> ZnSignal:
    """Indicator of {x : x^2 mod n within cn of 0 (cyclically)}; density about 2c."""
    if not 0.0 < c < 0.25:
        raise ValueError("c must lie in (0, 1/4)")
    n = m.n
    xs = np.arange(n, dtype=np.int64)
    r2 = (xs * xs) % n
    cutoff = c * n
    inside = (r2 <= cutoff) | (r2 >= n - cutoff)
    return ZnSignal(m, inside.astype(np.int64))


# --- quadratic pattern classification -----------------------------------------


@dataclass(frozen=True)
class PatternCoeffs:
    """One term of the 256-fold phase expansion of the modulated 4-AP product.

    The phase exponent p x^2 + q (x+d)^2 + r (x+2d)^2 + s (x+3d)^2 collapses to
    u x^2 + v x d + w d^2 with u = p+q+r+s, v = 2(q+2r+3s), w = q+4r+9s.
    """

    p: int
    q: int
    r: int
    s: int
    u: int
    v: int
    w: int

    @classmethod
    def from_signs(cls, p: int, q: int, r: int, s: int) -> "PatternCoeffs":
        return cls(p, q, r, s, p + q + r + s, 2 * (q + 2 * r + 3 * s), q + 4 * r + 9 * s)

    def theta_direct(self, x: int, d: int) -> int:
        return (
            self.p * x * x
            + self.q * (x + d) ** 2
            + self.r * (x + 2 * d) ** 2
            + self.s * (x + 3 * d) ** 2
        )

    def theta_collapsed(self, x: int, d: int) -> int:
        return self.u * x * x + self.v * x * d + self.w * d * d


class PatternClassification(NamedTuple):
    all_patterns: tuple[PatternCoeffs, ...]
    nonzero_u: tuple[PatternCoeffs, ...]
    zero_u_nonzero_w: tuple[PatternCoeffs, ...]
    null: tuple[PatternCoeffs, ...]


def classify_patterns() -> PatternClassification:
    """Split the 256 sign patterns (entries in {-3,-1,1,3}) by their collapsed form.

    Exactly two patterns have u = w = 0, namely (1,-3,3,-1) and (-1,3,-3,1);
    both also have v = 0, by the identity x^2 - 3(x+d)^2 + 3(x+2d)^2 = (x+3d)^2,
    so their phase factor is identically 1.
    """
    signs = (-3, -1, 1, 3)
    every = tuple(
        PatternCoeffs.from_signs(p, q, r, s)
        for p, q, r, s in itertools.product(signs, signs, signs, signs)
    )
    nonzero_u = tuple(pc for pc in every if pc.u != 0)
    zero_u_nonzero_w = tuple(pc for pc in every if pc.u == 0 and pc.w != 0)
    null = tuple(pc for pc in every if pc.u == 0 and pc.w == 0)
    return PatternClassification(every, nonzero_u, zero_u_nonzero_w, null)


def modulated_ap4_mean(s: ZnSignal, uvw: tuple[int, int, int]) -> complex:
    """E over (x, d) of s(x)s(x+d)s(x+2d)s(x+3d) w^(u x^2 + v x d + w d^2).

    Exponents are reduced mod n stepwise in int64; the d-partials are combined
    in fixed order.
    """
    if s.is_complex:
        raise ValueError("expected a real signal")
    u, v, w = uvw
    n = s.n
    vals = s.values.astype(np.float64)
    doubled = np.concatenate((vals, vals))
    xs = np.arange(n, dtype=np.int64)
    x2 = (xs * xs) % n
    ux2 = (u % n) * x2 % n
    table = np.exp(2j * np.pi * np.arange(n) / n)
    total = 0.0 + 0.0j
    for d in range(n):
        prod = vals * doubled[d : d + n]
        prod *= doubled[2 * d % n : 2 * d % n + n]
        prod *= doubled[3 * d % n : 3 * d % n + n]
        e = (ux2 + (v * d % n) * xs) % n
        e = (e + w * d * d % n) % n
        total += complex(prod.dot(table[e]))
    return total / (n * n)
