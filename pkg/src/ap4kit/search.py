"""Rediscovery engines: grid-design enumeration and exact minimization of the
4-AP sum over sign assignments on {1..n}.

Both minimizers sweep their full assignment space with Gray-code style
single-coordinate moves, updating the objective incrementally through the
progressions that touch the moved coordinate; correctness is anchored to the
exact ``ap4_sum_z`` evaluator in tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .apcount import ap4_sum_z
from .constructions import GridDesign, validate_design
from .core import IntSignalZ
from .errors import TooLargeError

PM1_LIMIT = 24
TERNARY_LIMIT = 16


@dataclass(frozen=True)
class SearchResult:
    """Outcome of an exhaustive sweep; best_value is the true minimum when exhaustive."""

    best_value: int
    witnesses: tuple[tuple[int, ...], ...]
    nodes_explored: int
    exhaustive: bool


def _progressions(n: int) -> tuple[list[tuple[int, int, int, int]], list[list[int]]]:
    """Non-degenerate 4-APs inside {0..n-1} (step > 0) and, per index, the ids touching it."""
    progs = []
    by_index: list[list[int]] = [[] for _ in range(n)]
    for d in range(1, (n - 1) // 3 + 1):
        for x in range(n - 3 * d):
            pid = len(progs)
            quad = (x, x + d, x + 2 * d, x + 3 * d)
            progs.append(quad)
            for i in quad:
                by_index[i].append(pid)
    return progs, by_index


def min_ap4_pm1(n: int) -> SearchResult:
    """Exact minimum of the 4-AP sum over all +/-1 assignments on {1..n}.

    Gray-code sweep over the 2^n assignments: flipping one coordinate negates
    exactly the progressions through it (each non-degenerate progression has
    four distinct terms).  Degenerate pairs contribute the constant n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > PM1_LIMIT:
        raise TooLargeError(f"exhaustive +/-1 sweep is capped at n = {PM1_LIMIT}")
    progs, by_index = _progressions(n)
    config = [1] * n
    prods = [1] * len(progs)
    line_sum = len(progs)
    total = n + 2 * line_sum
    best = total
    witnesses = [tuple(config)]
    for step in range(1, 1 << n):
        i = (step & -step).bit_length() - 1
        config[i] = -config[i]
        for pid in by_index[i]:
            prods[pid] = -prods[pid]
            line_sum += 2 * prods[pid]
        total = n + 2 * line_sum
        if total < best:
            best = total
            witnesses = [tuple(config)]
        elif total == best:
            witnesses.append(tuple(config))
    witnesses.sort()
    return SearchResult(best, tuple(witnesses), 1 << n, True)


def min_ap4_ternary(n: int) -> SearchResult:
    """Exact minimum of the 4-AP sum over all {-1,0,1} assignments on {1..n}.

    Reflected base-3 Gray sweep; each progression keeps its zero count and the
    product of its nonzero entries, and degenerate pairs contribute the number
    of nonzero coordinates.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > TERNARY_LIMIT:
        raise TooLargeError(f"exhaustive ternary sweep is capped at n = {TERNARY_LIMIT}")
    progs, by_index = _progressions(n)
    nprog = len(progs)
    digits = [0] * n          # digit k -> value k - 1
    dirs = [1] * n
    values = [-1] * n
    zero_count = [0] * nprog
    sign_prod = [1] * nprog   # product of the nonzero entries
    line_sum = nprog          # all entries -1: product (+1), no zeros
    nonzero = n
    total = nonzero + 2 * line_sum
    best = total
    witnesses = [tuple(values)]
    explored = 1
    while True:
        i = 0
        while i < n and not 0 <= digits[i] + dirs[i] <= 2:
            dirs[i] = -dirs[i]
            i += 1
        if i == n:
            break
        old = values[i]
        digits[i] += dirs[i]
        new = digits[i] - 1
        values[i] = new
        nonzero += (new != 0) - (old != 0)
        for pid in by_index[i]:
            zc = zero_count[pid]
            sp = sign_prod[pid]
            contrib_old = sp if zc == 0 else 0
            if old == 0:
                zc -= 1
            else:
                sp *= old
            if new == 0:
                zc += 1
            else:
                sp *= new
            zero_count[pid] = zc
            sign_prod[pid] = sp
            line_sum += (sp if zc == 0 else 0) - contrib_old
        total = nonzero + 2 * line_sum
        explored += 1
        if total < best:
            best = total
            witnesses = [tuple(values)]
        elif total == best:
            witnesses.append(tuple(values))
    witnesses.sort()
    return SearchResult(best, tuple(witnesses), explored, True)


def evaluate_assignment(values: tuple[int, ...]) -> int:
    """Re-evaluate the 4-AP sum of an assignment on {1..n} with the exact kernel."""
    return ap4_sum_z(IntSignalZ(1, tuple(values)))


def search_grid_designs(max_results: int = 0) -> tuple[GridDesign, ...]:
    """Backtracking enumeration of valid grid designs.

    Candidates are quadruples of pairwise-disjoint 4x4 permutation patterns,
    one per horizontal plane (equivalently, 4x4 Latin squares); each candidate
    is then filtered through validate_design.  ``max_results = 0`` means
    exhaustive; the built-in design is among the results.  Designs come back
    sorted by their point lists, so the order is deterministic.
    """
    perms = list(itertools.permutations(range(1, 5)))
    found: list[GridDesign] = []

    def extend(chosen: list[tuple[int, ...]]) -> bool:
        if len(chosen) == 4:
            design = GridDesign(
                frozenset(
                    (a, sigma[a - 1], c + 1)
                    for c, sigma in enumerate(chosen)
                    for a in range(1, 5)
                )
            )
            if validate_design(design).ok:
                found.append(design)
                if max_results and len(found) >= max_results:
                    return True
            return False
        for sigma in perms:
            if all(
                sigma[a] != prev[a] for prev in chosen for a in range(4)
            ):
                chosen.append(sigma)
                if extend(chosen):
                    return True
                chosen.pop()
        return False

    extend([])
    found.sort(key=lambda d: tuple(sorted(d.points)))
    return tuple(found)
