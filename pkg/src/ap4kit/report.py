"""End-to-end verification pipeline and serialized reports.

``log n`` means the natural logarithm in every bound here.  Some stated
ceilings cannot fail at desk-scale moduli (for example 512 n^-1/2 ln n is far
above the trivial coefficient cap of a [-4, 4]-valued signal); those checks
still run, but carry ``vacuous_at_this_n: true`` and their measured values
feed the scaling report, which is where the n^-1/2 ln n behaviour is actually
exercised.

A check record pairs a measured quantity with the bound it must stay under.
When ``bound`` is non-null, ``measured`` is a number or a dict whose "value"
entry is the number compared against the bound; ``passed`` requires that
comparison (plus any recorded exact identities in the same check).
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import constructions as cons
from .apcount import ap4_sum_z, apk_mean_zn
from .core import RngStream, ZnSignal, constant_signal, make_modulus, save_signal, signal_stats
from .errors import Ap4KitError, IoFailureError
from .spectra import (
    Spectrum,
    dft,
    max_coefficient,
    modulated_interval_uniformity_check,
    quadratic_phase_signal,
    save_spectrum_csv,
    uniformity,
)
from .core import IntervalZn

SCHEMA_VERSION = "1"

_CHECK_FIELDS = (
    "name",
    "claim_ref",
    "measured",
    "bound",
    "passed",
    "runtime_ms",
    "vacuous_at_this_n",
    "skipped",
)
_REPORT_FIELDS = ("schema_version", "kind", "modulus", "seed", "checks")


@dataclass
class CheckRecord:
    name: str
    claim_ref: str
    measured: object
    bound: float | None
    passed: bool | None
    runtime_ms: float
    vacuous_at_this_n: bool = False
    skipped: bool = False

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in _CHECK_FIELDS}


@dataclass
class VerificationReport:
    schema_version: str
    kind: str
    modulus: int
    seed: int
    checks: list[CheckRecord] = field(default_factory=list)

    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.skipped)

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "modulus": self.modulus,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
        }


def report_to_json(report: VerificationReport) -> str:
    """Deterministic serialization: two runs differ only in runtime_ms values."""
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def save_report(report: VerificationReport, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report_to_json(report))
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


def load_report(path) -> VerificationReport:
    """Load a report; unknown fields and unknown schema versions are rejected."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailureError(str(exc)) from exc
    if not isinstance(obj, dict) or set(obj.keys()) != set(_REPORT_FIELDS):
        raise IoFailureError("report must contain exactly the schema-1 fields")
    if obj["schema_version"] != SCHEMA_VERSION:
        raise IoFailureError(f"unsupported schema version {obj['schema_version']!r}")
    checks = []
    for c in obj["checks"]:
        if not isinstance(c, dict) or set(c.keys()) != set(_CHECK_FIELDS):
            raise IoFailureError("check record has unexpected fields")
        checks.append(CheckRecord(**c))
    return VerificationReport(
        obj["schema_version"], obj["kind"], obj["modulus"], obj["seed"], checks
    )


def export(obj, path) -> None:
    """Write a signal (JSON), spectrum (CSV) or report (JSON) to ``path``."""
    if isinstance(obj, ZnSignal):
        save_signal(obj, path)
    elif isinstance(obj, Spectrum):
        save_spectrum_csv(obj, path)
    elif isinstance(obj, VerificationReport):
        save_report(obj, path)
    else:
        raise ValueError(f"cannot export objects of type {type(obj).__name__}")


class _Runner:
    """Runs pipeline stages in order; an exception fails its stage and skips the rest."""

    def __init__(self) -> None:
        self.checks: list[CheckRecord] = []
        self.aborted = False

    def run(self, name: str, claim_ref: str, fn) -> None:
        if self.aborted:
            self.checks.append(CheckRecord(name, claim_ref, None, None, None, 0.0, skipped=True))
            return
        t0 = time.perf_counter()
        try:
            measured, bound, passed, vacuous = fn()
        except Ap4KitError as exc:
            ms = 1000.0 * (time.perf_counter() - t0)
            self.checks.append(
                CheckRecord(name, claim_ref, {"error": str(exc)}, None, False, ms)
            )
            self.aborted = True
            return
        ms = 1000.0 * (time.perf_counter() - t0)
        self.checks.append(
            CheckRecord(name, claim_ref, measured, bound, passed, ms, vacuous_at_this_n=vacuous)
        )


def _log_scale(n: int) -> float:
    return math.log(n) / math.sqrt(n)


def run_verify(
    n: int,
    seed: int,
    trials: int = 20,
    modulated_trials: int = 20,
    flatness_trials: int = 10,
) -> VerificationReport:
    """Execute the full verification pipeline at modulus n.

    Stages run in construction order: design validation, line census, the
    difference-map check, the lifted -72 sum, the exact interval-signal
    numerator, phase flatness, modulated-interval coefficients, the modulated
    signal's spectrum, pattern classification, the mean-difference bound, the
    probability signal, the 16-term bracket expansion, and ``trials``
    independent rounding draws checked against the n^-1/2 ln n concentration
    threshold.  Deterministic given (n, seed, trials).
    """
    m = make_modulus(n)
    if n < 6000:
        raise ValueError("the verification pipeline requires n >= 6000")
    rng = RngStream(seed)
    runner = _Runner()
    state: dict = {}

    def design_valid():
        design = cons.reference_design()
        state["design"] = design
        check = cons.validate_design(design)
        return {"violations": len(check.violations)}, None, check.ok, False

    runner.run("grid_design_valid", "off-diagonal-lines-meet-design-once", design_valid)

    def line_census():
        lines = cons.enumerate_lines()
        counts = {
            kind: sum(1 for l in lines if l.kind == kind)
            for kind in (cons.AXIS, cons.PLANE_DIAGONAL, cons.MAIN_DIAGONAL)
        }
        measured = {"total": len(lines), **counts}
        ok = (
            len(lines) == 76
            and counts[cons.AXIS] == 48
            and counts[cons.PLANE_DIAGONAL] == 24
            and counts[cons.MAIN_DIAGONAL] == 4
        )
        return measured, None, ok, False

    runner.run("grid_line_census", "line-census-48-24-4", line_census)

    def freiman():
        check = cons.freiman_check()
        return {"ok": check.ok}, None, check.ok, False

    runner.run("freiman_embedding", "difference-map-bijective-on-vector-differences", freiman)

    def lift_sum():
        signs = cons.sign_grid(state["design"])
        state["lift"] = cons.lift_signal(signs)
        lift_total = ap4_sum_z(state["lift"])
        grid_total = cons.grid_ap4_sum(signs)
        measured = {"lift_sum": lift_total, "grid_sum": grid_total}
        return measured, None, lift_total == -72 and grid_total == -72, False

    runner.run("lift_ap4_sum", "ap4-sum-of-lift-equals--72", lift_sum)

    def interval_exact():
        f = cons.build_interval_signal(m)
        state["F"] = f
        t = cons.interval_block_length(m)
        p = cons.interval_progression_count(t)
        mean = apk_mean_zn([f, f, f, f])
        state["EF"] = mean.value
        measured = {"t": t, "p": p, "numerator": mean.exact_numerator}
        return measured, None, mean.exact_numerator == -72 * p, False

    runner.run("interval_signal_ap4", "ap4-numerator-equals--72p", interval_exact)

    def interval_mean():
        return {"value": state["EF"]}, -1e-5, state["EF"] <= -1e-5, False

    runner.run("interval_signal_mean", "ap4-mean-at-most--1e-5", interval_mean)

    def flatness():
        sub = rng.child(0)
        target = 1.0 / math.sqrt(n)
        worst = 0.0
        for _ in range(flatness_trials):
            a = 1 + sub.next_word() % (n - 1)
            b = sub.next_word() % n
            sp = dft(quadratic_phase_signal(m, a, b))
            dev = float(np.abs(np.abs(sp.coeffs) - target).max())
            worst = max(worst, dev)
        return {"value": worst, "trials": flatness_trials}, 1e-9, worst <= 1e-9, False

    runner.run("quadratic_phase_flatness", "phase-spectrum-flat-at-n^-1/2", flatness)

    def modulated_intervals():
        sub = rng.child(1)
        bound = 2.0 * _log_scale(n)
        worst = 0.0
        for _ in range(modulated_trials):
            start = sub.next_word() % n
            length = 1 + sub.next_word() % (n - 1)
            a = 1 + sub.next_word() % (n - 1)
            b = sub.next_word() % n
            c = sub.next_word() % n
            measured, _ = modulated_interval_uniformity_check(
                m, IntervalZn(start, length), (a, b, c)
            )
            worst = max(worst, measured)
        return {"value": worst, "trials": modulated_trials}, bound, worst <= bound, False

    runner.run(
        "modulated_interval_uniformity",
        "interval-times-phase-coefficients-below-2n^-1/2-ln-n",
        modulated_intervals,
    )

    def g_spectrum():
        g = cons.build_modulated_signal(m)
        state["G"] = g
        sp = dft(g)
        state["spG"] = sp
        bound = 512.0 * _log_scale(n)
        top = max_coefficient(sp)
        measured = {
            "value": top,
            "uniformity": uniformity(sp),
            "mean": signal_stats(g).mean,
        }
        # |G| <= 4 already caps every coefficient at 4, so the bound is
        # informative only once 512 n^-1/2 ln n < 4.
        return measured, bound, top <= bound, bound >= 4.0

    runner.run(
        "modulated_signal_spectrum", "modulated-coefficients-below-512n^-1/2-ln-n", g_spectrum
    )

    def patterns():
        cls = cons.classify_patterns()
        null_sigs = sorted((pc.p, pc.q, pc.r, pc.s) for pc in cls.null)
        ok = (
            null_sigs == [(-1, 3, -3, 1), (1, -3, 3, -1)]
            and all(pc.v == 0 for pc in cls.null)
            and len(cls.all_patterns) == 256
        )
        measured = {"null_count": len(cls.null), "null_v": [pc.v for pc in cls.null]}
        return measured, None, ok, False

    runner.run("pattern_classification", "exactly-two-null-patterns-both-v-zero", patterns)

    def mean_difference():
        eg = apk_mean_zn([state["G"]] * 4).value
        state["EG"] = eg
        diff = abs(eg - 2.0 * state["EF"])
        bound = 2.0**18 * _log_scale(n)
        measured = {"value": diff, "modulated_mean": eg, "interval_mean": state["EF"]}
        # The trivial cap is |EG| + 2|EF| <= 4^4 + 2.
        return measured, bound, diff <= bound, bound >= 258.0

    runner.run(
        "modulated_vs_interval_mean", "ap4-mean-difference-below-2^18n^-1/2-ln-n", mean_difference
    )

    def probability():
        p_sig = cons.build_probability_signal(m)
        state["P"] = p_sig
        sp_p = dft(p_sig)
        state["spP"] = sp_p
        bound64 = 64.0 * _log_scale(n)
        stats = signal_stats(p_sig)
        spectrum_err = float(
            np.abs(sp_p.coeffs[1:] - state["spG"].coeffs[1:] / 8.0).max()
        )
        mean_offset = abs(stats.mean - 0.5)
        unif = uniformity(sp_p)
        measured = {
            "min": stats.minimum,
            "max": stats.maximum,
            "max_spectrum_error": spectrum_err,
            "mean_offset": mean_offset,
            "uniformity": unif,
            "bound_64": bound64,
        }
        ok = (
            stats.minimum >= 0.0
            and stats.maximum <= 1.0
            and spectrum_err <= 1e-12
            and mean_offset <= bound64
            and unif <= bound64
        )
        return measured, None, ok, bound64 >= 0.5

    runner.run(
        "probability_signal", "range-[0,1]-spectrum-g/8-mean-near-1/2", probability
    )

    def expansion():
        ones = constant_signal(m, 1)
        g = state["G"]
        total = 0.0
        for size in range(4):
            for positions in _subsets_of_size(size):
                sigs = [g if i in positions else ones for i in range(4)]
                total += 4.0 ** (4 - size) * apk_mean_zn(sigs).value
        total += state["EG"]
        total *= 2.0**-12
        lead_term = 2.0**-12 * 4.0**4 * apk_mean_zn([ones] * 4).value
        direct = apk_mean_zn([state["P"]] * 4).value
        state["EP"] = direct
        diff = abs(total - direct)
        measured = {
            "value": diff,
            "direct": direct,
            "expansion": total,
            "lead_term_exact": lead_term == 0.0625,
            "modulated_term": 2.0**-12 * state["EG"],
        }
        return measured, 1e-10, diff <= 1e-10 and lead_term == 0.0625, False

    runner.run(
        "product_expansion_16_terms", "bracket-expansion-matches-direct-mean", expansion
    )

    def sampling():
        threshold = _log_scale(n)
        allowed = trials // 20
        sub = rng.child(2)
        densities = []
        deviations = []
        p_sig = state["P"]
        sp_p = state["spP"]
        mean_p = signal_stats(p_sig).mean
        for i in range(trials):
            sample = cons.sample_indicator(p_sig, sub.child(i))
            densities.append(signal_stats(sample).mean)
            sp_a = dft(sample)
            deviations.append(float(np.abs(sp_a.coeffs - sp_p.coeffs).max()))
        exceed = sum(1 for d in deviations if d > threshold)
        density_ok = all(abs(d - mean_p) <= 4.0 / math.sqrt(n) for d in densities)
        value = sorted(deviations)[-(allowed + 1)] if allowed < trials else 0.0
        measured = {
            "value": value,
            "densities": densities,
            "max_deviations": deviations,
            "exceed_count": exceed,
            "allowed_exceed": allowed,
            "density_ok": density_ok,
        }
        return measured, threshold, value <= threshold and density_ok, False

    runner.run(
        "sampling_concentration", "sampled-spectrum-within-n^-1/2-ln-n", sampling
    )

    return VerificationReport(SCHEMA_VERSION, "verify", n, seed, runner.checks)


def _subsets_of_size(size: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(4), size))


def run_scaling(n_list: list[int], block_length: int | None = None) -> VerificationReport:
    """Measure the n^-1/2 ln n series across several moduli.

    For each n the modulated signal's uniformity and the mean difference
    |EG - 2 EF| are recorded raw and divided by n^-1/2 ln n; consecutive
    normalized values must stay within a factor 10 of each other.  |mean G| is
    recorded for reference (its normalized value can fluctuate through zero,
    so no band is asserted on it).
    """
    rows = []
    runner = _Runner()
    for n in n_list:
        m = make_modulus(n)

        def measure(m=m, n=n):
            f = cons.build_interval_signal(m, block_length)
            g = cons.build_modulated_signal(m, block_length)
            ef = apk_mean_zn([f, f, f, f]).value
            eg = apk_mean_zn([g, g, g, g]).value
            unif = uniformity(dft(g))
            diff = abs(eg - 2.0 * ef)
            mean_abs = abs(signal_stats(g).mean)
            scale = _log_scale(n)
            row = {
                "n": n,
                "uniformity": unif,
                "difference": diff,
                "mean_abs": mean_abs,
                "normalized_uniformity": unif / scale,
                "normalized_difference": diff / scale,
                "normalized_mean_abs": mean_abs / scale,
            }
            rows.append(row)
            return row, None, True, False

        runner.run(f"scaling_measurements@{n}", "normalized-series-recorded", measure)

    for a, b in zip(rows, rows[1:]):
        def ratios(a=a, b=b):
            ur = b["normalized_uniformity"] / a["normalized_uniformity"]
            dr = b["normalized_difference"] / a["normalized_difference"]
            ok = 0.1 <= ur <= 10.0 and 0.1 <= dr <= 10.0
            measured = {"uniformity_ratio": ur, "difference_ratio": dr}
            return measured, None, ok, False

        runner.run(
            f"scaling_ratio@{a['n']}->{b['n']}",
            "consecutive-normalized-ratios-in-[0.1,10]",
            ratios,
        )

    return VerificationReport(SCHEMA_VERSION, "scaling", n_list[0] if n_list else 0, 0, runner.checks)


def run_demo_quadratic(n: int, c: float) -> VerificationReport:
    """Build the quadratic level set and compare its progression counts
    against the random-set benchmarks density^3 and density^4.

    At small density the 4-AP count runs well above density^4 (the excess is
    what makes plain spectral flatness insufficient for 4-term counts); near
    density 1/2 all counts sit close to the random values.
    """
    m = make_modulus(n)
    runner = _Runner()
    state: dict = {}

    def density_check():
        a = cons.quadratic_level_set(m, c)
        state["A"] = a
        density = signal_stats(a).mean
        state["density"] = density
        dev = abs(density - 2.0 * c)
        bound = 2.0 / math.sqrt(n)
        return {"value": dev, "density": density, "target": 2.0 * c}, bound, dev <= bound, False

    runner.run("level_set_density", "density-close-to-2c", density_check)

    def uniformity_check():
        unif = uniformity(dft(state["A"]))
        state["uniformity"] = unif
        bound = state["density"] / 2.0
        return {"value": unif, "density": state["density"]}, bound, unif <= bound, False

    runner.run("level_set_uniformity", "uniformity-below-half-density", uniformity_check)

    def threeap_check():
        a = state["A"]
        threeap = apk_mean_zn([a, a, a]).value
        alpha3 = state["density"] ** 3
        rel = abs(threeap - alpha3) / alpha3
        measured = {"value": rel, "threeap_mean": threeap, "density_cubed": alpha3}
        return measured, 0.2, rel <= 0.2, False

    runner.run("threeap_vs_cube", "threeap-mean-within-20pct-of-density^3", threeap_check)

    def fourap_check():
        a = state["A"]
        fourap = apk_mean_zn([a, a, a, a]).value
        alpha4 = state["density"] ** 4
        ratio = fourap / alpha4
        if c <= 0.1:
            ok = ratio >= 1.1
        elif c >= 0.2:
            ok = abs(ratio - 1.0) <= 0.1
        else:
            ok = ratio >= 0.9
        measured = {"value": ratio, "fourap_mean": fourap, "density_fourth": alpha4}
        return measured, None, ok, False

    runner.run("fourap_excess", "fourap-mean-exceeds-density^4-at-small-density", fourap_check)

    return VerificationReport(SCHEMA_VERSION, "demo-quad", n, 0, runner.checks)
