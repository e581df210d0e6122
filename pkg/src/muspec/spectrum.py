"""Dichotomy spectra relative to a growth rate.

The estimator works on ratio statistics: over a window [-N, N] it enumerates
time pairs n < k whose rate log-quotient L = log(mu(k)/mu(n)) is at least a
fixed fraction of the largest quotient attainable in the window, and records

    lambda_upper(N) = max over pairs of log||Phi(k, n)|| / L
    lambda_lower(N) = min over pairs of log||Phi(k, n)|| / L

The multiplicative constant in a dichotomy bound contributes O(1/L) to each
ratio, so the cutoff washes it out.  Stabilization across an increasing
window schedule yields the two extremal exponents; monotone growth or escape
beyond a threshold flags divergence to +-infinity.  A scalar spectrum is the
interval between the two exponents; diagonal systems merge per-component
intervals and carry projector ranks on the gaps; full matrices only get an
outer enclosure from singular-value statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import evolution, rates
from .evolution import FULL, LinearSystem, WeightedSystem
from .params import DEFAULT, Params


INF = math.inf


class SpectrumError(ValueError):
    """Estimation could not run (empty pair set, bad structure, ...)."""


# ---------------------------------------------------------------------------
# Bohl estimates


@dataclass(frozen=True)
class BohlEstimate:
    """Extremal growth exponents of one component relative to a rate.

    resolution is a conservative error radius for the finite endpoints: twice
    the last window-to-window change (an estimate converging like 1/window
    still moves by its own remaining error on the final doubling, so a single
    step under-covers).
    """

    lower: float
    upper: float
    per_window: tuple
    diverged_lower: bool
    diverged_upper: bool
    stabilized_lower: bool
    stabilized_upper: bool
    pairs_used: int
    resolution: float

    @property
    def converged(self) -> bool:
        lower_ok = self.stabilized_lower or self.diverged_lower
        upper_ok = self.stabilized_upper or self.diverged_upper
        return lower_ok and upper_ok


def _sequence_verdict(values: list[float], tol: float, gamma_max: float):
    """Collapse a per-window sequence to (final, stabilized, diverged, delta).

    Stabilized when the last two values agree within tol.  Divergence is
    flagged when the last value escapes [-gamma_max, gamma_max], or when the
    last three steps move monotonically by at least tol each in the direction
    of the sign of the last value (an increasing positive tail means +inf, a
    decreasing negative tail means -inf; a decreasing positive tail is just a
    slowly converging estimate and is left unflagged).
    """
    last = values[-1]
    delta = abs(values[-1] - values[-2]) if len(values) >= 2 else 0.0
    if len(values) >= 2 and delta <= tol:
        return last, True, False, delta
    if abs(last) > gamma_max:
        return math.copysign(INF, last), False, True, 0.0
    diffs = [b - a for a, b in zip(values, values[1:])]
    if len(diffs) >= 3:
        tail = diffs[-3:]
        if all(d >= tol for d in tail) and last > 0:
            return INF, False, True, 0.0
        if all(d <= -tol for d in tail) and last < 0:
            return -INF, False, True, 0.0
    return last, False, False, delta


def _finish_estimate(per_window, pairs_used, params: Params) -> BohlEstimate:
    lows = [w[1] for w in per_window]
    highs = [w[2] for w in per_window]
    lo, lo_stab, lo_div, lo_delta = _sequence_verdict(lows, params.tol_stab, params.gamma_max)
    hi, hi_stab, hi_div, hi_delta = _sequence_verdict(highs, params.tol_stab, params.gamma_max)
    if lo > hi:
        # the per-window order lower <= upper survives any mix of flags
        # except lower -> +inf with a finite upper; promote the upper too
        hi, hi_stab, hi_div = lo, lo_stab, lo_div
    return BohlEstimate(
        lower=lo, upper=hi,
        per_window=tuple(per_window),
        diverged_lower=lo_div, diverged_upper=hi_div,
        stabilized_lower=lo_stab, stabilized_upper=hi_stab,
        pairs_used=pairs_used,
        resolution=2.0 * max(lo_delta, hi_delta),
    )


def _window_slice(times: np.ndarray, window: int) -> slice:
    center = (len(times) - 1) // 2
    return slice(center - window, center + window + 1)


def _pair_ratio_stats(r: np.ndarray, s: np.ndarray, cutoff: float):
    l_max = r[-1] - r[0]
    if l_max <= 0:
        raise SpectrumError("growth rate is flat on the window; no admissible pairs")
    i_idx, j_idx = np.triu_indices(len(r), k=1)
    L = r[j_idx] - r[i_idx]
    mask = (L >= cutoff * l_max) & (L > 0)
    if not mask.any():
        raise SpectrumError("no admissible pairs after the log-quotient cutoff")
    V = s[j_idx[mask]] - s[i_idx[mask]]
    ratios = V / L[mask]
    return float(ratios.min()), float(ratios.max()), int(mask.sum())


def bohl_exponents(system, rate: rates.GrowthRate, params: Params = DEFAULT,
                   component: int | None = None) -> BohlEstimate:
    """Extremal exponents for a scalar system or one diagonal component."""
    base = system.base if isinstance(system, WeightedSystem) else system
    _check_pairing(base, rate)
    if base.structure == FULL:
        raise SpectrumError("Bohl exponents need scalar or diagonal structure")
    if component is None:
        if base.components != 1:
            raise SpectrumError("pick a component of the diagonal system")
        component = 0
    windows = params.windows(base.time_domain)
    times, logs = evolution.component_log_grid(system, max(windows), params)
    r_full = rates.log_rate_values(rate, times)
    per_window = []
    pairs_used = 0
    for n in windows:
        sl = _window_slice(times, n)
        lo, hi, pairs_used = _pair_ratio_stats(r_full[sl], logs[component][sl],
                                               params.cutoff_fraction)
        per_window.append((float(n), lo, hi))
    return _finish_estimate(per_window, pairs_used, params)


def _check_pairing(system: LinearSystem, rate: rates.GrowthRate):
    if system.time_domain != rate.time_domain:
        raise SpectrumError(
            f"system is {system.time_domain}-time but the rate is {rate.time_domain}-time")


# ---------------------------------------------------------------------------
# Spectrum assembly


@dataclass(frozen=True)
class SpectralInterval:
    """Closed spectral interval over the extended reals; [-inf,-inf] and
    [+inf,+inf] encode the degenerate one-point sets at infinity."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise SpectrumError(f"interval endpoints out of order: {self.lo} > {self.hi}")


@dataclass(frozen=True)
class SpectralGap:
    lo: float
    hi: float
    rank: int | None
    pattern: tuple | None


@dataclass(frozen=True)
class SpectrumReport:
    rate_descriptor: dict
    system_descriptor: dict
    intervals: tuple
    gaps: tuple
    mode: str
    converged: bool
    windows: tuple
    component_estimates: tuple
    resolution: float
    params: Params

    def to_dict(self) -> dict:
        traces = []
        for comp, est in enumerate(self.component_estimates):
            for n, lo, hi in est.per_window:
                traces.append({
                    "window": n,
                    "component": comp,
                    "lambda_lower": _ext(lo),
                    "lambda_upper": _ext(hi),
                })
        gaps = []
        for g in self.gaps:
            entry = {"lo": _ext(g.lo), "hi": _ext(g.hi), "rank": g.rank}
            if g.pattern is not None:
                entry["pattern"] = list(g.pattern)
            gaps.append(entry)
        return {
            "intervals": [{"lo": _ext(iv.lo), "hi": _ext(iv.hi)} for iv in self.intervals],
            "gaps": gaps,
            "mode": self.mode,
            "converged": self.converged,
            "windows": [float(w) for w in self.windows],
            "resolution": self.resolution,
            "traces": traces,
            "rate": self.rate_descriptor,
            "system": self.system_descriptor,
            "params": {
                "tol_stab": self.params.tol_stab,
                "cutoff_fraction": self.params.cutoff_fraction,
                "gamma_max": self.params.gamma_max,
                "delta_merge": self.params.merge_tolerance,
            },
        }


def _ext(x: float):
    if x == INF:
        return "+inf"
    if x == -INF:
        return "-inf"
    return float(x)


def parse_ext(v) -> float:
    if v == "+inf" or v == "inf":
        return INF
    if v == "-inf":
        return -INF
    return float(v)


def _merge_intervals(raw: list[SpectralInterval], merge_tol: float) -> list[SpectralInterval]:
    merged: list[list[float]] = []
    for iv in sorted(raw, key=lambda iv: (iv.lo, iv.hi)):
        if merged:
            prev = merged[-1]
            gap = 0.0 if iv.lo <= prev[1] else iv.lo - prev[1]
            if gap < merge_tol:
                prev[1] = max(prev[1], iv.hi)
                continue
        merged.append([iv.lo, iv.hi])
    return [SpectralInterval(lo, hi) for lo, hi in merged]


def _gap_representative(lo: float, hi: float) -> float:
    if lo == -INF and hi == INF:
        return 0.0
    if lo == -INF:
        return hi - 1.0
    if hi == INF:
        return lo + 1.0
    return 0.5 * (lo + hi)


def _build_gaps(merged: list[SpectralInterval], component_intervals: list[SpectralInterval],
                with_ranks: bool) -> list[SpectralGap]:
    bounds: list[tuple[float, float]] = []
    if merged[0].lo > -INF:
        bounds.append((-INF, merged[0].lo))
    for left, right in zip(merged, merged[1:]):
        bounds.append((left.hi, right.lo))
    if merged[-1].hi < INF:
        bounds.append((merged[-1].hi, INF))
    gaps = []
    for lo, hi in bounds:
        if not with_ranks:
            gaps.append(SpectralGap(lo, hi, None, None))
            continue
        gamma = _gap_representative(lo, hi)
        pattern = tuple(1 if iv.hi < gamma else 0 for iv in component_intervals)
        gaps.append(SpectralGap(lo, hi, sum(pattern), pattern))
    return gaps


def compute_spectrum(system, rate: rates.GrowthRate, params: Params = DEFAULT) -> SpectrumReport:
    """Assemble the dichotomy spectrum report for a system under a rate.

    Scalar and diagonal systems get exact-structure spectra: per-component
    Bohl intervals, merged when closer than the merge tolerance, with
    projector ranks attached to the gaps (a gap's rank counts the components
    whose interval lies entirely to its left, which is the dimension of the
    decaying subspace for weights inside the gap).  Full systems get an
    outer enclosure from singular-value statistics, with no projector claims.
    """
    base = system.base if isinstance(system, WeightedSystem) else system
    _check_pairing(base, rate)
    if base.structure == FULL:
        estimates = [_enclosure_estimate(system, rate, params)]
        mode = "enclosure"
    else:
        estimates = _component_estimates(system, rate, params)
        mode = "exact"
    component_intervals = [SpectralInterval(est.lower, est.upper) for est in estimates]
    merged = _merge_intervals(component_intervals, params.merge_tolerance)
    gaps = _build_gaps(merged, component_intervals, with_ranks=(mode == "exact"))
    resolution = max(est.resolution for est in estimates)
    return SpectrumReport(
        rate_descriptor=rates.rate_to_descriptor(rate),
        system_descriptor=evolution.system_to_descriptor(base),
        intervals=tuple(merged),
        gaps=tuple(gaps),
        mode=mode,
        converged=all(est.converged for est in estimates),
        windows=tuple(float(w) for w in params.windows(base.time_domain)),
        component_estimates=tuple(estimates),
        resolution=resolution,
        params=params,
    )


def _component_estimates(system, rate, params: Params) -> list[BohlEstimate]:
    base = system.base if isinstance(system, WeightedSystem) else system
    windows = params.windows(base.time_domain)
    times, logs = evolution.component_log_grid(system, max(windows), params)
    r_full = rates.log_rate_values(rate, times)
    out = []
    for comp in range(base.components):
        per_window = []
        pairs_used = 0
        for n in windows:
            sl = _window_slice(times, n)
            lo, hi, pairs_used = _pair_ratio_stats(r_full[sl], logs[comp][sl],
                                                   params.cutoff_fraction)
            per_window.append((float(n), lo, hi))
        out.append(_finish_estimate(per_window, pairs_used, params))
    return out


def _enclosure_estimate(system, rate, params: Params) -> BohlEstimate:
    """Outer singular-value bounds over admissible pairs.

    Pair values are bounded submultiplicatively through time zero:

        log smax Phi(k, n) <= log smax Phi(k, 0) + log smax Phi(0, n)
        log smin Phi(k, n) >= -log smax Phi(0, k) - log smax Phi(n, 0)

    Only dominant singular values of factor-wise accumulated products enter,
    which stay accurate where a direct pair product would have lost its
    contracting directions to rounding; the inequalities make the resulting
    interval an enclosure of the exact spectrum by construction.
    """
    base = system.base if isinstance(system, WeightedSystem) else system
    windows = params.windows(base.time_domain)
    times, fwd, bwd = evolution.scaled_grids(system, max(windows), params)
    r_full = rates.log_rate_values(rate, times)
    log_fwd = np.array([evolution.operator_norm_bounds(m)[0] for m in fwd])
    log_bwd = np.array([evolution.operator_norm_bounds(m)[0] for m in bwd])
    per_window = []
    pairs_used = 0
    center = (len(times) - 1) // 2
    for n in windows:
        lo_idx, hi_idx = center - n, center + n
        r = r_full[lo_idx:hi_idx + 1]
        l_max = r[-1] - r[0]
        if l_max <= 0:
            raise SpectrumError("growth rate is flat on the window; no admissible pairs")
        i_idx, j_idx = np.triu_indices(hi_idx - lo_idx + 1, k=1)
        i_idx = i_idx + lo_idx
        j_idx = j_idx + lo_idx
        L = r_full[j_idx] - r_full[i_idx]
        keep = (L >= params.cutoff_fraction * l_max) & (L > 0)
        i_idx, j_idx, L = i_idx[keep], j_idx[keep], L[keep]
        if len(L) == 0:
            raise SpectrumError("no admissible pairs after the log-quotient cutoff")
        hi_bound = (log_fwd[j_idx] + log_bwd[i_idx]) / L
        lo_bound = (-log_bwd[j_idx] - log_fwd[i_idx]) / L
        per_window.append((float(n), float(np.min(lo_bound)), float(np.max(hi_bound))))
        pairs_used = len(L)
    return _finish_estimate(per_window, pairs_used, params)


# ---------------------------------------------------------------------------
# Dichotomy and bounded-growth verdicts


@dataclass(frozen=True)
class DichotomyVerdict:
    """holds is True/False when the report resolves the question, None when
    zero sits within the estimator's resolution of an interval endpoint."""

    holds: bool | None
    rank: int | None
    report: SpectrumReport


@dataclass(frozen=True)
class GrowthVerdict:
    status: str  # "holds" | "fails" | "inconclusive"
    bound: float | None
    report: SpectrumReport


def has_mu_dichotomy(system, rate: rates.GrowthRate,
                     params: Params = DEFAULT,
                     report: SpectrumReport | None = None) -> DichotomyVerdict:
    """Whether the unweighted system admits a dichotomy under the rate, i.e.
    whether zero lies in a spectral gap; returns that gap's projector rank."""
    rep = report if report is not None else compute_spectrum(system, rate, params)
    g = rep.resolution
    inside_deep = any(iv.lo + g <= 0.0 <= iv.hi - g for iv in rep.intervals)
    possible = any(iv.lo - g <= 0.0 <= iv.hi + g for iv in rep.intervals)
    if inside_deep:
        return DichotomyVerdict(False, None, rep)
    if possible:
        return DichotomyVerdict(None, None, rep)
    for gap in rep.gaps:
        if gap.lo < 0.0 < gap.hi:
            return DichotomyVerdict(True, gap.rank, rep)
    return DichotomyVerdict(None, None, rep)


def has_mu_growth(system, rate: rates.GrowthRate,
                  params: Params = DEFAULT,
                  report: SpectrumReport | None = None) -> GrowthVerdict:
    """Two-sided norm bound by a power of the rate quotient: holds when every
    extremal exponent is finite and stabilized, fails on divergence."""
    rep = report if report is not None else compute_spectrum(system, rate, params)
    ests = rep.component_estimates
    if any(e.diverged_lower or e.diverged_upper for e in ests):
        return GrowthVerdict("fails", None, rep)
    if all(e.stabilized_lower and e.stabilized_upper for e in ests):
        bound = max(max(abs(e.lower), abs(e.upper)) for e in ests) + params.tol_stab
        return GrowthVerdict("holds", bound, rep)
    return GrowthVerdict("inconclusive", None, rep)
