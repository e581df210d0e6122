"""Numeric deciders for the growth-rate comparison relations.

Every check reduces to suprema of a separable functional over ordered time
pairs: for a grid function u, sup over s <= t of u(t) - u(s) is the largest
rise of u, computable with one running-minimum scan.  A verdict is "holds"
when the per-window suprema stabilize across the schedule (the final
supremum is the certificate constant), "fails" when they grow monotonically
window over window (the argmax pairs are the witness), and "inconclusive"
otherwise.

Quantifier structure is respected on finite grids:

* faster: for every exponent ratio eps in a fixed grid, the supremum of
  L_omega - eps * L_mu must be bounded (only the ratio of the two negative
  exponents matters).
* weakly faster: the single functional log mu - log omega must have bounded
  drawdown.
* almost faster / almost slower: the inequality couples two exponents; the
  outer one ranges over a fixed grid and the inner one is searched over a
  geometric grid, in the order the relation prescribes.

Verdicts are certified on the tested exponent grids; certificates re-check
against the definitions by direct evaluation on the final window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rates
from .params import DEFAULT, DISCRETE, Params


EPS_GRID = (1.0, 0.5, 0.25, 0.1, 0.05)
OUTER_EXPONENTS = (-0.05, -0.25, -1.0, -4.0)
INNER_LARGE = tuple(-(2.0 ** i) for i in range(-4, 13))
INNER_SMALL = tuple(-(2.0 ** i) for i in range(-12, 5))
PREFILTER_SLOPES = tuple(2.0 ** i for i in range(-12, 13))

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


class RelationError(ValueError):
    pass


@dataclass
class RelationVerdict:
    relation: str
    direction: str
    outcome: str
    certificate: dict | None = None
    witness: list | None = None
    diagnostics: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "relation": self.relation,
            "direction": self.direction,
            "outcome": self.outcome,
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.witness is not None:
            out["witness"] = self.witness
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        if self.grid:
            out["grid"] = self.grid
        return out


# ---------------------------------------------------------------------------
# Scan primitives


def _check_domains(mu, omega):
    if mu.time_domain != omega.time_domain:
        raise RelationError("rates must share a time domain")


def _grid(rate, window: int, params: Params) -> tuple[np.ndarray, np.ndarray]:
    per_unit = 1 if rate.time_domain == DISCRETE else params.samples_per_unit
    ts = rates.sample_times(rate.time_domain, window, per_unit)
    return ts, rates.log_rate_grid(rate, window, per_unit)


def _max_rise(u: np.ndarray) -> tuple[float, int, int]:
    """max over i <= j of u[j] - u[i], with the attaining indices."""
    run_min = np.minimum.accumulate(u)
    rises = u - run_min
    j = int(np.argmax(rises))
    i = int(np.argmin(u[: j + 1]))
    return float(rises[j]), i, j


def _max_fall(u: np.ndarray) -> tuple[float, int, int]:
    """max over i <= j of u[i] - u[j] (the drawdown), with indices."""
    val, i, j = _max_rise(-u)
    return val, i, j


def _sequence_outcome(sups: list[float], tol: float) -> str:
    if len(sups) >= 2 and abs(sups[-1] - sups[-2]) <= tol:
        return HOLDS
    diffs = [b - a for a, b in zip(sups, sups[1:])]
    if len(diffs) >= 3 and all(d >= tol for d in diffs[-3:]):
        return FAILS
    # growth that switches on late in the schedule still fails when the
    # increments accelerate (genuine divergence at least doubles the
    # increment as the window doubles; slow convergence does not)
    if (len(diffs) >= 2 and diffs[-1] >= max(5.0 * tol, 1.5 * diffs[-2])
            and diffs[-2] >= 0.0):
        return FAILS
    return INCONCLUSIVE


# ---------------------------------------------------------------------------
# faster (dominating comparison)


def check_faster(mu, omega, params: Params = DEFAULT,
                 formulation: str = "forward") -> RelationVerdict:
    """Decide whether mu is faster than omega.

    In log form the defining inequality reads
    |alpha~| L_omega(k, n) - |alpha| L_mu(k, n) <= log M for all k >= n, so
    only eps = |alpha| / |alpha~| matters; the check runs the eps grid and
    requires every supremum to stabilize.  The "backward" formulation scans
    the dual inequality over pairs k <= n with positive exponents, which must
    agree with the forward one.
    """
    _check_domains(mu, omega)
    windows = params.windows(mu.time_domain)
    envelope = {}
    diagnostics = {}
    fail_witness = None
    any_inconclusive = False
    for eps in EPS_GRID:
        sups, pairs = [], []
        for n in windows:
            ts, r_mu = _grid(mu, n, params)
            _, r_om = _grid(omega, n, params)
            if formulation == "forward":
                u = r_om - eps * r_mu
                val, i, j = _max_rise(u)
            elif formulation == "backward":
                w = eps * r_mu - r_om
                val, i, j = _max_fall(w)
            else:
                raise RelationError(f"unknown formulation {formulation!r}")
            sups.append(val)
            pairs.append({"n": float(ts[i]), "k": float(ts[j]), "value": val})
        outcome = _sequence_outcome(sups, params.tol_stab)
        diagnostics[f"eps={eps:g}"] = [float(s) for s in sups]
        if outcome == HOLDS:
            envelope[f"{eps:g}"] = float(sups[-1])
        elif outcome == FAILS and fail_witness is None:
            fail_witness = pairs
        else:
            any_inconclusive = any_inconclusive or outcome == INCONCLUSIVE
    grid = {"epsilon": list(EPS_GRID), "windows": [float(w) for w in windows]}
    if fail_witness is not None:
        return RelationVerdict("faster", "mu_over_omega", FAILS,
                               witness=fail_witness, diagnostics=diagnostics, grid=grid)
    if len(envelope) == len(EPS_GRID):
        return RelationVerdict("faster", "mu_over_omega", HOLDS,
                               certificate={"sup_envelope": envelope},
                               diagnostics=diagnostics, grid=grid)
    return RelationVerdict("faster", "mu_over_omega", INCONCLUSIVE,
                           diagnostics=diagnostics, grid=grid)


# ---------------------------------------------------------------------------
# weakly faster (same exponent on both sides)


def check_weakly_faster(mu, omega, params: Params = DEFAULT) -> RelationVerdict:
    """Decide whether mu is weakly faster than omega: the drawdown of
    h = log mu - log omega must be bounded; the certificate is
    log M = final maximal drawdown (equivalently m = exp(-log M) bounds the
    quotient ratio from below)."""
    _check_domains(mu, omega)
    windows = params.windows(mu.time_domain)
    sups, pairs = [], []
    for n in windows:
        ts, r_mu = _grid(mu, n, params)
        _, r_om = _grid(omega, n, params)
        h = r_mu - r_om
        val, i, j = _max_fall(h)
        sups.append(val)
        pairs.append({"n": float(ts[i]), "k": float(ts[j]), "value": val})
    outcome = _sequence_outcome(sups, params.tol_stab)
    grid = {"windows": [float(w) for w in windows]}
    diagnostics = {"drawdown": [float(s) for s in sups]}
    if outcome == HOLDS:
        return RelationVerdict("weakly_faster", "mu_over_omega", HOLDS,
                               certificate={"log_M": float(sups[-1])},
                               diagnostics=diagnostics, grid=grid)
    if outcome == FAILS:
        return RelationVerdict("weakly_faster", "mu_over_omega", FAILS,
                               witness=pairs, diagnostics=diagnostics, grid=grid)
    return RelationVerdict("weakly_faster", "mu_over_omega", INCONCLUSIVE,
                           diagnostics=diagnostics, grid=grid)


# ---------------------------------------------------------------------------
# almost faster / almost slower


def _bounded_outcome(mu, omega, coef_mu: float, coef_omega: float,
                     params: Params) -> tuple[str, float, list]:
    """Outcome for sup over k >= n of coef_omega*L_omega - coef_mu*L_mu."""
    windows = params.windows(mu.time_domain)
    sups, pairs = [], []
    for n in windows:
        ts, r_mu = _grid(mu, n, params)
        _, r_om = _grid(omega, n, params)
        u = coef_omega * r_om - coef_mu * r_mu
        val, i, j = _max_rise(u)
        sups.append(val)
        pairs.append({"n": float(ts[i]), "k": float(ts[j]), "value": val})
    return _sequence_outcome(sups, params.tol_stab), float(sups[-1]), pairs


_triu_cache: dict = {}


def _triu(n: int):
    if n not in _triu_cache:
        _triu_cache[n] = np.triu_indices(n, k=1)
    return _triu_cache[n]


def _ratio_necessity(mu, omega, params: Params) -> tuple[str, list, list]:
    """Necessary condition for both almost-comparisons of (mu, omega): the
    quotient L_omega / L_mu must stay bounded over pairs whose mu-distance is
    a fixed fraction of the window maximum.  (Either relation with the outer
    exponent at -1 produces an affine bound L_omega <= c L_mu + C, hence a
    bounded ratio on long pairs.)  An accelerating ratio supremum therefore
    refutes the relation outright; a supremum that stops increasing
    certifies the condition.  Sequences are not monotone because the cutoff
    tightens with the window, so a decreasing tail counts as bounded.
    """
    windows = params.windows(mu.time_domain)
    sups, argmax_pairs = [], []
    for n in windows:
        ts, r_mu = _grid(mu, n, params)
        _, r_om = _grid(omega, n, params)
        l_max = r_mu[-1] - r_mu[0]
        if l_max <= 0:
            raise RelationError("mu is flat on the window; no admissible pairs")
        ii, jj = _triu(len(ts))
        l_mu = r_mu[jj] - r_mu[ii]
        keep = l_mu >= params.cutoff_fraction * l_max
        ratios = (r_om[jj[keep]] - r_om[ii[keep]]) / l_mu[keep]
        top = int(np.argmax(ratios))
        sups.append(float(ratios[top]))
        argmax_pairs.append({"n": float(ts[ii[keep][top]]),
                             "k": float(ts[jj[keep][top]]),
                             "value": float(ratios[top])})
    diffs = [b - a for a, b in zip(sups, sups[1:])]
    if _sequence_outcome(sups, params.tol_stab) == FAILS:
        return FAILS, sups, argmax_pairs
    if diffs and diffs[-1] <= params.tol_stab:
        return HOLDS, sups, argmax_pairs
    return INCONCLUSIVE, sups, argmax_pairs


def _affine_prefilter(mu, omega, params: Params) -> str:
    """Conjectured reformulation used only as a pre-filter: does some slope c
    give L_omega <= c * L_mu + C on all pairs?"""
    saw_inconclusive = False
    for c in PREFILTER_SLOPES:
        outcome, _, _ = _bounded_outcome(mu, omega, c, 1.0, params)
        if outcome == HOLDS:
            return HOLDS
        if outcome == INCONCLUSIVE:
            saw_inconclusive = True
    return INCONCLUSIVE if saw_inconclusive else FAILS


def check_almost(mu, omega, direction: str, params: Params = DEFAULT) -> RelationVerdict:
    """Quantifier-faithful grid check of the almost-comparisons.

    direction "faster" decides mu almost-faster-than omega: for every outer
    exponent alpha~ < 0 on omega, some inner exponent alpha on mu must bound
    the supremum.  direction "slower" decides omega almost-slower-than mu:
    the outer exponent sits on mu and the inner one is searched on omega.
    Both run the same inequality; only the order of choice differs.

    A certificate found on finite windows is accepted only when the
    necessary ratio condition is also certified (otherwise an oversized
    inner exponent could push the defect beyond the window); an accelerating
    ratio refutes the relation outright.  The affine pre-filter is
    cross-checked; a decisive disagreement is reported as inconclusive.
    """
    _check_domains(mu, omega)
    if direction not in ("faster", "slower"):
        raise RelationError("direction must be 'faster' or 'slower'")
    relation = "almost_faster" if direction == "faster" else "almost_slower"
    direction_label = "mu_over_omega" if direction == "faster" else "omega_under_mu"
    grid = {
        "outer": list(OUTER_EXPONENTS),
        "inner": list(INNER_LARGE if direction == "faster" else INNER_SMALL),
    }
    necessity, ratio_sups, ratio_pairs = _ratio_necessity(mu, omega, params)
    diagnostics = {"ratio_sups": [float(s) for s in ratio_sups]}
    if necessity == FAILS:
        diagnostics["refuted_by"] = "unbounded log-quotient ratio"
        return RelationVerdict(relation, direction_label, FAILS,
                               witness=ratio_pairs, diagnostics=diagnostics, grid=grid)
    chosen = {}
    overall = HOLDS
    witness = None
    for outer in OUTER_EXPONENTS:
        inner_grid = INNER_LARGE if direction == "faster" else INNER_SMALL
        found = None
        all_failed = True
        best_attempt = None
        for inner in inner_grid:
            if direction == "faster":
                coef_mu, coef_omega = -inner, -outer
            else:
                coef_mu, coef_omega = -outer, -inner
            outcome, sup, pairs = _bounded_outcome(mu, omega, coef_mu, coef_omega, params)
            if outcome == HOLDS:
                found = (inner, sup)
                all_failed = False
                break
            if outcome == INCONCLUSIVE:
                all_failed = False
            best_attempt = pairs
        key = f"outer={outer:g}"
        if found is not None:
            chosen[key] = {"inner": found[0], "sup": found[1]}
            diagnostics[key] = "bounded"
        elif all_failed:
            overall = FAILS
            witness = best_attempt
            diagnostics[key] = "unbounded for every inner exponent"
            break
        else:
            overall = INCONCLUSIVE
            diagnostics[key] = "not resolved on the inner grid"
    prefilter = _affine_prefilter(mu, omega, params)
    diagnostics["prefilter"] = prefilter
    if overall == HOLDS and necessity == HOLDS and prefilter != FAILS:
        return RelationVerdict(relation, direction_label, HOLDS,
                               certificate={"witness_exponents": chosen},
                               diagnostics=diagnostics, grid=grid)
    if overall == FAILS and prefilter != HOLDS:
        return RelationVerdict(relation, direction_label, FAILS,
                               witness=witness, diagnostics=diagnostics, grid=grid)
    return RelationVerdict(relation, direction_label, INCONCLUSIVE,
                           diagnostics=diagnostics, grid=grid)


# ---------------------------------------------------------------------------
# Pair classification and the chain order


_DIRECTED_KEYS = (
    "faster_ab", "faster_ba",
    "weakly_ab", "weakly_ba",
    "almost_faster_ab", "almost_faster_ba",
    "almost_slower_ab", "almost_slower_ba",
)


@dataclass
class PairClassification:
    checks: dict
    weakly_equivalent: str
    equivalent: str
    below_ab: str
    below_ba: str
    symbolic: rates.RelationProfile | None
    conflicts: list

    def outcome(self, key: str) -> str:
        return self.checks[key].outcome

    def to_dict(self) -> dict:
        return {
            "checks": {k: v.to_dict() for k, v in self.checks.items()},
            "weakly_equivalent": self.weakly_equivalent,
            "equivalent": self.equivalent,
            "below_ab": self.below_ab,
            "below_ba": self.below_ba,
            "symbolic_conflicts": list(self.conflicts),
        }


def _combine(outcomes) -> str:
    outcomes = list(outcomes)
    if any(o == FAILS for o in outcomes):
        return FAILS
    if all(o == HOLDS for o in outcomes):
        return HOLDS
    return INCONCLUSIVE


def classify_pair(a, b, params: Params = DEFAULT,
                  use_symbolic: bool = True) -> PairClassification:
    """Run every directed comparison between a and b, cross-check against
    the closed-form table for power-exponential and polynomial rates, and
    derive the equivalences and the induced order.

    almost_faster_ab means a almost-faster-than b; almost_slower_ab means a
    almost-slower-than b (the dual quantifier order, not the converse
    relation).  below_ab is the order: a almost-slower-than b and b
    almost-faster-than a.
    """
    checks = {
        "faster_ab": check_faster(a, b, params),
        "faster_ba": check_faster(b, a, params),
        "weakly_ab": check_weakly_faster(a, b, params),
        "weakly_ba": check_weakly_faster(b, a, params),
        "almost_faster_ab": check_almost(a, b, "faster", params),
        "almost_faster_ba": check_almost(b, a, "faster", params),
        "almost_slower_ab": check_almost(b, a, "slower", params),
        "almost_slower_ba": check_almost(a, b, "slower", params),
    }
    symbolic = rates.symbolic_compare(a, b) if use_symbolic else None
    conflicts: list[str] = []
    if symbolic is not None:
        expected = {
            "faster_ab": symbolic.faster_ab,
            "faster_ba": symbolic.faster_ba,
            "weakly_ab": symbolic.weakly_ab,
            "weakly_ba": symbolic.weakly_ba,
            "almost_faster_ab": symbolic.almost_faster_ab,
            "almost_faster_ba": symbolic.almost_faster_ba,
            "almost_slower_ab": symbolic.almost_slower_ab,
            "almost_slower_ba": symbolic.almost_slower_ba,
        }
        for key, sym in expected.items():
            verdict = checks[key]
            if verdict.outcome == INCONCLUSIVE:
                verdict.outcome = HOLDS if sym else FAILS
                verdict.diagnostics["source"] = "symbolic"
            elif (verdict.outcome == HOLDS) != sym:
                conflicts.append(key)
                verdict.diagnostics["symbolic"] = sym
                verdict.diagnostics["numeric"] = verdict.outcome
                verdict.outcome = INCONCLUSIVE
    weakly_eq = _combine((checks["weakly_ab"].outcome, checks["weakly_ba"].outcome))
    equivalent = _combine(checks[k].outcome for k in (
        "almost_faster_ab", "almost_faster_ba", "almost_slower_ab", "almost_slower_ba"))
    below_ab = _combine((checks["almost_slower_ab"].outcome,
                         checks["almost_faster_ba"].outcome))
    below_ba = _combine((checks["almost_slower_ba"].outcome,
                         checks["almost_faster_ab"].outcome))
    return PairClassification(checks, weakly_eq, equivalent, below_ab, below_ba,
                              symbolic, conflicts)


@dataclass
class ChainLink:
    index: int
    outcome: str
    slower_verdict: RelationVerdict
    faster_verdict: RelationVerdict


@dataclass
class ChainReport:
    outcome: str
    links: list
    first_failure: int | None

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "links": [
                {
                    "index": l.index,
                    "outcome": l.outcome,
                    "almost_slower": l.slower_verdict.to_dict(),
                    "almost_faster": l.faster_verdict.to_dict(),
                }
                for l in self.links
            ],
            "first_failure": self.first_failure,
        }


def chain_check(rate_list, params: Params = DEFAULT) -> ChainReport:
    """Verify that consecutive rates are ordered: each a precedes b exactly
    when a is almost slower than b and b is almost faster than a."""
    rate_list = list(rate_list)
    if len(rate_list) < 2:
        raise RelationError("a chain needs at least two rates")
    links = []
    first_failure = None
    for idx, (a, b) in enumerate(zip(rate_list, rate_list[1:])):
        slower = check_almost(b, a, "slower", params)   # a almost-slower-than b
        faster = check_almost(b, a, "faster", params)   # b almost-faster-than a
        outcome = _combine((slower.outcome, faster.outcome))
        links.append(ChainLink(idx, outcome, slower, faster))
        if outcome == FAILS and first_failure is None:
            first_failure = idx
    overall = _combine(l.outcome for l in links)
    return ChainReport(overall, links, first_failure)
