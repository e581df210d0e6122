"""Growth rates represented through their logarithm t -> log mu(t).

A growth rate is a non-decreasing positive function with mu(0) = 1,
mu(t) -> 0 as t -> -infinity and mu(t) -> +infinity as t -> +infinity.  All
arithmetic downstream happens on log mu: the cubic-exponential rate already
reaches e^729 at t = 9, far beyond double range.

Families:

* ``PowerExp(p, lam)``: log mu(t) = lam * sgn(t) * |t|^p.  Covers the
  exponential (p=1, lam=1), quadratic-exponential (p=2) and
  cubic-exponential (p=3) rates.
* ``Polynomial``: log mu(t) = sgn(t) * log(1+|t|) in continuous time and
  sgn(n) * log|n| (0 at n = 0) in discrete time.
* ``ExpressionRate``: log mu given by a parsed expression in one variable.
* ``Glued``: follows ``inner`` for |t| >= crossover and ``outer`` for
  |t| < crossover.  With inner = cubic-exponential, outer = polynomial and
  the crossover at the positive solution of t^3 = log(1+t), this is the
  standard example of a rate weakly equivalent to the cubic one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from . import exprparse
from .params import CONTINUOUS, DISCRETE


class RateError(ValueError):
    """Invalid growth-rate construction or evaluation."""


def _check_domain(domain: str):
    if domain not in (DISCRETE, CONTINUOUS):
        raise RateError(f"time_domain must be '{DISCRETE}' or '{CONTINUOUS}', got {domain!r}")


@dataclass(frozen=True)
class PowerExp:
    p: float
    lam: float = 1.0
    time_domain: str = DISCRETE

    def __post_init__(self):
        _check_domain(self.time_domain)
        if not (self.p > 0 and self.lam > 0):
            raise RateError("PowerExp needs a positive exponent and a positive scale")


@dataclass(frozen=True)
class Polynomial:
    time_domain: str = DISCRETE

    def __post_init__(self):
        _check_domain(self.time_domain)


@dataclass(frozen=True)
class ExpressionRate:
    log_rate: str
    time_domain: str = DISCRETE

    def __post_init__(self):
        _check_domain(self.time_domain)
        _rate_ast(self.log_rate)  # surface syntax errors at construction


@dataclass(frozen=True)
class Glued:
    inner: "GrowthRate"
    outer: "GrowthRate"
    crossover: float
    time_domain: str = CONTINUOUS

    def __post_init__(self):
        _check_domain(self.time_domain)
        if self.crossover <= 0:
            raise RateError("glued crossover must be positive")
        for part in (self.inner, self.outer):
            if part.time_domain != self.time_domain:
                raise RateError("glued rate components must share the time domain")


GrowthRate = Union[PowerExp, Polynomial, ExpressionRate, Glued]


@lru_cache(maxsize=256)
def _rate_ast(source: str) -> exprparse.Expr:
    return exprparse.parse(source)


def _require_time(rate: GrowthRate, t: float) -> float:
    if rate.time_domain == DISCRETE:
        r = round(t)
        if abs(t - r) > 1e-9:
            raise RateError(f"discrete rate evaluated at non-integer time {t!r}")
        return float(r)
    return float(t)


def log_rate(rate: GrowthRate, t: float) -> float:
    """log mu(t).  Exact formula per family; mu(0) = 1 forces log 0 at t=0."""
    t = _require_time(rate, t)
    if isinstance(rate, PowerExp):
        return rate.lam * _sgn(t) * abs(t) ** rate.p
    if isinstance(rate, Polynomial):
        if rate.time_domain == CONTINUOUS:
            return _sgn(t) * math.log1p(abs(t))
        if t == 0:
            return 0.0
        return _sgn(t) * math.log(abs(t))
    if isinstance(rate, ExpressionRate):
        return exprparse.evaluate(_rate_ast(rate.log_rate), t)
    if isinstance(rate, Glued):
        branch = rate.inner if abs(t) >= rate.crossover else rate.outer
        return log_rate(branch, t)
    raise TypeError(f"not a growth rate: {rate!r}")


def _sgn(x: float) -> float:
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


def log_rate_values(rate: GrowthRate, ts: np.ndarray) -> np.ndarray:
    """Vectorized log mu over a time grid."""
    ts = np.asarray(ts, dtype=float)
    if isinstance(rate, PowerExp):
        return rate.lam * np.sign(ts) * np.abs(ts) ** rate.p
    if isinstance(rate, Polynomial):
        if rate.time_domain == CONTINUOUS:
            return np.sign(ts) * np.log1p(np.abs(ts))
        out = np.zeros_like(ts)
        nz = ts != 0
        out[nz] = np.sign(ts[nz]) * np.log(np.abs(ts[nz]))
        return out
    if isinstance(rate, Glued):
        inner_vals = log_rate_values(rate.inner, ts)
        outer_vals = log_rate_values(rate.outer, ts)
        return np.where(np.abs(ts) >= rate.crossover, inner_vals, outer_vals)
    return np.array([log_rate(rate, t) for t in ts], dtype=float)


def log_rate_derivative(rate: GrowthRate, t: float) -> float:
    """d/dt log mu(t) for differentiable families (continuous time).

    Used to realize diagonal systems whose propagator is a rate quotient.
    """
    if rate.time_domain != CONTINUOUS:
        raise RateError("log-rate derivative is defined for continuous rates only")
    if isinstance(rate, PowerExp):
        if rate.p < 1 and t == 0:
            raise RateError("derivative is singular at 0 for exponents below 1")
        return rate.lam * rate.p * abs(t) ** (rate.p - 1.0)
    if isinstance(rate, Polynomial):
        return 1.0 / (1.0 + abs(t))
    if isinstance(rate, Glued):
        branch = rate.inner if abs(t) >= rate.crossover else rate.outer
        return log_rate_derivative(branch, t)
    raise RateError(f"no closed-form derivative for {type(rate).__name__}")


# ---------------------------------------------------------------------------
# Log-quotients


@dataclass(frozen=True)
class LogQuotient:
    """log(mu(to)/mu(from)); non-negative whenever to >= from."""

    value: float
    t_from: float
    t_to: float


def log_quotient(rate: GrowthRate, k: float, n: float) -> LogQuotient:
    return LogQuotient(log_rate(rate, k) - log_rate(rate, n), t_from=n, t_to=k)


# ---------------------------------------------------------------------------
# Sampled grids (shared by the estimators; cached, returned read-only)


@lru_cache(maxsize=128)
def sample_times(time_domain: str, window: int, samples_per_unit: int = 1) -> np.ndarray:
    if time_domain == DISCRETE:
        ts = np.arange(-window, window + 1, dtype=float)
    else:
        count = 2 * window * samples_per_unit
        ts = np.linspace(-window, window, count + 1)
    ts.flags.writeable = False
    return ts


@lru_cache(maxsize=512)
def log_rate_grid(rate: GrowthRate, window: int, samples_per_unit: int = 1) -> np.ndarray:
    ts = sample_times(rate.time_domain, window, samples_per_unit)
    vals = log_rate_values(rate, ts)
    vals.flags.writeable = False
    return vals


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class RateValidation:
    violations: tuple
    origin_log: float
    origin_ok: bool
    attained: tuple
    points_checked: int

    @property
    def ok(self) -> bool:
        return self.origin_ok and not self.violations


def validate_rate(rate: GrowthRate, window: float,
                  samples_per_unit: int = 10) -> RateValidation:
    """Sample log mu on [-window, window] and report monotonicity violations,
    the value at the origin, and the attained range.  Violations are data,
    not errors."""
    if window <= 0:
        raise RateError("validation window must be positive")
    if rate.time_domain == DISCRETE:
        ts = np.arange(-int(window), int(window) + 1, dtype=float)
    else:
        count = int(round(2 * window * samples_per_unit))
        ts = np.linspace(-window, window, count + 1)
    vals = log_rate_values(rate, ts)
    bad = []
    for i in range(len(ts) - 1):
        if vals[i + 1] < vals[i] - 1e-12:
            bad.append((float(ts[i]), float(ts[i + 1]), float(vals[i]), float(vals[i + 1])))
    origin = log_rate(rate, 0.0)
    return RateValidation(
        violations=tuple(bad),
        origin_log=origin,
        origin_ok=abs(origin) <= 1e-12,
        attained=(float(vals[0]), float(vals[-1])),
        points_checked=len(ts),
    )


# ---------------------------------------------------------------------------
# Crossover search for glued rates


def find_crossover(inner: GrowthRate, outer: GrowthRate, hi: float = 10.0,
                   tol: float = 1e-10) -> float:
    """Positive solution of log inner(t) = log outer(t) located by bisection
    on (0, hi]."""

    def f(t: float) -> float:
        return log_rate(inner, t) - log_rate(outer, t)

    grid = np.linspace(hi / 1000.0, hi, 1000)
    lo_t = None
    prev_t, prev_f = grid[0], f(grid[0])
    for t in grid[1:]:
        ft = f(t)
        if prev_f == 0.0:
            return float(prev_t)
        if prev_f * ft < 0:
            lo_t, hi_t = prev_t, t
            break
        prev_t, prev_f = t, ft
    else:
        raise RateError("no crossover sign change found on (0, hi]")
    flo = f(lo_t)
    while hi_t - lo_t > tol:
        mid = 0.5 * (lo_t + hi_t)
        fm = f(mid)
        if fm == 0.0:
            return float(mid)
        if flo * fm < 0:
            hi_t = mid
        else:
            lo_t, flo = mid, fm
    return float(0.5 * (lo_t + hi_t))


# ---------------------------------------------------------------------------
# Closed-form comparison profiles


@dataclass(frozen=True)
class RelationProfile:
    """Directed comparison verdicts for an ordered rate pair (a, b).

    faster_ab        a is faster than b (quotients of a dominate for every
                     pair of negative exponents)
    weakly_ab        a is weakly faster than b (same exponent both sides)
    almost_faster_ab a is almost faster than b (exponent on a may depend on
                     the exponent chosen for b)
    almost_slower_ab a is almost slower than b (dual quantifier order)
    """

    faster_ab: bool
    faster_ba: bool
    weakly_ab: bool
    weakly_ba: bool
    almost_faster_ab: bool
    almost_faster_ba: bool
    almost_slower_ab: bool
    almost_slower_ba: bool

    @property
    def weakly_equivalent(self) -> bool:
        return self.weakly_ab and self.weakly_ba

    @property
    def equivalent(self) -> bool:
        return (self.almost_faster_ab and self.almost_faster_ba
                and self.almost_slower_ab and self.almost_slower_ba)

    @property
    def below_ab(self) -> bool:
        """a precedes b in the order induced by the almost-comparisons."""
        return self.almost_slower_ab and self.almost_faster_ba

    @property
    def below_ba(self) -> bool:
        return self.almost_slower_ba and self.almost_faster_ab

    def directed(self) -> dict:
        return {
            "faster": (self.faster_ab, self.faster_ba),
            "weakly_faster": (self.weakly_ab, self.weakly_ba),
            "almost_faster": (self.almost_faster_ab, self.almost_faster_ba),
            "almost_slower": (self.almost_slower_ab, self.almost_slower_ba),
        }


def _strictly_faster_profile() -> RelationProfile:
    # a dominates b: used for PowerExp with the larger exponent, and for any
    # PowerExp against the polynomial rate.
    return RelationProfile(
        faster_ab=True, faster_ba=False,
        weakly_ab=True, weakly_ba=False,
        almost_faster_ab=True, almost_faster_ba=False,
        almost_slower_ab=False, almost_slower_ba=True,
    )


def _mirror(p: RelationProfile) -> RelationProfile:
    return RelationProfile(
        faster_ab=p.faster_ba, faster_ba=p.faster_ab,
        weakly_ab=p.weakly_ba, weakly_ba=p.weakly_ab,
        almost_faster_ab=p.almost_faster_ba, almost_faster_ba=p.almost_faster_ab,
        almost_slower_ab=p.almost_slower_ba, almost_slower_ba=p.almost_slower_ab,
    )


def symbolic_compare(a: GrowthRate, b: GrowthRate) -> RelationProfile | None:
    """Closed-form comparison profile for PowerExp/Polynomial pairs.

    Returns None for expression or glued rates, which are handled by the
    numeric checkers.
    """
    if not isinstance(a, (PowerExp, Polynomial)) or not isinstance(b, (PowerExp, Polynomial)):
        return None
    if isinstance(a, Polynomial) and isinstance(b, Polynomial):
        return RelationProfile(
            faster_ab=False, faster_ba=False,
            weakly_ab=True, weakly_ba=True,
            almost_faster_ab=True, almost_faster_ba=True,
            almost_slower_ab=True, almost_slower_ba=True,
        )
    if isinstance(a, PowerExp) and isinstance(b, Polynomial):
        return _strictly_faster_profile()
    if isinstance(a, Polynomial) and isinstance(b, PowerExp):
        return _mirror(_strictly_faster_profile())
    assert isinstance(a, PowerExp) and isinstance(b, PowerExp)
    if a.p > b.p:
        return _strictly_faster_profile()
    if a.p < b.p:
        return _mirror(_strictly_faster_profile())
    return RelationProfile(
        faster_ab=False, faster_ba=False,
        weakly_ab=a.lam >= b.lam, weakly_ba=b.lam >= a.lam,
        almost_faster_ab=True, almost_faster_ba=True,
        almost_slower_ab=True, almost_slower_ba=True,
    )


# ---------------------------------------------------------------------------
# Descriptors


def rate_to_descriptor(rate: GrowthRate, top_level: bool = True) -> dict:
    if isinstance(rate, PowerExp):
        d = {"kind": "power_exp", "p": rate.p, "lambda": rate.lam}
    elif isinstance(rate, Polynomial):
        d = {"kind": "polynomial"}
    elif isinstance(rate, ExpressionRate):
        d = {"kind": "expression", "log_rate": rate.log_rate}
    elif isinstance(rate, Glued):
        d = {
            "kind": "glued",
            "inner": rate_to_descriptor(rate.inner, top_level=False),
            "outer": rate_to_descriptor(rate.outer, top_level=False),
            "crossover": rate.crossover,
        }
    else:
        raise RateError(f"not a growth rate: {rate!r}")
    if top_level:
        d["time_domain"] = rate.time_domain
    return d


def rate_from_descriptor(desc: dict, time_domain: str | None = None,
                         path: str = "rate") -> GrowthRate:
    """Build a rate from its JSON descriptor.  Validation failures name the
    offending field path."""
    if not isinstance(desc, dict):
        raise RateError(f"{path}: expected an object, got {type(desc).__name__}")
    domain = desc.get("time_domain", time_domain)
    if domain is None:
        raise RateError(f"{path}.time_domain: missing (and no default supplied)")
    _check_domain(domain)
    kind = desc.get("kind")
    if kind == "power_exp":
        p = _num_field(desc, "p", path)
        lam = _num_field(desc, "lambda", path, default=1.0)
        return PowerExp(p=p, lam=lam, time_domain=domain)
    if kind == "polynomial":
        return Polynomial(time_domain=domain)
    if kind == "expression":
        src = desc.get("log_rate")
        if not isinstance(src, str) or not src:
            raise RateError(f"{path}.log_rate: expected a non-empty expression string")
        try:
            return ExpressionRate(log_rate=src, time_domain=domain)
        except exprparse.ParseError as exc:
            raise RateError(f"{path}.log_rate: {exc}") from exc
    if kind == "glued":
        inner = rate_from_descriptor(desc.get("inner"), domain, path=f"{path}.inner")
        outer = rate_from_descriptor(desc.get("outer"), domain, path=f"{path}.outer")
        crossover = desc.get("crossover")
        if crossover is None:
            crossover = find_crossover(inner, outer)
        elif not isinstance(crossover, (int, float)) or crossover <= 0:
            raise RateError(f"{path}.crossover: expected a positive number")
        return Glued(inner=inner, outer=outer, crossover=float(crossover),
                     time_domain=domain)
    raise RateError(
        f"{path}.kind: expected one of power_exp, polynomial, expression, glued; "
        f"got {kind!r}")


def _num_field(desc: dict, name: str, path: str, default: float | None = None) -> float:
    val = desc.get(name, default)
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise RateError(f"{path}.{name}: expected a number, got {val!r}")
    return float(val)
