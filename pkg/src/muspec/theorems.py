"""Executable verification of the spectral comparison theorems.

Each verifier checks its hypotheses numerically before touching the
conclusion: a hypothesis that fails or stays inconclusive yields a skipped
report, never an assumed one.  Conclusions compare spectral endpoints at the
shared stabilization tolerance widened by the estimator's own measured
resolution; a conclusion that misses the target while the underlying
estimate has not converged is reported as skipped ("conclusion-unresolved")
rather than as a failure, so a failure always means confident
counterevidence.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import catalog, evolution, rates, relations, spectrum
from .params import CONTINUOUS, DEFAULT, DISCRETE, Params
from .relations import FAILS, HOLDS, INCONCLUSIVE
from .spectrum import SpectrumReport, compute_spectrum, has_mu_dichotomy, has_mu_growth


INF = math.inf


@dataclass(frozen=True, eq=False)
class Fixture:
    """A named system plus optional oracle data: a closed-form per-component
    log-propagator and the expected spectra for catalog rates."""

    name: str
    system: evolution.LinearSystem
    closed_form: object | None = None          # callable(component, to, frm) -> float
    expected: dict = field(default_factory=dict)  # rate name -> tuple of (lo, hi)


def _sgn(x: float) -> float:
    return 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)


def catalog_fixtures() -> list[Fixture]:
    def abs2t_cf(_c, t, s):
        return _sgn(t) * t * t - _sgn(s) * s * s

    def inv1pt_cf(_c, t, s):
        return _sgn(t) * math.log1p(abs(t)) - _sgn(s) * math.log1p(abs(s))

    def sq3t2_cf(_c, t, s):
        return t ** 3 - s ** 3

    def frak_a_cf(_c, k, n):
        return -(k ** 3 - n ** 3)

    def disc_q_cf(_c, k, n):
        return _sgn(k) * k * k - _sgn(n) * n * n

    def identity_cf(_c, k, n):
        return 0.0

    return [
        Fixture("abs2t", catalog.system("abs2t"), abs2t_cf,
                {"p": ((INF, INF),), "exp": ((INF, INF),),
                 "q": ((1.0, 1.0),), "c": ((0.0, 0.0),)}),
        Fixture("inv1pt", catalog.system("inv1pt"), inv1pt_cf,
                {"p": ((1.0, 1.0),), "q": ((0.0, 0.0),), "c": ((0.0, 0.0),)}),
        Fixture("sq3t2", catalog.system("sq3t2"), sq3t2_cf,
                {"p": ((INF, INF),), "exp": ((INF, INF),),
                 "q": ((INF, INF),), "c": ((1.0, 1.0),)}),
        Fixture("frak_a", catalog.system("frak_a"), frak_a_cf,
                {"p": ((-INF, -INF),), "exp": ((-INF, -INF),),
                 "q": ((-INF, -INF),), "c": ((-1.0, -1.0),)}),
        Fixture("disc_q", catalog.system("disc_q"), disc_q_cf,
                {"p": ((INF, INF),), "exp": ((INF, INF),),
                 "q": ((1.0, 1.0),), "c": ((0.0, 0.0),)}),
        Fixture("identity", catalog.system("identity"), identity_cf,
                {"p": ((0.0, 0.0),), "exp": ((0.0, 0.0),),
                 "q": ((0.0, 0.0),), "c": ((0.0, 0.0),)}),
    ]


def generate_quotient_system(nu: rates.GrowthRate, slopes, name: str | None = None) -> Fixture:
    """Diagonal fixture whose component propagators are rate quotients raised
    to the given slopes; the expected spectrum under nu is the set of slopes."""
    slopes = tuple(float(s) for s in slopes)
    system = evolution.quotient_system(nu, slopes)
    if name is None:
        kind = rates.rate_to_descriptor(nu, top_level=False)["kind"]
        name = f"quotient_{kind}_{'_'.join(f'{s:g}' for s in slopes)}"

    def closed_form(component, to, frm):
        return slopes[component] * (rates.log_rate(nu, to) - rates.log_rate(nu, frm))

    expected = {"nu": tuple((s, s) for s in sorted(set(slopes)))}
    return Fixture(name, system, closed_form, expected)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class TheoremReport:
    theorem: str
    fixture: str
    rates: dict
    hypotheses: list
    conclusion: dict | None
    status: str  # "pass" | "fail" | "skipped"
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "fixture": self.fixture,
            "rates": dict(self.rates),
            "status": self.status,
            "details": {
                "hypotheses": list(self.hypotheses),
                "conclusion": self.conclusion,
                "reason": self.reason,
            },
        }


def _hyp(name: str, status: str, detail: str = "") -> dict:
    return {"name": name, "status": status, "detail": detail}


def _verdict_status(v) -> str:
    if isinstance(v, relations.RelationVerdict):
        return v.outcome
    if isinstance(v, spectrum.DichotomyVerdict):
        if v.holds is True:
            return HOLDS
        if v.holds is False:
            return FAILS
        return INCONCLUSIVE
    if isinstance(v, spectrum.GrowthVerdict):
        return v.status
    raise TypeError(f"no status for {v!r}")


def _assemble(theorem, fixture, rate_names, hypotheses, conclude) -> TheoremReport:
    bad = [h for h in hypotheses if h["status"] != HOLDS]
    if bad:
        return TheoremReport(theorem, fixture, rate_names, hypotheses, None,
                             "skipped", f"hypothesis-not-met: {bad[0]['name']}")
    ok, resolved, detail = conclude()
    conclusion = {"ok": ok, "resolved": resolved, "detail": detail}
    if ok:
        return TheoremReport(theorem, fixture, rate_names, hypotheses, conclusion, "pass")
    if resolved:
        return TheoremReport(theorem, fixture, rate_names, hypotheses, conclusion, "fail",
                             detail)
    return TheoremReport(theorem, fixture, rate_names, hypotheses, conclusion,
                         "skipped", "conclusion-unresolved: " + detail)


# ---------------------------------------------------------------------------
# Spectral comparisons with resolution-aware tolerances


def _fmt_interval(iv) -> str:
    return f"[{iv.lo:g}, {iv.hi:g}]"


def _point_check(rep: SpectrumReport, target: float, tol: float):
    tol_eff = tol + rep.resolution
    ok = (len(rep.intervals) == 1
          and math.isfinite(rep.intervals[0].lo)
          and abs(rep.intervals[0].lo - target) <= tol_eff
          and abs(rep.intervals[0].hi - target) <= tol_eff)
    detail = (f"spectrum {'+'.join(_fmt_interval(iv) for iv in rep.intervals)} "
              f"vs point {target:g} (tolerance {tol_eff:.4g})")
    return ok, ok or rep.converged, detail


def _infinite_set_check(rep: SpectrumReport):
    degenerate = all(iv.lo == iv.hi and not math.isfinite(iv.lo) for iv in rep.intervals)
    detail = "spectrum " + "+".join(_fmt_interval(iv) for iv in rep.intervals)
    return degenerate, degenerate or rep.converged, detail


def _inclusion_check(rep: SpectrumReport, lo: float, hi: float, tol: float,
                     side: str | None = None):
    tol_eff = tol + rep.resolution
    ok = True
    for iv in rep.intervals:
        if side == "+" and iv.hi <= 0.0:
            continue
        if side == "-" and iv.lo >= 0.0:
            continue
        if side != "+" and iv.lo < lo - tol_eff:
            ok = False
        if side != "-" and iv.hi > hi + tol_eff:
            ok = False
    label = {"+": "positive part of ", "-": "negative part of ", None: ""}[side]
    detail = (f"{label}spectrum {'+'.join(_fmt_interval(iv) for iv in rep.intervals)} "
              f"vs [{lo:g}, {hi:g}] (tolerance {tol_eff:.4g})")
    return ok, ok or rep.converged, detail


# ---------------------------------------------------------------------------
# Theorem verifiers


def verify_805(system, mu, omega, params: Params = DEFAULT, fixture: str = "?",
               cache: dict | None = None) -> TheoremReport:
    """Faster rate with a dichotomy: the spectrum under the slower rate must
    collapse to {+inf}, {-inf} or {+-inf}."""
    names = {"mu": _rate_label(mu), "omega": _rate_label(omega)}
    h1 = relations.check_faster(mu, omega, params)
    dich = has_mu_dichotomy(system, mu, params, report=_spec(cache, fixture, system, mu, params))
    hyps = [
        _hyp("mu_faster_than_omega", h1.outcome),
        _hyp("system_has_mu_dichotomy", _verdict_status(dich)),
    ]

    def conclude():
        rep = _spec(cache, fixture, system, omega, params)
        return _infinite_set_check(rep)

    return _assemble("805", fixture, names, hyps, conclude)


def verify_806(system, omega, mu, params: Params = DEFAULT, fixture: str = "?",
               cache: dict | None = None) -> TheoremReport:
    """Bounded growth under omega plus a faster rate mu: the mu-spectrum must
    be the single point {0}."""
    names = {"omega": _rate_label(omega), "mu": _rate_label(mu)}
    growth = has_mu_growth(system, omega, params,
                           report=_spec(cache, fixture, system, omega, params))
    h2 = relations.check_faster(mu, omega, params)
    hyps = [
        _hyp("system_has_omega_growth", _verdict_status(growth)),
        _hyp("mu_faster_than_omega", h2.outcome),
    ]

    def conclude():
        rep = _spec(cache, fixture, system, mu, params)
        return _point_check(rep, 0.0, params.tol_stab)

    return _assemble("806", fixture, names, hyps, conclude)


def verify_808_809(system, mu, omega, a: float | None = None, b: float | None = None,
                   variant: str = "808i", params: Params = DEFAULT, fixture: str = "?",
                   cache: dict | None = None) -> TheoremReport:
    """Spectral inclusion transport along the weak comparison.

    808i/808ii move an inclusion from the weakly-faster rate mu to omega on
    one side of the axis; 809i/809ii/809iii move inclusions around zero from
    omega to mu.  An infinite bound leaves nothing to prove and is skipped.
    """
    theorem = variant
    names = {"mu": _rate_label(mu), "omega": _rate_label(omega)}
    h1 = relations.check_weakly_faster(mu, omega, params)
    hyps = [_hyp("mu_weakly_faster_than_omega", h1.outcome)]
    tol = params.tol_stab

    if variant in ("808i", "808ii"):
        if a is None or a <= 0:
            raise ValueError("808 needs a positive bound a")
        rep_mu = _spec(cache, fixture, system, mu, params)
        if variant == "808i":
            ok, resolved, detail = _inclusion_check(rep_mu, -INF, -a, tol)
        else:
            ok, resolved, detail = _inclusion_check(rep_mu, a, INF, tol)
        hyps.append(_hyp("mu_spectrum_inclusion",
                         HOLDS if ok else (FAILS if resolved else INCONCLUSIVE), detail))

        def conclude():
            rep = _spec(cache, fixture, system, omega, params)
            if variant == "808i":
                return _inclusion_check(rep, -INF, -a, tol)
            return _inclusion_check(rep, a, INF, tol)

        return _assemble(theorem, fixture, names, hyps, conclude)

    if variant not in ("809i", "809ii", "809iii"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant in ("809i", "809iii") and (b is None or b < 0):
        raise ValueError("809i/809iii need a bound b >= 0")
    if variant in ("809ii", "809iii") and (a is None or a > 0):
        raise ValueError("809ii/809iii need a bound a <= 0")
    if (variant == "809i" and b == INF) or (variant == "809ii" and a == -INF) \
            or (variant == "809iii" and (b == INF or a == -INF)):
        return TheoremReport(theorem, fixture, names, hyps, None, "skipped",
                             "infinite bound: nothing to prove")
    rep_omega = _spec(cache, fixture, system, omega, params)
    if variant == "809i":
        ok, resolved, detail = _inclusion_check(rep_omega, 0.0, b, tol, side="+")
    elif variant == "809ii":
        ok, resolved, detail = _inclusion_check(rep_omega, a, 0.0, tol, side="-")
    else:
        ok, resolved, detail = _inclusion_check(rep_omega, a, b, tol)
    hyps.append(_hyp("omega_spectrum_inclusion",
                     HOLDS if ok else (FAILS if resolved else INCONCLUSIVE), detail))

    def conclude():
        rep = _spec(cache, fixture, system, mu, params)
        if variant == "809i":
            return _inclusion_check(rep, 0.0, b, tol, side="+")
        if variant == "809ii":
            return _inclusion_check(rep, a, 0.0, tol, side="-")
        return _inclusion_check(rep, a, b, tol)

    return _assemble(theorem, fixture, names, hyps, conclude)


def verify_811(system, chain, params: Params = DEFAULT, fixture: str = "?",
               rate_names=None, cache: dict | None = None) -> TheoremReport:
    """Along an ordered chain of rates, at most one admits simultaneously a
    confirmed dichotomy and confirmed bounded growth."""
    chain = list(chain)
    if rate_names is None:
        rate_names = [_rate_label(r) for r in chain]
    names = {"chain": ",".join(rate_names)}
    order = relations.chain_check(chain, params)
    hyps = [_hyp("chain_is_ordered", order.outcome,
                 "" if order.first_failure is None else f"link {order.first_failure} fails")]

    def conclude():
        strong = []
        for label, r in zip(rate_names, chain):
            rep = _spec(cache, fixture, system, r, params)
            growth = has_mu_growth(system, r, params, report=rep)
            dich = has_mu_dichotomy(system, r, params, report=rep)
            if growth.status == HOLDS and dich.holds is True:
                strong.append(label)
        ok = len(strong) <= 1
        detail = "strong rate: " + (", ".join(strong) if strong else "none")
        return ok, True, detail

    return _assemble("811", fixture, names, hyps, conclude)


def _gap_semiaxis(gap, tol: float) -> str:
    if gap.lo >= -tol:
        return "positive"
    if gap.hi <= tol:
        return "negative"
    return "straddles"


def verify_908(system, mu, omega, params: Params = DEFAULT, fixture: str = "?",
               cache: dict | None = None) -> TheoremReport:
    """Equivalent rates classify spectra: weak equivalence forces equal
    spectra, plain equivalence forces the same gap structure (membership of
    +-inf, gap count, ordered correspondence, projector ranks, semiaxis)."""
    names = {"mu": _rate_label(mu), "omega": _rate_label(omega)}
    cls = relations.classify_pair(mu, omega, params)
    weak = cls.weakly_equivalent
    equiv = cls.equivalent
    if weak == HOLDS:
        hyps = [_hyp("rates_weakly_equivalent", HOLDS)]

        def conclude():
            rep_mu = _spec(cache, fixture, system, mu, params)
            rep_om = _spec(cache, fixture, system, omega, params)
            tol_eff = params.tol_stab + rep_mu.resolution + rep_om.resolution
            ok = len(rep_mu.intervals) == len(rep_om.intervals)
            if ok:
                for u, v in zip(rep_mu.intervals, rep_om.intervals):
                    if not _ends_match(u.lo, v.lo, tol_eff) or not _ends_match(u.hi, v.hi, tol_eff):
                        ok = False
            detail = (f"mu spectrum {'+'.join(_fmt_interval(iv) for iv in rep_mu.intervals)}"
                      f" vs omega spectrum "
                      f"{'+'.join(_fmt_interval(iv) for iv in rep_om.intervals)}")
            resolved = ok or (rep_mu.converged and rep_om.converged)
            return ok, resolved, detail

        return _assemble("908i", fixture, names, hyps, conclude)
    if equiv == HOLDS:
        hyps = [_hyp("rates_equivalent", HOLDS)]

        def conclude():
            rep_mu = _spec(cache, fixture, system, mu, params)
            rep_om = _spec(cache, fixture, system, omega, params)
            problems = []
            mu_plus = any(iv.hi == INF for iv in rep_mu.intervals)
            om_plus = any(iv.hi == INF for iv in rep_om.intervals)
            mu_minus = any(iv.lo == -INF for iv in rep_mu.intervals)
            om_minus = any(iv.lo == -INF for iv in rep_om.intervals)
            if mu_plus != om_plus or mu_minus != om_minus:
                problems.append("infinite membership differs")
            if len(rep_mu.gaps) != len(rep_om.gaps):
                problems.append("gap counts differ")
            else:
                for i, (g, h) in enumerate(zip(rep_mu.gaps, rep_om.gaps)):
                    if g.rank != h.rank:
                        problems.append(f"gap {i} ranks differ ({g.rank} vs {h.rank})")
                    tol = params.tol_stab + rep_mu.resolution + rep_om.resolution
                    if _gap_semiaxis(g, tol) != _gap_semiaxis(h, tol):
                        problems.append(f"gap {i} semiaxes differ")
            ok = not problems
            detail = "; ".join(problems) if problems else (
                f"{len(rep_mu.gaps)} corresponding gaps, ranks "
                f"{[g.rank for g in rep_mu.gaps]}")
            resolved = ok or (rep_mu.converged and rep_om.converged)
            return ok, resolved, detail

        return _assemble("908ii", fixture, names, hyps, conclude)
    status = FAILS if (weak == FAILS and equiv == FAILS) else INCONCLUSIVE
    hyps = [_hyp("rates_weakly_equivalent_or_equivalent", status)]
    return _assemble("908", fixture, names, hyps, lambda: (False, True, ""))


def _ends_match(x: float, y: float, tol: float) -> bool:
    if math.isinf(x) or math.isinf(y):
        return x == y
    return abs(x - y) <= tol


# ---------------------------------------------------------------------------
# Harness


def _rate_label(rate_obj) -> str:
    if isinstance(rate_obj, rates.Polynomial):
        return "p"
    if isinstance(rate_obj, rates.PowerExp):
        if rate_obj.lam == 1.0:
            if rate_obj.p == 1.0:
                return "exp"
            if rate_obj.p == 2.0:
                return "q"
            if rate_obj.p == 3.0:
                return "c"
        return f"power_exp(p={rate_obj.p:g},lambda={rate_obj.lam:g})"
    if isinstance(rate_obj, rates.Glued):
        return "glued_c_p"
    return "expression"


def _spec(cache: dict | None, fixture: str, system, rate_obj,
          params: Params) -> SpectrumReport:
    if cache is None:
        return compute_spectrum(system, rate_obj, params)
    key = (fixture, json.dumps(rates.rate_to_descriptor(rate_obj), sort_keys=True))
    if key not in cache:
        cache[key] = compute_spectrum(system, rate_obj, params)
    return cache[key]


def run_all(params: Params = DEFAULT, threads: int = 1) -> list[TheoremReport]:
    """The default verification grid over the catalog and generated fixtures."""
    fixtures = {f.name: f for f in catalog_fixtures()}
    d = DISCRETE
    c = CONTINUOUS
    q_d, exp_d, p_d, c_d = (catalog.rate(n, d) for n in ("q", "exp", "p", "c"))
    q_c, exp_c, p_c, c_c = (catalog.rate(n, c) for n in ("q", "exp", "p", "c"))
    glued_c = catalog.rate("glued_c_p", c)
    pe12_d = rates.PowerExp(1.0, 2.0, d)
    pe13_d = rates.PowerExp(1.0, 3.0, d)

    quot_q_m2 = generate_quotient_system(q_d, [-2.0])
    quot_q_p2 = generate_quotient_system(q_d, [2.0])
    quot_exp_pm = generate_quotient_system(exp_d, [-1.0, 1.0])
    quot_exp_0 = generate_quotient_system(exp_d, [0.0])
    quot_exp_1 = generate_quotient_system(exp_d, [1.0])
    quot_c_1 = generate_quotient_system(c_c, [1.0])

    cache: dict = {}
    rows = []

    def row(fn, *args, **kwargs):
        rows.append(lambda: fn(*args, cache=cache, **kwargs))

    for fx, m, w in [
        ("abs2t", q_c, exp_c), ("abs2t", q_c, p_c),
        ("disc_q", q_d, exp_d), ("disc_q", q_d, p_d),
        ("frak_a", c_d, exp_d), ("frak_a", c_d, q_d), ("frak_a", c_d, p_d),
        ("sq3t2", c_c, q_c), ("sq3t2", c_c, exp_c), ("sq3t2", c_c, p_c),
        ("identity", q_d, exp_d),
    ]:
        row(verify_805, fixtures[fx].system, m, w, params, fixture=fx)
    row(verify_805, quot_exp_1.system, q_d, exp_d, params, fixture=quot_exp_1.name)

    for fx, w, m in [
        ("abs2t", q_c, c_c),
        ("disc_q", q_d, c_d),
        ("inv1pt", p_c, q_c), ("inv1pt", p_c, c_c), ("inv1pt", p_c, exp_c),
        ("identity", exp_d, q_d),
        ("sq3t2", c_c, q_c),
    ]:
        row(verify_806, fixtures[fx].system, w, m, params, fixture=fx)

    row(verify_808_809, quot_q_m2.system, q_d, exp_d, params=params,
        a=1.0, variant="808i", fixture=quot_q_m2.name)
    row(verify_808_809, quot_q_p2.system, q_d, exp_d, params=params,
        a=1.0, variant="808ii", fixture=quot_q_p2.name)
    row(verify_808_809, quot_exp_pm.system, pe12_d, exp_d, params=params,
        b=1.0, variant="809i", fixture=quot_exp_pm.name)
    row(verify_808_809, quot_exp_pm.system, pe12_d, exp_d, params=params,
        a=-1.0, variant="809ii", fixture=quot_exp_pm.name)
    row(verify_808_809, quot_exp_pm.system, pe12_d, exp_d, params=params,
        a=-1.0, b=1.0, variant="809iii", fixture=quot_exp_pm.name)
    row(verify_808_809, quot_exp_0.system, pe12_d, exp_d, params=params,
        b=0.0, variant="809i", fixture=quot_exp_0.name)
    row(verify_808_809, quot_exp_pm.system, pe12_d, exp_d, params=params,
        b=INF, variant="809i", fixture=quot_exp_pm.name)

    disc_chain = [p_d, exp_d, q_d, c_d]
    cont_chain = [p_c, exp_c, q_c, c_c]
    chain_names = ["p", "exp", "q", "c"]
    for fx in ("abs2t", "inv1pt", "sq3t2"):
        row(verify_811, fixtures[fx].system, cont_chain, params, fixture=fx,
            rate_names=chain_names)
    for fx in ("frak_a", "disc_q", "identity"):
        row(verify_811, fixtures[fx].system, disc_chain, params, fixture=fx,
            rate_names=chain_names)

    row(verify_908, quot_c_1.system, c_c, glued_c, params, fixture=quot_c_1.name)
    row(verify_908, quot_exp_pm.system, exp_d, pe13_d, params, fixture=quot_exp_pm.name)
    row(verify_908, fixtures["abs2t"].system, q_c, q_c, params, fixture="abs2t")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda r: r(), rows))
    return [r() for r in rows]
