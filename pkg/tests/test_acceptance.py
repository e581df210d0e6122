"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Desk scale throughout: discrete windows up to 400, continuous windows up to
40 with integration step 1e-2, the default estimator parameters.
"""

import math
import random

from muspec import catalog, evolution, rates, relations, spectrum, theorems
from muspec.params import CONTINUOUS, DISCRETE
from muspec.relations import FAILS, HOLDS


INF = math.inf


def _criterion(number: int, checks):
    failures = [f"{label}: {detail}" for label, ok, detail in checks if not ok]
    detail = "; ".join(f"{label} {'ok' if ok else 'FAIL(' + detail + ')'}"
                       for label, ok, detail in checks)
    print(f"ACCEPTANCE {number}: {'FAIL' if failures else 'PASS'} - {detail}")
    assert not failures, f"criterion {number}: " + "; ".join(failures)


def _interval_near(report, target, tol):
    iv = report.intervals[0]
    ok = (len(report.intervals) == 1 and math.isfinite(iv.lo)
          and abs(iv.lo - target) <= tol and abs(iv.hi - target) <= tol)
    return ok, f"[{iv.lo:.4g}, {iv.hi:.4g}] vs {target}+-{tol}"


def _diverged(report, sign):
    est = report.component_estimates[0]
    target = INF if sign > 0 else -INF
    ok = (est.diverged_upper and est.diverged_lower
          and est.lower == target and est.upper == target)
    return ok, (f"lower={est.lower:g} upper={est.upper:g} "
                f"flags=({est.diverged_lower},{est.diverged_upper})")


def _rate(name, domain):
    return catalog.rate(name, domain)


def test_criterion_1_quadratic_spectrum_of_abs2t():
    rep = spectrum.compute_spectrum(catalog.system("abs2t"), _rate("q", CONTINUOUS))
    iv = rep.intervals[0]
    inside = 0.95 <= iv.lo and iv.hi <= 1.05
    _criterion(1, [
        ("interval within [0.95, 1.05]", inside, f"[{iv.lo:.6g}, {iv.hi:.6g}]"),
        ("converged flag", rep.converged, str(rep.converged)),
    ])


def test_criterion_2_exponential_and_polynomial_diverge_on_abs2t():
    system = catalog.system("abs2t")
    rep_e = spectrum.compute_spectrum(system, _rate("exp", CONTINUOUS))
    rep_p = spectrum.compute_spectrum(system, _rate("p", CONTINUOUS))
    ok_e, det_e = _diverged(rep_e, +1)
    ok_p, det_p = _diverged(rep_p, +1)
    _criterion(2, [
        ("exponential spectrum {+inf}", ok_e, det_e),
        ("polynomial spectrum {+inf}", ok_p, det_p),
    ])


def test_criterion_3_cubic_spectrum_of_abs2t():
    rep = spectrum.compute_spectrum(catalog.system("abs2t"), _rate("c", CONTINUOUS))
    ok, det = _interval_near(rep, 0.0, 0.05)
    _criterion(3, [("cubic spectrum {0} within 0.05", ok, det)])


def test_criterion_4_spectra_of_inv1pt():
    system = catalog.system("inv1pt")
    rep_p = spectrum.compute_spectrum(system, _rate("p", CONTINUOUS))
    rep_e = spectrum.compute_spectrum(system, _rate("exp", CONTINUOUS))
    rep_q = spectrum.compute_spectrum(system, _rate("q", CONTINUOUS))
    rep_c = spectrum.compute_spectrum(system, _rate("c", CONTINUOUS))
    ok_p, det_p = _interval_near(rep_p, 1.0, 0.05)
    ok_e, det_e = _interval_near(rep_e, 0.0, 0.05)
    ok_q, det_q = _interval_near(rep_q, 0.0, 0.05)
    ok_c, det_c = _interval_near(rep_c, 0.0, 0.05)
    _criterion(4, [
        ("polynomial spectrum {1} within 0.05", ok_p, det_p),
        ("exponential spectrum {0} within 0.05", ok_e, det_e),
        ("quadratic spectrum {0} within 0.05", ok_q, det_q),
        ("cubic spectrum {0} within 0.05", ok_c, det_c),
    ])


def test_criterion_5_spectra_of_sq3t2():
    system = catalog.system("sq3t2")
    rep_c = spectrum.compute_spectrum(system, _rate("c", CONTINUOUS))
    ok_c, det_c = _interval_near(rep_c, 1.0, 0.05)
    checks = [("cubic spectrum {1} within 0.05", ok_c, det_c)]
    for name in ("p", "exp", "q"):
        rep = spectrum.compute_spectrum(system, _rate(name, CONTINUOUS))
        ok, det = _diverged(rep, +1)
        checks.append((f"{name} spectrum {{+inf}}", ok, det))
    _criterion(5, checks)


def test_criterion_6_discrete_companion():
    system = catalog.system("disc_q")
    rep_q = spectrum.compute_spectrum(system, _rate("q", DISCRETE))
    ok_q, det_q = _interval_near(rep_q, 1.0, 0.02)
    rep_e = spectrum.compute_spectrum(system, _rate("exp", DISCRETE))
    ok_e, det_e = _diverged(rep_e, +1)
    _criterion(6, [
        ("quadratic spectrum {1} within 0.02", ok_q, det_q),
        ("exponential spectrum {+inf}", ok_e, det_e),
    ])


def test_criterion_7_decaying_cubic_coefficient():
    system = catalog.system("frak_a")
    rep_e = spectrum.compute_spectrum(system, _rate("exp", DISCRETE))
    ok_e, det_e = _diverged(rep_e, -1)
    rep_c = spectrum.compute_spectrum(system, _rate("c", DISCRETE))
    ok_c, det_c = _interval_near(rep_c, -1.0, 0.02)
    _criterion(7, [
        ("exponential spectrum {-inf}", ok_e, det_e),
        ("cubic spectrum {-1} within 0.02", ok_c, det_c),
    ])


def test_criterion_8_relation_matrix_and_chain():
    p, e, q, c = (_rate(n, DISCRETE) for n in ("p", "exp", "q", "c"))
    checks = []
    for fast, slow, label in [(e, p, "exp>p"), (q, e, "q>exp"), (c, q, "c>q")]:
        fwd = relations.check_faster(fast, slow).outcome
        rev = relations.check_faster(slow, fast).outcome
        checks.append((f"faster({label}) holds", fwd == HOLDS, fwd))
        checks.append((f"reverse fails", rev == FAILS, rev))
    chain = relations.chain_check([p, e, q, c]).outcome
    checks.append(("chain p,exp,q,c holds", chain == HOLDS, chain))
    _criterion(8, checks)


def test_criterion_9_power_of_a_rate():
    omega = _rate("exp", DISCRETE)
    checks = []
    for theta in (2.0, 3.0):
        mu = rates.PowerExp(1.0, theta, DISCRETE)
        weak = relations.check_weakly_faster(mu, omega)
        cls = relations.classify_pair(mu, omega)
        checks.extend([
            (f"theta={theta:g} weakly faster holds", weak.outcome == HOLDS, weak.outcome),
            (f"theta={theta:g} log M = 0 exactly",
             weak.certificate is not None and weak.certificate["log_M"] == 0.0,
             str(weak.certificate)),
            (f"theta={theta:g} faster fails",
             cls.outcome("faster_ab") == FAILS and cls.outcome("faster_ba") == FAILS,
             f"{cls.outcome('faster_ab')}/{cls.outcome('faster_ba')}"),
            (f"theta={theta:g} equivalent holds", cls.equivalent == HOLDS, cls.equivalent),
            (f"theta={theta:g} weakly equivalent fails",
             cls.weakly_equivalent == FAILS, cls.weakly_equivalent),
        ])
    _criterion(9, checks)


def _random_quotient_fixtures(count=20):
    rng = random.Random(20240811)
    fixtures = []
    for _ in range(count):
        nu = _rate(rng.choice(["p", "exp", "q", "c"]), DISCRETE)
        dim = rng.randint(1, 3)
        slopes = [round(rng.uniform(-2.0, 2.0), 3) for _ in range(dim)]
        fixtures.append((nu, evolution.quotient_system(nu, slopes), slopes))
    return fixtures


def test_criterion_10_property_suites():
    checks = []
    fixtures = _random_quotient_fixtures()
    rng = random.Random(99)

    cocycle_ok, cocycle_detail = True, "max relative defect 0"
    worst = 0.0
    for _, system, _ in fixtures:
        k, m, n = (rng.randint(-40, 40) for _ in range(3))
        left = evolution.propagate(system, k, m).compose(evolution.propagate(system, m, n))
        right = evolution.propagate(system, k, n)
        defect = abs(left.log_norm - right.log_norm) / max(1.0, abs(right.log_norm))
        worst = max(worst, defect)
        if not left.definitely_close(right, 1e-9):
            cocycle_ok = False
    cocycle_detail = f"max relative defect {worst:.2e}"
    checks.append(("cocycle identity within 1e-9", cocycle_ok, cocycle_detail))

    translation_ok = True
    for nu, system, _ in fixtures:
        gamma0 = round(rng.uniform(-2.0, 2.0), 3)
        base = spectrum.compute_spectrum(system, nu)
        shifted = spectrum.compute_spectrum(
            evolution.WeightedSystem(system, nu, gamma0), nu)
        for iv_b, iv_s in zip(base.intervals, shifted.intervals):
            if abs(iv_s.lo - (iv_b.lo - gamma0)) > 0.02 or \
                    abs(iv_s.hi - (iv_b.hi - gamma0)) > 0.02:
                translation_ok = False
    checks.append(("weighting translates spectra (20 random fixtures)",
                   translation_ok, "within tol_stab"))

    rank_ok = True
    for nu, system, slopes in fixtures:
        if len(slopes) < 2:
            continue
        rep = spectrum.compute_spectrum(system, nu)
        ranks = [g.rank for g in rep.gaps]
        if ranks != sorted(ranks) or ranks[0] != 0 or ranks[-1] != len(slopes):
            rank_ok = False
    checks.append(("gap ranks increase from 0 to d", rank_ok, "all diagonal fixtures"))

    duality_ok = True
    names = ["p", "exp", "q", "c"]
    for a in names:
        for b in names:
            if a == b:
                continue
            fwd = relations.check_faster(_rate(a, DISCRETE), _rate(b, DISCRETE),
                                         formulation="forward").outcome
            bwd = relations.check_faster(_rate(a, DISCRETE), _rate(b, DISCRETE),
                                         formulation="backward").outcome
            if fwd != bwd:
                duality_ok = False
    checks.append(("positive-exponent dual formulation agrees", duality_ok,
                   "all catalog pairs"))

    cor_ok, cor_detail = _corollary_grid()
    checks.append(("dichotomy/growth exclusion grid", cor_ok, cor_detail))

    reports = theorems.run_all()
    failed = [r for r in reports if r.status == "fail"]
    checks.append(("verify --theorem all has zero failures", not failed,
                   f"{len(reports)} reports, {len(failed)} failed"))

    _criterion(10, checks)


def _corollary_grid():
    names = ["p", "exp", "q", "c"]
    cache = {}

    def rep_of(fx, rate):
        key = (fx.name, repr(rates.rate_to_descriptor(rate)))
        if key not in cache:
            cache[key] = spectrum.compute_spectrum(fx.system, rate)
        return cache[key]

    for fx in theorems.catalog_fixtures():
        domain = fx.system.time_domain
        for mu_name in names:
            mu = catalog.rate(mu_name, domain)
            dich = spectrum.has_mu_dichotomy(fx.system, mu, report=rep_of(fx, mu))
            for om_name in names:
                if om_name == mu_name:
                    continue
                omega = catalog.rate(om_name, domain)
                if relations.check_faster(mu, omega).outcome != HOLDS:
                    continue
                growth = spectrum.has_mu_growth(fx.system, omega,
                                                report=rep_of(fx, omega))
                if dich.holds is True and growth.status != "fails":
                    return False, f"{fx.name}: {mu_name}-dichotomy with {om_name}-growth"
                if growth.status == "holds":
                    dich_mu = spectrum.has_mu_dichotomy(fx.system, mu,
                                                        report=rep_of(fx, mu))
                    if dich_mu.holds is True:
                        return False, f"{fx.name}: {om_name}-growth with {mu_name}-dichotomy"
    return True, "full fixture x rate grid"
