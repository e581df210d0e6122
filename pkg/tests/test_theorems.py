import math
import random

import pytest

from muspec import catalog, evolution, rates, relations, spectrum, theorems
from muspec.params import CONTINUOUS, DISCRETE


INF = math.inf


@pytest.fixture(scope="module")
def fixtures():
    return {f.name: f for f in theorems.catalog_fixtures()}


@pytest.fixture(scope="module")
def spectra_cache():
    return {}


def _rate_for(fixture, name):
    return catalog.rate(name, fixture.system.time_domain)


def _spectrum(cache, fixture, rate):
    key = (fixture.name, rates.rate_to_descriptor(rate)["kind"],
           repr(rates.rate_to_descriptor(rate)))
    if key not in cache:
        cache[key] = spectrum.compute_spectrum(fixture.system, rate)
    return cache[key]


def test_closed_forms_match_propagation(fixtures):
    rng = random.Random(11)
    for fx in fixtures.values():
        domain = fx.system.time_domain
        for _ in range(6):
            k = rng.randint(-20, 20)
            n = rng.randint(-20, 20)
            got = evolution.propagate(fx.system, k, n).log_norm
            want = fx.closed_form(0, k, n)
            tol = 1e-12 * max(1.0, abs(want)) if domain == DISCRETE else 1e-6
            assert abs(got - want) <= tol, (fx.name, k, n)


def test_quotient_fixture_generation():
    q = catalog.rate("q", DISCRETE)
    fx = theorems.generate_quotient_system(q, [1.0])
    assert fx.system.structure == "scalar"
    assert fx.closed_form(0, 5, 2) == pytest.approx(21.0)
    rep = spectrum.compute_spectrum(fx.system, q)
    assert rep.intervals[0].lo == pytest.approx(1.0, abs=1e-12)
    exp = catalog.rate("exp", DISCRETE)
    flat = theorems.generate_quotient_system(exp, [0.0])
    rep = spectrum.compute_spectrum(flat.system, exp)
    assert rep.intervals[0].lo == 0.0 and rep.intervals[0].hi == 0.0
    c = catalog.rate("c", DISCRETE)
    like_frak_a = theorems.generate_quotient_system(c, [-1.0])
    for k, n in [(5, 2), (-3, 4)]:
        assert like_frak_a.closed_form(0, k, n) == pytest.approx(-(k ** 3 - n ** 3))


def test_verify_805_passes_on_catalog(fixtures, spectra_cache):
    rows = [
        ("abs2t", "q", "exp"),
        ("abs2t", "q", "p"),
        ("frak_a", "c", "exp"),
        ("frak_a", "c", "q"),
        ("sq3t2", "c", "q"),
        ("disc_q", "q", "exp"),
    ]
    for fx_name, mu_name, omega_name in rows:
        fx = fixtures[fx_name]
        report = theorems.verify_805(
            fx.system, _rate_for(fx, mu_name), _rate_for(fx, omega_name),
            fixture=fx_name, cache=spectra_cache)
        assert report.status == "pass", (fx_name, report.reason)


def test_verify_805_skips_without_dichotomy(fixtures, spectra_cache):
    fx = fixtures["identity"]
    report = theorems.verify_805(fx.system, _rate_for(fx, "q"),
                                 _rate_for(fx, "exp"), fixture="identity",
                                 cache=spectra_cache)
    assert report.status == "skipped"
    assert "system_has_mu_dichotomy" in report.reason
    exp = catalog.rate("exp", DISCRETE)
    drift = theorems.generate_quotient_system(exp, [1.0])
    report = theorems.verify_805(drift.system, catalog.rate("q", DISCRETE), exp,
                                 fixture=drift.name)
    assert report.status == "skipped"


def test_verify_806_rows(fixtures, spectra_cache):
    fx = fixtures["abs2t"]
    report = theorems.verify_806(fx.system, _rate_for(fx, "q"), _rate_for(fx, "c"),
                                 fixture="abs2t", cache=spectra_cache)
    assert report.status == "pass"
    fx = fixtures["inv1pt"]
    report = theorems.verify_806(fx.system, _rate_for(fx, "p"), _rate_for(fx, "q"),
                                 fixture="inv1pt", cache=spectra_cache)
    assert report.status == "pass"
    # a hypothesis that fails is reported as skipped, not assumed
    fx = fixtures["sq3t2"]
    report = theorems.verify_806(fx.system, _rate_for(fx, "c"), _rate_for(fx, "q"),
                                 fixture="sq3t2", cache=spectra_cache)
    assert report.status == "skipped"
    assert "mu_faster_than_omega" in report.reason


def test_verify_808_809_on_quotient_fixtures():
    q = catalog.rate("q", DISCRETE)
    exp = catalog.rate("exp", DISCRETE)
    pe12 = rates.PowerExp(1.0, 2.0, DISCRETE)
    down = theorems.generate_quotient_system(q, [-2.0])
    report = theorems.verify_808_809(down.system, q, exp, a=1.0, variant="808i",
                                     fixture=down.name)
    assert report.status == "pass"
    up = theorems.generate_quotient_system(q, [2.0])
    report = theorems.verify_808_809(up.system, q, exp, a=1.0, variant="808ii",
                                     fixture=up.name)
    assert report.status == "pass"
    pair = theorems.generate_quotient_system(exp, [-1.0, 1.0])
    for variant, kwargs in [
        ("809i", {"b": 1.0}),
        ("809ii", {"a": -1.0}),
        ("809iii", {"a": -1.0, "b": 1.0}),
    ]:
        report = theorems.verify_808_809(pair.system, pe12, exp, variant=variant,
                                         fixture=pair.name, **kwargs)
        assert report.status == "pass", (variant, report.reason)
    degenerate = theorems.generate_quotient_system(exp, [0.0])
    report = theorems.verify_808_809(degenerate.system, pe12, exp, b=0.0,
                                     variant="809i", fixture=degenerate.name)
    assert report.status == "pass"
    report = theorems.verify_808_809(pair.system, pe12, exp, b=INF,
                                     variant="809i", fixture=pair.name)
    assert report.status == "skipped"
    assert "nothing to prove" in report.reason


def test_verify_811_finds_the_strong_rate(fixtures, spectra_cache):
    expectations = {"abs2t": "q", "inv1pt": "p", "sq3t2": "c"}
    names = ["p", "exp", "q", "c"]
    for fx_name, strong in expectations.items():
        fx = fixtures[fx_name]
        chain = [catalog.rate(n, CONTINUOUS) for n in names]
        report = theorems.verify_811(fx.system, chain, fixture=fx_name,
                                     rate_names=names, cache=spectra_cache)
        assert report.status == "pass"
        assert report.conclusion["detail"] == f"strong rate: {strong}"


def test_verify_811_rejects_unordered_chain(fixtures):
    fx = fixtures["abs2t"]
    names = ["c", "q"]
    chain = [catalog.rate(n, CONTINUOUS) for n in names]
    report = theorems.verify_811(fx.system, chain, fixture="abs2t", rate_names=names)
    assert report.status == "skipped"
    assert "chain_is_ordered" in report.reason


def test_verify_908_weak_equivalence():
    c_cont = catalog.rate("c", CONTINUOUS)
    glued = catalog.rate("glued_c_p", CONTINUOUS)
    fx = theorems.generate_quotient_system(c_cont, [1.0])
    report = theorems.verify_908(fx.system, c_cont, glued, fixture=fx.name)
    assert report.theorem == "908i"
    assert report.status == "pass"


def test_verify_908_qualitative_equivalence():
    exp = catalog.rate("exp", DISCRETE)
    pe13 = rates.PowerExp(1.0, 3.0, DISCRETE)
    fx = theorems.generate_quotient_system(exp, [-1.0, 1.0])
    report = theorems.verify_908(fx.system, exp, pe13, fixture=fx.name)
    assert report.theorem == "908ii"
    assert report.status == "pass"
    assert "ranks [0, 1, 2]" in report.conclusion["detail"]
    # the spectra themselves differ by the scale factor three
    rep_exp = spectrum.compute_spectrum(fx.system, exp)
    rep_scaled = spectrum.compute_spectrum(fx.system, pe13)
    assert [iv.lo for iv in rep_exp.intervals] == [-1.0, 1.0]
    assert [round(iv.lo, 9) for iv in rep_scaled.intervals] == [
        pytest.approx(-1 / 3), pytest.approx(1 / 3)]


def test_verify_908_trivial_same_rate(fixtures):
    fx = fixtures["abs2t"]
    q_c = catalog.rate("q", CONTINUOUS)
    report = theorems.verify_908(fx.system, q_c, q_c, fixture="abs2t")
    assert report.theorem == "908i"
    assert report.status == "pass"


def test_dichotomy_excludes_slower_growth(fixtures, spectra_cache):
    """A confirmed dichotomy under mu forbids bounded growth under any
    strictly slower catalog rate."""
    names = ["p", "exp", "q", "c"]
    for fx in fixtures.values():
        domain = fx.system.time_domain
        for mu_name in names:
            mu = catalog.rate(mu_name, domain)
            dich = spectrum.has_mu_dichotomy(fx.system, mu,
                                             report=_spectrum(spectra_cache, fx, mu))
            if dich.holds is not True:
                continue
            for omega_name in names:
                if omega_name == mu_name:
                    continue
                omega = catalog.rate(omega_name, domain)
                if relations.check_faster(mu, omega).outcome != relations.HOLDS:
                    continue
                growth = spectrum.has_mu_growth(
                    fx.system, omega, report=_spectrum(spectra_cache, fx, omega))
                assert growth.status == "fails", (fx.name, mu_name, omega_name)


def test_growth_excludes_faster_dichotomy(fixtures, spectra_cache):
    """Confirmed bounded growth under omega forbids a confirmed dichotomy
    under any strictly faster catalog rate."""
    names = ["p", "exp", "q", "c"]
    for fx in fixtures.values():
        domain = fx.system.time_domain
        for omega_name in names:
            omega = catalog.rate(omega_name, domain)
            growth = spectrum.has_mu_growth(
                fx.system, omega, report=_spectrum(spectra_cache, fx, omega))
            if growth.status != "holds":
                continue
            for mu_name in names:
                if mu_name == omega_name:
                    continue
                mu = catalog.rate(mu_name, domain)
                if relations.check_faster(mu, omega).outcome != relations.HOLDS:
                    continue
                dich = spectrum.has_mu_dichotomy(
                    fx.system, mu, report=_spectrum(spectra_cache, fx, mu))
                assert dich.holds is not True, (fx.name, omega_name, mu_name)


def test_run_all_reports_no_failures():
    reports = theorems.run_all()
    statuses = [r.status for r in reports]
    assert "fail" not in statuses
    assert statuses.count("pass") >= 25
    payloads = [r.to_dict() for r in reports]
    for p in payloads:
        assert {"theorem", "fixture", "rates", "status", "details"} <= set(p)


def test_run_all_is_thread_invariant():
    serial = [r.to_dict() for r in theorems.run_all()]
    threaded = [r.to_dict() for r in theorems.run_all(threads=4)]
    assert serial == threaded
