"""Command-line front end.

Subcommands: spectrum (dichotomy spectrum of a system under a rate), compare
(relation between two rates), verify (theorem harness), catalog (built-in
rates and systems).  Systems and rates are given as catalog names
("catalog:abs2t" or plain "q") or inline JSON descriptors.  A JSON config
file can supply any flag's value; explicit flags win.  Floats in reports are
fixed at 12 significant digits and the extended reals are encoded as the
strings "-inf"/"+inf", so identical configurations produce byte-identical
output.  MUSPEC_THREADS caps harness parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import catalog, relations, spectrum, theorems
from .params import CONTINUOUS, DISCRETE, Params


_EXIT_OK = 0
_EXIT_ERROR = 1
_EXIT_INCONCLUSIVE = 2
_EXIT_FAILS = 3


def _sanitize(obj):
    """Fixed float formatting (12 significant digits, "-inf"/"+inf"), applied
    recursively so reports serialize byte-identically."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isinf(obj):
            return "+inf" if obj > 0 else "-inf"
        if obj == int(obj) and abs(obj) < 1e15:
            return float(obj)
        return float(f"{obj:.12g}")
    return obj


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_block(payload) -> str:
    return json.dumps(_sanitize(payload), indent=2) + "\n"


def _jsonl(payloads) -> str:
    return "".join(json.dumps(_sanitize(p), separators=(",", ":")) + "\n" for p in payloads)


# ---------------------------------------------------------------------------
# Argument handling


def _add_shared(parser: argparse.ArgumentParser):
    parser.add_argument("--schedule", help="comma-separated window sizes")
    parser.add_argument("--tol-stab", type=float, dest="tol_stab")
    parser.add_argument("--cutoff", type=float, dest="cutoff_fraction")
    parser.add_argument("--gamma-max", type=float, dest="gamma_max")
    parser.add_argument("--delta-merge", type=float, dest="delta_merge")
    parser.add_argument("--format", choices=("json", "csv", "table"), dest="fmt")
    parser.add_argument("--output")
    parser.add_argument("--config")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muspec")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="dichotomy spectrum of a system under a rate")
    sp.add_argument("--system", required=True)
    sp.add_argument("--rate", required=True)
    _add_shared(sp)

    cp = sub.add_parser("compare", help="relation between two growth rates")
    cp.add_argument("--relation", required=True,
                    choices=("faster", "weakly-faster", "almost-faster",
                             "almost-slower", "weakly-equivalent", "equivalent",
                             "chain"))
    cp.add_argument("--a")
    cp.add_argument("--b")
    cp.add_argument("--rates", help="comma-separated rate list for --relation chain")
    cp.add_argument("--time-domain", choices=(DISCRETE, CONTINUOUS),
                    dest="time_domain")
    _add_shared(cp)

    vp = sub.add_parser("verify", help="run theorem checks")
    vp.add_argument("--theorem", required=True,
                    choices=("805", "806", "808", "809", "811", "908", "all"))
    vp.add_argument("--system")
    vp.add_argument("--mu")
    vp.add_argument("--omega")
    vp.add_argument("--a", type=float)
    vp.add_argument("--b", type=float)
    vp.add_argument("--variant", choices=("i", "ii", "iii"))
    vp.add_argument("--chain", help="comma-separated rate names")
    _add_shared(vp)

    gp = sub.add_parser("catalog", help="list built-in rates and systems")
    gp.add_argument("--json", action="store_true", dest="as_json")
    gp.add_argument("--output")
    return parser


def _apply_config(args: argparse.Namespace):
    if not getattr(args, "config", None):
        return
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config: expected a JSON object")
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if hasattr(args, dest) and getattr(args, dest) is None:
            setattr(args, dest, value)


def _build_params(args: argparse.Namespace) -> Params:
    kwargs = {}
    schedule = getattr(args, "schedule", None)
    if schedule:
        if isinstance(schedule, str):
            kwargs["schedule"] = tuple(int(tok) for tok in schedule.split(",") if tok)
        else:
            kwargs["schedule"] = tuple(int(v) for v in schedule)
    for name in ("tol_stab", "cutoff_fraction", "gamma_max", "delta_merge"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = float(value)
    return Params(**kwargs)


def _threads() -> int:
    raw = os.environ.get("MUSPEC_THREADS", "1")
    try:
        val = int(raw)
    except ValueError:
        raise ValueError(f"MUSPEC_THREADS: expected an integer, got {raw!r}") from None
    return max(1, val)


# ---------------------------------------------------------------------------
# Commands


def _cmd_spectrum(args) -> int:
    params = _build_params(args)
    system = catalog.resolve_system(args.system)
    rate = catalog.resolve_rate(args.rate, system.time_domain)
    report = spectrum.compute_spectrum(system, rate, params)
    payload = report.to_dict()
    fmt = args.fmt or "json"
    if fmt == "csv":
        lines = ["window,component,lambda_lower,lambda_upper"]
        for row in payload["traces"]:
            lines.append("{window:g},{component},{lo},{hi}".format(
                window=row["window"], component=row["component"],
                lo=_csv_num(row["lambda_lower"]), hi=_csv_num(row["lambda_upper"])))
        _emit("\n".join(lines) + "\n", args.output)
    elif fmt == "table":
        lines = [f"mode: {payload['mode']}  converged: {payload['converged']}"]
        for iv in payload["intervals"]:
            lines.append(f"interval [{iv['lo']}, {iv['hi']}]")
        for gap in payload["gaps"]:
            lines.append(f"gap ({gap['lo']}, {gap['hi']}) rank {gap['rank']}")
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(_json_block(payload), args.output)
    return _EXIT_OK if report.converged else _EXIT_INCONCLUSIVE


def _csv_num(v) -> str:
    if isinstance(v, str):
        return v
    return f"{v:.12g}"


def _cmd_compare(args) -> int:
    params = _build_params(args)
    domain = args.time_domain or DISCRETE
    if args.relation == "chain":
        if not args.rates:
            raise ValueError("compare --relation chain needs --rates")
        rate_objs = [catalog.resolve_rate(tok, domain) for tok in args.rates.split(",")]
        report = relations.chain_check(rate_objs, params)
        _emit(_json_block(report.to_dict()), args.output)
        return _outcome_exit(report.outcome)
    if not args.a or not args.b:
        raise ValueError("compare needs --a and --b")
    a = catalog.resolve_rate(args.a, domain)
    b = catalog.resolve_rate(args.b, domain)
    if args.relation == "faster":
        verdict = relations.check_faster(a, b, params)
        payload, outcome = verdict.to_dict(), verdict.outcome
    elif args.relation == "weakly-faster":
        verdict = relations.check_weakly_faster(a, b, params)
        payload, outcome = verdict.to_dict(), verdict.outcome
    elif args.relation == "almost-faster":
        verdict = relations.check_almost(a, b, "faster", params)
        payload, outcome = verdict.to_dict(), verdict.outcome
    elif args.relation == "almost-slower":
        verdict = relations.check_almost(b, a, "slower", params)
        payload, outcome = verdict.to_dict(), verdict.outcome
    else:
        cls = relations.classify_pair(a, b, params)
        key = "weakly_equivalent" if args.relation == "weakly-equivalent" else "equivalent"
        outcome = getattr(cls, key)
        payload = {"relation": key, "outcome": outcome,
                   "classification": cls.to_dict()}
    _emit(_json_block(payload), args.output)
    return _outcome_exit(outcome)


def _outcome_exit(outcome: str) -> int:
    if outcome == relations.HOLDS:
        return _EXIT_OK
    if outcome == relations.FAILS:
        return _EXIT_FAILS
    return _EXIT_INCONCLUSIVE


def _cmd_verify(args) -> int:
    params = _build_params(args)
    if args.theorem == "all":
        reports = theorems.run_all(params, threads=_threads())
    else:
        if not args.system:
            raise ValueError("verify needs --system for a single theorem")
        system = catalog.resolve_system(args.system)
        domain = system.time_domain
        if args.theorem == "811":
            if not args.chain:
                raise ValueError("verify --theorem 811 needs --chain")
            names = [tok.strip() for tok in args.chain.split(",") if tok.strip()]
            chain = [catalog.resolve_rate(n, domain) for n in names]
            reports = [theorems.verify_811(system, chain, params,
                                           fixture=args.system, rate_names=names)]
        else:
            if not args.mu or not args.omega:
                raise ValueError(f"verify --theorem {args.theorem} needs --mu and --omega")
            mu = catalog.resolve_rate(args.mu, domain)
            omega = catalog.resolve_rate(args.omega, domain)
            if args.theorem == "805":
                reports = [theorems.verify_805(system, mu, omega, params,
                                               fixture=args.system)]
            elif args.theorem == "806":
                reports = [theorems.verify_806(system, omega, mu, params,
                                               fixture=args.system)]
            elif args.theorem in ("808", "809"):
                variant = args.theorem + (args.variant or "i")
                reports = [theorems.verify_808_809(
                    system, mu, omega, a=args.a, b=args.b, variant=variant,
                    params=params, fixture=args.system)]
            else:
                reports = [theorems.verify_908(system, mu, omega, params,
                                               fixture=args.system)]
    _emit(_jsonl(r.to_dict() for r in reports), args.output)
    failed = sum(1 for r in reports if r.status == "fail")
    return _EXIT_OK if failed == 0 else _EXIT_ERROR


def _cmd_catalog(args) -> int:
    payload = catalog.listing()
    if args.as_json:
        _emit(_json_block(payload), getattr(args, "output", None))
        return _EXIT_OK
    lines = ["rates:"]
    for name, desc in payload["rates"].items():
        lines.append(f"  {name}: {json.dumps(_sanitize(desc))}")
    lines.append("systems:")
    for name, desc in payload["systems"].items():
        lines.append(f"  {name}: {json.dumps(_sanitize(desc))}")
    _emit("\n".join(lines) + "\n", getattr(args, "output", None))
    return _EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_catalog(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
