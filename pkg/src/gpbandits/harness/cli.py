"""Command-line entry point.

    gpbandits run CONFIG [--out DIR] [--seeds a..b] [--jobs N]
    gpbandits verify {lemma1,lemma1-nsv,epcl,coverage} CONFIG [--out DIR] [--seeds a..b]
    gpbandits compare-va CONFIG [--out DIR] [--seeds a..b]
    gpbandits mig-bracket CONFIG [--out DIR]

Verification configs may carry a ``cases`` list; each case is merged over
the top-level keys and checked separately. Exit status is 0 when every
check passes (or the run completes), 1 when a check fails and 2 on bad
input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..envs import domain_from_dict, env_from_dict, schedule_from_dict
from ..errors import ConfigError, InputError
from ..infogain import greedy_mig_bracket
from ..kernels import KernelSpec
from .compare import compare_variance_aware
from .experiment import ExperimentConfig, dump_json, parse_seeds, run_experiment
from .verify import (verify_coverage, verify_epcl, verify_lemma1,
                     verify_lemma1_nonstationary)


def _require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(missing)


def _kernel_domain(cfg):
    _require(cfg, "kernel", "domain")
    return KernelSpec.from_dict(cfg["kernel"]), domain_from_dict(cfg["domain"])


def _cases(cfg):
    base = {k: v for k, v in cfg.items() if k != "cases"}
    return [{**base, **case} for case in cfg.get("cases", [{}])]


def _verify_one(check, cfg, seeds):
    kernel, domain = _kernel_domain(cfg)
    if check == "lemma1":
        _require(cfg, "lambda2", "T_list")
        return verify_lemma1(kernel, domain, float(cfg["lambda2"]), cfg["T_list"])
    if check == "lemma1-nsv":
        _require(cfg, "noise", "T_list")
        return verify_lemma1_nonstationary(kernel, domain, schedule_from_dict(cfg["noise"]),
                                           cfg["T_list"])
    if check == "epcl":
        _require(cfg, "rule", "T")
        sched = schedule_from_dict(cfg["noise"]) if "noise" in cfg else None
        return verify_epcl(kernel, domain, cfg["rule"], int(cfg["T"]),
                           lambda2=cfg.get("lambda2"), schedule=sched,
                           sequences=int(cfg.get("sequences", 50)),
                           seed=int(cfg.get("seed", 0)))
    if check == "coverage":
        _require(cfg, "kind", "T", "B")
        runs, seed0 = int(cfg.get("runs", 500)), int(cfg.get("seed0", 0))
        if seeds is not None:
            runs, seed0 = len(seeds), seeds[0]
        sched = schedule_from_dict(cfg["noise"]) if "noise" in cfg else None
        return verify_coverage(kernel, domain, cfg["kind"], int(cfg["T"]), runs,
                               B=float(cfg["B"]), delta=float(cfg.get("delta", 0.1)),
                               rho2=float(cfg.get("rho2", 1.0)), lambda2=cfg.get("lambda2"),
                               schedule=sched, m=int(cfg.get("m", 5)),
                               f_seed=int(cfg.get("f_seed", 0)), seed0=seed0)
    raise ConfigError(["check"], f"unknown check {check!r}")


def cmd_verify(args, cfg):
    reports = [_verify_one(args.check, case, args.seeds) for case in _cases(cfg)]
    ok = all(r.passed for r in reports)
    for i, r in enumerate(reports):
        print(f"{'PASS' if r.passed else 'FAIL'} {r.check} case {i}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        dump_json({"check": args.check, "pass": ok, "reports": [r.to_dict() for r in reports]},
                  os.path.join(args.out, f"verify_{args.check}.json"))
    return 0 if ok else 1


def cmd_run(args, cfg):
    exp = ExperimentConfig.from_dict(cfg)
    summary = run_experiment(exp, out=args.out, seeds=args.seeds, jobs=args.jobs)
    for label, agg in summary["by_algorithm"].items():
        print(f"{label}: n={agg['n']} median R_T={agg['median_R_T']:.6g} "
              f"median r_T={agg['median_r_T']:.6g}")
    return 0


def cmd_compare(args, cfg):
    _require(cfg, "T")
    seeds = args.seeds if args.seeds is not None else cfg.get("seeds", list(range(20)))
    env = env_from_dict(cfg)
    res = compare_variance_aware(env.domain, env.f, env.schedule, int(cfg["T"]), seeds,
                                 delta=float(cfg.get("delta", 0.1)), N1=int(cfg.get("N1", 8)),
                                 B=cfg.get("B"))
    m = res["medians"]
    print(f"{'PASS' if res['mvr_pass'] else 'FAIL'} median r_T va_mvr={m['va_mvr']['r_T']:.6g} "
          f"mvr={m['mvr']['r_T']:.6g}")
    print(f"{'PASS' if res['pe_pass'] else 'FAIL'} median R_T va_pe={m['va_pe']['R_T']:.6g} "
          f"pe={m['pe']['R_T']:.6g}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        dump_json(res, os.path.join(args.out, "compare_va.json"))
    return 0 if res["pass"] else 1


def cmd_mig(args, cfg):
    out = []
    for case in _cases(cfg):
        kernel, domain = _kernel_domain(case)
        _require(case, "T", "noise_var")
        b = greedy_mig_bracket(kernel, domain, int(case["T"]), float(case["noise_var"]))
        out.append(b.to_dict())
        print(json.dumps(b.to_dict(), sort_keys=True))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        dump_json(out, os.path.join(args.out, "mig_bracket.json"))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="gpbandits", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="JSON config file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seeds", type=parse_seeds, help="seed range a..b (inclusive)")

    sp = sub.add_parser("run", help="run an experiment")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("check", choices=["lemma1", "lemma1-nsv", "epcl", "coverage"])
    common(sp)
    sp.add_argument("--jobs", type=int, default=1, help="accepted for symmetry; unused")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("compare-va", help="paired stationary vs variance-aware runs")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1, help="accepted for symmetry; unused")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("mig-bracket", help="greedy information-gain bracket")
    common(sp)
    sp.set_defaults(func=cmd_mig)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with open(args.config) as fh:
            cfg = json.load(fh)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc} (fields: {', '.join(exc.fields)})", file=sys.stderr)
        return 2
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
