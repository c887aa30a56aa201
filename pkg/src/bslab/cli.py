"""Command-line runner: ``bslab <model> <action> --config file.json``.

Exit codes: 0 ok, 1 acceptance failure, 2 invalid config, 3 budget exceeded,
4 internal invariant violated.
"""

from __future__ import annotations

import argparse
import datetime as dt
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from bslab import __version__, acceptance, euclid, hyperbolic as hyp, schreier, zcover
from bslab.config import (EuclidConfig, HyperbolicConfig, SchreierConfig, ZCoverConfig, config_hash, levels,
                          load_config)
from bslab.errors import BudgetExceeded, ConfigError, InvariantViolation
from bslab.reports import ConvergenceReport
from bslab.testfn import TestFunction

log = logging.getLogger("bslab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3, 4


def _header(digest: str) -> str:
    stamp = dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return f"bslab {__version__} config={digest} generated={stamp}"


def _write(report: ConvergenceReport, cfg, args, stem: str) -> Path:
    digest = config_hash(cfg)
    report.meta.update({"module": report.model, "version": __version__, "config_hash": digest, "name": cfg.name})
    outdir = Path(args.out or cfg.out or Path("out") / cfg.name)
    csv_path, _ = report.write(outdir, stem, _header(digest))
    log.info("wrote %s", csv_path)
    return outdir


def _fs(cfgs) -> list[TestFunction]:
    return [TestFunction.from_config(c.model_dump()) for c in cfgs]


def _expect(cfg, kind):
    if not isinstance(cfg, kind):
        raise ConfigError(f"config model {cfg.model!r} does not match this subcommand")
    return cfg


# -- subcommands --------------------------------------------------------------------------

def cmd_euclid_scan(cfg: EuclidConfig, args) -> int:
    family = euclid.LatticeFamily.from_config(cfg.family.model_dump(exclude_none=True))
    report = euclid.scan_family(family, _fs(cfg.test_functions), cfg.R, levels(cfg.n), cfg.tail_tol,
                                workers=args.threads or cfg.workers, budget=cfg.budget, strict=False)
    _write(report, cfg, args, "euclid_scan")
    errors = [e for e in report.column("error") if e]
    if any(e.startswith("BudgetExceeded") for e in errors):
        return EXIT_BUDGET
    return EXIT_INVARIANT if errors else EXIT_OK


def cmd_schreier_scan(cfg: SchreierConfig, args) -> int:
    group = schreier.MarkedGroup(cfg.group.kind, cfg.group.rank)
    scheme = schreier.SubgroupScheme.from_config(group, cfg.scheme.model_dump(exclude_none=True))
    report = schreier.scan_relative(group, scheme, levels(cfg.n), cfg.r, cfg.method, cfg.ball_budget,
                                    cfg.index_budget, strict=False)
    _write(report, cfg, args, "schreier_scan")
    if any(e for e in report.column("error")):
        return EXIT_BUDGET
    if not all(report.column("dominated")):
        raise InvariantViolation("sign_sum <= count_sum <= bound * sign_sum failed")
    return EXIT_OK


def _radii(cfg: HyperbolicConfig) -> list[float]:
    unit = hyp.SYSTOLE if cfg.R_unit == "systole" else 1.0
    return [r * unit for r in cfg.R]


def _hyp_setup(cfg: HyperbolicConfig):
    group = hyp.build_octagon_group()
    radii = _radii(cfg)
    ball = hyp.group_ball(group, hyp.required_cutoff(max(radii)), budget=cfg.ball_budget)
    return group, radii, ball


def _scheme(cfg: HyperbolicConfig, n: int) -> hyp.HypScheme:
    return hyp.HypScheme(n, cfg.scheme)


def cmd_hyp_injrad(cfg: HyperbolicConfig, args) -> int:
    group, radii, ball = _hyp_setup(cfg)
    z = hyp.sample_octagon(group, cfg.samples, cfg.seed)
    report = ConvergenceReport("hyperbolic", ["n", "index", "x", "y", "inj_rad", "certified", "cutoff", "saturated"],
                               meta={"cutoff": ball.cutoff, "ball_size": len(ball), "seed": cfg.seed})
    for n in levels(cfg.n):
        inj = hyp.inj_rad(ball, _scheme(cfg, n), z)
        for i, (zz, v, c) in enumerate(zip(z, inj.value, inj.certified)):
            report.add(n=n, index=i, x=float(zz.real), y=float(zz.imag), inj_rad=float(v), certified=bool(c),
                       cutoff=ball.cutoff, saturated=ball.saturated)
    _write(report, cfg, args, "hyp_injrad")
    return EXIT_OK


def cmd_hyp_bsprob(cfg: HyperbolicConfig, args) -> int:
    group, radii, ball = _hyp_setup(cfg)
    report = ConvergenceReport("hyperbolic", list(hyp.HYP_COLUMNS),
                               meta={"cutoff": ball.cutoff, "margin": ball.margin, "ball_size": len(ball),
                                     "seed": cfg.seed, "scheme": cfg.scheme})
    for n in levels(cfg.n):
        for e in hyp.mc_bs_probability(group, ball, _scheme(cfg, n), radii, cfg.samples, cfg.seed,
                                       args.threads or cfg.workers):
            report.add(n=n, R=e.R, estimate=e.estimate, ci=e.ci, cutoff=e.cutoff, saturated=e.saturated,
                       samples=e.samples, decided=e.decided, error=None)
    _write(report, cfg, args, "hyp_bsprob")
    return EXIT_OK


def cmd_hyp_prop24(cfg: HyperbolicConfig, args) -> int:
    group, radii, ball = _hyp_setup(cfg)
    r_max = max(radii)
    report = ConvergenceReport("hyperbolic", ["n", "samples", "agree", "disagree", "indeterminate", "R_max",
                                              "cutoff", "saturated"],
                               meta={"cutoff": ball.cutoff, "ball_size": len(ball), "seed": cfg.seed})
    bad = 0
    for n in levels(cfg.n):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(n,)))
        z = hyp.sample_octagon(group, cfg.samples, cfg.seed)
        rs = rng.random(cfg.samples) * r_max
        counts = {"agree": 0, "disagree": 0, "indeterminate": 0}
        for zz, r in zip(z, rs):
            res = hyp.prop24_check(ball, _scheme(cfg, n), zz, float(r))
            key = "indeterminate" if res.indeterminate else ("agree" if res.side_a == res.side_b else "disagree")
            counts[key] += 1
        bad += counts["disagree"]
        report.add(n=n, samples=cfg.samples, R_max=r_max, cutoff=ball.cutoff, saturated=ball.saturated, **counts)
    _write(report, cfg, args, "hyp_prop24")
    if bad:
        raise InvariantViolation(f"{bad} samples where the two sides disagree")
    return EXIT_OK


ZCOVER_COLUMNS = ["f", "check", "n", "theta", "m", "value", "reference", "tail_bound", "ok"]


def cmd_zcover_check(cfg: ZCoverConfig, args) -> int:
    scheme = zcover.ZCoverScheme(euclid.LatticeBasis(cfg.basis), tuple(cfg.chi))
    thetas = [Fraction(str(t)) if isinstance(t, str) else Fraction(t) for t in cfg.theta_grid]
    report = ConvergenceReport("zcover", list(ZCOVER_COLUMNS))
    degrees, defects, thresholds = [], [], []
    ok = True
    for fi, f in enumerate(_fs(cfg.test_functions)):
        lt = zcover.laurent_trace(scheme, f)
        degrees.append(lt.degree)
        for th in thetas:
            geo = lt(th).real
            spec = zcover.twisted_spectral(scheme, th, f, cfg.tail_tol)
            good = abs(geo - spec.value) <= spec.tail_bound + 1e-12 * max(1.0, abs(geo))
            ok &= good
            report.add(f=fi, check="twisted_poisson", theta=th, value=spec.value, reference=geo,
                       tail_bound=spec.tail_bound, ok=good)
        l42 = zcover.check_lemma42_independence(scheme, f, levels(cfg.n))
        for row in l42.rows:
            report.add(f=fi, check="lemma42", n=row["n"], value=row["exact"], reference=l42.info["l2_trace"], ok=row["ok"])
        p43 = zcover.check_prop43(scheme, f, levels(cfg.n))
        thresholds.append(p43.info["threshold"])
        defects.append([row["delta"] for row in p43.rows])
        for row in p43.rows:
            report.add(f=fi, check="prop43", n=row["n"], value=row["delta"], reference=0, ok=row["ok"])
        m = cfg.quadrature_m or 2 * lt.degree + 1
        di = zcover.check_direct_integral(scheme, f, m)
        report.add(f=fi, check="direct_integral", m=m, value=di.rows[0]["exact"], reference=di.info["l2_trace"],
                   ok=di.ok)
        ok &= l42.ok and p43.ok and di.ok
    report.meta.update({"theta_grid": thetas, "degree": degrees, "defects": defects, "thresholds": thresholds,
                        "tail_tol": cfg.tail_tol})
    _write(report, cfg, args, "zcover_check")
    if not ok:
        raise InvariantViolation("a zcover identity failed; see the report rows with ok=false")
    return EXIT_OK


def cmd_acceptance(args) -> int:
    numbers = None if not args.only else [int(x) for x in args.only.split(",")]
    results = []
    for num in [c[0] for c in acceptance.CRITERIA if numbers is None or c[0] in numbers]:
        res = acceptance.run_criterion(num)
        print(res.line(), flush=True)
        results.append(res)
    if args.out:
        report = ConvergenceReport("acceptance", ["number", "name", "passed", "detail", "seconds", "limit"])
        for r in results:
            report.add(number=r.number, name=r.name, passed=r.passed, detail=r.detail, seconds=r.seconds, limit=r.limit)
        report.meta["version"] = __version__
        stamp = dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        report.write(Path(args.out), "acceptance", f"bslab {__version__} generated={stamp}")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


COMMANDS = {
    ("euclid", "scan"): (EuclidConfig, cmd_euclid_scan),
    ("schreier", "scan"): (SchreierConfig, cmd_schreier_scan),
    ("hyp", "injrad"): (HyperbolicConfig, cmd_hyp_injrad),
    ("hyp", "bsprob"): (HyperbolicConfig, cmd_hyp_bsprob),
    ("hyp", "prop24"): (HyperbolicConfig, cmd_hyp_prop24),
    ("zcover", "check"): (ZCoverConfig, cmd_zcover_check),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bslab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"bslab {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="model", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="experiment config (JSON)")
        sp.add_argument("--out", help="output directory (overrides the config)")
        sp.add_argument("--threads", type=int, default=None, help="worker processes")
        sp.add_argument("--seed-override", type=int, default=None, help="replace the config seed")

    for model, actions in (("euclid", ["scan"]), ("schreier", ["scan"]), ("hyp", ["injrad", "bsprob", "prop24"]),
                           ("zcover", ["check"])):
        msub = sub.add_parser(model).add_subparsers(dest="action", required=True)
        for action in actions:
            common(msub.add_parser(action))
    suite = sub.add_parser("suite").add_subparsers(dest="action", required=True)
    acc = suite.add_parser("acceptance")
    acc.add_argument("--out", help="directory for acceptance.csv/json")
    acc.add_argument("--only", help="comma-separated criterion numbers")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.model == "suite":
            return cmd_acceptance(args)
        kind, fn = COMMANDS[(args.model, args.action)]
        cfg = _expect(load_config(args.config, args.seed_override), kind)
        return fn(cfg, args)
    except ConfigError as exc:
        print(f"bslab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"bslab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"bslab: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        # bad parameter combinations that passed schema validation
        print(f"bslab: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
