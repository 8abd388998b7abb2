"""Command line interface: sigma, simulate, test, report."""

from __future__ import annotations

import argparse
import sys

from . import harness, spectra

_SUITE_REPORT_NAMES = {
    "variance": "variance_test",
    "ecf": "ecf_test",
    "normality": "normality_test",
    "kurtosis": "kurtosis_test",
    "cross_term": "cross_term_test",
    "moment_scaling": "moment_scaling_test",
    "concentration": "concentration_test",
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="scenery",
        description="Simulate and verify rescaled Brownian occupation "
                    "functionals in Gaussian and Poissonian sceneries.")
    sub = parser.add_subparsers(dest="command", required=True)

    sigma = sub.add_parser("sigma", help="print the limit constant table "
                                         "for a config's potential")
    sigma.add_argument("--config", required=True)

    simulate = sub.add_parser("simulate", help="run the experiment and "
                                               "persist all artifacts")
    simulate.add_argument("--config", required=True)
    simulate.add_argument("--out", required=True)

    test = sub.add_parser("test", help="run the experiment and judge "
                                       "selected suites")
    test.add_argument("--config", required=True)
    test.add_argument("--suite", nargs="+", required=True)

    report = sub.add_parser("report", help="summarize a persisted run")
    report.add_argument("--in", dest="in_dir", required=True)
    return parser


def _cmd_sigma(args):
    config = harness.load_config(args.config)
    model, d, mode = config.model, config.dimension, config.mode
    sigma = spectra.sigma_limit(model, d, mode)
    print("d,mode,sigma,sigma_squared")
    print(f"{d},{mode},{sigma:.12g},{sigma * sigma:.12g}")
    if mode == "nondegenerate" and d >= 3:
        spec_route, real_route = spectra.sigma_routes(model)
        rel = abs(spec_route - real_route) / spec_route
        print(f"# spectral route {spec_route:.12g}, real-space route "
              f"{real_route:.12g}, relative gap {rel:.3g}")
    return 0


def _cmd_simulate(args):
    config = harness.load_config(args.config)
    result = harness.run_experiment(config, out_dir=args.out)
    failed = [r.name for r in result.reports if r.gated and not r.passed]
    print(f"wrote artifacts to {result.out_dir}")
    print(f"gated failures: {', '.join(failed) if failed else 'none'}")
    return result.exit_code


def _cmd_test(args):
    config = harness.load_config(args.config)
    unknown = [s for s in args.suite if s not in _SUITE_REPORT_NAMES]
    if unknown:
        raise harness.ConfigError(f"unknown suites: {unknown}")
    missing = [s for s in args.suite if s not in config.suites]
    if missing:
        raise harness.ConfigError(f"suites not in the config: {missing}")
    result = harness.run_experiment(config)
    wanted = {_SUITE_REPORT_NAMES[s] for s in args.suite}
    exit_code = 0
    for rep in result.reports:
        if rep.name not in wanted or rep.metadata.get("negative_control"):
            continue
        verdict = "pass" if rep.passed else "FAIL"
        if not rep.gated:
            verdict += " (advisory)"
        elif not rep.passed:
            exit_code = 1
        target = "-" if rep.target is None else f"{rep.target:.6g}"
        print(f"{rep.name}: statistic={rep.statistic:.6g} target={target} "
              f"gate[{rep.gate}] {verdict}")
    return exit_code


def _cmd_report(args):
    summary, exit_code = harness.report(args.in_dir)
    print(summary, end="")
    return exit_code


def main(argv=None):
    args = _build_parser().parse_args(argv)
    handler = {"sigma": _cmd_sigma, "simulate": _cmd_simulate,
               "test": _cmd_test, "report": _cmd_report}[args.command]
    try:
        return handler(args)
    except (harness.ConfigError, FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
