"""Command-line interface: ``tdcshell {formfind,solve,converge,sweep}``.

Exit codes: 0 success, 1 configuration error, 2 file error, 3 solver failure.
"""
import argparse
import contextlib
import logging
import sys

from .config import SCENARIOS, default_config, load_config
from .errors import ConfigError, MeshParseError, ParameterError, TdcError
from . import scenarios

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_SOLVER = 0, 1, 2, 3

_DEFAULT_SCENARIO = {"formfind": "formfind-catenoid", "solve": "solve-cylinder-load",
                     "converge": "formfind-catenoid", "sweep": "solve-spheroid-pressure"}


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI scenario file")
    common.add_argument("--scenario", choices=SCENARIOS,
                        help="named scenario with built-in defaults (ignored with --config)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides [output])")
    common.add_argument("--threads", type=int, metavar="N", help="BLAS/LAPACK thread limit")
    common.add_argument("--iso-p2", action="store_true",
                        help="isoparametric P2 displacements instead of P1 on P2 geometry")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tdcshell",
                                description="Membrane shell solver and minimal-surface form finding")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("formfind", parents=[common], help="minimal-surface form finding")
    sub.add_parser("solve", parents=[common], help="single equilibrium solve")
    c = sub.add_parser("converge", parents=[common], help="mesh refinement study")
    c.add_argument("--levels", type=int, help="number of refinement levels (>= 3)")
    sub.add_parser("sweep", parents=[common], help="follower-pressure sweep")
    return p


def _config(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = default_config(args.scenario or _DEFAULT_SCENARIO[args.command])
    if args.iso_p2:
        cfg = cfg.with_iso_p2()
    if args.command == "formfind" and not cfg.name.startswith("formfind"):
        raise ConfigError(f"formfind needs a formfind-* scenario, got {cfg.name}")
    if args.command == "solve" and not cfg.name.startswith("solve"):
        raise ConfigError(f"solve needs a solve-* scenario, got {cfg.name}")
    if args.command == "sweep" and cfg.load.kind != "pressure":
        raise ConfigError("sweep needs a scenario with [load] kind = pressure")
    return cfg


def _threads(n):
    if n is None:
        return contextlib.nullcontext()
    if n < 1:
        raise ConfigError("--threads must be >= 1")
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # optional dependency
        logging.getLogger(__name__).warning("threadpoolctl not installed; --threads ignored")
        return contextlib.nullcontext()
    return threadpool_limits(limits=n)


def _run(args, cfg, out):
    if args.command == "formfind":
        r = scenarios.run_formfind(cfg, out)
        print(f"iterations: {r.state.iteration}  converged: {r.state.converged}  "
              f"area: {r.area:.15e} m^2")
        if cfg.name == "formfind-catenoid":
            print(f"catenoid area: {r.reference_area:.15e} m^2  error: {r.area_error:.3e} m^2")
        return EXIT_OK if r.state.converged else EXIT_SOLVER
    if args.command == "solve":
        r = scenarios.run_solve(cfg, out)
        print(r.report.to_table())
        return EXIT_OK
    if args.command == "converge":
        t = scenarios.run_convergence_study(cfg, args.levels, out)
        sys.stdout.write(t.to_csv())
        sys.stdout.write(t.summary())
        return EXIT_OK
    r = scenarios.run_pressure_sweep(cfg, out)
    sys.stdout.write(r.to_csv())
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        out = args.out or cfg.output.directory
        with _threads(args.threads):
            return _run(args, cfg, out)
    except (ConfigError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, MeshParseError) as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TdcError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
