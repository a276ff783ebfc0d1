"""
Command line entry point.

    decobec run <config> [--out DIR] [--workers N] [--format csv|json]
    decobec validate <config>
    decobec oracle-check <config>

Exit status: 0 success, 1 config error, 2 numerical failure, 3 resource cap.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import load_config
from .errors import AccuracyError, ConfigError, InvalidArgumentError, ResourceError
from .runner import OUTPUT_DIR_ENV, run

__all__ = ["main", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERICAL", "EXIT_RESOURCE"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_RESOURCE = 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decobec",
        description="Light-induced condensate dephasing scenarios.",
        epilog=f"Output goes to --out, else output.directory, else ${OUTPUT_DIR_ENV}, "
               "else ./decobec_out.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate a scenario and write its table")
    p_run.add_argument("config")
    p_run.add_argument("--out", metavar="DIR")
    p_run.add_argument("--workers", type=int, metavar="N")
    p_run.add_argument("--format", choices=("csv", "json"))

    p_val = sub.add_parser("validate", help="check a config and report every problem")
    p_val.add_argument("config")

    p_orc = sub.add_parser("oracle-check", help="compare closed forms with the Fock-space oracle")
    p_orc.add_argument("config")
    p_orc.add_argument("--out", metavar="DIR")
    return parser


def _report_config_error(exc: ConfigError) -> int:
    print("config error:", file=sys.stderr)
    for problem in exc.problems:
        print(f"  {problem}", file=sys.stderr)
    return EXIT_CONFIG


def _load(path):
    try:
        return load_config(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load(args.config)
        if args.command == "validate":
            print(f"ok: {cfg.scenario}")
            return EXIT_OK
        if args.command == "oracle-check":
            if cfg.scenario != "oracle_check":
                raise ConfigError(f"scenario: oracle-check needs scenario 'oracle_check', "
                                  f"got {cfg.scenario!r}")
            manifest = run(cfg, out_dir=args.out)
            print(manifest.to_json())
            if manifest.failures:
                return EXIT_NUMERICAL
            limit = cfg.params.max_deviation
            if manifest.max_deviation is None or manifest.max_deviation >= limit:
                print(f"max deviation {manifest.max_deviation} exceeds {limit}", file=sys.stderr)
                return EXIT_NUMERICAL
            return EXIT_OK
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers: must be >= 1")
        manifest = run(cfg, out_dir=args.out, workers=args.workers, fmt=args.format)
        print(manifest.to_json())
        if manifest.failures:
            for failure in manifest.failures:
                print(f"failed point {failure}", file=sys.stderr)
            return EXIT_NUMERICAL
        return EXIT_OK
    except ConfigError as exc:
        return _report_config_error(exc)
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (AccuracyError, InvalidArgumentError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
