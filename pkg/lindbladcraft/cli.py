import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from lindbladcraft import __version__
from lindbladcraft.config.loader import get_preset_config, preset_names
from lindbladcraft.ensemble.io import to_jsonable, write_meta_json
from lindbladcraft.errors import ConfigError, LindbladCraftError, RunFailureError
from lindbladcraft.lindbladcraft import LindbladCraft
from lindbladcraft.logger import get_logger, setup_structlog
from lindbladcraft.models.catalog import ModelCatalog
from lindbladcraft.stochastic.diagnostics import sampler_diagnostics
from lindbladcraft.stochastic.increments import DEFAULT_TRUNCATION

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUN_FAILURE = 3
EXIT_IO = 4

EXPERIMENTS = {
    "run": LindbladCraft.run,
    "compare": LindbladCraft.compare,
    "converge": LindbladCraft.converge,
    "rpm-yield": LindbladCraft.rpm_yield,
}


def _add_experiment(subparsers, name: str, help_text: str) -> None:
    parser = subparsers.add_parser(name, help=help_text)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="JSON run configuration")
    source.add_argument("--preset", choices=preset_names(), help="Shipped configuration")
    parser.add_argument("--out", type=Path, help="Output directory (default: outputs.directory)")
    parser.add_argument("--threads", type=int, help="Worker count (default: available cores)")
    parser.add_argument("--seed", type=int, help="Master seed override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lindbladcraft", description="Lindblad trajectory simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    parser.add_argument("--json-logs", action="store_true", help="One JSON object per log line")
    subparsers = parser.add_subparsers(dest="command", required=True)

    _add_experiment(subparsers, "run", "Run every configured scheme and write results")
    _add_experiment(subparsers, "compare", "Time-averaged error per scheme against the exact solver")
    _add_experiment(subparsers, "converge", "Weak-order regression over the configured step lengths")
    _add_experiment(subparsers, "rpm-yield", "Singlet yield against field angle")

    models = subparsers.add_parser("models", help="Built-in models")
    models.add_subparsers(dest="models_command", required=True).add_parser("list", help="List built-in models")

    diag = subparsers.add_parser("sampler-diag", help="Check step-coefficient variances")
    diag.add_argument("--delta", type=float, default=0.25)
    diag.add_argument("--truncation", type=int, default=DEFAULT_TRUNCATION)
    diag.add_argument("--samples", type=int, default=1_000_000)
    diag.add_argument("--seed", type=int, default=0)
    diag.add_argument("--out", type=Path, help="Write sampler.json into this directory")
    return parser


def _experiment(args) -> int:
    config = get_preset_config(args.preset) if args.preset else None
    craft = LindbladCraft(config_file=None if config else str(args.config), config=config)
    result = EXPERIMENTS[args.command](craft, out_dir=args.out, seed=args.seed, workers=args.threads)
    if args.command in ("compare", "rpm-yield"):
        rows = [{k: v for k, v in row.items() if k != "repeat_errors"} for row in result]
        print(json.dumps(to_jsonable(rows), indent=2))
    elif args.command == "converge":
        orders = {
            label: {
                "slope": order.slope,
                "ci": order.ci,
                "inconclusive": order.inconclusive,
                "below_noise_floor": order.below_noise_floor,
            }
            for label, order in result.items()
        }
        print(json.dumps(to_jsonable(orders), indent=2))
    return EXIT_OK


def _sampler(args) -> int:
    diagnostics = sampler_diagnostics(args.delta, args.truncation, args.samples, args.seed)
    report = {
        "delta": diagnostics.delta,
        "truncation": diagnostics.truncation,
        "n_samples": diagnostics.n_samples,
        "ks_pvalue": diagnostics.ks_pvalue,
        "truncation_mse_bound": diagnostics.truncation_mse_bound,
        "coefficients": [
            {
                "name": check.name,
                "expected_variance": check.expected,
                "empirical_variance": check.empirical,
                "relative_error": check.relative_error,
                "ok": check.ok,
            }
            for check in diagnostics.checks
        ],
    }
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_meta_json(report, args.out / "sampler.json")
    print(json.dumps(report, indent=2))
    return EXIT_OK if diagnostics.ok else EXIT_RUN_FAILURE


def _models() -> int:
    for name, description in ModelCatalog.describe():
        print(f"{name:<10} {description}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_structlog(log_level=args.log_level, json_logs=args.json_logs)
    try:
        if args.command == "models":
            return _models()
        if args.command == "sampler-diag":
            return _sampler(args)
        return _experiment(args)
    except (ConfigError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG
    except RunFailureError as e:
        logger.error(f"Run failed ({e.aborted_fraction:.1%} aborted): {e}")
        return EXIT_RUN_FAILURE
    except LindbladCraftError as e:
        logger.exception(e)
        return EXIT_RUN_FAILURE
    except OSError as e:
        logger.error(f"IO error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
