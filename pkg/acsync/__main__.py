import argparse
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional, Tuple

from acsync.bench import run_detection_sweep, run_metric_average
from acsync.config import QUICK_TRIALS, ExperimentConfig, experiment_file, load_experiment
from acsync.merge import MergeError
from acsync.modem import ConfigError
from acsync.override import OverrideError, is_override
from acsync.resolve import ExpressionError
from acsync.report import emit_csv, emit_plot
from acsync.sources import IncludeError
from acsync.tags import ResolutionError, TagError

logger = logging.getLogger("acsync")

# problems in what the user asked for, answered with the usage text
USER_ERRORS = (
    ConfigError,
    ValueError,
    IncludeError,
    MergeError,
    OverrideError,
    ExpressionError,
    ResolutionError,
    TagError,
)

COMMANDS = {
    "metric-avg": run_metric_average,
    "detect-sweep": run_detection_sweep,
}

USAGE = """Usage: acsync {metric-avg|detect-sweep} [experiment.yaml ...] [flags] [acsync.key=value ...]

Examples:
    acsync metric-avg aco_average.yaml --trials 1000
    acsync metric-avg --scheme pamdmt --nfft 512 --corr-len 255 --plot
    acsync detect-sweep sweep_low_snr.yaml --quick --workers 4
    acsync detect-sweep --metric tian --snr 0 --snr 5 --snr inf acsync.run.seed=7"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acsync", add_help=True)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--scheme", choices=["aco", "pamdmt", "dht"])
    parser.add_argument("--metric", choices=["proposed", "tian", "schmidl", "park"])
    parser.add_argument("--nfft", type=int)
    parser.add_argument("--cp", type=int, help="cyclic prefix length (default nfft/8)")
    parser.add_argument("--mod", type=int, help="constellation order")
    parser.add_argument("--corr-len", type=int, dest="corr_len")
    parser.add_argument(
        "--snr", action="append", help="SNR point in dB or 'inf'; repeatable"
    )
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", type=Path)
    parser.add_argument("--plot", action="store_true", default=None)
    parser.add_argument(
        "--quick", action="store_true", help=f"{QUICK_TRIALS} trials unless --trials"
    )
    parser.add_argument("--workers", type=int)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def flag_source(args: argparse.Namespace) -> dict[str, Any]:
    """Nested config mapping holding only the flags that were given."""
    source: dict[str, dict[str, Any]] = {}

    def put(section: str, key: str, value: Any) -> None:
        if value is not None:
            source.setdefault(section, {})[key] = value

    put("modem", "scheme", args.scheme)
    put("modem", "n_fft", args.nfft)
    put("modem", "cp_len", args.cp)
    put("modem", "constellation_order", args.mod)
    put("sync", "metric", args.metric)
    put("sync", "corr_len", args.corr_len)
    put("channel", "snr_db", args.snr)
    put("run", "trials", QUICK_TRIALS if args.quick and args.trials is None else args.trials)
    put("run", "seed", args.seed)
    put("run", "output", None if args.out is None else str(args.out))
    put("run", "plot", args.plot)
    put("run", "workers", args.workers)
    return source


def parse_args(
    argv: List[str],
) -> Tuple[argparse.Namespace, list[Path], list[str]]:
    args, rest = build_parser().parse_known_args(argv)
    files, overrides = [], []
    for arg in rest:
        if is_override(arg):
            overrides.append(arg)
        elif arg.startswith("-"):
            raise ValueError(f"Unknown flag {arg}")
        else:
            files.append(experiment_file(arg))
    return args, files, overrides


def output_paths(config: ExperimentConfig, command: str) -> Tuple[Path, Optional[Path]]:
    csv = config.output_path or Path(f"acsync-{command}.csv")
    return csv, csv.with_suffix(".svg") if config.plot else None


def run(argv: List[str]) -> int:
    args, files, overrides = parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
    config = load_experiment([*files, flag_source(args)], overrides)
    report = COMMANDS[args.command](config)
    csv, svg = output_paths(config, args.command)
    emit_csv(report, csv)
    if svg is not None:
        emit_plot(report, svg)
    print(csv)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except USER_ERRORS as e:
        print(f"Error: {e}\n\n{USAGE}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.debug("experiment failed", exc_info=True)
        print(f"Error running experiment: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
