"""Experiment configuration loading and validation."""

import logging
import math
from dataclasses import asdict, dataclass
from importlib.resources import files
from pathlib import Path
from typing import IO, Any, Optional, Sequence, Union

from acsync.channel import NOISE_FREE, ChannelConfig
from acsync.modem import ConfigError, ModemConfig, Scheme
from acsync.override import process_overrides
from acsync.resolve import Resolver
from acsync.sources import get_sources, merge_all_sources
from acsync.sync import Metric, metric_span

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "QUICK_TRIALS",
    "experiment_file",
    "load_config",
    "load_experiment",
]

logger = logging.getLogger(__name__)

PACKAGED = files("acsync") / "configs"
DEFAULTS = PACKAGED / "defaults.yaml"
QUICK_TRIALS = 1000
MIN_EXPERIMENT_NFFT = 8

_SECTIONS = {
    "modem": {"scheme", "n_fft", "cp_len", "constellation_order"},
    "sync": {"metric", "corr_len", "search"},
    "channel": {"snr_db", "taps"},
    "run": {"trials", "seed", "workers", "output", "plot"},
}
_NOISE_FREE_WORDS = {"inf", "+inf", "infinity", "noise-free", "noise_free"}

SourceArg = Union[str, Path, IO[str], dict]


def load_config(
    source: Union[SourceArg, Sequence[SourceArg]] = (),
    overrides: Optional[list[str]] = None,
) -> dict:
    """Merge the packaged defaults with ``source`` files, apply dotted
    overrides, then resolve ``${...}`` references."""
    with DEFAULTS.open("r", encoding="utf-8") as f:
        sources = [f, *get_sources(source)]
        config = merge_all_sources(sources)
    config = process_overrides(config, overrides)
    return Resolver().resolve(config)


def experiment_file(name: Union[str, Path]) -> Path:
    """``name`` itself when it exists, else the packaged experiment of that name."""
    path = Path(name)
    if path.exists():
        return path
    packaged = PACKAGED / path.name
    if packaged.is_file():
        return Path(str(packaged))
    raise ConfigError(f"Experiment file not found: '{name}'")


def _int(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if int(value) != value or value < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def parse_snr(value: Any) -> float:
    """Numbers are dB values; ``inf``/``noise-free`` select the noise-free channel."""
    if isinstance(value, str):
        if value.strip().lower() in _NOISE_FREE_WORDS:
            return NOISE_FREE
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"Invalid SNR point {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"Invalid SNR point {value!r}")
    snr = float(value)
    if math.isnan(snr) or snr == -math.inf:
        raise ConfigError(f"Invalid SNR point {value!r}")
    return snr


def _enum(kind: type, value: Any, name: str) -> Any:
    try:
        return kind(str(value).lower())
    except ValueError:
        choices = ", ".join(m.value for m in kind)
        raise ConfigError(f"{name} must be one of {choices}, got {value!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: Scheme
    n_fft: int
    cp_len: int
    constellation_order: int
    metric: Metric
    corr_len: int
    snr_points: tuple[float, ...]
    trials: int
    seed: int
    search: Optional[tuple[int, int]] = None
    taps: Optional[tuple[float, ...]] = None
    workers: int = 1
    output_path: Optional[Path] = None
    plot: bool = False

    def __post_init__(self) -> None:
        if self.n_fft < MIN_EXPERIMENT_NFFT:
            raise ConfigError(
                f"Experiments need n_fft >= {MIN_EXPERIMENT_NFFT}, got {self.n_fft}"
            )
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.snr_points:
            raise ConfigError("At least one SNR point is required")
        if not 1 <= self.corr_len <= self.n_fft // 2:
            raise ConfigError(
                f"corr_len must lie in [1, {self.n_fft // 2}], got {self.corr_len}"
            )
        if self.metric is Metric.TIAN:
            if self.scheme is not Scheme.ACO:
                raise ConfigError("The tian metric needs scheme aco")
            if self.n_fft < 16:
                raise ConfigError("The tian metric needs n_fft >= 16")
        if self.search is not None and self.search[1] < self.search[0]:
            raise ConfigError(f"Empty search range {list(self.search)}")
        # builds and checks the modem and channel parameters
        self.modem_config()
        self.channel_config(self.snr_points[0])
        if self.search is not None:
            self._check_search_reachable()

    def _check_search_reachable(self) -> None:
        # offsets are relative to the training body of a three-frame stream
        frame = self.n_fft + self.cp_len
        origin = frame + self.cp_len
        first, last = metric_span(self.metric, self.n_fft, 3 * frame)
        assert self.search is not None
        if max(self.search[0], first - origin) > min(self.search[1], last - origin):
            raise ConfigError(
                f"search range {list(self.search)} lies outside the reachable "
                f"offsets [{first - origin}, {last - origin}]"
            )

    @classmethod
    def from_mapping(cls, config: dict[str, Any]) -> "ExperimentConfig":
        for section, value in config.items():
            if section not in _SECTIONS:
                raise ConfigError(f"Unknown config section '{section}'")
            if not isinstance(value, dict):
                raise ConfigError(f"Config section '{section}' must be a mapping")
            unknown = set(value) - _SECTIONS[section]
            if unknown:
                raise ConfigError(
                    f"Unknown keys in '{section}': {', '.join(sorted(map(str, unknown)))}"
                )
        modem, sync = config.get("modem", {}), config.get("sync", {})
        channel, run = config.get("channel", {}), config.get("run", {})

        snr = channel.get("snr_db")
        snr_points = snr if isinstance(snr, list) else [snr]
        search = sync.get("search")
        if search is not None:
            if not isinstance(search, list) or len(search) != 2:
                raise ConfigError(f"search must be [start, stop], got {search!r}")
            search = (_int(search[0], "search start", -(2**31)),
                      _int(search[1], "search stop", -(2**31)))
        taps = channel.get("taps")
        if taps is not None:
            if not isinstance(taps, list):
                raise ConfigError(f"taps must be a list of numbers, got {taps!r}")
            taps = tuple(float(t) for t in taps)
        output = run.get("output")

        return cls(
            scheme=_enum(Scheme, modem.get("scheme"), "scheme"),
            n_fft=_int(modem.get("n_fft"), "n_fft", 1),
            cp_len=_int(modem.get("cp_len"), "cp_len", 0),
            constellation_order=_int(
                modem.get("constellation_order"), "constellation_order", 2
            ),
            metric=_enum(Metric, sync.get("metric"), "metric"),
            corr_len=_int(sync.get("corr_len"), "corr_len", 1),
            snr_points=tuple(parse_snr(s) for s in snr_points),
            trials=_int(run.get("trials"), "trials", 1),
            seed=_int(run.get("seed"), "seed", 0),
            search=search,
            taps=taps,
            workers=_int(run.get("workers", 1), "workers", 1),
            output_path=None if output is None else Path(str(output)),
            plot=bool(run.get("plot", False)),
        )

    def modem_config(self) -> ModemConfig:
        return ModemConfig(self.scheme, self.n_fft, self.cp_len, self.constellation_order)

    def channel_config(self, snr_db: float) -> ChannelConfig:
        return ChannelConfig(snr_db, self.taps)

    def echo(self) -> dict[str, Any]:
        """Plain-type view of every parameter, for report headers."""
        out = asdict(self)
        out["scheme"] = self.scheme.value
        out["metric"] = self.metric.value
        out["snr_points"] = list(self.snr_points)
        out["search"] = None if self.search is None else list(self.search)
        out["taps"] = None if self.taps is None else list(self.taps)
        out["output_path"] = None if self.output_path is None else str(self.output_path)
        return out


def load_experiment(
    source: Union[SourceArg, Sequence[SourceArg]] = (),
    overrides: Optional[list[str]] = None,
) -> ExperimentConfig:
    config = ExperimentConfig.from_mapping(load_config(source, overrides))
    logger.debug("Loaded experiment %s", config.echo())
    return config
