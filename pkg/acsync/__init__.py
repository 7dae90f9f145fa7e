"""
ACSYNC: frame timing synchronization for asymmetrically clipped optical OFDM.
"""

from .bench import TrialReport, run_detection_sweep, run_metric_average
from .channel import ChannelConfig, apply_channel, build_stream
from .config import ExperimentConfig, load_config, load_experiment
from .modem import ConfigError, ModemConfig, Scheme, demodulate, modulate
from .report import emit_csv, emit_plot
from .sync import Metric, compute_metric, detect

__all__ = [
    "ChannelConfig",
    "ConfigError",
    "ExperimentConfig",
    "Metric",
    "ModemConfig",
    "Scheme",
    "TrialReport",
    "apply_channel",
    "build_stream",
    "compute_metric",
    "demodulate",
    "detect",
    "emit_csv",
    "emit_plot",
    "load_config",
    "load_experiment",
    "modulate",
    "run_detection_sweep",
    "run_metric_average",
]
