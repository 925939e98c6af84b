"""Configuration files, parameter sweeps, CSV/SVG output and the CLI."""
from .config import ParsedConfig, dump_config, load_config, parse_config
from .output import emit_csv, emit_svg, format_csv
from .sweep import Axis, RunRecord, SweepSpec, parse_sweep, run_single, run_sweep

__all__ = ["Axis", "ParsedConfig", "RunRecord", "SweepSpec", "dump_config", "emit_csv",
           "emit_svg", "format_csv", "load_config", "parse_config", "parse_sweep",
           "run_single", "run_sweep"]
