"""
CLI Module

Command-line front end:
- INI run configuration validated by pydantic
- Subcommands spectrum, slowlight, store, sweep, optimize, estimate
- Atomic CSV/JSON writers
"""

from .main import build_parser, dispatch, main
from .run_config import RunConfig, dump_run_config, load_run_config

__all__ = ["build_parser", "dispatch", "main", "RunConfig", "dump_run_config", "load_run_config"]
