"""
Run configuration parsing for weakmeter.
"""

from .config import (
    COMMANDS,
    angle_grid,
    build_config,
    default_parameters,
    load_config,
    parse_config,
    read_manifest,
    render_parameters,
    resolve_parameters,
)

__all__ = [
    "COMMANDS",
    "angle_grid",
    "build_config",
    "default_parameters",
    "load_config",
    "parse_config",
    "read_manifest",
    "render_parameters",
    "resolve_parameters",
]
