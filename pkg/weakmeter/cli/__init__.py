#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
weakmeter CLI - simulated weak measurement of photon PM polarization.

Available subcommands:
    weak-sweep  Post-selected conditional values over the input angle
    tradeoff    Resolution and back-action over the measurement strength
    calibrate   Resolution from a P-polarized input
    eval        Model values at one working point
    config      Inspect or create run configuration files
    completion  Install shell autocomplete

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

import argparse
import logging
import sys

try:
    import argcomplete
    ARGCOMPLETE_AVAILABLE = True
except ImportError:
    ARGCOMPLETE_AVAILABLE = False

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def build_parser():
    """Argument parser with every subcommand registered."""
    parser = argparse.ArgumentParser(
        prog='weakmeter',
        description='Simulate a variable-strength measurement of photon PM polarization',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Available commands:
    weak-sweep  Post-selected conditional values over phi
    tradeoff    Resolution and back-action over theta
    calibrate   Measurement resolution from a P-polarized input
    eval        Model values at a single working point
    config      Inspect or create run configuration files
    completion  Install shell autocomplete

Examples:
    weakmeter config init weak-sweep -o weak.cfg
    weakmeter weak-sweep -c weak.cfg -o weak.csv
    weakmeter tradeoff -c tradeoff.cfg --exact
    weakmeter calibrate -c strong.cfg --seed 7
    weakmeter eval -c point.cfg --exact
"""
    )

    parser.add_argument(
        '--version',
        action='version',
        version='%(prog)s 1.0.0'
    )

    # Subcommand parsers
    subparsers = parser.add_subparsers(
        title='commands',
        dest='command',
        help='Available commands'
    )

    # Import subcommands
    from . import weak_sweep, tradeoff, calibrate, completion, config as config_cmd, eval as eval_cmd

    # Register subcommands
    weak_sweep.register_subcommand(subparsers)
    tradeoff.register_subcommand(subparsers)
    calibrate.register_subcommand(subparsers)
    eval_cmd.register_subcommand(subparsers)
    config_cmd.register_subcommand(subparsers)
    completion.register_subcommand(subparsers)

    return parser


def configure_logging(verbose=False):
    """Diagnostics go to stderr; data never does."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )


def run(argv=None):
    """
    Parse ``argv`` and execute the selected subcommand.

    Args:
        argv (list, optional): arguments without the program name; sys.argv[1:] when None

    Returns:
        int: exit code
    """
    from weakmeter.errors import ConfigError, WeakmeterError

    parser = build_parser()

    # Enable shell completion if argcomplete is available
    if ARGCOMPLETE_AVAILABLE:
        argcomplete.autocomplete(parser)

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    # If no command specified, show help
    if args.command is None or not hasattr(args, 'func'):
        parser.print_help(sys.stderr)
        return EXIT_CONFIG

    configure_logging(getattr(args, 'verbose', False))

    try:
        code = args.func(args)
    except ConfigError as e:
        print(f"Error: {getattr(args, 'config', 'configuration')}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except WeakmeterError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as e:
        # only a missing --config file is a configuration error
        if isinstance(e, FileNotFoundError) and str(e.filename) == str(getattr(args, 'config', None)):
            print(f"Error: file not found: {e.filename}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK if code is None else code


def main():
    """Main entry point for the weakmeter CLI."""
    sys.exit(run())


if __name__ == '__main__':
    main()
