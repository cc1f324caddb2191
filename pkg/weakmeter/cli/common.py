#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Arguments and plumbing shared by the run subcommands.
"""

import sys

try:
    from argcomplete.completers import FilesCompleter
    ARGCOMPLETE_AVAILABLE = True
except ImportError:
    ARGCOMPLETE_AVAILABLE = False


def add_run_arguments(parser):
    """
    Add --config, --out, --seed, --exact and --verbose to a run subcommand.

    Args:
        parser: The subcommand parser
    """
    config_arg = parser.add_argument(
        '-c', '--config',
        required=True,
        metavar='FILE',
        help='Run configuration (key = value lines)'
    )
    if ARGCOMPLETE_AVAILABLE:
        config_arg.completer = FilesCompleter()

    out_arg = parser.add_argument(
        '-o', '--out',
        default='-',
        metavar='FILE',
        help='Output CSV path (default: stdout)'
    )
    if ARGCOMPLETE_AVAILABLE:
        out_arg.completer = FilesCompleter()

    parser.add_argument(
        '--seed',
        type=int,
        default=None,
        metavar='N',
        help='Override the seed of the configuration'
    )

    parser.add_argument(
        '--exact',
        action='store_true',
        help='Use expected counts instead of sampled counts'
    )

    parser.add_argument(
        '-v', '--verbose',
        action='store_true',
        help='Verbose output'
    )


def overrides_from(args):
    """Raw configuration values given on the command line."""
    overrides = {}
    if args.seed is not None:
        overrides['seed'] = str(args.seed)
    if args.exact:
        overrides['exact'] = 'true'
    return overrides


def load_run(args, command):
    """
    Load the configuration of a run subcommand and build its manifest.

    Returns:
        tuple: (ExperimentConfig or SweepSpec, RunManifest)
    """
    from weakmeter.config import load_config
    from weakmeter.models import RunManifest
    from weakmeter.utils import checkhash

    params, model = load_config(args.config, command, overrides_from(args))
    manifest = RunManifest(
        command=command,
        config_path=str(args.config),
        config_sha256=checkhash(args.config),
        params=params,
        output_path=str(args.out),
    )
    return model, manifest


def emit(rows, row_model, manifest, args):
    """Write rows as CSV to --out (or stdout)."""
    from weakmeter.models import columns_of
    from weakmeter.output import emit_csv, write_output

    data = emit_csv(rows, manifest, columns=columns_of(row_model))
    write_output(data, args.out, stream=getattr(sys.stdout, "buffer", None))
