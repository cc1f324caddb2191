#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
eval subcommand: model quantities at a single working point.
"""

from .common import add_run_arguments, emit, load_run


def register_subcommand(subparsers):
    """Register the eval subcommand."""
    parser = subparsers.add_parser(
        'eval',
        help='Print model values at a single working point',
        description='Print resolution, transition probability, weak value and predicted conditional values',
        formatter_class=lambda prog: __import__('argparse').RawDescriptionHelpFormatter(prog, max_help_position=35),
        epilog="""
Examples:
    # An empty file evaluates theta = 0.5 deg, phi = 2 deg, post-selection on H
    weakmeter eval -c point.cfg --exact

Output:
    quantity,value rows: eps_ideal, epsilon, eta_ideal, eta, weak_value,
    value_eq7, value_eq9, post_selection_probability, value_est, std_err,
    max_enhancement, max_enhancement_numeric (empty where undefined)
"""
    )
    add_run_arguments(parser)
    parser.set_defaults(func=execute)


def execute(args):
    """Evaluate the configured point and write the quantity table."""
    from weakmeter.experiment_sim import evaluate
    from weakmeter.models import QuantityRow

    cfg, manifest = load_run(args, 'eval')
    emit(evaluate(cfg), QuantityRow, manifest, args)
    return 0
