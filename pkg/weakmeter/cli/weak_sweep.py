#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
weak-sweep subcommand: post-selected conditional values over the input angle.
"""

from .common import add_run_arguments, emit, load_run


def register_subcommand(subparsers):
    """Register the weak-sweep subcommand."""
    parser = subparsers.add_parser(
        'weak-sweep',
        help='Sweep the input polarization angle with post-selection',
        description='Estimate post-selected conditional values over a grid of input angles phi',
        formatter_class=lambda prog: __import__('argparse').RawDescriptionHelpFormatter(prog, max_help_position=35),
        epilog="""
Examples:
    # Weak-value enhancement curve around phi = 0 at theta = 0.5 deg
    weakmeter weak-sweep -c weak.cfg -o weak.csv

    # Noise-free model curve
    weakmeter weak-sweep -c weak.cfg --exact

Configuration keys used:
    theta_deg, v_hv, v_pm, phi_start_deg/phi_stop_deg/phi_step_deg (or phi_deg),
    post_select (default H), eta, n_photons, seed, monitor_fraction, exact, workers
"""
    )
    add_run_arguments(parser)
    parser.set_defaults(func=execute)


def execute(args):
    """Run the sweep and write its table. Exit 2 if no point had post-selected counts."""
    from weakmeter.errors import NoPostSelectedCounts
    from weakmeter.experiment_sim import sweep_weak_values
    from weakmeter.models import WeakSweepRow

    spec, manifest = load_run(args, 'weak-sweep')
    rows = sweep_weak_values(spec)
    if rows and all(row.note for row in rows):
        raise NoPostSelectedCounts(f"none of the {len(rows)} sweep points had post-selected counts")
    emit(rows, WeakSweepRow, manifest, args)
    return 0
