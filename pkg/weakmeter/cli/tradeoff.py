#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
tradeoff subcommand: resolution and back-action over the measurement strength.
"""

from .common import add_run_arguments, emit, load_run


def register_subcommand(subparsers):
    """Register the tradeoff subcommand."""
    parser = subparsers.add_parser(
        'tradeoff',
        help='Sweep the HWP angle and estimate resolution and back-action',
        description='Estimate (epsilon, 2 eta_HV) over a grid of HWP angles theta',
        formatter_class=lambda prog: __import__('argparse').RawDescriptionHelpFormatter(prog, max_help_position=35),
        epilog="""
Examples:
    # Default grid 0 ... 22.5 deg in steps of 2.5 deg, input at phi = 25 deg
    weakmeter tradeoff -c tradeoff.cfg -o tradeoff.csv

    # Visibility ellipse without shot noise
    weakmeter tradeoff -c tradeoff.cfg --exact

Configuration keys used:
    theta_start_deg/theta_stop_deg/theta_step_deg, phi_deg (default 25),
    v_hv, v_pm, n_photons, seed, monitor_fraction, exact, workers
"""
    )
    add_run_arguments(parser)
    parser.set_defaults(func=execute)


def execute(args):
    """Run the trade-off sweep and write its table."""
    from weakmeter.experiment_sim import sweep_tradeoff
    from weakmeter.models import TradeoffRow

    spec, manifest = load_run(args, 'tradeoff')
    emit(sweep_tradeoff(spec), TradeoffRow, manifest, args)
    return 0
