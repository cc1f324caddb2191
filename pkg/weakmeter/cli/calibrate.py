#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
calibrate subcommand: measurement resolution from a P-polarized input.
"""

from .common import add_run_arguments, emit, load_run


def register_subcommand(subparsers):
    """Register the calibrate subcommand."""
    parser = subparsers.add_parser(
        'calibrate',
        help='Estimate the measurement resolution with a maximally PM-polarized input',
        description='Estimate epsilon = v_hv sin(4 theta) from branch counts without polarizers',
        formatter_class=lambda prog: __import__('argparse').RawDescriptionHelpFormatter(prog, max_help_position=35),
        epilog="""
Examples:
    # Strong-limit calibration (theta_deg = 22.5, v_hv = 0.71 in the file)
    weakmeter calibrate -c strong.cfg

Configuration keys used:
    theta_deg, v_hv, v_pm, phi_deg (default 45), n_photons, seed, monitor_fraction, exact
"""
    )
    add_run_arguments(parser)
    parser.set_defaults(func=execute)


def execute(args):
    """Run the calibration and write its single row."""
    from weakmeter.experiment_sim import calibrate
    from weakmeter.models import CalibrationRow

    cfg, manifest = load_run(args, 'calibrate')
    emit([calibrate(cfg)], CalibrationRow, manifest, args)
    return 0
