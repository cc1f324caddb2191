#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Config subcommand for inspecting and creating run configurations.

Shows the fully resolved parameters of a file (every default included) and
writes starter files.
"""

import sys

COMMAND_CHOICES = ['weak-sweep', 'tradeoff', 'calibrate', 'eval']


def register_subcommand(subparsers):
    """Register the config subcommand."""
    parser = subparsers.add_parser(
        'config',
        help='Inspect or create run configuration files',
        description='Resolve run configuration files and write starter files',
        formatter_class=lambda prog: __import__('argparse').RawDescriptionHelpFormatter(prog, max_help_position=35),
        epilog="""
Examples:
    # Write a weak-sweep starter file with every default spelled out
    weakmeter config init weak-sweep -o weak.cfg

    # Show what a file resolves to for the tradeoff command
    weakmeter config show tradeoff -c tradeoff.cfg

    # Get a single resolved value
    weakmeter config get eval -c point.cfg phi_deg

Configuration keys:
    theta_deg           HWP angle (default 0.5)
    v_hv, v_pm          interference visibilities (default 1)
    phi_deg             input angle (default 2; 25 for tradeoff, 45 for calibrate)
    phi_start_deg ...   phi grid for weak-sweep (start, stop, step)
    theta_start_deg ... theta grid for tradeoff (default 0, 22.5, 2.5)
    n_photons, seed     photon budget per run (default 1000000) and seed (42)
    post_select         H, V, P, M, phi:<deg> or none (default H for weak-sweep and eval)
    analysis            pm_branch or hv_output
    monitor_fraction    fraction of photons sent to the intensity monitor
    exact               use expected counts (true/false)
    eta                 fixed transition probability for predictions (default: sin^2 2 theta)
    workers             threads for sweep points
"""
    )

    subparsers_config = parser.add_subparsers(
        title='config commands',
        dest='config_command',
        help='Configuration operations'
    )

    # init - write defaults
    init_parser = subparsers_config.add_parser(
        'init',
        help='Write a configuration file holding every default'
    )
    init_parser.add_argument('run_command', metavar='command', choices=COMMAND_CHOICES, help='Run command the file is for')
    init_parser.add_argument('-o', '--out', default='-', metavar='FILE', help='Destination (default: stdout)')
    init_parser.add_argument('--force', action='store_true', help='Overwrite an existing file')
    init_parser.set_defaults(func=cmd_init)

    # show - resolve a file
    show_parser = subparsers_config.add_parser(
        'show',
        help='Show the resolved parameters of a configuration file'
    )
    show_parser.add_argument('run_command', metavar='command', choices=COMMAND_CHOICES, help='Run command to resolve for')
    show_parser.add_argument('-c', '--config', required=True, metavar='FILE', help='Configuration file')
    show_parser.set_defaults(func=cmd_show)

    # get - one resolved value
    get_parser = subparsers_config.add_parser(
        'get',
        help='Get a resolved configuration value'
    )
    get_parser.add_argument('run_command', metavar='command', choices=COMMAND_CHOICES, help='Run command to resolve for')
    get_parser.add_argument('-c', '--config', required=True, metavar='FILE', help='Configuration file')
    get_parser.add_argument('key', help='Configuration key to retrieve')
    get_parser.set_defaults(func=cmd_get)

    # If no subcommand provided, show help
    parser.set_defaults(func=lambda args: parser.print_help() or 1)


def _resolved(args):
    from weakmeter.config import load_config

    params, _ = load_config(args.config, args.run_command)
    return params


def cmd_init(args):
    """Write the defaults of a command as a configuration document."""
    from pathlib import Path
    from weakmeter.config import default_parameters, render_parameters

    text = f"# weakmeter {args.run_command} configuration\n" + render_parameters(default_parameters(args.run_command))
    if args.out == '-':
        sys.stdout.write(text)
        return 0

    path = Path(args.out)
    if path.exists() and not args.force:
        print(f"Error: {path} already exists (use --force to overwrite)", file=sys.stderr)
        return 1
    path.write_text(text, encoding='utf-8')
    print(f"✓ Configuration saved to: {path}", file=sys.stderr)
    return 0


def cmd_show(args):
    """Show the resolved parameters, validating them on the way."""
    from weakmeter.config import render_parameters

    sys.stdout.write(render_parameters(_resolved(args)))
    return 0


def cmd_get(args):
    """Print one resolved value."""
    params = _resolved(args)
    if args.key not in params:
        print(f"Error: Unknown config key: {args.key}", file=sys.stderr)
        return 1
    print(params[args.key])
    return 0
