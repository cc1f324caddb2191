#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
completion subcommand: enable argcomplete-based shell completion for weakmeter.
"""

import os
import sys
from pathlib import Path

PROG = 'weakmeter'
SHELLS = ('bash', 'zsh', 'fish', 'tcsh')

_REGISTER = f'register-python-argcomplete {PROG}'

# shell -> (file that receives the snippet, snippet lines)
TARGETS = {
    'bash': ('~/.bashrc', [f'eval "$({_REGISTER})"']),
    'zsh': ('~/.zshrc', ['autoload -U bashcompinit', 'bashcompinit', f'eval "$({_REGISTER})"']),
    'fish': (f'~/.config/fish/completions/{PROG}.fish', [f'register-python-argcomplete --shell fish {PROG} | source']),
    'tcsh': ('~/.tcshrc', [f'eval `register-python-argcomplete --shell tcsh {PROG}`']),
}


def register_subcommand(subparsers):
    """Register the completion subcommand."""
    parser = subparsers.add_parser(
        'completion',
        help=f'Enable shell completion for {PROG}',
        description=f'Append the argcomplete hook for {PROG} to your shell startup file',
        formatter_class=lambda prog: __import__('argparse').RawDescriptionHelpFormatter(prog, max_help_position=35),
        epilog=f"""
Examples:
    {PROG} completion              # shell taken from $SHELL
    {PROG} completion zsh
    {PROG} completion bash --print # show the lines without writing them
"""
    )
    parser.add_argument('shell', nargs='?', choices=SHELLS, help='Target shell (default: from $SHELL)')
    parser.add_argument('--print', action='store_true', help='Print the snippet instead of installing it')
    parser.set_defaults(func=execute)


def detect_shell(shell_env=None):
    """Shell name found in $SHELL (or ``shell_env``), None if unknown."""
    shell_env = os.environ.get('SHELL', '') if shell_env is None else shell_env
    name = Path(shell_env).name
    for shell in SHELLS:
        if shell in name:
            return shell
    return None


def completion_script(shell):
    """Lines that hook weakmeter into ``shell``'s completion."""
    return list(TARGETS[shell][1])


def install_completion(shell, home=None):
    """
    Append the completion snippet to the shell's startup file.

    Args:
        shell (str): one of SHELLS
        home (str, optional): home directory; ``~`` is expanded when None

    Returns:
        int: exit code
    """
    target, lines = TARGETS[shell]
    path = Path(target.replace('~', home, 1)) if home else Path(target).expanduser()

    if path.exists() and lines[-1] in path.read_text():
        print(f"✓ Completion already installed in {path}", file=sys.stderr)
        return 0

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'a') as f:
        f.write(f'\n# {PROG} CLI completion\n')
        f.write(''.join(f'{line}\n' for line in lines))

    print(f"✓ Added completion to {path}", file=sys.stderr)
    if shell != 'fish':
        print(f"  Run 'source {target}' or open a new terminal to activate it.", file=sys.stderr)
    return 0


def execute(args):
    """Install or print the completion snippet."""
    try:
        import argcomplete  # noqa: F401
    except ImportError:
        print("Error: argcomplete is not installed (pip install argcomplete)", file=sys.stderr)
        return 1

    shell = args.shell or detect_shell()
    if shell is None:
        print(f"Error: cannot tell the shell from $SHELL; run e.g. '{PROG} completion bash'", file=sys.stderr)
        return 1

    if args.print:
        print('\n'.join(completion_script(shell)))
        return 0
    return install_completion(shell)
