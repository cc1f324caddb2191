import hashlib
import math

import numpy as np


def point_generator(seed, *key):
    """Return the random stream of one sweep point.

    Streams are Philox (counter-based) generators keyed by ``(seed, *key)``,
    so a point draws the same numbers whatever order the points run in.

    Args:
        seed (int): Run seed (64-bit unsigned).
        *key (int): Spawn key, e.g. ``(point_index, run_index)``.

    Returns:
        numpy.random.Generator
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def format_number(value):
    """Render a cell in shortest round-trip form.

    None becomes an empty cell and booleans become ``true``/``false``.
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def checkhash(file):
    """Calculate SHA256 hash of a file.

    Args:
        file (str or Path): Path to the file to hash

    Returns:
        str: Hexadecimal SHA256 hash of the file
    """
    with open(file, "rb") as f:
        fdata = f.read()
        readable_hash = hashlib.sha256(fdata).hexdigest()
    return readable_hash
