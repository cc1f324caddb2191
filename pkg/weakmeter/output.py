"""CSV emission with the run manifest as a comment header."""

import csv
import io
import logging

from .utils import format_number

logger = logging.getLogger(__name__)


def manifest_header(manifest):
    """``# key = value`` lines for every manifest item."""
    return "".join(f"# {key} = {value}\n" for key, value in manifest.header_items())


def emit_csv(table, manifest, columns=None):
    """
    Render rows as UTF-8 CSV bytes.

    Args:
        table (list): pydantic row models (or dicts) of one kind, in output order
        manifest (RunManifest): written as the comment header
        columns (list, optional): column names; taken from the first row when None

    Returns:
        bytes: header comments, column row and data rows, ``\\n`` line endings.
        An empty table gives the header only.
    """
    rows = [row if isinstance(row, dict) else row.model_dump() for row in table]
    if columns is None and rows:
        columns = [key for key in rows[0]]

    buffer = io.StringIO()
    buffer.write(manifest_header(manifest))
    if columns:
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if set(row) != set(columns):
                raise ValueError(f"row columns {sorted(row)} do not match {columns}")
            writer.writerow([format_number(row[column]) for column in columns])
    logger.debug(f"emitted {len(rows)} rows for {manifest.command}")
    return buffer.getvalue().encode("utf-8")


def write_output(data, path=None, stream=None):
    """Write emitted bytes to ``path``, or to ``stream`` (a binary stdout) when path is None or '-'."""
    if path is None or str(path) == "-":
        stream.write(data)
        stream.flush()
        return
    with open(path, "wb") as f:
        f.write(data)
    logger.info(f"wrote {len(data)} bytes to {path}")
