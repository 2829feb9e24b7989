"""CSV table access: header checks and typed column extraction.

Tables are read as raw string records plus a header list; renderers parse
the columns they need. Schema violations raise SchemaError with the
offending column names so the CLI can report them verbatim.
"""

import csv


class SchemaError(ValueError):
    """The CSV does not carry the columns a figure kind needs."""


def read_table(path):
    """Header list and string-valued records of one CSV file."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("csv has no header row") from None
        rows = [dict(zip(header, record)) for record in reader]
    return header, rows


def require_columns(header, needed):
    missing = [name for name in needed if name not in header]
    if missing:
        raise SchemaError("csv missing column(s): "
                          + ", ".join(f"'{name}'" for name in missing))


def floats(rows, key):
    return [float(row[key]) for row in rows]


def series_columns(header, prefix):
    """Indexed column group like sigma_1..sigma_w, in index order."""
    found = []
    for name in header:
        tail = name[len(prefix):] if name.startswith(prefix) else ""
        if tail.isdigit():
            found.append((int(tail), name))
    return [name for _, name in sorted(found)]


def group_rows(rows, key_of):
    """Rows bucketed by key, buckets in first-seen order."""
    groups: dict = {}
    for row in rows:
        groups.setdefault(key_of(row), []).append(row)
    return groups
