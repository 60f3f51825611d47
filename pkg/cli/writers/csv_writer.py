import csv
import math
from pathlib import Path

from fair_sor_api.errors import InvalidInputError


def cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value)) if math.isfinite(value) else ""
    return str(value)


def write_rows(path, header, rows):
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([cell(row[column]) for column in header])
    except OSError as error:
        raise InvalidInputError(f"Cannot write {path}: {error.strerror or error}")
    return path
