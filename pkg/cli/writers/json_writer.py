import json
import math
import sys
from pathlib import Path

from fair_sor_api.errors import InvalidInputError


def finite(data):
    """Copy of data with inf and nan floats replaced by None."""
    if isinstance(data, float):
        return data if math.isfinite(data) else None
    if isinstance(data, dict):
        return {key: finite(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [finite(value) for value in data]
    return data


def dumps(data):
    return json.dumps(finite(data), indent=1, allow_nan=False) + "\n"


def write_json(data, out=None):
    """Write data to the file out, or to stdout when no file is given."""
    text = dumps(data)
    if out is None:
        sys.stdout.write(text)
        return None
    path = Path(out)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as error:
        raise InvalidInputError(f"Cannot write {path}: {error.strerror or error}")
    return path
