import json
import sys

from cli.constants import EXIT_INFEASIBLE, EXIT_INVALID_INPUT
from fair_sor_api.errors import InvalidInputError


def exit_code_for(error):
    if isinstance(error, InvalidInputError):
        return EXIT_INVALID_INPUT
    return EXIT_INFEASIBLE


def write_error(error, title=None):
    data = {
        "error": type(error).__name__,
        "title": title if title is not None else getattr(error, "title", "Error"),
        "message": str(error),
    }
    sys.stderr.write(json.dumps(data) + "\n")
    return exit_code_for(error)
