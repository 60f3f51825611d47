import logging

from cli.constants import DEFAULT_K, DEFAULT_T, EXIT_OK
from cli.writers.error_writer import write_error
from fair_sor_api.config import load_config
from fair_sor_api.constants import SOLVERS
from fair_sor_api.errors import InvalidInputError
from fair_sor_api.fair_client import FairClient
from fair_sor_api.metric import FairnessSpec

logger = logging.getLogger("fair_sor.cli")


class BaseCommand(object):
    name = ""
    help = ""

    def __init__(self):
        self.exit_code = EXIT_OK

    def add_arguments(self, parser):
        raise NotImplementedError

    def run(self, args):
        raise NotImplementedError

    def client(self, args):
        config = load_config(getattr(args, "config", None))
        config = config.with_overrides(solver=getattr(args, "solver", None),
                                       epsilon=getattr(args, "epsilon", None))
        return FairClient(config, error_cb=self.error_cb)

    def error_cb(self, title, error):
        self.exit_code = write_error(error, title)

    @staticmethod
    def add_input_arguments(parser):
        parser.add_argument("--input", required=True, help="instance file (.json or .csv)")
        parser.add_argument("--t", default=DEFAULT_T, help="integer balance parameter")
        parser.add_argument("--k", type=int, default=DEFAULT_K, help="cluster budget")
        parser.add_argument("--balanced", action="store_true", help="balanced clustering over all groups")
        parser.add_argument("--out", help="output file, stdout when omitted")

    @staticmethod
    def add_pipeline_arguments(parser):
        parser.add_argument("--solver", choices=SOLVERS, help="sum-of-radii subroutine")
        parser.add_argument("--epsilon", type=float, help="bisection resolution of the primal-dual solver")
        parser.add_argument("--config", help="INI file with a [pipeline] section")

    @staticmethod
    def check_spec(args, inst):
        """Validate --t, --k and --balanced against the instance before any work starts."""
        spec = FairnessSpec.parse(args.t, args.k, ell=max(inst.ell, 2), two_color=False)
        if args.balanced and spec.t != 1:
            raise InvalidInputError(f"Balanced clustering takes no balance parameter, got t={spec.t}")
        if not args.balanced and inst.ell != 2:
            raise InvalidInputError(f"Fair clustering needs exactly 2 groups, got {inst.ell}; use --balanced")
        return spec

    @staticmethod
    def ids_of(inst):
        # plain indices unless the file named its points
        if inst.ids == tuple(str(p) for p in range(inst.n)):
            return None
        return inst.ids
