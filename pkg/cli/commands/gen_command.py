from cli.commands.base_command import BaseCommand
from cli.constants import DEFAULT_BOX, DEFAULT_SEED
from cli.writers.json_writer import write_json
from fair_sor_api.constants import GENERATION_MODES, MODE_EUCLIDEAN
from fair_sor_api.metric import instance_to_json


class GenCommand(BaseCommand):
    name = "gen"
    help = "generate a random instance"

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
        parser.add_argument("--n", type=int, required=True, help="number of points")
        parser.add_argument("--ell", type=int, default=2, help="number of groups")
        parser.add_argument("--mode", choices=GENERATION_MODES, default=MODE_EUCLIDEAN)
        parser.add_argument("--box", type=float, default=DEFAULT_BOX, help="coordinate or weight range")
        parser.add_argument("--out", help="instance file (.json or .csv), stdout when omitted")

    def run(self, args):
        client = self.client(args)
        inst = client.generate(args.seed, args.n, args.ell, args.mode, args.box, out=args.out)
        if inst is None:
            return self.exit_code
        if args.out is None:
            write_json(instance_to_json(inst))
        return self.exit_code
