from cli.commands.base_command import BaseCommand
from cli.writers.json_writer import write_json
from fair_sor_api.errors import InvalidInputError


class ClusterCommand(BaseCommand):
    name = "cluster"
    help = "run the fair (or balanced) clustering pipeline"

    def add_arguments(self, parser):
        self.add_input_arguments(parser)
        parser.add_argument("--ell", type=int, help="expected number of groups")
        self.add_pipeline_arguments(parser)

    def run(self, args):
        client = self.client(args)
        inst = client.load(args.input)
        if inst is None:
            return self.exit_code
        if args.ell is not None and args.ell != inst.ell:
            raise InvalidInputError(f"--ell {args.ell} does not match the {inst.ell} groups of {args.input}")
        spec = self.check_spec(args, inst)
        result = client.cluster(inst, spec.t, spec.k, balanced=args.balanced)
        if result is None:
            return self.exit_code
        write_json(result.to_json(self.ids_of(inst)), args.out)
        return self.exit_code
