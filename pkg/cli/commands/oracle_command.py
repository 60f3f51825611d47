from cli.commands.base_command import BaseCommand
from cli.writers.json_writer import write_json


class OracleCommand(BaseCommand):
    name = "oracle"
    help = "exact optimum by enumerating partitions (at most 12 points)"

    def add_arguments(self, parser):
        self.add_input_arguments(parser)

    def run(self, args):
        client = self.client(args)
        inst = client.load(args.input)
        if inst is None:
            return self.exit_code
        spec = self.check_spec(args, inst)
        opt = client.oracle(inst, spec.t, spec.k, balanced=args.balanced)
        if opt is None:
            return self.exit_code
        write_json(opt.to_json(self.ids_of(inst)), args.out)
        return self.exit_code
