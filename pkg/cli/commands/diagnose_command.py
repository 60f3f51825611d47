from pathlib import Path

from cli.commands.base_command import BaseCommand
from cli.writers.json_writer import write_json


class DiagnoseCommand(BaseCommand):
    name = "diagnose"
    help = "run pipeline and oracle, then check the analysis bounds"

    def add_arguments(self, parser):
        self.add_input_arguments(parser)
        self.add_pipeline_arguments(parser)
        parser.add_argument("--instance-id", help="id written into the report, the input stem by default")

    def run(self, args):
        client = self.client(args)
        inst = client.load(args.input)
        if inst is None:
            return self.exit_code
        spec = self.check_spec(args, inst)
        instance_id = args.instance_id if args.instance_id is not None else Path(args.input).stem
        found = client.diagnose(inst, spec.t, spec.k, balanced=args.balanced, instance_id=instance_id)
        if found is None:
            return self.exit_code
        result, opt, report = found
        data = report.to_json()
        data["alg_cost"] = result.cost
        data["opt_cost"] = opt.cost
        write_json(data, args.out)
        return self.exit_code
