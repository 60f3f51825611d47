import logging
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from cli.commands.base_command import BaseCommand
from cli.constants import (
    BALANCED_GROUP_COUNTS,
    BENCH_HEADER,
    DEFAULT_BALANCED_K_MAX,
    DEFAULT_BALANCED_SHARE,
    DEFAULT_K_MAX,
    DEFAULT_N_MAX,
    DEFAULT_SEED,
    DEFAULT_T_MAX,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    EXIT_INFEASIBLE,
    SUMMARY_SUFFIX,
)
from cli.writers.csv_writer import write_rows
from cli.writers.json_writer import write_json
from fair_sor_api.config import balanced_bound, two_color_bound
from fair_sor_api.constants import MAX_ORACLE_POINTS, MODE_BALANCED, RELATIVE_TOLERANCE
from fair_sor_api.errors import InvalidInputError
from fair_sor_api.metric import generate_instance

logger = logging.getLogger("fair_sor.bench")


@dataclass(frozen=True)
class TrialPlan:
    index: int
    seed: int
    n: int
    ell: int
    t: int
    k: int
    balanced: bool

    @property
    def instance_id(self):
        return f"{self.index:05d}"


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    n: int
    ell: int
    t: int
    k: int
    alg_cost: float
    opt_cost: Optional[float]
    ratio: Optional[float]
    fair: bool
    dcs_weight: float
    lemma5: Optional[float]
    lemma6: Optional[float]
    switch_bound: Optional[float]
    runtime_ms: float
    mode: str
    implied_bound: float
    diagnostics_passed: Optional[bool]

    @property
    def exact_zero_match(self):
        return self.opt_cost == 0 and self.alg_cost == 0

    @property
    def within_bound(self):
        if self.opt_cost is None:
            return True
        if self.opt_cost == 0:
            return self.alg_cost == 0
        return self.ratio <= self.implied_bound * (1 + RELATIVE_TOLERANCE)


def plan_trial(index, seed, n_max, t_max, k_max, balanced_share):
    """Shape of trial index, drawn from its own seed; every plan is feasible."""
    trial_seed = seed + index
    rng = np.random.default_rng(trial_seed)
    if rng.random() < balanced_share:
        ells = [ell for ell in BALANCED_GROUP_COUNTS if ell <= n_max]
        ell = int(rng.choice(ells))
        n = ell * int(rng.integers(1, n_max // ell, endpoint=True))
        k = int(rng.integers(1, min(k_max, DEFAULT_BALANCED_K_MAX), endpoint=True))
        return TrialPlan(index, trial_seed, n, ell, 1, k, True)
    n = int(rng.integers(2, n_max, endpoint=True))
    t = int(rng.integers(1, t_max, endpoint=True))
    k = int(rng.integers(1, k_max, endpoint=True))
    if t == 1 and n % 2:
        # groups differ in size by one on odd n, which t=1 cannot balance
        n = n + 1 if n < n_max else n - 1
    return TrialPlan(index, trial_seed, n, 2, t, k, False)


def make_record(plan, result, opt, report, runtime_ms):
    ratio = None
    if opt is not None and opt.cost > 0:
        ratio = result.cost / opt.cost
    return BenchRecord(
        instance_id=plan.instance_id,
        n=plan.n,
        ell=plan.ell,
        t=plan.t,
        k=plan.k,
        alg_cost=result.cost,
        opt_cost=None if opt is None else opt.cost,
        ratio=ratio,
        fair=result.fairness_ok,
        dcs_weight=result.dcs_weight,
        lemma5=None if report is None else report.star_merge_ratio,
        lemma6=None if report is None else report.merge_ratio,
        switch_bound=None if report is None else report.max_switch_weight_ratio,
        runtime_ms=runtime_ms,
        mode=result.mode,
        implied_bound=result.implied_bound,
        diagnostics_passed=None if report is None else report.passed,
    )


def summarize(records, config, trials):
    ratios = [r.ratio for r in records if r.ratio is not None]
    return {
        "trials": trials,
        "completed": len(records),
        "solver": config.solver,
        "alpha": config.alpha,
        "bound_two_color": two_color_bound(config.alpha),
        "bound_balanced": balanced_bound(config.alpha),
        "max_ratio": max(ratios) if ratios else None,
        "mean_ratio": float(np.mean(ratios)) if ratios else None,
        "fair_pass": sum(1 for r in records if r.fair),
        "diagnostics_pass": sum(1 for r in records if r.diagnostics_passed),
        "exact_zero_matches": sum(1 for r in records if r.exact_zero_match),
        "bound_violations": sum(1 for r in records if not r.within_bound),
        "balanced_trials": sum(1 for r in records if r.mode == MODE_BALANCED),
    }


class BenchCommand(BaseCommand):
    name = "bench"
    help = "random trials comparing the pipelines with the oracle"

    def add_arguments(self, parser):
        parser.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
        parser.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
        parser.add_argument("--t-max", type=int, default=DEFAULT_T_MAX)
        parser.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
        parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
        parser.add_argument("--balanced-share", type=float, default=DEFAULT_BALANCED_SHARE,
                            help="fraction of balanced trials over 2 or 3 groups")
        parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="instances run in parallel")
        parser.add_argument("--out", required=True, help="CSV file, one row per trial")
        parser.add_argument("--summary", help=f"summary JSON, <out>{SUMMARY_SUFFIX} by default")
        self.add_pipeline_arguments(parser)

    @staticmethod
    def check_arguments(args):
        if args.trials < 1:
            raise InvalidInputError(f"--trials must be positive, got {args.trials}")
        if not 2 <= args.n_max <= MAX_ORACLE_POINTS:
            raise InvalidInputError(f"--n-max must lie in [2, {MAX_ORACLE_POINTS}], got {args.n_max}")
        if args.t_max < 1 or args.k_max < 1:
            raise InvalidInputError("--t-max and --k-max must be positive")
        if not 0.0 <= args.balanced_share <= 1.0:
            raise InvalidInputError(f"--balanced-share must lie in [0, 1], got {args.balanced_share}")
        if args.workers < 1:
            raise InvalidInputError(f"--workers must be positive, got {args.workers}")

    def run(self, args):
        self.check_arguments(args)
        client = self.client(args)
        plans = [plan_trial(i, args.seed, args.n_max, args.t_max, args.k_max, args.balanced_share)
                 for i in range(args.trials)]

        def job(plan):
            def trial():
                inst = generate_instance(plan.seed, plan.n, plan.ell)
                found = client.trial(inst, plan.t, plan.k, plan.balanced, plan.instance_id)
                record = make_record(plan, *found)
                logger.info(f"{plan.instance_id}: n={plan.n} ell={plan.ell} t={plan.t} k={plan.k} "
                            f"cost {record.alg_cost} opt {record.opt_cost}")
                return record
            return trial

        outcomes = client.run_parallel([job(plan) for plan in plans], args.workers)
        records = [r for r in outcomes if r is not None]
        write_rows(args.out, BENCH_HEADER, [asdict(r) for r in records])
        summary = summarize(records, client.config, args.trials)
        write_json(summary, args.summary or f"{args.out}{SUMMARY_SUFFIX}")
        logger.info(f"{len(records)}/{args.trials} trials, max ratio {summary['max_ratio']}, "
                    f"{summary['diagnostics_pass']} diagnostics passed")
        if len(records) < args.trials:
            return max(self.exit_code, EXIT_INFEASIBLE)
        return self.exit_code
