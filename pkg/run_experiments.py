#!/usr/bin/env python3
"""
Run the Task-planning experiments.

Usage:
    python run_experiments.py run --scenario overtaking --strategy 3 --variant 0 --seed 0 --out out
    python run_experiments.py suite --out out
    python run_experiments.py plot --run out/runs.json
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from configurator.config import ConfigManager
from configurator.errors import ConfiguratorError
from configurator.export import export_outputs, read_runs, render_run
from configurator.harness import (
    N_REPETITIONS,
    builtin_scenarios,
    resolve_scenario,
    run_experiment,
    run_suite,
)
from configurator.logging_setup import get_module_logger
from configurator.planner import Strategy
from configurator.statistics import summarize

logger = get_module_logger('cli')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument('--env-file', default='.env', help="dotenv file (default: .env)")
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help="a single run")
    run.add_argument('--scenario', required=True, help="built-in name or scenario JSON file")
    run.add_argument('--strategy', type=int, choices=range(5), required=True)
    run.add_argument('--variant', type=int, default=0)
    run.add_argument('--seed', type=int, default=0)
    run.add_argument('--out', type=Path, default=None)

    suite = sub.add_parser('suite', help="every scenario x strategy x variant x repetition")
    suite.add_argument('--out', type=Path, default=None)
    suite.add_argument('--repetitions', type=int, default=N_REPETITIONS)
    suite.add_argument('--seed', type=int, default=0, help="base seed")

    plot = sub.add_parser('plot', help="re-render SVGs from a runs.json file")
    plot.add_argument('--run', type=Path, required=True)
    plot.add_argument('--out', type=Path, default=None, help="defaults to the runs file's directory")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ConfigManager(env_file=args.env_file)
        config.display_config(logger)
        settings = dict(cfg=config.sim_config(), robot=config.robot_model(),
                        scan_cfg=config.scan_config(),
                        planner_settings=config.planner_settings())

        if args.command == 'run':
            scenario = resolve_scenario(args.scenario)
            strategy = Strategy.from_index(args.strategy, scenario.d_sub)
            records = [run_experiment(scenario, strategy, args.variant, args.seed, **settings)]
            scenarios = [scenario]
        elif args.command == 'suite':
            scenarios = builtin_scenarios()
            records = run_suite(scenarios, repetitions=args.repetitions,
                                base_seed=args.seed, **settings)
        else:
            records = read_runs(args.run)
            out_dir = args.out or args.run.parent
            out_dir.mkdir(parents=True, exist_ok=True)
            by_name = {s.name: s for s in builtin_scenarios()}
            for record in records:
                render_run(record, out_dir, by_name)
            logger.info("✅ SVGs rendered", n_runs=len(records), out_dir=str(out_dir))
            return 0

        out_dir = args.out or Path(config.get('output_dir'))
        export_outputs(records, summarize(records), out_dir, scenarios)
        for record in records:
            logger.info("✅ run" if record.success else "❌ run", scenario=record.scenario,
                        strategy=record.strategy, variant=record.variant,
                        n_states=record.n_states, success=record.success)
        return 0
    except ConfiguratorError as e:
        logger.error("❌ Experiment failed", error=str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
