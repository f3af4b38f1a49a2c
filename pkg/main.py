#!/usr/bin/env python3
"""
Board Diversity Simulator

This script is the command-line front end of the simulator. It runs the
scenario presets (or a flat JSON config) as Monte Carlo experiments on
calibrated scale-free firm networks and writes the yearly aggregates as CSV.

Features:
  - Scenario presets A, B, C, D, E, Aprime, Bprime and the gamma sweep
  - Flat JSON config files; command-line flags override file values
  - Deterministic results for a given seed, independent of the worker count
  - CSV time series with mean and std columns, a JSON manifest per scenario
  - Charts of selected fields with +/- 1 std bands

Dependencies:
  - Python 3.9+
  - numpy, scipy, pydantic, python-dotenv, matplotlib (pip install -r requirements.txt)

Usage:
  python main.py run <scenario|config.json> [--firms N] [--runs N] [--years N] [--seed N]
                     [--gamma G] [--workers N] [--set key=value ...] [--out DIR]
  python main.py sweep [--start 0] [--stop 0.6] [--steps 13] [--base B] [--out DIR] ...
  python main.py plot <csv> [<csv> ...] --fields share_F net_homophily [--out chart.png]
  python main.py presets

Examples:
  python main.py run A --firms 200 --runs 100 --seed 7
  python main.py run B --runs 10000
  python main.py sweep --firms 200 --runs 50
  python main.py plot output/A.csv output/C.csv --fields net_homophily rep_bins

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add the repository root to the Python path
sys.path.insert(0, str(Path(__file__).parent))

from config.scenario_configs import SIMULATION_CONFIG, TOOL_NAME, TOOL_VERSION
from modules.exceptions import BoardSimError, ConfigError
from modules.output_writer import (create_output_directory, csv_columns, write_aggregate_csv,
                                   write_manifest, write_peak_summary, write_sweep_summary)
from modules.plotting import plot_fields
from modules.scenarios import (SWEEP_ID, apply_overrides, gamma_sweep_specs, load_config_file,
                               preset, preset_table, run_monte_carlo, sweep_summary_row)
from modules.schemas import OutputManifest, ScenarioSpec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2


def configure_logging(level: str = None):
    logging.basicConfig(
        level=getattr(logging, level or SIMULATION_CONFIG['LOG_LEVEL'], logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def parse_set_values(pairs: Optional[List[str]]) -> Dict[str, Any]:
    """Turn ['key=value', ...] into a dict; values are parsed as JSON when possible"""
    overrides = {}
    for pair in pairs or []:
        if '=' not in pair:
            raise ConfigError(f"Override '{pair}' must look like key=value", key=pair)
        key, raw = pair.split('=', 1)
        try:
            overrides[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            overrides[key.strip()] = raw
    return overrides


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides = parse_set_values(getattr(args, 'set', None))
    flag_fields = {'firms': 'firms', 'runs': 'runs', 'years': 'years', 'seed': 'master_seed',
                   'gamma': 'gamma'}
    for flag, field in flag_fields.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    return overrides


def resolve_spec(target: str, overrides: Dict[str, Any]) -> ScenarioSpec:
    """Preset id or config path, with the desk-scale default run count"""
    if os.path.isfile(target):
        logger.info(f"Loading config file: {target}")
        spec = load_config_file(target)
    elif target == SWEEP_ID:
        raise ConfigError("Use the 'sweep' command for the gamma sweep", key='scenario')
    else:
        spec = preset(target)
    if 'runs' not in spec.model_fields_set and 'runs' not in overrides:
        overrides = dict(overrides, runs=SIMULATION_CONFIG['DEFAULT_RUNS'])
    return apply_overrides(spec, overrides)


def run_and_write(spec: ScenarioSpec, out_dir: str, workers: int):
    """Run one scenario and write its CSV and manifest"""
    started = time.perf_counter()
    aggregate = run_monte_carlo(spec, workers=workers)
    wall_time = time.perf_counter() - started

    csv_path = os.path.join(out_dir, f'{spec.name}.csv')
    write_aggregate_csv(aggregate, csv_path)
    manifest = OutputManifest(
        tool=TOOL_NAME,
        version=TOOL_VERSION,
        scenario=spec.scenario.value,
        label=spec.name,
        csv_file=os.path.basename(csv_path),
        columns=csv_columns(aggregate.fields),
        config=spec.model_dump(mode='json'),
        master_seed=spec.master_seed,
        runs=aggregate.runs,
        workers=workers,
        wall_time_seconds=round(wall_time, 3),
    )
    manifest_path = os.path.join(out_dir, f'{spec.name}.manifest.json')
    write_manifest(manifest, manifest_path)
    return aggregate, {'csv': csv_path, 'manifest': manifest_path}


def cmd_run(target: str, overrides: Dict[str, Any], out_dir: str, workers: int) -> Dict[str, str]:
    spec = resolve_spec(target, overrides)
    logger.info(f"Scenario description: {spec.description or spec.name}")
    create_output_directory(out_dir)
    _, bundle = run_and_write(spec, out_dir, workers)
    return bundle


def cmd_sweep(start: float, stop: float, steps: int, base: str, overrides: Dict[str, Any],
              out_dir: str, workers: int) -> Dict[str, Any]:
    if 'runs' not in overrides:
        overrides = dict(overrides, runs=SIMULATION_CONFIG['DEFAULT_RUNS'])
    specs = gamma_sweep_specs(base, start, stop, steps, overrides)
    create_output_directory(out_dir)

    bundles = []
    rows = []
    for spec in specs:
        logger.info("-" * 40)
        logger.info(f"Sweep point gamma={spec.gamma}")
        aggregate, bundle = run_and_write(spec, out_dir, workers)
        bundles.append(bundle)
        rows.append(sweep_summary_row(spec.gamma, aggregate))

    summary_path = os.path.join(out_dir, f'{SWEEP_ID}_summary.csv')
    write_sweep_summary(rows, summary_path)
    return {'scenarios': bundles, 'summary': summary_path}


def cmd_plot(csv_paths: List[str], fields: List[str], out_path: str) -> Dict[str, str]:
    for path in csv_paths:
        if not os.path.exists(path):
            raise ConfigError(f"CSV file not found: {path}", key='csv')
    out_dir = os.path.dirname(out_path)
    if out_dir:
        create_output_directory(out_dir)
    peaks = plot_fields(csv_paths, fields, out_path)
    summary_path = f'{os.path.splitext(out_path)[0]}_summary.csv'
    write_peak_summary(peaks, summary_path)
    for entry in peaks:
        logger.info(f"{entry['csv']}: {entry['field']} peaks at year {entry['peak_year']} "
                    f"({entry['peak_value']})")
    return {'chart': out_path, 'summary': summary_path}


def cmd_presets():
    rows = preset_table()
    header = ['id', 'init_mode', 'gamma', 'lambda_mode', 'target_share', 'growth_mode', 'description']
    print(' | '.join(header))
    for row in rows:
        print(' | '.join(str(row[column]) for column in header))


def _add_scenario_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--firms', type=int, help='Number of firms (default 1000)')
    parser.add_argument('--runs', type=int, help=f"Monte Carlo runs (default {SIMULATION_CONFIG['DEFAULT_RUNS']})")
    parser.add_argument('--years', type=int, help='Simulated years (default 80)')
    parser.add_argument('--seed', type=int, help='Master seed (default 0)')
    parser.add_argument('--workers', type=int, default=SIMULATION_CONFIG['WORKERS'],
                        help='Worker processes (default from BOARDSIM_WORKERS)')
    parser.add_argument('--set', action='append', metavar='KEY=VALUE',
                        help='Override any scenario field, may be repeated')
    parser.add_argument('--out', default=SIMULATION_CONFIG['OUTPUT_DIR'], help='Output directory')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Board diversity simulator on scale-free firm networks')
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR')
    commands = parser.add_subparsers(dest='command', required=True)

    run_parser = commands.add_parser('run', help='Run a scenario preset or config file')
    run_parser.add_argument('target', help='Scenario id (A, B, C, D, E, Aprime, Bprime) or JSON config path')
    run_parser.add_argument('--gamma', type=float, help='Initial bias intensity')
    _add_scenario_flags(run_parser)

    sweep_parser = commands.add_parser('sweep', help='Run the gamma sweep')
    sweep_parser.add_argument('--start', type=float, default=0.0)
    sweep_parser.add_argument('--stop', type=float, default=0.6)
    sweep_parser.add_argument('--steps', type=int, default=13)
    sweep_parser.add_argument('--base', default='B', help='Base scenario (default B)')
    _add_scenario_flags(sweep_parser)

    plot_parser = commands.add_parser('plot', help='Chart fields of scenario CSVs')
    plot_parser.add_argument('csv', nargs='+', help='Scenario CSV files')
    plot_parser.add_argument('--fields', nargs='*', default=[], help="Fields to plot, or 'rep_bins'")
    plot_parser.add_argument('--out', default=os.path.join(SIMULATION_CONFIG['OUTPUT_DIR'], 'chart.png'))

    commands.add_parser('presets', help='List the scenario presets')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main execution flow"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse has already printed usage; --help exits with 0
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG_ERROR
    configure_logging(args.log_level)

    logger.info("=" * 60)
    logger.info(f"Board Diversity Simulator ({args.command}) Starting")
    logger.info("=" * 60)

    try:
        if args.command == 'run':
            bundle = cmd_run(args.target, collect_overrides(args), args.out, args.workers)
            logger.info(f"Outputs: {bundle['csv']}, {bundle['manifest']}")
        elif args.command == 'sweep':
            bundle = cmd_sweep(args.start, args.stop, args.steps, args.base, collect_overrides(args),
                               args.out, args.workers)
            logger.info(f"Sweep summary: {bundle['summary']}")
        elif args.command == 'plot':
            bundle = cmd_plot(args.csv, args.fields, args.out)
            logger.info(f"Chart: {bundle['chart']}")
        else:
            cmd_presets()
    except ConfigError as e:
        logger.error(f"Configuration error: {str(e)}")
        return EXIT_CONFIG_ERROR
    except KeyboardInterrupt:
        logger.info("Process interrupted by user")
        return EXIT_RUNTIME_ERROR
    except BoardSimError as e:
        logger.error(f"Simulation failed: {str(e)}")
        return EXIT_RUNTIME_ERROR
    except Exception as e:
        logger.error(f"Unexpected error during execution: {str(e)}")
        return EXIT_RUNTIME_ERROR

    logger.info("=" * 60)
    logger.info("Board Diversity Simulator Completed")
    logger.info("=" * 60)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
