"""
Scenarios Module

This module turns the preset table into validated ScenarioSpecs, runs a
single simulation (network, boards, yearly dynamics, metrics) and
orchestrates Monte Carlo replications with deterministic per-run random
substreams and an order-stable aggregation.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from config.scenario_configs import SCENARIO_CONFIGS
from .boards import initialize
from .dynamics import InflowState, lambda_schedule, step
from .exceptions import ConfigError, SimulationError
from .metrics import eigencentrality, measure_year
from .netgen import build_firm_network
from .schemas import (RunAggregate, ScenarioSpec, SweepSummaryRow, YearRecord, build_spec,
                      record_fields, record_values)

logger = logging.getLogger(__name__)

SWEEP_ID = 'gamma_sweep'


def _spec_from_preset(scenario_id: str, overrides: Optional[Dict[str, Any]] = None) -> ScenarioSpec:
    values = {key: value for key, value in SCENARIO_CONFIGS[scenario_id].items()}
    values['scenario'] = scenario_id
    values.update(overrides or {})
    return build_spec(**values)


def gamma_values(start: float = 0.0, stop: float = 0.6, steps: int = 13) -> List[float]:
    if steps < 2:
        raise ConfigError(f"A gamma sweep needs at least 2 steps, got {steps}", key='steps')
    return [round(float(g), 10) for g in np.linspace(start, stop, steps)]


def gamma_sweep_specs(base: str = 'B', start: float = 0.0, stop: float = 0.6, steps: int = 13,
                      overrides: Optional[Dict[str, Any]] = None) -> List[ScenarioSpec]:
    """The base scenario replicated for every gamma of the sweep"""
    if base not in SCENARIO_CONFIGS or base == SWEEP_ID:
        raise ConfigError(f"Unknown base scenario '{base}'", key='base')
    specs = []
    for gamma in gamma_values(start, stop, steps):
        values = dict(overrides or {})
        values.update({'scenario': SWEEP_ID, 'gamma': gamma, 'init_mode': 'biased',
                       'label': f'{SWEEP_ID}_{gamma:.3f}'})
        specs.append(_spec_from_preset(base, values))
    return specs


def preset(scenario_id: str) -> Union[ScenarioSpec, List[ScenarioSpec]]:
    """Scenario preset by id; 'gamma_sweep' yields the list of its 13 specs"""
    if scenario_id not in SCENARIO_CONFIGS:
        raise ConfigError(f"Unknown scenario '{scenario_id}'. Available: {', '.join(SCENARIO_CONFIGS)}",
                          key='scenario')
    if scenario_id == SWEEP_ID:
        sweep = SCENARIO_CONFIGS[SWEEP_ID]
        return gamma_sweep_specs(sweep['base'], sweep['gamma_start'], sweep['gamma_stop'], sweep['steps'])
    return _spec_from_preset(scenario_id)


def preset_table() -> List[Dict[str, Any]]:
    """One row per preset for display"""
    rows = []
    for scenario_id, values in SCENARIO_CONFIGS.items():
        if scenario_id == SWEEP_ID:
            rows.append({'id': scenario_id, 'init_mode': 'biased',
                         'gamma': f"{values['gamma_start']}..{values['gamma_stop']} ({values['steps']} steps)",
                         'lambda_mode': SCENARIO_CONFIGS[values['base']]['lambda_mode'],
                         'target_share': SCENARIO_CONFIGS[values['base']]['target_share'],
                         'growth_mode': SCENARIO_CONFIGS[values['base']]['growth_mode'],
                         'description': values['description']})
            continue
        spec = _spec_from_preset(scenario_id)
        rows.append({'id': scenario_id, 'init_mode': spec.init_mode.value,
                     'gamma': spec.gamma, 'lambda_mode': spec.lambda_mode.value,
                     'target_share': round(spec.target_share, 6), 'growth_mode': spec.growth_mode.value,
                     'description': spec.description})
    return rows


def apply_overrides(spec: ScenarioSpec, overrides: Optional[Dict[str, Any]]) -> ScenarioSpec:
    """Validated copy of spec with the given fields replaced"""
    if not overrides:
        return spec
    values = spec.model_dump()
    values.update(overrides)
    return build_spec(**values)


def load_config_file(path: str) -> ScenarioSpec:
    """Load a flat JSON config; its 'scenario' key selects the base preset"""
    try:
        with open(path, 'r', encoding='utf-8') as file:
            values = json.load(file)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}", key='config')
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {str(e)}", key='config')
    if not isinstance(values, dict):
        raise ConfigError(f"Config file {path} must contain a flat JSON object", key='config')

    base = values.get('scenario', 'custom')
    if base == SWEEP_ID:
        raise ConfigError("Use the sweep command for gamma sweeps", key='scenario')
    if base in SCENARIO_CONFIGS:
        return _spec_from_preset(base, values)
    return build_spec(**values)


def run_seed_sequence(master_seed: int, run_index: int) -> np.random.SeedSequence:
    """Independent substream of the master seed for one run"""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))


def run_one(spec: ScenarioSpec, run_index: int) -> List[YearRecord]:
    """Simulate one replication and return one YearRecord per year, year 0 included"""
    rng = np.random.default_rng(run_seed_sequence(spec.master_seed, run_index))
    dynamics_cfg = spec.dynamics_config()
    metrics_cfg = spec.metrics_config()

    graph, sizes = build_firm_network(spec.firms, spec.edges_per_firm, spec.board_size_mean,
                                      spec.board_size_variance, spec.min_board_size, rng)
    state = initialize(sizes, graph, spec.init_config(), rng)
    scores = eigencentrality(graph, metrics_cfg.eigen_tol, metrics_cfg.eigen_max_iter)
    total_seats = state.total_seats

    inflow = InflowState(x=dynamics_cfg.initial_inflow)
    records = [measure_year(state, graph, scores, 0, inflow.x,
                            lambda_schedule(state.female_share(), dynamics_cfg), metrics_cfg)]

    def record_year(current, x, lam):
        records.append(measure_year(current, graph, scores, len(records), x, lam, metrics_cfg))

    for _ in range(dynamics_cfg.horizon_years):
        state, inflow = step(state, graph, inflow, dynamics_cfg, record_year, rng)
        if state.total_seats != total_seats:
            raise SimulationError(f"Seat count changed from {total_seats} to {state.total_seats}",
                                  run_index=run_index)
    return records


def _run_values(spec: ScenarioSpec, run_index: int) -> np.ndarray:
    rows = [record_values(record) for record in run_one(spec, run_index)]
    return np.array([[np.nan if v is None else v for v in row] for row in rows], dtype=float)


class RunAccumulator:
    """Streaming per-cell mean and population std that skips missing values

    Runs must be added in run-index order for bit-identical results.
    """

    def __init__(self, shape):
        self.count = np.zeros(shape)
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)
        self.runs = 0

    def add(self, values: np.ndarray):
        present = ~np.isnan(values)
        values = np.where(present, values, 0.0)
        self.count += present
        delta = np.where(present, values - self.mean, 0.0)
        safe_count = np.maximum(self.count, 1)
        self.mean += delta / safe_count
        self.m2 += np.where(present, delta * (values - self.mean), 0.0)
        self.runs += 1

    def result(self):
        present = self.count > 0
        std = np.sqrt(np.maximum(self.m2, 0.0) / np.maximum(self.count, 1))
        mean = np.where(present, self.mean, np.nan)
        std = np.where(present, std, np.nan)
        return _to_rows(mean), _to_rows(std)


def _to_rows(table: np.ndarray) -> List[List[Optional[float]]]:
    return [[None if np.isnan(v) else float(v) for v in row] for row in table]


def run_monte_carlo(spec: ScenarioSpec, workers: int = 1) -> RunAggregate:
    """Aggregate run_one over run indices 0..runs-1

    Results are reduced in run-index order, so the aggregate does not depend
    on the number of workers.
    """
    # sub-configs raise ConfigError here rather than inside a worker
    spec.init_config()
    spec.dynamics_config()
    spec.metrics_config()
    workers = max(1, int(workers or 1))
    logger.info(f"Running scenario {spec.name}: {spec.runs} runs x {spec.years} years, "
                f"{spec.firms} firms, seed {spec.master_seed}, {workers} worker(s)")
    fields = record_fields(spec.n_bins)
    accumulator = RunAccumulator((spec.years + 1, len(fields)))
    report_every = max(1, spec.runs // 10)

    def consume(results: Iterable[np.ndarray]):
        run_index = 0
        iterator = iter(results)
        while True:
            try:
                values = next(iterator)
            except StopIteration:
                break
            except Exception as e:
                raise SimulationError(f"Run {run_index} of scenario {spec.name} failed: {str(e)}",
                                      run_index=run_index) from e
            accumulator.add(values)
            run_index += 1
            if run_index % report_every == 0:
                logger.info(f"Scenario {spec.name}: {run_index}/{spec.runs} runs complete")

    if workers > 1:
        chunksize = max(1, spec.runs // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            consume(executor.map(_run_values, repeat(spec), range(spec.runs), chunksize=chunksize))
    else:
        consume(_run_values(spec, run_index) for run_index in range(spec.runs))

    mean, std = accumulator.result()
    return RunAggregate(
        label=spec.name,
        runs=accumulator.runs,
        master_seed=spec.master_seed,
        config=spec.model_dump(mode='json'),
        fields=fields,
        years=list(range(spec.years + 1)),
        mean=mean,
        std=std,
    )


def _peak(values: List[Optional[float]]):
    present = [(v, year) for year, v in enumerate(values) if v is not None]
    if not present:
        return None, None
    value, year = max(present, key=lambda item: (item[0], -item[1]))
    return value, year


def sweep_summary_row(gamma: float, aggregate: RunAggregate) -> SweepSummaryRow:
    """Top-bin representation and perception statistics of one sweep point"""
    top_mean = aggregate.column('rep_bin_01')
    top_std = aggregate.column('rep_bin_01', 'std')
    perc_f_peak, perc_f_peak_year = _peak(aggregate.column('perc_F_by_F'))
    present_top = [v for v in top_mean if v is not None]
    return SweepSummaryRow(
        gamma=gamma,
        top_bin_y0_mean=top_mean[0] or 0.0,
        top_bin_y0_std=top_std[0] or 0.0,
        top_bin_min_mean=min(present_top) if present_top else 0.0,
        perc_F_by_all_y0_mean=aggregate.column('perc_F_by_all')[0],
        perc_F_by_all_y0_std=aggregate.column('perc_F_by_all', 'std')[0],
        perc_F_by_M_y0_mean=aggregate.column('perc_F_by_M')[0],
        perc_F_by_F_y0_mean=aggregate.column('perc_F_by_F')[0],
        perc_F_by_F_peak_mean=perc_f_peak,
        perc_F_by_F_peak_year=perc_f_peak_year,
        share_F_final_mean=aggregate.column('share_F')[-1] or 0.0,
    )
