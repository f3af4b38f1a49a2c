"""
Output Writer Module

This module writes the result files of the simulator: one CSV per scenario
(one row per year, mean and std column for every YearRecord field), a JSON
manifest next to it, and the summary CSVs of sweeps and plots.
"""

import csv
import json
import logging
import math
import os
from typing import Dict, List, Optional, Sequence

from .schemas import OutputManifest, RunAggregate, SweepSummaryRow

logger = logging.getLogger(__name__)


def create_output_directory(out_dir: str) -> str:
    """Create the output directory if needed"""
    try:
        os.makedirs(out_dir, exist_ok=True)
        logger.info(f"Output directory: {out_dir}")
        return out_dir
    except OSError as e:
        logger.error(f"Could not create output directory {out_dir}: {str(e)}")
        raise


def format_number(value: Optional[float]) -> str:
    """9 significant digits; missing values are empty"""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ''
    if isinstance(value, int):
        return str(value)
    return f"{value:.9g}"


def csv_columns(fields: Sequence[str]) -> List[str]:
    columns = ['year']
    for field in fields:
        columns.extend([f'{field}_mean', f'{field}_std'])
    return columns


def write_aggregate_csv(aggregate: RunAggregate, path: str) -> str:
    """Write one row per year with mean/std columns for every field"""
    with open(path, 'w', newline='', encoding='utf-8') as file:
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(csv_columns(aggregate.fields))
        for i, year in enumerate(aggregate.years):
            row = [str(year)]
            for mean, std in zip(aggregate.mean[i], aggregate.std[i]):
                row.extend([format_number(mean), format_number(std)])
            writer.writerow(row)
    logger.info(f"Wrote {len(aggregate.years)} years of scenario {aggregate.label} to {path}")
    return path


def read_aggregate_csv(path: str) -> Dict[str, List[Optional[float]]]:
    """Read a scenario CSV back into column -> values (None for missing)"""
    try:
        with open(path, 'r', newline='', encoding='utf-8') as file:
            reader = csv.DictReader(file)
            columns = {name: [] for name in reader.fieldnames or []}
            for row in reader:
                for name in columns:
                    value = row[name]
                    columns[name].append(float(value) if value != '' else None)
    except FileNotFoundError:
        logger.error(f"CSV file not found: {path}")
        raise
    if 'year' not in columns:
        raise ValueError(f"{path} is not a scenario CSV (no 'year' column)")
    return columns


def write_manifest(manifest: OutputManifest, path: str) -> str:
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(manifest.model_dump(mode='json'), file, indent=2, sort_keys=True)
        file.write('\n')
    logger.info(f"Wrote manifest to {path}")
    return path


def write_sweep_summary(rows: Sequence[SweepSummaryRow], path: str) -> str:
    columns = list(SweepSummaryRow.model_fields)
    with open(path, 'w', newline='', encoding='utf-8') as file:
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_number(getattr(row, column)) for column in columns])
    logger.info(f"Wrote sweep summary with {len(rows)} rows to {path}")
    return path


def write_peak_summary(peaks: Sequence[Dict[str, object]], path: str) -> str:
    with open(path, 'w', newline='', encoding='utf-8') as file:
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(['csv', 'field', 'peak_year', 'peak_value'])
        for peak in peaks:
            writer.writerow([peak['csv'], peak['field'], format_number(peak['peak_year']),
                             format_number(peak['peak_value'])])
    logger.info(f"Wrote peak summary to {path}")
    return path
