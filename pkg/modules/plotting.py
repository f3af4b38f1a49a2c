"""
Plotting Module

Charts of scenario CSVs: one panel per field with the across-run mean and
a +/- 1 std band for every CSV, and a centrality-bin heatmap for the
pseudo-field 'rep_bins'.
"""

import logging
import os
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .exceptions import ConfigError  # noqa: E402
from .output_writer import read_aggregate_csv  # noqa: E402

logger = logging.getLogger(__name__)

REP_BINS = 'rep_bins'
PNG_METADATA = {'Software': None}


def available_fields(columns: Dict[str, List[Optional[float]]]) -> List[str]:
    stems = [name[:-len('_mean')] for name in columns if name.endswith('_mean')]
    if any(stem.startswith('rep_bin_') for stem in stems):
        stems.append(REP_BINS)
    return stems


def _as_array(values: Sequence[Optional[float]]) -> np.ndarray:
    return np.array([np.nan if v is None else v for v in values], dtype=float)


def peak(values: Sequence[Optional[float]], years: Sequence[float]):
    """(year, value) of the maximum, earliest year on ties"""
    data = _as_array(values)
    if np.all(np.isnan(data)):
        return None, None
    index = int(np.nanargmax(data))
    return int(years[index]), float(data[index])


def plot_fields(csv_paths: Sequence[str], fields: Sequence[str], out_path: str) -> List[Dict[str, object]]:
    """Draw the requested fields of every CSV into out_path (PNG)

    Returns one peak record (csv, field, peak_year, peak_value) per scalar
    field and CSV.
    """
    if not fields:
        raise ConfigError("No fields to plot", key='fields')
    if not csv_paths:
        raise ConfigError("No CSV files to plot", key='csv')

    tables = {path: read_aggregate_csv(path) for path in csv_paths}
    valid = available_fields(next(iter(tables.values())))
    unknown = [field for field in fields if field not in valid]
    if unknown:
        raise ConfigError(f"Unknown field(s) {', '.join(unknown)}. Valid fields: {', '.join(valid)}",
                          key='fields')

    scalar_fields = [field for field in fields if field != REP_BINS]
    panels = len(scalar_fields) + (len(tables) if REP_BINS in fields else 0)
    fig, axes = plt.subplots(panels, 1, figsize=(8, 3 * panels), squeeze=False)
    axes = axes[:, 0]
    peaks = []

    for ax, field in zip(axes, scalar_fields):
        for path, columns in tables.items():
            label = os.path.splitext(os.path.basename(path))[0]
            years = _as_array(columns['year'])
            mean = _as_array(columns[f'{field}_mean'])
            std = _as_array(columns.get(f'{field}_std', [0.0] * len(mean)))
            ax.plot(years, mean, label=label)
            ax.fill_between(years, mean - std, mean + std, alpha=0.2)
            peak_year, peak_value = peak(columns[f'{field}_mean'], columns['year'])
            peaks.append({'csv': label, 'field': field, 'peak_year': peak_year, 'peak_value': peak_value})
        ax.set_xlabel('year')
        ax.set_ylabel(field)
        ax.legend(loc='best', fontsize='small')

    if REP_BINS in fields:
        for ax, (path, columns) in zip(axes[len(scalar_fields):], tables.items()):
            label = os.path.splitext(os.path.basename(path))[0]
            bin_columns = sorted(name for name in columns if name.startswith('rep_bin_') and name.endswith('_mean'))
            grid = np.array([_as_array(columns[name]) for name in bin_columns])
            image = ax.imshow(grid, aspect='auto', origin='upper', cmap='coolwarm', vmin=0.0, vmax=2.0,
                              extent=(columns['year'][0], max(columns['year'][-1], columns['year'][0] + 1),
                                      len(bin_columns), 0))
            ax.set_xlabel('year')
            ax.set_ylabel('centrality bin (most central on top)')
            ax.set_title(f'{label}: representation ratio')
            fig.colorbar(image, ax=ax)

    fig.tight_layout()
    fig.savefig(out_path, dpi=100, metadata=PNG_METADATA)
    plt.close(fig)
    logger.info(f"Wrote chart with {panels} panel(s) to {out_path}")
    return peaks
