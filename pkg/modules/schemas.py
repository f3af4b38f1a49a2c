"""
Pydantic schemas for the board diversity simulator

This module defines the configuration models (scenario, initialization,
dynamics, metrics) and the result records (per-year rows, Monte Carlo
aggregates, output manifests) using Pydantic.
"""

from enum import Enum
from typing import Annotated, Any, Dict, List, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from .exceptions import ConfigError


class ScenarioId(str, Enum):
    A = 'A'
    B = 'B'
    C = 'C'
    D = 'D'
    E = 'E'
    APRIME = 'Aprime'
    BPRIME = 'Bprime'
    GAMMA_SWEEP = 'gamma_sweep'
    CUSTOM = 'custom'


class InitMode(str, Enum):
    UNBIASED = 'unbiased'
    BIASED = 'biased'


class LambdaMode(str, Enum):
    SIZE_DEPENDENT = 'size_dependent'
    FIXED = 'fixed'


class GrowthMode(str, Enum):
    EXOGENOUS = 'exogenous'
    ENDOGENOUS = 'endogenous'


class EndoApplication(str, Enum):
    INCREMENT = 'increment'
    LITERAL = 'literal'


class GrowthForm(str, Enum):
    NORMALIZED = 'normalized'
    PAPER_LITERAL = 'paper_literal'


# alternative spellings accepted for growth_form
GROWTH_FORM_ALIASES = {'retiree_scaled': GrowthForm.PAPER_LITERAL.value}


def _growth_form_alias(value):
    if isinstance(value, str):
        return GROWTH_FORM_ALIASES.get(value, value)
    return value


GrowthFormSetting = Annotated[GrowthForm, BeforeValidator(_growth_form_alias)]


class InitConfig(BaseModel):
    """Initial seat assignment settings"""
    model_config = ConfigDict(extra='forbid', frozen=True)

    mode: InitMode = InitMode.UNBIASED
    gamma: float = Field(0.8, ge=0.0, lt=1.0)
    initial_share: float = Field(0.02, ge=0.0, le=1.0)


class DynamicsConfig(BaseModel):
    """Yearly retirement, inflow growth and homophilic hiring settings"""
    model_config = ConfigDict(extra='forbid', frozen=True)

    retire_rate: float = Field(0.15, ge=0.0, le=1.0)
    g_f: float = Field(0.16, ge=0.0)
    target_share: float = Field(0.5, gt=0.0, le=1.0)
    lambda_mode: LambdaMode = LambdaMode.SIZE_DEPENDENT
    lambda_bar: float = Field(0.9, gt=0.0, le=1.0)
    g_lambda: float = Field(20.0, ge=0.0)
    y_m: float = Field(0.16, ge=0.0, le=1.0)
    beta: float = Field(2.5, ge=0.0)
    growth_mode: GrowthMode = GrowthMode.EXOGENOUS
    endo_application: EndoApplication = EndoApplication.INCREMENT
    growth_form: GrowthFormSetting = GrowthForm.NORMALIZED
    initial_inflow: float = Field(0.02, ge=0.0, le=1.0)
    include_self: bool = False
    horizon_years: int = Field(80, ge=0)

    @model_validator(mode='after')
    def _inflow_below_target(self):
        if self.initial_inflow > self.target_share:
            raise ValueError('initial_inflow must not exceed target_share')
        return self


class MetricsConfig(BaseModel):
    """Observable settings"""
    model_config = ConfigDict(extra='forbid', frozen=True)

    n_bins: int = Field(20, ge=1)
    include_self: bool = False
    beta: float = Field(2.5, ge=0.0)
    eigen_tol: float = Field(1e-10, gt=0.0)
    eigen_max_iter: int = Field(100000, ge=1)


class ScenarioSpec(BaseModel):
    """Full, flat parameterization of one scenario

    Every field is a key of the flat JSON config file format.
    """
    model_config = ConfigDict(extra='forbid', use_enum_values=False)

    scenario: ScenarioId = ScenarioId.CUSTOM
    label: Optional[str] = None
    description: str = ''

    # network
    firms: int = Field(1000, ge=2)
    edges_per_firm: int = Field(3, ge=1)
    board_size_mean: float = Field(12.5, gt=0.0)
    board_size_variance: float = Field(20.6, ge=0.0)
    min_board_size: int = Field(3, ge=1)

    # initialization
    init_mode: InitMode = InitMode.UNBIASED
    gamma: float = Field(0.0, ge=0.0, lt=1.0)
    initial_share: float = Field(0.02, ge=0.0, le=1.0)

    # dynamics
    retire_rate: float = Field(0.15, ge=0.0, le=1.0)
    g_f: float = Field(0.16, ge=0.0)
    target_share: float = Field(0.5, gt=0.0, le=1.0)
    lambda_mode: LambdaMode = LambdaMode.SIZE_DEPENDENT
    lambda_bar: float = Field(0.9, gt=0.0, le=1.0)
    g_lambda: float = Field(20.0, ge=0.0)
    y_m: float = Field(0.16, ge=0.0, le=1.0)
    beta: float = Field(2.5, ge=0.0)
    growth_mode: GrowthMode = GrowthMode.EXOGENOUS
    endo_application: EndoApplication = EndoApplication.INCREMENT
    growth_form: GrowthFormSetting = GrowthForm.NORMALIZED
    initial_inflow: Optional[float] = Field(None, ge=0.0, le=1.0)

    # metrics
    n_bins: int = Field(20, ge=1)
    include_self: bool = False
    eigen_tol: float = Field(1e-10, gt=0.0)
    eigen_max_iter: int = Field(100000, ge=1)

    # Monte Carlo
    runs: int = Field(10000, ge=1)
    years: int = Field(80, ge=0)
    master_seed: int = Field(0, ge=0)

    @model_validator(mode='after')
    def _check_network(self):
        if self.firms <= self.edges_per_firm:
            raise ValueError(f'firms ({self.firms}) must exceed edges_per_firm ({self.edges_per_firm})')
        return self

    @property
    def name(self) -> str:
        return self.label or self.scenario.value

    def init_config(self) -> InitConfig:
        return _build(InitConfig, mode=self.init_mode, gamma=self.gamma, initial_share=self.initial_share)

    def dynamics_config(self) -> DynamicsConfig:
        # an inflow derived from the seat share is capped at the target; an explicit one is validated
        if self.initial_inflow is None:
            initial_inflow = min(self.initial_share, self.target_share)
        else:
            initial_inflow = self.initial_inflow
        return _build(DynamicsConfig,
                      retire_rate=self.retire_rate,
                      g_f=self.g_f,
                      target_share=self.target_share,
                      lambda_mode=self.lambda_mode,
                      lambda_bar=self.lambda_bar,
                      g_lambda=self.g_lambda,
                      y_m=self.y_m,
                      beta=self.beta,
                      growth_mode=self.growth_mode,
                      endo_application=self.endo_application,
                      growth_form=self.growth_form,
                      initial_inflow=initial_inflow,
                      include_self=self.include_self,
                      horizon_years=self.years)

    def metrics_config(self) -> MetricsConfig:
        return _build(MetricsConfig, n_bins=self.n_bins, include_self=self.include_self, beta=self.beta,
                      eigen_tol=self.eigen_tol, eigen_max_iter=self.eigen_max_iter)


class YearRecord(BaseModel):
    """One row of observables for one simulated year"""
    year: int
    share_F: float
    lambda_used: float
    inflow_x: float
    net_homophily: float
    perc_F_by_F: Optional[float] = None
    perc_F_by_M: Optional[float] = None
    perc_F_by_all: Optional[float] = None
    delta_s: Optional[float] = None
    fstar_mean: float
    fstar_cv: float
    rep_bins: List[float]


# (CSV column stem, YearRecord attribute)
SCALAR_FIELDS = [
    ('inflow_x', 'inflow_x'),
    ('share_F', 'share_F'),
    ('lambda', 'lambda_used'),
    ('net_homophily', 'net_homophily'),
    ('perc_F_by_F', 'perc_F_by_F'),
    ('perc_F_by_M', 'perc_F_by_M'),
    ('perc_F_by_all', 'perc_F_by_all'),
    ('delta_s', 'delta_s'),
    ('fstar', 'fstar_mean'),
    ('fstar_cv', 'fstar_cv'),
]


def record_fields(n_bins: int = 20) -> List[str]:
    """Column stems of a YearRecord in CSV order"""
    return [stem for stem, _ in SCALAR_FIELDS] + [f'rep_bin_{b + 1:02d}' for b in range(n_bins)]


def record_values(record: YearRecord) -> List[Optional[float]]:
    """Flatten a YearRecord into the order of record_fields()"""
    values = [getattr(record, attr) for _, attr in SCALAR_FIELDS]
    return values + list(record.rep_bins)


class RunAggregate(BaseModel):
    """Across-run mean and standard deviation of every YearRecord field"""
    label: str
    runs: int
    master_seed: int
    config: Dict[str, Any]
    fields: List[str]
    years: List[int]
    mean: List[List[Optional[float]]]
    std: List[List[Optional[float]]]

    def column(self, field: str, stat: str = 'mean') -> List[Optional[float]]:
        if field not in self.fields:
            raise KeyError(f"Unknown field '{field}'. Valid fields: {', '.join(self.fields)}")
        idx = self.fields.index(field)
        table = self.mean if stat == 'mean' else self.std
        return [row[idx] for row in table]


class OutputManifest(BaseModel):
    tool: str
    version: str
    scenario: str
    label: str
    csv_file: str
    columns: List[str]
    config: Dict[str, Any]
    master_seed: int
    runs: int
    workers: int
    wall_time_seconds: float


class SweepSummaryRow(BaseModel):
    gamma: float
    top_bin_y0_mean: float
    top_bin_y0_std: float
    top_bin_min_mean: float
    perc_F_by_all_y0_mean: Optional[float] = None
    perc_F_by_all_y0_std: Optional[float] = None
    perc_F_by_M_y0_mean: Optional[float] = None
    perc_F_by_F_y0_mean: Optional[float] = None
    perc_F_by_F_peak_mean: Optional[float] = None
    perc_F_by_F_peak_year: Optional[int] = None
    share_F_final_mean: float


def _build(model, **values):
    """Instantiate a model, converting pydantic errors into ConfigError"""
    try:
        return model(**values)
    except ValidationError as e:
        raise config_error_from(e) from e


def config_error_from(error: ValidationError) -> ConfigError:
    """Name the first offending key of a pydantic ValidationError"""
    first = error.errors()[0]
    key = '.'.join(str(part) for part in first.get('loc', ())) or 'config'
    return ConfigError(f"Invalid config key '{key}': {first.get('msg', str(error))}", key=key)


def build_spec(**values) -> ScenarioSpec:
    return _build(ScenarioSpec, **values)
