"""
Scenario Configuration Module

This module contains the scenario presets and the runtime settings of the
simulator. Each preset lists only the fields that differ from the
ScenarioSpec defaults (which carry the calibrated model parameters).
"""

import os

from dotenv import load_dotenv

load_dotenv()

SCENARIO_CONFIGS = {
    'A': {
        'init_mode': 'unbiased',
        'lambda_mode': 'size_dependent',
        'target_share': 0.5,
        'growth_mode': 'exogenous',
        'description': 'Baseline: unbiased initial seats, size-dependent homophily in hiring'
    },
    'B': {
        'init_mode': 'biased',
        'gamma': 0.8,
        'lambda_mode': 'size_dependent',
        'target_share': 0.5,
        'growth_mode': 'exogenous',
        'description': 'Biased initial seat distribution towards small firms (gamma = 0.8)'
    },
    'C': {
        'init_mode': 'unbiased',
        'lambda_mode': 'fixed',
        'target_share': 0.5,
        'growth_mode': 'exogenous',
        'description': 'Fixed homophily in hiring (lambda = 0.9)'
    },
    'D': {
        'init_mode': 'unbiased',
        'lambda_mode': 'size_dependent',
        'target_share': 1.0 / 6.0,
        'growth_mode': 'exogenous',
        'description': 'Minority baseline: inflow converges to 1/6'
    },
    'E': {
        'init_mode': 'unbiased',
        'lambda_mode': 'fixed',
        'target_share': 1.0 / 6.0,
        'growth_mode': 'exogenous',
        'description': 'Minority with fixed homophily in hiring'
    },
    'Aprime': {
        'init_mode': 'unbiased',
        'lambda_mode': 'size_dependent',
        'target_share': 0.5,
        'growth_mode': 'endogenous',
        'description': 'Baseline with perception feedback on inflow growth'
    },
    'Bprime': {
        'init_mode': 'biased',
        'gamma': 0.8,
        'lambda_mode': 'size_dependent',
        'target_share': 0.5,
        'growth_mode': 'endogenous',
        'description': 'Biased start with perception feedback on inflow growth'
    },
    'gamma_sweep': {
        'base': 'B',
        'gamma_start': 0.0,
        'gamma_stop': 0.6,
        'steps': 13,
        'description': 'Scenario B replicated over gamma in 13 steps from 0 to 0.6'
    },
}

# Runtime settings
SIMULATION_CONFIG = {
    'WORKERS': int(os.getenv('BOARDSIM_WORKERS', 1)),
    'DEFAULT_RUNS': int(os.getenv('BOARDSIM_DEFAULT_RUNS', 100)),
    'OUTPUT_DIR': os.getenv('BOARDSIM_OUTPUT_DIR', 'output'),
    'LOG_LEVEL': os.getenv('BOARDSIM_LOG_LEVEL', 'INFO').upper(),
}

TOOL_NAME = 'boardsim'
TOOL_VERSION = '1.0.0'
