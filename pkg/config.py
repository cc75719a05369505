"""Toolkit configuration."""
import os
import tempfile
from pathlib import Path


class Config:
    """Base configuration."""

    # Base directory
    BASE_DIR = Path(__file__).parent

    # Output
    OUTPUT_DIR = Path(os.environ.get('PRIMALDUAL_OUTPUT_DIR') or BASE_DIR / 'runs')

    # Logging
    LOG_LEVEL = os.environ.get('PRIMALDUAL_LOG_LEVEL', 'INFO')

    # Spectral estimates
    MATERIALIZE_CAP = int(os.environ.get('PRIMALDUAL_MATERIALIZE_CAP', 4096))
    POWER_ITERATIONS = int(os.environ.get('PRIMALDUAL_POWER_ITERATIONS', 200))

    # Solvers
    SOLVER_MAX_ITERS = int(os.environ.get('PRIMALDUAL_MAX_ITERS', 10000))
    DENOISE_MAX_ITERS = int(os.environ.get('PRIMALDUAL_DENOISE_MAX_ITERS', 500))
    TOL_STEP = float(os.environ.get('PRIMALDUAL_TOL_STEP', 1e-8))
    NORM_CAP = float(os.environ.get('PRIMALDUAL_NORM_CAP', 1e12))  # divergence guard

    # Prox verification
    ORACLE_GRID_STEP = float(os.environ.get('PRIMALDUAL_ORACLE_GRID_STEP', 1e-4))
    PROX_CHECK_TOLERANCE = float(os.environ.get('PRIMALDUAL_PROX_CHECK_TOLERANCE', 5e-4))

    # Multi-seed runs
    WORKERS = int(os.environ.get('PRIMALDUAL_WORKERS', 1))


class DevelopmentConfig(Config):
    """Development configuration."""
    LOG_LEVEL = os.environ.get('PRIMALDUAL_LOG_LEVEL', 'DEBUG')


class BenchmarkConfig(Config):
    """Benchmark configuration."""
    LOG_LEVEL = os.environ.get('PRIMALDUAL_LOG_LEVEL', 'WARNING')


class TestingConfig(Config):
    """Testing configuration."""
    LOG_LEVEL = 'WARNING'
    OUTPUT_DIR = Path(tempfile.gettempdir()) / 'primaldual-tests'


config = {
    'development': DevelopmentConfig,
    'benchmark': BenchmarkConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
