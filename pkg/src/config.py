"""
Configuration module for the NC phase-space toolkit
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Configuration class for the toolkit"""

    # Runtime settings
    MAX_THREADS = os.getenv('NCPHASE_MAX_THREADS', '4')
    LOG_LEVEL = os.getenv('NCPHASE_LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('NCPHASE_LOG_FILE', 'ncphase.log')

    # Numerical tolerances (fixed, never per call)
    CONSTRUCTION_TOL = 1e-12
    DERIVED_TOL = 1e-10
    VERDICT_TOL = 1e-10
    SINGULAR_TOL = 1e-14
    PIVOT_TOL = 1e-10
    COND_LIMIT = 1e12
    TSIRELSON_SLACK = 1e-9

    # Bell search defaults
    BELL_GRID_POINTS = 21
    BELL_GRID_BOUND = 2.0
    BELL_XATOL = 1e-6
    BELL_MAX_ITER = 500

    # Output
    FLOAT_FORMAT = '%.17g'

    @classmethod
    def validate_config(cls):
        """Validate configuration settings"""
        try:
            threads = int(cls.MAX_THREADS)
        except (TypeError, ValueError):
            raise ValueError(f"NCPHASE_MAX_THREADS must be a positive integer, got {cls.MAX_THREADS!r}")
        if threads < 1:
            raise ValueError(f"NCPHASE_MAX_THREADS must be a positive integer, got {threads}")
        return True

    @classmethod
    def max_workers(cls) -> int:
        """Get the validated thread cap for grid and trajectory work"""
        cls.validate_config()
        return int(cls.MAX_THREADS)
