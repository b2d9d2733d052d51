"""
Application configuration settings
"""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Process-wide numeric defaults, overridable from the environment"""

    # Project info
    PROJECT_NAME: str = "hardygap"
    VERSION: str = "1.0.0"
    DESCRIPTION: str = "Weighted L^p Hardy constants, spectral gaps and decay exponents on radial domains"
    SCHEMA_VERSION: str = "1.0"

    # Regime detection
    EQ_TOLERANCE: float = 1e-12

    # Indicial roots
    ROOT_TOL: float = 1e-12
    ROOT_MAX_BISECTIONS: int = 200
    MU_CLAMP: float = 1e-10

    # Rayleigh solver
    SOLVER_TOL: float = 1e-10
    MAX_ITER: int = 500
    EIGEN_TOL: float = 1e-12
    NEWTON_MAX_STEPS: int = 60
    GAUSS_POINTS: int = 8

    # Meshes
    GRADING_RATIO: float = 1.15
    DEFAULT_ELEMENTS: int = 400
    MIN_COLLAR_NODES: int = 8
    T_MIN_SEQUENCE: list[float] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    R_MAX_FACTORS: list[float] = [1e2, 1e3, 1e4, 1e5, 1e6]

    # Radial calculus
    FD_REL_STEP: float = 1e-4
    QUAD_REL_TOL: float = 1e-12
    INTEGRABILITY_LEVELS: int = 4
    INTEGRABILITY_DEPTH: int = 40

    # Classification
    GAP_MARGIN_FACTOR: float = 3.0

    # Processing settings
    MAX_WORKERS: int = 4

    # Output
    OUTPUT_DIR: str = "results"
    SIGNIFICANT_DIGITS: int = 15

    # Logging
    LOG_LEVEL: str = "INFO"

    class Config:
        env_file = ".env"
        env_prefix = "HARDYGAP_"
        case_sensitive = True


# Create global settings instance
settings = Settings()
