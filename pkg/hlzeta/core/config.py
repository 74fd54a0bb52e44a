"""
Configuration management for the HLZeta workbench.
"""
from typing import Dict, List, Optional
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


# Hard ceiling for the arithmetic sieve, whatever the environment asks for
SIEVE_CAPACITY = 10_000_000


class Settings(BaseSettings):
    """Application settings."""

    # Arithmetic tables
    sieve_bound: int = Field(default=1_000_000, description="Upper bound of the lazily built arithmetic sieve")
    r3_bound: int = Field(default=100_000, description="Upper bound of the three-squares representation table")

    # Series truncation
    max_terms: int = Field(default=10_000_000, description="Maximum number of terms summed by any series")
    tail_tolerance: float = Field(default=1e-12, description="Default certified tail tolerance for series")
    tail_mode: str = Field(default="euler_maclaurin", description="Series tail mode: euler_maclaurin or bound")

    # Quadrature
    quad_abs_tol: float = Field(default=1e-12, description="Default absolute quadrature tolerance")
    quad_rel_tol: float = Field(default=1e-10, description="Default relative quadrature tolerance")
    quad_max_subdivisions: int = Field(default=200, description="Default subdivision limit per adaptive call")

    # Suite
    suite_jobs: int = Field(default=1, description="Worker threads used by the identity suite")
    output_format: str = Field(default="jsonl", description="Report stream format: csv or jsonl")
    dirichlet_characters: Dict[str, List[int]] = Field(
        default={
            "3:1": [0, 1, -1],
            "4:1": [0, 1, 0, -1],
            "5:1": [0, 1, -1, -1, 1],
        },
        description="Dirichlet character value tables keyed 'modulus:index'",
    )

    # Report persistence
    save_reports: bool = Field(default=False, description="Persist API verification runs as JSON-lines files")
    reports_dir: str = Field(default="outputs/reports", description="Directory for persisted verification runs")

    # API Configuration
    api_host: str = Field(default="0.0.0.0", description="API host")
    api_port: int = Field(default=8000, description="API port")

    # Logging
    log_level: str = Field(default="INFO", description="Log level")
    log_file: Optional[str] = Field(default=None, description="Log file path")
    log_json: bool = Field(default=False, description="Render log lines as JSON instead of console text")

    @field_validator("sieve_bound")
    @classmethod
    def validate_sieve_bound(cls, v: int) -> int:
        """Keep the sieve inside its hard capacity."""
        if v < 10 or v > SIEVE_CAPACITY:
            raise ValueError(f"sieve_bound must lie in [10, {SIEVE_CAPACITY}]")
        return v

    @field_validator("tail_mode")
    @classmethod
    def validate_tail_mode(cls, v: str) -> str:
        if v not in ("euler_maclaurin", "bound"):
            raise ValueError("tail_mode must be 'euler_maclaurin' or 'bound'")
        return v

    @field_validator("output_format")
    @classmethod
    def validate_output_format(cls, v: str) -> str:
        if v not in ("csv", "jsonl"):
            raise ValueError("output_format must be 'csv' or 'jsonl'")
        return v

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        env_prefix = "HLZETA_"
        case_sensitive = False


# Global settings instance
settings = Settings()
