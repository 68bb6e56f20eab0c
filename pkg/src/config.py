"""
Configuration settings for the nibbled-ellipse billiard toolkit.
"""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings with environment variable support (prefix ``NB_``)."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="NB_",
        extra="ignore",
    )

    # Application Configuration
    log_level: str = Field("INFO", description="Loguru level for console and file sinks")
    log_file: str = Field("nibbled.log", description="File sink name under logs/")
    threads: int = Field(1, ge=1, description="Worker cap for parallel scans (NB_THREADS)")

    # Data Paths
    data_dir: str = Field("./data")
    tables_dir: str = Field("./data/tables")
    reports_dir: str = Field("./reports")

    # Billiard geometry
    corner_tolerance: float = Field(1e-9, description="Boundary hit closer than this to a corner kills the flow")
    tangency_tolerance: float = Field(1e-14, description="Discriminant below this is a tangency, not a hit")

    # Quadrature
    quadrature_rtol: float = Field(1e-8, description="Level-to-level relative change accepted by the DE rules")
    quadrature_min_level: int = Field(5)
    quadrature_max_level: int = Field(12)
    endpoint_guard: float = Field(1e-9, description="Refuse s closer than this to an endpoint of D")
    period_check_rtol: float = Field(1e-7)
    k_max: int = Field(4, description="Default highest derivative order of xi")
    quadrature_cache_size: int = Field(200_000)

    # Polygons and flattening
    side_length_tolerance: float = Field(1e-10)
    interval_margin: float = Field(1e-6, description="Distance kept from parameter interval endpoints")
    symbolic_check_tol: float = Field(1e-9)

    # Translation surfaces and flow
    pairing_corner_tolerance: float = Field(1e-9)
    regular_corner_tolerance: float = Field(1e-12)
    saddle_tolerance: float = Field(1e-9)
    discontinuity_tolerance: float = Field(1e-12)
    min_iet_interval: float = Field(1e-10)
    max_crossings: int = Field(200_000)

    # IET and criterion
    connection_tolerance: float = Field(1e-12)
    strict_sign_margin: float = Field(1e3)
    weak_sign_band: float = Field(1e-12)
    grid_size: int = Field(100)


# Global settings instance
settings = Settings()
