"""Multi-objective rover path planning on raster maps."""

from ._core import (
    BannedEndpointError,
    ConfigError,
    ConstraintInfeasibleError,
    GeometryError,
    InfeasibleError,
    InternalError,
    IoError,
    MoplanError,
    ParseError,
    RangeError,
    Scenario,
    decode_path,
    encode_path,
    kmeans,
    mission,
    plan,
    run_cli,
    sweep,
    weight_grid,
)

__all__ = [
    "BannedEndpointError",
    "ConfigError",
    "ConstraintInfeasibleError",
    "GeometryError",
    "InfeasibleError",
    "InternalError",
    "IoError",
    "MoplanError",
    "ParseError",
    "RangeError",
    "Scenario",
    "decode_path",
    "encode_path",
    "kmeans",
    "mission",
    "plan",
    "run_cli",
    "sweep",
    "weight_grid",
]
