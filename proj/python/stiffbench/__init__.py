"""Simulated haptic stiffness-discrimination study: samples, feedback laws,
sessions and statistics."""

from ._core import (
    ConfigError,
    DegenerateSample,
    MalformedLog,
    NearZeroFollowerDisplacement,
    StiffbenchError,
    UnbalancedDesign,
    catalog,
    gate,
    leader_to_follower_displacement,
    method1,
    method2,
    run_session,
    schedule_csv,
    schedule_table1,
    stats,
    validate_schedule_csv,
)

__version__ = "0.3.0"
