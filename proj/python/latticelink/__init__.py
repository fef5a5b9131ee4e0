"""Lattice modular-robot coupling simulator and reconfiguration planner."""

from ._core import (
    World,
    __version__,
    check_alignment,
    plan,
    run_scenario,
    validate_plan,
)

__all__ = ["World", "check_alignment", "plan", "run_scenario", "validate_plan", "__version__"]
