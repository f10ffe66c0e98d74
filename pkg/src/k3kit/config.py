"""Runtime configuration read from the environment.

``K3KIT_BUDGET_POINTS`` overrides every enumeration budget (field sizes,
projective points, lattice and quadric enumerations).  Without it each
operation uses its own default.
"""

import os
from typing import Optional

ENV_BUDGET = "K3KIT_BUDGET_POINTS"


def budget_points(default: int, explicit: Optional[int] = None) -> int:
    if explicit is not None:
        return int(explicit)
    value = os.environ.get(ENV_BUDGET)
    if value:
        try:
            return int(float(value))
        except ValueError:
            pass
    return default
