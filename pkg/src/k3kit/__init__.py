"""k3kit: exact tools for index-p sublattices, Clifford invariants of sextic
double planes, zeta functions of K3 surfaces over finite fields and
Brauer-Manin obstructions to weak approximation."""

__version__ = "0.1.0"

from .arith import QmodTwoZ, QmodZ
from .errors import BudgetError, K3KitError, PreconditionError

__all__ = ["QmodTwoZ", "QmodZ", "K3KitError", "PreconditionError", "BudgetError", "__version__"]
