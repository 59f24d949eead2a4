"""Natural lifts of a space form to its cotangent bundle.

Builds the lifted complex structure ``J`` and metric ``G`` from scalar
profiles of the energy density, computes the Levi-Civita connection and
curvature in the adapted frame from closed forms, and checks them against a
finite-difference oracle and the constant-holomorphic-curvature model.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, NatliftError  # noqa: E402
from .phase_space import LiftedStructure  # noqa: E402

__all__ = ["ConfigError", "DomainError", "LiftedStructure", "NatliftError", "__version__"]
