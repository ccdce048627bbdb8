"""Long Orbit or Empty Value: orbit engine and variational principles on finite spaces."""

from .errors import HypothesisViolation, LongOrbitError
from .orbit_engine import (
    BudgetExceeded,
    EmptyValueAt,
    Orbit,
    OrbitBudget,
    SingletonAbsorbed,
    check_idempotent,
    greedy_orbit,
    idempotent_orbit,
    strip_diagonal,
)
from .principles import (
    CaristiInstance,
    FabianPreissInstance,
    OettliInstance,
    caristi_fixed_point,
    ekeland_metric,
    ekeland_premetric,
    fabian_preiss,
    oettli_thera,
    takahashi_minimize,
    verify_certificate,
)
from .spaces import FiniteSpace, ObjectiveTable, classify_distance

__version__ = "0.1.0"
