"""Strategic professional-network formation under platform link recommendations."""

from .errors import (
    ConsistencyError,
    DegenerateDenominatorError,
    FeasibilityError,
    InputError,
    LinkrecError,
    ResourceError,
)
from .model import (
    BLUE,
    GREEN,
    INFINITY,
    Network,
    OpportunityDistribution,
    ParamPoint,
    Population,
    exogenous_utility_ratio,
    mu,
    utilities,
    utility,
    utility_ratio,
    welfare_exogenous,
    welfare_rawlsian,
    welfare_utilitarian,
)
from .recsets import RecommendationSet, construct_recommendations, validate_recommendations
from .equilibrium import (
    JOINT,
    OWN,
    DefectionWitness,
    best_defection_for_add,
    construct_symmetric_equilibrium,
    enumerate_equilibria,
    is_dfpn,
    reciprocity_audit,
)
from .bounds import (
    DegreeEnvelope,
    UtilityEnvelope,
    feasible_degree_set,
    reciprocity_constant,
    ur_envelope,
    utility_envelope_asymptotic,
    utility_envelope_finite,
    welfare_envelope,
)

__version__ = "0.1.0"
