"""linkcert: exact homological linking and PL Morse certification on grids.

The package decides relative homological linking of region pairs inside
grid-triangulated boxes over prime fields, reproduces a catalogue of model
linking scenarios, and certifies existence, location, and critical-group
type of critical points of polynomial scalar fields via the linking
principle. Everything is exact and deterministic.
"""

__version__ = "0.1.0"

from .catalogue import CATALOGUE_NAMES, CatalogueScenario, catalogue, supported_parameterizations
from .certify import (
    CertificationOutcome,
    CriticalBandCertificate,
    MultiplicityOutcome,
    certify_band,
    certify_linking_principle,
    certify_multiplicity,
)
from .complexes import (
    DEFAULT_SIMPLEX_BUDGET,
    FullSubcomplex,
    GridDomain,
    SimplicialComplex,
    boundary_matrix,
    build_grid_complex,
    complement_subcomplex,
    full_subcomplex,
)
from .errors import (
    BudgetError,
    InternalConsistencyError,
    LinkcertError,
    PreconditionError,
    ValidationError,
)
from .gf import FieldMatrix, rank
from .homology import (
    HomologyBasis,
    LinkingReport,
    PairOfSpaces,
    RankRuleCheck,
    check_composition_rule,
    check_sum_rule,
    homology_basis,
    induced_map_rank,
    link_rank,
    locality_check,
    reduced_homology_dim,
    space_pair,
)
from .morse import (
    CriticalVertex,
    critical_groups,
    is_regular_value,
    lower_link,
    lower_star_numbers,
    morse_numbers,
    pl_critical_vertices,
    sublevel_complex,
    weak_morse_check,
)
from .regions import RegionSpec, from_json as region_from_json, rasterize
from .scalarfield import ScalarField

__all__ = [
    "__version__",
    "CATALOGUE_NAMES",
    "CatalogueScenario",
    "catalogue",
    "supported_parameterizations",
    "CertificationOutcome",
    "CriticalBandCertificate",
    "MultiplicityOutcome",
    "certify_band",
    "certify_linking_principle",
    "certify_multiplicity",
    "DEFAULT_SIMPLEX_BUDGET",
    "FullSubcomplex",
    "GridDomain",
    "SimplicialComplex",
    "boundary_matrix",
    "build_grid_complex",
    "complement_subcomplex",
    "full_subcomplex",
    "BudgetError",
    "InternalConsistencyError",
    "LinkcertError",
    "PreconditionError",
    "ValidationError",
    "FieldMatrix",
    "rank",
    "HomologyBasis",
    "LinkingReport",
    "PairOfSpaces",
    "RankRuleCheck",
    "check_composition_rule",
    "check_sum_rule",
    "homology_basis",
    "induced_map_rank",
    "link_rank",
    "locality_check",
    "reduced_homology_dim",
    "space_pair",
    "CriticalVertex",
    "critical_groups",
    "is_regular_value",
    "lower_link",
    "lower_star_numbers",
    "morse_numbers",
    "pl_critical_vertices",
    "sublevel_complex",
    "weak_morse_check",
    "RegionSpec",
    "region_from_json",
    "rasterize",
    "ScalarField",
]
