"""Construction, verification and classification of mutually unbiased bases
in dimensions 2 to 5, with exact roots-of-unity certificates where the
solutions are discrete and rigorous numerics where they are parametric."""

__version__ = "0.1.0"

from .cyclotomic import (
    CycInt,
    OrderMismatch,
    UnsupportedOrder,
    cyc_add,
    cyc_conj,
    cyc_embed,
    cyc_is_rational,
    cyc_mul,
)
from .matrices import (
    AuditResult,
    BackendMismatch,
    ComplexMatrix,
    CycMatrix,
    CycVector,
    Mismatch,
    MonomialMatrix,
    MuBasisSet,
    NotStandardForm,
    NotUnitary,
    Overlap,
    PhaseMatrix,
    PhaseVector,
    dephase,
    is_hadamard,
    monomial_apply,
    mu_overlap,
)
from .solvers import (
    FAMILY_CATALOG,
    DomainError,
    MuVectorSolution,
    UnknownName,
    VectorFamily,
    build_named,
    family_member,
    solve_d2,
    solve_d3,
    solve_d4,
    tabulated_d5_vectors,
)
from .search import (
    MatchReport,
    NoConvergence,
    NotHadamard,
    SearchConfig,
    SearchResult,
    match_against,
    search,
)
from .assembly import (
    ParametricMuBasis,
    UnknownFamily,
    assemble_bases,
    maximal_mu_sets,
    mu_rule,
    orthogonality_graph,
    pair_families,
    standard_complete_set,
    unbiasedness_residual,
)
from .equivalence import (
    CatalogEntry,
    EquivalenceRefutation,
    EquivalenceResult,
    EquivalenceWitness,
    TripleInequivalenceReport,
    are_equivalent,
    inequivalence_d5_triples,
    right_monomial_factor,
    verify_identity_catalog,
    verify_witness,
)
from .classify import (
    EXPECTED_CLASSES,
    ClassEntry,
    ClassificationReport,
    CompleteSetAudit,
    classify,
    verify_complete_set,
)
from .cli import load_basis_set, main, save_basis_set

__all__ = [
    "__version__",
    # cyclotomic
    "CycInt",
    "OrderMismatch",
    "UnsupportedOrder",
    "cyc_add",
    "cyc_conj",
    "cyc_embed",
    "cyc_is_rational",
    "cyc_mul",
    # matrices
    "AuditResult",
    "BackendMismatch",
    "ComplexMatrix",
    "CycMatrix",
    "CycVector",
    "Mismatch",
    "MonomialMatrix",
    "MuBasisSet",
    "NotStandardForm",
    "NotUnitary",
    "Overlap",
    "PhaseMatrix",
    "PhaseVector",
    "dephase",
    "is_hadamard",
    "monomial_apply",
    "mu_overlap",
    # solvers
    "FAMILY_CATALOG",
    "DomainError",
    "MuVectorSolution",
    "UnknownName",
    "VectorFamily",
    "build_named",
    "family_member",
    "solve_d2",
    "solve_d3",
    "solve_d4",
    "tabulated_d5_vectors",
    # numeric search
    "MatchReport",
    "NoConvergence",
    "NotHadamard",
    "SearchConfig",
    "SearchResult",
    "match_against",
    "search",
    # assembly
    "ParametricMuBasis",
    "UnknownFamily",
    "assemble_bases",
    "maximal_mu_sets",
    "mu_rule",
    "orthogonality_graph",
    "pair_families",
    "standard_complete_set",
    "unbiasedness_residual",
    # equivalence
    "CatalogEntry",
    "EquivalenceRefutation",
    "EquivalenceResult",
    "EquivalenceWitness",
    "TripleInequivalenceReport",
    "are_equivalent",
    "inequivalence_d5_triples",
    "right_monomial_factor",
    "verify_identity_catalog",
    "verify_witness",
    # classification
    "EXPECTED_CLASSES",
    "ClassEntry",
    "ClassificationReport",
    "CompleteSetAudit",
    "classify",
    "verify_complete_set",
    # cli
    "load_basis_set",
    "main",
    "save_basis_set",
]
