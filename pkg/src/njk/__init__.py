"""Exact symbolic verification engine for Nijenhuis operators on Lie
groupoids, Lie algebroids and degree-1 graded manifolds."""

from .algebroids import (
    AlgebroidData,
    AValued1Form,
    AValued2Form,
    BundleMapU,
    IMTriple,
    Section,
    a_torsion,
    algebroid_lie_derivative,
    bracket_sections,
    check_lie_algebroid,
    deformed_structure,
    im_check,
    lemma_triple,
    tangent_lift_triple,
)
from .catalog import CatalogEntry, build as build_catalog_entry
from .graded import (
    GradedChart,
    GradedFunction,
    GradedTensor11,
    GradedVectorField,
    check_homological,
    core_lift,
    de_rham_field,
    euler_check,
    graded_commutator,
    graded_fn_11,
    graded_lie_derivative,
    homological_field,
    linear_lift,
    theorem1_check,
    vertical_endomorphism,
)
from .groupoids import (
    Cochain,
    GroupoidPresentation,
    algebroid_of,
    check_axioms,
    delta_0,
    delta_minus1,
    left_lift,
    lemma_check,
    multiplicative_check,
    right_lift,
    theorem2_check,
)
from .scalars import (
    Config,
    OpaqueSymbol,
    Scalar,
    VerificationResult,
    canonical,
    differentiate,
    is_zero,
    parse,
    register_builtin,
    register_opaque,
    substitute,
    to_text,
    var,
)
from .tensors import (
    Chart,
    ScalarForm,
    SmoothMap,
    VVForm,
    contract_form,
    exterior_derivative,
    fn_bracket,
    lie_bracket,
    lie_derivative,
    lie_derivative_form,
    nijenhuis_torsion,
    pushforward,
    related_check,
)

__version__ = "0.1.0"
