"""Finite distributive p-algebras: pseudocomplemented distributive lattices.

Construct the subdirectly irreducible members and finite free algebras,
compute canonical normal forms for terms, take congruence lattices apart via
prime-filter records carrying two natural orders, and decide identities and
quasi-identities level by level across the variety chain.
"""

from .algebras import (
    PAlgebra,
    Quotient,
    TableAlgebra,
    UpsetAlgebra,
    Violation,
    algebra_dumps,
    algebra_from_json_dict,
    algebra_loads,
    algebra_to_json_dict,
    atoms,
    build_chain,
    build_si,
    compatibility_witness,
    dense_elements,
    glivenko,
    is_isomorphic,
    join_irreducibles,
    product,
    product_many,
    quotient,
    regular_elements,
    si_cond_check,
    to_table,
    to_upset,
    validate,
)
from .config import Config, DEFAULT
from .congruences import (
    CmRecord,
    Congruence,
    all_congruences,
    closure_filter,
    cm_all,
    cm_from_prime_filter,
    cm_leq,
    cm_posets,
    cm_subset,
    compose_check_permutability,
    congruence_closure,
    full_congruence,
    i_type_filters,
    identity_congruence,
    is_prime_filter,
    m_hat,
    m_of,
    prime_filters,
    principal_congruence,
)
from .decide import (
    Equation,
    QuasiIdentity,
    Verdict,
    admissible_in_free,
    check_identity,
    check_quasi_identity,
    five_element_witness,
    oracle_equivalence,
    qb_quasi_identity,
    random_term,
    structural_completeness_report,
    subalgebra,
    three_element_witness,
)
from .errors import (
    BadIndex,
    BudgetExceeded,
    CapExceeded,
    MalformedTables,
    NotACongruence,
    NotPrime,
    ParseError,
    UnboundVariable,
    UnknownIdentifier,
)
from .free import (
    FreeAlgebra,
    JIndex,
    StoneDecomposition,
    base_leq,
    build_free,
    count_jirr,
    enumerate_jindices,
    free_distributive,
    free_skeleton,
    h3_poset,
    homomorphism_g,
    kernel_congruence,
    normal_form,
    quotient_to_distributive,
    stone_decompose,
)
from .posets import (
    Poset,
    downset_closure,
    enumerate_upsets,
    export_dot,
    is_pp_morphism,
    max_elements,
    min_elements,
    poset_isomorphic,
    upset_closure,
)
from .terms import (
    Join,
    Meet,
    ONE,
    Star,
    Term,
    Var,
    ZERO,
    Zero,
    One,
    atom_term,
    evaluate,
    ib_term,
    jirr_term,
    join_all,
    max_var,
    meet_all,
    parse,
    qb_system,
    term_from_json,
    term_to_json,
    to_text,
    vars_of,
)

__version__ = "0.1.0"
