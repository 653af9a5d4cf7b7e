"""Free amalgamation classes, their limits and independence relations on finite approximations."""

from .classes import (ClassError, ClassHandle, abelian_groups, check_feuvrier, check_generic_element,
                      equivalence_relations, graphs, sets, vector_spaces, verify_pushout)
from .combinators import (CubeInput, add_equivalence_with_quotient, add_generic_bijection,
                          add_generic_function, add_generic_predicate, add_generic_substructure,
                          parameterize_class, three_amalgamation)
from .conditions import check_class
from .formulas import evaluate, flatten_parameterized, format_formula, parse_formula
from .independence import (IndepQuery, a_indep, axiom_suite, gamma_indep, independence_theorem_witness,
                           m_indep, m_indep_oracle)
from .limit import (SaturationConfig, acl_duplication_check, back_and_forth_check,
                    check_extension_property, ip_witness, saturate, tree_witness)
from .registry import parse_class
from .signature import Signature, format_signature, parse_signature
from .structures import Morphism, Structure, format_structure, generated, parse_structure

__version__ = "0.1.0"
