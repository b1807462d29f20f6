"""epcount: counting answers to existential positive queries on finite
relational structures, with equivalence deciders, inclusion-exclusion
expansion, oracle reductions, and structural classification."""

from .classify import (FormulaGraph, StructuralReport, analyze_pp, classify_set,
                       contract_graph, core_of_formula, exists_components, graph_of,
                       treewidth, treewidth_bounds)
from .counting import brute_force_count, brute_force_count_pp, count_ep, count_pp
from .equivalence import (EquivalenceVerdict, counting_equivalent,
                          distinguishing_pair_structure, joint_distinguishing_structure,
                          logically_equivalent, min_hom_order_witness,
                          semi_counting_equivalent)
from .errors import (EpcountError, GraphTooLargeError, LibMismatchError,
                     OracleInconsistencyError, ParseError, PreconditionError,
                     SearchExhaustedError, SignatureMismatchError, ValidationError)
from .expansion import AllFreeSplit, PlusSet, WeightedPpSum, all_free_part, plus_set, star_expansion
from .homs import (all_homomorphisms, core, find_homomorphism, find_lib_bijection_hom,
                   hom_equivalent, hom_set)
from .logic import (And, Atom, DisjunctiveEp, EpFormula, Exists, Node, Or, PpFormula, Top,
                    augment, canonical_pp_text, components, conjoin_pp, disjunctive_to_ep,
                    entails, from_structure_view, hat, normalize_ep, pp_to_ep,
                    to_structure_view)
from .parser import parse_formula_file, parse_structure_file
from .reductions import (ClassSum, CountOracle, PpCountOracle, ep_count_from_pp_oracle,
                         pp_count_from_ep_oracle, per_term_counts_from_sum_oracle,
                         recover_class_sums, solve_vandermonde, split_semi_class)
from .structures import (Signature, Structure, disjoint_union, disjoint_union_all,
                         enumerate_structures, full_structure, has_all_loops_element,
                         power, product, unit_structure)

__version__ = "0.1.0"
