"""Lifting structures: boundaries, problems, search and constructions."""
from .core import (LEFT, RIGHT, HomData, LiftBoundary, LiftProblem, LiftStruct, classify,
                   count_sections_independently, declassify, enumerate_problems,
                   family_from_struct, family_violation, generic_problem, is_solution,
                   left_restricted, problem_errors, reindex, reindex_solution,
                   right_restricted, search_lift_struct, solution_errors, solve,
                   uniformity_check, unrestricted, verify_family)
from .constructions import (PullbackSquare, RetractData, left_compose, left_compose_formula,
                            left_restrict, left_restrict_formula, left_retract,
                            left_retract_formula, right_compose, right_compose_formula,
                            right_pullback, right_pullback_formula, right_pullback_inv,
                            right_pullback_inv_formula, right_restrict,
                            right_restrict_formula)
