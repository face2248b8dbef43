from .certify import check_certificate, detect_structural_infeasibility
from .checker import ConstraintViolation, validate_solution
from .dp import UnitProblem, schedule_unit_optimal, usable_mask
from .model import (InfeasibilityCertificate, Objective, Solution, UnitSchedule,
                    objective_of, solution_from_dict)
from .oracle import OracleSizeError, brute_force_oracle
from .search import (DEFAULT_ENUMERATION_CAP, ChoiceEvaluator, solve_exact, solve_for_choice,
                     solve_greedy)

__all__ = [
    "ChoiceEvaluator", "ConstraintViolation", "DEFAULT_ENUMERATION_CAP", "InfeasibilityCertificate",
    "Objective", "OracleSizeError", "Solution", "UnitProblem", "UnitSchedule",
    "brute_force_oracle", "check_certificate", "detect_structural_infeasibility",
    "objective_of", "schedule_unit_optimal", "solution_from_dict", "solve_exact",
    "solve_for_choice", "solve_greedy", "usable_mask", "validate_solution",
]
