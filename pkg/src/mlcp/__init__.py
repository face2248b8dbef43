"""Maintenance location choice for rolling stock: which locations to open for
daytime maintenance, and when each unit is maintained."""
from .circulation import (Circulation, MaintenanceOpportunity, Trip, UnitRoster, classify_mo,
                          encode_time, extract_mos, read_circulation_csv, validate_circulation)
from .estimator import LocationChooser, MOExtractor
from .instance import (DEFAULT_TYPES, InstanceConfig, LocationCatalog, MaintenanceType, MlcpInstance,
                       build_instance, instance_from_config)
from .solver import (Objective, Solution, brute_force_oracle, solve_exact, solve_for_choice,
                     solve_greedy, validate_solution)

__version__ = "0.1.0"
