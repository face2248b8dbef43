"""scikit-learn style wrappers.

``MOExtractor`` turns a circulation into MO lists; ``LocationChooser`` learns
a daytime location choice on one instance and can apply it to others (other
horizons, other scenarios), which is how choices are compared across data
sets.
"""
from __future__ import annotations

import math

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .circulation import extract_mos
from .metrics import daily_activity, mean_daytime_share
from .solver import Solution, solve_exact, solve_for_choice, solve_greedy
from .solver.oracle import brute_force_oracle
from .solver.search import DEFAULT_ENUMERATION_CAP
from .validation import check_choice, check_circulation, check_instance

__all__ = ["MOExtractor", "LocationChooser"]

SOLVERS = ("exact", "greedy", "oracle")


class MOExtractor(TransformerMixin, BaseEstimator):
    def __init__(self, delta_day=7.0, delta_night=19.0, include_boundaries=True,
                 classification="prose"):
        self.delta_day = delta_day
        self.delta_night = delta_night
        self.include_boundaries = include_boundaries
        self.classification = classification

    def fit(self, X, y=None):
        check_circulation(X)
        if self.classification not in ("prose", "formula"):
            raise ValueError(f"classification must be 'prose' or 'formula', got {self.classification!r}")
        self.n_units_in_ = len(X.rosters)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_units_in_")
        return extract_mos(check_circulation(X), self.delta_day, self.delta_night,
                           include_boundaries=self.include_boundaries,
                           classification=self.classification)


class LocationChooser(BaseEstimator):
    """Choose daytime maintenance locations for an instance.

    Parameters
    ----------
    solver : {"exact", "greedy", "oracle"}
    lmax : int or None
        Overrides the instance's daytime budget when given.
    enumeration_cap : int
        Largest number of budget-sized choices enumerated outright by the
        exact solver before it switches to branch-and-bound.
    n_threads : int or None
        Worker threads for per-unit subproblems; ``None`` reads ``MLCP_THREADS``.

    Attributes
    ----------
    solution_ : Solution
    y_day_ : tuple of str
    objective_ : Objective or None
    status_ : str
    certificates_ : tuple of InfeasibilityCertificate
    """

    def __init__(self, solver="exact", lmax=None, enumeration_cap=DEFAULT_ENUMERATION_CAP,
                 n_threads=1):
        self.solver = solver
        self.lmax = lmax
        self.enumeration_cap = enumeration_cap
        self.n_threads = n_threads

    def _instance(self, X):
        inst = check_instance(X)
        return inst if self.lmax is None else inst.with_lmax(self.lmax)

    def fit(self, X, y=None):
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        inst = self._instance(X)
        if self.solver == "exact":
            sol = solve_exact(inst, self.enumeration_cap, self.n_threads)
        elif self.solver == "greedy":
            sol = solve_greedy(inst, self.n_threads)
        else:
            sol = brute_force_oracle(inst)
        self.solution_ = sol
        self.y_day_ = tuple(sol.y_day)
        self.objective_ = sol.objective
        self.status_ = sol.status
        self.certificates_ = tuple(sol.certificates)
        return self

    def predict(self, X) -> Solution:
        """Optimal schedules on ``X`` with the learned locations opened."""
        check_is_fitted(self, "solution_")
        inst = check_instance(X)
        y = check_choice(inst, self.y_day_)
        if len(y) > inst.lmax_day:
            inst = inst.with_lmax(len(y))
        return solve_for_choice(inst, y, self.n_threads)

    def score(self, X, y=None) -> float:
        """Mean daytime share on ``X`` (nan when infeasible)."""
        inst = check_instance(X)
        sol = self.predict(inst)
        if not sol.feasible:
            return math.nan
        return mean_daytime_share(daily_activity(sol, inst))
