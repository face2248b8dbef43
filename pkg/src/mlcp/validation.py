"""Input checks used at the estimator boundary."""
from __future__ import annotations

from .circulation import Circulation, validate_circulation
from .instance import MlcpInstance

__all__ = ["check_circulation", "check_instance", "check_choice"]


def check_circulation(X) -> Circulation:
    if not isinstance(X, Circulation):
        raise TypeError(f"expected a Circulation, got {type(X).__name__}")
    problems = validate_circulation(X)
    if problems:
        head = "; ".join(str(v) for v in problems[:3])
        raise ValueError(f"circulation has {len(problems)} violation(s): {head}")
    return X


def check_instance(X) -> MlcpInstance:
    if not isinstance(X, MlcpInstance):
        raise TypeError(f"expected an MlcpInstance, got {type(X).__name__}")
    if X.successors is None:
        raise ValueError("instance was not built with build_instance (no successor sets)")
    return X


def check_choice(instance: MlcpInstance, y_day) -> tuple[str, ...]:
    """Sorted daytime choice, restricted to the instance's candidates."""
    if isinstance(y_day, str):
        raise TypeError("y_day must be a collection of location ids, not a string")
    cands = set(instance.catalog.day_candidates)
    return tuple(sorted(set(y_day) & cands))
