"""Convergence reports shared by the count, CF and limit experiments."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


def nonincreasing_within(distances, allowance) -> bool:
    """True when no distance exceeds the running minimum by more than ``allowance``.

    Comparing against the running minimum (not the predecessor) keeps one
    lucky low draw from being followed by a spurious failure chain.
    """
    best = np.inf
    for d in distances:
        if d > best + allowance:
            return False
        best = min(best, d)
    return True


@dataclass
class ConvergenceReport:
    """Sup-grid distances along a schedule, with a verdict.

    ``schedule`` holds the n (or theta) values, ``distances`` the sup
    distance at each.  ``allowance`` is the noise slack for the
    monotonicity check (0 for deterministic runs).
    """

    name: str
    schedule: list
    distances: list
    tolerance: float
    allowance: float = 0.0
    metadata: dict = field(default_factory=dict)
    curves: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.schedule = [float(x) if not float(x).is_integer() else x for x in self.schedule]
        self.distances = [float(d) for d in self.distances]

    @property
    def final_distance(self) -> float:
        return self.distances[-1]

    @property
    def monotone(self) -> bool:
        return nonincreasing_within(self.distances, self.allowance)

    @property
    def passed(self) -> bool:
        return bool(self.final_distance < self.tolerance and self.monotone)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("curves")
        d["final_distance"] = self.final_distance
        d["monotone"] = self.monotone
        d["verdict"] = "pass" if self.passed else "fail"
        return d
