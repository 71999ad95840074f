"""Convergence experiments for phi-attraction and random-sum transfer.

Deterministic runs evaluate closed-form pre-limit CFs along a schedule;
the transfer experiment simulates random and deterministic sums side by
side.  "Converges" means: final sup-grid distance below tolerance, and no
distance exceeding the running minimum by more than the noise allowance
(0 for deterministic runs, 3 standard errors for Monte Carlo).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .charfn import (
    IdExponent,
    PhiIdLaw,
    SemiStable,
    Stable,
    cf_distance,
    cf_eval,
    empirical_cf,
    no_real_zero_check,
    symmetric_grid,
)
from .counts import CountModel, count_sample
from .laplace import Degenerate, LaplaceTransform
from .report import ConvergenceReport
from .sampler import ComponentLaw

__all__ = [
    "AttractionExperiment",
    "run_phi_attraction",
    "run_partial_phi_attraction",
    "run_transfer_equivalence",
    "strict_stable_schedule_check",
    "min_schedule_ratio",
    "paired_degenerate_run",
    "TransferResult",
]

MIN_REPLICATES = 1000


@dataclass
class AttractionExperiment:
    """A deterministic phi-attraction run.

    ``component_cf`` is the CF ``g`` (a :class:`ComponentLaw` or any
    callable); the pre-limit at schedule point ``k`` is
    ``phi(n_k (1 - g(t / a_k) exp(-i t b_k)) + i t mu_k)``.
    """

    phi: LaplaceTransform
    target_psi: IdExponent
    component_cf: Callable
    a_schedule: Sequence[float]
    n_schedule: Sequence[int]
    b_schedule: Sequence[float] | None = None
    mu_schedule: Sequence[float] | None = None
    t_grid: np.ndarray = field(default_factory=symmetric_grid)
    tolerance: float = 1e-3
    mode: str = "deterministic"
    ratio_floor: float = 0.1

    def __post_init__(self):
        k = len(self.n_schedule)
        if len(self.a_schedule) != k:
            raise ValueError("a_schedule and n_schedule differ in length")
        for name in ("b_schedule", "mu_schedule"):
            sched = getattr(self, name)
            if sched is not None and len(sched) != k:
                raise ValueError(f"{name} and n_schedule differ in length")
        ns = list(self.n_schedule)
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n_schedule must be strictly increasing")
        if any(a <= 0 for a in self.a_schedule):
            raise ValueError("a_schedule must be positive")
        self.t_grid = np.asarray(self.t_grid, dtype=float)

    def _g(self, t):
        g = self.component_cf
        return g.cf(t) if isinstance(g, ComponentLaw) else np.asarray(g(t), dtype=complex)

    def prelimit(self, k: int) -> np.ndarray:
        t = self.t_grid
        n, a = self.n_schedule[k], self.a_schedule[k]
        gk = self._g(t / a)
        if self.b_schedule is not None:
            gk = gk * np.exp(-1j * t * self.b_schedule[k])
        inner = n * (1.0 - gk)
        if self.mu_schedule is not None:
            inner = inner + 1j * t * self.mu_schedule[k]
        return self.phi.evaluate(inner)


def _evaluate(exp: AttractionExperiment, name: str) -> ConvergenceReport:
    law = PhiIdLaw(exp.phi, exp.target_psi)
    # every target is itself phi-ID, so it must be zero-free on the grid
    zc = no_real_zero_check(law, exp.t_grid)
    if not zc.passed:
        raise ValueError(f"target CF vanishes at t = {zc.argmin}")
    target = cf_eval(law, exp.t_grid)
    dists, curves = [], []
    for k, n in enumerate(exp.n_schedule):
        f = exp.prelimit(k)
        dists.append(cf_distance(f, target))
        curves.append({"n": n, "t": exp.t_grid, "f": f, "target": target})
    meta = {
        "phi": exp.phi.to_dict(),
        "target_psi": exp.target_psi.to_dict(),
        "a_schedule": [float(a) for a in exp.a_schedule],
        "grid_points": int(exp.t_grid.size),
        "target_min_modulus": zc.min_modulus,
    }
    return ConvergenceReport(name, list(exp.n_schedule), dists, exp.tolerance, 0.0, meta, curves)


def run_phi_attraction(exp: AttractionExperiment) -> ConvergenceReport:
    """phi-attraction to a phi-stable target along the full schedule."""
    if exp.mode != "deterministic":
        raise ValueError("run_phi_attraction supports deterministic mode only")
    if not isinstance(exp.target_psi, Stable):
        raise ValueError("phi-attraction runs need a stable target exponent")
    return _evaluate(exp, "phi-attraction")


def min_schedule_ratio(n_schedule) -> float:
    ns = np.asarray(n_schedule, dtype=float)
    return float(np.min(ns[:-1] / ns[1:]))


def run_partial_phi_attraction(exp: AttractionExperiment) -> ConvergenceReport:
    """Partial phi-attraction along a subsequence ``n_k``.

    For a semi-stable target the subsequence must keep ``n_k / n_{k+1}``
    bounded away from zero; on a finite schedule we require the minimum
    ratio to be at least ``exp.ratio_floor``.  Semi-stable runs are strict
    sense (no centering).
    """
    if exp.mode != "deterministic":
        raise ValueError("run_partial_phi_attraction supports deterministic mode only")
    if isinstance(exp.target_psi, SemiStable):
        if len(exp.n_schedule) > 1:
            r = min_schedule_ratio(exp.n_schedule)
            if r < exp.ratio_floor:
                raise ValueError(
                    f"semi-stable run needs liminf n_k/n_(k+1) > 0; schedule ratio "
                    f"falls to {r:.3g} < floor {exp.ratio_floor}"
                )
        if exp.b_schedule is not None or exp.mu_schedule is not None:
            raise ValueError("semi-stable runs are strict sense; drop the centering")
    return _evaluate(exp, "partial-phi-attraction")


def paired_degenerate_run(exp: AttractionExperiment, partial: bool = False) -> ConvergenceReport:
    """Same schedule and component, with ``phi`` replaced by the point mass at 1.

    Its target is the ID law ``exp(-psi)`` itself, so agreement of verdicts
    checks that the two domains of attraction coincide on this instance.
    """
    twin = AttractionExperiment(
        Degenerate(1.0), exp.target_psi, exp.component_cf, exp.a_schedule, exp.n_schedule,
        exp.b_schedule, exp.mu_schedule, exp.t_grid, exp.tolerance, exp.mode, exp.ratio_floor,
    )
    return run_partial_phi_attraction(twin) if partial else run_phi_attraction(twin)


def strict_stable_schedule_check(a_schedule) -> tuple[bool, int | None]:
    """Check ``floor(a_n) == n`` for ``n = 1, 2, ...``; return (passed, first failing n)."""
    for n, a in enumerate(a_schedule, start=1):
        if math.floor(a) != n:
            return False, n
    return True, None


class TransferResult(NamedTuple):
    random_sum: ConvergenceReport
    deterministic_sum: ConvergenceReport

    @property
    def passed(self) -> bool:
        return self.random_sum.passed and self.deterministic_sum.passed


def run_transfer_equivalence(
    theta_schedule,
    phi: LaplaceTransform,
    j: int,
    m: int,
    component: Callable[[float], ComponentLaw],
    limit_psi: IdExponent,
    replicates: int,
    rng: np.random.Generator,
    t_grid=None,
    tolerance: float = 0.03,
) -> TransferResult:
    """Simulate ``N_theta``-sums and ``[1/theta]``-sums of ``component(theta)``.

    The deterministic sums are compared with ``g = exp(-limit_psi)``; the
    random sums with ``phi(m * limit_psi)``.  Both must shrink along the
    (decreasing) theta schedule and end below ``tolerance``.
    """
    if replicates < MIN_REPLICATES:
        raise ValueError(f"need at least {MIN_REPLICATES} replicates, got {replicates}")
    thetas = [float(x) for x in theta_schedule]
    if any(b >= a for a, b in zip(thetas, thetas[1:])) or any(x <= 0 for x in thetas):
        raise ValueError("theta schedule must be positive and strictly decreasing")
    t = symmetric_grid() if t_grid is None else np.asarray(t_grid, dtype=float)

    g_target = np.atleast_1d(limit_psi.omega(t))
    f_target = np.atleast_1d(phi.evaluate(m * np.asarray(limit_psi(t))))
    f_target = np.where(t == 0, 1.0 + 0j, f_target)

    rand_d, det_d, rand_curves, det_curves = [], [], [], []
    for theta in thetas:
        comp = component(theta)
        n_det = int(math.floor(1.0 / theta))
        det = comp.sum_of(np.full(replicates, n_det), rng)
        counts = count_sample(CountModel(phi, theta, j, m), rng, replicates)
        rnd = comp.sum_of(counts, rng)
        ecf_det, _ = empirical_cf(det, t)
        ecf_rnd, _ = empirical_cf(rnd, t)
        det_d.append(cf_distance(ecf_det, g_target))
        rand_d.append(cf_distance(ecf_rnd, f_target))
        det_curves.append({"theta": theta, "t": t, "f": ecf_det, "target": g_target})
        rand_curves.append({"theta": theta, "t": t, "f": ecf_rnd, "target": f_target})

    allowance = 3.0 / math.sqrt(replicates)
    meta = {"phi": phi.to_dict(), "j": j, "m": m, "replicates": replicates,
            "limit_psi": limit_psi.to_dict(), "grid_points": int(t.size),
            "component_at_first_theta": component(thetas[0]).to_dict()}
    return TransferResult(
        ConvergenceReport("transfer-random-sum", thetas, rand_d, tolerance, allowance,
                          dict(meta), rand_curves),
        ConvergenceReport("transfer-deterministic-sum", thetas, det_d, tolerance, allowance,
                          dict(meta), det_curves),
    )
