"""Count laws induced by a Laplace transform, and the Harris family.

A :class:`CountModel` has PGF ``P(s) = s**j * phi((1 - s**m) / theta)``.
Since ``phi(x) = E[exp(-x U)]``, the PGF is ``E[s**j * exp(-(U/theta)(1 - s**m))]``,
which is the PGF of ``j + m*K`` with ``K | U ~ Poisson(U / theta)``.  That
mixed-Poisson representation gives an exact sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .laplace import (
    Degenerate,
    Exponential,
    Gamma,
    LaplaceTransform,
    Mixture,
    lt_eval,
    lt_from_dict,
)
from .report import ConvergenceReport

__all__ = [
    "CountModel",
    "HarrisModel",
    "pgf_eval",
    "count_sample",
    "harris_pgf",
    "harris_as_count_model",
    "scaled_count_limit_check",
    "harris_scaling_check",
    "count_from_dict",
    "count_pmf",
    "DEFAULT_RATE_CAP",
]

DEFAULT_RATE_CAP = 1e9


@dataclass(frozen=True)
class CountModel:
    phi: LaplaceTransform
    theta: float
    j: int = 0
    m: int = 1

    def __post_init__(self):
        theta = float(self.theta)
        if not (math.isfinite(theta) and theta > 0):
            raise ValueError("theta must be positive")
        if int(self.j) != self.j or self.j < 0:
            raise ValueError("j must be an integer >= 0")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be an integer >= 1")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "j", int(self.j))
        object.__setattr__(self, "m", int(self.m))

    def pgf(self, s):
        return pgf_eval(self, s)

    def sample(self, rng, size=None, rate_cap=DEFAULT_RATE_CAP):
        return count_sample(self, rng, size, rate_cap)

    def to_dict(self):
        return {"phi": self.phi.to_dict(), "theta": self.theta, "j": self.j, "m": self.m}


@dataclass(frozen=True)
class HarrisModel:
    """Harris(a, m): PGF ``s / (a - (a-1) s**m) ** (1/m)``."""

    a: float
    m: int = 1

    def __post_init__(self):
        a = float(self.a)
        if not (math.isfinite(a) and a > 1):
            raise ValueError("Harris parameter a must exceed 1")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be an integer >= 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "m", int(self.m))

    def pgf(self, s):
        return harris_pgf(self, s)

    def sample(self, rng, size=None, rate_cap=DEFAULT_RATE_CAP):
        return count_sample(harris_as_count_model(self), rng, size, rate_cap)

    def to_dict(self):
        return {"harris": {"a": self.a, "m": self.m}}


def _unit_interval(s):
    arr = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("PGF argument must lie in [0, 1]")
    return arr


def pgf_eval(model: CountModel, s):
    s = _unit_interval(s)
    # -expm1(m log s) keeps 1 - s^m accurate near s = 1
    with np.errstate(divide="ignore"):
        one_minus = -np.expm1(model.m * np.log(s))
    out = s ** model.j * lt_eval(model.phi, one_minus / model.theta)
    return float(out) if np.ndim(out) == 0 else out


def count_sample(model: CountModel, rng: np.random.Generator, size=None,
                 rate_cap: float = DEFAULT_RATE_CAP):
    """Exact draw(s) of ``N = j + m * Poisson(U / theta)`` with ``U ~ phi``.

    Raises ``OverflowError`` if any Poisson rate exceeds ``rate_cap`` rather
    than truncating.
    """
    u = np.asarray(model.phi.sample(rng, size), dtype=float)
    rate = u / model.theta
    if np.any(rate > rate_cap):
        raise OverflowError(
            f"Poisson rate {float(np.max(rate)):.3g} exceeds cap {rate_cap:.3g}; "
            "increase theta or the cap"
        )
    k = rng.poisson(rate)
    n = model.j + model.m * np.asarray(k, dtype=np.int64)
    if size is None:
        return int(n)
    return n


def count_pmf(model: CountModel, n_max: int) -> np.ndarray:
    """Exact ``P(N = n)`` for ``n = 0..n_max``.

    ``K = (N - j)/m`` is mixed Poisson with rate ``U/theta``: Poisson for a
    point mass, negative binomial (shape ``nu``, success probability
    ``theta/(theta + beta)``) for gamma and exponential ``U``, and the
    corresponding mixture for mixtures.
    """
    k_max = max(-1, (n_max - model.j) // model.m)
    k = np.arange(k_max + 1)
    pk = _mixed_poisson_pmf(model.phi, model.theta, k)
    out = np.zeros(n_max + 1)
    out[model.j + model.m * k] = pk
    return out


def _mixed_poisson_pmf(phi, theta, k):
    if isinstance(phi, Degenerate):
        return stats.poisson.pmf(k, phi.c / theta)
    if isinstance(phi, Exponential):
        return stats.nbinom.pmf(k, 1.0, theta / (theta + phi.beta))
    if isinstance(phi, Gamma):
        return stats.nbinom.pmf(k, phi.nu, theta / (theta + phi.beta))
    if isinstance(phi, Mixture):
        return sum(w * _mixed_poisson_pmf(c, theta, k) for w, c in zip(phi.weights, phi.components))
    raise TypeError(f"no PMF for {type(phi).__name__}")


def harris_pgf(model: HarrisModel, s):
    s = _unit_interval(s)
    a, m = model.a, model.m
    out = s / (a - (a - 1.0) * s ** m) ** (1.0 / m)
    return float(out) if np.ndim(out) == 0 else out


def harris_as_count_model(model: HarrisModel) -> CountModel:
    """Rewrite Harris(a, m) as ``s * phi_g((1 - s^m)/theta)``.

    ``phi_g(x) = (1 + m x)^(-1/m)`` (gamma, shape 1/m, scale m, mean 1) and
    ``theta = m / (a - 1)``, because
    ``1 + m (a-1)(1 - s^m)/m = a - (a-1) s^m``.
    """
    m = model.m
    return CountModel(Gamma(nu=1.0 / m, beta=float(m)), theta=m / (model.a - 1.0), j=1, m=m)


def _emp_lt(x, v_grid):
    # associative fold: sums of exp(-v x) per v
    return np.exp(-np.outer(v_grid, x)).mean(axis=1)


def scaled_count_limit_check(
    phi: LaplaceTransform,
    j: int,
    m: int,
    theta_schedule,
    v_grid,
    samples_per_theta: int,
    rng: np.random.Generator,
    tolerance: float = 1e-3,
    mc_tolerance: float | None = None,
) -> tuple[ConvergenceReport, ConvergenceReport]:
    """Check ``theta * N_theta -> m U`` along a decreasing theta schedule.

    Returns ``(exact, empirical)`` reports.  The exact report uses the
    pre-limit transform ``exp(-v j theta) * phi((1 - exp(-v m theta))/theta)``
    with zero noise allowance; the empirical report uses
    ``mean(exp(-v theta N))`` with a 3-standard-error allowance.  Both are
    measured against ``phi(m v)``.
    """
    thetas = np.asarray(theta_schedule, dtype=float)
    if thetas.ndim != 1 or thetas.size == 0 or np.any(thetas <= 0):
        raise ValueError("theta schedule must be a nonempty list of positive reals")
    if np.any(np.diff(thetas) >= 0):
        raise ValueError("theta schedule must be strictly decreasing")
    v = np.asarray(v_grid, dtype=float)
    if np.any(v <= 0):
        raise ValueError("v grid must be positive")
    target = lt_eval(phi, m * v)

    exact_d, emp_d, curves = [], [], []
    for theta in thetas:
        exact = np.exp(-v * j * theta) * lt_eval(phi, -np.expm1(-v * m * theta) / theta)
        model = CountModel(phi, theta, j, m)
        n = count_sample(model, rng, samples_per_theta)
        emp = _emp_lt(theta * n, v)
        exact_d.append(np.max(np.abs(exact - target)))
        emp_d.append(np.max(np.abs(emp - target)))
        curves.append({"theta": theta, "v": v.tolist(), "exact": exact.tolist(),
                       "empirical": emp.tolist(), "target": target.tolist()})

    meta = {"phi": phi.to_dict(), "j": j, "m": m, "samples_per_theta": samples_per_theta,
            "v_grid": v.tolist()}
    allowance = 3.0 / math.sqrt(samples_per_theta)
    exact_rep = ConvergenceReport("count-limit-exact", thetas.tolist(), exact_d,
                                  tolerance, 0.0, dict(meta), curves)
    emp_rep = ConvergenceReport("count-limit-empirical", thetas.tolist(), emp_d,
                                mc_tolerance if mc_tolerance is not None else 5.0 * allowance,
                                allowance, dict(meta), curves)
    return exact_rep, emp_rep


def harris_scaling_check(
    model: HarrisModel,
    v_grid,
    n_samples: int,
    rng: np.random.Generator,
    tolerance: float = 1e-3,
    mc_tolerance: float = 0.01,
) -> tuple[ConvergenceReport, ConvergenceReport]:
    """Compare the law of ``N / a`` with its gamma limit ``(1 + m v)^(-1/m)``.

    Exact pre-limit: ``P_a(exp(-v/a))``.  Empirical: ``mean(exp(-v N / a))``.
    """
    v = np.asarray(v_grid, dtype=float)
    target = (1.0 + model.m * v) ** (-1.0 / model.m)
    exact = harris_pgf(model, np.exp(-v / model.a))
    n = model.sample(rng, n_samples)
    emp = _emp_lt(n / model.a, v)
    meta = {"a": model.a, "m": model.m, "n_samples": n_samples, "v_grid": v.tolist()}
    curves = [{"a": model.a, "v": v.tolist(), "exact": exact.tolist(),
               "empirical": emp.tolist(), "target": target.tolist()}]
    exact_rep = ConvergenceReport("harris-limit-exact", [model.a],
                                  [np.max(np.abs(exact - target))], tolerance, 0.0,
                                  dict(meta), curves)
    emp_rep = ConvergenceReport("harris-limit-empirical", [model.a],
                                [np.max(np.abs(emp - target))], mc_tolerance,
                                3.0 / math.sqrt(n_samples), dict(meta), curves)
    return exact_rep, emp_rep


def count_from_dict(doc: dict):
    """Parse ``{"phi": ..., "theta": ..., "j": ..., "m": ...}`` or ``{"harris": {"a", "m"}}``."""
    if not isinstance(doc, dict):
        raise ValueError("count model spec must be an object")
    if "harris" in doc:
        extra = set(doc) - {"harris"}
        inner = doc["harris"]
        extra |= set(inner) - {"a", "m"}
        if extra:
            raise ValueError(f"unknown key(s) for Harris model: {sorted(extra)}")
        return HarrisModel(**inner)
    extra = set(doc) - {"phi", "theta", "j", "m"}
    if extra:
        raise ValueError(f"unknown key(s) for count model: {sorted(extra)}")
    missing = {"phi", "theta"} - set(doc)
    if missing:
        raise ValueError(f"count model missing key(s): {sorted(missing)}")
    return CountModel(lt_from_dict(doc["phi"]), doc["theta"], doc.get("j", 0), doc.get("m", 1))
