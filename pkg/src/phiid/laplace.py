"""Laplace transforms of nonnegative random variables.

Every transform here is a closed-form member of a small universe
(point mass, exponential, gamma and finite mixtures of those) so that
evaluation, inversion and sampling of the latent variable ``U`` are exact.
Evaluation accepts complex arguments with nonnegative real part; the
closed forms extend analytically and ``(1 + beta*z) ** -nu`` is taken on
the principal branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "LaplaceTransform",
    "Degenerate",
    "Exponential",
    "Gamma",
    "Mixture",
    "lt_eval",
    "lt_inverse",
    "lt_sample_U",
    "complete_monotonicity_check",
    "CMResult",
    "lt_from_dict",
]


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite real, got {value!r}")
    return value


def _check_prob(p):
    p = np.asarray(p)
    if np.iscomplexobj(p):
        return p
    if np.any(~np.isfinite(p)) or np.any(p <= 0) or np.any(p > 1):
        raise ValueError("probability level must lie in (0, 1]")
    return p


class LaplaceTransform:
    """Base class; subclasses are immutable dataclasses."""

    kind: str = ""

    def __call__(self, s):
        return lt_eval(self, s)

    def evaluate(self, z):
        """Evaluate at real or complex ``z`` without argument checks."""
        raise NotImplementedError

    def inverse(self, p):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def has_closed_inverse(self) -> bool:
        return True

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Degenerate(LaplaceTransform):
    """Point mass at ``c``: ``phi(s) = exp(-c s)``."""

    c: float = 1.0
    kind = "degenerate"

    def __post_init__(self):
        object.__setattr__(self, "c", _positive("c", self.c))

    def evaluate(self, z):
        return np.exp(-self.c * np.asarray(z))

    def inverse(self, p):
        return -np.log(p) / self.c

    def sample(self, rng, size=None):
        if size is None:
            return self.c
        return np.full(size, self.c)

    @property
    def mean(self):
        return self.c

    def to_dict(self):
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class Exponential(LaplaceTransform):
    """Exponential law with mean ``beta``: ``phi(s) = 1 / (1 + beta s)``."""

    beta: float = 1.0
    kind = "exponential"

    def __post_init__(self):
        object.__setattr__(self, "beta", _positive("beta", self.beta))

    def evaluate(self, z):
        return 1.0 / (1.0 + self.beta * np.asarray(z))

    def inverse(self, p):
        return (1.0 / p - 1.0) / self.beta

    def sample(self, rng, size=None):
        return rng.exponential(self.beta, size)

    @property
    def mean(self):
        return self.beta

    def to_dict(self):
        return {"kind": self.kind, "beta": self.beta}


@dataclass(frozen=True)
class Gamma(LaplaceTransform):
    """Gamma law, shape ``nu`` and scale ``beta``: ``phi(s) = (1 + beta s)^-nu``."""

    nu: float = 1.0
    beta: float = 1.0
    kind = "gamma"

    def __post_init__(self):
        object.__setattr__(self, "nu", _positive("nu", self.nu))
        object.__setattr__(self, "beta", _positive("beta", self.beta))

    def evaluate(self, z):
        z = np.asarray(z)
        if np.iscomplexobj(z):
            return np.exp(-self.nu * np.log(1.0 + self.beta * z))
        return np.exp(-self.nu * np.log1p(self.beta * z))

    def inverse(self, p):
        p = np.asarray(p)
        if np.iscomplexobj(p):
            return (np.exp(-np.log(p) / self.nu) - 1.0) / self.beta
        return np.expm1(-np.log(p) / self.nu) / self.beta

    def sample(self, rng, size=None):
        return rng.gamma(self.nu, self.beta, size)

    @property
    def mean(self):
        return self.nu * self.beta

    def to_dict(self):
        return {"kind": self.kind, "nu": self.nu, "beta": self.beta}


@dataclass(frozen=True)
class Mixture(LaplaceTransform):
    """Finite mixture of the closed-form transforms above."""

    weights: tuple
    components: tuple
    kind = "mixture"

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        comps = tuple(self.components)
        if len(w) != len(comps) or not w:
            raise ValueError("mixture needs one weight per component")
        if any(not math.isfinite(x) or x < 0 for x in w):
            raise ValueError("mixture weights must be nonnegative")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError(f"mixture weights sum to {math.fsum(w)!r}, not 1")
        for comp in comps:
            if not isinstance(comp, LaplaceTransform) or isinstance(comp, Mixture):
                raise TypeError("mixture components must be non-mixture transforms")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    def evaluate(self, z):
        z = np.asarray(z)
        out = 0.0
        for w, comp in zip(self.weights, self.components):
            out = out + w * comp.evaluate(z)
        return out

    @property
    def has_closed_inverse(self):
        return False

    def inverse(self, p):
        p = np.asarray(p)
        if np.iscomplexobj(p):
            raise NotImplementedError("mixture transforms have no closed complex inverse")
        return np.vectorize(self._bisect, otypes=[float])(p)

    def _bisect(self, p):
        if p == 1.0:
            return 0.0
        hi = 1.0
        while self.evaluate(hi) >= p:
            hi *= 2.0
            if hi > 1e300:
                raise OverflowError("cannot bracket inverse; p below float resolution")
        lo = 0.0
        # exact float bisection: stop when the midpoint no longer splits the bracket
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self.evaluate(mid) > p:
                lo = mid
            else:
                hi = mid
        return hi if abs(self.evaluate(hi) - p) <= abs(self.evaluate(lo) - p) else lo

    def sample(self, rng, size=None):
        scalar = size is None
        n = 1 if scalar else int(np.prod(size))
        idx = rng.choice(len(self.weights), size=n, p=self.weights)
        out = np.empty(n)
        for k, comp in enumerate(self.components):
            sel = idx == k
            count = int(sel.sum())
            if count:
                out[sel] = comp.sample(rng, count)
        if scalar:
            return float(out[0])
        return out.reshape(size)

    @property
    def mean(self):
        return math.fsum(w * c.mean for w, c in zip(self.weights, self.components))

    def to_dict(self):
        return {
            "kind": self.kind,
            "weights": list(self.weights),
            "components": [c.to_dict() for c in self.components],
        }


def lt_eval(phi: LaplaceTransform, s):
    """Return ``E[exp(-s U)]`` for real ``s >= 0`` (scalar or array)."""
    arr = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("Laplace transform argument must be finite and nonnegative")
    out = phi.evaluate(arr)
    if arr.ndim == 0:
        return float(out)
    return out


def lt_inverse(phi: LaplaceTransform, p):
    """Solve ``lt_eval(phi, s) = p`` for ``s``; ``p`` in ``(0, 1]``.

    Complex ``p`` is accepted for the closed-form variants and inverted on
    the principal branch.
    """
    p = _check_prob(p)
    out = phi.inverse(p)
    if np.ndim(out) == 0 and not np.iscomplexobj(out):
        return float(out)
    return out


def lt_sample_U(phi: LaplaceTransform, rng: np.random.Generator, size=None):
    """Draw the latent ``U`` whose Laplace transform is ``phi``."""
    return phi.sample(rng, size)


class CMResult(NamedTuple):
    passed: bool
    failing_order: int | None
    tolerance: float


def complete_monotonicity_check(
    f: Callable,
    grid_start: float,
    step: float,
    max_order: int,
    n_points: int | None = None,
) -> CMResult:
    """Check ``(-1)^k Delta^k f >= -tol`` on an equispaced grid for k <= max_order.

    The grid has ``n_points`` nodes (default ``max_order + 1``, the minimum
    needed for a difference of order ``max_order``) starting at
    ``grid_start`` with spacing ``step``.  ``tol = 1e-9 * max|f|`` on the grid.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    n_points = max_order + 1 if n_points is None else int(n_points)
    if n_points < max_order + 1:
        raise ValueError("grid too short for the requested order")
    grid = grid_start + step * np.arange(n_points)
    vals = np.asarray([f(x) for x in grid], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function values must be finite on the grid")
    tol = 1e-9 * float(np.max(np.abs(vals)))
    diff = vals
    for k in range(1, max_order + 1):
        diff = np.diff(diff)
        if np.any((-1) ** k * diff < -tol):
            return CMResult(False, k, tol)
    return CMResult(True, None, tol)


_KINDS = {"degenerate": Degenerate, "exponential": Exponential, "gamma": Gamma}
_FIELDS = {"degenerate": {"c"}, "exponential": {"beta"}, "gamma": {"nu", "beta"}}


def lt_from_dict(doc: dict) -> LaplaceTransform:
    """Build a transform from its JSON form, rejecting unknown keys."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("Laplace transform spec needs a 'kind' field")
    kind = doc["kind"]
    if kind == "mixture":
        extra = set(doc) - {"kind", "weights", "components"}
        if extra:
            raise ValueError(f"unknown key(s) for mixture: {sorted(extra)}")
        comps: Sequence = [lt_from_dict(c) for c in doc["components"]]
        return Mixture(tuple(doc["weights"]), tuple(comps))
    if kind not in _KINDS:
        raise ValueError(f"unknown Laplace transform kind {kind!r}")
    extra = set(doc) - _FIELDS[kind] - {"kind"}
    if extra:
        raise ValueError(f"unknown key(s) for {kind}: {sorted(extra)}")
    return _KINDS[kind](**{k: v for k, v in doc.items() if k != "kind"})
