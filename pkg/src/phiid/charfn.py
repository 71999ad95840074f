"""Infinitely divisible exponents and the composed characteristic functions.

An :class:`IdExponent` ``psi`` defines the ID characteristic function
``omega(t) = exp(-psi(t))``; a :class:`PhiIdLaw` pairs it with a Laplace
transform to give ``f(t) = phi(psi(t))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .laplace import (
    LaplaceTransform,
    complete_monotonicity_check,
    lt_eval,
    lt_from_dict,
    lt_inverse,
)
from .report import ConvergenceReport

__all__ = [
    "IdExponent",
    "Stable",
    "CompoundPoisson",
    "SemiStable",
    "JumpCf",
    "SymmetricTwoPoint",
    "GaussianJump",
    "DegenerateJump",
    "PhiIdLaw",
    "cf_eval",
    "no_real_zero_check",
    "id_roundtrip",
    "definetti_limit_eval",
    "selfdecomp_ratio_check",
    "empirical_cf",
    "cf_distance",
    "symmetric_grid",
    "psi_from_dict",
    "law_from_dict",
]

SEMISTABLE_EPS_CAP = 0.05


def symmetric_grid(half_width: float = 5.0, n_points: int = 101) -> np.ndarray:
    """Equispaced grid on ``[-w, w]``; an odd count guarantees ``t = 0`` is present."""
    if n_points % 2 == 0:
        raise ValueError("use an odd number of grid points so t = 0 is included")
    grid = np.linspace(-half_width, half_width, n_points)
    grid[n_points // 2] = 0.0
    return grid


# -- jump laws for compound Poisson exponents --------------------------------


class JumpCf:
    kind = ""

    def __call__(self, t):
        raise NotImplementedError

    def sample_sum(self, k, rng):
        """Sum of ``k`` iid jumps (``k`` an integer array), drawn exactly."""
        raise NotImplementedError


@dataclass(frozen=True)
class SymmetricTwoPoint(JumpCf):
    """Jumps of ``+x0`` or ``-x0`` with equal probability; ``h(t) = cos(t x0)``."""

    x0: float = 1.0
    kind = "two-point"

    def __call__(self, t):
        return np.cos(np.asarray(t, dtype=float) * self.x0) + 0j

    def sample_sum(self, k, rng):
        k = np.asarray(k)
        return self.x0 * (2.0 * rng.binomial(k, 0.5) - k)

    def to_dict(self):
        return {"kind": self.kind, "x0": self.x0}


@dataclass(frozen=True)
class GaussianJump(JumpCf):
    """Standard normal jumps; ``h(t) = exp(-t^2/2)``."""

    kind = "gaussian"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * t * t) + 0j

    def sample_sum(self, k, rng):
        k = np.asarray(k)
        return np.sqrt(k) * rng.standard_normal(k.shape)

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class DegenerateJump(JumpCf):
    """Every jump equals ``x0``; ``h(t) = exp(i t x0)``."""

    x0: float = 1.0
    kind = "degenerate"

    def __call__(self, t):
        return np.exp(1j * np.asarray(t, dtype=float) * self.x0)

    def sample_sum(self, k, rng):
        return self.x0 * np.asarray(k, dtype=float)

    def to_dict(self):
        return {"kind": self.kind, "x0": self.x0}


# -- exponents -----------------------------------------------------------------


class IdExponent:
    kind = ""

    def __call__(self, t):
        raise NotImplementedError

    def omega(self, t):
        """The ID characteristic function ``exp(-psi(t))``."""
        return np.exp(-self(t))


@dataclass(frozen=True)
class Stable(IdExponent):
    """``psi(t) = lam |t|^alpha exp(-i skew sgn t)``."""

    lam: float = 1.0
    alpha: float = 2.0
    skew: float = 0.0
    kind = "stable"

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError("lambda must be positive")
        if not (0 < self.alpha <= 2):
            raise ValueError("alpha must lie in (0, 2]")
        bound = min(math.pi * self.alpha / 2, math.pi - math.pi * self.alpha / 2)
        if abs(self.skew) > bound + 1e-15:
            raise ValueError(
                f"|skew| = {abs(self.skew)} exceeds min(pi alpha/2, pi - pi alpha/2) = {bound}"
            )

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        mag = self.lam * np.abs(t) ** self.alpha
        if self.skew == 0.0:
            return mag + 0j
        return mag * np.exp(-1j * self.skew * np.sign(t))

    def to_dict(self):
        return {"kind": self.kind, "lambda": self.lam, "alpha": self.alpha, "skew": self.skew}


@dataclass(frozen=True)
class CompoundPoisson(IdExponent):
    """``psi(t) = rate (1 - h(t))`` for a jump CF ``h``."""

    rate: float
    jump: JumpCf
    kind = "compound-poisson"

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError("rate must be positive")

    def __call__(self, t):
        return self.rate * (1.0 - self.jump(t))

    def to_dict(self):
        return {"kind": self.kind, "rate": self.rate, "jump": self.jump.to_dict()}


@dataclass(frozen=True)
class SemiStable(IdExponent):
    """Log-periodic perturbation of a symmetric stable exponent.

    ``psi(t) = |t|^alpha (1 + eps cos(2 pi alpha log|t| / log c))``, which
    satisfies ``psi(c^(1/alpha) t) = c psi(t)``.  Only small ``eps`` is
    allowed (``|eps| <= 0.05``); treat results as demonstration grade.
    """

    alpha: float
    eps: float
    c: float
    kind = "semi-stable"

    def __post_init__(self):
        if not (0 < self.alpha < 2):
            raise ValueError("alpha must lie in (0, 2)")
        if abs(self.eps) > SEMISTABLE_EPS_CAP:
            raise ValueError(f"|eps| must not exceed {SEMISTABLE_EPS_CAP}")
        if not self.c > 1:
            raise ValueError("c must exceed 1")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        out = np.zeros(t.shape)
        nz = at > 0
        x = at[nz]
        out[nz] = x ** self.alpha * (
            1.0 + self.eps * np.cos(2 * math.pi * self.alpha * np.log(x) / math.log(self.c))
        )
        return out + 0j

    def to_dict(self):
        return {"kind": self.kind, "alpha": self.alpha, "eps": self.eps, "c": self.c}


@dataclass(frozen=True)
class PhiIdLaw:
    phi: LaplaceTransform
    psi: IdExponent

    def cf(self, t):
        return cf_eval(self, t)

    def to_dict(self):
        return {"phi": self.phi.to_dict(), "psi": self.psi.to_dict()}


def _compose(phi, z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.real < -1e-12):
        raise ValueError("exponent has negative real part; not a valid ID exponent")
    return phi.evaluate(z)


def cf_eval(law: PhiIdLaw, t):
    """``f(t) = phi(psi(t))``, complex; exactly 1 at ``t = 0``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)):
        raise ValueError("t must be finite")
    out = np.asarray(_compose(law.phi, law.psi(t_arr)), dtype=complex)
    out = np.where(t_arr == 0, 1.0 + 0j, out)
    return complex(out) if out.ndim == 0 else out


class ZeroCheck(NamedTuple):
    min_modulus: float
    argmin: float
    passed: bool


def no_real_zero_check(law, t_grid) -> ZeroCheck:
    """Minimum of ``|f|`` over the grid; passes iff strictly positive.

    ``law`` may be a :class:`PhiIdLaw` or any callable CF (useful as a foil).
    """
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0:
        raise ValueError("grid must be non-empty")
    f = cf_eval(law, t) if isinstance(law, PhiIdLaw) else np.asarray(law(t))
    mod = np.abs(np.atleast_1d(f))
    k = int(np.argmin(mod))
    return ZeroCheck(float(mod[k]), float(np.atleast_1d(t)[k]), bool(mod[k] > 0))


def id_roundtrip(law: PhiIdLaw, t_grid) -> float:
    """``sup |exp(-phi^{-1}(f(t))) - exp(-psi(t))|`` over the grid."""
    if not law.phi.has_closed_inverse:
        raise NotImplementedError(
            f"{law.phi.kind} transforms have no closed-form complex inverse"
        )
    t = np.asarray(t_grid, dtype=float)
    f = np.atleast_1d(cf_eval(law, t))
    recovered = np.exp(-lt_inverse(law.phi, f))
    direct = np.atleast_1d(law.psi.omega(t))
    return float(np.max(np.abs(recovered - direct)))


def definetti_limit_eval(
    phi: LaplaceTransform,
    target,
    h_n: Callable[[int, np.ndarray], np.ndarray],
    a_n: Callable[[int], float],
    n_schedule,
    t_grid,
    tolerance: float = 1e-3,
) -> ConvergenceReport:
    """Distances ``sup_t |phi(a_n (1 - h_n(t))) - target(t)|`` along ``n_schedule``.

    ``target`` is an :class:`IdExponent` (the target is then ``phi(psi(t))``)
    or a callable CF.
    """
    ns = list(n_schedule)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n schedule must be increasing")
    t = np.asarray(t_grid, dtype=float)
    if isinstance(target, IdExponent):
        goal = np.asarray(_compose(phi, target(t)))
    else:
        goal = np.asarray(target(t), dtype=complex)
    dists, curves = [], []
    for n in ns:
        vals = np.asarray(_compose(phi, a_n(n) * (1.0 - h_n(n, t))))
        dists.append(float(np.max(np.abs(vals - goal))))
        curves.append({"n": n, "t": t, "f": vals, "target": goal})
    return ConvergenceReport("definetti", ns, dists, tolerance, 0.0,
                             {"phi": phi.to_dict()}, curves)


class RatioCheck(NamedTuple):
    passed: bool
    failing_order: int | None
    c: float


def selfdecomp_ratio_check(
    phi: LaplaceTransform,
    c: float,
    grid_start: float = 0.1,
    step: float = 0.2,
    n_points: int = 41,
    max_order: int = 8,
) -> RatioCheck:
    """Complete-monotonicity test of ``phi(s) / phi(c s)`` (class-L surrogate)."""
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")

    def ratio(s):
        return lt_eval(phi, s) / lt_eval(phi, c * s)

    res = complete_monotonicity_check(ratio, grid_start, step, max_order, n_points)
    return RatioCheck(res.passed, res.failing_order, c)


def empirical_cf(samples, t_grid):
    """``(1/N) sum exp(i t X_k)`` per grid point, plus the ``1/sqrt(N)`` error scale."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("need at least one sample")
    t = np.asarray(t_grid, dtype=float)
    # chunk over t to bound memory at len(t) * chunk
    out = np.empty(t.shape, dtype=complex)
    flat_t = t.ravel()
    flat = out.ravel()
    chunk = max(1, 2_000_000 // x.size)
    for i in range(0, flat_t.size, chunk):
        arg = np.outer(flat_t[i:i + chunk], x)
        flat[i:i + chunk] = np.cos(arg).mean(axis=1) + 1j * np.sin(arg).mean(axis=1)
    return out.reshape(t.shape), 1.0 / math.sqrt(x.size)


def cf_distance(f_values, g_values) -> float:
    f = np.asarray(f_values)
    g = np.asarray(g_values)
    if f.shape != g.shape:
        raise ValueError(f"grid length mismatch: {f.shape} vs {g.shape}")
    return float(np.max(np.abs(f - g)))


_JUMPS = {"two-point": SymmetricTwoPoint, "gaussian": GaussianJump, "degenerate": DegenerateJump}


def _strict(doc, allowed, what):
    extra = set(doc) - set(allowed)
    if extra:
        raise ValueError(f"unknown key(s) for {what}: {sorted(extra)}")


def psi_from_dict(doc: dict) -> IdExponent:
    kind = doc.get("kind")
    if kind == "stable":
        _strict(doc, {"kind", "lambda", "alpha", "skew"}, "stable exponent")
        return Stable(doc.get("lambda", 1.0), doc["alpha"], doc.get("skew", 0.0))
    if kind == "compound-poisson":
        _strict(doc, {"kind", "rate", "jump"}, "compound-Poisson exponent")
        jd = doc["jump"]
        jk = jd.get("kind")
        if jk not in _JUMPS:
            raise ValueError(f"unknown jump kind {jk!r}")
        _strict(jd, {"kind", "x0"} if jk != "gaussian" else {"kind"}, f"{jk} jump")
        return CompoundPoisson(doc["rate"], _JUMPS[jk](**{k: v for k, v in jd.items() if k != "kind"}))
    if kind == "semi-stable":
        _strict(doc, {"kind", "alpha", "eps", "c"}, "semi-stable exponent")
        return SemiStable(doc["alpha"], doc["eps"], doc["c"])
    raise ValueError(f"unknown exponent kind {kind!r}")


def law_from_dict(doc: dict) -> PhiIdLaw:
    _strict(doc, {"phi", "psi"}, "phi-ID law")
    return PhiIdLaw(lt_from_dict(doc["phi"]), psi_from_dict(doc["psi"]))
