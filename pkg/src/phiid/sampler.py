"""Exact samplers: stable laws, phi-ID laws by subordination, random sums."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charfn import CompoundPoisson, PhiIdLaw, SemiStable, Stable
from .counts import DEFAULT_RATE_CAP, CountModel, HarrisModel, count_sample, harris_as_count_model

__all__ = [
    "ComponentLaw",
    "ExponentialComponent",
    "LaplaceComponent",
    "NormalComponent",
    "SymmetricStableComponent",
    "TwoPointComponent",
    "sample_stable",
    "sample_phi_id",
    "sample_random_sum",
    "sample_deterministic_sum",
    "component_from_dict",
]


def sample_stable(alpha: float, lam: float, skew: float, rng: np.random.Generator, size=None):
    """Draw from the stable law with CF ``exp(-lam |t|^alpha exp(-i skew sgn t))``.

    Chambers-Mallows-Stuck.  Writing the exponent as
    ``lam cos(skew) |t|^alpha (1 - i sgn(t) tan(skew))`` and matching the
    usual ``(1 - i beta sgn(t) tan(pi alpha/2))`` form gives
    ``beta tan(pi alpha/2) = tan(skew)``; the construction's shift
    ``arctan(beta tan(pi alpha/2)) / alpha`` is then ``skew / alpha`` and the
    overall scale collapses to ``lam ** (1/alpha)``.  Skewed draws at
    ``alpha == 1`` are not supported.
    """
    Stable(lam, alpha, skew)  # validates the parameter pair
    if alpha == 1.0 and skew != 0.0:
        raise ValueError("skewed sampling at alpha = 1 is not supported")
    if alpha == 2.0:
        return math.sqrt(2.0 * lam) * rng.standard_normal(size)
    v = rng.uniform(-math.pi / 2, math.pi / 2, size)
    w = rng.standard_exponential(size)
    if alpha == 1.0:
        return lam * np.tan(v)
    scale = lam ** (1.0 / alpha)
    shifted = alpha * v + skew
    x = (np.sin(shifted) / np.cos(v) ** (1.0 / alpha)
         * (np.cos(v - shifted) / w) ** ((1.0 - alpha) / alpha))
    return scale * x


def sample_phi_id(law: PhiIdLaw, rng: np.random.Generator, size=None):
    """Draw from ``phi(psi(t))`` by subordination on a latent time ``V ~ phi``.

    Stable ``psi``: ``V**(1/alpha) * S``.  Compound Poisson ``psi``: a sum of
    ``Poisson(rate V)`` jumps.  In both cases ``E[exp(itX) | V] = exp(-V psi(t))``.
    """
    psi = law.psi
    if isinstance(psi, SemiStable):
        raise NotImplementedError("semi-stable exponents have no subordination sampler")
    v = np.asarray(law.phi.sample(rng, size), dtype=float)
    if isinstance(psi, Stable):
        s = sample_stable(psi.alpha, psi.lam, psi.skew, rng, size)
        out = v ** (1.0 / psi.alpha) * s
    elif isinstance(psi, CompoundPoisson):
        k = rng.poisson(psi.rate * v)
        out = psi.jump.sample_sum(k, rng)
    else:
        raise NotImplementedError(f"no sampler for exponent {type(psi).__name__}")
    return float(out) if size is None else out


# -- component laws -----------------------------------------------------------


class ComponentLaw:
    """A summand law ``scale * X + shift`` with a closed-form CF and exact sums.

    ``sum_of(n, rng)`` draws the sum of ``n`` iid copies (``n`` may be an
    integer array) directly from its known law.  ``naive_sum`` adds
    individual draws and exists as an independent check.
    """

    kind = ""
    scale: float = 1.0
    shift: float = 0.0

    def _base_sample(self, rng, size):
        raise NotImplementedError

    def _base_sum(self, n, rng):
        raise NotImplementedError

    def _base_cf(self, t):
        raise NotImplementedError

    def sample(self, rng, size=None):
        return self.scale * self._base_sample(rng, size) + self.shift

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return self._base_cf(self.scale * t) * np.exp(1j * t * self.shift)

    def sum_of(self, n, rng):
        n = np.asarray(n, dtype=np.int64)
        if np.any(n < 0):
            raise ValueError("number of summands must be nonnegative")
        return self.scale * self._base_sum(n, rng) + self.shift * n

    def naive_sum(self, n, rng):
        n = np.atleast_1d(np.asarray(n, dtype=np.int64))
        draws = self.sample(rng, int(n.sum()))
        ends = np.cumsum(n)
        csum = np.concatenate([[0.0], np.cumsum(draws)])
        return csum[ends] - csum[ends - n]

    def affine(self, scale=1.0, shift=0.0):
        """Same law under ``x -> scale * x + shift`` applied after the current map."""
        params = {k: v for k, v in self.__dict__.items() if k not in ("scale", "shift")}
        return type(self)(**params, scale=scale * self.scale, shift=scale * self.shift + shift)

    def to_dict(self):
        d = {"kind": self.kind}
        d.update(self.__dict__)
        return d


@dataclass(frozen=True)
class ExponentialComponent(ComponentLaw):
    mean: float = 1.0
    scale: float = 1.0
    shift: float = 0.0
    kind = "exponential"

    def _base_sample(self, rng, size):
        return rng.exponential(self.mean, size)

    def _base_sum(self, n, rng):
        # numpy's gamma returns 0 for shape 0
        return rng.gamma(n.astype(float), self.mean)

    def _base_cf(self, t):
        return 1.0 / (1.0 - 1j * self.mean * t)


@dataclass(frozen=True)
class LaplaceComponent(ComponentLaw):
    """Density ``exp(-|x|/b) / (2b)`` with ``b = laplace_scale``."""

    laplace_scale: float = 1.0
    scale: float = 1.0
    shift: float = 0.0
    kind = "laplace"

    def _base_sample(self, rng, size):
        return rng.laplace(0.0, self.laplace_scale, size)

    def _base_sum(self, n, rng):
        k = n.astype(float)
        return self.laplace_scale * (rng.gamma(k, 1.0) - rng.gamma(k, 1.0))

    def _base_cf(self, t):
        return 1.0 / (1.0 + (self.laplace_scale * t) ** 2) + 0j


@dataclass(frozen=True)
class NormalComponent(ComponentLaw):
    mu: float = 0.0
    sd: float = 1.0
    scale: float = 1.0
    shift: float = 0.0
    kind = "normal"

    def _base_sample(self, rng, size):
        return rng.normal(self.mu, self.sd, size)

    def _base_sum(self, n, rng):
        return n * self.mu + self.sd * np.sqrt(n) * rng.standard_normal(n.shape)

    def _base_cf(self, t):
        return np.exp(1j * self.mu * t - 0.5 * (self.sd * t) ** 2)


@dataclass(frozen=True)
class SymmetricStableComponent(ComponentLaw):
    """Symmetric stable with CF ``exp(-|stable_scale * t|^alpha)``."""

    alpha: float = 2.0
    stable_scale: float = 1.0
    scale: float = 1.0
    shift: float = 0.0
    kind = "symmetric-stable"

    def _base_sample(self, rng, size):
        return self.stable_scale * sample_stable(self.alpha, 1.0, 0.0, rng, size)

    def _base_sum(self, n, rng):
        s = self._base_sample(rng, n.shape)
        return n.astype(float) ** (1.0 / self.alpha) * s

    def _base_cf(self, t):
        return np.exp(-np.abs(self.stable_scale * t) ** self.alpha) + 0j


@dataclass(frozen=True)
class TwoPointComponent(ComponentLaw):
    """``+x0`` or ``-x0`` with equal probability."""

    x0: float = 1.0
    scale: float = 1.0
    shift: float = 0.0
    kind = "two-point"

    def _base_sample(self, rng, size):
        return self.x0 * (2.0 * rng.integers(0, 2, size) - 1.0)

    def _base_sum(self, n, rng):
        return self.x0 * (2.0 * rng.binomial(n, 0.5) - n)

    def _base_cf(self, t):
        return np.cos(self.x0 * t) + 0j


_COMPONENTS = {
    cls.kind: cls
    for cls in (ExponentialComponent, LaplaceComponent, NormalComponent,
                SymmetricStableComponent, TwoPointComponent)
}


def component_from_dict(doc: dict) -> ComponentLaw:
    kind = doc.get("kind")
    if kind not in _COMPONENTS:
        raise ValueError(f"unknown component kind {kind!r}")
    cls = _COMPONENTS[kind]
    allowed = set(cls.__dataclass_fields__)
    extra = set(doc) - allowed - {"kind"}
    if extra:
        raise ValueError(f"unknown key(s) for {kind} component: {sorted(extra)}")
    return cls(**{k: v for k, v in doc.items() if k != "kind"})


# -- sums -----------------------------------------------------------------------


def sample_deterministic_sum(n: int, component: ComponentLaw, rng: np.random.Generator,
                             size=None):
    """Sum of ``n`` iid component draws (0 when ``n == 0``)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    counts = np.full(1 if size is None else size, n, dtype=np.int64)
    out = component.sum_of(counts, rng)
    return float(out[0]) if size is None else out


def sample_random_sum(count, component: ComponentLaw, rng: np.random.Generator, size=None,
                      rate_cap: float = DEFAULT_RATE_CAP):
    """Draw ``N`` from the count model, then sum ``N`` iid component draws."""
    if isinstance(count, HarrisModel):
        count = harris_as_count_model(count)
    if not isinstance(count, CountModel):
        raise TypeError("count must be a CountModel or HarrisModel")
    n = np.atleast_1d(count_sample(count, rng, 1 if size is None else size, rate_cap))
    out = component.sum_of(n, rng)
    return float(out[0]) if size is None else out
