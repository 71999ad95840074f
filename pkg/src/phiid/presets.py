"""Named preset experiments, one per acceptance criterion of the package."""

from __future__ import annotations

import copy

PRESET_SEED = 2002

_EXP1 = {"kind": "exponential", "beta": 1.0}
_GAMMA2 = {"kind": "gamma", "nu": 2.0, "beta": 1.0}
_DEG1 = {"kind": "degenerate", "c": 1.0}


def _stable(alpha, lam=1.0, skew=0.0):
    return {"kind": "stable", "lambda": lam, "alpha": alpha, "skew": skew}


_P = 0.01

PRESETS = {
    "geometric-exponential-stability": (
        "p * (Geometric(p) sum of Exp(1)) is exactly Exp(1): the exponential law is "
        "geometrically stable",
        {
            "kind": "sample",
            "seed": PRESET_SEED,
            "checks": [{
                "check": "random-sum-ks",
                "count": {"phi": _EXP1, "theta": _P / (1 - _P), "j": 1, "m": 1},
                "component": {"kind": "exponential", "mean": 1.0, "scale": _P},
                "samples": 200_000,
                "cdf": {"kind": "exponential", "mean": 1.0},
                "level": 0.01,
                "streams": 3,
            }],
        },
    ),
    "linnik-subordination": (
        "exponential phi composed with a stable exponent gives the Linnik CF 1/(1+|t|^a); "
        "sampled exactly by subordination",
        {
            "kind": "sample",
            "seed": PRESET_SEED,
            "checks": [{
                "check": "phi-id-ecf",
                "law": {"phi": _EXP1, "psi": _stable(1.5)},
                "samples": 100_000,
                "half_width": 5.0,
                "points": 101,
                "tolerance": 0.02,
            }],
        },
    ),
    "generalized-linnik": (
        "gamma phi gives the generalized Linnik CF (1+|t|^a)^-nu",
        {
            "kind": "sample",
            "seed": PRESET_SEED,
            "checks": [{
                "check": "phi-id-ecf",
                "law": {"phi": _GAMMA2, "psi": _stable(1.5)},
                "samples": 100_000,
                "half_width": 5.0,
                "points": 101,
                "tolerance": 0.02,
            }],
        },
    ),
    "count-sampler-oracle": (
        "phi((1-s)/theta) is a PGF realized exactly as a mixed Poisson; Harris(a, m) "
        "belongs to the s^j phi((1-s^m)/theta) family",
        {
            "kind": "count-limit",
            "seed": PRESET_SEED,
            "checks": [
                {"check": "pmf-tv", "count": {"phi": _EXP1, "theta": 0.5},
                 "samples": 100_000, "states": 50, "tolerance": 0.01},
                {"check": "harris-pgf", "harris": {"a": 3.0, "m": 2}, "points": 101,
                 "tolerance": 1e-12},
            ],
        },
    ),
    "harris-gamma-limit": (
        "N/a for Harris(a, m) converges to a gamma law with LT (1+m v)^(-1/m)",
        {
            "kind": "count-limit",
            "seed": PRESET_SEED,
            "checks": [
                {"check": "harris-scaling", "harris": {"a": 1e4, "m": 2},
                 "v_grid": [0.5, 1.0, 2.0], "samples": 100_000, "tolerance": 1e-3,
                 "mc_tolerance": 0.01},
                {"check": "scaling", "phi": _EXP1, "j": 0, "m": 1,
                 "theta_schedule": [0.1, 0.01, 0.001, 0.0001], "v_grid": [0.5, 1.0, 2.0],
                 "samples_per_theta": 100_000, "tolerance": 1e-3, "mc_tolerance": 0.02},
            ],
        },
    ),
    "deterministic-roundtrips": (
        "exp(-phi^-1(f)) recovers the ID CF; phi^-1 inverts phi; phi-ID CFs have no real zeroes",
        {
            "kind": "cf-check",
            "checks": [
                {"check": "id-roundtrip", "half_width": 10.0, "points": 201,
                 "tolerance": 1e-10, "laws": "ROUNDTRIP_MATRIX"},
                {"check": "no-real-zero", "half_width": 50.0, "points": 1001,
                 "min_modulus": 1e-4, "laws": "ZERO_MATRIX"},
                {"check": "inverse-roundtrip", "s_min": 1e-4, "s_max": 1e4, "points": 81,
                 "tolerance": 1e-10, "phis": "LT_MATRIX"},
                {"check": "lt-properties", "phis": "LT_MATRIX"},
            ],
        },
    ),
    "definetti-limits": (
        "phi(a_n (1 - h_n(t))) converges to phi(psi(t)) for point-mass, exponential and "
        "gamma phi",
        {
            "kind": "cf-check",
            "checks": [{
                "check": "definetti", "phis": [_DEG1, _EXP1, _GAMMA2], "h_alpha": 2.0,
                "n_schedule": [100, 1000, 10000], "half_width": 3.0, "points": 101,
                "tolerance": 1e-3,
            }],
        },
    ),
    "phi-attraction": (
        "a stable law and the Laplace law lie in the domain of phi-attraction of the "
        "matching phi-stable law; the point-mass twin run agrees",
        {
            "kind": "attraction",
            "checks": [
                {"check": "attraction", "phi": _EXP1, "target_psi": _stable(1.5),
                 "component": {"kind": "symmetric-stable", "alpha": 1.5},
                 "a_power": 1 / 1.5, "n_schedule": [10, 100, 1000, 10000],
                 "tolerance": 1e-3, "paired_degenerate": True},
                {"check": "attraction", "phi": _EXP1, "target_psi": _stable(2.0),
                 "component": {"kind": "laplace", "laplace_scale": 1.0},
                 "a_power": 0.5, "n_schedule": [10, 100, 1000, 10000],
                 "tolerance": 1e-3, "paired_degenerate": True},
            ],
        },
    ),
    "transfer-equivalence": (
        "N_theta-sums converge to phi(m psi) exactly when [1/theta]-sums converge to exp(-psi)",
        {
            "kind": "transfer",
            "seed": PRESET_SEED,
            "checks": [{
                "check": "transfer", "theta_schedule": [0.1, 0.01, 0.001], "phi": _EXP1,
                "j": 0, "m": 1, "component": {"kind": "exponential", "mean": 1.0},
                "scale_exponent": 0.5, "center": 1.0,
                "limit_psi": _stable(2.0, lam=0.5), "replicates": 10_000,
                "half_width": 5.0, "points": 101, "tolerance": 0.03,
            }],
        },
    ),
    "class-l-surrogate": (
        "phi(s)/phi(cs) is completely monotone for exponential and gamma phi (class L); "
        "a non-CM foil is rejected",
        {
            "kind": "cf-check",
            "checks": [
                {"check": "selfdecomp", "phis": [_EXP1, _GAMMA2], "c": [0.3, 0.5, 0.9],
                 "order": 8},
                {"check": "complete-monotonicity", "foil": "clipped-quadratic", "start": 0.1,
                 "step": 0.1, "order": 2, "points": 20, "expect": "fail"},
            ] + [
                {"check": "complete-monotonicity", "phi": phi, "start": 0.1, "step": 0.2,
                 "order": 8, "points": 21, "expect": "pass"}
                for phi in [_EXP1, _GAMMA2, _DEG1]
            ],
        },
    ),
}

_MATRICES = {
    # closed-form inverses only; mixtures have none
    "ROUNDTRIP_MATRIX": [
        {"phi": phi, "psi": psi}
        for phi in [_DEG1, _EXP1, _GAMMA2, {"kind": "gamma", "nu": 0.5, "beta": 2.0}]
        for psi in [
            _stable(1.5), _stable(1.0), _stable(2.0), _stable(0.7, 1.0, 0.5),
            _stable(1.5, 2.0, -0.4),
            {"kind": "compound-poisson", "rate": 2.0, "jump": {"kind": "two-point", "x0": 1.0}},
            {"kind": "compound-poisson", "rate": 1.0, "jump": {"kind": "gaussian"}},
            {"kind": "compound-poisson", "rate": 1.5, "jump": {"kind": "degenerate", "x0": 0.7}},
        ]
    ],
    # laws whose CF stays above 1e-4 on [-50, 50]
    "ZERO_MATRIX": [
        {"phi": _EXP1, "psi": _stable(1.5)},
        {"phi": _EXP1, "psi": _stable(1.0)},
        {"phi": _EXP1, "psi": _stable(2.0)},
        {"phi": _GAMMA2, "psi": _stable(0.5)},
        {"phi": {"kind": "gamma", "nu": 0.5, "beta": 2.0}, "psi": _stable(1.0)},
        {"phi": _DEG1, "psi": _stable(1.5, 0.001)},
        {"phi": _DEG1, "psi": {"kind": "compound-poisson", "rate": 2.0,
                               "jump": {"kind": "two-point", "x0": 1.0}}},
        {"phi": _EXP1, "psi": {"kind": "compound-poisson", "rate": 1.0,
                               "jump": {"kind": "gaussian"}}},
        {"phi": {"kind": "mixture", "weights": [0.5, 0.5], "components": [_DEG1, _EXP1]},
         "psi": {"kind": "compound-poisson", "rate": 1.5,
                 "jump": {"kind": "degenerate", "x0": 0.7}}},
    ],
    "LT_MATRIX": [
        _EXP1, _GAMMA2, {"kind": "gamma", "nu": 0.5, "beta": 2.0},
        {"kind": "degenerate", "c": 0.05},
        {"kind": "mixture", "weights": [0.5, 0.5],
         "components": [{"kind": "degenerate", "c": 0.05}, _EXP1]},
    ],
}


def _expand(obj):
    if isinstance(obj, str) and obj in _MATRICES:
        return copy.deepcopy(_MATRICES[obj])
    if isinstance(obj, dict):
        return {k: _expand(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_expand(v) for v in obj]
    return obj


def list_builtins() -> list[tuple[str, str]]:
    """(name, claim) for every preset."""
    return [(name, claim) for name, (claim, _) in PRESETS.items()]


def preset_config(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(name)
    cfg = _expand(PRESETS[name][1])
    cfg["name"] = name
    cfg["description"] = PRESETS[name][0]
    return cfg
