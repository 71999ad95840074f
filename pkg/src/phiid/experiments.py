"""Config-driven checks and experiments.

A config is a JSON object::

    {"kind": "cf-check", "name": "...", "seed": 7, "checks": [{"check": "...", ...}]}

Every check type has a fixed set of keys; anything else is rejected with a
:class:`ConfigError` naming the offending key.  Each check returns a
:class:`CheckResult`; the experiment passes when all checks pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import stats

from . import charfn, counts, laplace, limits, sampler
from .charfn import PhiIdLaw, Stable, cf_distance, cf_eval, empirical_cf, symmetric_grid
from .mc import stream
from .report import ConvergenceReport

KINDS = ("lt-check", "count-limit", "cf-check", "sample", "attraction",
         "partial-attraction", "transfer")
TOP_LEVEL_KEYS = {"kind", "name", "description", "seed", "checks", "output_dir"}


class ConfigError(ValueError):
    """Malformed or schema-invalid configuration (CLI exit code 2)."""


@dataclass
class CheckResult:
    check: str
    passed: bool
    details: dict = field(default_factory=dict)
    reports: list = field(default_factory=list)
    # (label, header, rows) triples written as CSV
    curves: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "verdict": "pass" if self.passed else "fail",
            **self.details,
            "reports": [r.to_dict() for r in self.reports],
        }


def _keys(doc: dict, required: set, optional: set, what: str) -> None:
    if not isinstance(doc, dict):
        raise ConfigError(f"{what} must be a JSON object")
    unknown = set(doc) - required - optional
    if unknown:
        raise ConfigError(f"unknown key(s) in {what}: {', '.join(sorted(unknown))}")
    missing = required - set(doc)
    if missing:
        raise ConfigError(f"missing key(s) in {what}: {', '.join(sorted(missing))}")


def _parse(fn: Callable, doc: Any, what: str):
    try:
        return fn(doc)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid {what}: {exc}") from exc


def _phi(doc):
    return _parse(laplace.lt_from_dict, doc, "Laplace transform")


def _law(doc):
    return _parse(charfn.law_from_dict, doc, "phi-ID law")


def _psi(doc):
    return _parse(charfn.psi_from_dict, doc, "ID exponent")


def _count(doc):
    return _parse(counts.count_from_dict, doc, "count model")


def _component(doc):
    return _parse(sampler.component_from_dict, doc, "component law")


def _grid(doc, half_width=5.0, points=101):
    try:
        return symmetric_grid(float(doc.get("half_width", half_width)), int(doc.get("points", points)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cf_rows(report: ConvergenceReport, key: str):
    out = []
    for k, curve in enumerate(report.curves):
        t = np.asarray(curve["t"])
        f = np.asarray(curve["f"], dtype=complex)
        g = np.asarray(curve["target"], dtype=complex)
        rows = np.column_stack([t, f.real, f.imag, g.real, g.imag, np.abs(f - g)])
        out.append((f"{report.name}_{key}{k:02d}", CF_HEADER, rows))
    return out


CF_HEADER = ["t", "re_f", "im_f", "re_target", "im_target", "abs_err"]
LT_HEADER = ["v", "exact", "empirical", "target", "abs_err_exact", "abs_err_empirical"]


def _lt_rows(report: ConvergenceReport):
    out = []
    for k, curve in enumerate(report.curves):
        v, ex, em, tg = (np.asarray(curve[x]) for x in ("v", "exact", "empirical", "target"))
        rows = np.column_stack([v, ex, em, tg, np.abs(ex - tg), np.abs(em - tg)])
        out.append((f"{report.name}_{k:02d}", LT_HEADER, rows))
    return out


# -- lt-check -----------------------------------------------------------------


def _check_lt_properties(doc, rng):
    _keys(doc, {"check", "phis"}, {"s_min", "s_max", "points"}, "lt-properties check")
    s = np.concatenate([[0.0], np.geomspace(doc.get("s_min", 1e-4), doc.get("s_max", 1e2),
                                            int(doc.get("points", 81)))])
    rows, ok = [], True
    for spec in doc["phis"]:
        phi = _phi(spec)
        vals = laplace.lt_eval(phi, s)
        good = bool(vals[0] == 1.0 and np.all(vals > 0) and np.all(vals <= 1)
                    and np.all(np.diff(vals) < 0))
        ok &= good
        rows.append({"phi": phi.to_dict(), "passed": good, "min_value": float(vals.min())})
    return CheckResult("lt-properties", ok, {"results": rows})


def _check_inverse_roundtrip(doc, rng):
    _keys(doc, {"check", "phis"}, {"s_min", "s_max", "points", "tolerance"},
          "inverse-roundtrip check")
    s = np.geomspace(doc.get("s_min", 1e-4), doc.get("s_max", 1e4), int(doc.get("points", 81)))
    tol = float(doc.get("tolerance", 1e-10))
    rows, ok = [], True
    for spec in doc["phis"]:
        phi = _phi(spec)
        back = laplace.lt_inverse(phi, laplace.lt_eval(phi, s))
        err = float(np.max(np.abs(back - s) / s))
        ok &= err < tol
        rows.append({"phi": phi.to_dict(), "max_relative_error": err})
    return CheckResult("inverse-roundtrip", ok, {"tolerance": tol, "results": rows})


def _foil(s):
    return max(0.0, 1.0 - s * s)


def _check_cm(doc, rng):
    _keys(doc, {"check", "start", "step", "order"}, {"phi", "foil", "points", "expect"},
          "complete-monotonicity check")
    if ("phi" in doc) == ("foil" in doc):
        raise ConfigError("complete-monotonicity check needs exactly one of 'phi' or 'foil'")
    if "foil" in doc:
        if doc["foil"] != "clipped-quadratic":
            raise ConfigError(f"unknown foil {doc['foil']!r}")
        f, label = _foil, "max(0, 1 - s^2)"
    else:
        phi = _phi(doc["phi"])
        f, label = (lambda x: laplace.lt_eval(phi, x)), phi.to_dict()
    expect = doc.get("expect", "pass")
    if expect not in ("pass", "fail"):
        raise ConfigError("expect must be 'pass' or 'fail'")
    res = laplace.complete_monotonicity_check(f, doc["start"], doc["step"], doc["order"],
                                              doc.get("points"))
    outcome = "pass" if res.passed else "fail"
    return CheckResult("complete-monotonicity", outcome == expect,
                       {"function": label, "outcome": outcome, "expected": expect,
                        "failing_order": res.failing_order, "tolerance": res.tolerance})


def _check_latent_sample(doc, rng):
    _keys(doc, {"check", "phi", "samples"}, {"v"}, "latent-sample check")
    phi = _phi(doc["phi"])
    n = int(doc["samples"])
    v = np.asarray(doc.get("v", [0.5, 1.0, 2.0]), dtype=float)
    u = laplace.lt_sample_U(phi, rng, n)
    emp = np.exp(-np.outer(v, u)).mean(axis=1)
    err = float(np.max(np.abs(emp - laplace.lt_eval(phi, v))))
    tol = 5.0 / math.sqrt(n)
    return CheckResult("latent-sample", err < tol,
                       {"phi": phi.to_dict(), "samples": n, "max_error": err, "tolerance": tol})


# -- count-limit --------------------------------------------------------------


def _check_pmf_tv(doc, rng):
    _keys(doc, {"check", "count", "samples"}, {"states", "tolerance"}, "pmf-tv check")
    model = _count(doc["count"])
    if isinstance(model, counts.HarrisModel):
        model = counts.harris_as_count_model(model)
    n, states = int(doc["samples"]), int(doc.get("states", 50))
    tol = float(doc.get("tolerance", 0.01))
    draws = counts.count_sample(model, rng, n)
    emp = np.bincount(np.minimum(draws, states + 1), minlength=states + 2)[: states + 1] / n
    exact = counts.count_pmf(model, states)
    tv = 0.5 * float(np.sum(np.abs(emp - exact)))
    rows = np.column_stack([np.arange(states + 1), emp, exact])
    return CheckResult("pmf-tv", tv < tol,
                       {"count": model.to_dict(), "samples": n, "states": states,
                        "tv_distance": tv, "tolerance": tol},
                       curves=[("pmf", ["n", "empirical", "exact"], rows)])


def _check_harris_pgf(doc, rng):
    _keys(doc, {"check", "harris"}, {"points", "tolerance"}, "harris-pgf check")
    h = _count({"harris": doc["harris"]})
    s = np.linspace(0.0, 1.0, int(doc.get("points", 101)))
    tol = float(doc.get("tolerance", 1e-12))
    cm = counts.harris_as_count_model(h)
    err = float(np.max(np.abs(counts.harris_pgf(h, s) - counts.pgf_eval(cm, s))))
    return CheckResult("harris-pgf", err < tol,
                       {"harris": {"a": h.a, "m": h.m}, "as_count_model": cm.to_dict(),
                        "max_error": err, "tolerance": tol})


def _check_scaling(doc, rng):
    _keys(doc, {"check", "phi", "theta_schedule", "v_grid", "samples_per_theta"},
          {"j", "m", "tolerance", "mc_tolerance"}, "scaling check")
    phi = _phi(doc["phi"])
    try:
        exact, emp = counts.scaled_count_limit_check(
            phi, int(doc.get("j", 0)), int(doc.get("m", 1)), doc["theta_schedule"],
            doc["v_grid"], int(doc["samples_per_theta"]), rng,
            float(doc.get("tolerance", 1e-3)), doc.get("mc_tolerance"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return CheckResult("scaling", exact.passed and emp.passed, {}, [exact, emp],
                       _lt_rows(exact))


def _check_harris_scaling(doc, rng):
    _keys(doc, {"check", "harris", "v_grid", "samples"}, {"tolerance", "mc_tolerance"},
          "harris-scaling check")
    h = _count({"harris": doc["harris"]})
    exact, emp = counts.harris_scaling_check(h, doc["v_grid"], int(doc["samples"]), rng,
                                             float(doc.get("tolerance", 1e-3)),
                                             float(doc.get("mc_tolerance", 0.01)))
    return CheckResult("harris-scaling", exact.passed and emp.passed, {}, [exact, emp],
                       _lt_rows(exact))


# -- cf-check -----------------------------------------------------------------


def _check_no_real_zero(doc, rng):
    _keys(doc, {"check", "laws"}, {"half_width", "points", "min_modulus"}, "no-real-zero check")
    t = _grid(doc, 50.0, 1001)
    floor = float(doc.get("min_modulus", 0.0))
    rows, ok = [], True
    for spec in doc["laws"]:
        law = _law(spec)
        res = charfn.no_real_zero_check(law, t)
        good = res.passed and res.min_modulus > floor
        ok &= good
        rows.append({"law": law.to_dict(), "min_modulus": res.min_modulus, "at_t": res.argmin,
                     "passed": good})
    return CheckResult("no-real-zero", ok, {"min_modulus_floor": floor, "results": rows})


def _check_id_roundtrip(doc, rng):
    _keys(doc, {"check", "laws"}, {"half_width", "points", "tolerance"}, "id-roundtrip check")
    t = _grid(doc, 10.0, 201)
    tol = float(doc.get("tolerance", 1e-10))
    rows, ok = [], True
    for spec in doc["laws"]:
        law = _law(spec)
        try:
            err = charfn.id_roundtrip(law, t)
        except NotImplementedError as exc:
            raise ConfigError(str(exc)) from exc
        ok &= err < tol
        rows.append({"law": law.to_dict(), "sup_error": err})
    return CheckResult("id-roundtrip", ok, {"tolerance": tol, "results": rows})


def _check_definetti(doc, rng):
    _keys(doc, {"check", "phis", "n_schedule"}, {"h_alpha", "half_width", "points", "tolerance"},
          "definetti check")
    alpha = float(doc.get("h_alpha", 2.0))
    t = _grid(doc, 3.0, 101)
    tol = float(doc.get("tolerance", 1e-3))
    target = Stable(1.0, alpha, 0.0)

    def h_n(n, tt):
        return np.exp(-np.abs(tt) ** alpha / n)

    reports, curves, ok = [], [], True
    for spec in doc["phis"]:
        phi = _phi(spec)
        rep = charfn.definetti_limit_eval(phi, target, h_n, float, doc["n_schedule"], t, tol)
        rep.name = f"definetti-{phi.kind}"
        shrinks = rep.distances[-1] < rep.distances[0]
        rep.metadata["final_below_first"] = shrinks
        ok &= rep.passed and shrinks
        reports.append(rep)
        curves += _cf_rows(rep, "n")
    return CheckResult("definetti", ok, {"h_alpha": alpha}, reports, curves)


def _check_selfdecomp(doc, rng):
    _keys(doc, {"check", "phis", "c"}, {"order", "start", "step", "points"}, "selfdecomp check")
    order = int(doc.get("order", 8))
    rows, ok = [], True
    for spec in doc["phis"]:
        phi = _phi(spec)
        for c in doc["c"]:
            res = charfn.selfdecomp_ratio_check(phi, float(c), doc.get("start", 0.1),
                                                doc.get("step", 0.2), doc.get("points", 41), order)
            ok &= res.passed
            rows.append({"phi": phi.to_dict(), "c": c, "passed": res.passed,
                         "failing_order": res.failing_order})
    return CheckResult("selfdecomp", ok, {"order": order, "results": rows})


# -- sample -------------------------------------------------------------------


def _exact_cdf(doc):
    _keys(doc, {"kind"}, {"mean", "scale"}, "reference CDF")
    if doc["kind"] == "exponential":
        return stats.expon(scale=float(doc.get("mean", 1.0))).cdf
    if doc["kind"] == "laplace":
        return stats.laplace(scale=float(doc.get("scale", 1.0))).cdf
    if doc["kind"] == "normal":
        return stats.norm(scale=float(doc.get("scale", 1.0))).cdf
    raise ConfigError(f"unknown reference CDF kind {doc['kind']!r}")


def _check_random_sum_ks(doc, rng, seed=None, index=0):
    _keys(doc, {"check", "count", "component", "samples", "cdf"}, {"level", "streams"},
          "random-sum-ks check")
    model = _count(doc["count"])
    comp = _component(doc["component"])
    cdf = _exact_cdf(doc["cdf"])
    n, level = int(doc["samples"]), float(doc.get("level", 0.01))
    pvals = []
    for s in range(int(doc.get("streams", 1))):
        r = rng if s == 0 else stream(seed, index, s)
        x = sampler.sample_random_sum(model, comp, r, n)
        pvals.append(float(stats.kstest(x, cdf).pvalue))
    return CheckResult("random-sum-ks", all(p > level for p in pvals),
                       {"count": model.to_dict(), "component": comp.to_dict(), "samples": n,
                        "level": level, "p_values": pvals})


def _check_phi_id_ecf(doc, rng):
    _keys(doc, {"check", "law", "samples"}, {"half_width", "points", "tolerance"},
          "phi-id-ecf check")
    law = _law(doc["law"])
    n = int(doc["samples"])
    t = _grid(doc)
    tol = float(doc.get("tolerance", 5.0 / math.sqrt(n)))
    try:
        x = sampler.sample_phi_id(law, rng, n)
    except NotImplementedError as exc:
        raise ConfigError(str(exc)) from exc
    ecf, se = empirical_cf(x, t)
    target = cf_eval(law, t)
    rep = ConvergenceReport("phi-id-ecf", [n], [cf_distance(ecf, target)], tol, 3 * se,
                            {"law": law.to_dict(), "samples": n},
                            [{"t": t, "f": ecf, "target": target}])
    return CheckResult("phi-id-ecf", rep.passed, {}, [rep], _cf_rows(rep, "n"))


# -- attraction ---------------------------------------------------------------


def _attraction_experiment(doc):
    _keys(doc, {"check", "phi", "target_psi", "component", "n_schedule"},
          {"a_schedule", "a_power", "b_schedule", "mu_schedule", "half_width", "points",
           "tolerance", "paired_degenerate", "ratio_floor"}, "attraction experiment")
    comp_doc = doc["component"]
    if isinstance(comp_doc, dict) and comp_doc.get("kind") == "omega":
        _keys(comp_doc, {"kind", "psi"}, set(), "omega component")
        g = _psi(comp_doc["psi"]).omega
    else:
        g = _component(comp_doc)
    ns = [int(n) for n in doc["n_schedule"]]
    if ("a_schedule" in doc) == ("a_power" in doc):
        raise ConfigError("give exactly one of 'a_schedule' or 'a_power'")
    a = doc["a_schedule"] if "a_schedule" in doc else [n ** float(doc["a_power"]) for n in ns]
    try:
        return limits.AttractionExperiment(
            _phi(doc["phi"]), _psi(doc["target_psi"]), g, a, ns, doc.get("b_schedule"),
            doc.get("mu_schedule"), _grid(doc), float(doc.get("tolerance", 1e-3)),
            ratio_floor=float(doc.get("ratio_floor", 0.1)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _run_attraction(doc, partial):
    exp = _attraction_experiment(doc)
    runner = limits.run_partial_phi_attraction if partial else limits.run_phi_attraction
    try:
        reports = [runner(exp)]
        if doc.get("paired_degenerate", True):
            reports.append(limits.paired_degenerate_run(exp, partial))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    reports[-1].name += "-degenerate" if len(reports) == 2 else ""
    ok = all(r.passed for r in reports)
    details = {}
    if len(reports) == 2:
        details["verdicts_coincide"] = reports[0].passed == reports[1].passed
    curves = []
    for r in reports:
        curves += _cf_rows(r, "n")
    return CheckResult("partial-attraction" if partial else "attraction", ok, details,
                       reports, curves)


def _check_attraction(doc, rng):
    return _run_attraction(doc, partial=False)


def _check_partial_attraction(doc, rng):
    return _run_attraction(doc, partial=True)


# -- transfer -----------------------------------------------------------------


def _check_transfer(doc, rng):
    _keys(doc, {"check", "theta_schedule", "phi", "component", "limit_psi", "replicates"},
          {"j", "m", "scale_exponent", "center", "half_width", "points", "tolerance"},
          "transfer experiment")
    phi = _phi(doc["phi"])
    base = _component(doc["component"])
    expo = float(doc.get("scale_exponent", 0.5))
    center = float(doc.get("center", 0.0))

    def component(theta):
        a = theta ** expo
        return base.affine(scale=a, shift=-a * center)

    try:
        res = limits.run_transfer_equivalence(
            doc["theta_schedule"], phi, int(doc.get("j", 0)), int(doc.get("m", 1)), component,
            _psi(doc["limit_psi"]), int(doc["replicates"]), rng, _grid(doc),
            float(doc.get("tolerance", 0.03)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    reports = [res.random_sum, res.deterministic_sum]
    curves = _cf_rows(res.random_sum, "theta") + _cf_rows(res.deterministic_sum, "theta")
    return CheckResult("transfer", res.passed,
                       {"scale_exponent": expo, "center": center}, reports, curves)


CHECKS = {
    "lt-check": {
        "lt-properties": _check_lt_properties,
        "inverse-roundtrip": _check_inverse_roundtrip,
        "complete-monotonicity": _check_cm,
        "latent-sample": _check_latent_sample,
    },
    "count-limit": {
        "pmf-tv": _check_pmf_tv,
        "harris-pgf": _check_harris_pgf,
        "scaling": _check_scaling,
        "harris-scaling": _check_harris_scaling,
    },
    "cf-check": {
        "no-real-zero": _check_no_real_zero,
        "id-roundtrip": _check_id_roundtrip,
        "definetti": _check_definetti,
        "selfdecomp": _check_selfdecomp,
        "complete-monotonicity": _check_cm,
        "inverse-roundtrip": _check_inverse_roundtrip,
        "lt-properties": _check_lt_properties,
    },
    "sample": {
        "random-sum-ks": _check_random_sum_ks,
        "phi-id-ecf": _check_phi_id_ecf,
    },
    "attraction": {"attraction": _check_attraction},
    "partial-attraction": {"partial-attraction": _check_partial_attraction},
    "transfer": {"transfer": _check_transfer},
}

STOCHASTIC = {"latent-sample", "pmf-tv", "scaling", "harris-scaling", "random-sum-ks",
              "phi-id-ecf", "transfer"}


def validate(config: dict) -> None:
    """Schema validation without running anything."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(config) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s) in config: {', '.join(sorted(unknown))}")
    kind = config.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"config kind must be one of {', '.join(KINDS)}; got {kind!r}")
    checks = config.get("checks")
    if not isinstance(checks, list) or not checks:
        raise ConfigError("config needs a non-empty 'checks' list")
    for c in checks:
        if not isinstance(c, dict) or c.get("check") not in CHECKS[kind]:
            name = c.get("check") if isinstance(c, dict) else c
            raise ConfigError(f"check {name!r} is not valid for kind {kind!r}; "
                              f"expected one of {', '.join(CHECKS[kind])}")
    if any(c["check"] in STOCHASTIC for c in checks):
        seed = config.get("seed")
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
            raise ConfigError("a 64-bit unsigned 'seed' is required for stochastic checks")


def run_config(config: dict) -> list[CheckResult]:
    validate(config)
    kind, seed = config["kind"], config.get("seed")
    results = []
    for i, doc in enumerate(config["checks"]):
        fn = CHECKS[kind][doc["check"]]
        rng = stream(seed, i) if seed is not None else None
        if fn is _check_random_sum_ks:
            results.append(fn(doc, rng, seed, i))
        else:
            results.append(fn(doc, rng))
    return results
