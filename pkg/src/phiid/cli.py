"""Command-line driver.

Exit codes: 0 every verdict passed, 1 a verdict failed, 2 config or usage error.
The output directory is ``--out``, else ``$PHIID_OUTPUT_DIR``, else the
config's ``output_dir``, else ``./phiid-out``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import counts, experiments, mc, presets, sampler
from .charfn import cf_eval, law_from_dict, symmetric_grid
from .experiments import ConfigError

OUTPUT_ENV = "PHIID_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(canon.encode()).hexdigest()


def build_report(config: dict, results) -> dict:
    return {
        "tool": "phiid",
        "version": tool_version(),
        "kind": config["kind"],
        "name": config.get("name", "experiment"),
        "description": config.get("description", ""),
        "seed": config.get("seed"),
        "config_sha256": config_hash(config),
        "verdict": "pass" if all(r.passed for r in results) else "fail",
        "checks": [r.to_dict() for r in results],
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def write_csv(path: Path, header, rows, comments=()):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


def write_artifacts(out_dir: Path, report: dict, results) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "report.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n")
    for i, res in enumerate(results):
        for label, header, rows in res.curves:
            write_csv(out_dir / "curves" / f"{i:02d}_{label}.csv", header, rows)
    return path


def _output_dir(args, config) -> Path:
    base = args.out or os.environ.get(OUTPUT_ENV) or config.get("output_dir") or "phiid-out"
    return Path(base) / config.get("name", "experiment")


def _load_config(args) -> dict:
    if args.preset:
        try:
            return presets.preset_config(args.preset)
        except KeyError:
            raise ConfigError(f"unknown preset {args.preset!r}; see 'phiid presets'") from None
    if not args.config:
        raise ConfigError("give a config path or --preset NAME")
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if isinstance(config, dict):
        config.setdefault("name", Path(args.config).stem)
    return config


def cmd_run(args) -> int:
    config = _load_config(args)
    if args.seed is not None:
        config["seed"] = args.seed
    results = experiments.run_config(config)
    report = build_report(config, results)
    path = write_artifacts(_output_dir(args, config), report, results)
    print(f"{report['name']}: {report['verdict']}  ({path})")
    for r in results:
        print(f"  {r.check}: {'pass' if r.passed else 'FAIL'}")
    return EXIT_OK if report["verdict"] == "pass" else EXIT_FAIL


def cmd_presets(args) -> int:
    for name, claim in presets.list_builtins():
        print(f"{name}\n    {claim}")
    if args.dump:
        out = Path(args.dump)
        out.mkdir(parents=True, exist_ok=True)
        for name, _ in presets.list_builtins():
            (out / f"{name}.json").write_text(
                json.dumps(presets.preset_config(name), indent=2) + "\n")
    return EXIT_OK


def _json_arg(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--{what} is not valid JSON: {exc}") from exc


def cmd_sample(args) -> int:
    given = [x for x in ("law", "count") if getattr(args, x)]
    if len(given) != 1:
        raise ConfigError("give exactly one of --law or --count")
    if args.component and not args.count:
        raise ConfigError("--component needs --count")
    try:
        if args.law:
            spec = _json_arg(args.law, "law")
            law = law_from_dict(spec)

            def draw(rng, size):
                return sampler.sample_phi_id(law, rng, size)
        else:
            spec = {"count": _json_arg(args.count, "count")}
            model = counts.count_from_dict(spec["count"])
            if args.component:
                spec["component"] = _json_arg(args.component, "component")
                comp = sampler.component_from_dict(spec["component"])

                def draw(rng, size):
                    return sampler.sample_random_sum(model, comp, rng, size)
            else:
                def draw(rng, size):
                    return model.sample(rng, size)
    except (ValueError, TypeError, KeyError, NotImplementedError) as exc:
        raise ConfigError(str(exc)) from exc
    x = mc.sample_chunked(draw, args.n, args.seed, chunk_size=args.chunk_size,
                          threads=args.threads)
    header = [f"seed={args.seed}", f"law={json.dumps(spec, sort_keys=True)}",
              f"count={args.n}", f"chunk_size={args.chunk_size}"]
    fh = open(args.output, "w") if args.output else sys.stdout
    try:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("x\n")
        for v in x:
            fh.write(f"{float(v)!r}\n")
    finally:
        if args.output:
            fh.close()
    return EXIT_OK


def cmd_pgf(args) -> int:
    try:
        model = counts.count_from_dict(_json_arg(args.count, "count"))
        values = model.pgf(np.asarray(args.s, dtype=float))
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    print("s,pgf")
    for s, p in zip(args.s, np.atleast_1d(values)):
        print(f"{s!r},{float(p)!r}")
    return EXIT_OK


def cmd_cf(args) -> int:
    try:
        law = law_from_dict(_json_arg(args.law, "law"))
        t = symmetric_grid(args.half_width, args.points)
        f = cf_eval(law, t)
        if args.target:
            g = cf_eval(law_from_dict(_json_arg(args.target, "target")), t)
        else:
            g = law.psi.omega(t)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    rows = np.column_stack([t, f.real, f.imag, g.real, g.imag, np.abs(f - g)])
    header = ["t", "re_f", "im_f", "re_target", "im_target", "abs_err"]
    if args.output:
        write_csv(Path(args.output), header, rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])
    return EXIT_OK


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phiid", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    p.add_argument("--threads", type=int, default=None,
                   help="cap on worker threads (default: available CPUs)")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config", nargs="?")
    r.add_argument("--preset")
    r.add_argument("--seed", type=_seed)
    r.add_argument("--out", help="output directory")
    r.set_defaults(func=cmd_run)

    ps = sub.add_parser("presets", help="list built-in experiments")
    ps.add_argument("--dump", metavar="DIR", help="also write each preset's config JSON")
    ps.set_defaults(func=cmd_presets)

    s = sub.add_parser("sample", help="emit raw draws as single-column CSV")
    s.add_argument("--law", help="phi-ID law JSON")
    s.add_argument("--count", help="count model JSON")
    s.add_argument("--component", help="component law JSON (random sum with --count)")
    s.add_argument("-n", type=int, default=1000)
    s.add_argument("--seed", type=_seed, required=True)
    s.add_argument("--chunk-size", type=int, default=mc.DEFAULT_CHUNK)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sample)

    g = sub.add_parser("pgf", help="evaluate a count model's PGF")
    g.add_argument("--count", required=True)
    g.add_argument("--s", type=float, nargs="+", required=True)
    g.set_defaults(func=cmd_pgf)

    c = sub.add_parser("cf", help="write a CF curve as CSV")
    c.add_argument("--law", required=True)
    c.add_argument("--target", help="law JSON for the target columns (default exp(-psi))")
    c.add_argument("--half-width", type=float, default=5.0)
    c.add_argument("--points", type=int, default=101)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_cf)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
