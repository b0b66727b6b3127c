"""Command line front end.

::

    nullhom mrw analyze|lattice|simulate   [options]
    nullhom rcm verify|clt|scan             [options]
    nullhom diag tightness|equivalence|schauder [options]

Every command accepts ``--config <file.toml|file.json>``, ``--seed``,
``--out``, ``--threads`` and ``--tol``; it writes its report files plus a
``manifest.json`` echoing the fully resolved configuration into ``--out`` and
prints only the report path on stdout.

Exit codes: 0 success (or null-homologous), 1 usage error, 2 input error,
3 negative outcome (not null-homologous, failed verification, threshold
exceeded, false fire).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NullHomError
from .rng import RandomSource

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NEGATIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


DEFAULTS = {
    ("mrw", "analyze"): {"chain": None, "tol": 1e-9, "horizon": 64},
    ("mrw", "lattice"): {"chain": None},
    ("mrw", "simulate"): {"chain": None, "n": 1000, "start": "stationary"},
    ("rcm", "verify"): {
        "dim": 2, "L": 8, "a": 1.0, "b": 2.0, "n_fields": 5, "epsilon": 0.1,
        "neumann_tol": 1e-9, "constant": None, "field_file": None, "inject_fault": None,
    },
    ("rcm", "clt"): {
        "dim": 1, "L": 16, "a": 1.0, "b": 3.0, "n": 2000, "reps": 10000,
        "constant": None, "ks_threshold": None,
    },
    ("rcm", "scan"): {"dim": 2, "a": 1.0, "b": 2.0, "L_list": [4, 8, 12], "reps": 10},
    ("diag", "tightness"): {
        "chain": "bundled:coboundary", "sampler": "mrw",
        "horizons": [16, 32, 64, 128, 256, 512, 1024, 2048], "reps": 1000, "levels": [0.9, 0.99],
    },
    ("diag", "equivalence"): {
        "chain": None, "suite_seed": 2024, "suite_size": 10, "tol": 1e-9,
        "horizons": [16, 32, 64, 128, 256, 512, 1024, 2048], "reps": 1000, "levels": [0.9, 0.99],
    },
    ("diag", "schauder"): {"window": None, "k_max": 5, "n_windows": 100, "length": 30, "dim": 1},
}


# ---------------------------------------------------------------------------
# Config and output plumbing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_config(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"config file not found: {p}")
    text = p.read_text()
    try:
        if p.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            return tomllib.loads(text)
        if p.suffix.lower() == ".json":
            return json.loads(text)
    except Exception as exc:
        raise InputError(f"cannot parse config {p}: {exc}") from exc
    raise InputError(f"config must be .toml or .json, got {p.suffix!r}")


def resolve_config(group: str, cmd: str, args) -> dict:
    cfg = dict(DEFAULTS[(group, cmd)])
    cfg.update({"seed": 0, "threads": 1})
    if args.config:
        loaded = _load_config(args.config)
        section = loaded.get(group, {}).get(cmd, loaded) if isinstance(loaded.get(group), dict) else loaded
        unknown = set(section) - set(cfg)
        if unknown:
            raise InputError(f"unknown config keys for {group} {cmd}: {sorted(unknown)}")
        cfg.update(section)
    for key in ("seed", "threads", "tol"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for key, val in (getattr(args, "overrides", None) or {}).items():
        if val is not None:
            cfg[key] = val
    if not 0 <= int(cfg["seed"]) < 2 ** 64:
        raise InputError("seed must be an unsigned 64-bit integer")
    return cfg


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text)
    return path


def _manifest(out: Path, group: str, cmd: str, cfg: dict, files: list[str]) -> None:
    _write(out, "manifest.json", _dump({
        "tool": "nullhom",
        "version": __version__,
        "command": f"{group} {cmd}",
        "config": cfg,
        "outputs": sorted(files),
    }))


def _chain_path(ref):
    if ref is None:
        raise InputError("a chain file is required (config key 'chain' or --chain)")
    ref = str(ref)
    if ref.startswith("bundled:"):
        name = ref.split(":", 1)[1]
        res = resources.files("nullhom") / "data" / f"{name}.json"
        if not res.is_file():
            raise InputError(f"no bundled instance named {name!r}")
        return res
    p = Path(ref)
    if not p.is_file():
        raise InputError(f"chain file not found: {p}")
    return p


def _load_chain(ref):
    from .mrw import chain_from_dict

    path = _chain_path(ref)
    try:
        data = json.loads(path.read_text())
        chain, f = chain_from_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"malformed chain file {ref}: {exc}") from exc
    if f is None:
        raise InputError(f"chain file {ref} has no increments")
    return chain, f


# ---------------------------------------------------------------------------
# mrw


def cmd_mrw_analyze(cfg, out):
    from .mrw import ShiftFunction, decide_null_homology, decision_to_dict, recover_shift_function

    chain, f = _load_chain(cfg["chain"])
    decision = decide_null_homology(chain, f, float(cfg["tol"]))
    report = decision_to_dict(chain, decision)
    if isinstance(decision, ShiftFunction):
        rec = recover_shift_function(chain, f, int(cfg["horizon"]))
        exact = np.asarray(decision.values, dtype=float)
        report["recovered"] = {
            "horizon": int(cfg["horizon"]),
            "values": rec.values.tolist(),
            "max_error": float(np.max(np.abs(rec.values - exact))),
        }
    path = _write(out, "decision.json", _dump(report))
    return (EXIT_OK if report["null_homologous"] else EXIT_NEGATIVE), [path]


def cmd_mrw_lattice(cfg, out):
    from .mrw import lattice_span

    chain, f = _load_chain(cfg["chain"])
    report = lattice_span(chain, f)
    return EXIT_OK, [_write(out, "lattice.json", _dump(report.to_dict()))]


def cmd_mrw_simulate(cfg, out):
    from .mrw import simulate_mrw, trajectory_to_csv

    chain, f = _load_chain(cfg["chain"])
    start = cfg["start"]
    start = start if start == "stationary" else int(start)
    traj = simulate_mrw(chain, f, int(cfg["n"]), RandomSource(int(cfg["seed"])), start)
    csv_path = _write(out, "trajectory.csv", trajectory_to_csv(traj))
    vals = traj.values
    summary = {
        "n": int(cfg["n"]),
        "max_abs_sum": float(np.max(np.abs(vals))),
        "final_sum": vals[-1].tolist(),
        "invariant_holds": traj.check(f),
        "seed": traj.seed,
    }
    return EXIT_OK, [csv_path, _write(out, "simulate.json", _dump(summary))]


# ---------------------------------------------------------------------------
# rcm


def _field(cfg, src):
    from .rcm.field import constant_field, load_field, sample_field

    if cfg.get("field_file"):
        p = Path(cfg["field_file"])
        if not p.is_file():
            raise InputError(f"field file not found: {p}")
        return load_field(p)
    if cfg.get("constant") is not None:
        return constant_field(int(cfg["dim"]), int(cfg["L"]), float(cfg["constant"]))
    return sample_field(int(cfg["dim"]), int(cfg["L"]), float(cfg["a"]), float(cfg["b"]), src)


def cmd_rcm_verify(cfg, out):
    from .rcm.checks import HARD_TOLERANCES, failures, verify_field
    from .rcm.environment import build_environment, limit_gradient

    root = RandomSource(int(cfg["seed"]))
    n_fields = 1 if (cfg.get("field_file") or cfg.get("constant") is not None) else int(cfg["n_fields"])
    fields, worst = [], {}
    for i in range(n_fields):
        field = _field(cfg, root.child(i))
        corr = None
        fault = cfg.get("inject_fault")
        if fault:
            corr = limit_gradient(build_environment(field))
            v = corr.v.copy()
            v[field.site_index(fault.get("site", [1] * field.dim))] += float(fault.get("value", 0.1))
            corr = corr.with_v(v)
        res = verify_field(field, float(cfg["epsilon"]), float(cfg["neumann_tol"]), corr)
        fields.append({"index": i, "seed": field.seed, "residuals": res, "failures": failures(res)})
        for k, v in res.items():
            worst[k] = max(worst.get(k, 0.0), v)
    bad = failures(worst)
    report = {"fields": fields, "max_residuals": worst, "tolerances": HARD_TOLERANCES,
              "failures": bad, "passed": not bad}
    return (EXIT_OK if not bad else EXIT_NEGATIVE), [_write(out, "verify.json", _dump(report))]


def cmd_rcm_clt(cfg, out):
    from .rcm.experiments import clt_experiment

    src = RandomSource(int(cfg["seed"]))
    field = _field(cfg, src.child(0))
    rep = clt_experiment(field, int(cfg["n"]), int(cfg["reps"]), src.child(1), threads=int(cfg["threads"]))
    thr = cfg.get("ks_threshold")
    rep["ks_threshold"] = thr
    rep["passed"] = None if thr is None else bool(max(rep["ks"]) <= float(thr))
    code = EXIT_NEGATIVE if rep["passed"] is False else EXIT_OK
    return code, [_write(out, "clt.json", _dump(rep))]


def cmd_rcm_scan(cfg, out):
    from .rcm.experiments import corrector_scan, scan_csv

    rep = corrector_scan(int(cfg["dim"]), float(cfg["a"]), float(cfg["b"]), [int(x) for x in cfg["L_list"]],
                         int(cfg["reps"]), RandomSource(int(cfg["seed"])))
    return EXIT_OK, [_write(out, "scan.json", _dump(rep)), _write(out, "scan.csv", scan_csv(rep))]


# ---------------------------------------------------------------------------
# diag


def _sampler(cfg):
    from .diagnostics import iid_sampler, mrw_sampler

    kind = cfg["sampler"]
    if kind == "mrw":
        chain, f = _load_chain(cfg["chain"])
        return mrw_sampler(chain, f, name=str(cfg["chain"]))
    if kind == "srw":
        return iid_sampler([-1.0, 1.0], name="srw")
    if kind == "drift":
        return iid_sampler([-1.0, 1.0], [0.4, 0.6], name="drift-0.2")
    raise InputError(f"unknown sampler {kind!r} (mrw, srw, drift)")


def cmd_diag_tightness(cfg, out):
    from .diagnostics import tightness_diagnostic

    rep = tightness_diagnostic(_sampler(cfg), cfg["horizons"], int(cfg["reps"]), cfg["levels"],
                               RandomSource(int(cfg["seed"])), int(cfg["threads"]))
    return EXIT_OK, [_write(out, "tightness.json", _dump(rep.to_dict())),
                     _write(out, "tightness.csv", rep.to_csv())]


def cmd_diag_equivalence(cfg, out):
    from .diagnostics import EquivalenceConfig, bundled_suite, theorem_equivalence_experiment

    econf = EquivalenceConfig(tuple(int(h) for h in cfg["horizons"]), int(cfg["reps"]),
                              tuple(float(x) for x in cfg["levels"]), int(cfg["seed"]), 0, float(cfg["tol"]))
    if cfg.get("chain"):
        chain, f = _load_chain(cfg["chain"])
        suite = [(str(cfg["chain"]), chain, f)]
    else:
        suite = bundled_suite(int(cfg["suite_seed"]), int(cfg["suite_size"]))
    rows = []
    for i, (name, chain, f) in enumerate(suite):
        conf = EquivalenceConfig(econf.horizons, econf.reps, econf.levels, econf.seed, i, econf.tol)
        r = theorem_equivalence_experiment(chain, f, conf, int(cfg["threads"]))
        r["name"] = name
        rows.append(r)
    fires = [r["name"] for r in rows if r["false_fire"]]
    report = {"instances": rows, "false_fires": fires, "passed": not fires}
    return (EXIT_OK if not fires else EXIT_NEGATIVE), [_write(out, "equivalence.json", _dump(report))]


def cmd_diag_schauder(cfg, out):
    from .diagnostics import schauder_map_checks
    from .sequences import load_window, PathWindow

    k_max = int(cfg["k_max"])
    if cfg.get("window"):
        p = Path(cfg["window"])
        if not p.is_file():
            raise InputError(f"window file not found: {p}")
        windows = [load_window(p)]
    else:
        gen = RandomSource(int(cfg["seed"])).generator()
        L, m = int(cfg["length"]), int(cfg["dim"])
        windows = [PathWindow(int(gen.integers(-L, 1)), gen.integers(-50, 51, size=(L, m)))
                   for _ in range(int(cfg["n_windows"]))]
    rows = [schauder_map_checks(w, k_max) for w in windows]
    ok = all(r["all_exact"] for r in rows)
    report = {"windows": len(rows), "all_exact": ok, "checks": rows}
    return (EXIT_OK if ok else EXIT_NEGATIVE), [_write(out, "schauder.json", _dump(report))]


COMMANDS = {
    ("mrw", "analyze"): cmd_mrw_analyze,
    ("mrw", "lattice"): cmd_mrw_lattice,
    ("mrw", "simulate"): cmd_mrw_simulate,
    ("rcm", "verify"): cmd_rcm_verify,
    ("rcm", "clt"): cmd_rcm_clt,
    ("rcm", "scan"): cmd_rcm_scan,
    ("diag", "tightness"): cmd_diag_tightness,
    ("diag", "equivalence"): cmd_diag_equivalence,
    ("diag", "schauder"): cmd_diag_schauder,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON config file")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed")
    common.add_argument("--out", default="nullhom-out", help="output directory")
    common.add_argument("--threads", type=int, help="cap on Monte Carlo worker threads")
    common.add_argument("--tol", type=float, help="tolerance override for floating decisions")
    common.add_argument("--chain", help="chain JSON file, or bundled:<name>")

    parser = _Parser(prog="nullhom", description="Null-homology analyses for stationary sequences.")
    parser.add_argument("--version", action="version", version=f"nullhom {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    for group in ("mrw", "rcm", "diag"):
        gp = groups.add_parser(group)
        sub = gp.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
        for g, cmd in COMMANDS:
            if g == group:
                sub.add_parser(cmd, parents=[common], help=(COMMANDS[(g, cmd)].__doc__ or "").strip() or None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_USAGE
    args.overrides = {"chain": args.chain}
    group, cmd = args.group, args.cmd
    try:
        cfg = resolve_config(group, cmd, args)
        if cfg.get("threads") is not None and int(cfg["threads"]) < 1:
            raise UsageError("--threads must be >= 1")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        code, paths = COMMANDS[(group, cmd)](cfg, out)
    except UsageError as exc:
        print(f"nullhom: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, NullHomError, OSError) as exc:
        print(f"nullhom: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _manifest(out, group, cmd, cfg, [p.name for p in paths])
    print(paths[0])
    return code


if __name__ == "__main__":
    sys.exit(main())
