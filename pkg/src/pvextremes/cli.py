"""Command-line front end.

Every run emits a versioned result envelope (JSON by default, CSV for tabular
payloads) carrying the resolved configuration and reproducibility metadata.
Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error.
"""

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import constants, estimators, extremes, validate
from .errors import ConfigError, NotTabular, PVError

SCHEMA_VERSION = "1"

_COMMANDS = ("constants", "estimate-cd", "estimate-cd-alpha", "pointy-count",
             "tail", "k-alpha", "simplex-stats", "extremal-index", "validate")


def _fmt(x):
    return f"{x:.17g}"


def _est_dict(est):
    return {
        "mean": est.mean,
        "std_error": est.std_error,
        "reps": est.reps,
        "master_seed": est.master_seed,
        "degenerate_count": est.degenerate_count,
    }


def _parse_t_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v != ""]
    except ValueError as exc:
        raise ConfigError(f"bad t list {text!r}") from exc


def _load_config_file(path):
    try:
        raw = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    raw_stripped = raw.strip()
    if raw_stripped.startswith("{"):
        try:
            data = json.loads(raw_stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be an object")
        return data
    data = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line {line!r}")
        key, val = line.split("=", 1)
        data[key.strip()] = val.strip()
    return data


_FIELD_TYPES = {
    "d": int, "reps": int, "seed": int, "workers": int,
    "alpha": float, "n": float, "buffer": float, "u": float,
    "t": str, "out": str, "format": str, "deep": bool,
}


def _resolve(args):
    """Merge defaults, config-file values and explicit flags (flags win)."""
    cfg = {"d": 2, "alpha": 0.0, "t": None, "reps": 10_000, "seed": 0,
           "workers": os.cpu_count() or 1, "out": None, "format": "json",
           "n": 30.0, "buffer": None, "u": None, "deep": False}
    if args.config:
        for key, val in _load_config_file(args.config).items():
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown config key {key!r}")
            typ = _FIELD_TYPES[key]
            if typ is bool and isinstance(val, str):
                val = val.lower() in ("1", "true", "yes")
            cfg[key] = typ(val) if not isinstance(val, bool) else val
    for key in cfg:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None and flag is not False:
            cfg[key] = flag
    if cfg["format"] not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, got {cfg['format']!r}")
    return cfg


def _run_command(command, cfg):
    d = cfg["d"]
    alpha = cfg["alpha"]
    reps = cfg["reps"]
    seed = cfg["seed"]
    workers = cfg["workers"]
    degenerate = 0

    if command == "constants":
        a1, a1p, theta = constants.extremal_norm_constants(d)
        results = {
            "d": d,
            "alpha": alpha,
            "kappa_d": constants.unit_ball_volume(d),
            "c_d": constants.c_d(d),
            "c_d_alpha": constants.c_d_alpha(d, alpha),
            "k_d_alpha": constants.k_d_alpha(d, alpha),
            "alpha1": a1,
            "alpha1_prime": a1p,
            "theta": theta,
            "miles_mean_simplex_volume": constants.miles_mean_simplex_volume(d),
            "wendel_probability": constants.wendel_probability(d),
        }
        if cfg["t"]:
            grid = _parse_t_list(cfg["t"])
            results["t_grid"] = grid
            results["expected_pointy_count"] = [
                constants.expected_pointy_count(d, alpha, t) for t in grid]
            results["tail_asymptotic"] = [
                constants.tail_asymptotic(d, alpha, t) if t > 0 else 1.0 for t in grid]
        return results, degenerate

    if command == "estimate-cd":
        est = estimators.estimate_c_d(d, reps, seed=seed, workers=workers)
        return {"estimate": _est_dict(est), "closed_form": constants.c_d(d)}, \
            est.degenerate_count

    if command == "estimate-cd-alpha":
        est = estimators.estimate_c_d_alpha(d, alpha, reps, seed=seed, workers=workers)
        return {"estimate": _est_dict(est),
                "closed_form": constants.c_d_alpha(d, alpha)}, est.degenerate_count

    if command == "pointy-count":
        t = _parse_t_list(cfg["t"] or "0")[0]
        est = estimators.estimate_pointy_count(d, alpha, t, reps, seed=seed,
                                               workers=workers)
        return {"t": t, "estimate": _est_dict(est),
                "exact": constants.expected_pointy_count(d, alpha, t)}, \
            est.degenerate_count

    if command == "tail":
        grid = _parse_t_list(cfg["t"] or "0.5,1.0,1.5")
        rep = estimators.estimate_tail(d, alpha, grid, reps, seed=seed,
                                       workers=workers)
        degenerate = rep.empirical_prob[0].degenerate_count if grid else 0
        return {
            "t_grid": rep.t_grid,
            "empirical_prob": [_est_dict(e) for e in rep.empirical_prob],
            "pair_count": [_est_dict(e) for e in rep.pair_count],
            "exact_expected_count": rep.exact_expected_count,
            "asymptotic": rep.asymptotic,
        }, degenerate

    if command == "k-alpha":
        est = estimators.estimate_k_d_alpha_mc(d, alpha, reps, seed=seed,
                                               workers=workers)
        return {"estimate": _est_dict(est),
                "closed_form": constants.k_d_alpha(d, alpha)}, est.degenerate_count

    if command == "simplex-stats":
        wendel = estimators.estimate_wendel(d, reps, seed=seed, workers=workers)
        miles = estimators.estimate_miles(d, reps, seed=seed + 1, workers=workers)
        cd = estimators.estimate_c_d(d, reps, seed=seed + 2, workers=workers)
        return {
            "wendel": _est_dict(wendel),
            "wendel_exact": constants.wendel_probability(d),
            "miles": _est_dict(miles),
            "miles_exact": constants.miles_mean_simplex_volume(d),
            "c_d": _est_dict(cd),
            "c_d_exact": constants.c_d(d),
            "conditional_mean_ratio_exact": constants.conditional_mean_ratio(d),
        }, max(wendel.degenerate_count, cd.degenerate_count)

    if command == "extremal-index":
        buffer = cfg["buffer"] or extremes.default_buffer(d, cfg["n"])
        run = extremes.ExtremeRunConfig(d=d, n=cfg["n"], buffer=buffer,
                                        reps=reps, seed=seed)
        report = extremes.run_box_experiment(run, workers=workers)
        u = cfg["u"] if cfg["u"] is not None else report.threshold_u
        theta = extremes.extremal_index_from_maxima(report.maxima, report.rho,
                                                    u, d, seed)
        return {
            "rho": report.rho,
            "n": cfg["n"],
            "buffer": buffer,
            "threshold_u": u,
            "theta_hat": _est_dict(theta),
            "theta_exact": 1.0 / (2 * d),
            "ks_gumbel_alpha1": report.ks_gumbel,
            "flagged_replicates": report.flagged_replicates,
            "mean_nucleus_count": float(report.nucleus_counts.mean()),
            "maxima": report.maxima.tolist(),
            "normalized": report.normalized.tolist(),
        }, report.flagged_replicates

    if command == "validate":
        results = validate.run_validation(deep=cfg["deep"], seed=seed,
                                          workers=workers)
        for res in results:
            print(res.line())
        payload = {
            "deep": cfg["deep"],
            "criteria": [{"key": r.key, "name": r.name, "passed": r.passed,
                          "details": r.details} for r in results],
            "all_passed": all(r.passed for r in results),
        }
        return payload, degenerate

    raise ConfigError(f"unknown command {command!r}")


def _csv_rows(command, results):
    if command == "tail":
        header = ["t", "empirical_prob", "empirical_prob_se", "pair_mean",
                  "pair_se", "exact_expected_count", "asymptotic"]
        rows = []
        for i, t in enumerate(results["t_grid"]):
            rows.append([t,
                         results["empirical_prob"][i]["mean"],
                         results["empirical_prob"][i]["std_error"],
                         results["pair_count"][i]["mean"],
                         results["pair_count"][i]["std_error"],
                         results["exact_expected_count"][i],
                         results["asymptotic"][i]])
        return header, rows
    if command == "extremal-index":
        header = ["replicate", "max_distance", "normalized"]
        rows = [[i, m, z] for i, (m, z) in
                enumerate(zip(results["maxima"], results["normalized"]))]
        return header, rows
    raise NotTabular(f"command {command!r} has no tabular payload")


def emit_csv(envelope, path):
    """Write the envelope's tabular payload: header + one row per entry.

    17 significant digits, so re-parsing reproduces the doubles exactly.
    """
    header, rows = _csv_rows(envelope["command"], envelope["results"])
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def build_envelope(command, cfg, results, degenerate, started, finished):
    public_cfg = {k: v for k, v in cfg.items() if k != "out"}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": public_cfg,
        "started": started,
        "finished": finished,
        "results": results,
        "degenerate_count": degenerate,
    }


def _make_parser():
    parser = argparse.ArgumentParser(
        prog="pvx",
        description="Typical Poisson-Voronoi cell experiments: exact constants, "
                    "Monte Carlo estimators, tail brackets and box-maximum extremes.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--d", type=int, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--t", type=str, default=None,
                       help="threshold or comma-separated grid")
        p.add_argument("--reps", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", type=str, default=None, choices=["json", "csv"])
        p.add_argument("--config", type=str, default=None)
        if name == "extremal-index":
            p.add_argument("--n", type=float, default=None)
            p.add_argument("--buffer", type=float, default=None)
            p.add_argument("--u", type=float, default=None)
        if name == "validate":
            p.add_argument("--deep", action="store_true", default=False)
    return parser


def main(argv=None):
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
    except (PVError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    started = datetime.now(timezone.utc).isoformat()
    try:
        results, degenerate = _run_command(args.command, cfg)
    except (PVError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    finished = datetime.now(timezone.utc).isoformat()
    envelope = build_envelope(args.command, cfg, results, degenerate,
                              started, finished)
    try:
        if cfg["format"] == "csv":
            emit_csv(envelope, cfg["out"])
        elif cfg["out"]:
            with open(cfg["out"], "w", encoding="utf-8") as fh:
                json.dump(envelope, fh, indent=2)
                fh.write("\n")
        else:
            json.dump(envelope, sys.stdout, indent=2)
            sys.stdout.write("\n")
    except (OSError, NotTabular) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    if args.command == "validate" and not results["all_passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
