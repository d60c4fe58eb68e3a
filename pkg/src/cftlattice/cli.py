"""Command-line front end: model tables, the one-hole channel comparison and the lattice outputs."""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE, EXIT_SIZE = 0, 2, 3, 4
SYMMETRY_PRESETS = {"all": "I", "first-row": "R", "z2": "Z"}

log = logging.getLogger("cftlattice")


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


class ToleranceFailure(RuntimeError):
    """A computed check missed its tolerance."""


@dataclass
class RunConfig:
    p: int = 3
    q: int = 4
    symmetry: str = "all"
    delta0: Optional[float] = None
    open_level: int = 7
    closed_weight: int = 14
    h_max: Optional[float] = None
    ratios: List[float] = field(default_factory=lambda: [0.15, 0.2, 0.25, 0.3, 0.35, 0.4])
    precision: int = 64
    anomaly_nodes: int = 16
    tolerance: float = 0.02
    cache_dir: Optional[str] = None
    out_dir: str = "."

    def validate(self) -> "RunConfig":
        from math import gcd
        if self.p < 3 or self.q < 3:
            raise ConfigError(f"p, q: need both >= 3, got ({self.p}, {self.q})")
        if gcd(self.p, self.q) != 1:
            raise ConfigError(f"p, q: must be coprime, got ({self.p}, {self.q})")
        if self.symmetry not in SYMMETRY_PRESETS and not self.symmetry.startswith("("):
            raise ConfigError(f"symmetry: expected one of {sorted(SYMMETRY_PRESETS)} or a label list")
        if self.delta0 is not None and not self.delta0 > 0:
            raise ConfigError("delta0: must be positive")
        if not 0 <= self.open_level <= 10:
            raise ConfigError("open_level: must lie in 0..10")
        if not 0 <= self.closed_weight <= 14:
            raise ConfigError("closed_weight: must lie in 0..14")
        if self.h_max is not None and self.h_max < 0:
            raise ConfigError("h_max: must be non-negative")
        bad = [r for r in self.ratios if not 0 < r < 0.5]
        if bad:
            raise ConfigError(f"ratios: R/d must lie in (0, 1/2), got {bad}")
        if self.precision < 16:
            raise ConfigError("precision: need at least 16 digits")
        if self.anomaly_nodes < 4:
            raise ConfigError("anomaly_nodes: need at least 4")
        if not self.tolerance > 0:
            raise ConfigError("tolerance: must be positive")
        return self


def parse_grid(text: str) -> List[float]:
    """'0.1,0.2' or 'start:stop:step' (stop included when hit)."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ConfigError("ratios: range step must be positive")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + k * step, 12) for k in range(max(count, 0))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"ratios: cannot parse {text!r}") from None


def parse_int_range(text: str) -> List[int]:
    """'3..8' or '3,5,7'."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"p: cannot parse {text!r}") from None


_CONFIG_KEYS = {
    "model": {"p": int, "q": int, "symmetry": str, "delta0": float, "precision": int},
    "cutoffs": {"open_level": int, "closed_weight": int, "h_max": float},
    "grid": {"ratios": parse_grid},
    "numerics": {"anomaly_nodes": int, "tolerance": float},
    "output": {"cache_dir": str, "out_dir": str},
}


def load_config(path: Optional[str]) -> RunConfig:
    config = RunConfig()
    if path is None:
        return config
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"config: {exc}") from None
    for section in parser.sections():
        if section not in _CONFIG_KEYS:
            raise ConfigError(f"config: unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _CONFIG_KEYS[section]:
                raise ConfigError(f"{section}.{key}: unknown key")
            try:
                setattr(config, key, _CONFIG_KEYS[section][key](raw))
            except ValueError:
                raise ConfigError(f"{section}.{key}: cannot parse {raw!r}") from None
    return config


def _resolve_symmetry(model, text: str):
    from .channels import symmetry_set
    if text in SYMMETRY_PRESETS:
        return symmetry_set(model, SYMMETRY_PRESETS[text])
    labels = []
    for chunk in text.replace(" ", "").split(")"):
        if chunk.strip(",("):
            r, s = chunk.strip(",(").split(",")
            labels.append(model.check_label((int(r), int(s))))
    return labels


# ---- output helpers ----------------------------------------------------------------------------


def _write_csv(path: Path, header: Sequence[str], rows) -> Path:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow(row)
    return path


def _cache_stats(model=None) -> dict:
    from .anomaly import CACHE_STATS
    stats = {"anomaly_hits": CACHE_STATS["hits"], "anomaly_misses": CACHE_STATS["misses"]}
    if model is not None and model.cache_hit is not None:
        stats["fsymbol_cache_hit"] = model.cache_hit
    return stats


def _write_summary(path: Path, command: str, config: RunConfig, payload: dict, started: float, model=None) -> Path:
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "model": [config.p, config.q],
        "cutoffs": {"open_level": config.open_level, "closed_weight": config.closed_weight, "h_max": config.h_max},
        "precision": config.precision,
        "wall_time_s": round(time.perf_counter() - started, 3),
        "cache": _cache_stats(model),
    }
    summary.update(payload)
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _fmt(x: float) -> str:
    return repr(float(x))


# ---- commands -------------------------------------------------------------------------------------


def _model(config: RunConfig):
    from .minimal_model import MinimalModel
    return MinimalModel(config.p, config.q, precision=config.precision, cache_dir=config.cache_dir)


def cmd_model_data(config: RunConfig) -> List[Path]:
    from .channels import stability_check, tilde_set
    started = time.perf_counter()
    model = _model(config)
    out = Path(config.out_dir)
    stem = f"model_{model.p}_{model.q}"
    labels = model.labels
    files = [
        _write_csv(out / f"{stem}_weights.csv", ["label", "r", "s", "h", "h_float", "quantum_dim"],
                   ([str(a), a.r, a.s, str(model.weight(a)), _fmt(model.weight(a)), _fmt(model.quantum_dim(a))]
                    for a in labels)),
        _write_csv(out / f"{stem}_fusion.csv", ["i", "j", "k", "N"],
                   ([str(i), str(j), str(k), model.fusion(i, j, k)]
                    for i in labels for j in labels for k in labels if model.fusion(i, j, k))),
        _write_csv(out / f"{stem}_smatrix.csv", ["a", "b", "S"],
                   ([str(a), str(b), _fmt(model.s_matrix(a, b))] for a in labels for b in labels)),
        _write_csv(out / f"{stem}_fsymbols.csv", ["b", "k", "a", "c", "i", "j", "F"],
                   ([str(x) for x in key] + [_fmt(val)] for key, val in sorted(model.f_table.items()))),
    ]
    payload = {"central_charge": str(model.central_charge), "labels": [str(a) for a in labels],
               "fsymbol_cache": model.cache_path(), "files": [f.name for f in files]}
    sym = _resolve_symmetry(model, config.symmetry)
    payload["symmetry"] = [str(a) for a in sym]
    payload["tilde_set"] = [str(a) for a in tilde_set(model, sym)]
    if model.q == model.p + 1:
        verdict = stability_check(model, sym)
        payload["stability"] = {"satisfied": verdict.satisfied,
                                "offenders": [[str(a), float(h)] for a, h in verdict.offenders]}
    files.append(_write_summary(out / f"{stem}.json", "model-data", config, payload, started, model))
    return files


def cmd_one_hole(config: RunConfig, with_anomaly: bool = True, alt_tau: bool = False) -> List[Path]:
    from .channels import ALT_TAU, HEX_TAU, channel_compare
    from .minimal_model import MinimalModel
    started = time.perf_counter()
    if not config.ratios:
        log.warning("empty R/d grid, nothing to compute")
        return []
    if config.q != config.p + 1:
        raise ConfigError(f"p, q: the one-hole comparison needs a unitary model, got M({config.p},{config.q})")
    if config.symmetry != "all":
        raise ConfigError("symmetry: the one-hole comparison is set up for the full label set only")
    model = MinimalModel(config.p, config.q, precision=config.precision, cache_dir=config.cache_dir)
    comparison = channel_compare(model, config.ratios, ALT_TAU if alt_tau else HEX_TAU,
                                 config.open_level, config.closed_weight, config.anomaly_nodes)
    out = Path(config.out_dir)
    stem = f"one_hole_{model.p}_{model.q}"
    csv_path = out / f"{stem}.csv"
    comparison.write_csv(csv_path)
    rel = comparison.relative(with_anomaly)
    payload = comparison.summary()
    payload.pop("model")
    payload.update({"with_anomaly": with_anomaly, "tolerance": config.tolerance,
                    "relative_difference": [float(x) for x in rel], "ratios": [float(x) for x in config.ratios],
                    "files": [csv_path.name]})
    json_path = _write_summary(out / f"{stem}.json", "one-hole", config, payload, started, model)
    if with_anomaly and np.max(rel) > config.tolerance:
        raise ToleranceFailure(f"channels differ by {np.max(rel):.2e} > {config.tolerance}")
    return [csv_path, json_path]


def _single_ratio(value: float) -> float:
    if not 0 < value < 0.5:
        raise ConfigError(f"ratio: R/d must lie in (0, 1/2), got {value}")
    return value


def cmd_lattice(config: RunConfig, sub: str, args) -> List[Path]:
    from . import lattice as lat
    from .minimal_model import MinimalModel
    from .uniformization import t_of_ratio
    started = time.perf_counter()
    out = Path(config.out_dir)
    if sub == "ising-map":
        if not config.ratios:
            log.warning("empty R/d grid, nothing to compute")
            return []
        model = MinimalModel(config.p, config.q)
        try:
            maps = [lat.ising_map(model, r) for r in config.ratios]
        except lat.LatticeError as exc:
            raise ConfigError(f"p, q: {exc}") from None
        keys = ["R_over_d", "x", "beta", "x_max", "beta_min", "beta_star", "covered"]
        path = _write_csv(out / f"ising_map_{config.p}_{config.q}.csv", keys,
                          ([m.to_dict()[k] for k in keys] for m in maps))
        return [path]
    if sub == "rsos-weights":
        model = MinimalModel(config.p, config.q)
        if model.q != model.p + 1:
            raise ConfigError(f"p, q: RSOS weights need a unitary model, got M({config.p},{config.q})")
        weights = lat.rsos_weights(model, t_of_ratio(_single_ratio(args.ratio)), config.delta0)
        path = _write_csv(out / f"rsos_weights_{config.p}.csv", ["a", "b", "c", "T"],
                          ([a, b, c, _fmt(v)] for (a, b, c), v in sorted(weights.table().items())))
        return [path]
    if sub == "loop-check":
        try:
            M, N = (int(x) for x in args.lattice.lower().split("x"))
            torus = lat.LatticeSpec(M, N)
        except ValueError:
            raise ConfigError(f"lattice: expected MxN with M, N >= 2, got {args.lattice!r}") from None
        checks = [lat.loop_equivalence_check(p, t_of_ratio(_single_ratio(args.ratio)), torus, x)
                  for p in parse_int_range(args.p_list or str(config.p)) for x in (args.x or [None])]
        worst = max(c.residual for c in checks)
        path = _write_summary(out / f"loop_check_{M}x{N}.json", "lattice loop-check", config,
                              {"lattice": [M, N], "checks": [c.to_dict() for c in checks],
                               "max_residual": worst}, started)
        if worst > 1e-10:
            raise ToleranceFailure(f"loop equivalence residual {worst:.2e}")
        return [path]
    if sub == "phase-points":
        points = [lat.phase_points(p) for p in parse_int_range(args.p_list or str(config.p))]
        keys = ["p", "n", "x_c", "x_0", "x_max", "c_c", "c_0", "R_C_over_d", "R_0_over_d"]
        path = _write_csv(out / "phase_points.csv", keys, ([pt.to_dict()[k] for k in keys] for pt in points))
        if not all(pt.x_c < pt.x_0 < pt.x_max for pt in points):
            raise ToleranceFailure("x_c < x_0 < x_max violated")
        return [path]
    raise ConfigError(f"lattice: unknown subcommand {sub!r}")


# ---- argument handling ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def add_common(target, default):
        target.add_argument("--config", default=default,
                            help="key = value file with [model], [cutoffs], [grid], [numerics], [output]")
        target.add_argument("--cache-dir", default=default,
                            help="F-symbol and anomaly cache (default: $CFTLATTICE_CACHE_DIR)")
        target.add_argument("--out", dest="out_dir", default=default, help="directory for CSV and JSON output")
        target.add_argument("-v", "--verbose", action="store_true", default=default or False)

    parser = argparse.ArgumentParser(prog="cftlattice", description=__doc__)
    add_common(parser, None)
    # the same options are accepted after the subcommand without clobbering earlier values
    common = argparse.ArgumentParser(add_help=False)
    add_common(common, argparse.SUPPRESS)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--p", type=int)
    model.add_argument("--q", type=int)
    model.add_argument("--symmetry", help="all, first-row, z2 or an explicit list like '(1,1),(1,3)'")
    model.add_argument("--delta0", type=float)
    model.add_argument("--precision", type=int)
    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--ratios", type=parse_grid, help="R/d values: '0.1,0.2' or 'start:stop:step'")
    grid.add_argument("--ratio", type=float, help="a single R/d")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("model-data", parents=[common, model], help="weights, fusion, S, dimensions and F-symbols")
    hole = sub.add_parser("one-hole", parents=[common, model, grid], help="open vs closed one-hole torus")
    hole.add_argument("--open-level", type=int)
    hole.add_argument("--closed-weight", type=int)
    hole.add_argument("--anomaly-nodes", type=int)
    hole.add_argument("--tolerance", type=float)
    hole.add_argument("--no-anomaly", action="store_true", help="judge the channels without anomaly factors")
    hole.add_argument("--alt-tau", action="store_true", help="use tau = exp(i pi/6)")

    lattice = sub.add_parser("lattice", help="Ising map, RSOS weights, loop check, phase points")
    lsub = lattice.add_subparsers(dest="lattice_command", required=True)
    lsub.add_parser("ising-map", parents=[common, model, grid])
    rsos = lsub.add_parser("rsos-weights", parents=[common, model])
    rsos.add_argument("--ratio", type=float, default=0.25, help="R/d")
    loop = lsub.add_parser("loop-check", parents=[common])
    loop.add_argument("--ratio", type=float, default=0.25, help="R/d setting x(R) when --x is absent")
    loop.add_argument("--p", dest="p_list", help="'3' or '3..5'")
    loop.add_argument("--lattice", default="2x2")
    loop.add_argument("--x", type=float, action="append", help="hopping weight override (repeatable)")
    phase = lsub.add_parser("phase-points", parents=[common])
    phase.add_argument("--p", dest="p_list", default="3..12", help="'3..8' or '3,5'")
    return parser


def _merge(config: RunConfig, args) -> RunConfig:
    for key in ("p", "q", "symmetry", "delta0", "precision", "open_level", "closed_weight", "anomaly_nodes",
                "tolerance", "cache_dir", "out_dir"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)
    if getattr(args, "ratios", None) is not None:
        config.ratios = args.ratios
    if getattr(args, "ratio", None) is not None and getattr(args, "ratios", None) is None and "ratios" in vars(args):
        config.ratios = [args.ratio]
    return config


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    from .lattice import LatticeSizeError
    from .minimal_model import CACHE_ENV, ModelError
    try:
        config = _merge(load_config(args.config), args)
        config.validate()
        if config.cache_dir:
            os.environ[CACHE_ENV] = config.cache_dir
        Path(config.out_dir).mkdir(parents=True, exist_ok=True)
        if args.command == "model-data":
            files = cmd_model_data(config)
        elif args.command == "one-hole":
            files = cmd_one_hole(config, with_anomaly=not args.no_anomaly, alt_tau=args.alt_tau)
        else:
            files = cmd_lattice(config, args.lattice_command, args)
    except (ConfigError, ModelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except LatticeSizeError as exc:
        print(f"size overflow: {exc}", file=sys.stderr)
        return EXIT_SIZE
    for path in files:
        print(path)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
