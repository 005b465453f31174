"""Command line interface.

Subcommands:
  run      execute an experiment described by a flat key=value config file
           and write the result table as CSV
  sens     print the exact smooth-sensitivity report of the trimmed mean on
           a file of values (clamped to [a, b] first) as JSON
  release  perform one private release configured by a key=value file

Exit codes: 0 success, 2 infeasible or invalid configuration, 1 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness
from .calibration import default_t_grid, shape_for
from .errors import (
    CalibrationError,
    ContractViolationError,
    InfeasibleError,
    ParameterError,
    PrivacyContractError,
)
from .harness import Algorithm, DataFamily, DataModel, ExperimentSpec
from .mechanism import MechanismConfig, ReleaseRecord, release
from .noise import NoiseFamily, NoiseSpec, calibrate_scale
from .sensitivity import (
    SortedDataset,
    TrimSpec,
    TruncationMode,
    smooth_sensitivity_input_trunc,
)


def read_config(path: str) -> dict:
    """Flat `key = value` lines; blank lines and # comments ignored."""
    cfg = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ParameterError(f"{path}:{lineno}: expected key = value, got {stripped!r}")
            key, _, value = stripped.partition("=")
            cfg[key.strip()] = value.strip()
    return cfg


def read_values(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    tokens = [tok for chunk in text.split() for tok in chunk.split(",") if tok]
    if not tokens:
        raise ParameterError(f"{path}: no numeric values found")
    return np.asarray([float(tok) for tok in tokens])


def _spec_from_config(cfg: dict, seed_override=None, paper_scale=False) -> ExperimentSpec:
    data = DataModel(
        family=DataFamily(cfg.get("data_family", "gaussian")),
        mu=float(cfg.get("data_mu", 0.0)),
        sigma2=float(cfg.get("data_sigma2", 1.0)),
        scale=float(cfg.get("data_scale", 1.0)),
        mix_sigma2=float(cfg.get("data_mix_sigma2", 9.0)),
        mix_weight=float(cfg.get("data_mix_weight", 0.9)),
    )
    reps = 1_000_000 if paper_scale else int(cfg.get("reps", 10_000))
    t_grid = default_t_grid(
        int(cfg.get("t_grid_count", 150)),
        float(cfg.get("t_min", 1e-9)),
        float(cfg.get("t_max", 9.0)),
    )
    return ExperimentSpec(
        data=data,
        n=int(cfg["n"]),
        reps=reps,
        eps=float(cfg.get("eps", 1.0)),
        algorithms=tuple(
            Algorithm(name.strip()) for name in cfg.get("algorithms", "lln").split(",") if name.strip()
        ),
        m_grid=tuple(int(v) for v in cfg["m_grid"].split(",")),
        a=float(cfg["a"]),
        b=float(cfg["b"]),
        seed=int(seed_override if seed_override is not None else cfg.get("seed", 0)),
        t_grid=t_grid,
        mode=TruncationMode(cfg.get("mode", "input")),
        delta=float(cfg.get("delta", harness.DEFAULT_DELTA)),
        omega=float(cfg.get("omega", harness.DEFAULT_OMEGA)),
    )


def _cmd_run(args) -> int:
    cfg = read_config(args.config)
    spec = _spec_from_config(cfg, seed_override=args.seed, paper_scale=args.paper_scale)
    result = harness.run_experiment(spec, threads=args.threads)
    harness.emit_csv(result, args.out)
    return 0


def _cmd_sens(args) -> int:
    values = np.clip(read_values(args.data), args.a, args.b)
    spec = TrimSpec(m=args.m, a=args.a, b=args.b, mode=TruncationMode.INPUT)
    report = smooth_sensitivity_input_trunc(SortedDataset(values), spec, args.t)
    json.dump(report.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_release(args) -> int:
    cfg = read_config(args.config)
    values = read_values(args.data)
    family = NoiseFamily(cfg["family"])
    eps = float(cfg["eps"])
    t = float(cfg["t"])
    delta = float(cfg.get("delta", harness.DEFAULT_DELTA))
    omega = float(cfg.get("omega", harness.DEFAULT_OMEGA))
    shape = float(cfg["shape"]) if "shape" in cfg else shape_for(family, eps, t)
    spec = NoiseSpec(family, shape)
    s = float(cfg["s"]) if "s" in cfg else calibrate_scale(spec, t, eps, delta=delta, omega=omega)
    trim = TrimSpec(
        m=int(cfg["m"]),
        a=float(cfg["a"]),
        b=float(cfg["b"]),
        mode=TruncationMode(cfg.get("mode", "input")),
    )
    alg = Algorithm(family.value)
    config = MechanismConfig(
        noise=spec, trim=trim, t=t, s=s,
        budget=harness.paired_budget(alg, eps, delta=delta, omega=omega),
    )
    record: ReleaseRecord = release(config, values, seed=int(cfg.get("seed", 0)))
    json.dump(record.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="privtrim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and emit CSV")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--paper-scale", action="store_true",
                       help="use 10^6 replicates regardless of the config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.set_defaults(fn=_cmd_run)

    p_sens = sub.add_parser("sens", help="smooth sensitivity report as JSON")
    p_sens.add_argument("--data", required=True, help="file of numeric values")
    p_sens.add_argument("--m", type=int, required=True)
    p_sens.add_argument("--t", type=float, required=True)
    p_sens.add_argument("--a", type=float, required=True)
    p_sens.add_argument("--b", type=float, required=True)
    p_sens.set_defaults(fn=_cmd_sens)

    p_rel = sub.add_parser("release", help="one private release as JSON")
    p_rel.add_argument("--config", required=True)
    p_rel.add_argument("--data", required=True)
    p_rel.set_defaults(fn=_cmd_release)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InfeasibleError, CalibrationError, ParameterError,
            PrivacyContractError, ContractViolationError, KeyError, ValueError) as exc:
        print(f"infeasible configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
