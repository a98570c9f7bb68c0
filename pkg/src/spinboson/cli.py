"""Command-line harness.

Subcommands map configs to CSV/JSON outputs: `sweep`, `psi-scan`,
`phase-diagram`, `pimc`, `discontinuity`. Settings resolve in the order
flags > SPINBOSON_* environment variables > config file > defaults.
Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from .model import BathParams, ModelParams
from .sweeps import (
    ConfigError,
    GridConfig,
    PHASE_COLUMNS,
    PimcSettings,
    PSI_COLUMNS,
    PsiScanConfig,
    SWEEP_COLUMNS,
    SweepConfig,
    run_phase_diagram,
    run_psi_scan,
    run_sweep,
    write_csv,
)
from .variational import locate_discontinuity

ENV_PREFIX = "SPINBOSON_"


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc


def _section(data: dict, name: str) -> dict:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return value


def _model(data: dict) -> ModelParams:
    s = _section(data, "model")
    try:
        return ModelParams(
            epsilon=float(s.get("epsilon", 1.0)),
            delta=float(s.get("delta", 1.0)),
            beta=float(s.get("beta", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad [model]: {exc}") from exc


def _bath(data: dict) -> BathParams:
    s = _section(data, "bath")
    try:
        return BathParams(
            gamma=float(s.get("gamma", 1.0)),
            omega_c=float(s.get("omega_c", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad [bath]: {exc}") from exc


def _pimc_settings(data: dict, seed_override: int | None) -> PimcSettings:
    s = _section(data, "pimc")
    seed = seed_override if seed_override is not None else int(s.get("seed", 0))
    try:
        return PimcSettings(
            n_steps=int(s.get("n_steps", 256)),
            n_samples=int(s.get("n_samples", 100_000)),
            n_batches=int(s.get("n_batches", 100)),
            seed=seed,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad [pimc]: {exc}") from exc


def _resolve(flag_value, env_name: str, config_value, default, cast):
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_PREFIX + env_name)
    if env is not None:
        try:
            return cast(env)
        except ValueError as exc:
            raise ConfigError(f"bad {ENV_PREFIX}{env_name}={env!r}") from exc
    if config_value is not None:
        return config_value
    return default


def _out_path(args, data: dict) -> str:
    out = _resolve(
        args.out, "OUT", _section(data, "output").get("path"), None, str
    )
    if out is None:
        raise ConfigError("no output path: pass --out or set [output] path")
    return out


def _seed(args) -> int | None:
    return _resolve(args.seed, "SEED", None, None, int)


def _threads(args) -> int:
    threads = _resolve(args.threads, "THREADS", None, 1, int)
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    return threads


def _timestamp(args) -> bool:
    if args.no_header_timestamp:
        return False
    return os.environ.get(ENV_PREFIX + "NO_HEADER_TIMESTAMP") is None


def _float_list(raw, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what}: {exc}") from exc


def _has_errors(rows) -> bool:
    return any(str(row[-1]).startswith("error:") for row in rows)


def _cmd_sweep(args) -> int:
    data = _load_config(args.config)
    s = _section(data, "sweep")
    settings = _pimc_settings(data, _seed(args))
    config = SweepConfig(
        model=_model(data),
        bath=_bath(data),
        variable=str(s.get("variable", "gamma")),
        grid=_float_list(s.get("grid", ()), "[sweep] grid"),
        methods=tuple(str(m) for m in s.get("methods", ())),
        pimc=settings,
    )
    rows = run_sweep(config, threads=_threads(args))
    write_csv(
        _out_path(args, data), SWEEP_COLUMNS, rows,
        timestamp_header=_timestamp(args), seed=settings.seed,
    )
    return 3 if _has_errors(rows) else 0


def _cmd_psi_scan(args) -> int:
    data = _load_config(args.config)
    s = _section(data, "psi_scan")
    config = PsiScanConfig(
        model=_model(data),
        bath=_bath(data),
        gammas=_float_list(s.get("gammas", ()), "[psi_scan] gammas"),
        b_points=int(s.get("b_points", 400)),
    )
    rows = run_psi_scan(config)
    write_csv(
        _out_path(args, data), PSI_COLUMNS, rows,
        timestamp_header=_timestamp(args),
    )
    return 3 if _has_errors(rows) else 0


def _cmd_phase_diagram(args) -> int:
    data = _load_config(args.config)
    s = _section(data, "phase")
    settings = _pimc_settings(data, _seed(args))
    config = GridConfig(
        model=_model(data),
        gamma_grid=_float_list(s.get("gamma_grid", ()), "[phase] gamma_grid"),
        omega_c_grid=_float_list(s.get("omega_c_grid", ()), "[phase] omega_c_grid"),
        methods=tuple(str(m) for m in s.get("methods", ())),
        pimc=settings,
    )
    rows = run_phase_diagram(config, threads=_threads(args))
    write_csv(
        _out_path(args, data), PHASE_COLUMNS, rows,
        timestamp_header=_timestamp(args), seed=settings.seed,
    )
    return 3 if _has_errors(rows) else 0


def _cmd_pimc(args) -> int:
    data = _load_config(args.config)
    settings = _pimc_settings(data, _seed(args))
    config = SweepConfig(
        model=_model(data),
        bath=_bath(data),
        variable="gamma",
        grid=(_bath(data).gamma,),
        methods=("pimc",),
        pimc=settings,
    )
    rows = run_sweep(config, threads=1)
    write_csv(
        _out_path(args, data), SWEEP_COLUMNS, rows,
        timestamp_header=_timestamp(args), seed=settings.seed,
    )
    return 3 if _has_errors(rows) else 0


def _cmd_discontinuity(args) -> int:
    data = _load_config(args.config)
    s = _section(data, "discontinuity")
    model = _model(data)
    bath = _bath(data)
    lo = float(s.get("gamma_lo", 1.0))
    hi = float(s.get("gamma_hi", 20.0))
    if not lo < hi:
        raise ConfigError("[discontinuity] needs gamma_lo < gamma_hi")
    gamma_star = locate_discontinuity(
        model, bath,
        (lo, hi),
        width=float(s.get("width", 1e-3)),
        min_jump=float(s.get("min_jump", 0.1)),
    )
    payload = {
        "epsilon": model.epsilon,
        "delta": model.delta,
        "beta": model.beta,
        "omega_c": bath.omega_c,
        "gamma_lo": lo,
        "gamma_hi": hi,
        "gamma_star": gamma_star,
    }
    with open(_out_path(args, data), "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "psi-scan": _cmd_psi_scan,
    "phase-diagram": _cmd_phase_diagram,
    "pimc": _cmd_pimc,
    "discontinuity": _cmd_discontinuity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinboson",
        description="Equilibrium spin-boson experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=False,
                       default=os.environ.get(ENV_PREFIX + "CONFIG"))
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--no-header-timestamp", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.config is None:
        print("error: --config is required", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
