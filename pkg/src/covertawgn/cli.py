"""Batch front door: plan / divergence / bounds / sweep / simulate / verify.

Every run resolves its settings from (in order of precedence) command-line
flags, a key=value config file, and for the seed the COVERT_SEED environment
variable; the fully resolved config and seed are embedded in every output so
runs are self-describing. Exit codes: 2 config or domain error, 3 numeric
failure, 4 verification gate failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bounds as bd
from . import divergences as dv
from . import planner as pl
from . import simkit as sk
from . import truncgauss as tg
from . import verify as vf
from .errors import ConfigError, CovertError, DomainError, InputError, NumericError

__all__ = ["main", "build_parser"]

_SUBCOMMANDS = ("plan", "divergence", "bounds", "sweep", "simulate", "verify")

# flag name -> (converter, help)
_FLAG_SPEC = {
    "n": (str, "blocklength: single value, comma list, or log grid 'a..b'"),
    "delta": (float, "covertness budget delta in bits"),
    "epsilon": (float, "target error probability (default 0.1)"),
    "mu": (float, "shell truncation ratio in (0,1)"),
    "nu2": (float, "sufficient-corner slack nu^2 >= 1"),
    "eta": (float, "necessary-corner slack eta > 1"),
    "tau": (float, "power-schedule exponent: psi = c * n^-tau"),
    "c": (float, "power-schedule coefficient (default 1.0)"),
    "M": (int, "codebook size"),
    "trials": (int, "Monte-Carlo trials"),
    "seed": (int, "master seed (fallback: config file, then COVERT_SEED, then 0)"),
    "workers": (int, "worker threads (default 1)"),
    "format": (str, "output format: json or csv"),
    "out": (str, "output path (default: stdout)"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertawgn",
        description="Covert-communication planning, bounds, and simulation "
        "on the unit-noise AWGN channel.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value config file; flags win")
        for flag, (_, help_text) in _FLAG_SPEC.items():
            p.add_argument(f"--{flag}", default=None, help=help_text)
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, val = line.partition("=")
                key, val = key.strip(), val.strip()
                if not sep or not key:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
                if key not in _FLAG_SPEC:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                out[key] = val
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return out


def _resolve(args: argparse.Namespace) -> dict:
    """Merge flags over config-file values, convert types, resolve the seed."""
    file_cfg = _read_config_file(args.config) if args.config else {}
    merged: dict = {"subcommand": args.subcommand}
    for flag, (conv, _) in _FLAG_SPEC.items():
        raw = getattr(args, flag)
        if raw is None:
            raw = file_cfg.get(flag)
        if raw is None:
            merged[flag] = None
            continue
        try:
            merged[flag] = conv(raw)
        except ValueError as exc:
            raise ConfigError(f"--{flag}: cannot parse {raw!r}") from exc
    if merged["seed"] is None:
        env = os.environ.get("COVERT_SEED")
        if env is not None:
            try:
                merged["seed"] = int(env)
            except ValueError as exc:
                raise ConfigError(f"COVERT_SEED: cannot parse {env!r}") from exc
        else:
            merged["seed"] = 0
    if merged["workers"] is None:
        merged["workers"] = 1
    if merged["epsilon"] is None:
        merged["epsilon"] = 0.1
    return merged


def _parse_n_grid(text: str) -> np.ndarray:
    """'a..b' -> log grid at 40 points/decade; 'x,y,z' -> list; 'x' -> single."""
    if ".." in text:
        lo_s, _, hi_s = text.partition("..")
        try:
            lo, hi = int(float(lo_s)), int(float(hi_s))
        except ValueError as exc:
            raise ConfigError(f"--n: cannot parse grid {text!r}") from exc
        return bd.default_n_grid(lo, hi)
    try:
        vals = [int(float(tok)) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"--n: cannot parse {text!r}") from exc
    if not vals:
        raise ConfigError("--n: empty grid")
    return np.asarray(vals, dtype=np.int64)


def _single_n(cfg: dict) -> int:
    if cfg["n"] is None:
        raise ConfigError(f"{cfg['subcommand']}: --n is required")
    grid = _parse_n_grid(cfg["n"])
    if grid.size != 1:
        raise ConfigError(f"{cfg['subcommand']}: --n must be a single value")
    return int(grid[0])


def _require(cfg: dict, key: str) -> object:
    if cfg[key] is None:
        raise ConfigError(f"{cfg['subcommand']}: --{key} is required")
    return cfg[key]


def _params(cfg: dict, n: int) -> pl.CovertParams:
    """CovertParams from resolved config, defaulting unset slacks to the
    asymptotic presets."""
    base = pl.CovertParams.defaults(n, float(_require(cfg, "delta")), cfg["epsilon"])
    return pl.CovertParams(
        n=n,
        delta=base.delta,
        epsilon=base.epsilon,
        mu=base.mu if cfg["mu"] is None else cfg["mu"],
        nu_sq=base.nu_sq if cfg["nu2"] is None else cfg["nu2"],
        eta=base.eta if cfg["eta"] is None else cfg["eta"],
    )


def _config_echo(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if v is not None}


def _emit(text: str, cfg: dict) -> None:
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(payload: dict, cfg: dict) -> None:
    _emit(json.dumps({"config": _config_echo(cfg), "result": payload}, indent=2), cfg)


def _want_format(cfg: dict, default: str, allowed: tuple[str, ...]) -> str:
    fmt = cfg["format"] or default
    if fmt not in allowed:
        raise ConfigError(
            f"{cfg['subcommand']}: format {fmt!r} not supported (allowed: {allowed})"
        )
    return fmt


def _cmd_plan(cfg: dict) -> int:
    _want_format(cfg, "json", ("json",))
    plan = pl.plan(_params(cfg, _single_n(cfg)))
    _emit_json(plan.to_dict(), cfg)
    return 0


def _cmd_divergence(cfg: dict) -> int:
    """Closed-form report for the isotropic output law: sigma1^2 = 1 + c n^-tau
    when --tau is given, else 1 + mu * psi_suf at the planned power."""
    _want_format(cfg, "json", ("json",))
    n = _single_n(cfg)
    if cfg["tau"] is not None:
        c = 1.0 if cfg["c"] is None else cfg["c"]
        excess = c * float(n) ** (-cfg["tau"])
    else:
        params = _params(cfg, n)
        excess = params.mu * pl.psi_suf(n, params.delta, params.mu, params.nu_sq)
    report = dv.isotropic_report(dv.IsotropicGaussianPair(n=n, sigma1_sq=1.0 + excess))
    _emit_json(report.to_dict(), cfg)
    return 0


def _cmd_bounds(cfg: dict) -> int:
    fmt = _want_format(cfg, "csv", ("csv", "json"))
    if cfg["n"] is None:
        raise ConfigError("bounds: --n is required")
    grid = _parse_n_grid(cfg["n"])
    delta = float(_require(cfg, "delta"))
    rows = bd.bounds_grid(grid, delta, cfg["epsilon"])
    if fmt == "csv":
        _emit(bd.bounds_csv_text(rows, comments=_config_echo(cfg)), cfg)
    else:
        _emit_json({"rows": [r.to_dict() for r in rows]}, cfg)
    return 0


def _cmd_sweep(cfg: dict) -> int:
    fmt = _want_format(cfg, "csv", ("csv", "json"))
    tau = float(_require(cfg, "tau"))
    c = 1.0 if cfg["c"] is None else cfg["c"]
    grid = _parse_n_grid(cfg["n"]) if cfg["n"] is not None else None
    sweep = bd.asymptotic_sweep(c, tau, grid)
    if fmt == "json":
        _emit_json(sweep.to_dict(), cfg)
        return 0
    lines = [f"# {k}={v}" for k, v in _config_echo(cfg).items()]
    lines.append(f"# classification={sweep.classification}")
    if sweep.plateau_kl_bits is not None:
        lines.append(f"# plateau_kl_bits={sweep.plateau_kl_bits!r}")
    lines.append("n,theta,sigma1_sq,kl_bits,tvd,hellinger_sq")
    for i in range(sweep.n_grid.size):
        theta = c * float(sweep.n_grid[i]) ** (-tau)
        lines.append(
            f"{sweep.n_grid[i]},{theta:.12g},{1.0 + theta:.12g},"
            f"{sweep.kl_bits[i]:.12g},{sweep.tvd[i]:.12g},{sweep.hellinger_sq[i]:.12g}"
        )
    _emit("\n".join(lines), cfg)
    return 0


def _cmd_simulate(cfg: dict) -> int:
    _want_format(cfg, "json", ("json",))
    n = _single_n(cfg)
    mu = cfg["mu"] if cfg["mu"] is not None else 1.0 - 1.0 / (n + 1)
    if cfg["tau"] is not None:
        c = 1.0 if cfg["c"] is None else cfg["c"]
        psi = c * float(n) ** (-cfg["tau"])
    else:
        nu2 = cfg["nu2"] if cfg["nu2"] is not None else pl.nu_lemma_shell(n)
        psi = pl.psi_suf(n, float(_require(cfg, "delta")), mu, nu2)
    spec = tg.TruncatedGaussianSpec(n=n, psi=psi, mu=mu)
    result = sk.simulate(
        spec,
        M=cfg["M"] if cfg["M"] is not None else 4,
        trials=cfg["trials"] if cfg["trials"] is not None else 10_000,
        seed=cfg["seed"],
        workers=cfg["workers"],
    )
    _emit_json(result.to_dict(), cfg)
    return 0


def _cmd_verify(cfg: dict) -> int:
    results = vf.run_all()
    width = max(len(r.name) for r in results)
    print(f"{'#':>2}  {'status':6}  {'runtime':>14}  check")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.criterion:2d}  {status:6}  {r.runtime:7.2f}s/{r.limit:4.0f}s  "
              f"{r.name:{width}}  {r.detail}")
    failed = [r.criterion for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed"
          + (f"; failed: {failed}" if failed else ""))
    if cfg["out"]:
        payload = {
            "config": _config_echo(cfg),
            "result": [
                {
                    "criterion": r.criterion,
                    "name": r.name,
                    "passed": r.passed,
                    "runtime": r.runtime,
                    "detail": r.detail,
                }
                for r in results
            ],
        }
        with open(cfg["out"], "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 4 if failed else 0


_HANDLERS = {
    "plan": _cmd_plan,
    "divergence": _cmd_divergence,
    "bounds": _cmd_bounds,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        return _HANDLERS[args.subcommand](cfg)
    except (ConfigError, InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except CovertError as exc:  # any other package error: treat as config-level
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
