"""Command-line front end: ``lez <command> [options]``.

Traces are written as CSV (17 significant digits, fixed headers), scalars
and fits as JSON carrying a ``schema_version``.  Options can also come from
a JSON file given with ``--config``; explicit flags override it.  Times are
in units of hbar / J.

Exit codes: 0 success, 2 invalid input, 3 no root / no solution, 4 solver
failure.  Failures print an error JSON to stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import critical, dtop, exact, loschmidt, models
from .errors import LezError, NoRealSolution, NoRootInRange, NotAtCriticalRate, ValidationError

SCHEMA_VERSION = 1
UNITS = "times in hbar/J (J = 1); energies in J; angles in radians"

EXIT_OK, EXIT_VALIDATION, EXIT_NO_ROOT, EXIT_SOLVER = 0, 2, 3, 4

# Option defaults; a --config file overrides these and flags override both.
DEFAULTS = {
    "model": "tfim",
    "hi": 0.5,
    "hf": 1.5,
    "kappa": 1.0,
    "t1": 1.0,
    "t2": 1.0,
    "M": 0.0,
    "theta_i": 0.0,
    "theta_f": math.pi / 2,
    "N": 50,
    "Lx": 50,
    "Ly": 50,
    "tau": 1.0,
    "k_index": None,
    "k": None,
    "tf_max": 20.0,
    "tf_step": loschmidt.DEFAULT_TF_STEP,
    "tol": 1e-10,
    "tau_min": None,
    "tau_max": None,
    "sizes": "10..100:10",
    "target_tau": None,
    "convention": None,
    "out": None,
    "emit_gnuplot": False,
}


def _package_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def fmt(x) -> str:
    """Float formatting used for every CSV cell."""
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(payload: dict) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr."""
    body = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(_jsonable(body), sort_keys=True, indent=2) + "\n"


@dataclass
class RunConfig:
    """Merged options of one invocation (defaults < config file < flags)."""

    command: str
    options: dict

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        opts = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
        if getattr(args, "config", None):
            path = Path(args.config)
            try:
                loaded = json.loads(path.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read config {path}: {exc}") from exc
            if not isinstance(loaded, dict):
                raise ValidationError("config file must hold a JSON object")
            unknown = set(loaded) - set(DEFAULTS)
            if unknown:
                raise ValidationError(f"unknown config keys: {sorted(unknown)}")
            opts.update({k.replace("-", "_"): v for k, v in loaded.items()})
        for key, value in vars(args).items():
            if key in ("command", "config", "func") or value is None:
                continue
            if key == "emit_gnuplot" and value is False:
                continue
            opts[key] = value
        cfg = cls(args.command, opts)
        cfg.validate()
        return cfg

    def validate(self):
        o = self.options
        if o["model"] not in ("tfim", "xy", "haldane"):
            raise ValidationError(f"unknown model {o['model']!r}")
        for key in ("N", "Lx", "Ly"):
            if int(o[key]) != o[key] or o[key] < 1:
                raise ValidationError(f"{key} must be a positive integer")
            o[key] = int(o[key])
        if o["N"] % 2:
            raise ValidationError(f"N must be even, got {o['N']}")
        if not o["tf_step"] > 0 or not o["tf_max"] >= 0:
            raise ValidationError("need tf_step > 0 and tf_max >= 0")
        if not o["tol"] > 0:
            raise ValidationError("tol must be positive")
        if o["emit_gnuplot"] and not o["out"]:
            raise ValidationError("--emit-gnuplot needs --out")

    # -- model construction -------------------------------------------------

    def pair(self):
        """(initial, final) model parameters."""
        o = self.options
        if o["model"] == "tfim":
            return models.TfimParams(o["hi"]), models.TfimParams(o["hf"])
        if o["model"] == "xy":
            return models.XyParams(o["kappa"], o["hi"]), models.XyParams(o["kappa"], o["hf"])
        conv = models.haldane_convention(o["convention"]) if o["convention"] else models.DEFAULT_HALDANE_CONVENTION
        base = models.HaldaneParams(o["t1"], o["t2"], o["theta_i"], o["M"], conv)
        return base, base.with_drive(o["theta_f"])

    def grid(self, convention=None):
        if self.model == "haldane":
            conv = convention or self.pair()[0].convention
            return models.haldane_grid(self.Lx, self.Ly, conv)
        return models.chain_grid(self.N)

    def tau_range(self, fallback):
        lo = self.tau_min if self.tau_min is not None else fallback[0]
        hi = self.tau_max if self.tau_max is not None else fallback[1]
        return (float(lo), float(hi))

    def parameters(self) -> dict:
        keys = {"tfim": ("hi", "hf"), "xy": ("kappa", "hi", "hf"),
                "haldane": ("t1", "t2", "M", "theta_i", "theta_f", "convention")}[self.model]
        out = {"model": self.model, **{k: self.options[k] for k in keys}}
        if self.model == "haldane":
            out.update(Lx=self.Lx, Ly=self.Ly, convention=self.pair()[0].convention.name)
        else:
            out["N"] = self.N
        return out

    def metadata(self, **extra) -> dict:
        return {
            "command": self.command,
            "artifact_version": _package_version(),
            "units": UNITS,
            "parameters": self.parameters(),
            "tol": self.tol,
            **extra,
        }


# -- output helpers -------------------------------------------------------------


def _emit_json(cfg: RunConfig, payload: dict):
    text = dumps(payload)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_csv(cfg: RunConfig, header, columns, meta: dict, gnuplot_using: str | None = None):
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    meta_text = dumps({"metadata": meta, "columns": list(header)})
    if cfg.out:
        out = Path(cfg.out)
        out.write_text(text)
        Path(str(out) + ".meta.json").write_text(meta_text)
        if cfg.emit_gnuplot and gnuplot_using:
            Path(str(out) + ".gp").write_text(
                "set datafile separator ','\n"
                f"set xlabel '{header[0]}'\n"
                f"plot '{out.name}' every ::1 using {gnuplot_using} with lines title '{cfg.command}'\n"
            )
    else:
        sys.stdout.write(text)
        sys.stderr.write(meta_text)


def _t_grid(cfg: RunConfig) -> np.ndarray:
    return loschmidt.tf_grid(cfg.tf_max, cfg.tf_step)


def _mode_k(cfg: RunConfig):
    if cfg.k_index is not None:
        return models.chain_mode(cfg.N, int(cfg.k_index))
    if cfg.k is not None:
        return float(cfg.k)
    raise ValidationError("give --k-index (mode j of k = (2j-1) pi / N) or --k")


def _result_payload(res: critical.CriticalRateResult) -> dict:
    return {
        "k": res.k,
        "tau_c": res.tau_c,
        "residual": res.residual,
        "phi": res.phi,
        "period": res.train.period,
        "t_c": res.train.times,
        "bracket": list(res.bracket),
    }


# -- commands -------------------------------------------------------------------


def cmd_rate_scan(cfg: RunConfig):
    initial, final = cfg.pair()
    coeffs = loschmidt.quench_coefficients(initial, final, cfg.tau, cfg.grid(), tol=cfg.tol)
    trace = loschmidt.rate_trace(coeffs, _t_grid(cfg))
    rate = [("inf" if z else r) for r, z in zip(trace.rate, trace.exact_zero)]
    _emit_csv(cfg, ("t_f", "echo", "rate", "exact_zero"),
              (trace.t, trace.echo, rate, [str(int(z)) for z in trace.exact_zero]),
              cfg.metadata(tau=cfg.tau, tf_max=cfg.tf_max, tf_step=cfg.tf_step,
                           exact_zero_samples=int(trace.exact_zero.sum())),
              gnuplot_using="1:3")


def cmd_find_tau(cfg: RunConfig):
    if cfg.model == "haldane":
        return cmd_haldane(cfg)
    initial, final = cfg.pair()
    k = _mode_k(cfg)
    res = critical.find_tau_c(initial, final, k, tau_range=cfg.tau_range(critical.DEFAULT_TAU_RANGE), tol=cfg.tol)
    _emit_json(cfg, {"result": _result_payload(res), "metadata": cfg.metadata(k_index=cfg.k_index)})


def cmd_ks(cfg: RunConfig):
    _emit_json(cfg, {"k_s": critical.sudden_ks(cfg.hi, cfg.hf), "metadata": {"units": UNITS, "hi": cfg.hi, "hf": cfg.hf}})


def parse_sizes(text) -> list[int]:
    """``"10..100:10"`` -> [10, 20, ..., 100]; also accepts ``"10,20,30"`` or a list."""
    if isinstance(text, (list, tuple)):
        return [int(s) for s in text]
    text = str(text).strip()
    try:
        if ".." in text:
            rng, _, step = text.partition(":")
            lo, hi = rng.split("..")
            return list(range(int(lo), int(hi) + 1, int(step or 1)))
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad size list {text!r}") from exc


def cmd_scaling(cfg: RunConfig):
    if cfg.model == "haldane":
        raise ValidationError("scaling supports the chain models only")
    initial, final = cfg.pair()
    sizes = parse_sizes(cfg.sizes)
    fit = critical.scaling_fit(initial, final, sizes)
    _emit_json(cfg, {
        "prefactor": fit.prefactor,
        "exponent": fit.exponent,
        "rms_loglog": fit.rms,
        "sizes": fit.sizes,
        "tau_max": fit.taus,
        "metadata": {**cfg.metadata(), "parameters": {k: v for k, v in cfg.parameters().items() if k != "N"}},
    })


def cmd_dtop(cfg: RunConfig):
    if cfg.model == "haldane":
        raise ValidationError("dtop supports the chain models only")
    initial, final = cfg.pair()
    coeffs = loschmidt.quench_coefficients(initial, final, cfg.tau, cfg.grid(), tol=cfg.tol)
    trace = dtop.dtop_trace(coeffs, _t_grid(cfg))
    _emit_csv(cfg, ("t_f", "nu", "winding"), (trace.t, trace.nu, [str(w) for w in trace.winding]),
              cfg.metadata(tau=cfg.tau, tf_max=cfg.tf_max, tf_step=cfg.tf_step), gnuplot_using="1:2")


def cmd_oracle_check(cfg: RunConfig):
    if cfg.model == "haldane":
        raise ValidationError("the many-body oracle covers the chain models only")
    initial, final = cfg.pair()
    t = _t_grid(cfg)
    kappa = cfg.kappa if cfg.model == "xy" else 1.0
    ref = exact.exact_loschmidt(cfg.N, cfg.hi, cfg.hf, cfg.tau, t, kappa=kappa)
    coeffs = loschmidt.quench_coefficients(initial, final, cfg.tau, cfg.grid(), tol=cfg.tol)
    prod = loschmidt.loschmidt_amplitude_sq(coeffs, t)
    _emit_json(cfg, {
        "max_abs_dev": float(np.max(np.abs(prod - ref.echo))),
        "ramp_step": ref.step,
        "halvings": ref.halvings,
        "norm_drift": ref.norm_drift,
        "metadata": cfg.metadata(tau=cfg.tau, tf_max=cfg.tf_max, tf_step=cfg.tf_step),
    })


def cmd_xy_modes(cfg: RunConfig):
    ks = critical.xy_lez_modes(cfg.kappa, cfg.hi, cfg.hf, cfg.N,
                               tau_range=cfg.tau_range(critical.DEFAULT_TAU_RANGE))
    idx = [int(round((k * cfg.N / math.pi + 1) / 2)) for k in ks]
    cfg.options["model"] = "xy"
    _emit_json(cfg, {"k": ks, "k_index": idx, "k_over_pi_times_N": [2 * j - 1 for j in idx],
                     "metadata": cfg.metadata()})


def _parse_k2(value):
    if value is None:
        return np.array([4 * math.sqrt(3) * math.pi / 15, 2 * math.pi / 3])
    if isinstance(value, str):
        parts = value.split(",")
    else:
        parts = list(value)
    if len(parts) != 2:
        raise ValidationError("Haldane --k takes 'kx,ky'")
    return np.array([float(p) for p in parts])


def cmd_haldane(cfg: RunConfig):
    cfg.options["model"] = "haldane"
    initial, final = cfg.pair()
    k = _parse_k2(cfg.k)
    tau_range = cfg.tau_range((1e-2, 1e2))
    L = (cfg.Lx, cfg.Ly)
    if cfg.target_tau is not None and cfg.convention is None:
        conv, res, log = critical.select_haldane_convention(initial, final, k, float(cfg.target_tau),
                                                            L=L, tau_range=tau_range)
        if conv is None:
            raise NoRootInRange(f"no lattice convention reproduces tau={cfg.target_tau}: {log}")
        cfg.options["convention"] = conv.name
    else:
        res = critical.haldane_find_tau(initial, final, k, L=L, tau_range=tau_range, tol=cfg.tol)
        log = [{"convention": initial.convention.name, "tau_c": res.tau_c}]
    _, mn, _ = models.locate_on_haldane_grid(k, cfg.Lx, cfg.Ly, cfg.pair()[0].convention)
    _emit_json(cfg, {"result": _result_payload(res), "grid_index": list(mn),
                     "metadata": cfg.metadata(convention_search=log)})


def cmd_phase_boundary(cfg: RunConfig):
    _emit_json(cfg, {"theta": models.haldane_phase_boundary(cfg.t2, cfg.M),
                     "metadata": {"units": UNITS, "t2": cfg.t2, "M": cfg.M}})


# -- parser -------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *groups):
    if "model" in groups:
        p.add_argument("--model", choices=("tfim", "xy", "haldane"))
        p.add_argument("--hi", type=float, help="initial transverse field")
        p.add_argument("--hf", type=float, help="final transverse field")
        p.add_argument("--kappa", type=float, help="XY anisotropy")
        p.add_argument("--t1", type=float)
        p.add_argument("--t2", type=float)
        p.add_argument("--M", type=float, help="Haldane sublattice potential")
        p.add_argument("--theta-i", type=float)
        p.add_argument("--theta-f", type=float)
        p.add_argument("--convention", help="Haldane lattice convention name")
        p.add_argument("--N", type=int, help="chain length (even)")
        p.add_argument("--Lx", type=int)
        p.add_argument("--Ly", type=int)
        p.add_argument("--tol", type=float, help="ODE tolerance")
    if "tau" in groups:
        p.add_argument("--tau", type=float, help="ramp duration")
    if "mode" in groups:
        p.add_argument("--k-index", type=int, help="mode j of k = (2j-1) pi / N, from 1")
        p.add_argument("--k", help="explicit momentum (chains) or 'kx,ky' (Haldane)")
        p.add_argument("--tau-min", type=float)
        p.add_argument("--tau-max", type=float)
    if "time" in groups:
        p.add_argument("--tf-max", type=float, help="last hold time")
        p.add_argument("--tf-step", type=float, help="hold-time step")
        p.add_argument("--emit-gnuplot", action="store_true", help="write <out>.gp next to the CSV")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--config", help="JSON file of option defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lez", description="Loschmidt echo zeros under a linear-ramp quench.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate-scan", help="rate function trace (CSV)")
    _common(p, "model", "tau", "time")
    p.set_defaults(func=cmd_rate_scan)

    p = sub.add_parser("find-tau", help="critical ramp duration of one mode (JSON)")
    _common(p, "model", "mode")
    p.set_defaults(func=cmd_find_tau)

    p = sub.add_parser("ks", help="sudden-quench LEZ momentum (JSON)")
    p.add_argument("hi", type=float)
    p.add_argument("hf", type=float)
    _common(p)
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("scaling", help="fit tau_max(N) = a N^b (JSON)")
    p.add_argument("model", choices=("tfim", "xy"))
    p.add_argument("hi", type=float)
    p.add_argument("hf", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--sizes", help="LO..HI:STEP or comma list")
    _common(p)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("dtop", help="dynamical topological order parameter trace (CSV)")
    _common(p, "model", "tau", "time")
    p.set_defaults(func=cmd_dtop)

    p = sub.add_parser("oracle-check", help="compare with the many-body reference (JSON)")
    _common(p, "model", "tau", "time")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("xy-modes", help="LEZ-tunable XY momenta (JSON)")
    _common(p, "model", "mode")
    p.set_defaults(func=cmd_xy_modes)

    p = sub.add_parser("haldane", help="critical ramp duration of a Haldane mode (JSON)")
    _common(p, "model", "mode")
    p.add_argument("--target-tau", type=float, help="search lattice conventions for this duration")
    p.set_defaults(func=cmd_haldane)

    p = sub.add_parser("phase-boundary", help="Haldane critical angles (JSON)")
    p.add_argument("--t2", type=float)
    p.add_argument("--M", type=float)
    _common(p)
    p.set_defaults(func=cmd_phase_boundary)
    return parser


# per-command defaults layered under the config file
COMMAND_DEFAULTS = {
    "oracle-check": {"N": 8, "tf_max": 10.0, "tf_step": 0.01},
    "haldane": {"M": 4.5, "tau_min": 1e-2, "tau_max": 1e2},
    "phase-boundary": {"M": 4.5},
    "dtop": {"tau": 1.0, "tf_max": 12.0},
}


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (NoRootInRange, NoRealSolution)):
        return EXIT_NO_ROOT
    if isinstance(exc, (ValidationError, NotAtCriticalRate)):
        return EXIT_VALIDATION
    return EXIT_SOLVER


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(RunConfig.from_args(args))
    except (LezError, ValueError, ArithmeticError) as exc:
        code = _exit_code(exc) if isinstance(exc, LezError) else (
            EXIT_VALIDATION if isinstance(exc, ValueError) else EXIT_SOLVER)
        sys.stdout.write(dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}))
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
