"""Command line: ``hypersite verify|decompose|simulate|scan --config PATH``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import decomposition as dec
from .dynamics import McOptions, MinimizeOptions, minimize, minimize_with_restarts, run_metropolis, Trace
from .errors import ConfigurationError, PreconditionError, UnsupportedFeatureError
from .io import RunConfig, dumps, parse_config, read_config, write_outputs
from .lattice import LatticeKind, build_lattice
from .observables import constraint_residuals, heisenberg_energy
from .scaling import ScanSchedule, affleck_scan, fit_slope
from .spins import SpinConfiguration, random_config, reference_config
from .verify import KINDS, run_identity_suite

log = logging.getLogger("hypersite")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _fieldmap_payload(fm: dec.FieldMap, fmt: str) -> tuple[str, str]:
    return ("fieldmap.csv", fm.to_csv()) if fmt == "csv" else ("fieldmap.json", fm.to_json())


def _report_payloads(prefix: str, report, fmt: str) -> dict[str, str]:
    out = {f"{prefix}_summary.json": report.to_json()}
    if fmt == "csv":
        out[f"{prefix}.csv"] = report.to_csv()
    return out


def run_verify(cfg: RunConfig) -> int:
    sec = cfg.section("verify")
    kinds = [LatticeKind.parse(k) for k in sec.get("kinds", [k.value for k in KINDS])]
    step = cfg.lattice.step if cfg.lattice is not None else float(sec.get("step", 1.0))
    result = run_identity_suite(n=int(sec.get("samples", 10_000)), seed=cfg.seed, nu=cfg.nu,
                                step=step, tolerance=cfg.tolerance, kinds=kinds)
    payloads = {"verify_summary.json": dumps(result.summary())}
    for kind, rep in result.identities.items():
        payloads.update(_report_payloads(f"{kind}_residuals", rep, cfg.fmt))
    write_outputs(cfg.out_dir, payloads)

    for group, variants in result.discrepancies.items():
        line = ", ".join(f"{v}={r:.3e}" for v, r in variants.items())
        print(f"{group}: {line}")
    failures = result.failures()
    for f in failures:
        print(f"FAIL {f}")
    print("verify:", "passed" if not failures else f"{len(failures)} failure(s)")
    return EXIT_OK if not failures else EXIT_FAIL


def _load_spins(cfg: RunConfig, path: str) -> SpinConfiguration:
    p = cfg.resolve(path)
    try:
        return SpinConfiguration.from_json(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read spin configuration {p}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _outputs_for(cfg: RunConfig, config: SpinConfiguration):
    gauge = cfg.gauge_angles(config.lattice.n_hyper)
    fm = dec.decompose(config, gauge)
    residuals = constraint_residuals(config, gauge)
    name, text = _fieldmap_payload(fm, cfg.fmt)
    return {name: text, **_report_payloads("residuals", residuals, cfg.fmt)}, fm


def run_decompose(cfg: RunConfig) -> int:
    sec = cfg.section("decompose")
    if "input" not in sec:
        raise ConfigurationError("field 'decompose.input' is required")
    config = _load_spins(cfg, sec["input"])
    payloads, _ = _outputs_for(cfg, config)
    write_outputs(cfg.out_dir, payloads)
    return EXIT_OK


def _initial(cfg: RunConfig, lattice, init: dict) -> SpinConfiguration:
    family = init.get("family", "random")
    if family == "random":
        return random_config(lattice, cfg.nu, int(init.get("seed", cfg.seed)))
    if family == "file":
        return _load_spins(cfg, init["path"])
    params = {k: v for k, v in init.items() if k != "family"}
    return reference_config(lattice, cfg.nu, family, **params)


def run_simulate(cfg: RunConfig) -> int:
    sec = cfg.section("simulate")
    lattice = build_lattice(cfg.lattice)
    init = sec.get("initial", {"family": "random"})
    start = _initial(cfg, lattice, init)
    config = start
    trace = Trace(energies=[heisenberg_energy(config, cfg.J)], converged=True)

    if "minimize" in sec:
        m = sec["minimize"]
        opts = MinimizeOptions(int(m.get("max_sweeps", 10000)), float(m.get("energy_tol", 1e-10)),
                               int(m.get("rng_seed", cfg.seed)), cfg.parallel)
        restarts = int(sec.get("restarts", 1))
        if restarts > 1 and init.get("family", "random") == "random":
            config, trace = minimize_with_restarts(lattice, cfg.nu, cfg.J, opts, restarts,
                                                   int(init.get("seed", cfg.seed)))
        else:
            config, trace = minimize(config, cfg.J, opts)
    if "metropolis" in sec:
        mc = sec["metropolis"]
        opts = McOptions(float(mc.get("beta", 1.0)), int(mc.get("sweeps", 100)),
                         float(mc.get("proposal_angle", 0.5)), int(mc.get("rng_seed", cfg.seed)),
                         cfg.parallel)
        config, mc_trace = run_metropolis(config, cfg.J, opts)
        trace = Trace(trace.energies + mc_trace.energies[1:],
                      [float("nan")] * (len(trace.energies) - 1) + mc_trace.acceptance,
                      trace.converged)

    payloads, fm = _outputs_for(cfg, config)
    energy = heisenberg_energy(config, cfg.J)
    n = fm.fields.n
    summary = {
        "kind": lattice.kind.value,
        "n_sites": lattice.n_sites,
        "nu": cfg.nu,
        "J": cfg.J,
        "energy": energy,
        "energy_per_site": energy / lattice.n_sites,
        "converged": trace.converged,
        "sweeps": len(trace.energies) - 1,
        "mean_abs_n": float(np.mean(np.sqrt(np.real(np.sum(n * np.conj(n), axis=-1))))),
        "max_abs_nude_chi": float(np.max(np.abs(fm.fields.nude_chi))),
    }
    payloads.update({
        "initial_spins.json": start.to_json(),
        "final_spins.json": config.to_json(),
        "energy_trace.csv": trace.to_csv(),
        "summary.json": dumps(summary),
    })
    write_outputs(cfg.out_dir, payloads)
    print(json.dumps(summary))
    return EXIT_OK


def run_scan(cfg: RunConfig) -> int:
    sec = cfg.section("scan")
    kappa = float(sec.get("kappa", 0.1))
    u = tuple(sec.get("u", (0.0, 0.0, 1.0)))
    if "steps" in sec:
        schedule = ScanSchedule(list(map(float, sec["steps"])), list(map(float, sec.get("spins", []))), kappa, u=u)
    else:
        schedule = ScanSchedule.geometric(int(sec.get("points", 6)), kappa, float(sec.get("s0", 1.0)), u=u)
    table = affleck_scan(cfg.lattice.kind, schedule, cfg.lattice.extent)
    summary = table.summary()
    try:
        summary["fitted_slope"] = fit_slope(table)
    except ConfigurationError as exc:
        summary["fit_error"] = str(exc)
    payloads = {"scan.csv": table.to_csv(), "scan_summary.json": dumps(summary)}
    if cfg.fmt == "json":
        payloads["scan.json"] = dumps(table.rows)
    write_outputs(cfg.out_dir, payloads)
    print(json.dumps(summary))
    return EXIT_OK


RUNNERS = {"verify": run_verify, "decompose": run_decompose, "simulate": run_simulate, "scan": run_scan}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypersite", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--tol", type=float, help="override the verification tolerance")
        p.add_argument("--out", type=Path, help="override the output directory")
        p.add_argument("--format", choices=("csv", "json"), help="tabular output format")
        p.add_argument("--parallel", action="store_true", help="use the checkerboard sweep variants")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.config is not None:
            cfg = read_config(args.config, args.command)
        elif args.command == "verify":
            cfg = parse_config({"command": "verify"}, "verify")
        else:
            raise ConfigurationError(f"{args.command} needs --config")
        if args.seed is not None:
            cfg.seed = args.seed
        if args.tol is not None:
            if not args.tol > 0:
                raise ConfigurationError("--tol must be positive")
            cfg.tolerance = args.tol
        if args.out is not None:
            cfg.out_dir = args.out
        if args.format is not None:
            cfg.fmt = args.format
        cfg.parallel = cfg.parallel or args.parallel
        return RUNNERS[cfg.command](cfg)
    except (ConfigurationError, UnsupportedFeatureError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
