"""Batch experiment driver.

Subcommands:

    simulate   config.json          chain run -> spectrum/drift/checkpoint
    spectrum   run_dir [--pair] [--parity odd] [-o out.csv]
    fit        spectrum.csv [--kind ...] [--k-min --k-max --parity]
    nls        config.json          pure field evolution -> snapshots
    compare    config.json          lattice vs field error series / N-sweep
    correction config.json          predicted first-order correction spectra
    sweep      config.json          fan out simulate over a parameter list

Exit codes: 0 success, 2 configuration error, 3 numerical abort
(non-finite state), 4 fit failure, 1 anything else.  The sweep worker
pool size honours the KGCHAIN_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import copy
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .compare import ratio_table, run_comparison, scaling_sweep
from .correction import complex_mode_coeffs, phi_field, z10
from .integrate import NonFiniteStateError, integrate
from .lattice import ContractError, PBC, SiteState, eval_energy
from .nls import evolve_to, nls_invariants
from .observables import (
    CrossoverResult,
    EXPONENTIAL,
    EnergyDriftObserver,
    FitError,
    ModeEnergyObserver,
    POWERLAW,
    detect_crossover,
    fit_decay,
    pair_average,
)
from .runcfg import (
    ConfigError,
    build_integrator,
    build_params,
    config_hash,
    initial_state,
    load_config,
    read_csv,
    save_checkpoint,
    slow_field_from_config,
    write_csv,
    write_json,
    write_manifest,
)
from .spectral import frequencies, omega_of


def _outdir(cfg: dict) -> Path:
    try:
        return Path(cfg["output_dir"])
    except KeyError:
        raise ConfigError("missing config.output_dir")


def _norm_list(cfg: dict):
    obs = cfg.get("observables", {})
    norms = obs.get("norms", [[2.0, 0.0], [2.4, 0.0], [1.0, 0.05]])
    return tuple((float(s), float(sig)) for s, sig in norms)


def _norm_col(key) -> str:
    return f"norm_s{key[0]:g}_sig{key[1]:g}"


def run_simulate(cfg: dict) -> Path:
    params = build_params(cfg)
    icfg = build_integrator(cfg, params)
    state, _ = initial_state(cfg, params)
    outdir = _outdir(cfg)
    h = config_hash(cfg)

    obs_cfg = cfg.get("observables", {})
    energies = ModeEnergyObserver(params, discard=float(obs_cfg.get("discard", 0.0)))
    drift = EnergyDriftObserver(lambda p, q: eval_energy(params, SiteState(p, q)))

    ckpt_dir = outdir / "checkpoints"
    counter = [0]

    def checkpointer(t, p, q):
        save_checkpoint(ckpt_dir / f"ckpt_{counter[0]:06d}.npz", h, SiteState(p, q, t))
        counter[0] += 1

    final = integrate(
        params, state, icfg, observers=(energies, drift),
        checkpointer=checkpointer if icfg.checkpoint_every else None,
    )

    spec = energies.spectrum
    freqs = frequencies(params)
    meta = {"kgchain": "spectrum v1", "config_hash": h, "bc": params.bc,
            "N": params.N, "t_accum": repr(spec.t_accum)}
    artifacts = ["spectrum.csv", "drift.csv", "final_state.npz", "manifest.json"]
    write_csv(outdir / "spectrum.csv", meta,
              {"k": spec.k, "omega_k": freqs.omega, "E_avg": spec.e_avg,
               "t_accum": np.full(spec.k.size, spec.t_accum)})
    if params.bc == PBC:
        paired = pair_average(spec)
        write_csv(outdir / "spectrum_pair.csv",
                  {**meta, "kgchain": "spectrum-pair v1"},
                  {"k": paired.k, "omega_k": omega_of(params, paired.k),
                   "E_avg": paired.e_avg,
                   "t_accum": np.full(paired.k.size, paired.t_accum)})
        artifacts.append("spectrum_pair.csv")
    e0 = drift.energies[0]
    write_csv(outdir / "drift.csv", {"kgchain": "drift v1", "config_hash": h},
              {"t": np.asarray(drift.times),
               "H": np.asarray(drift.energies),
               "rel_drift": np.abs(np.asarray(drift.energies) - e0) / abs(e0)})
    save_checkpoint(outdir / "final_state.npz", h, final)
    write_manifest(outdir, cfg, artifacts)
    return outdir


def cmd_simulate(args) -> int:
    run_simulate(load_config(args.config))
    return 0


def cmd_spectrum(args) -> int:
    run_dir = Path(args.run_dir)
    comments, cols = read_csv(run_dir / "spectrum.csv")
    k = cols["k"].astype(int)
    e = cols["E_avg"]
    omega = cols["omega_k"]
    if args.pair:
        if comments.get("bc") != PBC:
            raise ConfigError("--pair needs a PBC spectrum")
        n = int(comments["N"])
        sin_e = e[1 : 2 * n + 1 : 2]
        cos_e = e[2 : 2 * n + 2 : 2]
        k = np.arange(0, n + 2)
        e = np.concatenate([[e[0]], 0.5 * (sin_e + cos_e), [e[-1]]])
        omega = np.concatenate([[omega[0]], omega[1 : 2 * n + 1 : 2], [omega[-1]]])
    if args.parity:
        keep = (k % 2 == 1) if args.parity == "odd" else (k % 2 == 0)
        k, e, omega = k[keep], e[keep], omega[keep]
    out = Path(args.output) if args.output else run_dir / "spectrum_view.csv"
    write_csv(out, {**{key: comments[key] for key in ("config_hash", "bc", "N")
                       if key in comments},
                    "kgchain": "spectrum-view v1",
                    "pair": str(bool(args.pair)), "parity": args.parity or "all"},
              {"k": k, "omega_k": omega, "E_avg": e})
    return 0


def _fit_report(result, comments) -> dict:
    if isinstance(result, CrossoverResult):
        doc = {
            "kind": "crossover",
            "k_star": result.k_star,
            "crossover_energy": result.e_star,
            "improvement": result.improvement,
            "single_residual": result.single_residual,
            "head": _fit_report(result.head, {}),
        }
        if result.tail is not None:
            doc["tail"] = _fit_report(result.tail, {})
    else:
        doc = {
            "kind": result.kind,
            "slope": result.slope,
            "intercept": result.intercept,
            "window": list(result.k_range),
            "residual": result.residual,
            "n_points": result.n_points,
        }
    if "config_hash" in comments:
        doc["config_hash"] = comments["config_hash"]
    return doc


def cmd_fit(args) -> int:
    comments, cols = read_csv(args.spectrum)
    k = cols["k"].astype(int)
    e = cols["E_avg"]
    k_max = args.k_max if args.k_max else int(0.6 * k.max())
    if args.kind == "crossover":
        result = detect_crossover((k, e), parity=args.parity,
                                  k_min=args.k_min, k_max=k_max)
    else:
        result = fit_decay((k, e), args.kind, (args.k_min, k_max), args.parity)
    doc = _fit_report(result, comments)
    if args.output:
        write_json(Path(args.output), doc)
    else:
        import json

        print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def cmd_nls(args) -> int:
    cfg = load_config(args.config)
    params = build_params(cfg)
    part = cfg.get("nls", {})
    init = cfg.get("initial", {})
    if init.get("kind") != "slow_field":
        raise ConfigError("nls command needs initial.kind = slow_field")
    field = slow_field_from_config(init, params)
    if "gamma" in part:
        field.gamma = float(part["gamma"])
    tau_end = float(part.get("tau_end", 1.0))
    dtau = part.get("dtau")
    n_snap = int(part.get("snapshots", 5))
    outdir = _outdir(cfg)
    h = config_hash(cfg)

    taus, ks, res, ims = [], [], [], []
    inv_rows = []
    snap_taus = np.linspace(0.0, tau_end, n_snap + 1)
    for tau in snap_taus:
        field = evolve_to(field, float(tau), float(dtau) if dtau else None)
        mass, ham = nls_invariants(field)
        inv_rows.append((field.tau, mass, ham))
        taus.extend([field.tau] * field.k.size)
        ks.extend(field.k.tolist())
        res.extend(field.coeff.real.tolist())
        ims.extend(field.coeff.imag.tolist())
    write_csv(outdir / "field_snapshots.csv",
              {"kgchain": "nls-field v1", "config_hash": h},
              {"k": ks, "re": res, "im": ims, "tau": taus})
    inv = np.asarray(inv_rows)
    write_csv(outdir / "nls_invariants.csv",
              {"kgchain": "nls-invariants v1", "config_hash": h},
              {"tau": inv[:, 0], "mass": inv[:, 1], "hamiltonian": inv[:, 2]})
    write_manifest(outdir, cfg, ["field_snapshots.csv", "nls_invariants.csv",
                                 "manifest.json"])
    return 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    params = build_params(cfg)
    init = cfg.get("initial", {})
    if init.get("kind") != "slow_field":
        raise ConfigError("compare command needs initial.kind = slow_field")
    part = cfg.get("compare", {})
    norms = _norm_list(cfg)
    outdir = _outdir(cfg)
    h = config_hash(cfg)
    artifacts = ["manifest.json"]

    n_values = part.get("N_values")
    if n_values:
        base = params
        kind = part.get("sweep_kind", "bounded")
        horizon = "mu^-2" if kind == "bounded" else "mu^-b"
        rows = scaling_sweep(
            base, tuple(int(n) for n in n_values),
            lambda p: slow_field_from_config(init, p),
            horizon=horizon,
            b=float(part.get("b", 0.5)),
            t_scale=float(part.get("t_scale", 1.0)),
            dt=float(part.get("dt", 0.05)),
            n_records=int(part.get("n_records", 16)),
            norm_list=norms,
            with_correction=kind == "correction",
        )
        doc = {
            "config_hash": h,
            "sweep_kind": kind,
            "rows": [
                {
                    "N": r.N, "mu": r.mu, "t_end": r.t_end,
                    "sup_norms": {_norm_col(k): v for k, v in r.sup_norms.items()},
                    "correction_distance": r.correction_distance,
                }
                for r in rows
            ],
            "sup_norm_ratios": {
                _norm_col(key): ratio_table(rows, key) for key in norms
            },
        }
        if kind == "correction":
            dists = [r.correction_distance for r in rows]
            doc["correction_distance_ratios"] = [
                dists[i] / dists[i + 1] for i in range(len(dists) - 1)
            ]
        write_json(outdir / "ratio_table.json", doc)
        write_manifest(outdir, cfg, artifacts + ["ratio_table.json"])
        return 0

    series = run_comparison(
        params,
        slow_field_from_config(init, params),
        t_end=float(part.get("t_end", 10.0)),
        dt=float(part.get("dt", 0.05)),
        n_records=int(part.get("n_records", 16)),
        norm_list=norms,
        with_correction=bool(params.alpha),
    )
    cols = {"t": series.times}
    cols.update({_norm_col(key): series.norms[key] for key in norms})
    write_csv(outdir / "error_series.csv",
              {"kgchain": "error-series v1", "config_hash": h}, cols)
    artifacts.append("error_series.csv")
    summary = {
        "config_hash": h,
        "sup_norms": {_norm_col(key): series.sup_norm(key) for key in norms},
        "correction_distance": series.correction_distance,
    }
    if series.final_z10 is not None:
        z1_abs = series.final_error.zeta_abs
        z10_abs = np.abs(complex_mode_coeffs(params, series.final_z10))
        write_csv(outdir / "correction_spectrum.csv",
                  {"kgchain": "correction-spectrum v1", "config_hash": h,
                   "t": repr(series.times[-1])},
                  {"k": np.arange(1, z1_abs.size + 1) if params.bc != PBC
                   else frequencies(params).k,
                   "z1_abs": z1_abs, "z10_abs": z10_abs})
        artifacts.append("correction_spectrum.csv")
    write_json(outdir / "compare_summary.json", summary)
    artifacts.append("compare_summary.json")
    write_manifest(outdir, cfg, artifacts)
    return 0


def cmd_correction(args) -> int:
    cfg = load_config(args.config)
    params = build_params(cfg)
    init = cfg.get("initial", {})
    if init.get("kind") != "slow_field":
        raise ConfigError("correction command needs initial.kind = slow_field")
    part = cfg.get("correction", {})
    t = float(part.get("t", 1.0))
    outdir = _outdir(cfg)
    h = config_hash(cfg)

    field = slow_field_from_config(init, params)
    corr = phi_field(field, params)
    state = z10(corr, t, params)
    zeta = np.abs(complex_mode_coeffs(params, state))
    k_lat = frequencies(params).k
    phi_abs = np.abs(corr.phi_hat)
    write_csv(outdir / "phi_spectrum.csv",
              {"kgchain": "phi-spectrum v1", "config_hash": h},
              {"k": corr.k, "phi_abs": phi_abs})
    write_csv(outdir / "correction_pred.csv",
              {"kgchain": "correction-pred v1", "config_hash": h, "t": repr(t)},
              {"k": k_lat, "z10_abs": zeta})
    hi = int(min(201, 0.8 * params.N))
    fit = fit_decay((np.abs(k_lat), zeta**2), POWERLAW, (11, hi), parity="odd")
    write_json(outdir / "correction_report.json",
               {"config_hash": h, "t": t,
                "z10_sq_tail_exponent": fit.slope,
                "window": list(fit.k_range), "residual": fit.residual})
    write_manifest(outdir, cfg, ["phi_spectrum.csv", "correction_pred.csv",
                                 "correction_report.json", "manifest.json"])
    return 0


def _sweep_case(payload):
    cfg, value = payload
    run_simulate(cfg)
    comments, cols = read_csv(Path(cfg["output_dir"]) / "spectrum.csv")
    k = cols["k"].astype(int)
    e = cols["E_avg"]
    k_max = int(0.6 * k.max())
    try:
        cross = detect_crossover((k, e), parity="odd", k_min=3, k_max=k_max)
        head_slope = cross.head.slope
        tail = cross.tail.slope if cross.tail else None
        k_star = cross.k_star
    except (FitError, ContractError):
        head_slope = fit_decay((k, e), EXPONENTIAL, (3, k_max), "odd").slope
        tail, k_star = None, None
    return {"value": value, "head_slope": head_slope,
            "tail_exponent": tail, "k_star": k_star,
            "output_dir": cfg["output_dir"]}


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    part = cfg.get("sweep")
    if not part:
        raise ConfigError("sweep command needs a config.sweep section")
    param = part.get("param", "energy_density")
    values = part.get("values")
    if not values:
        raise ConfigError("sweep.values must be a non-empty list")
    outdir = _outdir(cfg)
    h = config_hash(cfg)

    cases = []
    for value in values:
        sub = copy.deepcopy(cfg)
        sub.pop("sweep", None)
        if param == "energy_density":
            sub["initial"]["energy_density"] = value
        elif param == "N":
            sub["lattice"]["N"] = int(value)
        else:
            raise ConfigError(f"unsupported sweep parameter {param!r}")
        sub["output_dir"] = str(outdir / f"{param}_{value:g}")
        cases.append((sub, value))

    workers = int(os.environ.get("KGCHAIN_WORKERS", os.cpu_count() or 1))
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_case, cases))
    else:
        results = [_sweep_case(c) for c in cases]

    write_json(outdir / "sweep_summary.json",
               {"config_hash": h, "param": param, "results": results})
    cols = {
        "value": [r["value"] for r in results],
        "head_slope": [r["head_slope"] for r in results],
        "tail_exponent": [np.nan if r["tail_exponent"] is None else r["tail_exponent"]
                          for r in results],
        "k_star": [np.nan if r["k_star"] is None else r["k_star"] for r in results],
    }
    write_csv(outdir / "sweep_summary.csv",
              {"kgchain": "sweep v1", "config_hash": h, "param": param}, cols)
    write_manifest(outdir, cfg, ["sweep_summary.json", "sweep_summary.csv",
                                 "manifest.json"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgchain", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a chain and write spectra")
    p.add_argument("config")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("spectrum", help="re-emit a stored spectrum view")
    p.add_argument("run_dir")
    p.add_argument("--pair", action="store_true")
    p.add_argument("--parity", choices=["odd", "even"])
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("fit", help="fit decay laws on a stored spectrum")
    p.add_argument("spectrum")
    p.add_argument("--kind", choices=[EXPONENTIAL, POWERLAW, "crossover"],
                   default="crossover")
    p.add_argument("--k-min", type=int, default=3)
    p.add_argument("--k-max", type=int, default=0)
    p.add_argument("--parity", choices=["odd", "even"], default="odd")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("nls", help="evolve the slow field alone")
    p.add_argument("config")
    p.set_defaults(fn=cmd_nls)

    p = sub.add_parser("compare", help="lattice vs slow field error norms")
    p.add_argument("config")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("correction", help="predicted first-order correction")
    p.add_argument("config")
    p.set_defaults(fn=cmd_correction)

    p = sub.add_parser("sweep", help="fan simulate out over a parameter list")
    p.add_argument("config")
    p.set_defaults(fn=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ContractError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NonFiniteStateError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3
    except FitError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
