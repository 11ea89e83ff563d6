"""Run configuration, manifests, and artifact files.

Config files are JSON with the following shape (all physics fields
required unless noted):

    {
      "lattice":    {"N": 511, "a": 0.5, "alpha": 0.25, "beta": 0.0,
                     "bc": "DBC"},
      "integrator": {"method": "yoshida4", "dt": 0.1, "t_end": 1e5,
                     "sample_every": 10, "checkpoint_every": 0},
      "initial":    {"kind": "mode", "k": 1, "energy_density": 0.001}
                  | {"kind": "modes", "modes": [{"k": 1, "energy": 0.5}]}
                  | {"kind": "slow_field", "sin": {"1": [0.0, 1.0]},
                     "cos": {}, "dc": [0.0, 0.0]},
      "observables": {"parity": "odd", "discard": 0.0,
                      "norms": [[2.0, 0.0], [2.4, 0.0], [1.0, 0.05]]},
      "nls":     {"tau_end": 1.0, "dtau": 1e-3, "snapshots": 5},   # nls cmd
      "compare": {"t_end": 10.0, "dt": 0.05, "n_records": 16,
                  "correction_t": null, "N_values": null, "b": 0.5}, # compare cmd
      "sweep":   {"param": "energy_density", "values": [0.05, 0.01]},
      "output_dir": "runs/demo",
      "seed": 0
    }

"slow_field" initial data are plain trigonometric amplitudes of phi0
(complex as [re, im]); the run then starts from z(0) = mu z^a(0).  seed
is recorded for provenance only: physics runs are deterministic.

Every artifact embeds the sha256 of the canonical config JSON; re-running
a command on the same manifest reproduces the files bit-identically
(artifacts carry no timestamps).  Checkpoints are npz records of
(version, config_hash, t, p, q) and round-trip bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .lattice import DBC, PBC, LatticeParams, SiteState
from .integrate import IntegratorConfig
from .nls import NlsField, build_approx, field_from_trig
from .spectral import frequencies, from_modes, mode_indices, ModeState


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


CHECKPOINT_VERSION = 1


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config JSON at {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    return cfg


def _require(cfg: dict, key: str, kind, where: str):
    if key not in cfg:
        raise ConfigError(f"missing {where}.{key}")
    value = cfg[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{where}.{key} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"{where}.{key} must be {kind.__name__}")
    return value


def build_params(cfg: dict) -> LatticeParams:
    lat = _require(cfg, "lattice", dict, "config")
    n = _require(lat, "N", int, "lattice")
    bc = lat.get("bc", DBC)
    if bc not in (DBC, PBC):
        raise ConfigError(f"lattice.bc must be DBC or PBC, got {bc!r}")
    try:
        return LatticeParams(
            n,
            _require(lat, "a", float, "lattice"),
            float(lat.get("alpha", 0.0)),
            float(lat.get("beta", 0.0)),
            bc,
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


def build_integrator(cfg: dict, params: LatticeParams) -> IntegratorConfig:
    part = _require(cfg, "integrator", dict, "config")
    try:
        icfg = IntegratorConfig(
            method=part.get("method", "yoshida4"),
            dt=_require(part, "dt", float, "integrator"),
            t_end=_require(part, "t_end", float, "integrator"),
            sample_every=int(part.get("sample_every", 1)),
            checkpoint_every=int(part.get("checkpoint_every", 0)),
        )
        icfg.validate(params)
    except ValueError as exc:
        raise ConfigError(str(exc))
    return icfg


def _mode_position(params: LatticeParams, k: int) -> int:
    """Canonical-order position of mode k (PBC positive k = sine sector)."""
    if params.bc == DBC:
        if not 1 <= k <= params.N:
            raise ConfigError(f"mode {k} outside 1..{params.N}")
        return k - 1
    ks = mode_indices(params)
    hits = np.nonzero(ks == k)[0]
    if hits.size == 0:
        raise ConfigError(f"mode {k} not on the PBC lattice")
    return int(hits[0])


def initial_state(cfg: dict, params: LatticeParams) -> tuple[SiteState, NlsField | None]:
    """Build the initial SiteState (and the slow field when applicable)."""
    init = _require(cfg, "initial", dict, "config")
    kind = init.get("kind")
    freqs = frequencies(params)
    if kind == "mode":
        density = _require(init, "energy_density", float, "initial")
        k = int(init.get("k", 1))
        pos = _mode_position(params, k)
        q_hat = np.zeros(params.n_sites)
        q_hat[pos] = np.sqrt(2.0 * density * params.n_sites / freqs.omega[pos])
        state = from_modes(params, ModeState(np.zeros(params.n_sites), q_hat))
        return state, None
    if kind == "modes":
        entries = _require(init, "modes", list, "initial")
        q_hat = np.zeros(params.n_sites)
        for entry in entries:
            k = _require(entry, "k", int, "initial.modes[]")
            energy = _require(entry, "energy", float, "initial.modes[]")
            pos = _mode_position(params, k)
            q_hat[pos] = np.sqrt(2.0 * energy / freqs.omega[pos])
        state = from_modes(params, ModeState(np.zeros(params.n_sites), q_hat))
        return state, None
    if kind == "slow_field":
        field = slow_field_from_config(init, params)
        _, z0 = build_approx(field, 0.0, params)
        return SiteState(z0.p, z0.q, 0.0), field
    raise ConfigError(f"initial.kind must be mode|modes|slow_field, got {kind!r}")


def slow_field_from_config(init: dict, params: LatticeParams) -> NlsField:
    def parse_amps(part):
        out = {}
        for key, val in (part or {}).items():
            if not (isinstance(val, list) and len(val) == 2):
                raise ConfigError(f"trig amplitude {key!r} must be [re, im]")
            out[int(key)] = complex(val[0], val[1])
        return out

    dc = init.get("dc", [0.0, 0.0])
    try:
        return field_from_trig(
            params,
            sin=parse_amps(init.get("sin")),
            cos=parse_amps(init.get("cos")),
            dc=complex(dc[0], dc[1]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


# ---------------------------------------------------------------------------
# artifact files


def _fmt(x) -> str:
    if isinstance(x, (np.floating, float)):
        return repr(float(x))
    return str(x)


def write_manifest(outdir: Path, cfg: dict, artifacts: list[str]) -> str:
    outdir.mkdir(parents=True, exist_ok=True)
    h = config_hash(cfg)
    doc = {
        "config": cfg,
        "config_hash": h,
        "package_version": __version__,
        "artifacts": sorted(artifacts),
    }
    (outdir / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True))
    return h


def write_csv(path: Path, header_comments: dict, columns: dict) -> None:
    """CSV with '# key: value' provenance comments before the header row."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    lines = [f"# {k}: {v}" for k, v in header_comments.items()]
    lines.append(",".join(names))
    for row in zip(*arrays):
        lines.append(",".join(_fmt(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def read_csv(path) -> tuple[dict, dict]:
    """Read a kgchain CSV back into (comments, column arrays).

    Raises ConfigError naming the offending line on malformed input.
    """
    comments, names, rows = {}, None, []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if ":" in line:
                    key, _, val = line[1:].partition(":")
                    comments[key.strip()] = val.strip()
                continue
            if names is None:
                names = line.split(",")
                continue
            parts = line.split(",")
            if len(parts) != len(names):
                raise ConfigError(f"{path}:{lineno}: expected {len(names)} fields")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: non-numeric field")
    if names is None:
        raise ConfigError(f"{path}: no header row")
    data = np.asarray(rows, dtype=float) if rows else np.empty((0, len(names)))
    return comments, {n: data[:, i] for i, n in enumerate(names)}


def write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))


def save_checkpoint(path: Path, cfg_hash: str, state: SiteState) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(
        path,
        version=np.int64(CHECKPOINT_VERSION),
        config_hash=np.bytes_(cfg_hash.encode()),
        t=np.float64(state.t),
        p=state.p,
        q=state.q,
    )


def load_checkpoint(path) -> tuple[str, SiteState]:
    with np.load(path) as data:
        version = int(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ConfigError(f"unknown checkpoint version {version}")
        return (
            bytes(data["config_hash"]).decode(),
            SiteState(data["p"].copy(), data["q"].copy(), float(data["t"])),
        )
