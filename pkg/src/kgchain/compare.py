"""Side-by-side runs of the chain and its slow-field approximation.

run_comparison integrates the lattice from the datum z(0) = mu z^a(0),
co-evolves the field to the matching slow time at each record instant,
and logs the weighted norms of z1 = (z - mu z^a)/mu^2.  scaling_sweep
repeats this across lattice sizes and tabulates how the error norms and
the distance to the explicit correction respond to N-doubling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correction import (
    ErrorRecord,
    compare_correction,
    extract_error,
    phi_field,
    z10,
)
from .integrate import IntegratorConfig, YOSHIDA4, integrate
from .lattice import LatticeParams, SiteState
from .nls import NlsField, build_approx, evolve_to, scale_map
from .spectral import NormWeights

DEFAULT_NORMS = ((2.0, 0.0), (2.4, 0.0), (1.0, 0.05))


@dataclass
class ComparisonSeries:
    """Error-norm history of one lattice/field comparison run.

    correction_distance is sup_t ||z1(t) - z10(t)|| over the record times
    (the uniform bound of the short-time theorem); distance_series holds
    the per-record values.
    """

    params: LatticeParams
    times: np.ndarray
    norms: dict[tuple[float, float], np.ndarray]
    final_error: ErrorRecord
    final_state: SiteState
    correction_distance: float | None
    final_z10: SiteState | None
    distance_series: np.ndarray | None = None

    def sup_norm(self, key: tuple[float, float]) -> float:
        return float(np.max(self.norms[key]))


def run_comparison(
    params: LatticeParams,
    phi0: NlsField,
    t_end: float,
    dt: float = 0.05,
    n_records: int = 24,
    norm_list: tuple[tuple[float, float], ...] = DEFAULT_NORMS,
    method: str = YOSHIDA4,
    d_tau: float | None = None,
    with_correction: bool = True,
    correction_norm: tuple[float, float] = (2.0, 0.0),
) -> ComparisonSeries:
    """Integrate lattice and field together and record error norms.

    Record instants are an even step cadence covering (0, t_end]; the
    correction distance ||z1 - z10|| is evaluated at t_end.
    """
    scale = scale_map(params)
    _, z0 = build_approx(phi0, 0.0, params, scale)
    state = SiteState(z0.p.copy(), z0.q.copy(), 0.0)

    total_steps = int(round(t_end / dt))
    if abs(total_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("t_end must be an integer number of dt steps")
    cadence = max(1, total_steps // n_records)
    marks = list(range(cadence, total_steps + 1, cadence))
    if marks[-1] != total_steps:
        marks.append(total_steps)

    corr = None
    dist_series = []
    if with_correction and params.alpha:
        corr = phi_field(phi0, params)
        s, sigma = correction_norm
        corr_weights = NormWeights(s, sigma, scale.mu)

    field = phi0.copy()
    times, series = [], {key: [] for key in norm_list}
    err = None
    z10_state = None
    prev = 0
    for mark in marks:
        seg = (mark - prev) * dt
        cfg = IntegratorConfig(method=method, dt=dt, t_end=seg, sample_every=10**9)
        state = integrate(params, state, cfg)
        t = mark * dt
        state.t = t  # exact mark time (segment stamps accumulate roundoff)
        field = evolve_to(field, scale.tau_of_t(t), d_tau)
        err = extract_error(state, field, t, params, norm_list, scale)
        times.append(t)
        for key in norm_list:
            series[key].append(err.norms[key])
        if corr is not None:
            z10_state = z10(corr, t, params)
            dist_series.append(compare_correction(err, z10_state, params, corr_weights))
        prev = mark

    return ComparisonSeries(
        params,
        np.asarray(times),
        {key: np.asarray(v) for key, v in series.items()},
        err,
        state,
        float(np.max(dist_series)) if dist_series else None,
        z10_state,
        np.asarray(dist_series) if dist_series else None,
    )


@dataclass
class ScalingRow:
    N: int
    mu: float
    t_end: float
    sup_norms: dict[tuple[float, float], float]
    correction_distance: float | None


def scaling_sweep(
    base: LatticeParams,
    n_values: tuple[int, ...],
    phi0_builder,
    horizon: str = "mu^-2",
    b: float = 0.5,
    t_scale: float = 1.0,
    dt: float = 0.05,
    n_records: int = 24,
    norm_list: tuple[tuple[float, float], ...] = DEFAULT_NORMS,
    with_correction: bool = False,
) -> list[ScalingRow]:
    """Repeat run_comparison across lattice sizes.

    horizon selects t_end = t_scale * mu^-2 ("mu^-2") or t_scale * mu^-b
    ("mu^-b", the short-time correction regime).  phi0_builder(params)
    supplies the datum for each size.
    """
    rows = []
    for n in n_values:
        params = LatticeParams(n, base.a, base.alpha, base.beta, base.bc)
        mu = params.mu
        if horizon == "mu^-2":
            t_raw = t_scale / mu**2
        elif horizon == "mu^-b":
            t_raw = t_scale / mu**b
        else:
            raise ValueError(f"unknown horizon {horizon!r}")
        t_end = max(1, int(round(t_raw / dt))) * dt
        series = run_comparison(
            params,
            phi0_builder(params),
            t_end,
            dt=dt,
            n_records=n_records,
            norm_list=norm_list,
            with_correction=with_correction,
        )
        rows.append(
            ScalingRow(
                n,
                mu,
                t_end,
                {key: series.sup_norm(key) for key in norm_list},
                series.correction_distance,
            )
        )
    return rows


def ratio_table(rows: list[ScalingRow], key: tuple[float, float]) -> list[float]:
    """Successive ratios value(N_i)/value(N_{i+1}) of a sup norm."""
    vals = [r.sup_norms[key] for r in rows]
    return [vals[i] / vals[i + 1] for i in range(len(vals) - 1)]
