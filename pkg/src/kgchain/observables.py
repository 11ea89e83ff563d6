"""Time-averaged mode energies, pair averaging, and decay-law fits.

The running average <E_k>(t) = (1/t) int_0^t E_k(s) ds accumulates with
the trapezoid rule over the sampled instants.  For periodic chains the
+-k oscillators are resonant and the observable of interest is the pair
mean (<E_k> + <E_-k>)/2.

Fits operate in log coordinates: exponential fits are least squares on
(k, ln E), power-law fits on (ln k, ln E).  Crossover detection fits a
two-segment model (exponential head, power-law tail) over every candidate
breakpoint and reports one only when it beats the best single-segment fit
by more than 10% in rms residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .lattice import PBC, ContractError, LatticeParams
from .spectral import FrequencyTable, _analyze, frequencies, mode_indices

EXPONENTIAL = "exponential"
POWERLAW = "powerlaw"


class FitError(ValueError):
    """A fit could not be performed; carries the offending modes if any."""

    def __init__(self, message: str, bad_k=()):
        self.bad_k = list(bad_k)
        super().__init__(message)


@dataclass
class AveragedSpectrum:
    """Running time averages <E_k> with accumulated-time metadata."""

    k: np.ndarray
    e_avg: np.ndarray
    t_accum: float
    n_samples: int
    params: LatticeParams
    paired: bool = False
    _integral: np.ndarray | None = None
    _last_t: float = 0.0
    _last_e: np.ndarray | None = None
    _t0: float = 0.0


def new_accumulator(params: LatticeParams) -> AveragedSpectrum:
    k = mode_indices(params)
    return AveragedSpectrum(k, np.zeros(k.size), 0.0, 0, params)


def accumulate(acc: AveragedSpectrum, energies: np.ndarray, t: float) -> AveragedSpectrum:
    """Feed one sample E_k(t); samples must arrive with increasing t."""
    energies = np.asarray(energies, dtype=float)
    if energies.shape != acc.k.shape:
        raise ContractError("energy array does not match the mode set")
    if acc.n_samples == 0:
        acc._t0 = t
        acc._integral = np.zeros_like(energies)
        acc.e_avg = energies.copy()  # limit value of the average at t0
    else:
        dt = t - acc._last_t
        if dt <= 0:
            raise ContractError(f"non-monotone sample times: {acc._last_t} -> {t}")
        acc._integral += 0.5 * dt * (energies + acc._last_e)
        acc.t_accum = t - acc._t0
        acc.e_avg = acc._integral / acc.t_accum
    acc._last_t = t
    acc._last_e = energies.copy()
    acc.n_samples += 1
    return acc


class ModeEnergyObserver:
    """integrate() observer sampling mode energies into an accumulator."""

    def __init__(self, params: LatticeParams, freqs: FrequencyTable | None = None,
                 discard: float = 0.0):
        self.params = params
        self.freqs = freqs if freqs is not None else frequencies(params)
        self.discard = discard
        self.spectrum = new_accumulator(params)
        self._sq = np.sqrt(self.freqs.omega)

    def __call__(self, t: float, p: np.ndarray, q: np.ndarray) -> None:
        if t < self.discard:
            return
        p_hat = _analyze(self.params, p, False) / self._sq
        q_hat = _analyze(self.params, q, False) * self._sq
        e = 0.5 * self.freqs.omega * (p_hat * p_hat + q_hat * q_hat)
        accumulate(self.spectrum, e, t)


class EnergyDriftObserver:
    """Records (t, H) at the sample cadence; energy_fn maps (p, q) -> H."""

    def __init__(self, energy_fn):
        self.energy_fn = energy_fn
        self.times: list[float] = []
        self.energies: list[float] = []

    def __call__(self, t: float, p: np.ndarray, q: np.ndarray) -> None:
        self.times.append(t)
        self.energies.append(self.energy_fn(p, q))

    def max_relative_drift(self) -> float:
        e = np.asarray(self.energies)
        return float(np.max(np.abs(e - e[0])) / abs(e[0]))


def pair_average(spec: AveragedSpectrum) -> AveragedSpectrum:
    """Resonant pair means over k >= 1; k = 0 and the alternating mode pass
    through (the latter reported at index N+1)."""
    if spec.params.bc != PBC or spec.paired:
        raise ContractError("pair_average takes an unpaired PBC spectrum")
    n = spec.params.N
    e = spec.e_avg
    # canonical order: [0, +1, -1, ..., +N, -N, -(N+1)]
    e_sin = e[1 : 2 * n + 1 : 2]
    e_cos = e[2 : 2 * n + 2 : 2]
    out_k = np.arange(0, n + 2)
    out_e = np.empty(n + 2)
    out_e[0] = e[0]
    out_e[1 : n + 1] = 0.5 * (e_sin + e_cos)
    out_e[n + 1] = e[-1]
    return AveragedSpectrum(out_k, out_e, spec.t_accum, spec.n_samples,
                            spec.params, paired=True)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares decay law in log coordinates.

    slope is d ln E / dk (exponential) or d ln E / d ln k (power law);
    residual is the rms of the fit in its log coordinates.
    """

    kind: str
    slope: float
    intercept: float
    k_range: tuple[int, int]
    residual: float
    n_points: int

    def log_e(self, k) -> np.ndarray:
        x = np.asarray(k, dtype=float)
        if self.kind == POWERLAW:
            x = np.log(x)
        return self.intercept + self.slope * x


def _select_window(k, e, k_range, parity):
    k = np.asarray(k)
    e = np.asarray(e, dtype=float)
    mask = (k >= k_range[0]) & (k <= k_range[1]) & (k >= 1)
    if parity == "odd":
        mask &= k % 2 == 1
    elif parity == "even":
        mask &= k % 2 == 0
    elif parity is not None:
        raise ContractError(f"unknown parity filter {parity!r}")
    return k[mask], e[mask]


def fit_decay(spec, kind: str, k_range: tuple[int, int],
              parity: str | None = None) -> DecayFit:
    """Fit ln E against k (exponential) or ln k (power law) on a window.

    spec is an AveragedSpectrum or a (k, e) pair.  Requires at least 4
    points and strictly positive energies in the window.
    """
    if kind not in (EXPONENTIAL, POWERLAW):
        raise ContractError(f"unknown fit kind {kind!r}")
    k, e = (spec.k, spec.e_avg) if isinstance(spec, AveragedSpectrum) else spec
    k, e = _select_window(k, e, k_range, parity)
    if k.size < 4:
        raise FitError(f"window {k_range} keeps {k.size} < 4 points")
    bad = k[e <= 0]
    if bad.size:
        raise FitError(f"non-positive energies at k = {bad.tolist()}", bad_k=bad)
    x = k.astype(float) if kind == EXPONENTIAL else np.log(k.astype(float))
    y = np.log(e)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    rms = float(np.sqrt(np.mean(resid**2)))
    return DecayFit(kind, float(slope), float(intercept),
                    (int(k[0]), int(k[-1])), rms, int(k.size))


@dataclass(frozen=True)
class CrossoverResult:
    k_star: int | None
    head: DecayFit
    tail: DecayFit | None
    e_star: float | None
    improvement: float
    single_residual: float


def _two_segment_rms(k, y_exp_x, y_pow_x, y, split_idx):
    """rms of the combined head-exponential/tail-power fit at one breakpoint."""
    sse = 0.0
    n = 0
    for x, lo, hi in ((y_exp_x, 0, split_idx + 1), (y_pow_x, split_idx, k.size)):
        xs = x[lo:hi]
        ys = y[lo:hi]
        slope, intercept = np.polyfit(xs, ys, 1)
        r = ys - (intercept + slope * xs)
        sse += float(np.dot(r, r))
        n += xs.size
    return np.sqrt(sse / n)


def detect_crossover(
    spec,
    parity: str | None = "odd",
    k_min: int = 3,
    k_max: int | None = None,
    min_segment: int = 4,
    improvement_threshold: float = 0.1,
    floor_rel: float = 1e-18,
) -> CrossoverResult:
    """Locate the switch from exponential head to power-law tail.

    Scans every admissible breakpoint, minimizing the combined rms.  A
    crossover is reported only when (a) the best two-segment fit beats the
    best single-segment fit by more than improvement_threshold and (b) the
    tail side genuinely prefers a power law over an exponential (a bending
    exponential spectrum satisfies (a) alone).  Modes below floor_rel of
    the spectrum peak are excluded: over dozens of decades every spectrum
    bends and eventually meets the accumulation floor.

    Reported head/tail fits leave a two-mode gap around k_star; e_star is
    the fitted-line energy at the head/tail intersection (head value at
    k_star as fallback).
    """
    k_all, e_all = (spec.k, spec.e_avg) if isinstance(spec, AveragedSpectrum) else spec
    if k_max is None:
        k_max = int(0.6 * np.max(k_all))
    k, e = _select_window(k_all, e_all, (k_min, k_max), parity)
    if k.size < 2 * min_segment:
        raise FitError(f"only {k.size} points in [{k_min}, {k_max}]")
    bad = k[e <= 0]
    if bad.size:
        raise FitError(f"non-positive energies at k = {bad.tolist()}", bad_k=bad)
    keep = e >= floor_rel * np.max(e)
    if np.count_nonzero(keep) >= 2 * min_segment:
        k, e = k[keep], e[keep]
        k_max = int(k[-1])
    if np.max(e) / np.min(e) < 1e2:
        raise ContractError("spectrum spans fewer than 2 decades in the window")

    y = np.log(e)
    x_exp = k.astype(float)
    x_pow = np.log(k.astype(float))
    single = min(
        fit_decay((k, e), EXPONENTIAL, (k_min, k_max), parity).residual,
        fit_decay((k, e), POWERLAW, (k_min, k_max), parity).residual,
    )

    best_rms, best_idx = np.inf, None
    for idx in range(min_segment - 1, k.size - min_segment + 1):
        rms = _two_segment_rms(k, x_exp, x_pow, y, idx)
        if rms < best_rms:
            best_rms, best_idx = rms, idx

    improvement = 1.0 - best_rms / single if single > 0 else 0.0
    if best_idx is None or improvement <= improvement_threshold:
        head = fit_decay((k, e), EXPONENTIAL, (k_min, k_max), parity)
        return CrossoverResult(None, head, None, None, improvement, single)

    k_star = int(k[best_idx])
    # leave a two-mode gap around the breakpoint where the window allows it
    step_k = 2 if parity in ("odd", "even") else 1
    head_hi = max(k_min + 3 * step_k, k_star - 2)
    tail_lo = min(k_star + 2, k_max - 3 * step_k)
    head = fit_decay((k, e), EXPONENTIAL, (k_min, head_hi), parity)
    tail = fit_decay((k, e), POWERLAW, (tail_lo, k_max), parity)
    tail_exp = fit_decay((k, e), EXPONENTIAL, (tail_lo, k_max), parity)
    if tail_exp.residual <= tail.residual:
        # the far side is still exponential: a bend, not a new regime
        head_full = fit_decay((k, e), EXPONENTIAL, (k_min, k_max), parity)
        return CrossoverResult(None, head_full, None, None, improvement, single)

    def gap(kk):
        return head.log_e(kk) - tail.log_e(kk)

    e_star = None
    try:
        lo, hi = float(k[0]), float(k[-1])
        if gap(lo) * gap(hi) < 0:
            kx = brentq(gap, lo, hi)
            e_star = float(np.exp(head.log_e(kx)))
    except Exception:
        e_star = None
    if e_star is None:
        e_star = float(np.exp(head.log_e(k_star)))
    return CrossoverResult(k_star, head, tail, e_star, improvement, single)
