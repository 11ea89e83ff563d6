"""Structure-preserving integration of the separable chain Hamiltonian.

Two schemes on the split H = sum p^2/2 + (potential):

* leapfrog -- kick-drift-kick, order 2;
* yoshida4 -- the triple concatenation of leapfrog with weights
  (w, 1-2w, w), w = 1/(2 - 2^(1/3)), order 4; adjacent half-kicks are
  merged, so a step costs three fresh force evaluations (leapfrog one).

Both schemes are time-reversible and run with negative dt as-is.  Linear
stability requires the largest kick-drift substep to satisfy
|c| dt omega_max < 2, checked once at configuration time.

The driver samples observables on a fixed step cadence (transforms happen
only at sampling instants), optionally writes checkpoints on a second
cadence, and aborts with a diagnostic if the state goes non-finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .lattice import ContractError, LatticeParams, SiteState, force_kernel

LEAPFROG = "leapfrog"
YOSHIDA4 = "yoshida4"

_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1
# merged kick/drift coefficients of the yoshida composition
_YOSHIDA_KICKS = (0.5 * _W1, 0.5 * (_W1 + _W0), 0.5 * (_W0 + _W1), 0.5 * _W1)
_YOSHIDA_DRIFTS = (_W1, _W0, _W1)
# largest |substep| entering the linear stability bound
_MAX_SUBSTEP = {LEAPFROG: 1.0, YOSHIDA4: _W1}


class NonFiniteStateError(RuntimeError):
    """Trajectory left the finite range; carries the last good sample time."""

    def __init__(self, t: float, last_good_t: float | None):
        self.t = t
        self.last_good_t = last_good_t
        where = f"last good sample at t = {last_good_t}" if last_good_t is not None else "no good sample"
        super().__init__(f"non-finite state at t = {t} ({where})")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = YOSHIDA4
    dt: float = 0.1
    t_end: float = 1.0
    sample_every: int = 1
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.method not in (LEAPFROG, YOSHIDA4):
            raise ContractError(f"unknown method {self.method!r}")
        if self.dt <= 0:
            raise ContractError("dt must be > 0")
        if self.sample_every < 1:
            raise ContractError("sample_every must be >= 1")
        if self.checkpoint_every < 0:
            raise ContractError("checkpoint_every must be >= 0")

    def validate(self, params: LatticeParams) -> None:
        """Linear stability bound; raised at configuration, not per step."""
        sub = _MAX_SUBSTEP[self.method] * self.dt * params.omega_max
        if sub >= 2.0:
            raise ContractError(
                f"unstable configuration: max substep * omega_max = {sub:.3f} >= 2 "
                f"(dt = {self.dt}, omega_max = {params.omega_max:.3f})"
            )

    @property
    def n_steps(self) -> int:
        n = int(round(self.t_end / self.dt))
        if abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, abs(self.t_end)):
            raise ContractError("t_end must be an integer number of steps")
        return n


ForceFn = Callable[[np.ndarray], np.ndarray]
Observer = Callable[[float, np.ndarray, np.ndarray], None]


def _advance(method: str, p, q, f, dt: float, force: ForceFn):
    """One step in place; f holds force(q) on entry and on exit."""
    if method == LEAPFROG:
        p += (0.5 * dt) * f
        q += dt * p
        f = force(q)
        p += (0.5 * dt) * f
        return f
    for kick, drift in zip(_YOSHIDA_KICKS[:-1], _YOSHIDA_DRIFTS):
        p += (kick * dt) * f
        q += (drift * dt) * p
        f = force(q)
    p += (_YOSHIDA_KICKS[-1] * dt) * f
    return f


def step(
    params: LatticeParams,
    state: SiteState,
    dt: float,
    method: str = YOSHIDA4,
    force: ForceFn | None = None,
) -> SiteState:
    """Single symplectic step (functional; for composition see integrate)."""
    if force is None:
        force = force_kernel(params)
    p = state.p.copy()
    q = state.q.copy()
    _advance(method, p, q, force(q), dt, force)
    return SiteState(p, q, state.t + dt)


def integrate(
    params: LatticeParams,
    state: SiteState,
    config: IntegratorConfig,
    observers: Sequence[Observer] = (),
    checkpointer: Observer | None = None,
    force: ForceFn | None = None,
) -> SiteState:
    """Advance to t_end, sampling observers every sample_every steps.

    Observers are called at t = 0, on the sample cadence, and at the final
    step; the checkpointer (if any) on its own cadence and at the end.
    Deterministic for identical inputs.  A non-finite state aborts with
    NonFiniteStateError referencing the last finite sample.
    """
    config.validate(params)
    if force is None:
        force = force_kernel(params)
    p = state.p.copy()
    q = state.q.copy()
    t0 = state.t
    n_steps = config.n_steps
    last_good = None
    do_ckpt = checkpointer is not None and config.checkpoint_every > 0

    def sample(t):
        nonlocal last_good
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise NonFiniteStateError(t, last_good)
        for obs in observers:
            obs(t, p, q)
        last_good = t

    sample(t0)
    if do_ckpt:
        checkpointer(t0, p, q)
    # transient inf/nan is caught at the next sample; do not warn per step
    with np.errstate(over="ignore", invalid="ignore"):
        f = force(q)
        for i in range(1, n_steps + 1):
            f = _advance(config.method, p, q, f, config.dt, force)
            t = t0 + i * config.dt
            if i % config.sample_every == 0 or i == n_steps:
                sample(t)
            if do_ckpt and (i % config.checkpoint_every == 0 or i == n_steps):
                checkpointer(t, p, q)
    return SiteState(p, q, t0 + n_steps * config.dt)


def richardson_order(
    params: LatticeParams,
    state: SiteState,
    t_end: float,
    dt: float,
    method: str,
    force: ForceFn | None = None,
) -> float:
    """Measured convergence order by dt -> dt/2 -> dt/4 self-comparison."""
    finals = []
    for h in (dt, dt / 2, dt / 4):
        cfg = IntegratorConfig(method=method, dt=h, t_end=t_end, sample_every=10**9)
        end = integrate(params, state.copy(), cfg, force=force)
        finals.append(np.concatenate([end.p, end.q]))
    e1 = np.max(np.abs(finals[0] - finals[1]))
    e2 = np.max(np.abs(finals[1] - finals[2]))
    return float(np.log2(e1 / e2))
