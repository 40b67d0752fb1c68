"""Transition probabilities over a time interval, three ways.

* evolve_tt / transition_prob_tt: tensor-train integration of the master
  equation by uniformization, the primary path.
* transition_prob_dense: matrix exponential of the full generator, the
  small-system oracle.
* transition_prob_ssa: frequency estimate from exact-event trajectory
  sampling, the Monte Carlo baseline.

Uniformization writes exp(A*dt) p as a Poisson-weighted power series of
the shifted stochastic matrix B = I + A/L, where L bounds every total exit
rate.  dt is split so each substep has L*dt <= 1, the series is truncated
once its Poisson tail is negligible, and the iterate is re-compressed
after every operator application.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .generator import ModelParams, build_generator_cp, build_generator_dense, \
    reaction_rates
from .graphs import Network, fiedler_ordering, permute_network
from .tt import (CPOperator, TTVector, cp_apply, state_index, tt_add, tt_inner,
                 tt_element, tt_ones, tt_round, tt_scale, unit_state_tt)

__all__ = [
    "SolverConfig",
    "SolverAccuracyError",
    "SubstepLimitError",
    "evolve_tt",
    "transition_prob_tt",
    "transition_prob_dense",
    "dense_propagator",
    "transition_prob_ssa",
    "sample_final_state",
]

# Absolute pointwise accuracy target of one evolve.  tt_tol budgets the
# relative error of resolvable probabilities; these floors keep rare-event
# entries (down to ~1e-8 and below) and the mass deficit accurate on an
# absolute scale, which per-application rounding at tt_tol alone cannot do.
_ABS_ACC = 1e-13
_TAIL_ABS = 1e-14
# TT entries this far below zero indicate solver failure, not roundoff.
_NEGATIVE_TOL = 1e-8

_MAX_DENSE_SITES = 14


class SolverAccuracyError(RuntimeError):
    """A computed probability is negative beyond roundoff tolerance."""


class SubstepLimitError(RuntimeError):
    """Uniformization needs more substeps than the configured cap."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the tensor-train forward solve."""

    tt_tol: float = 1e-6
    max_substeps: int = 10_000
    use_fiedler_ordering: bool = True

    def __post_init__(self):
        if not 0.0 < self.tt_tol < 1.0:
            raise ValueError(f"tt_tol must be in (0, 1), got {self.tt_tol}")
        if self.max_substeps < 1:
            raise ValueError("max_substeps must be >= 1")


def _poisson_weights(lam, tail_tol):
    """Weights e^-lam lam^k / k! until the remaining tail mass < tail_tol."""
    weights = [math.exp(-lam)]
    cum = weights[0]
    k = 0
    while 1.0 - cum >= tail_tol:
        k += 1
        weights.append(weights[-1] * lam / k)
        cum += weights[-1]
        if k > 1000:
            raise RuntimeError("Poisson series failed to converge")
    return np.array(weights)


def _assert_finite(p: TTVector):
    for core in p.cores:
        if not np.isfinite(core).all():
            raise FloatingPointError("non-finite values in evolved state")


def evolve_tt(gen: CPOperator, p0: TTVector, dt, cfg: SolverConfig = None) -> TTVector:
    """Propagate a TT probability vector by exp(gen * dt).

    The input must be a probability vector (entries summing to 1 within
    1e-8); the output is not renormalized, so its mass deficit measures
    the accumulated truncation error.
    """
    cfg = cfg or SolverConfig()
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if gen.n_sites != p0.n_sites:
        raise ValueError("generator and state site counts differ")
    if gen.exit_rate_bound is None:
        raise ValueError("generator carries no exit-rate bound")
    mass = tt_inner(p0, tt_ones(p0.n_sites))
    if abs(mass - 1.0) > 1e-8:
        raise ValueError(f"initial state mass {mass} is not 1")
    if dt == 0:
        return TTVector([c.copy() for c in p0.cores])

    lam_total = gen.exit_rate_bound
    n_sub = max(1, math.ceil(lam_total * dt))
    if n_sub > cfg.max_substeps:
        raise SubstepLimitError(
            f"{n_sub} substeps needed, cap is {cfg.max_substeps}")
    lam = lam_total * dt / n_sub
    tail_tol = min(cfg.tt_tol / 10.0, _TAIL_ABS / n_sub)
    weights = _poisson_weights(lam, tail_tol)
    n_apply = max((len(weights) - 1) * n_sub, 1)
    tol_app = min(cfg.tt_tol, _ABS_ACC) / n_apply

    identity = [np.eye(2)] * gen.n_sites
    shifted = CPOperator(
        [(1.0, identity)] + [(c / lam_total, f) for c, f in gen.terms])

    p = p0
    for _ in range(n_sub):
        acc = tt_scale(p, weights[0])
        v = p
        for w in weights[1:]:
            v = tt_round(cp_apply(shifted, v), tol_app)
            _assert_finite(v)
            acc = tt_round(tt_add(acc, tt_scale(v, w)), tol_app)
        p = acc
    _assert_finite(p)
    return p


def transition_prob_tt(net: Network, params: ModelParams, x_a, x_b, dt,
                       cfg: SolverConfig = None) -> float:
    """Probability of moving from state x_a to x_b over dt, TT path.

    When node ordering is enabled the generator and both states are
    permuted by the Fiedler ordering of the network before the solve,
    which keeps TT ranks low for weakly coupled node groups.
    """
    cfg = cfg or SolverConfig()
    if dt <= 0:
        raise ValueError("dt must be positive")
    x_a = np.asarray(x_a, dtype=np.uint8)
    x_b = np.asarray(x_b, dtype=np.uint8)
    if cfg.use_fiedler_ordering and net.n_nodes >= 2:
        order = fiedler_ordering(net)
    else:
        order = np.arange(net.n_nodes)
    pnet = permute_network(net, order)
    gen = build_generator_cp(pnet, params)
    evolved = evolve_tt(gen, unit_state_tt(x_a[order]), dt, cfg)
    value = tt_element(evolved, x_b[order])
    if value < -_NEGATIVE_TOL:
        raise SolverAccuracyError(
            f"probability {value} below -{_NEGATIVE_TOL}; tighten tt_tol")
    return min(max(value, 0.0), 1.0)


def dense_propagator(net: Network, params: ModelParams, dt) -> np.ndarray:
    """exp(A*dt) for the full generator; columns are source states."""
    if net.n_nodes > _MAX_DENSE_SITES:
        raise ValueError(f"refusing dense propagator for N={net.n_nodes} > {_MAX_DENSE_SITES}")
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    return scipy.linalg.expm(build_generator_dense(net, params) * dt)


def transition_prob_dense(net: Network, params: ModelParams, x_a, x_b, dt) -> float:
    """Oracle transition probability from the dense matrix exponential."""
    prop = dense_propagator(net, params, dt)
    return float(prop[state_index(x_b), state_index(x_a)])


def sample_final_state(net: Network, params: ModelParams, x0, duration,
                       rng) -> np.ndarray:
    """State after running the jump process for a fixed duration.

    Direct Gillespie stepping: exponential waiting times by inverse CDF,
    reaction selection by cumulative rate scan.
    """
    x = np.array(x0, dtype=np.uint8)
    t = 0.0
    while True:
        rates = reaction_rates(x, net, params)
        total = rates.sum()
        t += -math.log(rng.random()) / total
        if t >= duration:
            return x
        cum = np.cumsum(rates)
        node = int(np.searchsorted(cum, rng.random() * total, side="right"))
        node = min(node, len(x) - 1)
        x[node] ^= 1


def transition_prob_ssa(net: Network, params: ModelParams, x_a, x_b, dt,
                        n_traj, rng) -> float:
    """Frequency of trajectories from x_a that end in x_b after dt.

    Returns exactly 0 when no trajectory hits the target, in which case
    the event is unresolved at this sample size.
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    x_a = np.asarray(x_a, dtype=np.uint8)
    x_b = np.asarray(x_b, dtype=np.uint8)
    hits = 0
    for _ in range(n_traj):
        final = sample_final_state(net, params, x_a, dt, rng)
        if np.array_equal(final, x_b):
            hits += 1
    return hits / n_traj
