"""Data log-likelihood of a candidate network, and contrast diagnostics.

The likelihood factorizes over observation intervals by the Markov
property, so each factor is a single transition probability.  Repeated
(source state, interval length) combinations are solved once: the TT path
evolves each distinct source a single time and reads off every needed
target, the dense path computes one matrix exponential per distinct
interval length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .datagen import ObservationSeries
from .forward import (SolverConfig, SolverAccuracyError, _NEGATIVE_TOL,
                      evolve_tt, transition_prob_ssa)
from .generator import ModelParams, build_generator_cp, build_generator_dense
from .graphs import Network, all_pairs, fiedler_ordering, permute_network
from .tt import state_index, tt_element, unit_state_tt

__all__ = [
    "PROB_FLOOR",
    "LikelihoodReport",
    "interval_probabilities",
    "log_likelihood",
    "contrast_matrix",
    "serialize_contrast",
]

# Transition probabilities below this are floored before taking logs so a
# single tiny factor cannot produce -inf on the tt/dense paths.
PROB_FLOOR = 1e-300

_SOLVERS = ("tt", "dense", "ssa")


@dataclass
class LikelihoodReport:
    """Log-likelihood of one network against one observation series.

    log_like is the natural-log value (-inf when an SSA factor was zero);
    per_interval holds the log10 of each interval probability, matching
    the reporting convention of the histograms and traces.
    """

    log_like: float
    per_interval: np.ndarray
    n_floored: int
    solver_used: str

    @property
    def log10_like(self) -> float:
        return self.log_like / math.log(10.0)


def _round_dt(dt) -> float:
    # Interval lengths computed from gridded times differ in the last ulp;
    # collapsing to 10 significant digits (the serialization precision)
    # lets equal intervals share one solve.
    return float(f"{dt:.10g}")


def _intervals(obs: ObservationSeries):
    if obs.n_intervals < 1:
        raise ValueError("need at least 2 records for a likelihood")
    dts = [_round_dt(t1 - t0) for t0, t1 in zip(obs.times[:-1], obs.times[1:])]
    return dts


def _probs_tt(net, params, obs, cfg):
    if cfg.use_fiedler_ordering and net.n_nodes >= 2:
        order = fiedler_ordering(net)
    else:
        order = np.arange(net.n_nodes)
    pnet = permute_network(net, order)
    gen = build_generator_cp(pnet, params)
    pstates = obs.states[:, order]
    dts = _intervals(obs)
    groups = {}
    for k, dt in enumerate(dts):
        key = (pstates[k].tobytes(), dt)
        groups.setdefault(key, []).append(k)
    probs = np.empty(len(dts))
    for (src_bytes, dt), members in groups.items():
        src = np.frombuffer(src_bytes, dtype=np.uint8)
        evolved = evolve_tt(gen, unit_state_tt(src), dt, cfg)
        for k in members:
            value = tt_element(evolved, pstates[k + 1])
            if value < -_NEGATIVE_TOL:
                raise SolverAccuracyError(
                    f"interval {k}: probability {value} below -{_NEGATIVE_TOL}")
            probs[k] = min(max(value, 0.0), 1.0)
    return probs


def _probs_dense(net, params, obs):
    gen = build_generator_dense(net, params)
    dts = _intervals(obs)
    props = {dt: scipy.linalg.expm(gen * dt) for dt in set(dts)}
    idx = [state_index(row) for row in obs.states]
    probs = np.empty(len(dts))
    for k, dt in enumerate(dts):
        probs[k] = max(props[dt][idx[k + 1], idx[k]], 0.0)
    return probs


def _ssa_chunk(task):
    net, params, rows_a, rows_b, dts, n_ssa, seed, indices = task
    out = np.empty(len(indices))
    for pos, k in enumerate(indices):
        # one independent stream per interval, so results do not depend on
        # evaluation order or parallel chunking
        rng = np.random.default_rng([seed, k])
        out[pos] = transition_prob_ssa(
            net, params, rows_a[pos], rows_b[pos], dts[pos], n_ssa, rng)
    return out


def _probs_ssa(net, params, obs, n_ssa, seed, jobs):
    if seed is None:
        raise ValueError("ssa solver needs a seed")
    dts = _intervals(obs)
    indices = np.arange(len(dts))
    chunks = np.array_split(indices, max(1, min(jobs, len(dts))))
    tasks = [(net, params, obs.states[chunk], obs.states[chunk + 1],
              [dts[k] for k in chunk], n_ssa, seed, chunk.tolist())
             for chunk in chunks if len(chunk)]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_ssa_chunk, tasks))
    else:
        parts = [_ssa_chunk(task) for task in tasks]
    return np.concatenate(parts)


def interval_probabilities(net: Network, params: ModelParams,
                           obs: ObservationSeries, solver="tt",
                           cfg: SolverConfig = None, n_ssa=1000,
                           ssa_seed=None, jobs=1) -> np.ndarray:
    """Raw transition probability of every observation interval.

    jobs > 1 spreads the ssa intervals over worker processes; the tt and
    dense paths already share one solve across equal intervals, so they
    run sequentially regardless.
    """
    if solver not in _SOLVERS:
        raise ValueError(f"unknown solver {solver!r}, expected one of {_SOLVERS}")
    if net.n_nodes != obs.n_nodes:
        raise ValueError("network and observations disagree on node count")
    cfg = cfg or SolverConfig()
    if solver == "tt":
        return _probs_tt(net, params, obs, cfg)
    if solver == "dense":
        return _probs_dense(net, params, obs)
    return _probs_ssa(net, params, obs, n_ssa, ssa_seed, jobs)


def log_likelihood(net: Network, params: ModelParams, obs: ObservationSeries,
                   solver="tt", cfg: SolverConfig = None, n_ssa=1000,
                   ssa_seed=None, jobs=1) -> LikelihoodReport:
    """Log-likelihood of the observations under a candidate network.

    tt/dense factors are floored at PROB_FLOOR (counted in n_floored);
    an SSA factor of exactly zero is reported as an unresolved -inf
    likelihood rather than floored.
    """
    probs = interval_probabilities(net, params, obs, solver, cfg, n_ssa,
                                   ssa_seed, jobs)
    if solver == "ssa":
        per_interval = np.full(len(probs), -np.inf)
        positive = probs > 0
        per_interval[positive] = np.log10(probs[positive])
        n_floored = 0
    else:
        n_floored = int(np.count_nonzero(probs < PROB_FLOOR))
        per_interval = np.log10(np.maximum(probs, PROB_FLOOR))
    if np.isneginf(per_interval).any():
        log_like = -math.inf
    else:
        log_like = math.log(10.0) * float(np.sum(per_interval))
    return LikelihoodReport(log_like=log_like, per_interval=per_interval,
                            n_floored=n_floored, solver_used=solver)


def contrast_matrix(truth: Network, datasets, params: ModelParams,
                    solver="tt", cfg: SolverConfig = None, n_ssa=1000,
                    ssa_seed=None) -> np.ndarray:
    """Mean log10-likelihood gap of every single-link toggle of truth.

    Entry (m, n) is the mean over datasets of log10 L(truth with {m, n}
    toggled) - log10 L(truth); the matrix is symmetric with zero diagonal.
    """
    datasets = list(datasets)
    if not datasets:
        raise ValueError("need at least one dataset")
    n = truth.n_nodes
    total = np.zeros((n, n))
    for obs in datasets:
        ref = log_likelihood(truth, params, obs, solver, cfg, n_ssa, ssa_seed)
        for i, j in all_pairs(n):
            toggled = truth.with_edge_toggled((i, j))
            rep = log_likelihood(toggled, params, obs, solver, cfg, n_ssa, ssa_seed)
            gap = rep.log10_like - ref.log10_like
            total[i, j] += gap
            total[j, i] += gap
    return total / len(datasets)


def serialize_contrast(matrix) -> str:
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    lines = ["m\tn\tcontrast"]
    for i, j in all_pairs(n):
        lines.append(f"{j + 1}\t{i + 1}\t{matrix[i, j]:.10g}")
    return "\n".join(lines) + "\n"
