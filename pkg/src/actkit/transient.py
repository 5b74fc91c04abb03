"""Time-dependent goal probability: uniformization solver and Monte Carlo check.

The solver computes P[in goal at t] for the absorbing chain by
uniformization: the chain is embedded into a discrete-time chain at a
uniform event rate and the transient distribution becomes a Poisson-weighted
sum of its powers, truncated once the neglected tail is below the requested
tolerance. The simulator replays the same race semantics with sampled
exponential completion times and reports binomial half-widths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import poisson

from .errors import DomainError
from .model import (
    Act,
    AndGate,
    AttackLeaf,
    CmGate,
    OrGate,
    Scenario,
    apply_scenario,
)
from .semantics import Ctmc, collect_rates

_RNG_NAME = "philox4x64"
_CHUNK = 1 << 17


@dataclass(frozen=True)
class CurveResult:
    """Goal probability sampled on a time grid.

    ``halfwidths`` holds three-sigma binomial half-widths for simulated
    curves and is None for solver output. ``meta`` records where the numbers
    came from (model, scenario, tolerance or run count and seed).
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    scenario: Scenario | None
    meta: dict
    halfwidths: tuple[float, ...] | None = None


def _check_grid(times: Sequence[float]) -> np.ndarray:
    ts = np.asarray(list(times), dtype=float)
    if ts.size == 0:
        raise DomainError("time grid is empty")
    if not np.all(np.isfinite(ts)) or ts[0] < 0.0:
        raise DomainError("time grid must be finite and non-negative")
    if np.any(np.diff(ts) <= 0.0):
        raise DomainError("time grid must be strictly increasing")
    return ts


def transient_probability(ctmc: Ctmc, times: Sequence[float], epsilon: float = 1e-9) -> CurveResult:
    """P[goal reached by t] for each grid point, within ``epsilon``.

    Parameters
    ----------
    ctmc : Ctmc
        Absorbing chain from ``compose``.
    times : sequence of float
        Strictly increasing grid of hours, each >= 0.
    epsilon : float
        Poisson truncation tolerance in (0, 1e-3]. Halving it never moves
        any output by more than the previous value.
    """
    if not 0.0 < epsilon <= 1e-3:
        raise DomainError(f"epsilon must lie in (0, 1e-3], got {epsilon!r}")
    ts = _check_grid(times)

    goal = sorted(ctmc.goal)
    meta = {
        "method": "uniformization",
        "epsilon": epsilon,
        "states": ctmc.n,
        "model": ctmc.title,
    }
    n = ctmc.n
    exit_rates = np.asarray(ctmc.rates.sum(axis=1)).ravel()
    rate = float(exit_rates.max(initial=0.0))
    init_in_goal = 1.0 if ctmc.init in ctmc.goal else 0.0
    if rate == 0.0 or not goal:
        ys = tuple(init_in_goal if goal else 0.0 for _ in ts)
        return CurveResult(tuple(ts), ys, ctmc.scenario, meta)

    # uniformized jump chain
    P = (ctmc.rates / rate).tolil()
    P.setdiag(1.0 - exit_rates / rate)
    PT = P.tocsr().T.tocsr()

    mu_max = rate * float(ts[-1])
    K = int(poisson.isf(epsilon, mu_max)) if mu_max > 0.0 else 0
    while poisson.sf(K, mu_max) > epsilon:
        K += 1

    v = np.zeros(n)
    v[ctmc.init] = 1.0
    g = np.empty(K + 1)
    for k in range(K + 1):
        g[k] = v[goal].sum()
        if k < K:
            v = PT.dot(v)

    ks = np.arange(K + 1)
    weights = poisson.pmf(ks[None, :], (rate * ts)[:, None])
    ys = np.clip(weights @ g, 0.0, 1.0)
    meta["uniformization_rate"] = rate
    meta["poisson_terms"] = K + 1
    return CurveResult(tuple(ts), tuple(float(y) for y in ys), ctmc.scenario, meta)


def _simulation_plan(act: Act):
    """Leaf order and race structure for vectorised sampling."""
    leaves = []
    cms = {}
    for nid, node in enumerate(act.nodes):
        if isinstance(node.kind, AttackLeaf):
            leaves.append(nid)
    leaf_rates, cm_rates = collect_rates(act)
    for nid in sorted(cm_rates):
        cms[nid] = cm_rates[nid]
    return leaves, leaf_rates, cms


def _sample_exponential(rng, rate: float, size: int) -> np.ndarray:
    if rate <= 0.0:
        return np.full(size, np.inf)
    return rng.exponential(1.0 / rate, size)


def simulate(
    act: Act,
    scenario: Scenario,
    times: Sequence[float],
    runs: int,
    seed: int,
) -> CurveResult:
    """Monte Carlo estimate of the timed goal probability.

    Each run draws one exponential completion time per attack leaf and per
    countermeasure phase, then evaluates the tree bottom-up: OR takes the
    earliest child, AND the latest attack-side child unless that time is
    beaten by the countermeasure's detection plus mitigation total, in which
    case the gate never succeeds. Deterministic for fixed (seed, runs, grid).
    """
    if runs <= 0:
        raise DomainError("runs must be positive")
    ts = _check_grid(times)
    resolved = apply_scenario(act, scenario)
    leaves, leaf_rates, cms = _simulation_plan(resolved)

    rng = np.random.Generator(np.random.Philox(seed))
    counts = np.zeros(ts.size, dtype=np.int64)
    remaining = runs
    while remaining > 0:
        size = min(_CHUNK, remaining)
        remaining -= size
        samples = {nid: _sample_exponential(rng, leaf_rates[nid], size) for nid in leaves}
        deadlines = {}
        for nid, rates in cms.items():
            deadline = _sample_exponential(rng, rates.detect, size)
            if rates.mitigate is not None:
                deadline = deadline + _sample_exponential(rng, rates.mitigate, size)
            deadlines[nid] = deadline
        root_time = _completion_times(resolved, resolved.root, samples, deadlines)
        counts += np.searchsorted(np.sort(root_time), ts, side="right")

    phat = counts / runs
    sigma = np.sqrt(phat * (1.0 - phat) / runs)
    meta = {
        "method": "monte-carlo",
        "rng": _RNG_NAME,
        "seed": seed,
        "runs": runs,
        "model": act.title,
    }
    return CurveResult(tuple(ts), tuple(float(p) for p in phat), scenario, meta,
                       halfwidths=tuple(float(3.0 * s) for s in sigma))


def _completion_times(act: Act, nid: int, samples, deadlines) -> np.ndarray:
    kind = act.nodes[nid].kind
    if isinstance(kind, AttackLeaf):
        return samples[nid]
    if isinstance(kind, OrGate):
        return np.minimum.reduce([_completion_times(act, c, samples, deadlines) for c in kind.children])
    if isinstance(kind, AndGate):
        cm = next((c for c in kind.children if isinstance(act.nodes[c].kind, CmGate)), None)
        attack_side = [_completion_times(act, c, samples, deadlines) for c in kind.children if c != cm]
        done = np.maximum.reduce(attack_side)
        if cm is None:
            return done
        return np.where(done < deadlines[cm], done, np.inf)
    raise DomainError(f"cannot simulate node kind {type(kind).__name__}")
