"""Static (untimed) goal probability and probability sweeps.

Leaf successes are independent Bernoulli events. Gates combine bottom-up:
AND multiplies child probabilities, OR complements the product of failure
probabilities, and a countermeasure contributes the attacker-facing factor
``1 - p_detect * p_mitigate`` to its enclosing AND gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .model import (
    Act,
    AndGate,
    AttackLeaf,
    CmGate,
    DetectLeaf,
    MitigateLeaf,
    OrGate,
    Scenario,
    apply_scenario,
    with_attack_probability,
)


def static_probability(act: Act, scenario: Scenario = Scenario.FULL) -> float:
    """Probability that the attack at the root succeeds, ignoring time.

    The returned double is derived from whichever of the success/failure
    accumulations is the small one, so it is correctly rounded on both ends
    of [0, 1] and ordered consistently across scenarios.
    """
    succ, fail = _evaluate(apply_scenario(act, scenario))
    return succ if succ <= fail else 1.0 - fail


def static_failure(act: Act, scenario: Scenario = Scenario.FULL) -> float:
    """Complement of static_probability at full relative precision.

    Near-certain goals have complements far below one ulp of 1.0, where
    ``1 - static_probability`` rounds to zero; this route keeps them exact
    enough to compare scenarios whose probabilities all round to 1.0.
    """
    succ, fail = _evaluate(apply_scenario(act, scenario))
    return fail if fail <= succ else 1.0 - succ


def _evaluate(resolved: Act) -> tuple[float, float]:
    """Root (success, failure) probabilities, each accumulated on its own.

    Success and failure are carried side by side: products keep relative
    precision, and each complement telescopes into a sum of non-negative
    terms instead of a catastrophic ``1 - product``.
    """
    succ: dict[int, float] = {}
    fail: dict[int, float] = {}
    for nid in _postorder(resolved):
        kind = resolved.nodes[nid].kind
        if isinstance(kind, (AttackLeaf, DetectLeaf, MitigateLeaf)):
            p = kind.timing.probability()
            succ[nid], fail[nid] = p, 1.0 - p
        elif isinstance(kind, CmGate):
            q = succ[kind.detect] * succ[kind.mitigate]
            succ[nid], fail[nid] = 1.0 - q, q
        elif isinstance(kind, AndGate):
            # 1 - p1..pk = (1-p1) + p1(1-p2) + p1 p2 (1-p3) + ...
            p, q = 1.0, 0.0
            for c in kind.children:
                q += p * fail[c]
                p *= succ[c]
            succ[nid], fail[nid] = p, q
        elif isinstance(kind, OrGate):
            p, q = 0.0, 1.0
            for c in kind.children:
                p += q * succ[c]
                q *= fail[c]
            succ[nid], fail[nid] = p, q
    return succ[resolved.root], fail[resolved.root]


def _postorder(act: Act) -> list[int]:
    order: list[int] = []
    stack: list[tuple[int, bool]] = [(act.root, False)]
    while stack:
        nid, expanded = stack.pop()
        if expanded:
            order.append(nid)
            continue
        stack.append((nid, True))
        for c in act.children(nid):
            stack.append((c, False))
    return order


@dataclass(frozen=True)
class SweepResult:
    """Goal probability as a function of a common attack-leaf probability."""

    scenario: Scenario
    grid: tuple[float, ...]
    pgoal: tuple[float, ...]


def sweep_pleaf(act: Act, grid: Sequence[float], scenarios: Sequence[Scenario] = tuple(Scenario)) -> list[SweepResult]:
    """Evaluate static_probability with every attack leaf set to each grid value.

    The grid must be strictly increasing within [0, 1]. Detection and
    mitigation probabilities keep their modelled values.
    """
    grid = tuple(float(x) for x in grid)
    if not grid:
        raise DomainError("sweep grid is empty")
    for a, b in zip(grid, grid[1:]):
        if not a < b:
            raise DomainError("sweep grid must be strictly increasing")
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise DomainError("sweep grid must lie in [0, 1]")
    results = []
    for scenario in scenarios:
        pgoal = tuple(static_probability(with_attack_probability(act, x), scenario) for x in grid)
        results.append(SweepResult(scenario, grid, pgoal))
    return results
