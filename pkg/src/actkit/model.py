"""Attack countermeasure tree model: node kinds, validation, scenario transforms.

An act is a rooted tree. Internal nodes are AND/OR gates; a countermeasure
gate may appear as the child of an AND gate and couples one detection and one
mitigation event. Leaves are attack, detection or mitigation events carrying
probability/timing parameters.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Union

from .errors import MissingParameter
from .timing import rate_from_probability


@dataclass(frozen=True)
class LeafTiming:
    """Success probability and completion-time parameters of a basic event.

    ``p`` with horizon ``t`` (hours) or an explicit rate ``lam`` drives the
    timed behaviour; an explicit rate wins, otherwise the rate is derived as
    ``-ln(1 - p) / t``. Static analysis always reads ``p``, which may be
    absent on rate-only leaves built programmatically.
    """

    p: float | None = None
    t: float | None = None
    lam: float | None = None

    def probability(self) -> float:
        if self.p is None:
            raise MissingParameter("leaf has no success probability")
        return self.p

    def rate(self) -> float:
        """Completion rate per hour. Raises RateUndefined when p == 1."""
        if self.lam is not None:
            return self.lam
        if self.p is None or self.t is None:
            raise MissingParameter("leaf has neither a rate nor (p, t)")
        return rate_from_probability(self.p, self.t)


@dataclass(frozen=True)
class AttackLeaf:
    timing: LeafTiming


@dataclass(frozen=True)
class DetectLeaf:
    timing: LeafTiming


@dataclass(frozen=True)
class MitigateLeaf:
    timing: LeafTiming


@dataclass(frozen=True)
class AndGate:
    children: tuple[int, ...]


@dataclass(frozen=True)
class OrGate:
    children: tuple[int, ...]


@dataclass(frozen=True)
class CmGate:
    """Countermeasure gate: one detection event followed by one mitigation."""

    detect: int
    mitigate: int

    @property
    def children(self) -> tuple[int, int]:
        return (self.detect, self.mitigate)


NodeKind = Union[AttackLeaf, DetectLeaf, MitigateLeaf, AndGate, OrGate, CmGate]

LEAF_KINDS = (AttackLeaf, DetectLeaf, MitigateLeaf)


@dataclass(frozen=True)
class Node:
    ident: str
    name: str
    kind: NodeKind


@dataclass(frozen=True)
class Act:
    """A named attack countermeasure tree with a dense node table."""

    title: str
    root: int
    nodes: tuple[Node, ...]

    def node(self, nid: int) -> Node:
        return self.nodes[nid]

    def kind(self, nid: int) -> NodeKind:
        return self.nodes[nid].kind

    def children(self, nid: int) -> tuple[int, ...]:
        kind = self.nodes[nid].kind
        if isinstance(kind, (AndGate, OrGate, CmGate)):
            return kind.children
        return ()

    def attack_leaves(self) -> Iterator[int]:
        for nid, node in enumerate(self.nodes):
            if isinstance(node.kind, AttackLeaf):
                yield nid

    def cm_gates(self) -> Iterator[int]:
        for nid, node in enumerate(self.nodes):
            if isinstance(node.kind, CmGate):
                yield nid


class Scenario(Enum):
    """Defender configuration applied before an analysis."""

    NO_CM = "no-cm"
    DETECT_ONLY = "detect-only"
    FULL = "full"


@dataclass(frozen=True)
class Diagnostic:
    """One validation violation with a machine-readable rule id."""

    code: str
    node: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at '{self.node}': {self.message}"


def _check_timing(node: Node, out: list[Diagnostic]) -> None:
    tm = node.kind.timing
    bad = lambda code, msg: out.append(Diagnostic(code, node.name, msg))
    if tm.p is None and tm.lam is None:
        bad("LeafParam", "leaf carries neither a probability nor a rate")
    if tm.p is not None and (math.isnan(tm.p) or not 0.0 <= tm.p <= 1.0):
        bad("LeafParam", f"probability {tm.p!r} outside [0, 1]")
    if tm.t is not None and (not math.isfinite(tm.t) or tm.t <= 0.0):
        bad("LeafParam", f"horizon {tm.t!r} is not a positive number of hours")
    if tm.lam is not None and (not math.isfinite(tm.lam) or tm.lam < 0.0):
        bad("LeafParam", f"rate {tm.lam!r} is not finite and non-negative")


def validate_act(act: Act) -> list[Diagnostic]:
    """Check every structural rule; returns one diagnostic per violation.

    An empty list means the act is a well-formed tree: acyclic, single-rooted,
    no shared subtrees, gates non-empty, countermeasure gates placed under AND
    gates with exactly one detection and one mitigation child, and all leaf
    parameters in range.
    """
    out: list[Diagnostic] = []
    n = len(act.nodes)
    if not 0 <= act.root < n:
        out.append(Diagnostic("RootMissing", str(act.root), "root id is not in the node table"))
        return out

    dangling = False
    for node in act.nodes:
        for c in _kind_children(node.kind):
            if not 0 <= c < n:
                out.append(Diagnostic("DanglingReference", node.name, f"child id {c} is not in the node table"))
                dangling = True
    if dangling:
        return out

    parents: list[list[int]] = [[] for _ in range(n)]
    for nid, node in enumerate(act.nodes):
        for c in _kind_children(node.kind):
            parents[c].append(nid)

    for nid, node in enumerate(act.nodes):
        if nid == act.root:
            if parents[nid]:
                out.append(Diagnostic("RootHasParent", node.name, "the root must not appear as a child"))
        elif len(parents[nid]) == 0:
            out.append(Diagnostic("OrphanNode", node.name, "node is defined but never referenced"))
        elif len(parents[nid]) > 1:
            out.append(Diagnostic("SharedSubtree", node.name, f"node has {len(parents[nid])} parents; subtrees must not be shared"))

    # cycle check: iterative DFS colouring over the whole table
    color = [0] * n  # 0 unvisited, 1 on stack, 2 done
    for start in range(n):
        if color[start]:
            continue
        stack: list[tuple[int, int]] = [(start, 0)]
        color[start] = 1
        while stack:
            v, i = stack[-1]
            kids = _kind_children(act.nodes[v].kind)
            if i < len(kids):
                stack[-1] = (v, i + 1)
                c = kids[i]
                if color[c] == 1:
                    out.append(Diagnostic("CycleDetected", act.nodes[v].name, f"edge to '{act.nodes[c].name}' closes a cycle"))
                elif color[c] == 0:
                    color[c] = 1
                    stack.append((c, 0))
            else:
                color[v] = 2
                stack.pop()

    for nid, node in enumerate(act.nodes):
        kind = node.kind
        if isinstance(kind, (AndGate, OrGate)):
            if not kind.children:
                out.append(Diagnostic("GateArity", node.name, "gate has no children"))
            if isinstance(kind, AndGate):
                cms = [c for c in kind.children if isinstance(act.nodes[c].kind, CmGate)]
                if len(cms) > 1:
                    out.append(Diagnostic("CmPlacement", node.name, "an AND gate may hold at most one countermeasure child"))
                if cms and len(cms) == len(kind.children):
                    out.append(Diagnostic("CmPlacement", node.name, "an AND gate with a countermeasure needs at least one attack-side child"))
            else:
                for c in kind.children:
                    if isinstance(act.nodes[c].kind, CmGate):
                        out.append(Diagnostic("CmPlacement", act.nodes[c].name, "countermeasure gates may only be children of AND gates"))
        elif isinstance(kind, CmGate):
            if not isinstance(act.nodes[kind.detect].kind, DetectLeaf):
                out.append(Diagnostic("CmChildren", node.name, "first countermeasure child must be a detection event"))
            if not isinstance(act.nodes[kind.mitigate].kind, MitigateLeaf):
                out.append(Diagnostic("CmChildren", node.name, "second countermeasure child must be a mitigation event"))
            if nid == act.root:
                out.append(Diagnostic("CmPlacement", node.name, "countermeasure gates may only be children of AND gates"))
        elif isinstance(kind, DetectLeaf):
            if any(not isinstance(act.nodes[p].kind, CmGate) for p in parents[nid]):
                out.append(Diagnostic("LeafPlacement", node.name, "detection events may only appear under a countermeasure gate"))
            _check_timing(node, out)
        elif isinstance(kind, MitigateLeaf):
            if any(not isinstance(act.nodes[p].kind, CmGate) for p in parents[nid]):
                out.append(Diagnostic("LeafPlacement", node.name, "mitigation events may only appear under a countermeasure gate"))
            _check_timing(node, out)
        elif isinstance(kind, AttackLeaf):
            if any(isinstance(act.nodes[p].kind, CmGate) for p in parents[nid]):
                out.append(Diagnostic("CmChildren", node.name, "attack events cannot be countermeasure children"))
            _check_timing(node, out)
    return out


def _kind_children(kind: NodeKind) -> tuple[int, ...]:
    if isinstance(kind, (AndGate, OrGate, CmGate)):
        return kind.children
    return ()


def _rebuild_without(act: Act, removed: set[int]) -> Act:
    """Drop the given nodes, strip them from AND children, and reindex densely."""
    remap: dict[int, int] = {}
    kept: list[Node] = []
    for nid, node in enumerate(act.nodes):
        if nid in removed:
            continue
        remap[nid] = len(kept)
        kept.append(node)
    rebuilt: list[Node] = []
    for node in kept:
        kind = node.kind
        if isinstance(kind, AndGate):
            kind = AndGate(tuple(remap[c] for c in kind.children if c not in removed))
        elif isinstance(kind, OrGate):
            kind = OrGate(tuple(remap[c] for c in kind.children))
        elif isinstance(kind, CmGate):
            kind = CmGate(remap[kind.detect], remap[kind.mitigate])
        rebuilt.append(replace(node, kind=kind))
    return Act(act.title, remap[act.root], tuple(rebuilt))


def remove_cm_gates(act: Act, cm_ids: set[int]) -> Act:
    """Delete the given countermeasure gates and their detection/mitigation leaves."""
    removed: set[int] = set()
    for nid in cm_ids:
        kind = act.nodes[nid].kind
        if not isinstance(kind, CmGate):
            raise ValueError(f"node {nid} is not a countermeasure gate")
        removed.update((nid, kind.detect, kind.mitigate))
    if not removed:
        return act
    return _rebuild_without(act, removed)


INSTANT_MITIGATION = LeafTiming(p=1.0, t=1.0)


def apply_scenario(act: Act, scenario: Scenario) -> Act:
    """Rewrite the model for a defender configuration.

    no-cm deletes every countermeasure gate (an AND left with one child acts
    as a pass-through). detect-only makes every mitigation instantaneous,
    which statically reads as probability 1. full is the identity.
    """
    if scenario is Scenario.FULL:
        return act
    if scenario is Scenario.NO_CM:
        return remove_cm_gates(act, set(act.cm_gates()))
    nodes = []
    for node in act.nodes:
        if isinstance(node.kind, MitigateLeaf):
            node = replace(node, kind=MitigateLeaf(INSTANT_MITIGATION))
        nodes.append(node)
    return Act(act.title, act.root, tuple(nodes))


def with_attack_probability(act: Act, p: float) -> Act:
    """Set every attack leaf's success probability to ``p``.

    Detection and mitigation events keep their modelled values. The leaf's
    horizon is kept (default 1 hour) and any explicit rate is dropped so the
    timed rate re-derives from the new probability.
    """
    nodes = []
    for node in act.nodes:
        if isinstance(node.kind, AttackLeaf):
            t = node.kind.timing.t if node.kind.timing.t is not None else 1.0
            node = replace(node, kind=AttackLeaf(LeafTiming(p=p, t=t)))
        nodes.append(node)
    return Act(act.title, act.root, tuple(nodes))


# -- programmatic construction ------------------------------------------------

@dataclass
class _Spec:
    tag: str
    name: str
    timing: LeafTiming | None = None
    children: tuple["_Spec", ...] = ()


def attack(name: str, p: float | None = None, t: float | None = 1.0, lam: float | None = None) -> _Spec:
    if lam is not None and p is None:
        t = None
    return _Spec("attack", name, LeafTiming(p=p, t=t, lam=lam))


def detect(name: str, p: float, t: float = 1.0, lam: float | None = None) -> _Spec:
    return _Spec("detect", name, LeafTiming(p=p, t=t, lam=lam))


def mitigate(name: str, p: float, t: float = 1.0, lam: float | None = None) -> _Spec:
    return _Spec("mitigate", name, LeafTiming(p=p, t=t, lam=lam))


def and_gate(name: str, *children: _Spec) -> _Spec:
    return _Spec("and", name, children=tuple(children))


def or_gate(name: str, *children: _Spec) -> _Spec:
    return _Spec("or", name, children=tuple(children))


def cm_gate(name: str, detect_spec: _Spec, mitigate_spec: _Spec) -> _Spec:
    return _Spec("cm", name, children=(detect_spec, mitigate_spec))


def _slug(name: str, used: set[str]) -> str:
    base = re.sub(r"[^a-z0-9_]+", "_", name.lower()).strip("_") or "n"
    if base[0].isdigit():
        base = "n" + base
    slug, k = base, 1
    while slug in used:
        k += 1
        slug = f"{base}_{k}"
    used.add(slug)
    return slug


def build_act(title: str, root: _Spec, validate: bool = True) -> Act:
    """Assemble an Act from nested specs, assigning ids in preorder."""
    from .errors import ActValidationError

    nodes: list[Node] = []
    used: set[str] = set()

    def walk(spec: _Spec) -> int:
        nid = len(nodes)
        nodes.append(None)  # reserve the preorder slot
        ident = _slug(spec.name, used)
        kids = tuple(walk(c) for c in spec.children)
        if spec.tag == "attack":
            kind: NodeKind = AttackLeaf(spec.timing)
        elif spec.tag == "detect":
            kind = DetectLeaf(spec.timing)
        elif spec.tag == "mitigate":
            kind = MitigateLeaf(spec.timing)
        elif spec.tag == "and":
            kind = AndGate(kids)
        elif spec.tag == "or":
            kind = OrGate(kids)
        elif spec.tag == "cm":
            kind = CmGate(*kids)
        else:
            raise ValueError(f"unknown spec tag {spec.tag!r}")
        nodes[nid] = Node(ident, spec.name, kind)
        return nid

    root_id = walk(root)
    act = Act(title, root_id, tuple(nodes))
    if validate:
        diagnostics = validate_act(act)
        if diagnostics:
            raise ActValidationError(diagnostics)
    return act
