"""Stochastic semantics: per-node automata and the composed absorbing CTMC.

Every leaf runs an exponential clock that starts at time zero (activation
signals cascade through the gates instantaneously). An AND gate with a
countermeasure child succeeds only if all its attack-side children complete
strictly before the countermeasure finishes detection plus mitigation; a
countermeasure finishing first permanently disables that AND gate.

Two constructions of the same chain are provided: a direct one over leaf and
countermeasure completion statuses, and a product of per-node interactive
Markov automata closed under maximal progress. Both collapse successful
states into a single absorbing goal state and states from which the goal is
unreachable into a single absorbing blocked state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import sparse

from .errors import ActError, MissingParameter, RateUndefined, StateSpaceLimit
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
)

DEFAULT_STATE_CAP = 1_000_000

# completion status codes used by the direct construction
_PENDING, _DONE, _CLOSED = 0, 1, 2
# countermeasure phase codes: detecting, mitigating, finished first, stood down
_CM_DETECT, _CM_MITIGATE, _CM_WON, _CM_CANCELLED = 0, 1, 2, 3
# three-valued node evaluation
_P, _S, _D = 0, 1, 2


# -- interactive Markov automata ----------------------------------------------

@dataclass(frozen=True)
class Imc:
    """A small interactive Markov automaton for one tree node.

    ``interactive`` transitions are immediate and labelled ``(kind, node,
    direction)`` with direction '!' for emitted signals and '?' for consumed
    ones; matching '!'/'?' pairs synchronise in the product. ``markovian``
    transitions carry exponential rates. Zero-rate edges are kept for
    structure but never fire.
    """

    n_states: int
    init: int
    interactive: tuple[tuple[int, tuple[str, int, str], int], ...]
    markovian: tuple[tuple[int, float, int], ...]
    accepting: frozenset[int]

    def alphabet(self) -> frozenset[tuple[str, int]]:
        return frozenset((k, n) for _, (k, n, _), _ in self.interactive)


def bas_imc(node: int, rate: float) -> Imc:
    """Basic attack step: wait for activation, delay, emit success."""
    return Imc(
        n_states=4,
        init=0,
        interactive=((0, ("act", node, "?"), 1), (2, ("succ", node, "!"), 3)),
        markovian=((1, float(rate), 2),),
        accepting=frozenset({3}),
    )


def gate_imc(kind: str, node: int, children: tuple[int, ...]) -> Imc:
    """AND/OR gate automaton generalised to any number of children.

    On activation the gate emits activation signals to its children in order.
    An AND gate collects success signals from all children in any
    interleaving before emitting its own; an OR gate emits after the first.
    """
    if kind == "and":
        return _and_imc(node, children, cm_child=None)
    if kind == "or":
        return _or_imc(node, children)
    raise ValueError(f"unknown gate kind {kind!r}")


def _activation_chain(node: int, children: tuple[int, ...]):
    # state 0 --act?--> 1 --act c0!--> 2 --...--> 1+len(children)
    edges = [(0, ("act", node, "?"), 1)]
    for i, c in enumerate(children):
        edges.append((1 + i, ("act", c, "!"), 2 + i))
    return edges, 1 + len(children)


def _or_imc(node: int, children: tuple[int, ...]) -> Imc:
    edges, wait = _activation_chain(node, children)
    nxt = wait + 1
    acc = wait + 1 + len(children)
    for i, c in enumerate(children):
        got = nxt + i
        edges.append((wait, ("succ", c, "?"), got))
        edges.append((got, ("succ", node, "!"), acc))
    return Imc(acc + 1, 0, tuple(edges), (), frozenset({acc}))


def _and_imc(node: int, children: tuple[int, ...], cm_child: int | None) -> Imc:
    """AND gate; with ``cm_child`` set, the countermeasure's completion signal
    moves any still-collecting state into a dead sink."""
    edges, wait = _activation_chain(node, children)
    collect = tuple(c for c in children if c != cm_child)
    subsets: dict[frozenset, int] = {}

    def subset_state(s: frozenset) -> int:
        if s not in subsets:
            subsets[s] = wait + len(subsets)
        return subsets[s]

    full = frozenset(collect)
    assert subset_state(frozenset()) == wait
    # breadth-first over the subset lattice keeps state numbering stable
    frontier = [frozenset()]
    seen = {frozenset()}
    while frontier:
        nxt = []
        for s in frontier:
            for c in collect:
                if c in s:
                    continue
                s2 = s | {c}
                edges.append((subset_state(s), ("succ", c, "?"), subset_state(s2)))
                if s2 not in seen:
                    seen.add(s2)
                    nxt.append(s2)
        frontier = nxt
    acc = wait + len(subsets)
    edges.append((subset_state(full), ("succ", node, "!"), acc))
    n = acc + 1
    if cm_child is not None:
        dead = n
        n += 1
        for s, idx in subsets.items():
            if s != full:
                edges.append((idx, ("done", cm_child, "?"), dead))
    return Imc(n, 0, tuple(edges), (), frozenset({acc}))


def cm_imc(node: int, detect_rate: float, mitigate_rate: float | None) -> Imc:
    """Countermeasure: activation, detection delay, mitigation delay, done.

    ``mitigate_rate=None`` models instantaneous mitigation (single phase).
    """
    if mitigate_rate is None:
        return Imc(
            n_states=4,
            init=0,
            interactive=((0, ("act", node, "?"), 1), (2, ("done", node, "!"), 3)),
            markovian=((1, float(detect_rate), 2),),
            accepting=frozenset({3}),
        )
    return Imc(
        n_states=5,
        init=0,
        interactive=((0, ("act", node, "?"), 1), (3, ("done", node, "!"), 4)),
        markovian=((1, float(detect_rate), 2), (2, float(mitigate_rate), 3)),
        accepting=frozenset({4}),
    )


# -- rate collection -----------------------------------------------------------

@dataclass(frozen=True)
class _CmRates:
    detect: float
    mitigate: float | None  # None means instantaneous mitigation


def _leaf_rate(act: Act, nid: int) -> float:
    try:
        return act.nodes[nid].kind.timing.rate()
    except (RateUndefined, MissingParameter) as exc:
        raise type(exc)(f"leaf '{act.nodes[nid].name}': {exc}") from None


def collect_rates(act: Act) -> tuple[dict[int, float], dict[int, _CmRates]]:
    """Completion rates for attack leaves and countermeasure phases.

    A mitigation leaf with probability 1 and no explicit rate means the
    mitigation is instantaneous; probability 1 anywhere else has no finite
    rate and raises RateUndefined.
    """
    leaf_rates: dict[int, float] = {}
    cm_rates: dict[int, _CmRates] = {}
    for nid, node in enumerate(act.nodes):
        if isinstance(node.kind, AttackLeaf):
            leaf_rates[nid] = _leaf_rate(act, nid)
        elif isinstance(node.kind, CmGate):
            det = _leaf_rate(act, node.kind.detect)
            mit_tm = act.nodes[node.kind.mitigate].kind.timing
            if mit_tm.lam is None and mit_tm.p == 1.0:
                mit: float | None = None
            else:
                mit = _leaf_rate(act, node.kind.mitigate)
            cm_rates[nid] = _CmRates(det, mit)
    return leaf_rates, cm_rates


# -- composed chain ------------------------------------------------------------

@dataclass(frozen=True)
class Ctmc:
    """Absorbing continuous-time Markov chain over a model's completions."""

    n: int
    init: int
    rates: sparse.csr_matrix  # off-diagonal transition rates, shape (n, n)
    goal: frozenset[int]
    blocked: frozenset[int]
    labels: tuple[str, ...]
    title: str | None = None
    scenario: Scenario | None = None
    method: str = "direct"


def compose(
    act: Act,
    scenario: Scenario = Scenario.FULL,
    method: str = "direct",
    state_cap: int = DEFAULT_STATE_CAP,
) -> Ctmc:
    """Build the absorbing chain for a model under a defender scenario.

    ``method`` is ``direct`` (completion-status states, recommended) or
    ``imc-product`` (explicit automata product, useful for cross-checks).
    Raises StateSpaceLimit when more than ``state_cap`` states are reachable
    and RateUndefined when a required leaf has probability 1.
    """
    resolved = apply_scenario(act, scenario)
    leaf_rates, cm_rates = collect_rates(resolved)
    if method == "direct":
        raw = _build_direct(resolved, leaf_rates, cm_rates, state_cap)
    elif method == "imc-product":
        raw = _build_product(resolved, leaf_rates, cm_rates, state_cap)
    else:
        raise ValueError(f"unknown construction method {method!r}")
    return _collapse(*raw, title=act.title, scenario=scenario, method=method)


_GOAL = "goal"
_BLOCKED = "blocked"


class _DirectBuilder:
    """Reachability over (leaf status, countermeasure phase) vectors.

    After every transition the state is normalised: decided races are
    recorded in the countermeasure phase, pending events that can no longer
    influence the root are closed, and fully decided roots map to the goal or
    blocked sentinels.
    """

    def __init__(self, act: Act, leaf_rates: dict[int, float], cm_rates: dict[int, _CmRates]):
        self.act = act
        self.leaves = sorted(leaf_rates)
        self.leaf_idx = {nid: i for i, nid in enumerate(self.leaves)}
        self.leaf_rate = [leaf_rates[nid] for nid in self.leaves]
        self.cms = sorted(cm_rates)
        self.cm_idx = {nid: i for i, nid in enumerate(self.cms)}
        self.cm_rate = [cm_rates[nid] for nid in self.cms]
        self.cm_owner = {}  # cm node id -> enclosing AND node id
        for nid, node in enumerate(act.nodes):
            if isinstance(node.kind, AndGate):
                for c in node.kind.children:
                    if isinstance(act.nodes[c].kind, CmGate):
                        self.cm_owner[c] = nid
        self.order = self._postorder()

    def _postorder(self) -> list[int]:
        order, stack = [], [(self.act.root, False)]
        while stack:
            nid, expanded = stack.pop()
            if expanded:
                order.append(nid)
                continue
            stack.append((nid, True))
            for c in self.act.children(nid):
                stack.append((c, False))
        return order

    def _values(self, leafstat, cmstat) -> list[int]:
        act = self.act
        vals = [_P] * len(act.nodes)
        for nid in self.order:
            kind = act.nodes[nid].kind
            if isinstance(kind, AttackLeaf):
                vals[nid] = _S if leafstat[self.leaf_idx[nid]] == _DONE else _P
            elif isinstance(kind, (DetectLeaf, MitigateLeaf, CmGate)):
                continue
            elif isinstance(kind, AndGate):
                cm = next((c for c in kind.children if isinstance(act.nodes[c].kind, CmGate)), None)
                if cm is not None and cmstat[self.cm_idx[cm]] == _CM_WON:
                    vals[nid] = _D
                    continue
                attack_side = [vals[c] for c in kind.children if c != cm]
                if any(v == _D for v in attack_side):
                    vals[nid] = _D
                elif all(v == _S for v in attack_side):
                    vals[nid] = _S
            elif isinstance(kind, OrGate):
                child_vals = [vals[c] for c in kind.children]
                if any(v == _S for v in child_vals):
                    vals[nid] = _S
                elif all(v == _D for v in child_vals):
                    vals[nid] = _D
        return vals

    def normalize(self, leafstat: list[int], cmstat: list[int]):
        vals = self._values(leafstat, cmstat)
        if vals[self.act.root] == _S:
            return _GOAL
        if vals[self.act.root] == _D:
            return _BLOCKED

        # nodes still able to change the root's outcome
        relevant = [False] * len(self.act.nodes)
        stack = [self.act.root]
        while stack:
            nid = stack.pop()
            relevant[nid] = True
            kind = self.act.nodes[nid].kind
            if isinstance(kind, (AndGate, OrGate)):
                for c in kind.children:
                    if not isinstance(self.act.nodes[c].kind, CmGate) and vals[c] == _P:
                        stack.append(c)

        for i, nid in enumerate(self.leaves):
            if leafstat[i] == _PENDING and not relevant[nid]:
                leafstat[i] = _CLOSED
        for i, nid in enumerate(self.cms):
            if cmstat[i] in (_CM_DETECT, _CM_MITIGATE) and not relevant[self.cm_owner[nid]]:
                cmstat[i] = _CM_CANCELLED
        return (tuple(leafstat), tuple(cmstat))

    def initial(self):
        return self.normalize([_PENDING] * len(self.leaves), [_CM_DETECT] * len(self.cms))

    def transitions(self, state):
        leafstat, cmstat = state
        out: dict[object, float] = {}
        for i, rate in enumerate(self.leaf_rate):
            if leafstat[i] == _PENDING and rate > 0.0:
                succ = self.normalize(list(leafstat[:i]) + [_DONE] + list(leafstat[i + 1:]), list(cmstat))
                out[succ] = out.get(succ, 0.0) + rate
        for i, rates in enumerate(self.cm_rate):
            phase = cmstat[i]
            if phase == _CM_DETECT and rates.detect > 0.0:
                nxt = _CM_WON if rates.mitigate is None else _CM_MITIGATE
            elif phase == _CM_MITIGATE and rates.mitigate is not None and rates.mitigate > 0.0:
                nxt = _CM_WON
            else:
                continue
            succ = self.normalize(list(leafstat), list(cmstat[:i]) + [nxt] + list(cmstat[i + 1:]))
            out[succ] = out.get(succ, 0.0) + (rates.detect if phase == _CM_DETECT else rates.mitigate)
        return out

    def label(self, state) -> str:
        leafstat, cmstat = state
        text = "leaves=" + "".join(str(s) for s in leafstat)
        if cmstat:
            text += " cms=" + "".join(str(s) for s in cmstat)
        return text


def _explore(builder, state_cap: int):
    """Generic breadth-first reachability shared by both constructions."""
    init = builder.initial()
    index: dict[object, int] = {}
    labels: list[str] = []
    edges: list[dict[int, float]] = []
    order: list[object] = []

    def intern(state) -> int:
        if state not in index:
            if len(index) >= state_cap:
                raise StateSpaceLimit(f"more than {state_cap} reachable states")
            index[state] = len(order)
            order.append(state)
            labels.append(state if isinstance(state, str) else builder.label(state))
            edges.append({})
        return index[state]

    intern(init)
    cursor = 0
    while cursor < len(order):
        state = order[cursor]
        if state not in (_GOAL, _BLOCKED):
            for succ, rate in builder.transitions(state).items():
                j = intern(succ)
                edges[cursor][j] = edges[cursor].get(j, 0.0) + rate
        cursor += 1
    goal_idx = index.get(_GOAL)
    return index[init], edges, labels, goal_idx


def _build_direct(act, leaf_rates, cm_rates, state_cap):
    return _explore(_DirectBuilder(act, leaf_rates, cm_rates), state_cap)


# -- product of automata -------------------------------------------------------

_ENV = -1  # pseudo node id for the activation environment


class _ProductBuilder:
    """Synchronous product of per-node automata under maximal progress."""

    def __init__(self, act: Act, leaf_rates: dict[int, float], cm_rates: dict[int, _CmRates]):
        self.act = act
        self.automata: list[Imc] = []
        self.owners: list[int] = []  # node id per automaton, _ENV for the environment
        root = act.root
        env = Imc(
            n_states=3,
            init=0,
            interactive=((0, ("act", root, "!"), 1), (1, ("succ", root, "?"), 2)),
            markovian=(),
            accepting=frozenset({2}),
        )
        self.automata.append(env)
        self.owners.append(_ENV)
        for nid, node in enumerate(act.nodes):
            kind = node.kind
            if isinstance(kind, AttackLeaf):
                imc = bas_imc(nid, leaf_rates[nid])
            elif isinstance(kind, AndGate):
                cm = next((c for c in kind.children if isinstance(act.nodes[c].kind, CmGate)), None)
                imc = _and_imc(nid, kind.children, cm)
            elif isinstance(kind, OrGate):
                imc = _or_imc(nid, kind.children)
            elif isinstance(kind, CmGate):
                imc = cm_imc(nid, cm_rates[nid].detect, cm_rates[nid].mitigate)
            else:
                continue  # detect/mitigate phases live inside cm_imc
            self.automata.append(imc)
            self.owners.append(nid)
        self.env_pos = 0
        # per automaton: action -> {local state: next local state}
        self.moves: list[dict[tuple[str, int, str], dict[int, int]]] = []
        for imc in self.automata:
            table: dict[tuple[str, int, str], dict[int, int]] = {}
            for s, action, d in imc.interactive:
                table.setdefault(action, {})[s] = d
            self.moves.append(table)
        # sync pairs: action key -> [(automaton, direction table), ...]
        self.sync: dict[tuple[str, int], list[tuple[int, str]]] = {}
        for ai, imc in enumerate(self.automata):
            for _, (kind, nid, direction), _ in imc.interactive:
                entry = (ai, direction)
                participants = self.sync.setdefault((kind, nid), [])
                if entry not in participants:
                    participants.append(entry)
        self.markov_from: list[dict[int, list[tuple[float, int]]]] = []
        for imc in self.automata:
            table: dict[int, list[tuple[float, int]]] = {}
            for s, rate, d in imc.markovian:
                if rate > 0.0:
                    table.setdefault(s, []).append((rate, d))
            self.markov_from.append(table)

    def _closure(self, locals_: tuple[int, ...]):
        """Fire enabled immediate actions until none remain (maximal progress)."""
        state = list(locals_)
        seen = {tuple(state)}
        while True:
            if state[self.env_pos] in self.automata[self.env_pos].accepting:
                return _GOAL
            fired = None
            for key in sorted(self.sync):
                participants = self.sync[key]
                nxts = []
                ok = True
                for ai, direction in participants:
                    nxt = self.moves[ai].get((key[0], key[1], direction), {}).get(state[ai])
                    if nxt is None:
                        ok = False
                        break
                    nxts.append((ai, nxt))
                if ok and participants:
                    fired = nxts
                    break
            if fired is None:
                return tuple(state)
            for ai, nxt in fired:
                state[ai] = nxt
            key = tuple(state)
            if key in seen:
                raise ActError("immediate-transition cycle in automata product")
            seen.add(key)

    def initial(self):
        return self._closure(tuple(imc.init for imc in self.automata))

    def transitions(self, state):
        out: dict[object, float] = {}
        for ai, table in enumerate(self.markov_from):
            for rate, dst in table.get(state[ai], ()):
                succ_locals = list(state)
                succ_locals[ai] = dst
                succ = self._closure(tuple(succ_locals))
                out[succ] = out.get(succ, 0.0) + rate
        return out

    def label(self, state) -> str:
        return "imc=" + ",".join(str(s) for s in state)


def _build_product(act, leaf_rates, cm_rates, state_cap):
    return _explore(_ProductBuilder(act, leaf_rates, cm_rates), state_cap)


# -- collapse and packaging ----------------------------------------------------

def _collapse(init, edges, labels, goal_idx, title, scenario, method) -> Ctmc:
    """Merge goal-unreachable states into one absorbing blocked state."""
    m = len(edges)
    co_reach = [False] * m
    if goal_idx is not None:
        rev: list[list[int]] = [[] for _ in range(m)]
        for u, succs in enumerate(edges):
            for v in succs:
                rev[v].append(u)
        stack = [goal_idx]
        co_reach[goal_idx] = True
        while stack:
            v = stack.pop()
            for u in rev[v]:
                if not co_reach[u]:
                    co_reach[u] = True
                    stack.append(u)

    if not co_reach[init]:
        return Ctmc(
            n=1, init=0, rates=sparse.csr_matrix((1, 1)),
            goal=frozenset(), blocked=frozenset({0}), labels=("blocked",),
            title=title, scenario=scenario, method=method,
        )

    # breadth-first renumbering of surviving states keeps output deterministic
    new_index: dict[int, int] = {init: 0}
    order = [init]
    cursor = 0
    needs_blocked = False
    while cursor < len(order):
        u = order[cursor]
        cursor += 1
        for v in edges[u]:
            if co_reach[v]:
                if v not in new_index:
                    new_index[v] = len(order)
                    order.append(v)
            else:
                needs_blocked = True
    blocked_new = len(order) if needs_blocked else None

    rows, cols, data = [], [], []
    for u in order:
        nu = new_index[u]
        merged = 0.0
        for v, rate in sorted(edges[u].items()):
            if co_reach[v]:
                rows.append(nu)
                cols.append(new_index[v])
                data.append(rate)
            else:
                merged += rate
        if merged > 0.0:
            rows.append(nu)
            cols.append(blocked_new)
            data.append(merged)

    n = len(order) + (1 if needs_blocked else 0)
    out_labels = [labels[u] for u in order]
    if needs_blocked:
        out_labels.append("blocked")
    goal = frozenset({new_index[goal_idx]}) if goal_idx is not None and co_reach[goal_idx] and goal_idx in new_index else frozenset()
    blocked = frozenset({blocked_new}) if needs_blocked else frozenset()
    rates = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
    return Ctmc(n=n, init=0, rates=rates, goal=goal, blocked=blocked,
                labels=tuple(out_labels), title=title, scenario=scenario, method=method)


# -- plain-text export ----------------------------------------------------------

def export_ctmc_text(ctmc: Ctmc) -> str:
    """Transition list with init/goal/blocked header lines, one edge per line."""
    lines = [f"#states {ctmc.n}", f"#init {ctmc.init}"]
    lines.append("#goal" + "".join(f" {i}" for i in sorted(ctmc.goal)))
    lines.append("#blocked" + "".join(f" {i}" for i in sorted(ctmc.blocked)))
    for i, label in enumerate(ctmc.labels):
        lines.append(f"#label {i} {label}")
    coo = ctmc.rates.tocoo()
    triples = sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))
    for src, dst, rate in triples:
        lines.append(f"{src} {dst} {rate!r}")
    return "\n".join(lines) + "\n"


def parse_ctmc_text(text: str) -> Ctmc:
    """Read a transition list produced by export_ctmc_text."""
    n = None
    init = 0
    goal: set[int] = set()
    blocked: set[int] = set()
    labels: dict[int, str] = {}
    triples: list[tuple[int, int, float]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if not parts:
                continue
            key, rest = parts[0], parts[1:]
            if key == "states":
                n = int(rest[0])
            elif key == "init":
                init = int(rest[0])
            elif key == "goal":
                goal.update(int(x) for x in rest)
            elif key == "blocked":
                blocked.update(int(x) for x in rest)
            elif key == "label":
                labels[int(rest[0])] = line.split(None, 2)[2] if len(parts) > 2 else ""
            continue
        src, dst, rate = line.split()
        triples.append((int(src), int(dst), float(rate)))
    if n is None:
        n = 1 + max((max(s, d) for s, d, _ in triples), default=0)
    rows = [t[0] for t in triples]
    cols = [t[1] for t in triples]
    data = [t[2] for t in triples]
    rates = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
    label_tuple = tuple(labels.get(i, f"s{i}") for i in range(n))
    return Ctmc(n=n, init=init, rates=rates, goal=frozenset(goal),
                blocked=frozenset(blocked), labels=label_tuple, method="import")
