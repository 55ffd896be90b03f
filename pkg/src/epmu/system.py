"""Multi-agent systems, in-splitting maps, and depth-bounded unfoldings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import CapacityExceeded, SystemFormatError, UnknownAtom

DEFAULT_CAP = 10**6


class MultiAgentSystem:
    """Finite Kripke structure with per-agent observable atom sets.

    States are integer ids; only states reachable from the initial state are
    kept.  Instances are immutable after construction and safe to share.
    """

    def __init__(self, states, q0, delta, atoms, labels, obs, names=None):
        states = sorted(set(states))
        if q0 not in states:
            raise SystemFormatError(f"initial state {q0} is not a state")
        atoms = frozenset(atoms)
        for q, lab in labels.items():
            for p in lab:
                if p not in atoms:
                    raise UnknownAtom(p)
        for a, pa in obs.items():
            for p in pa:
                if p not in atoms:
                    raise UnknownAtom(p)
        delta = {(q, r) for q, r in delta}
        for q, r in delta:
            if q not in states or r not in states:
                raise SystemFormatError(f"transition ({q},{r}) uses unknown state")

        # restrict to the part reachable from q0
        succ = {q: set() for q in states}
        for q, r in delta:
            succ[q].add(r)
        reachable = {q0}
        stack = [q0]
        while stack:
            q = stack.pop()
            for r in succ[q]:
                if r not in reachable:
                    reachable.add(r)
                    stack.append(r)
        self.dropped_states = tuple(sorted(set(states) - reachable))
        states = sorted(reachable)

        self.states = tuple(states)
        self.q0 = q0
        self.delta = frozenset((q, r) for q, r in delta if q in reachable and r in reachable)
        self.atoms = atoms
        self.labels = {q: frozenset(labels.get(q, ())) for q in states}
        self.agents = tuple(sorted(obs))
        self.obs = {a: frozenset(pa) for a, pa in obs.items()}
        self.names = {q: names[q] for q in states if names and q in names}
        self._succ = {q: tuple(sorted(r for r in succ[q] if r in reachable)) for q in states}
        pred = {q: set() for q in states}
        for q, r in self.delta:
            pred[r].add(q)
        self._pred = {q: tuple(sorted(pred[q])) for q in states}

    def successors(self, q):
        return self._succ[q]

    def predecessors(self, q):
        return self._pred[q]

    def label(self, q):
        return self.labels[q]

    def obs_label(self, q, agent):
        """The atoms of q visible to the agent."""
        return self.labels[q] & self.obs[agent]

    def outdeg(self, q):
        return len(self._succ[q])

    def deadlocks(self):
        return tuple(q for q in self.states if not self._succ[q])

    def state_name(self, q):
        return self.names.get(q, str(q))

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return f"MultiAgentSystem({len(self.states)} states, q0={self.q0})"


@dataclass(frozen=True)
class SerialVerdict:
    ok: bool
    deadlocked: tuple = ()
    warning: str = ""


def validate_serial(m, allow_deadlock=False):
    """Runs are infinite, so a deadlocked state has no semantics; reject it
    unless the caller explicitly opts into vacuous AX there."""
    dead = m.deadlocks()
    if not dead:
        return SerialVerdict(True)
    if allow_deadlock:
        return SerialVerdict(True, dead, f"deadlocked states accepted: {list(dead)}")
    return SerialVerdict(False, dead)


# ---------------------------------------------------------------------------
# File format


def parse_system(text):
    """Parse the JSON .mas format into a validated system."""
    data = _load_json(text)
    return system_from_dict(data)


def _load_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SystemFormatError(f"not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise SystemFormatError("top-level value must be an object")
    return data


def system_from_dict(data):
    for key in ("states", "initial", "transitions", "atoms", "agents"):
        if key not in data:
            raise SystemFormatError(f"missing key {key!r}")
    states, labels, names = [], {}, {}
    for entry in data["states"]:
        q = entry["id"]
        states.append(q)
        labels[q] = entry.get("atoms", [])
        if "name" in entry:
            names[q] = entry["name"]
    obs = {a: spec.get("obs", []) for a, spec in data["agents"].items()}
    return MultiAgentSystem(
        states=states,
        q0=data["initial"],
        delta=[tuple(t) for t in data["transitions"]],
        atoms=data["atoms"],
        labels=labels,
        obs=obs,
        names=names,
    )


def system_to_dict(m):
    out = {
        "states": [
            {"id": q, "atoms": sorted(m.labels[q])}
            | ({"name": m.names[q]} if q in m.names else {})
            for q in m.states
        ],
        "initial": m.q0,
        "transitions": sorted([q, r] for q, r in m.delta),
        "atoms": sorted(m.atoms),
        "agents": {a: {"obs": sorted(m.obs[a])} for a in m.agents},
    }
    return out


def system_to_json(m):
    return json.dumps(system_to_dict(m), indent=2, sort_keys=False)


def to_dot(m):
    lines = ["digraph mas {"]
    for q in m.states:
        atoms = ",".join(sorted(m.labels[q]))
        label = f"{m.state_name(q)} | {{{atoms}}}"
        shape = ' shape="doublecircle"' if q == m.q0 else ""
        lines.append(f'  n{q} [label="{label}"{shape}];')
    for q, r in sorted(m.delta):
        lines.append(f"  n{q} -> n{r};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# In-splittings


@dataclass(frozen=True)
class InSplitVerdict:
    ok: bool
    condition: str = ""
    witness: object = None

    def __bool__(self):
        return self.ok


class InSplitting:
    """A surjective state map fine -> coarse subject to the four in-splitting
    conditions (checked by verify_in_splitting, not at construction)."""

    def __init__(self, source, target, chi):
        self.source = source  # fine system
        self.target = target  # coarse system
        self.chi = dict(chi)

    def apply(self, q):
        return self.chi[q]

    def pullback(self, coarse_set):
        """chi^{-1}; a boolean-algebra homomorphism on state sets."""
        S = set(coarse_set)
        return frozenset(q for q in self.source.states if self.chi[q] in S)

    def __repr__(self):
        return (
            f"InSplitting({len(self.source)} states -> {len(self.target)} states)"
        )


def identity_insplitting(m):
    return InSplitting(m, m, {q: q for q in m.states})


def verify_in_splitting(s):
    """Check the four defining conditions; report the first violation."""
    fine, coarse, chi = s.source, s.target, s.chi
    for q in fine.states:
        if q not in chi or chi[q] not in coarse.states:
            return InSplitVerdict(False, "map", q)
    if set(chi.values()) != set(coarse.states):
        missing = sorted(set(coarse.states) - set(chi.values()))
        return InSplitVerdict(False, "surjectivity", missing[0])
    for q, r in fine.delta:
        if (chi[q], chi[r]) not in coarse.delta:
            return InSplitVerdict(False, "transitions-forward", (q, r))
    images = {(chi[q], chi[r]) for q, r in fine.delta}
    for e in coarse.delta:
        if e not in images:
            return InSplitVerdict(False, "transitions-preimage", e)
    for q in fine.states:
        if coarse.label(chi[q]) != fine.label(q):
            return InSplitVerdict(False, "labels", q)
    for q in fine.states:
        if coarse.outdeg(chi[q]) != fine.outdeg(q):
            return InSplitVerdict(False, "outdegree", q)
    if chi[fine.q0] != coarse.q0:
        return InSplitVerdict(False, "initial", fine.q0)
    return InSplitVerdict(True)


def compose_insplitting(outer, inner):
    """Composite of inner: A -> B with outer: B -> C."""
    if inner.target is not outer.source:
        raise SystemFormatError("in-splitting composition: middle systems differ")
    chi = {q: outer.chi[inner.chi[q]] for q in inner.source.states}
    return InSplitting(inner.source, outer.target, chi)


# ---------------------------------------------------------------------------
# Depth-bounded unfoldings


class TreePrefix:
    """All runs of length <= depth, as tuples of states starting at q0.

    Same-depth nodes are indistinguishable for an agent iff their per-step
    observation signatures coincide.
    """

    def __init__(self, system, depth, cap=DEFAULT_CAP):
        self.system = system
        self.depth = depth
        by_depth = [[(system.q0,)]]
        count = 1
        for _ in range(depth):
            level = []
            for run in by_depth[-1]:
                for r in system.successors(run[-1]):
                    level.append(run + (r,))
                    count += 1
                    if count > cap:
                        raise CapacityExceeded(count, cap, "tree prefix expansion")
            by_depth.append(level)
        self.by_depth = by_depth
        self.nodes = [run for level in by_depth for run in level]
        self._node_set = set(self.nodes)
        self._class_cache = {}

    def __contains__(self, run):
        return run in self._node_set

    def __len__(self):
        return len(self.nodes)

    def node_depth(self, run):
        return len(run) - 1

    def children(self, run):
        if len(run) - 1 >= self.depth:
            return []
        return [run + (r,) for r in self.system.successors(run[-1])]

    def signature(self, run, agent):
        m = self.system
        return tuple(m.obs_label(q, agent) for q in run)

    def sim_classes(self, agent, depth):
        """Partition of the depth-d level into indistinguishability classes."""
        key = (agent, depth)
        if key not in self._class_cache:
            classes = {}
            for run in self.by_depth[depth]:
                classes.setdefault(self.signature(run, agent), []).append(run)
            self._class_cache[key] = classes
        return self._class_cache[key]

    def related(self, run_x, run_y, agent):
        return len(run_x) == len(run_y) and self.signature(
            run_x, agent
        ) == self.signature(run_y, agent)


def bounded_unfold(m, depth, cap=DEFAULT_CAP):
    return TreePrefix(m, depth, cap=cap)
