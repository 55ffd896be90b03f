"""The knowledge subset construction, the knowledge-transfer relation, and
the distinguishedness test used by the checker."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityExceeded, NonChainAgents, UnknownAgent
from .system import (
    DEFAULT_CAP,
    InSplitting,
    MultiAgentSystem,
    compose_insplitting,
    identity_insplitting,
)


class DistinctionSystem(MultiAgentSystem):
    """A system whose states are (base state, belief set) pairs, together
    with the in-splitting map back to the base system."""

    def __init__(self, base, agent, pairs, q0_id, delta, names):
        self.base = base
        self.agent = agent
        self.pair_of = dict(pairs)  # id -> (s, frozenset S)
        labels = {i: base.label(s) for i, (s, _) in pairs.items()}
        super().__init__(
            states=list(pairs),
            q0=q0_id,
            delta=delta,
            atoms=base.atoms,
            labels=labels,
            obs=base.obs,
            names=names,
        )
        self.insplit = InSplitting(
            self, base, {i: self.pair_of[i][0] for i in self.states}
        )


def _belief_name(base, s, S):
    members = ",".join(base.state_name(q) for q in sorted(S))
    return f"({base.state_name(s)},{{{members}}})"


def distinction(m, agent, cap=DEFAULT_CAP):
    """Reachable part of the subset construction for one agent.

    Each state (s, S) pairs a base state with the set of base states that
    carry the same observation history; the initial state is (q0, {q0}).
    """
    if agent not in m.obs:
        raise UnknownAgent(agent)
    start = (m.q0, frozenset([m.q0]))
    id_of = {start: 0}
    pair_list = [start]
    queue = [start]
    delta = []
    while queue:
        s, S = queue.pop(0)
        sid = id_of[(s, S)]
        for r in m.successors(s):
            obs_r = m.obs_label(r, agent)
            R = frozenset(
                r2
                for r2 in m.states
                if m.obs_label(r2, agent) == obs_r
                and any((s2, r2) in m.delta for s2 in S)
            )
            tgt = (r, R)
            if tgt not in id_of:
                if len(pair_list) + 1 > cap:
                    raise CapacityExceeded(len(pair_list) + 1, cap, "subset construction")
                id_of[tgt] = len(pair_list)
                pair_list.append(tgt)
                queue.append(tgt)
            delta.append((sid, id_of[tgt]))
    pairs = {i: p for i, p in enumerate(pair_list)}
    names = {i: _belief_name(m, s, S) for i, (s, S) in pairs.items()}
    return DistinctionSystem(m, agent, pairs, 0, delta, names)


# ---------------------------------------------------------------------------
# The knowledge-transfer relation


@dataclass(frozen=True)
class GammaRelation:
    agent: str
    system: object
    pairs: frozenset  # (q, r): every run to q has an indistinguishable run to r

    def __contains__(self, pair):
        return pair in self.pairs

    def sources_of(self, q):
        return frozenset(s for s, r in self.pairs if r == q)

    def targets_of(self, s):
        return frozenset(r for s2, r in self.pairs if s2 == s)


def compute_gamma(m, agent, cap=DEFAULT_CAP):
    """Finite computation of the relation via the subset construction: the
    runs to q partition into observation classes, one reachable belief state
    each, and (q, r) holds iff r lies in every such belief set."""
    d = distinction(m, agent, cap=cap)
    beliefs = {}
    for i in d.states:
        s, S = d.pair_of[i]
        beliefs.setdefault(s, []).append(S)
    pairs = set()
    for q, sets in beliefs.items():
        common = frozenset.intersection(*sets)
        for r in common:
            pairs.add((q, r))
    return GammaRelation(agent, m, frozenset(pairs))


def closed_form_gamma(d):
    """Gamma of the agent of a DistinctionSystem over that very system:
    ((s,S),(r,S)) for reachable pairs with r in S."""
    by_belief = {}
    for i in d.states:
        s, S = d.pair_of[i]
        by_belief.setdefault(S, []).append((i, s))
    pairs = set()
    for S, members in by_belief.items():
        for i, s in members:
            for j, r in members:
                if r in S:
                    pairs.add((i, j))
    return GammaRelation(d.agent, d, frozenset(pairs))


def know_op(gamma, S):
    """{q | every Gamma-source of q lies in S}; dual of poss_op."""
    S = set(S)
    out = set(gamma.system.states)
    for s, q in gamma.pairs:
        if s not in S:
            out.discard(q)
    return frozenset(out)


def poss_op(gamma, S):
    """{q | some Gamma-source of q lies in S}."""
    S = set(S)
    return frozenset(q for s, q in gamma.pairs if s in S)


# ---------------------------------------------------------------------------
# Distinguishedness


@dataclass(frozen=True)
class DistinguishedVerdict:
    ok: bool
    violated: str = ""  # symmetry | transitivity | congruence
    witness: tuple = ()

    def __bool__(self):
        return self.ok


def is_distinguished(m, agent, cap=DEFAULT_CAP, gamma=None):
    """True iff Gamma is an equivalence relation closed under matching
    transitions (same observation on both successors)."""
    if gamma is None:
        gamma = compute_gamma(m, agent, cap=cap)
    rel = gamma.pairs
    for q, r in rel:
        if (r, q) not in rel:
            return DistinguishedVerdict(False, "symmetry", (q, r))
    targets = {}
    for q, r in rel:
        targets.setdefault(q, set()).add(r)
    for q, r in rel:
        for r2 in targets.get(r, ()):
            if (q, r2) not in rel:
                return DistinguishedVerdict(False, "transitivity", (q, r, r2))
    for q, r in rel:
        for q2 in m.successors(q):
            for r2 in m.successors(r):
                if m.obs_label(q2, agent) == m.obs_label(r2, agent) and (q2, r2) not in rel:
                    return DistinguishedVerdict(False, "congruence", (q, r, q2, r2))
    return DistinguishedVerdict(True)


# ---------------------------------------------------------------------------
# Ordered multi-agent refinement


def chain_order(obs, agents):
    """Agents sorted by decreasing observable set; raises NonChainAgents if
    two sets are incomparable."""
    agents = sorted(agents)
    for i, a in enumerate(agents):
        for b in agents[i + 1 :]:
            pa, pb = set(obs[a]), set(obs[b])
            if not (pa <= pb or pb <= pa):
                raise NonChainAgents(a, b)
    return sorted(agents, key=lambda a: (-len(obs[a]), a))


def refine_for_agents(m, agents, cap=DEFAULT_CAP):
    """Apply the subset construction once per agent, largest observable set
    first, so the final system is distinguished for every agent in the set.
    Returns the refined system and the composite in-splitting back to m."""
    order = chain_order(m.obs, agents)
    cur = m
    comp = identity_insplitting(m)
    for a in order:
        d = distinction(cur, a, cap=cap)
        comp = compose_insplitting(comp, d.insplit)
        cur = d
    return cur, comp
