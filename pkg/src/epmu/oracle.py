"""Brute-force reference semantics, kept independent of the checker: exact
bounded-tree evaluation of fixpoint-free formulas, run-level computation of
the knowledge-transfer relation, and small-game strategy/parity oracles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import formula as fm
from .errors import CapacityExceeded, DepthInsufficient, EpmuError
from .system import DEFAULT_CAP, TreePrefix


@dataclass(frozen=True)
class NodeSet:
    """Nodes of a prefix satisfying a formula, exact up to valid_depth."""

    prefix: TreePrefix
    nodes: frozenset
    valid_depth: int
    root_holds: bool


def eval_tree(prefix, f, require_root=True):
    """Exact tree semantics of a fixpoint-free closed formula on the bounded
    unfolding.  Membership is reliable only for nodes whose depth leaves room
    for the formula's modal nesting; the returned set is restricted to those.
    """
    if not fm.is_fixpoint_free(f):
        raise EpmuError("the tree oracle only handles fixpoint-free formulas")
    if fm.free_vars(f):
        raise EpmuError("the tree oracle needs a closed formula")
    depth_needed = fm.modal_depth(f)
    valid = prefix.depth - depth_needed
    if require_root and valid < 0:
        raise DepthInsufficient(depth_needed, prefix.depth)

    all_nodes = frozenset(prefix.nodes)

    def ev(g):
        if isinstance(g, fm.TrueF):
            return all_nodes
        if isinstance(g, fm.FalseF):
            return frozenset()
        if isinstance(g, fm.Atom):
            return frozenset(
                x for x in prefix.nodes if g.name in prefix.system.label(x[-1])
            )
        if isinstance(g, fm.NegAtom):
            return all_nodes - ev(fm.Atom(g.name))
        if isinstance(g, fm.Not):
            return all_nodes - ev(g.child)
        if isinstance(g, fm.And):
            return ev(g.left) & ev(g.right)
        if isinstance(g, fm.Or):
            return ev(g.left) | ev(g.right)
        if isinstance(g, fm.AX):
            S = ev(g.child)
            return frozenset(
                x for x in prefix.nodes if all(y in S for y in prefix.children(x))
            )
        if isinstance(g, fm.EX):
            S = ev(g.child)
            return frozenset(
                x for x in prefix.nodes if any(y in S for y in prefix.children(x))
            )
        if isinstance(g, (fm.Know, fm.Poss)):
            S = ev(g.child)
            out = set()
            for d in range(prefix.depth + 1):
                for _, cls in prefix.sim_classes(g.agent, d).items():
                    if isinstance(g, fm.Know):
                        if all(y in S for y in cls):
                            out.update(cls)
                    else:
                        if any(y in S for y in cls):
                            out.update(cls)
            return frozenset(out)
        raise TypeError(f"unexpected node {g!r}")

    result = ev(f)
    root = (prefix.system.q0,)
    trimmed = frozenset(x for x in result if prefix.node_depth(x) <= valid)
    return NodeSet(prefix, trimmed, valid, root in result)


def gamma_by_runs(m, agent, depth, cap=DEFAULT_CAP):
    """Run-level approximation of the knowledge-transfer relation: (q, r)
    survives iff every run of length <= depth to q has an equally long,
    identically observed run to r.  Antitone in depth; exact once depth covers
    the reachable belief states."""
    prefix = TreePrefix(m, depth, cap=cap)
    pairs = {(q, r) for q in m.states for r in m.states}
    for d in range(depth + 1):
        for _, cls in prefix.sim_classes(agent, d).items():
            ends = {run[-1] for run in cls}
            for q in ends:
                for r in m.states:
                    if r not in ends:
                        pairs.discard((q, r))
    from .distinction import GammaRelation

    return GammaRelation(agent, m, frozenset(pairs))


# ---------------------------------------------------------------------------
# Strategy oracle for until objectives in imperfect-information games


def _belief_graph(g, a0):
    """All beliefs reachable from {q0} under own actions + observations."""
    start = frozenset([g.q0])
    beliefs = {start}
    queue = [start]
    moves = {}  # (belief, alpha) -> {obs -> successor belief}
    others = [a for a in g.agents if a != a0]
    while queue:
        B = queue.pop(0)
        for alpha in g.alphabets[a0]:
            byobs = {}
            for q in B:
                for acts, r in g.outgoing(q):
                    if dict(acts)[a0] != alpha:
                        continue
                    obs = g.label(r) & g.obs[a0]
                    byobs.setdefault(obs, set()).add(r)
            moves[(B, alpha)] = {o: frozenset(s) for o, s in byobs.items()}
            for nb in moves[(B, alpha)].values():
                if nb not in beliefs:
                    beliefs.add(nb)
                    queue.append(nb)
    return beliefs, moves


def reachability_strategy_oracle(g, a0, p1, p2, horizon=None):
    """Exhaustively search belief-positional strategies for one achieving
    "p1 until p2" on every compatible run within the horizon.  Sound and
    complete at this scale: reachability on the belief construction admits
    belief-positional winning strategies, and a losing play can be pumped
    inside the finite (state, belief) product."""
    beliefs, moves = _belief_graph(g, a0)
    if len(beliefs) > 14:
        raise CapacityExceeded(len(beliefs), 14, "strategy enumeration")
    if horizon is None:
        horizon = len(beliefs) * len(g.states)
    blist = sorted(beliefs, key=sorted)

    def wins(sigma):
        memo = {}

        def go(q, B, steps):
            if p2 in g.label(q):
                return True
            if p1 not in g.label(q):
                return False
            if steps == 0:
                return False
            key = (q, B, steps)
            if key in memo:
                return memo[key]
            alpha = sigma[B]
            ok = True
            succs = [
                (acts, r) for acts, r in g.outgoing(q) if dict(acts)[a0] == alpha
            ]
            for _, r in succs:
                obs = g.label(r) & g.obs[a0]
                nb = moves[(B, alpha)][obs]
                if not go(r, nb, steps - 1):
                    ok = False
                    break
            memo[key] = ok
            return ok

        return go(g.q0, frozenset([g.q0]), horizon)

    for combo in itertools.product(g.alphabets[a0], repeat=len(blist)):
        if wins(dict(zip(blist, combo))):
            return True
    return False


# ---------------------------------------------------------------------------
# Parity oracle (perfect information)


def _attractor(nodes, edges, owner, target, player):
    """Standard attractor of `target` for `player` in a turn-based graph."""
    attr = set(target)
    changed = True
    preds = {v: set() for v in nodes}
    for u, vs in edges.items():
        for v in vs:
            preds[v].add(u)
    frontier = set(target)
    while frontier:
        new = set()
        for v in frontier:
            for u in preds[v]:
                if u in attr:
                    continue
                if owner[u] == player:
                    new.add(u)
                elif all(w in attr for w in edges[u]):
                    new.add(u)
        attr |= new
        frontier = new
    return attr


def _zielonka(nodes, edges, owner, priority):
    """Winning regions (even player, odd player) for max-parity objectives."""
    if not nodes:
        return set(), set()
    p = max(priority[v] for v in nodes)
    player = p % 2  # 0 = even player
    target = {v for v in nodes if priority[v] == p}
    A = _attractor(nodes, edges, owner, target, player)
    rest = nodes - A
    sub_edges = {v: [w for w in edges[v] if w in rest] for v in rest}
    w0, w1 = _zielonka(rest, sub_edges, owner, priority)
    opp_region = w1 if player == 0 else w0
    if not opp_region:
        return (nodes, set()) if player == 0 else (set(), nodes)
    B = _attractor(nodes, edges, owner, opp_region, 1 - player)
    rest2 = nodes - B
    sub_edges2 = {v: [w for w in edges[v] if w in rest2] for v in rest2}
    r0, r1 = _zielonka(rest2, sub_edges2, owner, priority)
    return (r0, r1 | B) if player == 0 else (r0 | B, r1)


def parity_oracle(game, player_index=0):
    """Winning region of one player in a perfect-information concurrent
    parity game, via the turn-based expansion: the player picks an action,
    then the opponent picks a reply and resolves nondeterminism."""
    me = game.players[player_index]
    opp = game.players[1 - player_index]
    nodes = set()
    edges = {}
    owner = {}
    priority = {}
    for q in game.states:
        nodes.add(("s", q))
        owner[("s", q)] = 0
        priority[("s", q)] = game.priority[q]
        edges[("s", q)] = []
        for alpha in game.alphabets[me]:
            mid = ("m", q, alpha)
            succs = []
            for acts, r in game.outgoing(q):
                if dict(acts)[me] == alpha:
                    succs.append(("s", r))
            if not succs:
                continue  # the player cannot choose a move with no outcome
            nodes.add(mid)
            owner[mid] = 1
            priority[mid] = game.priority[q]
            edges[mid] = succs
            edges[("s", q)].append(mid)
    # a state with no playable action is losing for the player: give the
    # opponent a self-loop of odd priority
    sink = ("sink",)
    for q in game.states:
        if not edges[("s", q)]:
            if sink not in nodes:
                nodes.add(sink)
                owner[sink] = 1
                priority[sink] = 1
                edges[sink] = [sink]
            edges[("s", q)].append(sink)
    w_even, _ = _zielonka(nodes, edges, owner, priority)
    return frozenset(q for q in game.states if ("s", q) in w_even)
