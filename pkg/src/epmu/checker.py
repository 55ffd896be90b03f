"""The decision procedure for the non-mixing fragment.

Closed subformulas are evaluated bottom-up while one refinement chain of
subset constructions is threaded left-to-right through the syntactic tree;
already-computed state sets are transported forward by pullback.  Fixpoint
bodies with free variables are evaluated by Kleene iteration inside a region
system refined for all agents whose epistemic operators are non-closed there.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import formula as fm
from .distinction import (
    GammaRelation,
    closed_form_gamma,
    compute_gamma,
    distinction,
    know_op,
    poss_op,
    refine_for_agents,
)
from .errors import EpmuError, FragmentRejected, MonotonicityViolated
from .syntree import build_syntree, check_non_mixing, frontier_nodes
from .system import DEFAULT_CAP, compose_insplitting


class RefinementChain:
    """Systems connected by in-splitting steps; systems[0] is the input,
    the last entry is the current finest system."""

    def __init__(self, base):
        self.systems = [base]
        self.steps = []  # steps[i]: systems[i+1] -> systems[i]

    @property
    def final(self):
        return self.systems[-1]

    def mark(self):
        """Position token for pull_forward."""
        return len(self.systems)

    def extend(self, insplit):
        if insplit.target is not self.final:
            raise EpmuError("refinement step does not attach to the chain")
        self.steps.append(insplit)
        self.systems.append(insplit.source)

    def pull_forward(self, S, mark):
        """Transport a set over systems[mark-1] to the final system."""
        for i in range(mark - 1, len(self.systems) - 1):
            S = self.steps[i].pullback(S)
        return frozenset(S)

    def composite(self):
        """The in-splitting final -> base."""
        from .system import identity_insplitting

        comp = identity_insplitting(self.systems[0])
        for step in self.steps:
            comp = compose_insplitting(comp, step)
        return comp


@dataclass
class Verdict:
    holds: bool
    initial_state: object
    refinement_sizes: list
    iteration_counts: list
    wall_time: float
    fragment_witness: object = None


@dataclass
class _Ctx:
    cap: int = DEFAULT_CAP
    iteration_counts: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# State-set operators


def ax_f(m, S):
    S = set(S)
    return frozenset(q for q in m.states if all(r in S for r in m.successors(q)))


def ex_f(m, S):
    S = set(S)
    return frozenset(q for q in m.states if any(r in S for r in m.successors(q)))


def atom_set(m, name):
    return frozenset(q for q in m.states if name in m.label(q))


def kleene(op, seed, bound, mode="lfp"):
    """Iterate a monotone set operator to its least (from the empty set) or
    greatest (from the full set) fixpoint; returns (fixpoint, iterations).

    A monotone operator stabilizes within bound steps; running longer means
    the operand was not monotone, which is an implementation bug.
    """
    cur = frozenset(seed)
    for i in range(bound + 1):
        nxt = frozenset(op(cur))
        if mode == "lfp" and not cur <= nxt:
            raise MonotonicityViolated(f"lfp iterate shrank at step {i}")
        if mode == "gfp" and not nxt <= cur:
            raise MonotonicityViolated(f"gfp iterate grew at step {i}")
        if nxt == cur:
            return cur, i + 1
        cur = nxt
    raise MonotonicityViolated(f"no fixpoint within {bound + 1} iterations")


# ---------------------------------------------------------------------------
# Closed evaluation with chain threading


def eval_closed(node, chain, ctx):
    """Evaluate a closed syntactic-tree node; returns a state set over
    chain.final, possibly extending the chain."""
    f = node.form
    m = chain.final
    if isinstance(f, fm.TrueF):
        return frozenset(m.states)
    if isinstance(f, fm.FalseF):
        return frozenset()
    if isinstance(f, fm.Atom):
        return atom_set(m, f.name)
    if isinstance(f, fm.NegAtom):
        return frozenset(m.states) - atom_set(m, f.name)
    if isinstance(f, (fm.And, fm.Or)):
        left, right = node.children
        S1 = eval_closed(left, chain, ctx)
        mark = chain.mark()
        S2 = eval_closed(right, chain, ctx)
        S1 = chain.pull_forward(S1, mark)
        return S1 & S2 if isinstance(f, fm.And) else S1 | S2
    if isinstance(f, (fm.AX, fm.EX)):
        S = eval_closed(node.children[0], chain, ctx)
        return ax_f(chain.final, S) if isinstance(f, fm.AX) else ex_f(chain.final, S)
    if isinstance(f, (fm.Know, fm.Poss)):
        S = eval_closed(node.children[0], chain, ctx)
        d = distinction(chain.final, f.agent, cap=ctx.cap)
        chain.extend(d.insplit)
        S = d.insplit.pullback(S)
        gamma = closed_form_gamma(d)
        op = know_op if isinstance(f, fm.Know) else poss_op
        return op(gamma, S)
    if isinstance(f, (fm.Mu, fm.Nu)):
        return eval_fixpoint_region(node, chain, ctx)
    if isinstance(f, (fm.DiamondAct, fm.BoxAct)):
        raise EpmuError("action modalities must be compiled away before checking")
    raise TypeError(f"unexpected node {f!r}")


def eval_fixpoint_region(node, chain, ctx):
    """A binder whose body has free variables: precompute the nearest closed
    descendants, refine once for all non-closed agents of the body, then
    Kleene-iterate the body inside the refined system."""
    body = node.children[0]
    fsets = {}
    for fn in frontier_nodes(node):
        mark = chain.mark()
        S = eval_closed(fn, chain, ctx)
        for path in fsets:
            fsets[path] = chain.pull_forward(fsets[path], mark)
        fsets[fn.path] = S

    agents = body.agncl
    if agents:
        mark = chain.mark()
        refined, comp = refine_for_agents(chain.final, agents, cap=ctx.cap)
        chain.extend(comp)
        for path in fsets:
            fsets[path] = chain.pull_forward(fsets[path], mark)
    region = chain.final
    gammas = {a: compute_gamma(region, a, cap=ctx.cap) for a in agents}

    var = node.form.var
    seed = frozenset() if isinstance(node.form, fm.Mu) else frozenset(region.states)
    mode = "lfp" if isinstance(node.form, fm.Mu) else "gfp"

    def op(S):
        return eval_region(body, region, gammas, {var: S}, fsets, ctx)

    result, iters = kleene(op, seed, len(region), mode)
    ctx.iteration_counts.append(iters)
    return result


def eval_region(node, region, gammas, env, fsets, ctx):
    """State-set semantics of a (generally non-closed) node inside a fixed
    region system; closed descendants read their precomputed sets."""
    f = node.form
    if node.closed:
        if node.is_top:
            return frozenset(region.states)
        return fsets[node.path]
    if isinstance(f, fm.Var):
        return env[f.name]
    if isinstance(f, (fm.And, fm.Or)):
        S1 = eval_region(node.children[0], region, gammas, env, fsets, ctx)
        S2 = eval_region(node.children[1], region, gammas, env, fsets, ctx)
        return S1 & S2 if isinstance(f, fm.And) else S1 | S2
    if isinstance(f, (fm.AX, fm.EX)):
        S = eval_region(node.children[0], region, gammas, env, fsets, ctx)
        return ax_f(region, S) if isinstance(f, fm.AX) else ex_f(region, S)
    if isinstance(f, (fm.Know, fm.Poss)):
        S = eval_region(node.children[0], region, gammas, env, fsets, ctx)
        op = know_op if isinstance(f, fm.Know) else poss_op
        return op(gammas[f.agent], S)
    if isinstance(f, (fm.Mu, fm.Nu)):
        # nested non-closed binder: iterate inside the same region system
        seed = frozenset() if isinstance(f, fm.Mu) else frozenset(region.states)
        mode = "lfp" if isinstance(f, fm.Mu) else "gfp"

        def op(S):
            return eval_region(
                node.children[0], region, gammas, {**env, f.var: S}, fsets, ctx
            )

        result, iters = kleene(op, seed, len(region), mode)
        ctx.iteration_counts.append(iters)
        return result
    raise TypeError(f"unexpected node in region: {f!r}")


# ---------------------------------------------------------------------------
# Entry points


def check_with_sets(m, f, cap=DEFAULT_CAP):
    """Full pipeline returning (verdict, chain, final state set)."""
    t0 = time.perf_counter()
    pf = fm.to_positive_form(f)
    tree = build_syntree(pf)
    gate = check_non_mixing(tree, m.obs)
    if not gate:
        raise FragmentRejected(gate.witness)
    ctx = _Ctx(cap=cap)
    chain = RefinementChain(m)
    S = eval_closed(tree, chain, ctx)
    holds = chain.final.q0 in S
    verdict = Verdict(
        holds=holds,
        initial_state=chain.final.state_name(chain.final.q0),
        refinement_sizes=[len(s) for s in chain.systems],
        iteration_counts=list(ctx.iteration_counts),
        wall_time=time.perf_counter() - t0,
    )
    return verdict, chain, S


def check(m, f, cap=DEFAULT_CAP):
    """Decide whether the unfolding of m satisfies the closed formula f."""
    verdict, _, _ = check_with_sets(m, f, cap=cap)
    return verdict


def node_set_on_prefix(chain, S, depth):
    """Transport the final state set to tree nodes of the base system: the
    depth-bounded prefixes of the fine and base unfoldings are isomorphic, so
    each fine run projects to exactly one base run."""
    comp = chain.composite()
    fine = chain.final
    out = set()
    seen = set()
    level = [(fine.q0,)]
    for _ in range(depth + 1):
        next_level = []
        for run in level:
            base_run = tuple(comp.chi[q] for q in run)
            if base_run in seen:
                raise EpmuError("prefix projection is not injective")
            seen.add(base_run)
            if run[-1] in S:
                out.add(base_run)
            if len(run) <= depth:
                next_level.extend(run + (r,) for r in fine.successors(run[-1]))
        level = next_level
    return out, seen


def eval_state_naive(m, f, cap=DEFAULT_CAP):
    """Refinement-free state-based semantics: epistemic operators use the
    memoryless observational equivalence on states (same currently visible
    atoms), with no subset construction anywhere.  Forgets run history, hence
    unsound under perfect recall; tests use it as the negative witness for
    the commutation requirement."""
    pf = fm.to_positive_form(f)
    gammas = {}

    def memoryless_gamma(agent):
        pairs = frozenset(
            (q, r)
            for q in m.states
            for r in m.states
            if m.obs_label(q, agent) == m.obs_label(r, agent)
        )
        return GammaRelation(agent, m, pairs)

    def ev(g, env):
        if isinstance(g, fm.TrueF):
            return frozenset(m.states)
        if isinstance(g, fm.FalseF):
            return frozenset()
        if isinstance(g, fm.Atom):
            return atom_set(m, g.name)
        if isinstance(g, fm.NegAtom):
            return frozenset(m.states) - atom_set(m, g.name)
        if isinstance(g, fm.Var):
            return env[g.name]
        if isinstance(g, fm.And):
            return ev(g.left, env) & ev(g.right, env)
        if isinstance(g, fm.Or):
            return ev(g.left, env) | ev(g.right, env)
        if isinstance(g, fm.AX):
            return ax_f(m, ev(g.child, env))
        if isinstance(g, fm.EX):
            return ex_f(m, ev(g.child, env))
        if isinstance(g, (fm.Know, fm.Poss)):
            if g.agent not in gammas:
                gammas[g.agent] = memoryless_gamma(g.agent)
            op = know_op if isinstance(g, fm.Know) else poss_op
            return op(gammas[g.agent], ev(g.child, env))
        if isinstance(g, (fm.Mu, fm.Nu)):
            seed = frozenset() if isinstance(g, fm.Mu) else frozenset(m.states)
            mode = "lfp" if isinstance(g, fm.Mu) else "gfp"
            result, _ = kleene(
                lambda S: ev(g.body, {**env, g.var: S}), seed, len(m), mode
            )
            return result
        raise TypeError(f"unexpected node {g!r}")

    return ev(pf, {})
