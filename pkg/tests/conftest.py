import pytest

from epmu import MultiAgentSystem


@pytest.fixture
def sys1():
    """Three states; branch at the root, self-loops below; agent a sees p
    (which is never true), so both branches look alike to a."""
    return MultiAgentSystem(
        states=[1, 2, 3],
        q0=1,
        delta=[(1, 2), (1, 3), (2, 2), (3, 3)],
        atoms=["p", "q"],
        labels={1: set(), 2: {"q"}, 3: set()},
        obs={"a": {"p"}},
    )


@pytest.fixture
def sys2():
    """Five states; state 4 is reachable both through the observable state 2
    and through the unobservable state 3, so its belief set depends on the
    run — the canonical non-distinguished fixture."""
    return MultiAgentSystem(
        states=[1, 2, 3, 4, 5],
        q0=1,
        delta=[(1, 2), (1, 3), (2, 4), (3, 4), (3, 5), (4, 4), (5, 5)],
        atoms=["p"],
        labels={2: {"p"}},
        obs={"a": {"p"}},
    )


@pytest.fixture
def sys1_ab(sys1):
    """sys1 with a second agent b whose observable set extends a's."""
    return MultiAgentSystem(
        states=list(sys1.states),
        q0=sys1.q0,
        delta=list(sys1.delta),
        atoms=list(sys1.atoms),
        labels=dict(sys1.labels),
        obs={"a": {"p"}, "b": {"p", "q"}},
    )
