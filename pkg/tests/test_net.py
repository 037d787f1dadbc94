import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from countbmc.errors import NetError
from countbmc.net import PetriNet, enabled, fire, replay


def test_enabled_at_empty_marking_only_source(ups):
    # t0 spawns and has no pre-place; everything else needs a token
    assert enabled(ups, (0, 0, 0, 0, 0)) == {"t0"}


def test_enabled_no_transitions():
    net = PetriNet(places=("p",), transitions=(), arcs={}, initial_marking=(0,))
    assert enabled(net, (3,)) == frozenset()


def test_enabled_with_running_token(ups):
    # derived by checking all eight transitions against the arc table
    m = (0, 0, 1, 0, 0)
    expected = set()
    for t in ups.transitions:
        if all(m[ups.place_index[p]] >= w for p, w in ups.pre[t]):
            expected.add(t)
    assert expected == {"t0", "t3", "t4", "t6"}
    assert enabled(ups, m) == expected


def test_fire_spawn(ups):
    assert fire(ups, (0, 0, 0, 0, 0), "t0") == (1, 0, 0, 0, 0)


def test_fire_load(ups):
    assert fire(ups, (1, 0, 0, 0, 0), "t1") == (0, 1, 0, 0, 0)


def test_fire_self_loop_identity():
    net = PetriNet(
        places=("p",),
        transitions=("t",),
        arcs={("p", "t"): 2, ("t", "p"): 2},
        initial_marking=(2,),
    )
    assert fire(net, (2,), "t") == (2,)


def test_fire_disabled_names_deficient_place(ups):
    with pytest.raises(NetError, match="p0"):
        fire(ups, (0, 0, 0, 0, 0), "t1")


def test_marking_length_mismatch(ups):
    with pytest.raises(NetError, match="entries"):
        enabled(ups, (0, 0))


def test_replay(ups):
    steps = replay(ups, (0, 0, 0, 0, 0), ["t0", "t1", "t2"])
    assert [s.transition for s in steps] == ["t0", "t1", "t2"]
    assert steps[-1].after == (0, 0, 1, 0, 0)


def test_invariants_rejected():
    with pytest.raises(NetError):
        PetriNet(places=("p", "p"), transitions=(), arcs={}, initial_marking=(0, 0))
    with pytest.raises(NetError):
        PetriNet(places=("x",), transitions=("x",), arcs={}, initial_marking=(0,))
    with pytest.raises(NetError):
        PetriNet(places=("p",), transitions=("t",), arcs={("p", "t"): 0}, initial_marking=(0,))
    with pytest.raises(NetError):
        PetriNet(places=("p",), transitions=("t",), arcs={("p", "q"): 1}, initial_marking=(0,))
    with pytest.raises(NetError):
        PetriNet(places=("p",), transitions=(), arcs={}, initial_marking=(0, 1))
    with pytest.raises(NetError):
        PetriNet(places=("p",), transitions=(), arcs={}, initial_marking=(-1,))


# --- randomized nets ---------------------------------------------------------


@st.composite
def small_nets(draw):
    n_places = draw(st.integers(1, 4))
    n_trans = draw(st.integers(1, 4))
    places = tuple(f"p{i}" for i in range(n_places))
    transitions = tuple(f"t{i}" for i in range(n_trans))
    arcs = {}
    for t in transitions:
        for p in places:
            if draw(st.booleans()):
                arcs[(p, t)] = draw(st.integers(1, 2))
            if draw(st.booleans()):
                arcs[(t, p)] = draw(st.integers(1, 2))
    marking = tuple(draw(st.integers(0, 3)) for _ in places)
    return PetriNet(places, transitions, arcs, marking)


@given(small_nets(), st.data())
@settings(max_examples=150, deadline=None)
def test_token_conservation_and_nonnegativity(net, data):
    m = net.initial_marking
    for _ in range(3):
        ts = sorted(enabled(net, m))
        if not ts:
            break
        t = data.draw(st.sampled_from(ts))
        nxt = fire(net, m, t)
        assert all(n >= 0 for n in nxt)
        delta = net.effect(t)
        for i in range(len(net.places)):
            assert nxt[i] - m[i] == delta[i]
        # pure function of (net, m, t)
        assert fire(net, m, t) == nxt
        m = nxt
