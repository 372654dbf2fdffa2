import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermokernel.errors import (
    NoReverseWitness,
    NotCatalytic,
    NotWorkProcess,
    Overlap,
    StateMismatch,
)
from thermokernel.gas import GasState, add_ideal_gas, type1, type2
from thermokernel.processes import (
    AtomState,
    classify,
    concatenate,
    eliminate_catalyst,
    is_reversible,
    is_work_process,
    join,
    joint,
    make_identity,
    make_process,
    reverse_of,
    work_of,
)
from thermokernel.systems import World, compose, system

from conftest import make_abstract_atoms

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, width=32)


def footprint(*entries):
    """entries: (atom, initial, final, work)"""
    return make_process({a: (i, f, w) for a, i, f, w in entries})


def test_concatenation_state_rule_three_atoms(world):
    """Shared atom takes p's input and q's output; solo atoms keep their own."""
    a1, a2, a3 = make_abstract_atoms(world, 3)
    p = footprint((a1, 0.0, 1.0, 0.5), (a2, 10.0, 11.0, 0.25))
    q = footprint((a2, 11.0, 12.0, 0.25), (a3, 20.0, 21.0, -1.0))
    r = concatenate(p, q)
    assert r.involved == {a1, a2, a3}
    assert r.initial_of(a1).value == 0.0 and r.final_of(a1).value == 1.0
    assert r.initial_of(a2).value == 10.0 and r.final_of(a2).value == 12.0
    assert r.initial_of(a3).value == 20.0 and r.final_of(a3).value == 21.0
    assert r.work_on(a2) == 0.5


def test_concatenation_commutes_for_disjoint(world):
    a1, a2 = make_abstract_atoms(world, 2)
    p = footprint((a1, 0.0, 1.0, 2.0))
    q = footprint((a2, 5.0, 6.0, -1.0))
    assert concatenate(p, q).same_footprint(concatenate(q, p))


def test_concatenation_rejects_mismatch(world):
    (a,) = make_abstract_atoms(world, 1)
    p = footprint((a, 0.0, 1.0, 0.0))
    q = footprint((a, 2.0, 3.0, 0.0))
    with pytest.raises(StateMismatch):
        concatenate(p, q)


@settings(max_examples=200)
@given(
    works_p=st.lists(finite, min_size=1, max_size=4),
    works_q=st.lists(finite, min_size=1, max_size=4),
    overlap=st.integers(min_value=0, max_value=3),
)
def test_work_additivity_under_concatenation(works_p, works_q, overlap):
    world = World()
    k = min(overlap, len(works_p), len(works_q))
    n_atoms = len(works_p) + len(works_q) - k
    atoms = [world.new_atom("abstract") for _ in range(n_atoms)]
    p_atoms = atoms[: len(works_p)]
    q_atoms = atoms[len(works_p) - k :]
    p = make_process({a: (0.0, 1.0, w) for a, w in zip(p_atoms, works_p)})
    q = make_process(
        {a: (1.0 if a in p.involved else 0.0, 2.0, w) for a, w in zip(q_atoms, works_q)}
    )
    r = concatenate(p, q)
    for a in atoms:
        assert r.work_on(a) == p.work_on(a) + q.work_on(a)  # exact float sum
    everything = system(*atoms)
    assert work_of(everything, r) == pytest.approx(
        work_of(everything, p) + work_of(everything, q), abs=1e-12
    )


def test_work_of_sums_and_ignores_uninvolved(world):
    a1, a2, a3 = make_abstract_atoms(world, 3)
    p = footprint((a1, 0.0, 1.0, 2.0), (a2, 0.0, 1.0, -0.5))
    assert work_of(system(a1, a2), p) == 1.5
    assert work_of(system(a3), p) == 0.0
    # additivity under disjoint composition, exactly
    s1, s2 = system(a1), system(a2, a3)
    assert work_of(compose(s1, s2), p) == work_of(s1, p) + work_of(s2, p)


def test_is_work_process(world):
    a1, a2, a3 = make_abstract_atoms(world, 3)
    p = footprint((a1, 0.0, 1.0, 0.0), (a2, 0.0, 1.0, 0.0))
    assert is_work_process(system(a1, a2), p)
    assert not is_work_process(system(a1), p)
    assert not is_work_process(system(a1, a2, a3), p)


def test_identity_process(world, gas):
    sigma = joint(AtomState(gas.atom, GasState(1.0, 1.0)))
    ident = make_identity(gas.system, sigma)
    assert ident.initial_of(gas.atom).value == ident.final_of(gas.atom).value
    assert work_of(gas.system, ident) == 0.0
    again = concatenate(ident, ident)
    assert again.same_footprint(ident)
    assert is_reversible(ident)
    assert reverse_of(ident).same_footprint(ident)


def test_classify_cyclic_and_catalytic(world):
    a1, a2 = make_abstract_atoms(world, 2)
    c = system(a1, a2)
    cyc = footprint((a1, 0.0, 0.0, 1.0), (a2, 5.0, 5.0, 0.0))
    v = classify(c, cyc)
    assert v.cyclic and not v.catalytic
    # internal works +1 and -1 cancel: catalytic even though parts move energy
    cat = footprint((a1, 0.0, 0.0, 1.0), (a2, 5.0, 5.0, -1.0))
    v = classify(c, cat)
    assert v.cyclic and v.catalytic
    open_loop = footprint((a1, 0.0, 1.0, 0.0), (a2, 5.0, 5.0, 0.0))
    assert not classify(c, open_loop).cyclic


def test_eliminate_catalyst_projects_footprint(world):
    a1, a2, c1 = make_abstract_atoms(world, 3)
    s = system(a1, a2)
    c = system(c1)
    p = footprint(
        (a1, 0.0, 1.0, 2.0), (a2, 3.0, 4.0, -0.5), (c1, 7.0, 7.0, 0.0)
    )
    reduced = eliminate_catalyst(s, c, p)
    assert reduced.involved == {a1, a2}
    for a in (a1, a2):
        assert reduced.work_on(a) == p.work_on(a)
        assert reduced.initial_of(a).value == p.initial_of(a).value
        assert reduced.final_of(a).value == p.final_of(a).value


def test_eliminate_catalyst_rejections(world):
    a1, c1 = make_abstract_atoms(world, 2)
    s, c = system(a1), system(c1)
    not_cyclic = footprint((a1, 0.0, 1.0, 0.0), (c1, 7.0, 8.0, 0.0))
    with pytest.raises(NotCatalytic):
        eliminate_catalyst(s, c, not_cyclic)
    not_wp = footprint((a1, 0.0, 1.0, 0.0))
    with pytest.raises(NotWorkProcess):
        eliminate_catalyst(s, c, not_wp)


def test_reverse_negates_work_and_swaps_states(world, gas):
    fam = type2(gas, GasState(1.0, 1.0), 2.0)
    p = fam.slice(0.0, 1.0)
    r = reverse_of(p)
    assert r.initial_of(gas.atom).value == p.final_of(gas.atom).value
    assert r.final_of(gas.atom).value.as_tuple() == pytest.approx(
        p.initial_of(gas.atom).value.as_tuple(), abs=1e-12
    )
    assert r.work_on(gas.atom) == pytest.approx(-p.work_on(gas.atom), abs=1e-12)
    # double reverse reproduces the footprint
    assert reverse_of(r).same_footprint(p, atol=1e-9)
    # the round trip classifies as an identity
    loop = concatenate(p, r)
    assert classify(gas.system, loop).catalytic


def test_friction_is_irreversible(world, gas):
    p = type1(gas, GasState(1.0, 1.0), 2.0).slice(0.0, 1.0)
    assert not is_reversible(p)
    with pytest.raises(NoReverseWitness):
        reverse_of(p)


def test_reversibility_propagates_through_concatenation(world, gas):
    """Witnessed segments concatenate to witnessed processes; a witness-free
    segment anywhere leaves the whole chain witness-free (the contrapositive
    of 'reversible composite implies reversible parts')."""
    s0 = GasState(1.0, 1.0)
    ad1 = type2(gas, s0, 2.0)
    mid = ad1.curve(1.0)[gas.atom]
    ad2 = type2(gas, mid, 1.3)
    both = concatenate(ad1.slice(0.0, 1.0), ad2.slice(0.0, 1.0))
    assert is_reversible(both)
    fr = type1(gas, ad2.curve(1.0)[gas.atom], 5.0)
    chain = concatenate(both, fr.slice(0.0, 1.0))
    assert not is_reversible(chain)


def test_join_disjoint_and_overlap(world):
    a1, a2 = make_abstract_atoms(world, 2)
    p1 = footprint((a1, 0.0, 1.0, 2.0))
    p2 = footprint((a2, 0.0, 2.0, 3.0))
    j = join(p1, p2)
    assert work_of(system(a1, a2), j) == 5.0
    with pytest.raises(Overlap):
        join(p1, p1)


def test_join_with_identity_preserves_works(world, gas):
    other = add_ideal_gas(world)
    p = type1(gas, GasState(1.0, 1.0), 2.0).slice(0.0, 1.0)
    ident = make_identity(other.system, joint(AtomState(other.atom, GasState(1, 1))))
    j = join(p, ident)
    assert j.work_on(gas.atom) == p.work_on(gas.atom)
    assert j.work_on(other.atom) == 0.0


def test_process_serialization_roundtrip(world, gas):
    p = type2(gas, GasState(1.0, 1.0), 2.0).slice(0.0, 1.0)
    blob = p.to_json()
    assert blob["reversible"] is True
    assert blob["tags"] == ["type2"]
    (entry,) = blob["entries"]
    assert entry["initial"] == [1.0, 1.0]
    assert entry["work"] == pytest.approx(-0.5550592125788452, abs=1e-10)
