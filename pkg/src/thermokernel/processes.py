"""Processes as thermodynamic footprints.

A process records, for every involved atom, its initial state, final state
and the work done on it.  Atoms not involved carry zero work by convention.
Processes are identified by ``pid``: two processes with identical footprints
remain distinct values, because a footprint does not determine the procedure
that produced it.

Reversibility is witness-based: constructors that know how to undo
themselves attach a ``reverse_witness`` callable producing the reverse
process.  Witness-free processes are treated as irreversible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, NamedTuple

from .config import tolerances
from .errors import (
    NoReverseWitness,
    NotCatalytic,
    NotWorkProcess,
    Overlap,
    StateMismatch,
)
from .systems import AtomId, System, atoms_of, are_disjoint, compose

_pids = itertools.count(1)


@dataclass(frozen=True)
class AtomState:
    """A state payload tagged with the atom it belongs to.

    State spaces of distinct atoms are disjoint by construction: the atom
    tag is part of the state.
    """

    atom: AtomId
    value: Any

    def to_json(self) -> dict:
        return {"atom": self.atom.to_json(), "value": value_to_json(self.value)}


# A joint state covers exactly the atoms of some system.
JointState = Mapping[AtomId, AtomState]


def joint(*states: AtomState) -> dict[AtomId, AtomState]:
    out: dict[AtomId, AtomState] = {}
    for st in states:
        if st.atom in out:
            raise ValueError(f"duplicate atom {st.atom} in joint state")
        out[st.atom] = st
    return out


def restrict(sigma: JointState, s: System) -> dict[AtomId, AtomState]:
    """Restriction of a joint state to a subsystem; partial atoms are dropped."""
    return {a: sigma[a] for a in atoms_of(s) if a in sigma}


def value_components(value: Any) -> tuple[float, ...]:
    """Flatten a numeric state payload to a float tuple for comparisons."""
    if isinstance(value, (int, float)):
        return (float(value),)
    if hasattr(value, "as_tuple"):
        return tuple(float(x) for x in value.as_tuple())
    if isinstance(value, tuple):
        return tuple(float(x) for x in value)
    raise TypeError(f"unsupported state payload {value!r}")


def value_to_json(value: Any):
    comps = value_components(value)
    return comps[0] if len(comps) == 1 else list(comps)


def values_close(a: Any, b: Any, atol: float | None = None) -> bool:
    """Payload equality up to the model tolerance (default absolute 1e-12)."""
    if atol is None:
        atol = tolerances().state_atol
    ca, cb = value_components(a), value_components(b)
    if len(ca) != len(cb):
        return False
    return all(abs(x - y) <= atol for x, y in zip(ca, cb))


@dataclass(frozen=True)
class ProcessEntry:
    initial: AtomState
    final: AtomState
    work: float


@dataclass(frozen=True, eq=False)
class Process:
    """Footprint of a procedure: per-atom state changes plus work.

    Equality is identity (by ``pid``); use ``same_footprint`` to compare
    thermodynamic content.
    """

    pid: int
    entries: Mapping[AtomId, ProcessEntry]
    reverse_witness: Callable[[], "Process"] | None = None
    tags: frozenset[str] = frozenset()

    @property
    def involved(self) -> frozenset[AtomId]:
        return frozenset(self.entries)

    @property
    def involved_system(self) -> System:
        return System(self.involved)

    def initial_of(self, atom: AtomId) -> AtomState:
        return self.entries[atom].initial

    def final_of(self, atom: AtomId) -> AtomState:
        return self.entries[atom].final

    def work_on(self, atom: AtomId) -> float:
        entry = self.entries.get(atom)
        return entry.work if entry is not None else 0.0

    def initial_state(self, s: System) -> dict[AtomId, AtomState]:
        """Initial joint state on ``s``; defined only if all atoms are involved."""
        return {a: self.entries[a].initial for a in atoms_of(s)}

    def final_state(self, s: System) -> dict[AtomId, AtomState]:
        return {a: self.entries[a].final for a in atoms_of(s)}

    def same_footprint(self, other: "Process", atol: float | None = None) -> bool:
        if self.involved != other.involved:
            return False
        if atol is None:
            atol = tolerances().state_atol
        for atom, e in self.entries.items():
            o = other.entries[atom]
            if not values_close(e.initial.value, o.initial.value, atol):
                return False
            if not values_close(e.final.value, o.final.value, atol):
                return False
            if abs(e.work - o.work) > tolerances().work_atol:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "pid": self.pid,
            "entries": [
                {
                    "atom": atom.to_json(),
                    "initial": value_to_json(e.initial.value),
                    "final": value_to_json(e.final.value),
                    "work": e.work,
                }
                for atom, e in sorted(self.entries.items())
            ],
            "reversible": self.reverse_witness is not None,
            "tags": sorted(self.tags),
        }


def make_process(
    entries: Mapping[AtomId, tuple[Any, Any, float]],
    reverse_witness: Callable[[], Process] | None = None,
    tags: Iterable[str] | None = None,
) -> Process:
    """Build a process from ``atom -> (initial_value, final_value, work)``."""
    if not entries:
        raise ValueError("a process involves at least one atom")
    built = {
        atom: ProcessEntry(AtomState(atom, ini), AtomState(atom, fin), float(w))
        for atom, (ini, fin, w) in entries.items()
    }
    return Process(
        pid=next(_pids),
        entries=built,
        reverse_witness=reverse_witness,
        tags=frozenset(tags or ()),
    )


def concatenate(p: Process, q: Process, atol: float | None = None) -> Process:
    """Run ``p`` then ``q``.

    Atoms shared by both must match endpoint states (up to the model
    tolerance); per-atom works add.  For disjoint operands the result
    commutes with the swapped concatenation at the footprint level.
    """
    overlap = p.involved & q.involved
    for atom in overlap:
        if not values_close(p.final_of(atom).value, q.initial_of(atom).value, atol):
            raise StateMismatch(atom, p.final_of(atom).value, q.initial_of(atom).value)
    entries: dict[AtomId, tuple[Any, Any, float]] = {}
    for atom in p.involved | q.involved:
        pe, qe = p.entries.get(atom), q.entries.get(atom)
        if pe is not None and qe is not None:
            entries[atom] = (pe.initial.value, qe.final.value, pe.work + qe.work)
        elif pe is not None:
            entries[atom] = (pe.initial.value, pe.final.value, pe.work)
        else:
            entries[atom] = (qe.initial.value, qe.final.value, qe.work)
    witness = None
    if p.reverse_witness is not None and q.reverse_witness is not None:
        witness = lambda: concatenate(reverse_of(q), reverse_of(p), atol)
    return make_process(entries, reverse_witness=witness, tags=p.tags | q.tags)


def work_of(s: System, p: Process) -> float:
    """Total work done on ``s``: the sum over its atoms, zero when absent."""
    return sum(p.work_on(a) for a in atoms_of(s))


def is_work_process(s: System, p: Process) -> bool:
    """True iff the involved atoms are exactly the atoms of ``s``."""
    return p.involved == atoms_of(s)


def make_identity(s: System, sigma: JointState) -> Process:
    """Zero-work process leaving every atom of ``s`` in place; its own reverse."""
    missing = atoms_of(s) - set(sigma)
    if missing:
        raise ValueError(f"joint state does not cover atoms {missing}")
    entries = {a: (sigma[a].value, sigma[a].value, 0.0) for a in atoms_of(s)}
    return make_process(
        entries,
        reverse_witness=lambda: make_identity(s, sigma),
        tags=("identity",),
    )


class Classification(NamedTuple):
    cyclic: bool
    catalytic: bool


def classify(c: System, p: Process, atol: float | None = None) -> Classification:
    """Cyclic: ``c`` returns to its initial state.  Catalytic: also zero net work.

    Atoms of ``c`` not involved in ``p`` are trivially unchanged.  Work on
    individual atoms of a catalytic system may be non-zero; only the total
    must vanish.
    """
    cyclic = all(
        values_close(e.initial.value, e.final.value, atol)
        for atom, e in p.entries.items()
        if atom in c
    )
    catalytic = cyclic and abs(work_of(c, p)) <= tolerances().work_atol
    return Classification(cyclic, catalytic)


def eliminate_catalyst(s: System, c: System, p: Process) -> Process:
    """Drop a catalytic part from the description.

    Requires ``p`` to be a work process on ``s | c`` with disjoint parts and
    catalytic on ``c``.  The result involves exactly the atoms of ``s`` with
    identical per-atom states and works.
    """
    if not are_disjoint(s, c):
        raise NotWorkProcess("catalyst elimination needs disjoint parts")
    if not is_work_process(compose(s, c), p):
        raise NotWorkProcess("process is not a work process on the combined system")
    if not classify(c, p).catalytic:
        raise NotCatalytic("process is not catalytic on the stated part")
    entries = {
        a: (p.initial_of(a).value, p.final_of(a).value, p.work_on(a))
        for a in atoms_of(s)
    }
    witness = None
    if p.reverse_witness is not None:
        witness = lambda: eliminate_catalyst(s, c, reverse_of(p))
    return make_process(entries, reverse_witness=witness, tags=p.tags)


def reverse_of(p: Process) -> Process:
    if p.reverse_witness is None:
        raise NoReverseWitness(f"process {p.pid} carries no reverse constructor")
    return p.reverse_witness()


def is_reversible(p: Process) -> bool:
    return p.reverse_witness is not None


def join(p1: Process, p2: Process) -> Process:
    """Parallel execution of work processes on disjoint systems."""
    if p1.involved & p2.involved:
        raise Overlap(f"joint processes must not share atoms: {p1.involved & p2.involved}")
    entries = {
        a: (e.initial.value, e.final.value, e.work)
        for proc in (p1, p2)
        for a, e in proc.entries.items()
    }
    witness = None
    if p1.reverse_witness is not None and p2.reverse_witness is not None:
        witness = lambda: join(reverse_of(p1), reverse_of(p2))
    return make_process(entries, reverse_witness=witness, tags=p1.tags | p2.tags)
