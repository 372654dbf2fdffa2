"""Heat-flow temperatures, Clausius sums, and entropy as a state function.

Entropy differences are sums of heat over temperature along sequences of
reversible reservoir contacts.  Around any cycle the sum is non-positive,
and zero when every leg is reversible; that path independence is what makes
the per-atom tally a state function.  Heat must be tallied per contact, at
each contact's own temperature: a zero net heat over a cycle through two
different baths still moves entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .config import tolerances
from .energy import EnergyLedger, heat_of
from .errors import (
    NoTemperature,
    NotCyclic,
    NotWorkProcess,
    UnassignedTemperature,
    ZeroHeat,
)
from .gas import (
    GasAtom,
    GasModel,
    GasState,
    connect_reversible,
    gas_T,
    gas_handle,
    isotherm_theta,
)
from .processes import (
    JointState,
    Process,
    concatenate,
    is_reversible,
    is_work_process,
    values_close,
)
from .reservoirs import NATURAL_SCALE, RESERVOIR_KIND, ReservoirModel, TemperatureScale
from .systems import AtomId, System, World, are_disjoint, atoms_of, compose


@dataclass(frozen=True)
class TemperatureInterval:
    """Closed interval of temperatures assignable to one heat flow."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0 < self.lo <= self.hi):
            raise ValueError(f"invalid temperature interval [{self.lo}, {self.hi}]")

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, t: float) -> bool:
        return self.lo <= t <= self.hi


@dataclass(frozen=True)
class HeatFlowRecord:
    """One contact leg: its process, the heat into the probe, its temperature.

    ``temperature`` may be None only for legs with zero heat (isolated
    legs); those contribute nothing to Clausius sums.
    """

    process: Process
    q: float
    temperature: float | None = None


def assign_heat_temperature(
    world: World,
    s1: System,
    s2: System,
    p: Process,
    ledger: EnergyLedger | None = None,
    scale: TemperatureScale = NATURAL_SCALE,
) -> TemperatureInterval:
    """Temperatures at which the heat into ``s2`` can be said to flow.

    The flow could equivalently be routed through a pair of reservoirs at
    temperature T without changing anything on the endpoints; the set of
    such T is returned as a closed interval.  Reversible isothermal contact
    pins a single temperature; direct conduction between gases at different
    temperatures admits the whole band between them.
    """
    if not are_disjoint(s1, s2):
        raise NotWorkProcess("the two parts must be disjoint")
    if not is_work_process(compose(s1, s2), p):
        raise NotWorkProcess("process must be a work process on the two parts")
    if ledger is None:
        ledger = EnergyLedger.for_world(world)
    q = heat_of(ledger, s2, p)
    if abs(q) <= tolerances().work_atol:
        raise ZeroHeat("no temperature is assigned to a zero heat flow")

    def reservoir_thetas() -> list[float]:
        return [
            world.binding(a).theta for a in p.involved if a.kind == RESERVOIR_KIND
        ]

    def gas_temps_initial() -> list[float]:
        temps = []
        for a in p.involved:
            if a.kind == RESERVOIR_KIND:
                continue
            model = world.binding(a)
            if isinstance(model, GasModel):
                temps.append(gas_T(model, p.initial_of(a).value))
        return temps

    if "type3" in p.tags and not ({"conduction", "reservoir-contact"} & p.tags):
        thetas = set(round_key(t) for t in reservoir_thetas())
        if len(thetas) != 1:
            raise NoTemperature(
                "isothermal legs at different reservoir temperatures do not mix"
            )
        t = scale.absolute(reservoir_thetas()[0])
        return TemperatureInterval(t, t)
    if "conduction" in p.tags:
        temps = sorted(gas_temps_initial())
        if len(temps) != 2:
            raise NoTemperature("conduction needs exactly two gases")
        return TemperatureInterval(scale.absolute(temps[0]), scale.absolute(temps[1]))
    if "reservoir-contact" in p.tags:
        thetas = reservoir_thetas()
        temps = gas_temps_initial()
        if len(thetas) != 1 or len(temps) != 1:
            raise NoTemperature("contact needs one gas and one reservoir")
        lo, hi = sorted((thetas[0], temps[0]))
        return TemperatureInterval(scale.absolute(lo), scale.absolute(hi))
    raise NoTemperature("no reservoir division exists for this process in the model")


def round_key(x: float, digits: int = 12) -> float:
    return round(x, digits)


def clausius_sum(
    records: Sequence[HeatFlowRecord],
    probe: System | None = None,
    atol: float | None = None,
) -> float:
    """Sum of heat over temperature along a closed contact sequence.

    The record processes must be concatenable in order and the concatenation
    cyclic on the probe system (by default, the atoms common to every leg).
    Non-positive for every cycle; zero for all-reversible ones.
    """
    if not records:
        return 0.0
    total = records[0].process
    for rec in records[1:]:
        total = concatenate(total, rec.process, atol)
    if probe is None:
        common = set(records[0].process.involved)
        for rec in records[1:]:
            common &= rec.process.involved
        if not common:
            raise NotCyclic("no common probe system across the records")
        probe = System(frozenset(common))
    for atom in atoms_of(probe):
        entry = total.entries.get(atom)
        if entry is None:
            raise NotCyclic(f"probe atom {atom} not involved")
        if not values_close(entry.initial.value, entry.final.value, atol):
            raise NotCyclic(f"probe atom {atom} does not return to its initial state")
    out = 0.0
    for rec in records:
        if rec.q == 0.0:
            continue
        if rec.temperature is None:
            raise UnassignedTemperature(
                "a record with non-zero heat carries no temperature"
            )
        out += rec.q / rec.temperature
    return out


@dataclass
class EntropyLedger:
    """Per-atom reference states/entropies plus memoized entropies.

    Gas entropies are built from the reversible three-leg template: an
    isolated leg onto an intermediate isotherm, the contact leg, and an
    isolated leg to the target.  Only the contact leg carries heat, at the
    reservoir's temperature on the configured absolute scale.
    """

    world: World
    scale: TemperatureScale = NATURAL_SCALE
    refs: dict[AtomId, tuple[Any, float]] = field(default_factory=dict)
    memo: dict[tuple[AtomId, Any], float] = field(default_factory=dict)

    @classmethod
    def for_world(
        cls, world: World, scale: TemperatureScale = NATURAL_SCALE
    ) -> "EntropyLedger":
        ledger = cls(world=world, scale=scale)
        for atom in world.registry:
            binding = world.binding(atom)
            if isinstance(binding, GasModel):
                ledger.refs[atom] = (binding.sigma0, binding.S0)
            elif isinstance(binding, ReservoirModel):
                ledger.refs[atom] = (0.0, 0.0)
        return ledger

    def atom_entropy(self, atom: AtomId, payload: Any) -> float:
        key = (atom, payload)
        if key in self.memo:
            return self.memo[key]
        if atom not in self.refs:
            binding = self.world.binding(atom)
            if isinstance(binding, GasModel):
                self.refs[atom] = (binding.sigma0, binding.S0)
            elif isinstance(binding, ReservoirModel):
                self.refs[atom] = (0.0, 0.0)
            else:
                raise NotWorkProcess(f"no entropy reference for {atom}")
        ref, s0 = self.refs[atom]
        binding = self.world.binding(atom)
        if isinstance(binding, ReservoirModel):
            t = self.scale.absolute(binding.theta)
            value = s0 + (float(payload) - float(ref)) / t
        else:
            gas = gas_handle(self.world, atom)
            value = s0 + self._gas_delta(gas, ref, payload)
        self.memo[key] = value
        return value

    def _gas_delta(self, gas: GasAtom, start: GasState, end: GasState,
                   theta: float | None = None) -> float:
        if start == end:
            return 0.0
        if theta is None:
            theta = math.sqrt(
                isotherm_theta(gas.model, start) * isotherm_theta(gas.model, end)
            )
        legs = connect_reversible(gas, start, end, theta)
        q = legs[1].heat_between(gas.atom, 0.0, 1.0)
        return q / self.scale.absolute(theta)


def entropy(ledger: EntropyLedger, s: System, sigma: JointState) -> float:
    """Entropy of a joint state: the sum of its atoms' entropies.

    Composite references align automatically, so additivity holds in
    absolute values, not just differences.
    """
    return sum(ledger.atom_entropy(a, sigma[a].value) for a in atoms_of(s))


def delta_entropy(ledger: EntropyLedger, s: System, p: Process) -> float:
    total = 0.0
    for atom in atoms_of(s):
        entry = p.entries.get(atom)
        if entry is None:
            continue
        total += ledger.atom_entropy(atom, entry.final.value) - ledger.atom_entropy(
            atom, entry.initial.value
        )
    return total


@dataclass(frozen=True)
class EntropyVerdict:
    passed: bool
    delta_s: float
    reversible: bool

    def to_json(self) -> dict:
        return {"passed": self.passed, "delta_S": self.delta_s,
                "reversible": self.reversible}


def check_entropy_theorem(
    s: System, p: Process, ledger: EntropyLedger, tol: float = 1e-9
) -> EntropyVerdict:
    """Work processes never lower entropy; reversible ones keep it constant."""
    if not is_work_process(s, p):
        raise NotWorkProcess("the entropy monotone is stated for work processes")
    ds = delta_entropy(ledger, s, p)
    rev = is_reversible(p)
    passed = ds >= -tol and (not rev or abs(ds) <= tol)
    return EntropyVerdict(passed=passed, delta_s=ds, reversible=rev)


def records_from_legs(
    legs: Iterable, gas: GasAtom, scale: TemperatureScale = NATURAL_SCALE
) -> list[HeatFlowRecord]:
    """Build Clausius records from quasistatic legs, one slice per leg.

    Isothermal legs carry their reservoir temperature; isolated and friction
    legs carry zero heat and no temperature.
    """
    records = []
    for fam in legs:
        proc = fam.slice(0.0, 1.0)
        theta = fam.meta.get("theta") if fam.meta else None
        if theta is not None:
            q = fam.heat_between(gas.atom, 0.0, 1.0)
            records.append(HeatFlowRecord(proc, q, scale.absolute(theta)))
        else:
            records.append(HeatFlowRecord(proc, 0.0, None))
    return records
