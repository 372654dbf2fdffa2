"""First-law layer: reachability, internal energy, heat, conformance checks.

Internal energy is a state function anchored at a per-atom reference: the
energy of a state is the reference energy plus the total work of any
connecting work process (or minus, for a process arriving at the reference).
The engine constructs such processes from the model's segment vocabulary and
integrates their work numerically; the closed forms in the gas module are
used only as references for the anchor constant and as test oracles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .config import tolerances
from .errors import DepthExceeded, Unreachable
from .gas import GasAtom, GasModel, GasPlanner, GasState, gas_U, gas_handle
from .processes import JointState, Process, work_of
from .reservoirs import RESERVOIR_KIND, ReservoirModel
from .systems import AtomId, System, World, atoms_of


@dataclass
class EnergyLedger:
    """Per-atom reference states/energies plus memoized state energies.

    Queries are pure given a frozen catalog; memo writes are the only
    mutation and callers sharing a ledger across threads must serialize
    them (or accept recomputation).
    """

    world: World
    refs: dict[AtomId, tuple[GasState, float]] = field(default_factory=dict)
    planners: dict[AtomId, GasPlanner] = field(default_factory=dict)
    memo: dict[tuple[AtomId, Any], float] = field(default_factory=dict)

    @classmethod
    def for_world(cls, world: World, depth: int = 4) -> "EnergyLedger":
        """Default ledger: gas atoms anchored at their model reference state."""
        ledger = cls(world=world)
        for atom in world.registry:
            binding = world.binding(atom)
            if isinstance(binding, GasModel):
                ledger.refs[atom] = (binding.sigma0, gas_U(binding, binding.sigma0))
                ledger.planners[atom] = GasPlanner(
                    gas_handle(world, atom), depth=depth
                )
        return ledger

    def register_gas(self, gas: GasAtom, sigma0: GasState | None = None,
                     u0: float | None = None, depth: int = 4) -> None:
        sigma0 = sigma0 if sigma0 is not None else gas.model.sigma0
        u0 = u0 if u0 is not None else gas_U(gas.model, sigma0)
        self.refs[gas.atom] = (sigma0, u0)
        self.planners[gas.atom] = GasPlanner(gas, depth=depth)

    def atom_energy(self, atom: AtomId, payload: Any) -> float:
        """Energy of one atom's state, constructed via connecting work processes."""
        if atom.kind == RESERVOIR_KIND or isinstance(
            self.world.binding(atom) if atom in self.world else None, ReservoirModel
        ):
            return float(payload)
        key = (atom, payload)
        if key in self.memo:
            return self.memo[key]
        if atom not in self.refs:
            if atom in self.world and isinstance(self.world.binding(atom), GasModel):
                self.register_gas(gas_handle(self.world, atom))
            else:
                raise Unreachable(f"no energy reference registered for {atom}")
        sigma0, u0 = self.refs[atom]
        planner = self.planners[atom]
        if planner.decide(sigma0, payload):
            plan = planner.route(sigma0, payload)
            value = u0 + sum(f.work_between(atom, 0.0, 1.0) for f in plan)
        elif planner.decide(payload, sigma0):
            plan = planner.route(payload, sigma0)
            value = u0 - sum(f.work_between(atom, 0.0, 1.0) for f in plan)
        else:  # pragma: no cover - the full gas vocabulary always connects
            raise Unreachable(f"no work process connects {sigma0} and {payload}")
        self.memo[key] = value
        return value


@dataclass(frozen=True)
class StateFunctionDelta:
    """Change of a state function across a process: value(final) - value(initial)."""

    initial: dict
    final: dict
    delta: float


def state_function_delta(z, s: System, p: Process) -> StateFunctionDelta:
    """Evaluate ``z`` (a joint-state function) on a process's endpoints on ``s``."""
    initial = p.initial_state(s)
    final = p.final_state(s)
    return StateFunctionDelta(initial=initial, final=final, delta=z(final) - z(initial))


def reaches(
    s: System,
    sigma1: JointState,
    sigma2: JointState,
    catalog: GasPlanner | Mapping[AtomId, GasPlanner],
) -> bool:
    """Whether a work process on ``s`` maps ``sigma1`` to ``sigma2``.

    The catalog supplies per-atom planners; joint plans move every atom
    independently.  For a single atom the answer is exact.  For composite
    systems a negative per-atom answer is inconclusive (cross-coupling
    processes are not searched) and raises ``DepthExceeded``.
    """
    atoms = sorted(atoms_of(s))
    if isinstance(catalog, GasPlanner):
        if len(atoms) != 1:
            raise ValueError("a single planner only covers a single-atom system")
        planners = {atoms[0]: catalog}
    else:
        planners = dict(catalog)
    verdicts = []
    for atom in atoms:
        planner = planners[atom]
        verdicts.append(planner.decide(sigma1[atom].value, sigma2[atom].value))
    if all(verdicts):
        return True
    if len(atoms) == 1:
        return False
    raise DepthExceeded(
        "per-atom plans exhausted on a composite system; cross-couplings not searched"
    )


def internal_energy(ledger: EnergyLedger, s: System, sigma: JointState) -> float:
    """Internal energy of a joint state: the sum of its atoms' energies."""
    return sum(ledger.atom_energy(a, sigma[a].value) for a in atoms_of(s))


def delta_u(ledger: EnergyLedger, s: System, p: Process) -> float:
    """Energy change of ``s`` under ``p``; uninvolved atoms contribute zero."""
    total = 0.0
    for atom in atoms_of(s):
        entry = p.entries.get(atom)
        if entry is None:
            continue
        total += ledger.atom_energy(atom, entry.final.value) - ledger.atom_energy(
            atom, entry.initial.value
        )
    return total


def heat_of(ledger: EnergyLedger, s: System, p: Process) -> float:
    """Heat flowing into ``s``: energy change minus work done on it."""
    return delta_u(ledger, s, p) - work_of(s, p)


@dataclass
class FirstLawReport:
    pairs_checked: int
    violations: list[dict]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"pairs_checked": self.pairs_checked, "violations": self.violations}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def check_first_law(
    planner: GasPlanner,
    pairs: Sequence[tuple[GasState, GasState]],
    routes_per_pair: int = 3,
    rtol: float | None = None,
    atol: float | None = None,
) -> FirstLawReport:
    """Work totals of all discovered connecting work processes must agree.

    For each sampled state pair, plans are built in whichever direction is
    reachable; a pair reachable in neither direction, or plans whose total
    works disagree beyond tolerance, are reported as violations.
    """
    cfg = tolerances()
    rtol = cfg.first_law_rtol if rtol is None else rtol
    atol = cfg.first_law_atol if atol is None else atol
    violations = []
    atom = planner.gas.atom
    for s1, s2 in pairs:
        if planner.decide(s1, s2):
            a, b = s1, s2
        elif planner.decide(s2, s1):
            a, b = s2, s1
        else:
            violations.append(
                {"sigma1": s1.as_tuple(), "sigma2": s2.as_tuple(), "works": [],
                 "reason": "unreachable in both directions"}
            )
            continue
        plans = planner.routes(a, b, count=routes_per_pair)
        works = [sum(f.work_between(atom, 0.0, 1.0) for f in plan) for plan in plans]
        if not works:
            violations.append(
                {"sigma1": a.as_tuple(), "sigma2": b.as_tuple(), "works": [],
                 "reason": "no plan constructed"}
            )
            continue
        spread = max(works) - min(works)
        bound = max(atol, rtol * max(abs(w) for w in works))
        if spread > bound:
            violations.append(
                {"sigma1": a.as_tuple(), "sigma2": b.as_tuple(),
                 "works": works, "reason": f"work spread {spread} beyond {bound}"}
            )
    return FirstLawReport(pairs_checked=len(pairs), violations=violations)
