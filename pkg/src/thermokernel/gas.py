"""Ideal-gas model: segment constructors, closed forms, connection templates.

The gas lives on the open positive quadrant (p, V).  Three segment kinds
generate its processes:

* friction heating at constant volume (irreversible, pressure only rises),
* isolated compression/expansion along p V^gamma = const (reversible),
* isothermal reservoir contact along p V = const (reversible, on gas + bath).

Work processes on the gas alone are finite alternating sequences of the
first two kinds; adjacent same-kind segments merge, degenerate legs drop.
The closed forms for internal energy, entropy and gas temperature are the
oracles that the path-integrating engine is tested against; the engine never
calls them as shortcuts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .config import tolerances
from .errors import (
    DepthExceeded,
    DomainError,
    OffIsotherm,
    PreconditionNotMet,
    PressureDecrease,
)
from .processes import Process, concatenate, make_identity, make_process, joint, AtomState
from .quasistatic import Curve, QuasistaticFamily, identity_family
from .reservoirs import Reservoir, add_reservoir
from .systems import AtomId, System, World, system

GAS_KIND = "ideal-gas"

R_SI = 8.314462618  # J / (mol K)


@dataclass(frozen=True)
class GasState:
    """A point (p, V) in the open positive quadrant."""

    p: float
    V: float

    def __post_init__(self):
        floor = tolerances().numeric_floor
        if not (self.p > floor and self.V > floor):
            raise DomainError(f"gas state ({self.p}, {self.V}) below the positive floor")

    def as_tuple(self) -> tuple[float, float]:
        return (self.p, self.V)


@dataclass(frozen=True)
class GasModel:
    """Constants of one gas atom.

    ``n`` is a characteristic constant, not a state variable.  ``gamma``
    defaults to the monoatomic value 5/3; every derived quantity is written
    in terms of it so other exponents work too.  ``U0`` and ``S0`` are the
    additive reference constants of the closed forms; ``sigma0`` is the
    reference state for entropy (and the default energy reference).
    """

    n: float = 1.0
    R: float = 1.0
    gamma: float = 5.0 / 3.0
    sigma0: GasState = GasState(1.0, 1.0)
    U0: float = 0.0
    S0: float = 0.0

    def __post_init__(self):
        if not (self.n > 0 and self.R > 0 and self.gamma > 1):
            raise ValueError("need n > 0, R > 0, gamma > 1")

    @property
    def nR(self) -> float:
        return self.n * self.R

    @property
    def cv_R(self) -> float:
        """Isochoric heat capacity over nR: 1/(gamma - 1), i.e. 3/2 monoatomic."""
        return 1.0 / (self.gamma - 1.0)

    @property
    def cp_R(self) -> float:
        return self.gamma / (self.gamma - 1.0)


@dataclass(frozen=True)
class GasAtom:
    """Handle binding a gas atom to its model and world."""

    atom: AtomId
    model: GasModel
    world: World

    @property
    def system(self) -> System:
        return system(self.atom)


def add_ideal_gas(world: World, model: GasModel | None = None) -> GasAtom:
    model = model if model is not None else GasModel()
    atom = world.new_atom(GAS_KIND, model)
    return GasAtom(atom=atom, model=model, world=world)


def gas_handle(world: World, atom: AtomId) -> GasAtom:
    model = world.binding(atom)
    if not isinstance(model, GasModel):
        raise TypeError(f"{atom} is not bound to a gas model")
    return GasAtom(atom=atom, model=model, world=world)


# --- closed forms (oracles) -------------------------------------------------

def gas_U(g: GasModel, s: GasState) -> float:
    """Internal energy closed form: pV/(gamma-1) + U0."""
    return g.cv_R * s.p * s.V + g.U0


def gas_S(g: GasModel, s: GasState) -> float:
    """Entropy closed form relative to the reference state."""
    return (
        g.nR
        * (g.cv_R * math.log(s.p / g.sigma0.p) + g.cp_R * math.log(s.V / g.sigma0.V))
        + g.S0
    )


def gas_T(g: GasModel, s: GasState) -> float:
    """Gas temperature pV/(nR); the equation of state."""
    return s.p * s.V / g.nR


def gas_U_sv(g: GasModel, s_value: float, V: float) -> float:
    """Internal energy as a function of entropy and volume."""
    p = (
        g.sigma0.p
        * (V / g.sigma0.V) ** (-g.gamma)
        * math.exp((s_value - g.S0) / (g.nR * g.cv_R))
    )
    return g.cv_R * p * V + g.U0


def adiabat_invariant(g: GasModel, s: GasState) -> float:
    """p V^gamma, conserved on isolated segments and raised by friction."""
    return s.p * s.V**g.gamma


def isotherm_theta(g: GasModel, s: GasState) -> float:
    """pV/(nR): the parameter of the reservoir this state couples to."""
    return s.p * s.V / g.nR


# --- segment constructors ---------------------------------------------------

def type1(gas: GasAtom, start: GasState, p2: float) -> QuasistaticFamily:
    """Friction heating at constant volume from ``start.p`` up to ``p2``.

    Irreversible; a work process on the gas alone, so its heat rate is zero.
    """
    g = gas.model
    if p2 < start.p:
        raise PressureDecrease(f"friction cannot lower pressure: {p2} < {start.p}")
    if p2 == start.p:
        return identity_family({gas.atom: start}, tag="type1")
    dp = p2 - start.p
    V = start.V
    atom = gas.atom

    def evaluate(lam: float):
        return {atom: GasState(start.p + lam * dp, V)}

    def derivative(lam: float):
        return {atom: (dp, 0.0)}

    rate = g.cv_R * V * dp
    return QuasistaticFamily(
        atoms=(atom,),
        curve=Curve(eval=evaluate, derivative=derivative),
        work_rates={atom: lambda lam: rate},
        heat_rates={},
        reversible=False,
        tag="type1",
        meta={"gas": atom},
    )


def type2(gas: GasAtom, start: GasState, V2: float) -> QuasistaticFamily:
    """Isolated compression/expansion along p V^gamma = const (reversible)."""
    g = gas.model
    if not V2 > tolerances().numeric_floor:
        raise DomainError(f"target volume {V2} below the positive floor")
    if V2 == start.V:
        return identity_family({gas.atom: start}, tag="type2")
    inv = adiabat_invariant(g, start)
    log_r = math.log(V2 / start.V)
    atom = gas.atom

    def volume(lam: float) -> float:
        return start.V * math.exp(lam * log_r)

    def evaluate(lam: float):
        v = volume(lam)
        return {atom: GasState(inv * v**-g.gamma, v)}

    def derivative(lam: float):
        v = volume(lam)
        p = inv * v**-g.gamma
        return {atom: (-g.gamma * p * log_r, v * log_r)}

    def work_rate(lam: float) -> float:
        v = volume(lam)
        return -inv * v ** (1.0 - g.gamma) * log_r

    end = GasState(inv * V2**-g.gamma, V2)
    fam = QuasistaticFamily(
        atoms=(atom,),
        curve=Curve(eval=evaluate, derivative=derivative),
        work_rates={atom: work_rate},
        heat_rates={},
        reversible=True,
        reverse_factory=lambda: type2(gas, end, start.V),
        tag="type2",
        meta={"gas": atom},
    )
    return fam


def type3(
    gas: GasAtom,
    res: Reservoir,
    start: GasState,
    V2: float,
    reservoir_energy: float = 0.0,
) -> QuasistaticFamily:
    """Isothermal reservoir contact along p V = nR theta (reversible).

    The gas must already sit on the reservoir's isotherm.  The reservoir
    does zero work and its energy moves opposite to the heat taken up by the
    gas; only the energy difference matters, never the absolute value.
    """
    g = gas.model
    cfg = tolerances()
    if not V2 > cfg.numeric_floor:
        raise DomainError(f"target volume {V2} below the positive floor")
    c = g.nR * res.theta
    if abs(start.p * start.V - c) > cfg.isotherm_rtol * max(1.0, abs(c)):
        raise OffIsotherm(
            f"state ({start.p}, {start.V}) is not on the theta={res.theta} isotherm"
        )
    if V2 == start.V:
        return identity_family(
            {gas.atom: start, res.atom: reservoir_energy}, tag="type3"
        )
    log_r = math.log(V2 / start.V)
    q_total = c * log_r  # heat into the gas over the whole segment
    atom = gas.atom
    bath = res.atom

    def volume(lam: float) -> float:
        return start.V * math.exp(lam * log_r)

    def evaluate(lam: float):
        v = volume(lam)
        return {atom: GasState(c / v, v), bath: reservoir_energy - lam * q_total}

    def derivative(lam: float):
        v = volume(lam)
        return {atom: (-(c / v) * log_r, v * log_r), bath: (-q_total,)}

    end = GasState(c / V2, V2)
    fam = QuasistaticFamily(
        atoms=(atom, bath),
        curve=Curve(eval=evaluate, derivative=derivative),
        work_rates={atom: lambda lam: -c * log_r},
        heat_rates={atom: lambda lam: c * log_r, bath: lambda lam: -c * log_r},
        reversible=True,
        reverse_factory=lambda: type3(
            gas, res, end, start.V, reservoir_energy - q_total
        ),
        tag="type3",
        meta={"gas": atom, "reservoir": bath, "theta": res.theta},
    )
    return fam


def conduct(
    hot: GasAtom, hot_state: GasState, cold: GasAtom, cold_state: GasState, q: float
) -> Process:
    """Direct thermal conduction between two gases at constant volumes.

    Heat ``q > 0`` flows from the hotter gas to the colder one with zero
    work on both; the transfer must not overshoot temperature equality.
    Irreversible: no reverse witness.
    """
    if hot.atom == cold.atom:
        raise PreconditionNotMet("conduction needs two distinct gases")
    if not q > 0:
        raise PreconditionNotMet("conduction transfers a positive amount of heat")
    gh, gc = hot.model, cold.model
    t_hot = gas_T(gh, hot_state)
    t_cold = gas_T(gc, cold_state)
    if not t_hot > t_cold:
        raise PreconditionNotMet("heat conducts from the hotter gas to the colder one")
    p_hot = hot_state.p - q / (gh.cv_R * hot_state.V)
    p_cold = cold_state.p + q / (gc.cv_R * cold_state.V)
    if p_hot <= tolerances().numeric_floor or p_hot * hot_state.V / gh.nR < (
        p_cold * cold_state.V / gc.nR
    ):
        raise PreconditionNotMet("transfer overshoots temperature equality")
    hot_final = GasState(p_hot, hot_state.V)
    cold_final = GasState(p_cold, cold_state.V)
    return make_process(
        {
            hot.atom: (hot_state, hot_final, 0.0),
            cold.atom: (cold_state, cold_final, 0.0),
        },
        tags=("conduction",),
    )


def reservoir_contact(
    gas: GasAtom,
    start: GasState,
    res: Reservoir,
    q: float,
    reservoir_energy: float = 0.0,
) -> Process:
    """Irreversible heat exchange with a reservoir at constant gas volume.

    ``q > 0`` sends heat from the gas into the reservoir and requires the
    gas to stay at or above the reservoir's isotherm; ``q < 0`` is the
    opposite.  Zero work on both sides.
    """
    if q == 0:
        raise PreconditionNotMet("contact must exchange a non-zero heat")
    g = gas.model
    final = GasState(start.p - q / (g.cv_R * start.V), start.V)
    t0, t1, theta = gas_T(g, start), gas_T(g, final), res.theta
    slack = tolerances().isotherm_rtol * max(1.0, theta)
    if q > 0 and (t0 < theta - slack or t1 < theta - slack):
        raise PreconditionNotMet("gas must stay at least as hot as the reservoir")
    if q < 0 and (t0 > theta + slack or t1 > theta + slack):
        raise PreconditionNotMet("gas must stay at most as hot as the reservoir")
    return make_process(
        {
            gas.atom: (start, final, 0.0),
            res.atom: (reservoir_energy, reservoir_energy + q, 0.0),
        },
        tags=("reservoir-contact",),
    )


# --- connection templates ---------------------------------------------------

def _slice_all(families: Sequence[QuasistaticFamily]) -> Process:
    parts = [f.slice(0.0, 1.0) for f in families]
    out = parts[0]
    for nxt in parts[1:]:
        out = concatenate(out, nxt)
    return out


def connect(gas: GasAtom, s1: GasState, s2: GasState) -> Process:
    """A work process on the gas between the two states.

    Orients the pair so the adiabat invariant does not decrease, then runs
    an isolated leg to the target volume followed by a friction leg up to
    the target pressure.  The returned footprint may therefore run from
    ``s2`` to ``s1``; both directions determine the same energy difference.
    Equal invariants degenerate to a single isolated leg.
    """
    g = gas.model
    if s1 == s2:
        return make_identity(gas.system, joint(AtomState(gas.atom, s1)))
    inv1, inv2 = adiabat_invariant(g, s1), adiabat_invariant(g, s2)
    scale = max(abs(inv1), abs(inv2))
    if abs(inv1 - inv2) <= 1e-12 * scale:
        return type2(gas, s1, s2.V).slice(0.0, 1.0)
    lo, hi = (s1, s2) if inv1 < inv2 else (s2, s1)
    families = []
    leg = type2(gas, lo, hi.V)
    if hi.V != lo.V:
        families.append(leg)
    mid = leg.curve(1.0)[gas.atom]
    families.append(type1(gas, mid, hi.p))
    return _slice_all(families)


def connect_reversible(
    gas: GasAtom, s1: GasState, s2: GasState, theta_prime: float
) -> list[QuasistaticFamily]:
    """Reversible three-leg route: adiabat, isotherm at ``theta_prime``, adiabat.

    Heat is exchanged only on the middle leg, with a reservoir that may have
    any positive parameter; a fresh reservoir is minted for it.  This is the
    canonical template for computing entropy differences.
    """
    if not theta_prime > 0:
        raise DomainError("isotherm parameter must be positive")
    g = gas.model
    c = g.nR * theta_prime
    inv1, inv2 = adiabat_invariant(g, s1), adiabat_invariant(g, s2)
    exponent = 1.0 / (g.gamma - 1.0)
    v_on = (inv1 / c) ** exponent
    v_off = (inv2 / c) ** exponent
    res = add_reservoir(gas.world, theta_prime)
    first = type2(gas, s1, v_on)
    on_state = first.curve(1.0)[gas.atom]
    middle = type3(gas, res, on_state, v_off)
    off_state = middle.curve(1.0)[gas.atom]
    last = type2(gas, off_state, s2.V)
    return [first, middle, last]


def run_segments(gas: GasAtom, start: GasState, specs: Sequence[dict]) -> Process:
    """Execute a declarative list of segments from ``start``.

    Each spec is ``{"type": "type1", "p2": ...}`` or ``{"type": "type2",
    "V2": ...}``; isothermal legs take ``{"type": "type3", "theta": ...,
    "V2": ...}`` and mint their reservoir.
    """
    state = start
    process: Process | None = None
    for spec in specs:
        kind = spec["type"]
        if kind == "type1":
            fam = type1(gas, state, float(spec["p2"]))
        elif kind == "type2":
            fam = type2(gas, state, float(spec["V2"]))
        elif kind == "type3":
            res = add_reservoir(gas.world, float(spec["theta"]))
            fam = type3(gas, res, state, float(spec["V2"]))
        else:
            raise ValueError(f"unknown segment type {kind!r}")
        piece = fam.slice(0.0, 1.0)
        process = piece if process is None else concatenate(process, piece)
        state = piece.final_of(gas.atom).value
    if process is None:
        return make_identity(gas.system, joint(AtomState(gas.atom, start)))
    return process


def qs_tangent_sets(g: GasModel, s: GasState):
    """Tangent pairs of the segment curves through a state, in (p, V) components."""
    isochore = (1.0, 0.0)
    adiabat = (-g.gamma * s.p, s.V)
    isotherm = (-s.p, s.V)
    return [
        ("work-pair", (isochore, adiabat)),
        ("reversible-pair", (adiabat, isotherm)),
    ]


# --- reachability planning --------------------------------------------------

@dataclass(frozen=True)
class GasPlanner:
    """Plans work processes on a single gas atom from its segment vocabulary.

    Reachability on the gas is governed by the adiabat invariant: isolated
    legs preserve it, friction raises it.  ``depth`` caps the number of
    segments a plan may use; if the cap cuts off the only possible plans the
    search is inconclusive and raises ``DepthExceeded``.
    """

    gas: GasAtom
    kinds: tuple[str, ...] = ("type1", "type2")
    depth: int = 4

    def _close(self, a: GasState, b: GasState) -> bool:
        tol = tolerances().state_atol
        return abs(a.p - b.p) <= tol and abs(a.V - b.V) <= tol

    def decide(self, a: GasState, b: GasState) -> bool:
        """Whether some work process on the gas maps ``a`` to ``b``."""
        if self._close(a, b):
            return True
        g = self.gas.model
        t1 = "type1" in self.kinds
        t2 = "type2" in self.kinds
        inv_a, inv_b = adiabat_invariant(g, a), adiabat_invariant(g, b)
        scale = max(abs(inv_a), abs(inv_b), 1.0)
        same_adiabat = abs(inv_a - inv_b) <= 1e-12 * scale
        same_volume = abs(a.V - b.V) <= 1e-12 * max(a.V, b.V)
        raising = inv_b >= inv_a - 1e-12 * scale
        if t1 and not t2:
            return same_volume and b.p >= a.p - 1e-12 * max(a.p, b.p)
        if t2 and not t1:
            return same_adiabat
        if not (t1 or t2):
            raise DepthExceeded("no segment kinds available; search inconclusive")
        if not raising:
            return False
        if same_adiabat or (same_volume and b.p >= a.p):
            return True
        if self.depth < 2:
            raise DepthExceeded(
                f"two segments needed but depth={self.depth}; inconclusive"
            )
        return True

    def routes(
        self, a: GasState, b: GasState, count: int = 3
    ) -> list[list[QuasistaticFamily]]:
        """Up to ``count`` distinct segment plans from ``a`` to ``b``.

        Empty when ``b`` is unreachable from ``a``.  Plans differ in the
        volume at which the friction leg runs.
        """
        if not self.decide(a, b):
            return []
        gas = self.gas
        g = gas.model
        if self._close(a, b):
            return [[identity_family({gas.atom: a}, tag="identity")]]
        inv_a, inv_b = adiabat_invariant(g, a), adiabat_invariant(g, b)
        scale = max(abs(inv_a), abs(inv_b), 1.0)
        if abs(inv_a - inv_b) <= 1e-12 * scale:
            return [[type2(gas, a, b.V)]]
        # friction-leg volumes: geometric interpolants between the endpoints
        fractions = [1.0, 0.0, 0.5, 0.25, 0.75, 0.375, 0.625]
        plans: list[list[QuasistaticFamily]] = []
        seen: set[float] = set()
        for t in fractions:
            if len(plans) >= count:
                break
            vm = a.V ** (1.0 - t) * b.V**t
            if vm in seen:
                continue
            seen.add(vm)
            plan: list[QuasistaticFamily] = []
            state = a
            if abs(vm - state.V) > 0:
                leg = type2(gas, state, vm)
                plan.append(leg)
                state = leg.curve(1.0)[gas.atom]
            target_p = inv_b * vm**-g.gamma
            if target_p < state.p:
                continue  # this interpolant would need a pressure drop
            leg = type1(gas, state, target_p)
            plan.append(leg)
            state = leg.curve(1.0)[gas.atom]
            if abs(b.V - state.V) > 0:
                leg = type2(gas, state, b.V)
                plan.append(leg)
            plan = [f for f in plan if f.tag != "identity"]
            if len(plan) <= self.depth and plan:
                plans.append(plan)
        return plans

    def route(self, a: GasState, b: GasState) -> list[QuasistaticFamily] | None:
        plans = self.routes(a, b, count=1)
        return plans[0] if plans else None
