"""Scaled systems, extensive/intensive classification, maximum entropy.

Scaling a gas by a rational factor multiplies its amount of substance,
volume-like quantities and the additive reference constants; pressure and
temperature are untouched.  In the extensive variables (U, V) the entropy
of a pair of scaled parts is maximized exactly at the proportional split,
and the unconstrained entropy is concave; both facts are checked here
numerically, the optimizer cross-checked against a plain grid search in the
test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import optimize

from .errors import IncompatibleBases, NonPositiveScale, OptimizerFailed
from .gas import GasModel, GasState, gas_S, gas_U
from .processes import Process, make_process
from .systems import World


@dataclass(frozen=True)
class UVState:
    """A gas state in the extensive variables (internal energy, volume)."""

    U: float
    V: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.U, self.V)


@dataclass(frozen=True)
class ScaledGas:
    """A gas model scaled by a positive rational factor."""

    base: GasModel
    lam: Fraction
    model: GasModel


def _scaled_model(base: GasModel, factor: float) -> GasModel:
    return replace(
        base,
        n=base.n * factor,
        sigma0=GasState(base.sigma0.p, base.sigma0.V * factor),
        U0=base.U0 * factor,
        S0=base.S0 * factor,
    )


def scale(g: GasModel, lam) -> ScaledGas:
    """Scale a gas model by a positive rational factor."""
    lam = Fraction(lam)
    if lam <= 0:
        raise NonPositiveScale(f"scale factor must be positive, got {lam}")
    return ScaledGas(base=g, lam=lam, model=_scaled_model(g, float(lam)))


def scaled_state(s: GasState, lam) -> GasState:
    """Pressure is intensive, volume extensive: (p, V) -> (p, lam V)."""
    factor = float(Fraction(lam))
    if factor <= 0:
        raise NonPositiveScale(f"scale factor must be positive, got {lam}")
    return GasState(s.p, s.V * factor)


def classify_variable(
    name: str,
    probe: Callable[[GasModel, GasState], float],
    base: GasModel,
    states: Sequence[GasState],
    factors: Sequence = (Fraction(1, 2), Fraction(2), Fraction(3)),
    rtol: float = 1e-9,
) -> str:
    """Classify a state map as extensive, intensive or neither.

    Samples the probe on the base model and on scaled models at scaled
    states; extensive means the value scales linearly, intensive means it is
    invariant.
    """
    extensive = True
    intensive = True
    for lam in factors:
        scaled = scale(base, lam)
        f = float(Fraction(lam))
        for s in states:
            v0 = probe(base, s)
            v1 = probe(scaled.model, scaled_state(s, lam))
            tol = rtol * max(1.0, abs(v0), abs(v1))
            if abs(v1 - f * v0) > tol:
                extensive = False
            if abs(v1 - v0) > tol:
                intensive = False
    if extensive and not intensive:
        return "extensive"
    if intensive and not extensive:
        return "intensive"
    if extensive and intensive:
        return "extensive"  # only possible for identically zero probes
    return "neither"


def uv_to_gas(model: GasModel, s: UVState) -> GasState:
    """Convert (U, V) to (p, V); requires U above the model's offset."""
    p = (s.U - model.U0) / (model.cv_R * s.V)
    return GasState(p, s.V)


def gas_to_uv(model: GasModel, s: GasState) -> UVState:
    return UVState(gas_U(model, s), s.V)


def entropy_uv(model: GasModel, U: float, V: float) -> float:
    """Entropy closed form in the extensive variables."""
    return gas_S(model, uv_to_gas(model, UVState(U, V)))


def remove_constraint(
    g1: ScaledGas,
    g2: ScaledGas,
    s1: UVState,
    s2: UVState,
    world: World | None = None,
) -> tuple[Process, UVState]:
    """Let two scaled parts of one base exchange energy and volume freely.

    The final state gives each part its size-proportional share of the
    totals, at zero work on both; the returned total is the unconstrained
    state.  Already-proportional inputs yield an identity (the reversible
    case).
    """
    if g1.base != g2.base:
        raise IncompatibleBases("parts must be scalings of one common base model")
    lam1, lam2 = float(g1.lam), float(g2.lam)
    f1 = lam1 / (lam1 + lam2)
    f2 = lam2 / (lam1 + lam2)
    total = UVState(s1.U + s2.U, s1.V + s2.V)
    t1 = UVState(f1 * total.U, f1 * total.V)
    t2 = UVState(f2 * total.U, f2 * total.V)
    if world is None:
        world = World()
    from .gas import add_ideal_gas

    a1 = add_ideal_gas(world, g1.model)
    a2 = add_ideal_gas(world, g2.model)
    start1, end1 = uv_to_gas(g1.model, s1), uv_to_gas(g1.model, t1)
    start2, end2 = uv_to_gas(g2.model, s2), uv_to_gas(g2.model, t2)
    proportional = start1 == end1 and start2 == end2
    entries = {
        a1.atom: (start1, end1, 0.0),
        a2.atom: (start2, end2, 0.0),
    }
    witness = None
    if proportional:
        witness = lambda: remove_constraint(g1, g2, s1, s2, world)[0]
    p = make_process(entries, reverse_witness=witness, tags=("constraint-removal",))
    return p, total


@dataclass(frozen=True)
class MaxEntropyResult:
    split: tuple[UVState, UVState]
    s_max: float
    iterations: int

    def to_json(self) -> dict:
        return {
            "split": [self.split[0].as_tuple(), self.split[1].as_tuple()],
            "s_max": self.s_max,
            "iterations": self.iterations,
        }


def max_entropy_split(
    base: GasModel,
    lam: float,
    total: UVState,
    xatol: float = 1e-10,
    fatol: float = 1e-13,
) -> MaxEntropyResult:
    """Maximize the joint entropy of a lam / (1-lam) pair over all splits.

    The objective is strictly concave on the open rectangle, so Nelder-Mead
    from a generic interior point converges to the unique maximizer, which
    is the proportional split.
    """
    if not 0.0 < lam < 1.0:
        raise NonPositiveScale("the split fraction must lie strictly inside (0, 1)")
    m1 = _scaled_model(base, lam)
    m2 = _scaled_model(base, 1.0 - lam)
    floor_u = 1e-9 * abs(total.U)
    floor_v = 1e-9 * total.V

    def objective(x: np.ndarray) -> float:
        u1, v1 = float(x[0]), float(x[1])
        u2, v2 = total.U - u1, total.V - v1
        if (
            u1 - lam * base.U0 <= floor_u
            or u2 - (1.0 - lam) * base.U0 <= floor_u
            or v1 <= floor_v
            or v2 <= floor_v
        ):
            return math.inf
        return -(entropy_uv(m1, u1, v1) + entropy_uv(m2, u2, v2))

    x0 = np.array([0.5 * total.U, 0.5 * total.V])
    result = optimize.minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "xatol": xatol * max(abs(total.U), total.V),
            "fatol": fatol,
            "maxiter": 5000,
            "maxfev": 5000,
        },
    )
    if not result.success or not np.isfinite(result.fun):
        raise OptimizerFailed(str(result.message))
    u1, v1 = float(result.x[0]), float(result.x[1])
    split = (UVState(u1, v1), UVState(total.U - u1, total.V - v1))
    return MaxEntropyResult(split=split, s_max=-float(result.fun),
                            iterations=int(result.nit))


@dataclass
class ConcavityReport:
    checked: int
    violations: list[dict]
    min_slack: float

    @property
    def passed(self) -> bool:
        return not self.violations

    def rows(self) -> list[tuple]:
        return [(self.checked, self.min_slack, len(self.violations))]


def check_concavity(
    base: GasModel,
    pairs: Iterable[tuple[UVState, UVState]],
    lambdas: Sequence[float] = (0.25, 0.5, 0.75),
    slack: float = -1e-10,
    entropy_fn: Callable[[GasModel, float, float], float] | None = None,
) -> ConcavityReport:
    """Midpoint concavity of the entropy in the extensive variables.

    For every pair and mixing weight, the entropy of the mixture must not
    fall below the mixed entropies by more than ``slack``.  A different
    ``entropy_fn`` can be injected, which makes convexified fakes fail.
    """
    fn = entropy_fn if entropy_fn is not None else entropy_uv
    violations = []
    min_slack = math.inf
    checked = 0
    for a, b in pairs:
        sa = fn(base, a.U, a.V)
        sb = fn(base, b.U, b.V)
        for lam in lambdas:
            checked += 1
            mix = fn(base, lam * a.U + (1 - lam) * b.U, lam * a.V + (1 - lam) * b.V)
            gap = mix - (lam * sa + (1 - lam) * sb)
            min_slack = min(min_slack, gap)
            if gap < slack:
                violations.append(
                    {"a": a.as_tuple(), "b": b.as_tuple(), "lambda": lam, "gap": gap}
                )
    return ConcavityReport(checked=checked, violations=violations, min_slack=min_slack)
