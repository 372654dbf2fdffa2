"""Tolerance tiers used across the engine.

The environment variable THERMOKERNEL_TOL overrides the defaults.  It accepts
either a single float, applied as a multiplier to every tier, or a
comma-separated list of ``name=value`` pairs naming individual tiers, e.g.
``THERMOKERNEL_TOL="quad_tol=1e-12,state_atol=1e-13"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    state_atol: float = 1e-12          # payload equality for concatenation/cyclicity
    work_atol: float = 1e-12           # zero-work tests (catalytic, identity)
    first_law_rtol: float = 1e-9       # path-independence of total work
    first_law_atol: float = 1e-12
    quad_tol: float = 1e-10            # adaptive quadrature target, absolute
    quad_max_depth: int = 30
    tangent_det_min: float = 1e-8      # normalized 2x2 determinant threshold
    same_temperature: float = 1e-6     # |tau - 1| bound for thermal equilibrium
    isotherm_rtol: float = 1e-9        # "gas sits on the reservoir isotherm" check
    numeric_floor: float = 1e-12       # open-quadrant floor for p and V


def _from_env(raw: str | None) -> Tolerances:
    base = Tolerances()
    if not raw:
        return base
    raw = raw.strip()
    names = {f.name: f.type for f in fields(Tolerances)}
    if "=" in raw:
        updates = {}
        for piece in raw.split(","):
            name, _, value = piece.partition("=")
            name = name.strip()
            if name not in names:
                raise ValueError(f"unknown tolerance tier {name!r} in THERMOKERNEL_TOL")
            updates[name] = int(value) if name == "quad_max_depth" else float(value)
        return replace(base, **updates)
    factor = float(raw)
    scaled = {
        f.name: f.default * factor
        for f in fields(Tolerances)
        if f.name != "quad_max_depth"
    }
    return replace(base, **scaled)


TOL = _from_env(os.environ.get("THERMOKERNEL_TOL"))


def tolerances() -> Tolerances:
    return TOL
