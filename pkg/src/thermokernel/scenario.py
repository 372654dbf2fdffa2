"""Declarative scenario runner: JSON in, CSV/JSON reports out.

A scenario declares a world (atoms with their model parameters) and an
ordered script of commands over those atoms.  Commands may embed assertions
(``expect`` blocks) and request artifacts (``save``).  Numeric CSV output is
fixed at nine significant digits and, together with the seeded suites, is
byte-identical across runs of the same scenario and seed.

Exit codes: 0 all assertions pass, 1 an assertion failed, 2 parse error,
3 validation error.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

from .carnot import build_carnot
from .energy import EnergyLedger, internal_energy
from .entropy import EntropyLedger, entropy
from .errors import (
    ParseError,
    ScenarioAssertionFailed,
    ValidationError,
)
from .gas import GasAtom, GasModel, GasState, add_ideal_gas, gas_T, run_segments, type1, type2
from .processes import AtomState, joint, work_of
from .reservoirs import Reservoir, add_reservoir
from .scaling import UVState, check_concavity, max_entropy_split
from .suites import SUITES
from .systems import World

SCENARIO_VERSION = 1

KNOWN_OPS = (
    "carnot",
    "connect",
    "segments",
    "entropy-table",
    "polyline",
    "verify",
    "max-entropy-report",
    "concavity-report",
)


def fmt(x: float) -> str:
    """Nine significant digits, the fixed numeric CSV format."""
    return f"{x:.9g}"


@dataclass
class Scenario:
    version: int
    seed: int
    atoms: list[dict]
    script: list[dict]

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"scenario is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ValidationError("scenario top level must be an object")
        if raw.get("version") != SCENARIO_VERSION:
            raise ValidationError(
                f"unsupported scenario version {raw.get('version')!r}"
            )
        atoms = raw.get("atoms", [])
        script = raw.get("script", [])
        if not isinstance(atoms, list) or not isinstance(script, list):
            raise ValidationError("'atoms' and 'script' must be arrays")
        return cls(
            version=SCENARIO_VERSION,
            seed=int(raw.get("seed", 42)),
            atoms=atoms,
            script=script,
        )

    def validate(self) -> None:
        names = set()
        for spec in self.atoms:
            name = spec.get("name")
            if not isinstance(name, str) or not name:
                raise ValidationError(f"atom is missing a name: {spec!r}")
            if name in names:
                raise ValidationError(f"duplicate atom name {name!r}")
            if spec.get("kind") not in ("gas", "reservoir"):
                raise ValidationError(f"unknown atom kind in {spec!r}")
            names.add(name)
        for cmd in self.script:
            op = cmd.get("op")
            if op not in KNOWN_OPS:
                raise ValidationError(f"unknown op {op!r}")
            for key in ("gas", "hot", "cold"):
                ref = cmd.get(key)
                if ref is not None and ref not in names:
                    raise ValidationError(f"op {op!r} references unknown atom {ref!r}")
            if op == "verify" and cmd.get("suite") not in SUITES:
                raise ValidationError(f"unknown verify suite {cmd.get('suite')!r}")


@dataclass
class ScenarioResult:
    exit_code: int
    messages: list[str] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)


def _gas_state(values) -> GasState:
    return GasState(float(values[0]), float(values[1]))


def _build_atoms(world: World, specs: list[dict]) -> dict[str, Any]:
    handles: dict[str, Any] = {}
    for spec in specs:
        if spec["kind"] == "gas":
            model = GasModel(
                n=float(spec.get("n", 1.0)),
                R=float(spec.get("R", 1.0)),
                gamma=float(spec.get("gamma", 5.0 / 3.0)),
                sigma0=_gas_state(spec.get("sigma0", (1.0, 1.0))),
                U0=float(spec.get("U0", 0.0)),
                S0=float(spec.get("S0", 0.0)),
            )
            handles[spec["name"]] = add_ideal_gas(world, model)
        else:
            handles[spec["name"]] = add_reservoir(
                world, float(spec["theta"]), float(spec.get("energy", 0.0))
            )
    return handles


def _expect(cmd: dict, label: str, got: float, key: str) -> None:
    exp = cmd.get("expect", {})
    if key not in exp:
        return
    want = float(exp[key])
    tol = float(exp.get("tol", 1e-9))
    if abs(got - want) > tol:
        raise ScenarioAssertionFailed(
            f"{label}: expected {key}={fmt(want)} +/- {tol}, got {fmt(got)}"
        )


def _write(out_dir: str, name: str, text: str, artifacts: list[str]) -> None:
    path = os.path.join(out_dir, name)
    os.makedirs(os.path.dirname(path) or out_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    artifacts.append(path)


class _Runner:
    def __init__(self, scenario: Scenario, out_dir: str, seed: int | None):
        self.scenario = scenario
        self.out_dir = out_dir
        self.seed = scenario.seed if seed is None else seed
        self.world = World()
        self.handles = _build_atoms(self.world, scenario.atoms)
        self.artifacts: list[str] = []
        self.messages: list[str] = []

    def gas(self, name: str) -> GasAtom:
        handle = self.handles[name]
        if not isinstance(handle, GasAtom):
            raise ValidationError(f"{name!r} is not a gas atom")
        return handle

    def reservoir(self, name: str) -> Reservoir:
        handle = self.handles[name]
        if not isinstance(handle, Reservoir):
            raise ValidationError(f"{name!r} is not a reservoir")
        return handle

    # --- ops ---

    def op_carnot(self, cmd: dict) -> None:
        run = build_carnot(
            self.reservoir(cmd["hot"]),
            self.reservoir(cmd["cold"]),
            q_target=float(cmd.get("q_hot", -1.0)),
            volume_ratio=float(cmd.get("volume_ratio", 2.0)),
        )
        ratio = -run.q1 / run.q2 if run.q2 else math.nan
        self.messages.append(
            f"carnot {cmd['hot']}/{cmd['cold']}: q1={fmt(run.q1)} q2={fmt(run.q2)} "
            f"w={fmt(run.w)} ratio={fmt(ratio)}"
        )
        _expect(cmd, "carnot", ratio, "ratio")
        _expect(cmd, "carnot", run.w, "w")
        if "save" in cmd:
            _write(
                self.out_dir,
                cmd["save"],
                json.dumps(run.to_json(), indent=2, sort_keys=True) + "\n",
                self.artifacts,
            )

    def op_connect(self, cmd: dict) -> None:
        from .gas import connect

        gas = self.gas(cmd["gas"])
        s1, s2 = _gas_state(cmd["from"]), _gas_state(cmd["to"])
        p = connect(gas, s1, s2)
        w = work_of(gas.system, p)
        forward = p.initial_of(gas.atom).value == s1
        delta_u = w if forward else -w
        self.messages.append(
            f"connect {cmd['gas']}: dU={fmt(delta_u)} ({'forward' if forward else 'reversed'})"
        )
        _expect(cmd, "connect", delta_u, "delta_u")
        if "save" in cmd:
            _write(
                self.out_dir,
                cmd["save"],
                json.dumps(p.to_json(), indent=2, sort_keys=True) + "\n",
                self.artifacts,
            )

    def op_segments(self, cmd: dict) -> None:
        gas = self.gas(cmd["gas"])
        p = run_segments(gas, _gas_state(cmd["from"]), cmd.get("segments", []))
        w = work_of(gas.system, p)
        self.messages.append(f"segments {cmd['gas']}: W={fmt(w)}")
        _expect(cmd, "segments", w, "w")
        if "save" in cmd:
            _write(
                self.out_dir,
                cmd["save"],
                json.dumps(p.to_json(), indent=2, sort_keys=True) + "\n",
                self.artifacts,
            )

    def op_entropy_table(self, cmd: dict) -> None:
        gas = self.gas(cmd["gas"])
        p_lo, p_hi, p_n = cmd.get("p", (0.5, 2.0, 5))
        v_lo, v_hi, v_n = cmd.get("V", (0.5, 2.0, 5))
        uledger = EnergyLedger.for_world(self.world)
        sledger = EntropyLedger.for_world(self.world)
        rows = ["p,V,U,S,T_gas"]
        for i in range(int(p_n)):
            p = p_lo * (p_hi / p_lo) ** (i / max(1, int(p_n) - 1))
            for j in range(int(v_n)):
                v = v_lo * (v_hi / v_lo) ** (j / max(1, int(v_n) - 1))
                s = GasState(p, v)
                sigma = joint(AtomState(gas.atom, s))
                rows.append(
                    ",".join(
                        fmt(x)
                        for x in (
                            p,
                            v,
                            internal_energy(uledger, gas.system, sigma),
                            entropy(sledger, gas.system, sigma),
                            gas_T(gas.model, s),
                        )
                    )
                )
        _write(self.out_dir, cmd["save"], "\n".join(rows) + "\n", self.artifacts)
        self.messages.append(f"entropy-table {cmd['gas']}: {len(rows) - 1} rows")

    def op_polyline(self, cmd: dict) -> None:
        gas = self.gas(cmd["gas"])
        seg = cmd["segment"]
        start = _gas_state(seg["from"])
        if seg["type"] == "type1":
            fam = type1(gas, start, float(seg["p2"]))
        elif seg["type"] == "type2":
            fam = type2(gas, start, float(seg["V2"]))
        else:
            raise ValidationError(f"polyline supports type1/type2, got {seg['type']!r}")
        n = int(cmd.get("samples", 33))
        rows = ["lambda,p,V,W_cum,Q_cum"]
        for i in range(n + 1):
            lam = i / n
            state = fam.curve(lam)[gas.atom]
            w = fam.work_between(gas.atom, 0.0, lam)
            q = fam.heat_between(gas.atom, 0.0, lam)
            rows.append(",".join(fmt(x) for x in (lam, state.p, state.V, w, q)))
        _write(self.out_dir, cmd["save"], "\n".join(rows) + "\n", self.artifacts)
        self.messages.append(f"polyline {cmd['gas']}: {n + 1} samples")

    def op_verify(self, cmd: dict) -> None:
        sizes = {k: int(v) for k, v in cmd.items()
                 if k not in ("op", "suite", "save", "expect")}
        report = SUITES[cmd["suite"]](seed=self.seed, **sizes)
        self.messages.extend(report.lines())
        if "save" in cmd:
            _write(
                self.out_dir,
                cmd["save"],
                json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n",
                self.artifacts,
            )
        if not report.passed:
            raise ScenarioAssertionFailed(f"suite {cmd['suite']} failed")

    def op_max_entropy_report(self, cmd: dict) -> None:
        import random

        rng = random.Random(self.seed)
        base = GasModel()
        rows = ["lambda,U,V,U1,V1,S_max,S_unconstrained"]
        for _ in range(int(cmd.get("draws", 20))):
            lam = rng.uniform(0.1, 0.9)
            total = UVState(rng.uniform(1.0, 5.0), rng.uniform(1.0, 5.0))
            res = max_entropy_split(base, lam, total)
            from .scaling import entropy_uv

            rows.append(
                ",".join(
                    fmt(x)
                    for x in (
                        lam,
                        total.U,
                        total.V,
                        res.split[0].U,
                        res.split[0].V,
                        res.s_max,
                        entropy_uv(base, total.U, total.V),
                    )
                )
            )
        _write(self.out_dir, cmd["save"], "\n".join(rows) + "\n", self.artifacts)
        self.messages.append(f"max-entropy-report: {len(rows) - 1} rows")

    def op_concavity_report(self, cmd: dict) -> None:
        import random

        rng = random.Random(self.seed)
        base = GasModel()
        pairs = [
            (
                UVState(rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0)),
                UVState(rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0)),
            )
            for _ in range(int(cmd.get("samples", 200)))
        ]
        rep = check_concavity(base, pairs)
        rows = ["checked,min_slack,violations"]
        rows.append(",".join(fmt(x) for x in (rep.checked, rep.min_slack, len(rep.violations))))
        _write(self.out_dir, cmd["save"], "\n".join(rows) + "\n", self.artifacts)
        self.messages.append(
            f"concavity-report: checked={rep.checked} violations={len(rep.violations)}"
        )
        if not rep.passed:
            raise ScenarioAssertionFailed("concavity violated")

    def dispatch(self, cmd: dict) -> None:
        ops: dict[str, Callable[[dict], None]] = {
            "carnot": self.op_carnot,
            "connect": self.op_connect,
            "segments": self.op_segments,
            "entropy-table": self.op_entropy_table,
            "polyline": self.op_polyline,
            "verify": self.op_verify,
            "max-entropy-report": self.op_max_entropy_report,
            "concavity-report": self.op_concavity_report,
        }
        ops[cmd["op"]](cmd)


def _atom_refs(cmd: dict) -> frozenset[str]:
    return frozenset(
        v for k, v in cmd.items() if k in ("gas", "hot", "cold") and isinstance(v, str)
    )


def _parallel_batches(script: list[dict]) -> list[list[dict]]:
    """Greedy batching: commands sharing no referenced atoms may run together."""
    batches: list[list[dict]] = []
    current: list[dict] = []
    used: set[str] = set()
    for cmd in script:
        refs = _atom_refs(cmd)
        if current and (refs & used or not refs):
            batches.append(current)
            current, used = [], set()
        current.append(cmd)
        used |= refs
    if current:
        batches.append(current)
    return batches


def run_scenario(
    path: str,
    out_dir: str | None = None,
    seed: int | None = None,
    parallel: bool = False,
) -> ScenarioResult:
    """Load, validate and execute a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return ScenarioResult(exit_code=2, messages=[f"cannot read {path}: {exc}"])
    try:
        scenario = Scenario.parse(text)
        scenario.validate()
    except ParseError as exc:
        return ScenarioResult(exit_code=2, messages=[str(exc)])
    except ValidationError as exc:
        return ScenarioResult(exit_code=3, messages=[str(exc)])
    out_dir = out_dir or os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(out_dir, exist_ok=True)
    runner = _Runner(scenario, out_dir, seed)
    try:
        if parallel:
            for batch in _parallel_batches(scenario.script):
                if len(batch) == 1:
                    runner.dispatch(batch[0])
                else:
                    with ThreadPoolExecutor(max_workers=len(batch)) as pool:
                        list(pool.map(runner.dispatch, batch))
        else:
            for cmd in scenario.script:
                runner.dispatch(cmd)
    except ScenarioAssertionFailed as exc:
        runner.messages.append(f"ASSERTION FAILED: {exc}")
        return ScenarioResult(1, runner.messages, runner.artifacts)
    except ValidationError as exc:
        runner.messages.append(str(exc))
        return ScenarioResult(3, runner.messages, runner.artifacts)
    return ScenarioResult(0, runner.messages, runner.artifacts)
