"""Parliament datasets, scenario transforms and exponent sweeps.

A scenario document is YAML::

    schema_version: 1
    parliament:
      name: bundestag-2025
      quota: 316
      parties:
        - {label: CDU/CSU, seats: 208, position: 6.14}
        ...
    scenarios:
      - name: B
        branch: shapley
        cohesion: {type: range}          # or {type: explicit, entries: [...]}
        pariahs: [AfD]
        overrides: {CDU/CSU: 6.0}        # optional position overrides
        sweep: {min: 0.0, max: 3.0, steps: 61}   # or {values: [0, 0.5, 1]}
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Literal, Mapping, Sequence

import jsonschema
import numpy as np
import yaml

from .coalitions import PlayerSet, WeightedMajorityGame, build_weighted_majority
from .cohesion import (
    CohesionStructure,
    IdeologyProfile,
    apply_cordon,
    explicit_cohesion,
    range_cohesion,
)
from .values import BRANCHES, Branch, PowerProfile, cohesion_index

SCHEMA_VERSION = 1
BUILTIN_PREFIX = "builtin:"
BUILTIN_NAMES = (
    "apex-3",
    "bundestag-2025",
    "wende-1980",
    "france-2024-bloc",
    "france-2024-party",
)
DEFAULT_GRID = (0.0, 3.0, 61)


class SchemaError(ValueError):
    """Scenario document does not match the schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


_PARTY = {
    "type": "object",
    "required": ["label", "seats"],
    "additionalProperties": False,
    "properties": {
        "label": {"type": "string", "minLength": 1},
        "seats": {"type": "integer", "minimum": 0},
        "position": {"type": "number"},
    },
}

_ENTRY = {
    "type": "object",
    "required": ["members", "value"],
    "additionalProperties": False,
    "properties": {
        "members": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "value": {"type": "number", "minimum": 0},
    },
}

_SCENARIO = {
    "type": "object",
    "required": ["name"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "branch": {"enum": list(BRANCHES)},
        "cohesion": {
            "type": "object",
            "required": ["type"],
            "additionalProperties": False,
            "properties": {
                "type": {"enum": ["range", "explicit"]},
                "default": {"enum": ["singletons_one", "zero"]},
                "entries": {"type": "array", "items": _ENTRY},
            },
        },
        "pariahs": {"type": "array", "items": {"type": "string"}},
        "overrides": {"type": "object", "additionalProperties": {"type": "number"}},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "min": {"type": "number", "minimum": 0},
                "max": {"type": "number", "minimum": 0},
                "steps": {"type": "integer", "minimum": 1},
                "values": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 1,
                },
            },
        },
        "notes": {"type": "string"},
    },
}

_PARLIAMENT = {
    "type": "object",
    "required": ["name", "quota", "parties"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "quota": {"type": "integer", "exclusiveMinimum": 0},
        "notes": {"type": "string"},
        "parties": {"type": "array", "items": _PARTY, "minItems": 2},
    },
}

DOCUMENT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "parliament", "scenarios"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "parliament": _PARLIAMENT,
        "scenarios": {"type": "array", "items": _SCENARIO, "minItems": 1},
    },
}


def _validate(instance: Any, schema: Mapping, root: str) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = root
        for part in err.absolute_path:
            path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else part)
        raise SchemaError(path, err.message)


@dataclass(frozen=True)
class Party:
    label: str
    seats: int
    position: float | None = None


@dataclass(frozen=True)
class ParliamentSpec:
    name: str
    parties: tuple[Party, ...]
    quota: int
    notes: str = ""

    def __post_init__(self) -> None:
        labels = [p.label for p in self.parties]
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        if dupes:
            raise SchemaError("parliament.parties", f"duplicate labels {dupes}")
        total = sum(p.seats for p in self.parties)
        if self.quota > total:
            raise SchemaError(
                "parliament.quota", f"quota {self.quota} exceeds total seats {total}"
            )

    @property
    def players(self) -> PlayerSet:
        return PlayerSet(tuple(p.label for p in self.parties))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.parties)

    @property
    def total_seats(self) -> int:
        return sum(p.seats for p in self.parties)

    def game(self) -> WeightedMajorityGame:
        return build_weighted_majority(
            self.players, [p.seats for p in self.parties], self.quota
        )


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    branch: Branch = "shapley"
    cohesion: Literal["range", "explicit"] = "range"
    entries: tuple[tuple[tuple[str, ...], float], ...] = ()
    default_rule: Literal["singletons_one", "zero"] = "singletons_one"
    pariahs: tuple[str, ...] = ()
    overrides: tuple[tuple[str, float], ...] = ()
    grid: tuple[float, float, int] | None = DEFAULT_GRID
    grid_values: tuple[float, ...] | None = None

    def exponents(self) -> np.ndarray:
        if self.grid_values is not None:
            return np.asarray(self.grid_values, dtype=float)
        lo, hi, steps = self.grid
        if steps == 1:
            return np.array([float(lo)])
        return np.linspace(lo, hi, steps)

    def with_grid(self, lo: float, hi: float, steps: int) -> ScenarioSpec:
        _check_grid(lo, hi, steps, "sweep")
        return _replace(self, grid=(float(lo), float(hi), int(steps)), grid_values=None)


def _replace(spec: ScenarioSpec, **changes) -> ScenarioSpec:
    return ScenarioSpec(**{**spec.__dict__, **changes})


def _check_grid(lo: float, hi: float, steps: int, path: str) -> None:
    if lo < 0:
        raise SchemaError(f"{path}.min", f"b_min must be >= 0, got {lo}")
    if steps < 1:
        raise SchemaError(f"{path}.steps", f"steps must be >= 1, got {steps}")
    if hi < lo:
        raise SchemaError(f"{path}.max", f"b_max {hi} is below b_min {lo}")


@dataclass(frozen=True)
class Dataset:
    parliament: ParliamentSpec
    scenarios: tuple[ScenarioSpec, ...]
    source: str = ""
    sha256: str = ""

    @property
    def name(self) -> str:
        return self.parliament.name

    def scenario(self, name: str) -> ScenarioSpec:
        for s in self.scenarios:
            if s.name == name:
                return s
        known = ", ".join(s.name for s in self.scenarios)
        raise KeyError(f"dataset {self.name!r} has no scenario {name!r} (known: {known})")


def load_parliament(document: Mapping[str, Any]) -> ParliamentSpec:
    _validate(document, _PARLIAMENT, "parliament")
    parties = tuple(
        Party(p["label"], int(p["seats"]), None if "position" not in p else float(p["position"]))
        for p in document["parties"]
    )
    return ParliamentSpec(
        str(document["name"]), parties, int(document["quota"]), str(document.get("notes", "")).strip()
    )


def load_scenario(
    document: Mapping[str, Any], parliament: ParliamentSpec | None = None, path: str = "scenario"
) -> ScenarioSpec:
    """Validate one scenario; label references are checked against ``parliament``."""
    _validate(document, _SCENARIO, path)
    labels = set(parliament.labels) if parliament is not None else None

    def known(label: str, where: str) -> str:
        if labels is not None and label not in labels:
            raise SchemaError(where, f"unknown party label {label!r}")
        return label

    coh = document.get("cohesion", {"type": "range"})
    entries = []
    if coh["type"] == "explicit":
        for k, e in enumerate(coh.get("entries", [])):
            mem = tuple(known(x, f"{path}.cohesion.entries[{k}].members") for x in e["members"])
            entries.append((mem, float(e["value"])))
    elif "entries" in coh:
        raise SchemaError(f"{path}.cohesion.entries", "entries only apply to explicit cohesion")
    if coh["type"] == "range" and parliament is not None:
        missing = [p.label for p in parliament.parties if p.position is None]
        if missing:
            raise SchemaError(f"{path}.cohesion", f"range cohesion needs positions for {missing}")
    pariahs = tuple(
        known(x, f"{path}.pariahs[{k}]") for k, x in enumerate(document.get("pariahs", []))
    )
    overrides = tuple(
        (known(k, f"{path}.overrides.{k}"), float(v))
        for k, v in document.get("overrides", {}).items()
    )
    sweep = document.get("sweep", {})
    grid_values = None
    if "values" in sweep:
        grid_values = tuple(float(x) for x in sweep["values"])
        grid = None
    else:
        lo, hi, steps = DEFAULT_GRID
        grid = (float(sweep.get("min", lo)), float(sweep.get("max", hi)), int(sweep.get("steps", steps)))
        _check_grid(*grid, f"{path}.sweep")
    return ScenarioSpec(
        name=str(document["name"]),
        branch=document.get("branch", "shapley"),
        cohesion=coh["type"],
        entries=tuple(entries),
        default_rule=coh.get("default", "singletons_one"),
        pariahs=pariahs,
        overrides=overrides,
        grid=grid,
        grid_values=grid_values,
    )


def load_document(document: Mapping[str, Any], source: str = "", sha256: str = "") -> Dataset:
    _validate(document, DOCUMENT_SCHEMA, "")
    parliament = load_parliament(document["parliament"])
    scenarios = tuple(
        load_scenario(s, parliament, f"scenarios[{k}]") for k, s in enumerate(document["scenarios"])
    )
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise SchemaError("scenarios", f"duplicate scenario names {names}")
    return Dataset(parliament, scenarios, source, sha256)


def parse_dataset(text: str | bytes, source: str = "") -> Dataset:
    raw = text.encode("utf-8") if isinstance(text, str) else text
    try:
        document = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise SchemaError("", f"not valid YAML: {exc}") from exc
    return load_document(document, source, hashlib.sha256(raw).hexdigest())


def load_dataset(ref: str | Path) -> Dataset:
    """Load ``builtin:NAME`` or a YAML file path."""
    ref = str(ref)
    if ref.startswith(BUILTIN_PREFIX):
        name = ref[len(BUILTIN_PREFIX):]
        if name not in BUILTIN_NAMES:
            raise SchemaError("", f"unknown builtin dataset {name!r}; known: {', '.join(BUILTIN_NAMES)}")
        raw = resources.files("cohesion_power.data").joinpath(f"{name}.yaml").read_bytes()
        return parse_dataset(raw, ref)
    return parse_dataset(Path(ref).read_bytes(), ref)


def builtin_datasets() -> list[Dataset]:
    return [load_dataset(BUILTIN_PREFIX + name) for name in BUILTIN_NAMES]


# ---------------------------------------------------------------------------
# running scenarios
# ---------------------------------------------------------------------------


def scenario_cohesion(parliament: ParliamentSpec, scenario: ScenarioSpec) -> CohesionStructure:
    players = parliament.players
    if scenario.cohesion == "range":
        positions = [p.position for p in parliament.parties]
        if any(x is None for x in positions):
            raise SchemaError("parliament.parties", "range cohesion needs every party position")
        profile = IdeologyProfile(players, tuple(positions)).with_overrides(dict(scenario.overrides))
        kappa = range_cohesion(profile)
    else:
        entries = {players.mask_of(mem): value for mem, value in scenario.entries}
        kappa = explicit_cohesion(players, entries, scenario.default_rule)
    return apply_cordon(kappa, [players.index(x) for x in scenario.pariahs])


def run_scenario(
    parliament: ParliamentSpec,
    scenario: ScenarioSpec,
    b: float,
    branch: Branch | None = None,
) -> PowerProfile:
    """Normalized cohesion index of one scenario at exponent ``b``."""
    return cohesion_index(
        parliament.game(), scenario_cohesion(parliament, scenario), branch or scenario.branch, b
    )


@dataclass(frozen=True)
class SweepResult:
    scenario: str
    dataset: str
    dataset_hash: str
    branch: Branch
    rows: tuple[tuple[float, str, float], ...]
    profiles: tuple[PowerProfile, ...] = field(default=(), repr=False)

    def exponents(self) -> np.ndarray:
        return np.array([p.b for p in self.profiles])

    def series(self, label: str) -> np.ndarray:
        return np.array([p[label] for p in self.profiles])


def sweep_exponent(
    parliament: ParliamentSpec,
    scenario: ScenarioSpec,
    branch: Branch | None = None,
    dataset_hash: str = "",
) -> SweepResult:
    game = parliament.game()
    kappa = scenario_cohesion(parliament, scenario)
    branch = branch or scenario.branch
    profiles = tuple(cohesion_index(game, kappa, branch, float(b)) for b in scenario.exponents())
    rows = tuple(
        (p.b, label, value) for p in profiles for label, value in zip(p.players.labels, p.values)
    )
    return SweepResult(scenario.name, parliament.name, dataset_hash, branch, rows, profiles)


def sweep_dataset(dataset: Dataset, scenario: str, branch: Branch | None = None) -> SweepResult:
    return sweep_exponent(dataset.parliament, dataset.scenario(scenario), branch, dataset.sha256)


def parse_grid(values: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(x) for x in values)
