"""Domain types for reel-stock policy analysis.

Everything here is an immutable dataclass: a validated scenario can be
shared freely across concurrent policy evaluations. Widths and lengths
are integer millimetres; masses are kg; areas are square metres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence, Union

LAYER_ROLES = ("top", "fluting", "bottom", "extra")

BOM_SHARE_TOL = 1e-9

# Board mass per unit area used when converting corrugator areas to kg.
# Applied scenario-wide unless the scenario overrides it.
DEFAULT_NOMINAL_GRAMMAGE_GSM = 181.0


class ScenarioValidationError(ValueError):
    """Raised with the complete list of scenario violations, not just the first."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class UnservableInstanceError(RuntimeError):
    """An instance cannot be produced with the given policy / machinery."""

    def __init__(self, message: str, instance_id: Optional[str] = None):
        self.instance_id = instance_id
        super().__init__(message)


@dataclass(frozen=True, slots=True)
class Grade:
    id: str
    name: str = ""
    grammage_gsm: Optional[float] = None
    cost_weight: float = 1.0


@dataclass(frozen=True, slots=True)
class BomEntry:
    grade_id: str
    layer_role: str
    weight_share: float


@dataclass(frozen=True, slots=True)
class Bom:
    id: str
    entries: tuple[BomEntry, ...]


@dataclass(frozen=True, slots=True)
class SheetOrder:
    width_mm: int
    length_mm: int
    quantity: int

    @property
    def area_m2(self) -> float:
        return self.width_mm * self.length_mm * self.quantity / 1e6


@dataclass(frozen=True, slots=True)
class CorrugatorSpec:
    id: str
    plant_id: str
    max_width_mm: int
    knife_count: int = 2
    max_lanes: Optional[int] = None
    min_trim_mm: int = 0


@dataclass(frozen=True, slots=True)
class CorrugatorInstance:
    id: str
    corrugator_id: str
    period_id: str
    bom_id: str
    orders: tuple[SheetOrder, ...]

    @property
    def demand_area_m2(self) -> float:
        return sum(o.area_m2 for o in self.orders)


@dataclass(frozen=True, slots=True)
class PaperMachineSpec:
    id: str
    mill_id: str
    deckle_width_mm: int
    max_reels_per_pattern: Optional[int] = None


@dataclass(frozen=True, slots=True)
class ReelStandard:
    """Fixed reel build: reel mass is proportional to reel width."""

    kg_per_mm_per_reel: float


@dataclass(frozen=True, slots=True)
class Policy:
    """Ordered set of stocked reel widths; the decision variable of the toolkit."""

    widths: tuple[int, ...]

    def __post_init__(self):
        ws = tuple(self.widths)
        if any(w <= 0 for w in ws):
            raise ValueError(f"policy widths must be positive, got {ws}")
        if any(not isinstance(w, int) for w in ws):
            raise ValueError(f"policy widths must be integer mm, got {ws}")
        if list(ws) != sorted(set(ws)):
            raise ValueError(f"policy widths must be strictly increasing, got {ws}")
        object.__setattr__(self, "widths", ws)

    @property
    def cardinality(self) -> int:
        return len(self.widths)

    def __iter__(self):
        return iter(self.widths)

    def __len__(self):
        return len(self.widths)

    @staticmethod
    def of(widths: Sequence[int]) -> "Policy":
        return Policy(tuple(sorted(set(int(w) for w in widths))))


@dataclass(frozen=True, slots=True)
class ExternalDemandItem:
    """Open-market reel demand served directly by the paper machines."""

    grade_id: str
    width_mm: int
    reels: int
    period_id: str
    machines: tuple[str, ...] = ()  # empty = any machine eligible for the grade


@dataclass(frozen=True, slots=True)
class Scenario:
    grades: tuple[Grade, ...]
    boms: tuple[Bom, ...]
    corrugators: tuple[CorrugatorSpec, ...]
    machines: tuple[PaperMachineSpec, ...]
    reel_standard: ReelStandard
    periods: tuple[str, ...]
    corrugator_instances: tuple[CorrugatorInstance, ...]
    external_demand: tuple[ExternalDemandItem, ...] = ()
    external_supply_grades: frozenset[str] = frozenset()
    beta: float = 1.0
    quantity_tolerance_up: float = 0.05
    nominal_grammage_gsm: float = DEFAULT_NOMINAL_GRAMMAGE_GSM
    # grade_id -> machine ids allowed to produce it; missing key = all machines
    grade_machine_eligibility: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def grade_index(self) -> dict[str, Grade]:
        return {g.id: g for g in self.grades}

    def bom_index(self) -> dict[str, Bom]:
        return {b.id: b for b in self.boms}

    def corrugator_index(self) -> dict[str, CorrugatorSpec]:
        return {c.id: c for c in self.corrugators}

    def machine_index(self) -> dict[str, PaperMachineSpec]:
        return {m.id: m for m in self.machines}

    def eligible_machines(self, grade_id: str) -> tuple[PaperMachineSpec, ...]:
        restriction = dict(self.grade_machine_eligibility).get(grade_id)
        if restriction is None:
            return self.machines
        allowed = set(restriction)
        return tuple(m for m in self.machines if m.id in allowed)


def kg_to_reels(mass_kg: float, width_mm: int, standard: ReelStandard) -> int:
    """Convert a demand mass into whole reels of the given width.

    Rounds half-up to the nearest reel but never below one reel for a
    positive mass.
    """
    if width_mm <= 0:
        raise ValueError(f"width must be positive, got {width_mm}")
    if mass_kg < 0:
        raise ValueError(f"mass must be non-negative, got {mass_kg}")
    if mass_kg == 0:
        return 0
    reels = math.floor(mass_kg / (width_mm * standard.kg_per_mm_per_reel) + 0.5)
    return max(1, reels)


def reels_to_kg(reels: int, width_mm: int, standard: ReelStandard) -> float:
    if reels < 0:
        raise ValueError(f"reel count must be non-negative, got {reels}")
    return reels * width_mm * standard.kg_per_mm_per_reel


def _check_positive_int(value, what: str, errors: list[str], minimum: int = 1) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        errors.append(f"{what} must be an integer >= {minimum}, got {value!r}")


def _validate_grades(scenario: Scenario, errors: list[str]) -> None:
    seen = set()
    for g in scenario.grades:
        if g.id in seen:
            errors.append(f"duplicate grade id {g.id!r}")
        seen.add(g.id)
        if g.grammage_gsm is not None and not g.grammage_gsm > 0:
            errors.append(f"grade {g.id!r}: grammage must be > 0, got {g.grammage_gsm}")
        if not g.cost_weight > 0:
            errors.append(f"grade {g.id!r}: cost_weight must be > 0, got {g.cost_weight}")


def _validate_boms(scenario: Scenario, grade_ids: set[str], errors: list[str]) -> None:
    seen = set()
    for bom in scenario.boms:
        if bom.id in seen:
            errors.append(f"duplicate BoM id {bom.id!r}")
        seen.add(bom.id)
        if not bom.entries:
            errors.append(f"BoM {bom.id!r} has no entries")
            continue
        for entry in bom.entries:
            if entry.grade_id not in grade_ids:
                errors.append(f"BoM {bom.id!r} references unknown grade {entry.grade_id!r}")
            if entry.layer_role not in LAYER_ROLES:
                errors.append(
                    f"BoM {bom.id!r}: layer role {entry.layer_role!r} not in {LAYER_ROLES}"
                )
            if not 0 < entry.weight_share <= 1:
                errors.append(
                    f"BoM {bom.id!r}: weight share {entry.weight_share} outside (0, 1]"
                )
        total = sum(e.weight_share for e in bom.entries)
        if abs(total - 1.0) > BOM_SHARE_TOL:
            errors.append(f"BoM {bom.id!r}: shares sum {total:g} != 1")


def _validate_machinery(scenario: Scenario, errors: list[str]) -> None:
    seen = set()
    for c in scenario.corrugators:
        if c.id in seen:
            errors.append(f"duplicate corrugator id {c.id!r}")
        seen.add(c.id)
        if c.max_width_mm <= 0:
            errors.append(f"corrugator {c.id!r}: max_width must be > 0")
        if c.min_trim_mm < 0:
            errors.append(f"corrugator {c.id!r}: min_trim must be >= 0")
        if c.knife_count not in (2, 3):
            errors.append(f"corrugator {c.id!r}: knife_count must be 2 or 3, got {c.knife_count}")
        if c.max_lanes is not None and c.max_lanes < 1:
            errors.append(f"corrugator {c.id!r}: max_lanes must be >= 1 when set")
    seen = set()
    for m in scenario.machines:
        if m.id in seen:
            errors.append(f"duplicate machine id {m.id!r}")
        seen.add(m.id)
        if m.deckle_width_mm <= 0:
            errors.append(f"machine {m.id!r}: deckle width must be > 0")
        if m.max_reels_per_pattern is not None and m.max_reels_per_pattern < 1:
            errors.append(f"machine {m.id!r}: max_reels_per_pattern must be >= 1 when set")


def _validate_instances(scenario: Scenario, errors: list[str]) -> None:
    corrugators = scenario.corrugator_index()
    bom_ids = {b.id for b in scenario.boms}
    periods = set(scenario.periods)
    seen = set()
    for inst in scenario.corrugator_instances:
        if inst.id in seen:
            errors.append(f"duplicate instance id {inst.id!r}")
        seen.add(inst.id)
        if inst.bom_id not in bom_ids:
            errors.append(f"instance {inst.id!r} references unknown BoM {inst.bom_id!r}")
        if inst.period_id not in periods:
            errors.append(f"instance {inst.id!r} references unknown period {inst.period_id!r}")
        spec = corrugators.get(inst.corrugator_id)
        if spec is None:
            errors.append(
                f"instance {inst.id!r} references unknown corrugator {inst.corrugator_id!r}"
            )
        if not inst.orders:
            errors.append(f"instance {inst.id!r} has no orders")
        for k, order in enumerate(inst.orders):
            _check_positive_int(order.width_mm, f"instance {inst.id!r} order {k} width", errors)
            _check_positive_int(order.length_mm, f"instance {inst.id!r} order {k} length", errors)
            _check_positive_int(order.quantity, f"instance {inst.id!r} order {k} quantity", errors)
            if spec is not None and order.width_mm > spec.max_width_mm - spec.min_trim_mm:
                errors.append(
                    f"instance {inst.id!r} order {k}: width {order.width_mm} exceeds "
                    f"corrugator {spec.id!r} usable width "
                    f"{spec.max_width_mm - spec.min_trim_mm}"
                )


def _validate_external(scenario: Scenario, errors: list[str]) -> None:
    grade_ids = {g.id for g in scenario.grades}
    machine_ids = {m.id for m in scenario.machines}
    periods = set(scenario.periods)
    for g in scenario.external_supply_grades:
        if g not in grade_ids:
            errors.append(f"external supply references unknown grade {g!r}")
    for grade_id, machines in scenario.grade_machine_eligibility:
        if grade_id not in grade_ids:
            errors.append(f"machine eligibility references unknown grade {grade_id!r}")
        if not machines:
            errors.append(f"machine eligibility for grade {grade_id!r} is empty")
        for m in machines:
            if m not in machine_ids:
                errors.append(f"machine eligibility for {grade_id!r} references unknown machine {m!r}")
    eligibility = dict(scenario.grade_machine_eligibility)
    for k, item in enumerate(scenario.external_demand):
        if item.grade_id not in grade_ids:
            errors.append(f"external demand {k} references unknown grade {item.grade_id!r}")
        elif item.grade_id in scenario.external_supply_grades:
            errors.append(
                f"external demand {k}: grade {item.grade_id!r} is externally supplied, "
                "not produced on the paper machines"
            )
        if item.period_id not in periods:
            errors.append(f"external demand {k} references unknown period {item.period_id!r}")
        _check_positive_int(item.width_mm, f"external demand {k} width", errors)
        _check_positive_int(item.reels, f"external demand {k} reels", errors)
        allowed = set(eligibility.get(item.grade_id, machine_ids)) & machine_ids
        for m in item.machines:
            if m not in machine_ids:
                errors.append(f"external demand {k} references unknown machine {m!r}")
        if item.machines and allowed and not (set(item.machines) & allowed):
            errors.append(
                f"external demand {k}: machine restriction {sorted(item.machines)} "
                f"is disjoint from grade {item.grade_id!r} eligibility"
            )


def validate_scenario(raw: Union[Scenario, Mapping]) -> Scenario:
    """Check every scenario invariant, raising with the full violation list.

    Accepts either a constructed :class:`Scenario` or a parsed mapping in
    the scenario file layout. Validating an already-valid scenario returns
    the same object.
    """
    if isinstance(raw, Mapping):
        from .scenario_io import scenario_from_dict

        scenario = scenario_from_dict(raw)
    else:
        scenario = raw

    errors: list[str] = []
    if not scenario.beta >= 1.0:
        errors.append(f"beta must be >= 1, got {scenario.beta}")
    if not scenario.quantity_tolerance_up >= 0:
        errors.append(f"quantity tolerance must be >= 0, got {scenario.quantity_tolerance_up}")
    if not scenario.nominal_grammage_gsm > 0:
        errors.append(f"nominal grammage must be > 0, got {scenario.nominal_grammage_gsm}")
    if not scenario.reel_standard.kg_per_mm_per_reel > 0:
        errors.append("reel standard kg/mm/reel must be > 0")
    if not scenario.periods:
        errors.append("scenario has no periods")
    if len(set(scenario.periods)) != len(scenario.periods):
        errors.append("periods contain duplicates")

    grade_ids = {g.id for g in scenario.grades}
    _validate_grades(scenario, errors)
    _validate_boms(scenario, grade_ids, errors)
    _validate_machinery(scenario, errors)
    _validate_instances(scenario, errors)
    _validate_external(scenario, errors)

    if errors:
        raise ScenarioValidationError(errors)
    return scenario


def with_beta(scenario: Scenario, beta: float) -> Scenario:
    """Scenario copy with a different corrugator-waste cost factor."""
    return validate_scenario(replace(scenario, beta=beta))
