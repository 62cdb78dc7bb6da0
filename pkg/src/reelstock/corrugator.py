"""Corrugator cutting-stock: semi-continuous trim minimisation for one instance.

A pattern combines lanes of sheet orders across a stocked reel width; a
double-knife machine admits at most two distinct sheet lengths per
pattern (three for triple-knife). Run lengths are continuous, so
fractional sheet counts are allowed and overproduction is counted as
waste alongside side trim.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import lp
from .model import (
    DEFAULT_NOMINAL_GRAMMAGE_GSM,
    CorrugatorInstance,
    CorrugatorSpec,
    Policy,
    UnservableInstanceError,
)

_RUN_EPS_M = 1e-9


@dataclass(frozen=True)
class CorrugatorPattern:
    reel_width_mm: int
    lanes: tuple[int, ...]  # lane count per order position in the instance

    def used_width_mm(self, order_widths: tuple[int, ...]) -> int:
        return sum(a * w for a, w in zip(self.lanes, order_widths))


@dataclass(frozen=True)
class CorrugatorRun:
    pattern: CorrugatorPattern
    run_length_m: float


@dataclass
class CorrugatorSolution:
    instance_id: str
    runs: tuple[CorrugatorRun, ...]
    waste_area_m2: float
    waste_mass_kg: float
    waste_fraction: float
    consumption: dict[int, tuple[float, float]]  # width -> (area m2, mass kg)
    produced_sheets: tuple[float, ...]
    demand_area_m2: float
    waste_by_width_kg: dict[int, float]

    @property
    def consumed_area_m2(self) -> float:
        return self.demand_area_m2 + self.waste_area_m2

    @property
    def consumed_mass_kg(self) -> float:
        return sum(mass for _, mass in self.consumption.values())


@lru_cache(maxsize=131072)
def _patterns_for_width(
    order_dims: tuple[tuple[int, int], ...],
    usable_mm: int,
    knife_count: int,
    max_lanes: int | None,
) -> tuple[tuple[int, ...], ...]:
    """All maximal lane-count vectors that fit in `usable_mm`.

    Maximal means no further lane of any order already in the pattern
    fits (width- or lane-limit-wise). Lane vectors may span at most
    `knife_count` distinct sheet lengths.
    """
    n = len(order_dims)
    found: list[tuple[int, ...]] = []
    counts = [0] * n

    def is_maximal(width_left: int, total_lanes: int) -> bool:
        for i in range(n):
            if counts[i] == 0:
                continue
            if order_dims[i][0] <= width_left and (
                max_lanes is None or total_lanes + 1 <= max_lanes
            ):
                return False
        return True

    def extend(i: int, width_left: int, lengths: frozenset[int], total_lanes: int) -> None:
        if i == n:
            if total_lanes > 0 and is_maximal(width_left, total_lanes):
                found.append(tuple(counts))
            return
        width, length = order_dims[i]
        max_count = width_left // width
        if max_lanes is not None:
            max_count = min(max_count, max_lanes - total_lanes)
        if length not in lengths and len(lengths) >= knife_count:
            max_count = 0
        extend(i + 1, width_left, lengths, total_lanes)
        new_lengths = lengths | {length}
        for count in range(1, max_count + 1):
            counts[i] = count
            extend(i + 1, width_left - count * width, new_lengths, total_lanes + count)
        counts[i] = 0

    extend(0, usable_mm, frozenset(), 0)
    found.sort()
    return tuple(found)


def usable_widths(policy: Policy, spec: CorrugatorSpec) -> tuple[int, ...]:
    """Policy widths this corrugator can load (at most its working width)."""
    return tuple(w for w in policy.widths if w <= spec.max_width_mm)


def enumerate_corrugator_patterns(
    instance: CorrugatorInstance, policy: Policy, spec: CorrugatorSpec
) -> list[CorrugatorPattern]:
    order_dims = tuple((o.width_mm, o.length_mm) for o in instance.orders)
    narrowest = min(w for w, _ in order_dims)
    widths = usable_widths(policy, spec)
    if not any(narrowest <= w - spec.min_trim_mm for w in widths):
        raise UnservableInstanceError(
            f"instance {instance.id}: no stocked width can hold any order",
            instance_id=instance.id,
        )
    patterns: list[CorrugatorPattern] = []
    for reel_width in widths:
        usable = reel_width - spec.min_trim_mm
        if usable < narrowest:
            continue
        for lanes in _patterns_for_width(order_dims, usable, spec.knife_count, spec.max_lanes):
            patterns.append(CorrugatorPattern(reel_width, lanes))
    return patterns


def solve_corrugator(
    instance: CorrugatorInstance,
    policy: Policy,
    spec: CorrugatorSpec,
    grammage_gsm: float = DEFAULT_NOMINAL_GRAMMAGE_GSM,
) -> CorrugatorSolution:
    """Minimum-waste run lengths over the enumerated patterns.

    The continuous program minimises total consumed reel area subject to
    covering every order's sheet quantity; waste is that consumption
    minus the net demand area.
    """
    orders = instance.orders
    patterns = enumerate_corrugator_patterns(instance, policy, spec)
    for i, order in enumerate(orders):
        if not any(p.lanes[i] > 0 for p in patterns):
            raise UnservableInstanceError(
                f"instance {instance.id}: order {i} (width {order.width_mm}) "
                "fits no stocked width",
                instance_id=instance.id,
            )
    # Wider reels first so ties in the pricing step lean on the widest reel.
    patterns.sort(key=lambda p: (-p.reel_width_mm, p.lanes))

    # Run lengths in metres; cover each order's total sheet metres.
    costs = [p.reel_width_mm / 1000.0 for p in patterns]  # m2 per metre run
    columns = [[p.lanes[i] for p in patterns] for i in range(len(orders))]
    demand_m = [o.quantity * o.length_mm / 1000.0 for o in orders]
    result = lp.solve_covering_lp(costs, columns, demand_m)
    if not result.is_optimal:
        raise UnservableInstanceError(
            f"instance {instance.id}: run-length program ended with status {result.status}",
            instance_id=instance.id,
        )

    lengths = result.x
    # Nudge run lengths up so demand cover holds exactly despite float error.
    produced = [
        sum(p.lanes[i] * lengths[k] for k, p in enumerate(patterns))
        for i in range(len(orders))
    ]
    bump = max(
        (d / prod for d, prod in zip(demand_m, produced) if prod > 0 and d > prod),
        default=1.0,
    )
    if bump > 1.0:
        lengths = lengths * bump

    runs = tuple(
        CorrugatorRun(patterns[k], float(lengths[k]))
        for k in range(len(patterns))
        if lengths[k] > _RUN_EPS_M
    )
    return _build_solution(instance, runs, grammage_gsm)


def _build_solution(
    instance: CorrugatorInstance, runs: tuple[CorrugatorRun, ...], grammage_gsm: float
) -> CorrugatorSolution:
    orders = instance.orders
    order_widths = tuple(o.width_mm for o in orders)
    grammage = grammage_gsm / 1000.0  # kg per m2

    produced_len_m = [0.0] * len(orders)  # strip metres per order
    for run in runs:
        for i, lanes in enumerate(run.pattern.lanes):
            if lanes:
                produced_len_m[i] += lanes * run.run_length_m
    produced_sheets = tuple(
        produced_len_m[i] * 1000.0 / o.length_mm for i, o in enumerate(orders)
    )
    overrun_len_m = [
        max(0.0, produced_len_m[i] - o.quantity * o.length_mm / 1000.0)
        for i, o in enumerate(orders)
    ]

    consumption: dict[int, tuple[float, float]] = {}
    waste_by_width: dict[int, float] = {}
    for run in runs:
        width = run.pattern.reel_width_mm
        area = width * run.run_length_m / 1000.0
        trim_area = (width - run.pattern.used_width_mm(order_widths)) * run.run_length_m / 1000.0
        overrun_area = 0.0
        for i, lanes in enumerate(run.pattern.lanes):
            if lanes and overrun_len_m[i] > 0.0:
                share = lanes * run.run_length_m / produced_len_m[i]
                overrun_area += overrun_len_m[i] * share * order_widths[i] / 1000.0
        prev_area, prev_mass = consumption.get(width, (0.0, 0.0))
        consumption[width] = (prev_area + area, prev_mass + area * grammage)
        waste_by_width[width] = waste_by_width.get(width, 0.0) + (
            (trim_area + overrun_area) * grammage
        )

    demand_area = instance.demand_area_m2
    consumed_area = sum(area for area, _ in consumption.values())
    waste_area = consumed_area - demand_area
    return CorrugatorSolution(
        instance_id=instance.id,
        runs=runs,
        waste_area_m2=waste_area,
        waste_mass_kg=waste_area * grammage,
        waste_fraction=waste_area / consumed_area if consumed_area > 0 else 0.0,
        consumption=consumption,
        produced_sheets=produced_sheets,
        demand_area_m2=demand_area,
        waste_by_width_kg=waste_by_width,
    )


def corrugator_waste_by_width(solution: CorrugatorSolution) -> dict[int, float]:
    """Trim plus overrun mass attributed to each stocked width used."""
    return dict(solution.waste_by_width_kg)
