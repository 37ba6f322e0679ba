"""Shared builders for the test suite."""

from __future__ import annotations

import itertools

from fabflock.engine import Workcenter
from fabflock.model import Batch, Lot, Machine, MachineKind, MachineType, MultiQueue
from fabflock.scenario import LotSpec, Scenario

_ids = itertools.count()


def lot(lot_type: int) -> Lot:
    return Lot(id=next(_ids), lot_type=lot_type)


def make_single_wc(n_machines: int, rpt: int = 2, type_id: int = 0) -> Workcenter:
    mt = MachineType(type_id, MachineKind.SINGLE_STEP, raw_process_ticks=rpt,
                     machine_count=n_machines)
    machines = [Machine(mt, i) for i in range(n_machines)]
    queues = [MultiQueue(owner=m) for m in machines]
    return Workcenter(mt, machines, queues)


def make_batch_wc(n_machines: int, bs: int = 4, wt: int = 3, rpt: int = 15,
                  type_id: int = 0) -> Workcenter:
    mt = MachineType(type_id, MachineKind.BATCH, raw_process_ticks=rpt,
                     batch_size=bs, wt_ticks=wt, machine_count=n_machines)
    machines = [Machine(mt, i) for i in range(n_machines)]
    queues = [MultiQueue(owner=m) for m in machines]
    return Workcenter(mt, machines, queues)


def fill_queue(wc: Workcenter, i: int, lot_types) -> list[Lot]:
    """Append one lot per type to machine i's queue; returns them in order."""
    lots = [lot(t) for t in lot_types]
    for item in lots:
        wc.queues[i].add_lot(item)
    return lots


def set_processing(wc: Workcenter, i: int, lot_type: int) -> Lot:
    """Put machine i mid-process on a lot of the given type."""
    item = lot(lot_type)
    wc.machines[i].current_batch = [item]
    wc.machines[i].busy_remaining = 1
    return item


def add_batch(wc: Workcenter, i: int, lot_type: int, size: int) -> Batch:
    batch = Batch(lot_type, [lot(lot_type) for _ in range(size)])
    wc.queues[i].batches.append(batch)
    return batch


def scenario_of(machine_types, lot_specs, name: str = "test",
                tick_hours: float = 0.1) -> Scenario:
    return Scenario(name, tick_hours, tuple(machine_types), tuple(lot_specs))


def single_type(type_id: int = 0, rpt: int = 2, count: int = 1) -> MachineType:
    return MachineType(type_id, MachineKind.SINGLE_STEP, raw_process_ticks=rpt,
                       machine_count=count)


def batch_type(type_id: int = 0, rpt: int = 3, bs: int = 2, wt: int = 3,
               count: int = 1) -> MachineType:
    return MachineType(type_id, MachineKind.BATCH, raw_process_ticks=rpt,
                       batch_size=bs, wt_ticks=wt, machine_count=count)


def lots_spec(type_id: int, count: int, recipe) -> LotSpec:
    return LotSpec(type_id, count, tuple(recipe))
