"""Cycle-by-cycle execution model.

Packs operation segments into per-cycle workspace budgets, tracks
memory occupancy and workspace borrowing, routes memory with greedy
quickswap layers (swaps between slots whose indices differ by a power
of two), and reports cycle counts, reaction depth and wall time.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from .costs import CostConstants, CostSummary, DEFAULT
from .device import total_error
from .distill import ErrorModel


class InfeasibleError(ValueError):
    """The program needs more memory than the machine can provide even
    after borrowing every workspace module."""


@dataclass(frozen=True)
class MachineConfig:
    n_modules: int
    distance_d: int
    code_cycle: float
    reaction_time: float
    range_r: int = 12
    constants: CostConstants = DEFAULT
    error_model: ErrorModel = field(default_factory=ErrorModel)

    def __post_init__(self):
        if self.n_modules < 2 or self.n_modules % 2:
            raise ValueError("module count must be even and >= 2")
        if self.range_r < 12:
            raise ValueError("the stock subroutine library needs range >= 12")
        if self.distance_d < 2:
            raise ValueError("distance must be >= 2")

    @property
    def memory_slots(self) -> int:
        return self.n_modules // 2

    @property
    def cycle_budget_blocks(self) -> Fraction:
        return Fraction(self.n_modules, 2)


@dataclass(frozen=True)
class Occupant:
    kind: str  # data | magic | stale | bridge | catalyst
    label: str

    def __post_init__(self):
        if self.kind not in ("data", "magic", "stale", "bridge", "catalyst"):
            raise ValueError(f"unknown occupant kind {self.kind!r}")


@dataclass
class MemoryState:
    slots: List[Optional[Occupant]]

    def __post_init__(self):
        labels = [o.label for o in self.slots if o is not None]
        if len(labels) != len(set(labels)):
            raise ValueError("duplicate labels in memory")

    def slot_of(self, label: str) -> int:
        for i, o in enumerate(self.slots):
            if o is not None and o.label == label:
                return i
        raise KeyError(label)

    def apply_swap(self, i: int, j: int):
        self.slots[i], self.slots[j] = self.slots[j], self.slots[i]


def _is_power_of_two(x: int) -> bool:
    return x > 0 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class QuickswapLayer:
    swaps: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for i, j in self.swaps:
            if not _is_power_of_two(abs(i - j)):
                raise ValueError(f"swap ({i},{j}) violates the power-of-two rule")
            for k in (i, j):
                if k in seen:
                    raise ValueError(f"slot {k} appears twice in one layer")
                seen.add(k)


@dataclass(frozen=True)
class PlanResult:
    layers: Tuple[QuickswapLayer, ...]
    converged: bool


def quickswap_plan(
    mem: MemoryState, targets: Dict[str, int], max_layers: Optional[int] = None
) -> PlanResult:
    """Greedy routing of targeted qubits to their destination slots.

    Per layer: slots of already-home targets are locked; each remaining
    targeted qubit takes the legal swap landing closest to its target,
    preferring strictly improving moves, breaking ties toward the lower
    index, and never undoing its own previous layer's swap.
    """
    n = len(mem.slots)
    items = sorted(targets.items())
    for label, slot in items:
        mem.slot_of(label)  # raises if absent
        if not 0 <= slot < n:
            raise ValueError(f"target slot {slot} out of range")
    if len({s for _, s in items}) != len(items):
        raise ValueError("target slots must be distinct")
    if max_layers is None:
        max_layers = 10 * max(1, math.ceil(math.log2(max(n, 2))))

    pos = {label: mem.slot_of(label) for label, _ in items}
    prev = {label: -1 for label, _ in items}
    layers: List[QuickswapLayer] = []
    work = MemoryState(slots=list(mem.slots))

    while any(pos[l] != s for l, s in items):
        if len(layers) >= max_layers:
            return PlanResult(tuple(layers), False)
        eligible = [True] * n
        for label, slot in items:
            if pos[label] == slot:
                eligible[slot] = False
        swaps = []
        for label, j in items:
            cur = pos[label]
            if cur == j or not eligible[cur]:
                continue
            curdist = abs(cur - j)
            best_imp = best_non = -1
            best_imp_d = best_non_d = 0
            p = 1
            while p < n:
                for k in (cur - p, cur + p):
                    if 0 <= k < n and eligible[k]:
                        dkj = abs(k - j)
                        if dkj < curdist:
                            if best_imp < 0 or dkj < best_imp_d or (
                                dkj == best_imp_d and k < best_imp
                            ):
                                best_imp, best_imp_d = k, dkj
                        elif k != prev[label]:
                            if best_non < 0 or dkj < best_non_d or (
                                dkj == best_non_d and k < best_non
                            ):
                                best_non, best_non_d = k, dkj
                p <<= 1
            k = best_imp if best_imp >= 0 else best_non
            if k < 0:
                continue
            displaced = work.slots[k]
            work.apply_swap(cur, k)
            if displaced is not None and displaced.label in pos:
                pos[displaced.label] = cur
            pos[label] = k
            prev[label] = cur
            eligible[cur] = eligible[k] = False
            swaps.append((cur, k))
        if not swaps:
            return PlanResult(tuple(layers), False)
        layers.append(QuickswapLayer(tuple(swaps)))
    return PlanResult(tuple(layers), True)


@njit(cache=True)
def _quickswap_kernel(qubit_in_slot, slot_of_qubit, tq, tslot, max_layers):
    """Layer count of the greedy quickswap routine on dense arrays.

    Returns (layers, status) with status 0 = converged, 1 = layer cap
    hit, 2 = no legal move in a layer.
    """
    n = qubit_in_slot.shape[0]
    m = tq.shape[0]
    prev = np.full(m, -1, np.int64)
    eligible = np.ones(n, np.bool_)
    layers = 0
    while True:
        done = True
        for i in range(m):
            if slot_of_qubit[tq[i]] != tslot[i]:
                done = False
                break
        if done:
            return layers, 0
        if layers >= max_layers:
            return layers, 1
        for k in range(n):
            eligible[k] = True
        for i in range(m):
            if slot_of_qubit[tq[i]] == tslot[i]:
                eligible[tslot[i]] = False
        swaps = 0
        for i in range(m):
            q = tq[i]
            cur = slot_of_qubit[q]
            j = tslot[i]
            if cur == j or not eligible[cur]:
                continue
            curdist = abs(cur - j)
            best_imp = -1
            best_non = -1
            best_imp_d = 0
            best_non_d = 0
            p = 1
            while p < n:
                for k in (cur - p, cur + p):
                    if 0 <= k < n and eligible[k]:
                        dkj = abs(k - j)
                        if dkj < curdist:
                            if best_imp < 0 or dkj < best_imp_d or (
                                dkj == best_imp_d and k < best_imp
                            ):
                                best_imp = k
                                best_imp_d = dkj
                        elif k != prev[i]:
                            if best_non < 0 or dkj < best_non_d or (
                                dkj == best_non_d and k < best_non
                            ):
                                best_non = k
                                best_non_d = dkj
                p <<= 1
            k = best_imp if best_imp >= 0 else best_non
            if k < 0:
                continue
            q2 = qubit_in_slot[k]
            qubit_in_slot[k] = q
            qubit_in_slot[cur] = q2
            slot_of_qubit[q] = k
            if q2 >= 0:
                slot_of_qubit[q2] = cur
            eligible[cur] = False
            eligible[k] = False
            prev[i] = cur
            swaps += 1
        if swaps == 0:
            return layers, 2
        layers += 1


@dataclass(frozen=True)
class QuickswapStats:
    n_q: int
    s: int
    trials: int
    mean: float
    std: float
    max: int
    failures: int
    seed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n_q", "s", "trials", "mean", "std", "max", "failures", "seed"])
        w.writerow(
            [self.n_q, self.s, self.trials, self.mean, self.std, self.max,
             self.failures, self.seed]
        )
        return buf.getvalue()


def quickswap_experiment(n_q: int, s: int, trials: int, seed: int) -> QuickswapStats:
    """Layer statistics for routing random memories.

    Each trial fills n_q slots with a random permutation of n_q qubits
    and assigns a random distinct qubit to every s-th slot as its
    target; the greedy routine runs until all targets are home.
    """
    if n_q < 2 or s < 1 or trials < 1:
        raise ValueError("need n_q >= 2, s >= 1, trials >= 1")
    rng = np.random.default_rng(seed)
    cap = 10 * math.ceil(math.log2(n_q))
    counts = np.empty(trials, np.int64)
    failures = 0
    target_slots = np.arange(0, n_q, s, dtype=np.int64)
    for t in range(trials):
        qubit_in_slot = rng.permutation(n_q).astype(np.int64)
        slot_of_qubit = np.empty(n_q, np.int64)
        slot_of_qubit[qubit_in_slot] = np.arange(n_q, dtype=np.int64)
        tq = rng.choice(n_q, size=target_slots.shape[0], replace=False).astype(np.int64)
        order = np.argsort(tq)
        layers, status = _quickswap_kernel(
            qubit_in_slot, slot_of_qubit, tq[order], target_slots[order], cap
        )
        counts[t] = layers
        if status != 0:
            failures += 1
    return QuickswapStats(
        n_q=n_q,
        s=s,
        trials=trials,
        mean=float(counts.mean()),
        std=float(counts.std()),
        max=int(counts.max()),
        failures=failures,
        seed=seed,
    )


def stall_cycles(plan_layers: int, d: int) -> int:
    """Extra cycles when a rearrangement plan exceeds the d free
    quickswap layers of a logical cycle."""
    if plan_layers <= 0:
        return 0
    return max(0, math.ceil(plan_layers / d) - 1)


# ---------------------------------------------------------------------------
# Packing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScheduleReport:
    logical_cycles: int
    blocks_executed: Fraction  # blocks
    idle_workspace_blocks: Fraction
    bridge_qubits_created: int
    quickswap_layers: Tuple[int, ...]
    stall_cycles: int
    borrowed_workspace: float  # average borrowed fraction of workspace
    reaction_depth: Fraction
    wall_time: float
    total_error: float
    cycle_loads: Tuple[Fraction, ...] = ()
    cycle_budgets: Tuple[Fraction, ...] = ()


def _op_segments(op) -> List[Fraction]:
    """Block volumes of an operation's schedulable segments."""
    if op.cost.segments:
        return [s.volume_blocks for s in op.cost.segments]
    return [op.cost.volume_blocks]


def _pack(program, budget: Fraction):
    """First-fit packing of segments into cycles of the given budget.

    Returns a list of cycles; each cycle is a list of (op, volume)
    placements. Oversize unsegmented segments are split across cycles.
    """
    cycles: List[List] = []
    current: List = []
    load = Fraction(0)

    def close():
        nonlocal current, load
        if current:
            cycles.append(current)
        current, load = [], Fraction(0)

    for op in program.ops:
        for seg in _op_segments(op):
            while seg > budget:
                close()
                cycles.append([(op, budget)])
                seg -= budget
            if seg == 0:
                continue
            if load + seg > budget:
                close()
            current.append((op, seg))
            load += seg
    close()
    return cycles


def reaction_depth(program) -> Fraction:
    """Longest chain of dependent reactive measurements: operations
    sharing a qubit are ordered; disjoint operations run in parallel.

    Repeated programs rerun the same registers, so the per-iteration
    depth chains and scales linearly with the repeat count.
    """
    repeat = getattr(program, "repeat", 1)
    if repeat > 1:
        return repeat * reaction_depth(program.expand_once())
    finish: Dict[str, Fraction] = {}
    best = Fraction(0)
    for op in program.ops:
        start = Fraction(0)
        for q in op.qubits:
            if q in finish and finish[q] > start:
                start = finish[q]
        if not op.qubits:
            start = best  # register-free ops act as a barrier
        end = start + op.cost.reaction_depth
        for q in op.qubits:
            finish[q] = end
        if end > best:
            best = end
    return best


def _occupancy_of(program, cycle) -> int:
    ops = {id(op): op for op, _ in cycle}
    non_data = sum(op.non_data_qubits for op in ops.values())
    return program.memory_requirement + non_data


def memory_pressure(program, cfg: MachineConfig):
    """Per-cycle occupancy and borrowing schedule.

    Occupancy is the data-qubit count plus the non-data qubits of the
    operations active in a cycle. When it exceeds the N/2 memory slots,
    workspace modules are borrowed one-for-one and the cycle's block
    budget shrinks by the same amount.
    """
    half = cfg.memory_slots
    occupancy = []
    budgets = []
    for cycle in _pack(program, cfg.cycle_budget_blocks):
        occ = _occupancy_of(program, cycle)
        borrowed = max(0, occ - half)
        if borrowed >= half:
            raise InfeasibleError(f"occupancy {occ} exceeds total capacity {2 * half}")
        occupancy.append(occ)
        budgets.append(Fraction(half - borrowed))
    return occupancy, budgets


def pack_cycles(
    program,
    cfg: MachineConfig,
    initial_memory: Optional[MemoryState] = None,
    targets_per_cycle: Optional[Sequence[Dict[str, int]]] = None,
) -> ScheduleReport:
    """Greedy first-fit schedule of a program onto the machine.

    Segments are packed in program order into per-cycle budgets of N/2
    blocks (less any borrowed workspace). Bridge qubits are created
    whenever a qubit feeds more than one operation in the same cycle.
    """
    if getattr(program, "repeat", 1) > 1:
        program = program.expand()
    if program.memory_requirement > cfg.n_modules:
        raise InfeasibleError(
            f"{program.memory_requirement} qubits exceed {cfg.n_modules} modules"
        )
    if not program.ops:
        return ScheduleReport(
            logical_cycles=0,
            blocks_executed=Fraction(0),
            idle_workspace_blocks=Fraction(0),
            bridge_qubits_created=0,
            quickswap_layers=(),
            stall_cycles=0,
            borrowed_workspace=0.0,
            reaction_depth=Fraction(0),
            wall_time=0.0,
            total_error=0.0,
        )

    _, budgets = memory_pressure(program, cfg)
    budget = cfg.cycle_budget_blocks
    if budgets and min(budgets) < budget:
        # borrowing engaged: repack at the reduced budget so every cycle fits
        budget = min(budgets)
    cycles = _pack(program, budget)
    budgets = [budget] * len(cycles)

    loads = [sum((seg for _, seg in cyc), Fraction(0)) for cyc in cycles]
    bridges = 0
    for cyc in cycles:
        counts: Dict[str, int] = {}
        for op in {id(op): op for op, _ in cyc}.values():
            for q in op.qubits:
                counts[q] = counts.get(q, 0) + 1
        bridges += sum(c - 1 for c in counts.values() if c > 1)

    n_cycles = len(cycles)
    executed = sum(loads, Fraction(0))
    idle = sum(budgets, Fraction(0)) - executed

    qs_layers: List[int] = []
    total_stalls = 0
    if initial_memory is not None and targets_per_cycle:
        mem = MemoryState(slots=list(initial_memory.slots))
        for targets in targets_per_cycle:
            plan = quickswap_plan(mem, targets)
            for layer in plan.layers:
                for i, j in layer.swaps:
                    mem.apply_swap(i, j)
            qs_layers.append(len(plan.layers))
            total_stalls += stall_cycles(len(plan.layers), cfg.distance_d)
    else:
        qs_layers = [0] * n_cycles

    depth = reaction_depth(program)
    cycles_total = n_cycles + total_stalls
    wall = max(
        cycles_total * cfg.distance_d * cfg.code_cycle,
        float(depth) * cfg.reaction_time,
    )
    p_b = cfg.error_model.p_of_d(cfg.distance_d)
    borrowed_avg = (
        sum(float(cfg.cycle_budget_blocks - b) for b in budgets)
        / (n_cycles * float(cfg.cycle_budget_blocks))
        if n_cycles
        else 0.0
    )
    return ScheduleReport(
        logical_cycles=cycles_total,
        blocks_executed=executed,
        idle_workspace_blocks=idle,
        bridge_qubits_created=bridges,
        quickswap_layers=tuple(qs_layers),
        stall_cycles=total_stalls,
        borrowed_workspace=borrowed_avg,
        reaction_depth=depth,
        wall_time=wall,
        total_error=total_error(p_b, float(executed)),
        cycle_loads=tuple(loads),
        cycle_budgets=tuple(budgets),
    )
