"""Device-level performance models.

Covers three machine styles: a baseline (sequential T gate) machine,
a matter-based active-volume machine with a fixed workspace, and a
photonic machine built from resource-state generators (RSGs) with
interleaving delay lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .costs import CostSummary
from .distill import default_p_of_d

FIBER_METERS_PER_BIN = 0.2  # lambda/5 meters of fiber per delay line
FREE_SPACE_METERS_PER_BIN = 0.3

DEFAULT_DECODE_LATENCY = 5e-6  # seconds of classical processing per reaction


@dataclass(frozen=True)
class PhotonicConfig:
    rsg_count: int
    tau_rsg: float
    delay_bins: int  # lambda, in time bins
    distance_d: int
    delay_kind: str = "fiber"

    def __post_init__(self):
        if self.rsg_count < 1:
            raise ValueError("need at least one RSG")
        if self.tau_rsg <= 0:
            raise ValueError("tau_rsg must be positive")
        if self.delay_bins < self.distance_d**2:
            raise ValueError("delay length must be at least d^2 time bins")
        if self.delay_kind not in ("fiber", "free-space"):
            raise ValueError("delay_kind must be 'fiber' or 'free-space'")

    @property
    def delay_meters(self) -> float:
        per_bin = (
            FIBER_METERS_PER_BIN
            if self.delay_kind == "fiber"
            else FREE_SPACE_METERS_PER_BIN
        )
        return self.delay_bins * per_bin


@dataclass(frozen=True)
class DeviceMetrics:
    memory_qubits: int
    speed_blocks_per_sec: float
    per_block_error: float
    reaction_time: float

    def __post_init__(self):
        if self.memory_qubits < 0 or self.speed_blocks_per_sec <= 0:
            raise ValueError("bad device metrics")
        if self.reaction_time <= 0:
            raise ValueError("reaction time must be positive")


def photonic_metrics(
    cfg: PhotonicConfig, p_of_d: Callable[[float], float] = default_p_of_d
) -> DeviceMetrics:
    """Aggregate metrics of an RSG-based interleaving machine.

    Each RSG contributes lambda/(2 d^2) logical memory qubits and
    1/(2 d^3 tau_RSG) blocks per second of speed; memory grows with the
    delay length while speed does not.
    """
    d = cfg.distance_d
    memory = math.floor(cfg.rsg_count * cfg.delay_bins / (2 * d * d))
    speed = cfg.rsg_count / (2 * d**3 * cfg.tau_rsg)
    return DeviceMetrics(
        memory_qubits=memory,
        speed_blocks_per_sec=speed,
        per_block_error=p_of_d(d),
        reaction_time=DEFAULT_DECODE_LATENCY + cfg.delay_bins * cfg.tau_rsg,
    )


def matter_av_metrics(
    workspace_modules: int,
    d: int,
    code_cycle: float,
    memory_qubits: Optional[int] = None,
    reaction_time: Optional[float] = None,
    p_of_d: Callable[[float], float] = default_p_of_d,
) -> DeviceMetrics:
    """Metrics of a matter-based active-volume machine: each workspace
    module completes one block per logical cycle (d code cycles)."""
    if workspace_modules < 1 or d < 2 or code_cycle <= 0:
        raise ValueError("bad machine parameters")
    return DeviceMetrics(
        memory_qubits=workspace_modules if memory_qubits is None else memory_qubits,
        speed_blocks_per_sec=workspace_modules / (d * code_cycle),
        per_block_error=p_of_d(d),
        # fast feed-forward assumed for matter machines: one code cycle
        reaction_time=code_cycle if reaction_time is None else reaction_time,
    )


@dataclass(frozen=True)
class RuntimeEstimate:
    wall_time: float
    limiting_factor: str  # "volume" or "reaction"


def _volume_blocks_and_depth(cost) -> tuple:
    if isinstance(cost, CostSummary):
        return float(cost.volume_blocks), float(cost.reaction_depth)
    # duck-typed ScheduleReport
    return float(cost.blocks_executed), float(cost.reaction_depth)


def av_runtime(cost, metrics: DeviceMetrics) -> RuntimeEstimate:
    """Wall time on an active-volume machine: volume-limited unless the
    reactive dependency chain binds first."""
    vol, depth = _volume_blocks_and_depth(cost)
    t_vol = vol / metrics.speed_blocks_per_sec
    t_react = depth * metrics.reaction_time
    if t_react > t_vol:
        return RuntimeEstimate(t_react, "reaction")
    return RuntimeEstimate(t_vol, "volume")


def baseline_runtime(
    n_q: int,
    n_t: float,
    d: int,
    cycle_time: Optional[float] = None,
    photonic: Optional[PhotonicConfig] = None,
) -> float:
    """Runtime of a baseline machine that executes T gates sequentially.

    Matter-based: each T gate takes d code cycles. Photonic: the run
    consumes twice the circuit volume in resource states (the factor 2
    covers the idle half of the patch layout), produced at M/tau_RSG
    states per second.
    """
    if n_q < 1 or n_t < 0 or d < 2:
        raise ValueError("bad baseline parameters")
    if photonic is not None:
        states = 2.0 * n_q * n_t * d**3
        rate = photonic.rsg_count / photonic.tau_rsg
        return states / rate
    if cycle_time is None:
        raise ValueError("need either cycle_time or a photonic config")
    return n_t * d * cycle_time


def baseline_footprint(n_q: int, d: int) -> int:
    """Physical qubits of the matter baseline: 2 n_q patches of 2 d^2."""
    return 2 * n_q * 2 * d * d


def total_error(p_block: float, n_blocks: float) -> float:
    """Probability that at least one of n blocks fails: 1 - (1-p)^n."""
    if not 0 <= p_block <= 1 or n_blocks < 0:
        raise ValueError("bad error parameters")
    if p_block == 0 or n_blocks == 0:
        return 0.0
    if p_block == 1:
        return 1.0
    return -math.expm1(n_blocks * math.log1p(-p_block))


def resource_state_count(volume_blocks: float, d: int) -> float:
    """Resource states consumed by a computation: each block needs d^3
    states, doubled to cover memory-module upkeep."""
    if volume_blocks < 0 or d < 1:
        raise ValueError("bad parameters")
    return 2.0 * volume_blocks * d**3
