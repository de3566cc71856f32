"""Cost and output-error estimates for magic-state distillation.

The error expressions are rough closed-form estimates, not simulated
rates: each combines the failure probability of the checked input
states with the logical error of the workspace blocks that run the
protocol.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Tuple

from .costs import blocks


def default_p_of_d(d: float) -> float:
    """Per-block logical error rate of a spacetime block at distance d."""
    return 10.0 ** (-d / 2)


@dataclass(frozen=True)
class ErrorModel:
    p_in: float = 1e-3
    p_of_d: Callable[[float], float] = default_p_of_d

    def __post_init__(self):
        if not 0 <= self.p_in <= 1:
            raise ValueError("p_in must be a probability")


@dataclass(frozen=True)
class ProtocolSpec:
    """One distillation (or conversion) protocol.

    ``distances`` are the (d_X, d_Z, d_m) code distances as fractions of
    the computational distance d. ``batch_modules``/``batch_outputs``
    describe the packing the throughput model uses: how many workspace
    modules a production batch occupies, and how many states it emits
    every d/2 code cycles.
    """

    name: str
    output_kind: str
    output_count: int
    input_kind: str
    input_count: int
    volume: Fraction  # quarter-blocks
    reaction_depth: Fraction
    distances: Tuple[Fraction, Fraction, Fraction]
    batch_modules: int
    batch_outputs: int

    def __post_init__(self):
        if self.volume <= 0:
            raise ValueError("volume must be positive")
        if any(x <= 0 for x in self.distances):
            raise ValueError("distances must be positive")


def protocol_catalog() -> Dict[str, ProtocolSpec]:
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    one = Fraction(1)
    return {
        "8toCCZ": ProtocolSpec(
            name="8toCCZ",
            output_kind="CCZ",
            output_count=1,
            input_kind="T_noisy",
            input_count=8,
            volume=blocks(Fraction(25, 2)),
            reaction_depth=Fraction(1),
            distances=(one, one, h),
            batch_modules=25,
            batch_outputs=1,
        ),
        "15to1": ProtocolSpec(
            name="15to1",
            output_kind="T",
            output_count=1,
            input_kind="injected",
            input_count=15,
            volume=blocks(Fraction(35, 2)),
            reaction_depth=Fraction(1),
            distances=(one, h, h),
            batch_modules=35,
            batch_outputs=8,
        ),
        "15to1x8toCCZ": ProtocolSpec(
            name="15to1x8toCCZ",
            output_kind="CCZ",
            output_count=1,
            input_kind="injected",
            input_count=120,
            volume=blocks(30),
            reaction_depth=Fraction(2),
            distances=(one, one, h),
            batch_modules=30,
            batch_outputs=1,
        ),
        "CCZto2T": ProtocolSpec(
            name="CCZto2T",
            output_kind="T",
            output_count=2,
            input_kind="CCZ",
            input_count=1,
            volume=blocks(Fraction(33, 2)),
            reaction_depth=Fraction(1),
            distances=(one, one, one),
            batch_modules=17,
            batch_outputs=2,
        ),
    }


def lookup(name: str) -> ProtocolSpec:
    cat = protocol_catalog()
    if name not in cat:
        raise KeyError(f"unknown protocol {name!r}")
    return cat[name]


def _clamp(p: float, context: str) -> float:
    if p > 1.0:
        warnings.warn(f"{context}: estimated error {p:.3g} clamped to 1", stacklevel=3)
        return 1.0
    return p


def error_15to1(d: float, model: ErrorModel) -> float:
    """Output error of (15-to-1)_{d/2,d/4,d/4} run below the main distance."""
    p = model.p_of_d
    est = 35.0 * (4.0 * p(d / 4) + model.p_in) ** 3 + 2.0 * p(d / 2)
    return _clamp(est, "15-to-1")


def error_8toccz(d: float, model: ErrorModel) -> float:
    """Output error of (8-to-CCZ)_{d,d,d/2}; p_in is the error of its
    eight input T states."""
    p = model.p_of_d
    est = 28.0 * (4.0 * p(d / 2) + model.p_in) ** 2 + 2.0 * p(d)
    return _clamp(est, "8-to-CCZ")


def two_stage_ccz_error(
    d: float, p_inject: float, p_of_d: Callable[[float], float] = default_p_of_d
) -> Tuple[float, float]:
    """Chain a first-stage 15-to-1 into 8-to-CCZ.

    Returns (stage-one T error, final CCZ error).
    """
    stage1 = error_15to1(d, ErrorModel(p_in=p_inject, p_of_d=p_of_d))
    stage2 = error_8toccz(d, ErrorModel(p_in=stage1, p_of_d=p_of_d))
    return stage1, stage2


def throughput(protocol: ProtocolSpec, d: int, n_modules: int) -> float:
    """Output states per code cycle from ``n_modules`` workspace modules.

    A batch of ``batch_modules`` modules produces ``batch_outputs``
    states every d/2 code cycles; partial batches scale linearly.
    """
    if n_modules < 0:
        raise ValueError("module count must be nonnegative")
    if n_modules == 0:
        return 0.0
    batches = n_modules / protocol.batch_modules
    return batches * protocol.batch_outputs / (d / 2)


def module_cycles_per_state(protocol: ProtocolSpec) -> Fraction:
    """Workspace occupancy per output state, in module-logical-cycles
    (equivalently, blocks of active volume per state)."""
    return protocol.volume / 4 / protocol.output_count
