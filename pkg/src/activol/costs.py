"""Closed-form active-volume and reaction-depth accounting.

Volumes are tracked in exact quarter-block units (Fraction) so that the
0.25/0.5-block entries of the cost table survive arithmetic unchanged.
All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Tuple

QUARTERS_PER_BLOCK = 4


def blocks(x) -> Fraction:
    """Convert a block count to quarter-block units."""
    return Fraction(x) * QUARTERS_PER_BLOCK


@dataclass(frozen=True)
class WeightPair:
    w_x: int
    w_z: int

    def __post_init__(self):
        if self.w_x < 0 or self.w_z < 0:
            raise ValueError("weights must be nonnegative")


@dataclass(frozen=True)
class CostSummary:
    """Active volume (quarter-blocks), reaction depth and interface counts."""

    volume: Fraction
    reaction_depth: Fraction
    input_qubits: int = 0
    output_qubits: int = 0
    resource_demand: Mapping[str, Fraction] = field(default_factory=dict)
    segments: Optional[Tuple["CostSummary", ...]] = None

    def __post_init__(self):
        if self.volume < 0:
            raise ValueError("volume must be nonnegative")
        if self.reaction_depth < 0:
            raise ValueError("reaction depth must be nonnegative")
        if self.segments is not None:
            total = sum((s.volume for s in self.segments), Fraction(0))
            if total != self.volume:
                raise ValueError("segment volumes do not sum to the total")

    @property
    def volume_blocks(self) -> Fraction:
        return self.volume / QUARTERS_PER_BLOCK


def _default_rotation_volume(b: int, c_t: Fraction, c_ccz: Fraction) -> Fraction:
    # single-qubit Z rotation, adder-based catalyzed form (variant 3), C_m = 2
    return blocks(2) + Fraction(b, 40) * (blocks(305) + 6 * c_ccz + 24 * c_t)


@dataclass(frozen=True)
class CostConstants:
    """Distillation cost constants, in quarter-blocks.

    ``c_rot`` prices a single-qubit Z rotation at b bits of precision;
    the default is the catalyzed adder-based rotation with reaction
    depth 0.75b.
    """

    c_t: Fraction = Fraction(100)
    c_ccz: Fraction = Fraction(140)
    c_rot: Optional[Callable[[int], Fraction]] = None

    def __post_init__(self):
        if self.c_t < 0 or self.c_ccz < 0:
            raise ValueError("cost constants must be nonnegative")

    @property
    def t_blocks(self) -> Fraction:
        return Fraction(self.c_t) / QUARTERS_PER_BLOCK

    @property
    def ccz_blocks(self) -> Fraction:
        return Fraction(self.c_ccz) / QUARTERS_PER_BLOCK

    def rotation_volume(self, b: int) -> Fraction:
        if self.c_rot is not None:
            return Fraction(self.c_rot(b))
        return _default_rotation_volume(b, Fraction(self.c_t), Fraction(self.c_ccz))

    def rotation_depth(self, b: int) -> Fraction:
        return Fraction(3, 4) * b if self.c_rot is None else Fraction(3, 4) * b


DEFAULT = CostConstants()

_PAULI_CHARS = set("IXYZ")


def weights_of(pauli: str) -> WeightPair:
    """X and Z weight of a Pauli string; odd Y counts add a catalyst leg
    to both weights."""
    pauli = pauli.upper()
    if not pauli or set(pauli) - _PAULI_CHARS:
        raise ValueError(f"not a Pauli string: {pauli!r}")
    if set(pauli) == {"I"}:
        raise ValueError("identity operator has no measurement cost")
    wx = sum(1 for c in pauli if c in "XY")
    wz = sum(1 for c in pauli if c in "ZY")
    n_y = pauli.count("Y")
    if n_y % 2 == 1:
        wx += 1
        wz += 1
    return WeightPair(wx, wz)


def _ceil_3half(w: int) -> Fraction:
    return Fraction(math.ceil(Fraction(3, 2) * w))


def measurement_overhead(pauli: str) -> Fraction:
    """C_m: block cost of measuring P (x) Z with an extra Z leg on the
    resource-state qubit. Single-qubit operators use the compact forms."""
    if pauli.upper() in ("Z", "X", "Y"):
        return {"Z": Fraction(2), "X": Fraction(3), "Y": Fraction(8)}[pauli.upper()]
    w = weights_of(pauli)
    return _ceil_3half(w.w_x) + _ceil_3half(w.w_z + 1) + 1


def ppm_cost(pauli: str, constants: CostConstants = DEFAULT) -> CostSummary:
    """Pauli product measurement. Pure-type weight-2 costs 2 blocks,
    weight-1 is free (a single-code-cycle measurement), and the
    mixed-type form pays one connector block."""
    w = weights_of(pauli)
    n = len(pauli.replace("I", "").replace("i", ""))
    demand = {}
    if pauli.upper().count("Y") % 2 == 1:
        demand["Y"] = Fraction(1)
    if w.w_x == 0 or w.w_z == 0:
        weight = max(w.w_x, w.w_z)
        if weight == 1:
            vol = Fraction(0)
        elif weight == 2:
            vol = blocks(2)
        else:
            vol = blocks(_ceil_3half(weight))
    else:
        vol = blocks(_ceil_3half(w.w_x) + _ceil_3half(w.w_z) + 1)
    return CostSummary(
        volume=vol,
        reaction_depth=Fraction(0),
        input_qubits=n,
        output_qubits=n,
        resource_demand=demand,
    )


def _rot_summary(pauli, vol_blocks, depth, demand):
    n = len(pauli.replace("I", "").replace("i", ""))
    return CostSummary(
        volume=blocks(vol_blocks),
        reaction_depth=Fraction(depth),
        input_qubits=n,
        output_qubits=n,
        resource_demand=demand,
    )


def ppr_pi8_cost(pauli: str, constants: CostConstants = DEFAULT) -> CostSummary:
    """pi/8 Pauli product rotation: consume one T state via a PPM."""
    cm = measurement_overhead(pauli)
    vol = cm + Fraction(3, 2) + constants.t_blocks
    depth = Fraction(1) if pauli.upper() in ("Z", "X", "Y") else Fraction(0)
    return _rot_summary(pauli, vol, depth, {"T": Fraction(1), "Y": Fraction(1, 2)})


def ppr_pi16_cost(pauli: str, constants: CostConstants = DEFAULT) -> CostSummary:
    """pi/16 rotation via a sqrt(T) state with a reactive T correction."""
    cm = measurement_overhead(pauli)
    vol = cm + Fraction(61, 4) + Fraction(1, 2) * constants.ccz_blocks + constants.t_blocks
    return _rot_summary(
        pauli, vol, Fraction(3, 2), {"sqrtT": Fraction(1), "T": Fraction(1, 2)}
    )


def ppr_variant1_cost(
    pauli: str, eps: float, constants: CostConstants = DEFAULT
) -> CostSummary:
    """Arbitrary-angle PPR from a gate-synthesis sequence of 3*log2(1/eps)
    pi/8 rotations."""
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    b = math.log2(1 / eps)
    if abs(b - round(b)) < 1e-9:
        b = round(b)
    cm = measurement_overhead(pauli)
    vol = cm + Fraction(3 * b) * (4 + constants.t_blocks) + 1
    return _rot_summary(pauli, vol, Fraction(3 * b), {"T": Fraction(3 * b), "Y": Fraction(1, 2)})


def ppr_variant2_cost(
    pauli: str, b: int, constants: CostConstants = DEFAULT
) -> CostSummary:
    """Arbitrary-angle PPR via phase gradient addition (in-place adder)."""
    if b < 1:
        raise ValueError("b must be >= 1")
    cm = measurement_overhead(pauli)
    vol = cm + (b - 1) * (Fraction(45, 2) + constants.ccz_blocks) - Fraction(7, 2)
    if vol < cm:
        vol = cm  # degenerate b=1 edge
    depth = Fraction(max(2 * b - 3, 0))
    return _rot_summary(pauli, vol, depth, {"CCZ": Fraction(max(b - 1, 0))})


def ppr_variant3_cost(
    pauli: str, b: int, constants: CostConstants = DEFAULT
) -> CostSummary:
    """Arbitrary-angle PPR via catalyzed out-of-place phase gradient
    addition; the cheapest high-precision variant."""
    if b < 1:
        raise ValueError("b must be >= 1")
    cm = measurement_overhead(pauli)
    vol = cm + Fraction(b, 40) * (305 + 6 * constants.ccz_blocks + 24 * constants.t_blocks)
    demand = {"CCZ": Fraction(6 * b, 40), "T": Fraction(24 * b, 40)}
    return _rot_summary(pauli, vol, Fraction(3, 4) * b, demand)


# ---------------------------------------------------------------------------
# Elementary gates
# ---------------------------------------------------------------------------


def hadamard(constants: CostConstants = DEFAULT) -> CostSummary:
    return CostSummary(blocks(3), Fraction(0), 1, 1)


def cnot(constants: CostConstants = DEFAULT) -> CostSummary:
    return CostSummary(blocks(4), Fraction(0), 2, 2)


def reactive_cz(constants: CostConstants = DEFAULT) -> CostSummary:
    return CostSummary(blocks(5), Fraction(1), 2, 2)


def toffoli(constants: CostConstants = DEFAULT) -> CostSummary:
    return CostSummary(
        blocks(12) + constants.c_ccz,
        Fraction(1),
        3,
        3,
        resource_demand={"CCZ": Fraction(1)},
    )


def temporary_and_pair(constants: CostConstants = DEFAULT) -> CostSummary:
    """Compute-uncompute AND pair; same total volume as a Toffoli because
    the uncompute half (5 blocks) shares its conditional CZ with the
    compute half (9 + C_ccz)."""
    return CostSummary(
        blocks(12) + constants.c_ccz,
        Fraction(1),
        2,
        2,
        resource_demand={"CCZ": Fraction(1)},
    )


def controlled_swap(constants: CostConstants = DEFAULT) -> CostSummary:
    return CostSummary(
        blocks(20) + constants.c_ccz,
        Fraction(1),
        3,
        3,
        resource_demand={"CCZ": Fraction(1)},
    )


# ---------------------------------------------------------------------------
# Arithmetic and data loading
# ---------------------------------------------------------------------------


def gidney_adder(n: int, constants: CostConstants = DEFAULT) -> CostSummary:
    """In-place n-qubit adder built from temporary-AND segments.

    Exposes per-segment volumes: the first segment is cheaper (15 + C_ccz
    blocks), the middle n-2 segments cost 22 + C_ccz each, and the final
    segment costs 4 blocks.
    """
    if n < 2:
        raise ValueError("adder needs n >= 2")
    c = constants.ccz_blocks
    first = CostSummary(
        blocks(15 + c), Fraction(1), 0, 0, resource_demand={"CCZ": Fraction(1)}
    )
    mid = CostSummary(
        blocks(22 + c), Fraction(2), 0, 0, resource_demand={"CCZ": Fraction(1)}
    )
    last = CostSummary(blocks(4), Fraction(0), 0, 0)
    segs = (first,) + (mid,) * (n - 2) + (last,)
    return CostSummary(
        volume=blocks((n - 1) * (22 + c) - 3),
        reaction_depth=Fraction(2 * n - 3),
        input_qubits=2 * n,
        output_qubits=2 * n,
        resource_demand={"CCZ": Fraction(n - 1)},
        segments=segs,
    )


def controlled_adder(n: int, constants: CostConstants = DEFAULT) -> CostSummary:
    if n < 2:
        raise ValueError("adder needs n >= 2")
    c = constants.ccz_blocks
    return CostSummary(
        volume=blocks((n - 1) * (30 + 2 * c) + 9 + c),
        reaction_depth=Fraction(4 * n - 3),
        input_qubits=2 * n + 1,
        output_qubits=2 * n + 1,
        resource_demand={"CCZ": Fraction(2 * (n - 1) + 1)},
    )


def out_of_place_adder(constants: CostConstants = DEFAULT) -> CostSummary:
    """One compute plus one uncompute block of the out-of-place adder."""
    compute = CostSummary(
        blocks(21) + constants.c_ccz,
        Fraction(1),
        0,
        0,
        resource_demand={"CCZ": Fraction(1)},
    )
    uncompute = CostSummary(blocks(18), Fraction(1), 0, 0)
    return CostSummary(
        volume=compute.volume + uncompute.volume,
        reaction_depth=Fraction(2),
        input_qubits=2,
        output_qubits=3,
        resource_demand={"CCZ": Fraction(1)},
        segments=(compute, uncompute),
    )


def qft(n: int, constants: CostConstants = DEFAULT) -> CostSummary:
    if n < 2:
        raise ValueError("QFT needs n >= 2")
    c = constants.ccz_blocks
    return CostSummary(
        volume=blocks((n * n - 1) * (15 + c) - 3 * n + 1),
        reaction_depth=Fraction(2 * n * n - n - 1),
        input_qubits=n,
        output_qubits=n,
        resource_demand={"CCZ": Fraction(n * n - 1)},
    )


def select_cost(
    n: int, avg_weights: WeightPair, constants: CostConstants = DEFAULT
) -> CostSummary:
    """SELECT of n Pauli operators with the given average weights."""
    if n < 2:
        raise ValueError("SELECT needs n >= 2")
    cm = _ceil_3half(avg_weights.w_x) + _ceil_3half(avg_weights.w_z + 1) + 1
    return CostSummary(
        volume=blocks((n - 1) * (13 + cm + constants.ccz_blocks)),
        reaction_depth=Fraction(n - 1),
        input_qubits=n,
        output_qubits=n,
        resource_demand={"CCZ": Fraction(n - 1)},
    )


def select_cost_cm(
    n: int, cm, constants: CostConstants = DEFAULT
) -> CostSummary:
    """SELECT cost with the measurement overhead C_m supplied directly."""
    if n < 2:
        raise ValueError("SELECT needs n >= 2")
    return CostSummary(
        volume=blocks((n - 1) * (13 + Fraction(cm) + constants.ccz_blocks)),
        reaction_depth=Fraction(n - 1),
        input_qubits=n,
        output_qubits=n,
        resource_demand={"CCZ": Fraction(n - 1)},
    )


def qrom_cost(
    n: int, b: int, batch: int = 1, constants: CostConstants = DEFAULT
) -> CostSummary:
    """QROM read of n b-bit numbers, ``batch`` numbers at a time."""
    if n < 2 or b < 1 or batch < 1:
        raise ValueError("need n >= 2, b >= 1, batch >= 1")
    if n % batch:
        raise ValueError("batch must divide n")
    c = constants.ccz_blocks
    m = Fraction(n, batch)
    vol = (m - 1) * (15 + Fraction(3, 4) * b * batch + c)
    vol += b * (batch - 1) * (20 + c)
    depth = m + math.ceil(math.log2(batch)) if batch > 1 else m
    return CostSummary(
        volume=blocks(vol),
        reaction_depth=Fraction(depth),
        input_qubits=math.ceil(math.log2(n)),
        output_qubits=math.ceil(math.log2(n)) + b,
        resource_demand={"CCZ": (m - 1) + b * (batch - 1)},
    )


def commuting_pprs_cost(
    n: int,
    avg_weights: WeightPair,
    precision_bits: int,
    constants: CostConstants = DEFAULT,
) -> CostSummary:
    """n commuting equiangular PPRs via Hamming weight phasing."""
    if n < 1:
        raise ValueError("need n >= 1")
    cm = _ceil_3half(avg_weights.w_x) + _ceil_3half(avg_weights.w_z + 1) + 1
    n_rot = math.ceil(math.log2(n)) if n > 1 else 1
    vol = blocks((cm + 39 + constants.ccz_blocks) * n)
    vol += n_rot * constants.rotation_volume(precision_bits)
    depth = Fraction(2 * n) + constants.rotation_depth(precision_bits)
    return CostSummary(
        volume=vol,
        reaction_depth=depth,
        input_qubits=avg_weights.w_x + avg_weights.w_z,
        output_qubits=avg_weights.w_x + avg_weights.w_z,
        resource_demand={"CCZ": Fraction(n)},
    )


# ---------------------------------------------------------------------------
# Custom subroutines and catalysts
# ---------------------------------------------------------------------------


def custom_clifford_cost(n: int, constants: CostConstants = DEFAULT) -> CostSummary:
    if n < 1:
        raise ValueError("need n >= 1")
    return CostSummary(blocks(3 * n * n), Fraction(0), n, n)


def custom_unitary_cost(
    n: int, n_r: int, precision_bits: int, constants: CostConstants = DEFAULT
) -> CostSummary:
    if n < 1 or n_r < 0:
        raise ValueError("need n >= 1 and n_r >= 0")
    vol = blocks(3 * n * n)
    vol += n_r * (blocks(Fraction(3, 2) * n) + constants.rotation_volume(precision_bits))
    return CostSummary(vol, Fraction(0), n, n)


def y_state_batch(n: int, constants: CostConstants = DEFAULT) -> CostSummary:
    """Prepare n Y states (3n + 1 blocks); cloning a single extra Y from
    an existing one costs 3 blocks."""
    if n < 1:
        raise ValueError("need n >= 1")
    return CostSummary(blocks(3 * n + 1), Fraction(0), 0, n)


def y_state_clone(constants: CostConstants = DEFAULT) -> CostSummary:
    return CostSummary(blocks(3), Fraction(0), 1, 2)


def sqrt_t_pair(constants: CostConstants = DEFAULT) -> CostSummary:
    """Clone two sqrt(T) states from one, consuming a CCZ and a T state."""
    return CostSummary(
        blocks(Fraction(51, 2)) + constants.c_ccz + constants.c_t,
        Fraction(0),
        1,
        2,
        resource_demand={"CCZ": Fraction(1), "T": Fraction(1)},
    )


def ccz_to_2t(constants: CostConstants = DEFAULT) -> CostSummary:
    """Convert one CCZ state into two T states."""
    return CostSummary(
        blocks(Fraction(33, 2)),
        Fraction(1),
        1,
        2,
        resource_demand={"CCZ": Fraction(1)},
    )
