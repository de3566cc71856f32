"""Program representation and JSON parsing.

A program file is UTF-8 JSON:

    {
      "qubits": 4096,
      "constants": {"c_t": 25, "c_ccz": 35},
      "repeat": 500000,
      "ops": [
        {"op": "gidney_adder", "n": 2048, "qubits": ["a", "b"]},
        {"op": "qrom", "n": 1024, "b": 2048}
      ]
    }

Constants in the header are given in blocks. ``repeat`` runs the whole
op list that many times on the same registers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from . import costs
from .costs import CostConstants, CostSummary, WeightPair


class ProgramError(ValueError):
    pass


class UnknownOpError(ProgramError):
    pass


class BadParamsError(ProgramError):
    pass


@dataclass(frozen=True)
class Operation:
    name: str
    cost: CostSummary
    qubits: Tuple[str, ...] = ()
    non_data_qubits: int = 0


@dataclass(frozen=True)
class Program:
    ops: Tuple[Operation, ...]
    repeat: int = 1
    declared_qubits: Optional[int] = None
    constants: CostConstants = costs.DEFAULT

    def __post_init__(self):
        if self.repeat < 1:
            raise ProgramError("repeat must be >= 1")

    @property
    def memory_requirement(self) -> int:
        if self.declared_qubits is not None:
            return self.declared_qubits
        return len({q for op in self.ops for q in op.qubits})

    @property
    def total_volume(self) -> Fraction:
        """Active volume in quarter-blocks, including repeats."""
        return self.repeat * sum((op.cost.volume for op in self.ops), Fraction(0))

    @property
    def total_volume_blocks(self) -> Fraction:
        return self.total_volume / 4

    def expand_once(self) -> "Program":
        """One iteration of the op list (repeat stripped)."""
        return Program(
            ops=self.ops,
            repeat=1,
            declared_qubits=self.declared_qubits,
            constants=self.constants,
        )

    def expand(self) -> "Program":
        """Materialize repeats into a flat op list (for scheduling)."""
        if self.repeat == 1:
            return self
        return Program(
            ops=self.ops * self.repeat,
            repeat=1,
            declared_qubits=self.declared_qubits,
            constants=self.constants,
        )


def _want(params, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise BadParamsError(f"missing parameter(s) {missing} for {params.get('op')}")
    return [params[n] for n in names]


def _weights(params) -> WeightPair:
    return WeightPair(int(params.get("w_x", 0)), int(params.get("w_z", 0)))


def resolve_op(record: Dict, constants: CostConstants) -> Operation:
    """Build an Operation from one program-file record."""
    name = record.get("op")
    if not name:
        raise BadParamsError("record has no 'op' field")
    qubits = tuple(record.get("qubits", ()))
    non_data = int(record.get("non_data_qubits", 0))
    p = record
    try:
        if name == "hadamard":
            cost = costs.hadamard(constants)
        elif name == "cnot":
            cost = costs.cnot(constants)
        elif name == "reactive_cz":
            cost = costs.reactive_cz(constants)
        elif name == "toffoli":
            cost = costs.toffoli(constants)
        elif name == "temporary_and_pair":
            cost = costs.temporary_and_pair(constants)
        elif name == "controlled_swap":
            cost = costs.controlled_swap(constants)
        elif name == "gidney_adder":
            (n,) = _want(p, "n")
            cost = costs.gidney_adder(int(n), constants)
            if not non_data:
                # roughly 12 live non-data qubits per 60-block window
                non_data = 12
        elif name == "controlled_adder":
            (n,) = _want(p, "n")
            cost = costs.controlled_adder(int(n), constants)
        elif name == "out_of_place_adder":
            cost = costs.out_of_place_adder(constants)
        elif name == "qft":
            (n,) = _want(p, "n")
            cost = costs.qft(int(n), constants)
        elif name == "ppm":
            (pauli,) = _want(p, "pauli")
            cost = costs.ppm_cost(pauli, constants)
        elif name == "ppr_pi8":
            (pauli,) = _want(p, "pauli")
            cost = costs.ppr_pi8_cost(pauli, constants)
        elif name == "ppr_pi16":
            (pauli,) = _want(p, "pauli")
            cost = costs.ppr_pi16_cost(pauli, constants)
        elif name == "ppr_variant1":
            pauli, eps = _want(p, "pauli", "eps")
            cost = costs.ppr_variant1_cost(pauli, float(eps), constants)
        elif name == "ppr_variant2":
            pauli, b = _want(p, "pauli", "b")
            cost = costs.ppr_variant2_cost(pauli, int(b), constants)
        elif name == "ppr_variant3":
            pauli, b = _want(p, "pauli", "b")
            cost = costs.ppr_variant3_cost(pauli, int(b), constants)
        elif name == "select":
            (n,) = _want(p, "n")
            cost = costs.select_cost(int(n), _weights(p), constants)
        elif name == "qrom":
            n, b = _want(p, "n", "b")
            cost = costs.qrom_cost(int(n), int(b), int(p.get("batch", 1)), constants)
        elif name == "commuting_pprs":
            n, b = _want(p, "n", "b")
            cost = costs.commuting_pprs_cost(int(n), _weights(p), int(b), constants)
        elif name == "custom_clifford":
            (n,) = _want(p, "n")
            cost = costs.custom_clifford_cost(int(n), constants)
        elif name == "custom_unitary":
            n, n_r, b = _want(p, "n", "n_r", "b")
            cost = costs.custom_unitary_cost(int(n), int(n_r), int(b), constants)
        elif name == "y_state_batch":
            (n,) = _want(p, "n")
            cost = costs.y_state_batch(int(n), constants)
        elif name == "sqrt_t_pair":
            cost = costs.sqrt_t_pair(constants)
        elif name == "ccz_to_2t":
            cost = costs.ccz_to_2t(constants)
        else:
            raise UnknownOpError(f"unknown operation {name!r}")
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ProgramError):
            raise
        raise BadParamsError(f"bad parameters for {name!r}: {exc}") from exc
    return Operation(name=name, cost=cost, qubits=qubits, non_data_qubits=non_data)


def parse_constants(doc: Dict) -> CostConstants:
    """Constants overrides; values given in blocks."""
    c_t = doc.get("c_t")
    c_ccz = doc.get("c_ccz")
    kw = {}
    if c_t is not None:
        kw["c_t"] = Fraction(str(c_t)) * 4
    if c_ccz is not None:
        kw["c_ccz"] = Fraction(str(c_ccz)) * 4
    return CostConstants(**kw)


def parse_program(text: str, constants: Optional[CostConstants] = None) -> Program:
    """Parse a program file. An explicit ``constants`` argument overrides
    the file's own constants header."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProgramError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "ops" not in doc:
        raise ProgramError("program file must be an object with an 'ops' list")
    if constants is None:
        constants = parse_constants(doc.get("constants", {}))
    ops = tuple(resolve_op(rec, constants) for rec in doc["ops"])
    return Program(
        ops=ops,
        repeat=int(doc.get("repeat", 1)),
        declared_qubits=doc.get("qubits"),
        constants=constants,
    )
