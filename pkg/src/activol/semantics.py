"""Desk-scale tensor-contraction oracle for phase-free block networks.

Evaluates the linear map of a block network by contracting spider tensors
(connections are contracted with the unnormalized Bell functional, i.e. a
plain index contraction) and compares it against reference circuit
semantics. Everything is capped at 12 open qubit legs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .blocknet import (
    BlockNetwork,
    BlockType,
    Connected,
    Direction,
    LogicalBlock,
    QubitIn,
    QubitOut,
)

MAX_OPEN_LEGS = 12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_GATES = {
    "H": _H,
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "X": _PAULI["X"],
    "Z": _PAULI["Z"],
}


class SizeCapError(ValueError):
    """More open legs than the desk-scale oracle supports."""


class ZeroMapError(ValueError):
    """The contraction produced the zero map (inconsistent postselection)."""


@dataclass(frozen=True)
class LinearMap:
    """Dense complex matrix of shape 2^m x 2^n (m out-qubits, n in-qubits)."""

    n_in: int
    n_out: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.n_in + self.n_out > MAX_OPEN_LEGS:
            raise SizeCapError(
                f"{self.n_in}+{self.n_out} qubit legs exceed the cap of {MAX_OPEN_LEGS}"
            )
        if self.matrix.shape != (2**self.n_out, 2**self.n_in):
            raise ValueError("matrix shape does not match declared dims")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("non-finite entries")


def spider_map(
    btype: BlockType,
    n_in: int,
    n_out: int,
    hadamard_mask: Optional[Sequence[bool]] = None,
) -> LinearMap:
    """The Z- or X-spider map with optional Hadamards on its legs.

    ``hadamard_mask`` lists the legs in order (inputs first, then outputs).
    """
    n = n_in + n_out
    if not 1 <= n <= 4:
        raise SizeCapError("spiders have 1 to 4 legs")
    t = spider_tensor(btype, n, hadamard_mask)
    # legs ordered inputs-then-outputs; matrix rows index outputs
    t = np.moveaxis(
        t.reshape((2,) * n), list(range(n)), list(range(n_in, n)) + list(range(n_in))
    )
    return LinearMap(n_in, n_out, t.reshape(2**n_out, 2**n_in))


def spider_tensor(
    btype: BlockType, n_legs: int, hadamard_mask: Optional[Sequence[bool]] = None
) -> np.ndarray:
    """Symmetric rank-n spider tensor (1 on all-equal indices for Z)."""
    t = np.zeros((2,) * n_legs, dtype=complex)
    t[(0,) * n_legs] = 1
    t[(1,) * n_legs] = 1
    if btype == BlockType.X:
        for ax in range(n_legs):
            t = np.tensordot(t, _H, axes=([ax], [0]))
            t = np.moveaxis(t, -1, ax)
    if hadamard_mask is not None:
        for ax, h in enumerate(hadamard_mask):
            if h:
                t = np.tensordot(t, _H, axes=([ax], [0]))
                t = np.moveaxis(t, -1, ax)
    return t


def contract_network(
    net: BlockNetwork,
    inputs: Optional[Mapping[str, np.ndarray]] = None,
    project_outputs: Optional[Mapping[str, np.ndarray]] = None,
    tol: float = 1e-12,
) -> LinearMap:
    """Contract a block network to its linear map.

    Port connections are contracted as shared indices (the unnormalized
    Bell pairing). ``inputs`` feeds explicit state vectors into named input
    qubits; ``project_outputs`` applies bra vectors to named outputs (for
    measurement branches). Remaining open legs are ordered by qubit label.
    """
    inputs = dict(inputs or {})
    project_outputs = dict(project_outputs or {})

    # Build one tensor per block, tracking leg names.
    tensors: list[np.ndarray] = []
    legs: list[list[str]] = []  # leg name per axis, per tensor
    for blk in net.blocks:
        mask = [p.hadamarded for p in blk.ports]
        t = spider_tensor(blk.btype, len(blk.ports), mask)
        names = []
        for slot, p in enumerate(blk.ports):
            if isinstance(p.terminal, Connected):
                a = (blk.id, slot)
                b = (p.terminal.block_id, p.terminal.slot)
                names.append("w:%s" % (str(tuple(sorted([a, b])))))
            elif isinstance(p.terminal, QubitIn):
                names.append(f"in:{p.terminal.label}")
            else:
                names.append(f"out:{p.terminal.label}")
        tensors.append(t)
        legs.append(names)

    # Absorb boundary vectors.
    def absorb(tag: str, vec: np.ndarray):
        for ti, names in enumerate(legs):
            if tag in names:
                ax = names.index(tag)
                t = np.tensordot(tensors[ti], np.asarray(vec, dtype=complex), axes=([ax], [0]))
                tensors[ti] = t
                del names[ax]
                return
        raise KeyError(f"no such qubit leg: {tag}")

    for label, vec in inputs.items():
        absorb(f"in:{label}", vec)
    for label, vec in project_outputs.items():
        absorb(f"out:{label}", np.conj(vec))

    open_in = sorted(n for names in legs for n in names if n.startswith("in:"))
    open_out = sorted(n for names in legs for n in names if n.startswith("out:"))
    if len(open_in) + len(open_out) > MAX_OPEN_LEGS:
        raise SizeCapError(
            f"{len(open_in)} inputs + {len(open_out)} outputs exceed the cap"
        )

    # Greedy pairwise contraction: repeatedly contract the pair of tensors
    # sharing a wire that minimizes the rank of the result.
    while len(tensors) > 1:
        best = None
        for i in range(len(tensors)):
            for j in range(i + 1, len(tensors)):
                shared = set(legs[i]) & set(legs[j])
                if not shared:
                    continue
                rank = len(legs[i]) + len(legs[j]) - 2 * len(shared)
                if best is None or rank < best[0]:
                    best = (rank, i, j, shared)
        if best is None:
            # disconnected components: tensor-product the two smallest
            i, j = 0, 1
            t = np.tensordot(tensors[i], tensors[j], axes=0)
            names = legs[i] + legs[j]
        else:
            _, i, j, shared = best
            ax_i = [legs[i].index(s) for s in shared]
            ax_j = [legs[j].index(s) for s in shared]
            t = np.tensordot(tensors[i], tensors[j], axes=(ax_i, ax_j))
            names = [n for n in legs[i] if n not in shared] + [
                n for n in legs[j] if n not in shared
            ]
        for k in sorted((i, j), reverse=True):
            del tensors[k]
            del legs[k]
        tensors.append(t)
        legs.append(names)

    t, names = tensors[0], legs[0]
    # self-contractions within a single remaining tensor
    while True:
        dup = next((n for n in names if names.count(n) == 2), None)
        if dup is None:
            break
        ax = [k for k, n in enumerate(names) if n == dup]
        t = np.trace(t, axis1=ax[0], axis2=ax[1])
        names = [n for k, n in enumerate(names) if k not in ax]

    order = [names.index(n) for n in open_out + open_in]
    t = np.transpose(t, order) if t.ndim else t
    m = t.reshape(2 ** len(open_out), 2 ** len(open_in))
    if np.max(np.abs(m)) < tol:
        raise ZeroMapError("contraction produced the zero map")
    return LinearMap(len(open_in), len(open_out), m)


def equal_up_to_scalar(a: LinearMap, b: LinearMap, tol: float = 1e-9) -> bool:
    """True iff a = c * b for a nonzero complex scalar c, entrywise within tol
    after unit normalization."""
    if (a.n_in, a.n_out) != (b.n_in, b.n_out):
        raise ValueError("dimension mismatch")
    ma, mb = a.matrix, b.matrix
    na, nb = np.linalg.norm(ma), np.linalg.norm(mb)
    if na == 0 or nb == 0:
        return na == nb
    ma = ma / na
    mb = mb / nb
    idx = np.unravel_index(np.argmax(np.abs(mb)), mb.shape)
    phase = ma[idx] / mb[idx] if abs(ma[idx]) > tol else 1.0
    return bool(np.allclose(ma, phase * mb, atol=tol, rtol=0))


def pauli_matrix(p: str) -> np.ndarray:
    """Matrix of a signed Pauli string like "XZ" or "-ZZ"."""
    sign = 1.0
    if p.startswith(("+", "-")):
        sign = -1.0 if p[0] == "-" else 1.0
        p = p[1:]
    m = np.array([[sign]], dtype=complex)
    for c in p:
        m = np.kron(m, _PAULI[c])
    return m


def stabilizes(m: LinearMap, p_in: str, p_out: str) -> bool:
    """True iff matrix(p_out) . m . matrix(p_in) == m, i.e. the map carries
    the input Pauli to the output Pauli."""
    pin = pauli_matrix(p_in)
    pout = pauli_matrix(p_out)
    if pin.shape[0] != 2**m.n_in or pout.shape[0] != 2**m.n_out:
        raise ValueError("Pauli length does not match map dims")
    return bool(np.allclose(pout @ m.matrix @ pin, m.matrix, atol=1e-9))


# ---------------------------------------------------------------------------
# Circuit oracle
# ---------------------------------------------------------------------------

Op = Union[tuple, list]


def circuit_oracle(n_qubits: int, ops: Sequence[Op]) -> LinearMap:
    """Compose gate matrices and unnormalized projectors in order.

    Supported ops (qubit indices are 0-based):
      ("H"|"S"|"T"|"X"|"Z", q), ("CNOT", c, t), ("CZ", a, b),
      ("CCZ", a, b, c), ("prep0", q), ("prep+", q),
      ("prep", q, vector), ("postZ", q, outcome), ("postX", q, outcome),
      ("post", q, bra_vector).
    Qubits that are never prepared are input qubits; qubits that are
    postselected are removed from the outputs.
    """
    if n_qubits > MAX_OPEN_LEGS:
        raise SizeCapError("too many qubits for the oracle")
    prepped = {op[1] for op in ops if str(op[0]).startswith("prep")}
    in_qubits = [q for q in range(n_qubits) if q not in prepped]
    n_in = len(in_qubits)

    # state tensor: axes 0..n_qubits-1 are the "out" side, then n_in input axes
    shape = (2,) * n_qubits + (2,) * n_in
    t = np.zeros(shape, dtype=complex)
    # initialize: identity wire on input qubits, |0> elsewhere (re-prepared below)
    for assign in np.ndindex(*(2,) * n_in):
        idx = [0] * n_qubits
        for q, v in zip(in_qubits, assign):
            idx[q] = v
        t[tuple(idx) + assign] = 1.0

    def apply_1q(mat, q):
        nonlocal t
        t = np.tensordot(mat, t, axes=([1], [q]))
        t = np.moveaxis(t, 0, q)

    def apply_diag(qs, phases):
        # phases: array over the joint computational basis of qs
        nonlocal t
        grid = np.ones((2,) * n_qubits, dtype=complex)
        for assign in np.ndindex(*(2,) * len(qs)):
            sl = [slice(None)] * n_qubits
            for q, v in zip(qs, assign):
                sl[q] = v
            grid[tuple(sl)] *= phases[assign]
        t *= grid.reshape(grid.shape + (1,) * n_in)

    for op in ops:
        name = op[0]
        if name in _GATES:
            apply_1q(_GATES[name], op[1])
        elif name == "CNOT":
            c, tq = op[1], op[2]
            # CNOT = H on target, CZ, H on target
            apply_1q(_H, tq)
            ph = np.ones((2, 2), dtype=complex)
            ph[1, 1] = -1
            apply_diag((c, tq), ph)
            apply_1q(_H, tq)
        elif name == "CZ":
            ph = np.ones((2, 2), dtype=complex)
            ph[1, 1] = -1
            apply_diag((op[1], op[2]), ph)
        elif name == "CCZ":
            ph = np.ones((2, 2, 2), dtype=complex)
            ph[1, 1, 1] = -1
            apply_diag((op[1], op[2], op[3]), ph)
        elif name == "prep0":
            pass  # axes already start in |0>
        elif name == "prep+":
            apply_1q(_H, op[1])
        elif name == "prep":
            q, vec = op[1], np.asarray(op[2], dtype=complex)
            proj = np.outer(vec, [1, 0])  # overwrite the |0> initialization
            apply_1q(proj, q)
        elif name in ("postZ", "postX", "post"):
            q = op[1]
            if name == "postZ":
                vec = np.array([1, 0] if op[2] in (0, +1) else [0, 1], dtype=complex)
            elif name == "postX":
                s = 1 if op[2] in (0, +1) else -1
                vec = np.array([1, s], dtype=complex) / np.sqrt(2)
            else:
                vec = np.asarray(op[2], dtype=complex)
            t = np.tensordot(np.conj(vec), t, axes=([0], [q]))
            t = np.expand_dims(t, q)  # keep axis layout; squeeze at the end
        else:
            raise ValueError(f"unknown oracle op {name!r}")

    post = {op[1] for op in ops if str(op[0]).startswith("post")}
    out_qubits = [q for q in range(n_qubits) if q not in post]
    t = np.squeeze(t, axis=tuple(q for q in range(n_qubits) if q in post))
    m = t.reshape(2 ** len(out_qubits), 2**n_in)
    return LinearMap(n_in, len(out_qubits), m)
