"""Logical blocks, block networks and their structural rules.

A logical block is an oriented 2-4 port spider; a block network is a
collection of blocks with port connections. This module enforces every
structural rule on networks (orientations, port directions, Hadamarded
ports, commensurability, range) and provides builders for the small
reference networks (CNOT, Hadamard, parity measurements, Toffoli
consumption, reactive CZ).

Volumes are tracked in integer quarter-blocks so that half-distance
blocks (2 quarters) and full blocks (4 quarters) are exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Union


class Direction(str, Enum):
    U = "U"
    D = "D"
    N = "N"
    E = "E"
    S = "S"
    W = "W"

    @property
    def axis(self) -> str:
        if self in (Direction.U, Direction.D):
            return "UD"
        if self in (Direction.N, Direction.S):
            return "NS"
        return "EW"


class BlockType(str, Enum):
    Z = "Z"
    X = "X"


class Orientation(str, Enum):
    E = "E"
    N = "N"
    U = "U"

    @property
    def axis(self) -> str:
        return {"E": "EW", "N": "NS", "U": "UD"}[self.value]


@dataclass(frozen=True)
class Connected:
    """Terminal pointing at a port slot of another block."""

    block_id: int
    slot: int


@dataclass(frozen=True)
class QubitIn:
    label: str


@dataclass(frozen=True)
class QubitOut:
    label: str


Terminal = Union[Connected, QubitIn, QubitOut]


@dataclass(frozen=True)
class Port:
    direction: Direction
    terminal: Terminal
    hadamarded: bool = False


@dataclass(frozen=True)
class LogicalBlock:
    id: int
    btype: BlockType
    orientation: Orientation
    ports: tuple[Port, ...]
    half_distance: bool = False
    multiport_pairs: bool = False
    rotated_memory: bool = False

    @property
    def volume_quarters(self) -> int:
        return 2 if self.half_distance else 4


@dataclass(frozen=True)
class BlockNetwork:
    blocks: tuple[LogicalBlock, ...]
    workspace_index: Optional[dict[int, int]] = None
    segment_boundaries: tuple[frozenset[int], ...] = ()

    def block(self, block_id: int) -> LogicalBlock:
        return self._by_id[block_id]

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {b.id: b for b in self.blocks})

    @property
    def input_labels(self) -> list[str]:
        return sorted(
            p.terminal.label
            for b in self.blocks
            for p in b.ports
            if isinstance(p.terminal, QubitIn)
        )

    @property
    def output_labels(self) -> list[str]:
        return sorted(
            p.terminal.label
            for b in self.blocks
            for p in b.ports
            if isinstance(p.terminal, QubitOut)
        )


@dataclass(frozen=True)
class Violation:
    rule: str
    block_ids: tuple[int, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_rule(self, rule: str) -> list[Violation]:
        return [v for v in self.violations if v.rule == rule]

    @property
    def rules(self) -> frozenset:
        return frozenset(v.rule for v in self.violations)


class NetworkError(ValueError):
    pass


def _commensurate(a: LogicalBlock, b: LogicalBlock) -> bool:
    same_type = a.btype == b.btype
    same_orient = a.orientation == b.orientation
    return same_type == same_orient


def validate_network(net: BlockNetwork, range_r: int = 12) -> ValidationReport:
    """Check every structural rule and return the list of violations.

    With a workspace index assigned, connected pairs must additionally
    satisfy ``|index_i - index_j| <= range_r / 2`` (workspace modules are
    every second qubit module).
    """
    if not net.blocks:
        raise NetworkError("empty network")
    if range_r < 2 or range_r % 2 != 0:
        raise NetworkError(f"range must be even and >= 2, got {range_r}")

    out: list[Violation] = []

    def bad(rule, ids, msg):
        out.append(Violation(rule, tuple(ids), msg))

    ids = [b.id for b in net.blocks]
    if len(set(ids)) != len(ids):
        bad("duplicate-id", ids, "block ids must be unique")
        return ValidationReport(tuple(out))

    for b in net.blocks:
        if not 2 <= len(b.ports) <= 4:
            bad("port-count", [b.id], f"block {b.id} has {len(b.ports)} ports")
        if sum(p.direction == Direction.D for p in b.ports) > 1:
            bad("multi-d-port", [b.id], f"block {b.id} has more than one D port")
        dirs = [p.direction for p in b.ports]
        if not b.multiport_pairs and len(set(dirs)) != len(dirs):
            bad("duplicate-direction", [b.id], f"block {b.id} repeats a port direction")
        for p in b.ports:
            if p.direction.axis == b.orientation.axis:
                bad(
                    "orientation-axis",
                    [b.id],
                    f"{b.orientation.value}-oriented block {b.id} has a "
                    f"{p.direction.value} port",
                )
            if p.hadamarded and p.direction not in (Direction.W, Direction.E):
                bad("hadamard-direction", [b.id], "Hadamarded port must be W or E")
            if isinstance(p.terminal, QubitIn) and p.direction != Direction.D:
                bad("input-not-d", [b.id], "input qubits sit on D ports")
            if isinstance(p.terminal, QubitOut) and p.direction != Direction.U:
                bad("output-not-u", [b.id], "output qubits sit on U ports")
        if any(isinstance(p.terminal, (QubitIn, QubitOut)) for p in b.ports):
            if b.rotated_memory:
                memory_ok = (
                    b.btype == BlockType.Z and b.orientation == Orientation.N
                )
            else:
                memory_ok = (
                    b.btype == BlockType.Z and b.orientation == Orientation.E
                ) or (b.btype == BlockType.X and b.orientation == Orientation.N)
            if not memory_ok:
                bad(
                    "memory-convention",
                    [b.id],
                    f"block {b.id} carries qubit terminals but is "
                    f"{b.orientation.value}-oriented {b.btype.value}-type",
                )

    # Connection structure: mutuality, direction match, commensurability.
    for b in net.blocks:
        for slot, p in enumerate(b.ports):
            t = p.terminal
            if not isinstance(t, Connected):
                if p.direction not in (Direction.U, Direction.D):
                    bad(
                        "dangling-port",
                        [b.id],
                        f"unconnected {p.direction.value} port on block {b.id}",
                    )
                continue
            if t.block_id not in net._by_id:
                bad("unknown-peer", [b.id], f"block {b.id} connects to missing block")
                continue
            other = net.block(t.block_id)
            if t.slot >= len(other.ports):
                bad("unknown-peer", [b.id, other.id], "connection to missing slot")
                continue
            op = other.ports[t.slot]
            back = op.terminal
            if not (
                isinstance(back, Connected)
                and back.block_id == b.id
                and back.slot == slot
            ):
                bad("not-mutual", [b.id, other.id], "connection is not mutual")
                continue
            if b.id > other.id:
                continue  # check each connection once
            if p.direction != op.direction:
                bad(
                    "direction-mismatch",
                    [b.id, other.id],
                    f"{p.direction.value} port joined to {op.direction.value} port",
                )
            n_h = int(p.hadamarded) + int(op.hadamarded)
            need_commensurate = n_h != 1
            if _commensurate(b, other) != need_commensurate:
                bad(
                    "commensurability",
                    [b.id, other.id],
                    f"blocks {b.id} and {other.id} "
                    + ("must be commensurate" if need_commensurate else "must be incommensurate"),
                )
            if b.multiport_pairs and other.multiport_pairs:
                if slot % 2 != t.slot % 2:
                    bad(
                        "multiport-parity",
                        [b.id, other.id],
                        "paired ports must connect top-to-top",
                    )
            if net.workspace_index is not None:
                ia = net.workspace_index.get(b.id)
                ib = net.workspace_index.get(other.id)
                if ia is not None and ib is not None and abs(ia - ib) > range_r // 2:
                    bad(
                        "range",
                        [b.id, other.id],
                        f"workspace separation {abs(ia - ib)} exceeds r/2 = {range_r // 2}",
                    )

    return ValidationReport(tuple(out))


def network_volume(net: BlockNetwork) -> int:
    """Active volume of the network in quarter-blocks."""
    return sum(b.volume_quarters for b in net.blocks)


# ---------------------------------------------------------------------------
# Builder helpers
# ---------------------------------------------------------------------------


class _Builder:
    """Accumulates blocks and resolves symbolic connections to port slots."""

    def __init__(self):
        self._specs: list[dict] = []
        self._links: list[tuple[int, str, int, str, bool]] = []

    def add(self, btype, orientation, half_distance=False, rotated_memory=False, **ports):
        """Add a block. Ports are given as direction=terminal keyword pairs,
        where terminal is 'in:<label>', 'out:<label>' or None (link placeholder)."""
        bid = len(self._specs) + 1
        self._specs.append(
            dict(
                id=bid,
                btype=btype,
                orientation=orientation,
                half_distance=half_distance,
                rotated_memory=rotated_memory,
                ports={d.upper(): t for d, t in ports.items()},
            )
        )
        return bid

    def link(self, a: int, b: int, direction: str, hadamard: bool = False):
        """Connect the `direction` port of blocks a and b; the Hadamard, if
        any, sits on block a's port."""
        self._links.append((a, b, direction.upper(), hadamard))

    def build(self, segment_boundaries: Iterable[frozenset[int]] = ()) -> BlockNetwork:
        port_lists: dict[int, list[Port]] = {s["id"]: [] for s in self._specs}
        slot_of: dict[tuple[int, str], int] = {}
        for s in self._specs:
            for d, term in s["ports"].items():
                if term is None:
                    continue
                kind, _, label = term.partition(":")
                t = QubitIn(label) if kind == "in" else QubitOut(label)
                slot_of[(s["id"], d)] = len(port_lists[s["id"]])
                port_lists[s["id"]].append(Port(Direction(d), t))
        # reserve slots for links in declaration order
        for a, b, d, _h in self._links:
            for bid in (a, b):
                key = (bid, d)
                if key in slot_of:
                    raise NetworkError(f"port {d} of block {bid} used twice")
                slot_of[key] = len(port_lists[bid])
                port_lists[bid].append(None)  # placeholder
        for a, b, d, h in self._links:
            sa, sb = slot_of[(a, d)], slot_of[(b, d)]
            port_lists[a][sa] = Port(Direction(d), Connected(b, sb), hadamarded=h)
            port_lists[b][sb] = Port(Direction(d), Connected(a, sa))
        blocks = tuple(
            LogicalBlock(
                id=s["id"],
                btype=BlockType(s["btype"]),
                orientation=Orientation(s["orientation"]),
                ports=tuple(port_lists[s["id"]]),
                half_distance=s["half_distance"],
                rotated_memory=s["rotated_memory"],
            )
            for s in self._specs
        )
        return BlockNetwork(blocks, segment_boundaries=tuple(segment_boundaries))


# ---------------------------------------------------------------------------
# Reference networks
# ---------------------------------------------------------------------------


def build_cnot() -> BlockNetwork:
    """CNOT as a 4-block network (a Z spider on the control wire joined to
    an X spider on the target wire)."""
    b = _Builder()
    c1 = b.add("Z", "E", d="in:c", u="out:c")
    c2 = b.add("Z", "E")
    t1 = b.add("X", "N")
    t2 = b.add("X", "N", d="in:t", u="out:t")
    b.link(c1, c2, "S")
    b.link(c2, t1, "U")
    b.link(t1, t2, "W")
    return b.build()


def build_hadamard() -> BlockNetwork:
    """Hadamard gate as a 3-block network with one Hadamarded connection."""
    b = _Builder()
    a = b.add("Z", "E", d="in:q")
    m = b.add("X", "U")
    c = b.add("X", "N", u="out:q")
    b.link(a, m, "N")
    b.link(m, c, "W", hadamard=True)
    return b.build()


def build_zmeas_network(w: int) -> BlockNetwork:
    """Weight-w Z-type parity measurement network.

    Two blocks for w = 2, the chain construction of ceil(3w/2) blocks for
    w > 2: one Z block per data qubit and a chain of X parity blocks, each
    serving two data blocks.
    """
    return _parity_network(w, BlockType.Z)


def build_xmeas_network(w: int) -> BlockNetwork:
    """Weight-w X-type parity measurement network (type-swapped mirror of
    the Z-type chain)."""
    return _parity_network(w, BlockType.X)


def _parity_network(w: int, btype: BlockType) -> BlockNetwork:
    if w < 2:
        raise NetworkError("parity measurement networks need weight >= 2")
    zlike = btype == BlockType.Z
    data_kw = dict(btype="Z", orientation="E") if zlike else dict(btype="X", orientation="N")
    par_kw = dict(btype="X", orientation="U") if zlike else dict(btype="Z", orientation="U")
    b = _Builder()
    if w == 2:
        d1 = b.add(data_kw["btype"], data_kw["orientation"], d="in:q1", u="out:q1")
        d2 = b.add(data_kw["btype"], data_kw["orientation"], d="in:q2", u="out:q2")
        b.link(d1, d2, "S" if zlike else "W")
        return b.build()

    # Interleave data and parity blocks so connected ids stay close.
    data_ids: list[int] = []
    par_ids: list[int] = []
    n_par = math.ceil(w / 2)
    order: list[tuple[str, int]] = []
    di, pi = 0, 0
    for k in range(n_par):
        if di < w:
            order.append(("d", di)); di += 1
        order.append(("p", k))
        if di < w:
            order.append(("d", di)); di += 1
    while di < w:
        order.append(("d", di)); di += 1

    id_of_data: dict[int, int] = {}
    id_of_par: dict[int, int] = {}
    for kind, idx in order:
        if kind == "d":
            q = f"q{idx + 1}"
            id_of_data[idx] = b.add(
                data_kw["btype"], data_kw["orientation"], d=f"in:{q}", u=f"out:{q}"
            )
        else:
            id_of_par[idx] = b.add(par_kw["btype"], par_kw["orientation"])

    # data-to-parity connections: parity block k serves data 2k and 2k+1
    dirs_dp = ("N", "S") if zlike else ("W", "E")
    for k in range(n_par):
        members = [m for m in (2 * k, 2 * k + 1) if m < w]
        for m, d in zip(members, dirs_dp):
            b.link(id_of_data[m], id_of_par[k], d)
    # chain links between parity blocks, alternating directions
    dirs_chain = ("E", "W") if zlike else ("N", "S")
    for k in range(n_par - 1):
        b.link(id_of_par[k], id_of_par[k + 1], dirs_chain[k % 2])
    return b.build()


def build_ppm_network(pauli: str) -> BlockNetwork:
    """Network for an arbitrary Pauli product measurement over {I, X, Z}.

    Pure-type strings use the parity chain (2 blocks at weight 2); mixed
    strings use a Z-part chain and an X-part chain joined by one
    Hadamarded connector block, for ceil(3/2 wx) + ceil(3/2 wz) + 1 blocks
    total. Strings containing Y are not constructible here (the Y-catalyst
    bookkeeping lives in the cost model).
    """
    pauli = pauli.upper()
    if set(pauli) - set("IXZY"):
        raise NetworkError(f"not a Pauli string: {pauli!r}")
    if "Y" in pauli:
        raise NetworkError(
            "Y terms need a catalyst qubit; use the PPM cost model for pricing"
        )
    z_qubits = [i for i, p in enumerate(pauli) if p == "Z"]
    x_qubits = [i for i, p in enumerate(pauli) if p == "X"]
    if not z_qubits and not x_qubits:
        raise NetworkError("identity measurement has no network")
    if not x_qubits:
        if len(z_qubits) == 1:
            raise NetworkError("weight-1 measurements are single-cycle operations")
        return _relabel_parity(build_zmeas_network(len(z_qubits)), z_qubits)
    if not z_qubits:
        if len(x_qubits) == 1:
            raise NetworkError("weight-1 measurements are single-cycle operations")
        return _relabel_parity(build_xmeas_network(len(x_qubits)), x_qubits)
    return _mixed_ppm_network(z_qubits, x_qubits)


def _relabel_parity(net: BlockNetwork, qubits: list[int]) -> BlockNetwork:
    """Rename q1..qw terminals to the actual qubit indices."""
    mapping = {f"q{i + 1}": f"q{q + 1}" for i, q in enumerate(qubits)}
    blocks = []
    for blk in net.blocks:
        ports = tuple(
            replace(p, terminal=type(p.terminal)(mapping[p.terminal.label]))
            if isinstance(p.terminal, (QubitIn, QubitOut))
            else p
            for p in blk.ports
        )
        blocks.append(replace(blk, ports=ports))
    return BlockNetwork(tuple(blocks))


def _mixed_ppm_network(z_qubits: list[int], x_qubits: list[int]) -> BlockNetwork:
    b = _Builder()
    _, z_par = _add_parity_chain(b, [f"q{q + 1}" for q in z_qubits], zlike=True)
    conn = b.add("Z", "U")
    _, x_par = _add_parity_chain(b, [f"q{q + 1}" for q in x_qubits], zlike=False)
    # The connector joins the tail of the Z-part parity chain (X,U blocks,
    # whose spare direction is an E/W chain end) to the head of the X-part
    # chain (Z,U blocks with a spare N/S chain end). The E/W connection
    # carries the Hadamard.
    z_spare = "E" if len(z_par) == 1 else ("E", "W")[(len(z_par) - 1) % 2]
    x_spare = "N" if len(x_par) == 1 else "S"
    b.link(conn, z_par[-1], z_spare, hadamard=True)
    b.link(conn, x_par[0], x_spare)
    return b.build()


def _add_parity_chain(b: _Builder, labels: list[str], zlike: bool):
    """Add data blocks plus a parity chain for one part of a mixed PPM.

    Returns (data_ids, parity_ids). The parity chain always has at least
    one block and ceil(w/2) blocks total, each serving at most two data
    blocks, keeping one spare direction for the connector / chain ends.
    """
    w = len(labels)
    data_kw = ("Z", "E") if zlike else ("X", "N")
    par_kw = ("X", "U") if zlike else ("Z", "U")
    dirs_dp = ("N", "S") if zlike else ("W", "E")
    dirs_chain = ("E", "W") if zlike else ("N", "S")
    data_ids, par_ids = [], []
    n_par = max(1, math.ceil(w / 2))
    for k in range(n_par):
        members = [m for m in (2 * k, 2 * k + 1) if m < w]
        for m in members:
            q = labels[m]
            data_ids.append(b.add(*data_kw, d=f"in:{q}", u=f"out:{q}"))
        par_ids.append(b.add(*par_kw))
        for m, d in zip(members, dirs_dp):
            b.link(data_ids[m], par_ids[k], d)
    for k in range(n_par - 1):
        b.link(par_ids[k], par_ids[k + 1], dirs_chain[k % 2])
    return data_ids, par_ids


def build_reactive_cz() -> BlockNetwork:
    """Reactive (conditional) CZ gate: 5 blocks emitting a CZ-state pair.

    Output `a` is a Z-basis copy of q2; output `b` hangs off q1's wire
    through a Hadamarded connection. A later Bell measurement of (a, b)
    teleports a CZ between q1 and q2; X on `a` and Z on `b` remove the
    pair without a gate.
    """
    b = _Builder()
    q1 = b.add("Z", "E", d="in:q1", u="out:q1")
    mid = b.add("X", "U")
    bout = b.add("X", "N", u="out:b")
    q2 = b.add("Z", "E", d="in:q2", u="out:q2")
    aout = b.add("Z", "E", u="out:a")
    b.link(q1, mid, "S")
    b.link(mid, bout, "W", hadamard=True)
    b.link(q2, aout, "S")
    return b.build()


def build_toffoli_consumption() -> BlockNetwork:
    """Toffoli execution by CCZ-state consumption: 12 blocks.

    Inputs are the data qubits x1..x3 and the CCZ-state qubits c1..c3;
    outputs are the data qubits y1..y3 plus three CZ-state pairs
    (a12, b12), (a23, b23), (a31, b31) awaiting reactive measurements.
    """
    b = _Builder()
    pairs = ["12", "23", "31"]
    blocks = {}
    for i in (1, 2, 3):
        h_pair = pairs[i - 1]       # wire i carries the Hadamard side of this pair
        a_pair = pairs[i % 3]       # and the copy side of the next pair
        p = b.add("Z", "E", d=f"in:c{i}", u=f"out:y{i}")
        q = b.add("Z", "E", d=f"in:x{i}", u=f"out:a{a_pair}")
        r = b.add("X", "U")
        s = b.add("X", "N", u=f"out:b{h_pair}")
        b.link(p, q, "S")
        b.link(p, r, "N")
        b.link(r, s, "W", hadamard=True)
        blocks[i] = (p, q, r, s)
    return b.build()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def to_json(net: BlockNetwork) -> str:
    def term_str(t: Terminal) -> str:
        if isinstance(t, QubitIn):
            return f"in:{t.label}"
        if isinstance(t, QubitOut):
            return f"out:{t.label}"
        return f"c:{t.block_id}:{t.slot}"

    doc = {
        "blocks": [
            {
                "id": blk.id,
                "type": blk.btype.value,
                "orient": blk.orientation.value,
                "halfDistance": blk.half_distance,
                **({"rotatedMemory": True} if blk.rotated_memory else {}),
                **({"multiportPairs": True} if blk.multiport_pairs else {}),
                "ports": [
                    {"dir": p.direction.value, "h": p.hadamarded, "term": term_str(p.terminal)}
                    for p in blk.ports
                ],
            }
            for blk in net.blocks
        ]
    }
    return json.dumps(doc, indent=2)


def from_json(text: str) -> BlockNetwork:
    doc = json.loads(text)
    blocks = []
    for rec in doc["blocks"]:
        ports = []
        for p in rec["ports"]:
            term = p["term"]
            if term.startswith("in:"):
                t: Terminal = QubitIn(term[3:])
            elif term.startswith("out:"):
                t = QubitOut(term[4:])
            elif term.startswith("c:"):
                _, bid, slot = term.split(":")
                t = Connected(int(bid), int(slot))
            else:
                raise NetworkError(f"bad terminal {term!r}")
            ports.append(Port(Direction(p["dir"]), t, hadamarded=bool(p["h"])))
        blocks.append(
            LogicalBlock(
                id=int(rec["id"]),
                btype=BlockType(rec["type"]),
                orientation=Orientation(rec["orient"]),
                ports=tuple(ports),
                half_distance=bool(rec.get("halfDistance", False)),
                rotated_memory=bool(rec.get("rotatedMemory", False)),
                multiport_pairs=bool(rec.get("multiportPairs", False)),
            )
        )
    return BlockNetwork(tuple(blocks))
