"""Generalized-Toffoli gate IR and its classical (permutation) semantics.

Every gate is a NOT on one target qubit conditioned on an arbitrary set of
control qubits (possibly empty, so plain NOT and CNOT are included).  On
computational basis states such a gate is a self-inverse permutation, which
lets whole networks be evaluated on plain integers.  Basis strings are
integers with qubit 0 as the least significant bit.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Gate:
    """Flip ``target`` iff every qubit in ``controls`` is 1."""

    controls: frozenset[int]
    target: int

    def __init__(self, controls: Iterable[int], target: int):
        object.__setattr__(self, "controls", frozenset(controls))
        object.__setattr__(self, "target", int(target))

    @property
    def control_mask(self) -> int:
        m = 0
        for c in self.controls:
            m |= 1 << c
        return m

    @property
    def target_mask(self) -> int:
        return 1 << self.target

    def max_index(self) -> int:
        return max(self.target, max(self.controls, default=-1))


@dataclass(frozen=True)
class Checkpoint:
    """A position in a gate list where the listed qubits must hold 0.

    ``position`` counts gates already applied, so position 0 is before the
    first gate and position ``len(gates)`` is after the last one.
    """

    position: int
    qubits: frozenset[int]

    def __init__(self, position: int, qubits: Iterable[int]):
        object.__setattr__(self, "position", int(position))
        object.__setattr__(self, "qubits", frozenset(qubits))


@dataclass(frozen=True)
class Network:
    """An ordered gate list plus checkpoint annotations; time runs left to right."""

    gates: tuple[Gate, ...]
    qubit_count: int
    checkpoints: tuple[Checkpoint, ...] = ()

    def __init__(self, gates: Iterable[Gate], qubit_count: int,
                 checkpoints: Iterable[Checkpoint] = ()):
        object.__setattr__(self, "gates", tuple(gates))
        object.__setattr__(self, "qubit_count", int(qubit_count))
        object.__setattr__(self, "checkpoints", tuple(checkpoints))

    def __len__(self) -> int:
        return len(self.gates)

    def reversed(self) -> Network:
        """The mirror network (exact inverse permutation); checkpoints dropped."""
        return Network(reversed(self.gates), self.qubit_count)


@dataclass(frozen=True)
class RegisterLayout:
    """Assignment of qubit indices to the roles of the factoring circuit.

    reg1 holds the exponent (low bits of the basis integer so its value can
    be read off directly), reg2 holds the mod-N value, ``mult_work`` is the
    multiplier accumulator plus one overflow wire, ``add_work`` is the adder
    ripple scratch, ``modn_flag`` records the mod-N comparison branch and
    ``swap_ancilla`` is a reserved scratch wire.
    """

    reg1: range
    reg2: range
    mult_work: range
    add_work: range
    modn_flag: int
    swap_ancilla: int

    @classmethod
    def for_factoring(cls, bits: int, reg1_width: int | None = None,
                      q: int | None = None) -> RegisterLayout:
        """Pack a layout for factoring an L-bit number.

        ``reg1_width`` defaults to the width needed for q-1, or 2L+1 when no
        q is given (enough for any q up to 2 N^2).
        """
        if reg1_width is None:
            reg1_width = (q - 1).bit_length() if q is not None else 2 * bits + 1
        pos = 0
        reg1 = range(pos, pos + reg1_width); pos = reg1.stop
        reg2 = range(pos, pos + bits); pos = reg2.stop
        mult_work = range(pos, pos + bits + 1); pos = mult_work.stop
        add_work = range(pos, pos + bits + 3); pos = add_work.stop
        modn_flag = pos
        swap_ancilla = pos + 1
        return cls(reg1, reg2, mult_work, add_work, modn_flag, swap_ancilla)

    @property
    def qubit_count(self) -> int:
        return self.swap_ancilla + 1

    @property
    def register_qubits(self) -> list[int]:
        return [*self.reg1, *self.reg2]

    @property
    def work_qubits(self) -> list[int]:
        """Everything that must be 0 at the start and end of the computation."""
        return [*self.mult_work, *self.add_work, self.modn_flag, self.swap_ancilla]

    def reg1_mask(self) -> int:
        return ((1 << len(self.reg1)) - 1) << self.reg1.start

    def reg2_mask(self) -> int:
        return ((1 << len(self.reg2)) - 1) << self.reg2.start

    def work_mask(self) -> int:
        m = 0
        for w in self.work_qubits:
            m |= 1 << w
        return m

    def validate(self) -> list[str]:
        problems = []
        ranges = [("reg1", self.reg1), ("reg2", self.reg2),
                  ("mult_work", self.mult_work), ("add_work", self.add_work),
                  ("modn_flag", range(self.modn_flag, self.modn_flag + 1)),
                  ("swap_ancilla", range(self.swap_ancilla, self.swap_ancilla + 1))]
        seen: dict[int, str] = {}
        for name, rng in ranges:
            for idx in rng:
                if idx in seen:
                    problems.append(f"{name} overlaps {seen[idx]} at qubit {idx}")
                seen[idx] = name
        if sorted(seen) != list(range(self.qubit_count)):
            problems.append("layout does not cover a contiguous index range")
        return problems


def _check_gate(gate: Gate, qubit_count: int | None) -> None:
    if gate.target in gate.controls:
        raise ValueError(f"gate target {gate.target} is also a control")
    if gate.target < 0 or any(c < 0 for c in gate.controls):
        raise ValueError("negative qubit index")
    if qubit_count is not None and gate.max_index() >= qubit_count:
        raise ValueError(f"gate touches qubit {gate.max_index()} "
                         f"outside width {qubit_count}")


def apply_gate(bits: int, gate: Gate, width: int | None = None) -> int:
    """Apply one gate to a basis string: flip the target iff all controls are 1."""
    _check_gate(gate, width)
    m = gate.control_mask
    if bits & m == m:
        return bits ^ gate.target_mask
    return bits


def apply_network(bits: int, net: Network) -> int:
    """Left-to-right fold of apply_gate over the network's gate list."""
    if bits < 0 or bits >= (1 << net.qubit_count):
        raise ValueError(f"basis string {bits} does not fit {net.qubit_count} qubits")
    for gate in net.gates:
        _check_gate(gate, net.qubit_count)
        m = gate.control_mask
        if bits & m == m:
            bits ^= gate.target_mask
    return bits


def compile_masks(net: Network) -> tuple[np.ndarray, np.ndarray]:
    """Precompute (control_mask, target_mask) arrays for the vectorized paths."""
    if net.qubit_count > 62:
        raise ValueError("networks wider than 62 qubits are not supported")
    ctrl = np.empty(len(net.gates), dtype=np.int64)
    tgt = np.empty(len(net.gates), dtype=np.int64)
    for i, gate in enumerate(net.gates):
        _check_gate(gate, net.qubit_count)
        ctrl[i] = gate.control_mask
        tgt[i] = gate.target_mask
    return ctrl, tgt


def apply_network_batch(values: Sequence[int] | np.ndarray, net: Network) -> np.ndarray:
    """Apply the network to many basis strings at once."""
    ctrl, tgt = compile_masks(net)
    out = np.asarray(values, dtype=np.int64).copy()
    for c, t in zip(ctrl.tolist(), tgt.tolist()):
        out ^= ((out & c) == c) * t
    return out


def validate_network(net: Network, layout: RegisterLayout | None = None) -> list[str]:
    """Collect structural problems; an empty list means the network is well formed."""
    problems = []
    for i, gate in enumerate(net.gates):
        if gate.target in gate.controls:
            problems.append(f"gate {i}: target {gate.target} is also a control")
        bad = [q for q in (gate.target, *gate.controls)
               if q < 0 or q >= net.qubit_count]
        if bad:
            problems.append(f"gate {i}: qubit index {bad[0]} outside width {net.qubit_count}")
    last = 0
    for k, chk in enumerate(net.checkpoints):
        if chk.position < last:
            problems.append(f"checkpoint {k}: position {chk.position} decreases")
        if chk.position > len(net.gates):
            problems.append(f"checkpoint {k}: position {chk.position} beyond "
                            f"gate count {len(net.gates)}")
        bad = [q for q in chk.qubits if q < 0 or q >= net.qubit_count]
        if bad:
            problems.append(f"checkpoint {k}: qubit {bad[0]} outside width {net.qubit_count}")
        last = max(last, chk.position)
    if layout is not None:
        problems.extend(layout.validate())
        if layout.qubit_count != net.qubit_count:
            problems.append(f"layout has {layout.qubit_count} qubits, "
                            f"network has {net.qubit_count}")
    return problems


def concatenate(nets: Sequence[Network], qubit_count: int | None = None) -> Network:
    """Run networks back to back, shifting checkpoint positions accordingly."""
    if qubit_count is None:
        qubit_count = max(net.qubit_count for net in nets)
    gates: list[Gate] = []
    checkpoints: list[Checkpoint] = []
    for net in nets:
        offset = len(gates)
        gates.extend(net.gates)
        checkpoints.extend(Checkpoint(chk.position + offset, chk.qubits)
                           for chk in net.checkpoints)
    return Network(gates, qubit_count, checkpoints)


def network_to_text(net: Network) -> str:
    """Serialize to the line format ``T <target> <control>...`` / ``CHK <pos> <qubit>...``."""
    lines = [f"T {g.target} {' '.join(map(str, sorted(g.controls)))}".rstrip()
             for g in net.gates]
    lines.extend(f"CHK {c.position} {' '.join(map(str, sorted(c.qubits)))}".rstrip()
                 for c in net.checkpoints)
    return "\n".join(lines) + "\n"


def network_from_text(text: str, qubit_count: int | None = None) -> Network:
    """Parse the text format; width is inferred from the indices unless given."""
    gates = []
    checkpoints = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "T":
            if len(parts) < 2:
                raise ValueError(f"line {lineno}: gate line needs a target")
            gates.append(Gate([int(p) for p in parts[2:]], int(parts[1])))
        elif parts[0] == "CHK":
            if len(parts) < 2:
                raise ValueError(f"line {lineno}: checkpoint line needs a position")
            checkpoints.append(Checkpoint(int(parts[1]), [int(p) for p in parts[2:]]))
        else:
            raise ValueError(f"line {lineno}: unknown record {parts[0]!r}")
    if qubit_count is None:
        qubit_count = 1 + max((g.max_index() for g in gates), default=-1)
        for chk in checkpoints:
            qubit_count = max(qubit_count, 1 + max(chk.qubits, default=-1))
    checkpoints.sort(key=lambda c: c.position)
    return Network(gates, qubit_count, checkpoints)
