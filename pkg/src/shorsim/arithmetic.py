"""Reversible arithmetic networks built from generalized Toffoli gates.

The building blocks, smallest first:

* a controlled one-column adder that ripples a carry while adding a
  classical constant bit,
* a controlled constant adder mapping ``X -> X + Y`` that computes the sum
  into scratch wires, swaps it into the register and then clears the
  leftover copy of ``X`` by un-adding the two's complement of ``Y``,
* a controlled mod-N adder built from five constant adders plus two
  record-erasing NOTs,
* a controlled modular multiplier (repeated mod-N addition, a mirrored
  erasure pass using the inverse factor, and a final controlled swap),
* the modular-exponentiation chain driving one multiplier per exponent bit.

All builders take explicit wire lists so they compose freely; the top-level
chain uses a :class:`~shorsim.gates.RegisterLayout`.  Every block restores
its scratch wires to 0 on in-domain inputs, which the exhaustive checker in
:mod:`shorsim.oracles` verifies wire by wire.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from .gates import Checkpoint, Gate, Network, RegisterLayout, concatenate


@dataclass(frozen=True)
class ArithParams:
    """Classical inputs of a factoring instance: N, the base x, and q."""

    n: int
    x: int
    q: int
    bits: int

    @classmethod
    def create(cls, n: int, x: int, q: int) -> ArithParams:
        if n < 3:
            raise ValueError(f"cannot factor {n}")
        if not 1 < x < n:
            raise ValueError(f"base {x} must lie strictly between 1 and {n}")
        g = math.gcd(x, n)
        if g != 1:
            raise ValueError(f"gcd({x}, {n}) = {g}; {g} is already a factor of {n}")
        if q < 2:
            raise ValueError("q must be at least 2")
        # The usual choice N^2 <= q <= 2 N^2 is advisory and not enforced.
        return cls(n, x, q, n.bit_length())


@dataclass(frozen=True)
class ResourceReport:
    qubits: int
    elementary_gates: int | None
    formula_gates: int

    def as_dict(self) -> dict:
        return {"qubits": self.qubits, "gates_exact": self.elementary_gates,
                "gates_formula": self.formula_gates}


def mod_inverse(c: int, n: int) -> int:
    """The multiplicative inverse of c mod n, via the extended Euclid algorithm."""
    if not 0 < c < n:
        raise ValueError(f"need 0 < c < n, got c={c}, n={n}")
    r0, r1 = n, c
    s0, s1 = 0, 1
    while r1:
        k = r0 // r1
        r0, r1 = r1, r0 - k * r1
        s0, s1 = s1, s0 - k * s1
    if r0 != 1:
        raise ValueError(f"gcd({c}, {n}) = {r0}; {r0} is a factor of {n}, "
                         "no modular inverse exists")
    return s0 % n


def build_bit_adder(const_bit: int, controls: Sequence[int], sum_wire: int,
                    keep_wire: int, carry_wire: int | None) -> list[Gate]:
    """One ripple column: add ``keep_wire + const_bit`` into ``sum_wire``.

    ``sum_wire`` enters holding the incoming carry and leaves holding the low
    bit of ``sum_wire + keep_wire + const_bit``; ``keep_wire`` is preserved;
    ``carry_wire`` (which must enter as 0) receives the high bit.  Pass
    ``carry_wire=None`` for the cheaper top column that only needs the low
    bit.  Everything is conditioned on ``controls``.
    """
    wires = [sum_wire, keep_wire] + ([carry_wire] if carry_wire is not None else [])
    if len(set(wires)) != len(wires):
        raise ValueError(f"bit adder wires must be distinct, got {wires}")
    ctl = tuple(controls)
    gates = []
    if carry_wire is not None:
        gates.append(Gate([*ctl, sum_wire, keep_wire], carry_wire))
        if const_bit:
            gates.append(Gate([*ctl, sum_wire], carry_wire))
            gates.append(Gate([*ctl, keep_wire], carry_wire))
    gates.append(Gate([*ctl, keep_wire], sum_wire))
    if const_bit:
        gates.append(Gate(ctl, sum_wire))
    return gates


def controlled_swap(controls: Sequence[int], a: int, b: int) -> list[Gate]:
    """Exchange wires a and b; three NOTs, only the middle one controlled."""
    ctl = tuple(controls)
    return [Gate([b], a), Gate([*ctl, a], b), Gate([b], a)]


def adder_gates(y: int, reg: Sequence[int], work: Sequence[int],
                controls: Sequence[int] = ()) -> list[Gate]:
    """Controlled ``X -> X + y`` on the ``reg`` wires.

    Needs ``len(reg) + 1`` scratch wires, all entering as 0, and is only
    correct when ``X + y`` fits in ``len(reg)`` bits.  Stage one ripples the
    sum into the scratch wires, stage two swaps it into the register, stage
    three sets the top scratch bit and un-ripples ``2**m - y`` so the
    leftover copy of ``X`` cancels back to 0.
    """
    m = len(reg)
    if not 0 <= y < (1 << m):
        raise ValueError(f"constant {y} does not fit in {m} bits")
    if len(work) < m + 1:
        raise ValueError(f"adder on {m} wires needs {m + 1} scratch wires")
    if y == 0:
        return []
    gates = []
    for i in range(m):
        carry = work[i + 1] if i < m - 1 else None
        gates += build_bit_adder((y >> i) & 1, controls, work[i], reg[i], carry)
    for i in range(m):
        gates += controlled_swap(controls, reg[i], work[i])
    gates.append(Gate(controls, work[m]))
    complement = (1 << m) - y
    unwind = []
    for i in range(m):
        unwind += build_bit_adder((complement >> i) & 1, controls,
                                  work[i], reg[i], work[i + 1])
    gates += reversed(unwind)
    return gates


def build_adder(y: int, reg: Sequence[int], work: Sequence[int],
                controls: Sequence[int] = (),
                qubit_count: int | None = None) -> Network:
    gates = adder_gates(y, reg, work, controls)
    if qubit_count is None:
        qubit_count = 1 + max([*reg, *work, *controls])
    return Network(gates, qubit_count)


def mod_adder_gates(y: int, n: int, value: Sequence[int], flag_lo: int,
                    flag_hi: int, work: Sequence[int],
                    controls: Sequence[int] = ()) -> list[Gate]:
    """Controlled ``X -> (X + y) mod n`` for X, y < n on the ``value`` wires.

    Five adder stages: add y; add ``2**(L+1) - n`` (a subtraction in
    disguise), which parks the comparison ``X + y < n`` on ``flag_lo``; add n
    back conditioned on ``flag_lo``; then recompute the comparison into
    ``flag_hi`` by adding ``2**L - y``, cancel the record with a NOT, and
    un-add to restore the scratch.  Correct only for in-range inputs --
    out-of-range values leave garbage that the exhaustive checker flags.
    """
    bits = len(value)
    if not 0 <= y < n:
        raise ValueError(f"addend {y} must lie in [0, {n})")
    if n.bit_length() > bits:
        raise ValueError(f"modulus {n} does not fit in {bits} bits")
    if len(work) < bits + 3:
        raise ValueError(f"mod-{n} adder needs {bits + 3} scratch wires")
    ctl = tuple(controls)
    gates = []
    gates += adder_gates(y, [*value, flag_lo], work[:bits + 2], ctl)
    gates += adder_gates((1 << (bits + 1)) - n, [*value, flag_lo, flag_hi],
                         work[:bits + 3], ctl)
    gates += adder_gates(n, [*value, flag_hi], work[:bits + 2], (*ctl, flag_lo))
    gates.append(Gate(ctl, flag_hi))
    recompute = adder_gates((1 << bits) - y, [*value, flag_hi],
                            work[:bits + 2], ctl)
    gates += recompute
    gates.append(Gate((*ctl, flag_hi), flag_lo))
    gates += reversed(recompute)
    return gates


def build_mod_adder(y: int, n: int, value: Sequence[int], flag_lo: int,
                    flag_hi: int, work: Sequence[int],
                    controls: Sequence[int] = (),
                    qubit_count: int | None = None) -> Network:
    gates = mod_adder_gates(y, n, value, flag_lo, flag_hi, work, controls)
    if qubit_count is None:
        qubit_count = 1 + max([*value, flag_lo, flag_hi, *work, *controls])
    scratch = frozenset([*work, flag_lo, flag_hi])
    return Network(gates, qubit_count, [Checkpoint(len(gates), scratch)])


def multiplier_gates(c: int, n: int, reg: Sequence[int], acc: Sequence[int],
                     flag_lo: int, flag_hi: int, work: Sequence[int],
                     controls: Sequence[int] = (),
                     ) -> tuple[list[Gate], list[Checkpoint]]:
    """Controlled ``I -> I * c mod n`` on the ``reg`` wires; identity when off.

    The accumulator picks up ``sum_i I_i * (2**i c) mod n`` through mod-N
    adders keyed on the input bits, a mirrored pass with the inverse factor
    erases the input copy from ``reg``, and a controlled swap moves the
    product back.  When the control is off every internal gate stays inert,
    which realizes multiplication by 1.
    """
    bits = len(reg)
    if len(acc) != bits:
        raise ValueError("accumulator and input register must have equal width")
    inverse = mod_inverse(c, n)  # raises when gcd(c, n) != 1
    ctl = tuple(controls)
    scratch = frozenset([*work, flag_lo, flag_hi])
    gates: list[Gate] = []
    checkpoints: list[Checkpoint] = []
    for i in range(bits):
        gates += mod_adder_gates((c << i) % n, n, acc, flag_lo, flag_hi,
                                 work, (*ctl, reg[i]))
        checkpoints.append(Checkpoint(len(gates), scratch))
    for i in reversed(range(bits)):
        block = mod_adder_gates((inverse << i) % n, n, reg, flag_lo, flag_hi,
                                work, (*ctl, acc[i]))
        gates += reversed(block)
        checkpoints.append(Checkpoint(len(gates), scratch))
    for i in range(bits):
        gates += controlled_swap(ctl, reg[i], acc[i])
    checkpoints.append(Checkpoint(len(gates), frozenset([*acc, *scratch])))
    return gates, checkpoints


def build_controlled_multiplier(c: int, n: int, reg: Sequence[int],
                                acc: Sequence[int], flag_lo: int, flag_hi: int,
                                work: Sequence[int],
                                controls: Sequence[int] = (),
                                qubit_count: int | None = None) -> Network:
    gates, checkpoints = multiplier_gates(c, n, reg, acc, flag_lo, flag_hi,
                                          work, controls)
    if qubit_count is None:
        qubit_count = 1 + max([*reg, *acc, flag_lo, flag_hi, *work, *controls])
    return Network(gates, qubit_count, checkpoints)


def build_modexp(params: ArithParams, layout: RegisterLayout) -> Network:
    """The full chain mapping ``|a>|0> -> |a>|x^a mod n>``.

    A NOT seeds the result register with 1, then each exponent bit drives a
    controlled multiplier by the precomputed factor ``x**(2**i) mod n``.
    Exponent wires are only ever used as controls.
    """
    bits = params.bits
    if len(layout.reg2) != bits or len(layout.mult_work) != bits + 1:
        raise ValueError("layout width does not match the modulus size")
    if len(layout.add_work) < bits + 3:
        raise ValueError("layout adder scratch is too narrow")
    acc = list(layout.mult_work)[:bits]
    flag_hi = layout.mult_work[bits]
    flag_lo = layout.modn_flag
    pieces = [Network([Gate((), layout.reg2.start)], layout.qubit_count)]
    for i, exp_wire in enumerate(layout.reg1):
        factor = pow(params.x, 1 << i, params.n)
        pieces.append(build_controlled_multiplier(
            factor, params.n, list(layout.reg2), acc, flag_lo, flag_hi,
            list(layout.add_work), controls=(exp_wire,),
            qubit_count=layout.qubit_count))
    return concatenate(pieces, layout.qubit_count)


def gate_count_formula(bits: int) -> int:
    """Polynomial estimate of the elementary-gate count of the full chain."""
    return 240 * bits**3 + 484 * bits**2 + 182 * bits


def resource_estimate(bits: int) -> ResourceReport:
    """Space and time requirements for factoring an ``bits``-bit number.

    The qubit total is 5L+8 with the wide (2L+1) exponent register.  The
    exact gate count comes from building the chain for the canonical
    instance n = 2**L - 1, x = 2; the polynomial estimate is reported
    alongside for comparison.  For L = 1 no valid instance exists, so only
    the formula values are filled in.
    """
    if bits < 1:
        raise ValueError("bit width must be positive")
    qubits = 5 * bits + 8
    exact = None
    if bits >= 2:
        n = (1 << bits) - 1
        params = ArithParams.create(n, 2, 1 << (2 * bits + 1))
        layout = RegisterLayout.for_factoring(bits, reg1_width=2 * bits + 1)
        exact = len(build_modexp(params, layout).gates)
    return ResourceReport(qubits, exact, gate_count_formula(bits))
