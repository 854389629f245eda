"""Reversible circuits on topographic qubit maps.

One qubit per value; its ``|1>`` amplitude is the value's membership.  Every
gate used here (X, CNOT, CCNOT, SWAP, CSWAP) permutes computational basis
states, so crisp sets can be pushed through a circuit by plain bit replay
(:func:`simulate_basis`) while fuzzy inputs need the dense state vector
(:func:`simulate_statevector`).

Qubit 0 is the most significant bit of a basis index and the leftmost
character of a bitstring.
"""
from __future__ import annotations

import math
import shlex
from dataclasses import dataclass, field
from functools import cached_property
from collections.abc import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .functions import FiniteFunction, FunctionError
from .state import AmplitudeVector, Basis, BasisMapOperator, store

STATEVECTOR_CAP = 20

ARITY = {"X": 1, "CNOT": 2, "SWAP": 2, "CCNOT": 3, "CSWAP": 3}

INPUT_MAP, ANCILLA_0, ANCILLA_1 = "input-map", "ancilla-0", "ancilla-1"
OUTPUT_MAP, GARBAGE, PASSTHROUGH = "output-map", "garbage", "passthrough"
INPUT_ROLES = (INPUT_MAP, ANCILLA_0, ANCILLA_1)
OUTPUT_ROLES = (OUTPUT_MAP, GARBAGE, PASSTHROUGH)


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """``qubits`` lists controls first, then targets."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ARITY:
            raise CircuitError(f"unknown gate {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != ARITY[self.kind]:
            raise CircuitError(f"{self.kind} takes {ARITY[self.kind]} qubits, got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind} on repeated qubits {self.qubits}")

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.qubits)])


def X(t: int) -> Gate:
    return Gate("X", (t,))


def CNOT(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def CCNOT(c1: int, c2: int, t: int) -> Gate:
    return Gate("CCNOT", (c1, c2, t))


def SWAP(a: int, b: int) -> Gate:
    return Gate("SWAP", (a, b))


def CSWAP(c: int, a: int, b: int) -> Gate:
    return Gate("CSWAP", (c, a, b))


@dataclass(frozen=True)
class GateCircuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.num_qubits for q in g.qubits):
                raise CircuitError(f"gate {g} addresses a qubit outside 0..{self.num_qubits - 1}")

    def inverse(self) -> "GateCircuit":
        # every gate in the set is its own inverse
        return GateCircuit(self.num_qubits, tuple(reversed(self.gates)))

    def then(self, other: "GateCircuit") -> "GateCircuit":
        q = max(self.num_qubits, other.num_qubits)
        return GateCircuit(q, self.gates + other.gates)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class RegisterLayout:
    """Input and output role of every qubit.

    Input roles partition the qubits into input-map / ancilla-0 / ancilla-1;
    output roles into output-map / garbage / passthrough.  Input-map qubits
    carry ``(argument, domain label)``; output-map qubits carry the codomain
    label they stand for.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    in_labels: tuple[tuple[int, str] | None, ...]
    out_labels: tuple[str | None, ...]
    codomain: tuple[str, ...] = ()
    arguments: tuple[tuple[str, ...], ...] = field(default=())

    def __post_init__(self):
        q = len(self.inputs)
        if not (len(self.outputs) == len(self.in_labels) == len(self.out_labels) == q):
            raise CircuitError("layout fields must have one entry per qubit")
        for r in self.inputs:
            if r not in INPUT_ROLES:
                raise CircuitError(f"bad input role {r!r}")
        for r in self.outputs:
            if r not in OUTPUT_ROLES:
                raise CircuitError(f"bad output role {r!r}")

    @property
    def num_qubits(self) -> int:
        return len(self.inputs)

    def count(self, role: str) -> int:
        return sum(1 for r in self.inputs + self.outputs if r == role)

    def input_qubits(self, arg: int = 0) -> list[int]:
        """Input-map qubits of one argument, in domain order."""
        labels = self.arguments[arg]
        where = {lab: q for q, il in enumerate(self.in_labels) if il is not None and il[0] == arg
                 for lab in [il[1]]}
        return [where[lab] for lab in labels]

    @cached_property
    def output_qubits(self) -> list[int]:
        """Output-map qubit per codomain ordinal."""
        where = {lab: q for q, (r, lab) in enumerate(zip(self.outputs, self.out_labels)) if r == OUTPUT_MAP}
        return [where[lab] for lab in self.codomain]

    def initial_values(self, *maps: Sequence[float]) -> list[float]:
        """Per-qubit membership values: argument maps, then ancilla constants."""
        if len(maps) != len(self.arguments):
            raise CircuitError(f"circuit takes {len(self.arguments)} input map(s), got {len(maps)}")
        vals = [0.0] * self.num_qubits
        for q, r in enumerate(self.inputs):
            if r == ANCILLA_1:
                vals[q] = 1.0
        for a, mp in enumerate(maps):
            qs = self.input_qubits(a)
            if len(mp) != len(qs):
                raise CircuitError(f"argument {a} has {len(qs)} values, input map has {len(mp)}")
            for q, v in zip(qs, mp):
                vals[q] = float(v)
        return vals

    def initial_bits(self, *sets: Iterable[int]) -> str:
        maps = []
        for a, s in enumerate(sets):
            s = set(s)
            maps.append([1.0 if j in s else 0.0 for j in range(len(self.arguments[a]))])
        return "".join("1" if v == 1.0 else "0" for v in self.initial_values(*maps))

    def read_set(self, bits: str) -> set[int]:
        return {i for i, q in enumerate(self.output_qubits) if bits[q] == "1"}


@dataclass(frozen=True)
class MembershipVector:
    """Crisp or fuzzy membership ``m_j`` per grid location."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(not 0.0 <= v <= 1.0 for v in vals):
            raise ValueError("membership values must lie in [0, 1]")
        object.__setattr__(self, "values", vals)

    @classmethod
    def crisp(cls, members: Iterable[int], n: int) -> "MembershipVector":
        s = set(members)
        return cls(tuple(1.0 if j in s else 0.0 for j in range(n)))

    @property
    def is_crisp(self) -> bool:
        return all(v in (0.0, 1.0) for v in self.values)

    def members(self) -> set[int]:
        return {j for j, v in enumerate(self.values) if v > 0}

    def qubit(self, j: int) -> np.ndarray:
        m = self.values[j]
        return np.array([math.sqrt(1.0 - m * m), m])

    def __len__(self) -> int:
        return len(self.values)


# --- simulation -------------------------------------------------------------


def _bits(inp: str | Sequence[int], q: int) -> list[int]:
    bits = [int(b) for b in inp]
    if len(bits) != q:
        raise CircuitError(f"input has {len(bits)} bits, circuit has {q} qubits")
    if any(b not in (0, 1) for b in bits):
        raise CircuitError("bitstring may only hold 0 and 1")
    return bits


def simulate_basis(c: GateCircuit, inp: str | Sequence[int]) -> str:
    """Exact classical replay of a basis state."""
    b = _bits(inp, c.num_qubits)
    for g in c.gates:
        q = g.qubits
        if g.kind == "X":
            b[q[0]] ^= 1
        elif g.kind == "CNOT":
            b[q[1]] ^= b[q[0]]
        elif g.kind == "CCNOT":
            b[q[2]] ^= b[q[0]] & b[q[1]]
        elif g.kind == "SWAP":
            b[q[0]], b[q[1]] = b[q[1]], b[q[0]]
        elif b[q[0]]:  # CSWAP
            b[q[1]], b[q[2]] = b[q[2]], b[q[1]]
    return "".join(map(str, b))


def basis_permutation(c: GateCircuit, cap: int = STATEVECTOR_CAP) -> np.ndarray:
    """``perm[i]`` is the basis index that basis index ``i`` is sent to."""
    nq = c.num_qubits
    if nq > cap:
        raise CircuitError(f"{nq} qubits exceeds the state-vector cap of {cap}")
    idx = np.arange(1 << nq, dtype=np.int64)

    def bit(q):
        return (idx >> (nq - 1 - q)) & 1

    def mask(q):
        return np.int64(1) << (nq - 1 - q)

    for g in c.gates:
        q = g.qubits
        if g.kind == "X":
            idx = idx ^ mask(q[0])
        elif g.kind == "CNOT":
            idx = idx ^ (bit(q[0]) * mask(q[1]))
        elif g.kind == "CCNOT":
            idx = idx ^ ((bit(q[0]) & bit(q[1])) * mask(q[2]))
        else:
            a, b = (q[0], q[1]) if g.kind == "SWAP" else (q[1], q[2])
            differ = bit(a) ^ bit(b)
            if g.kind == "CSWAP":
                differ = differ & bit(q[0])
            idx = idx ^ (differ * (mask(a) | mask(b)))
    return idx


class QubitBasis(Basis):
    """Computational basis of ``q`` qubits with bitstring labels built on demand."""

    __slots__ = ("num_qubits",)

    def __init__(self, num_qubits: int):  # noqa: super().__init__ would materialise 2**q labels
        self.num_qubits = num_qubits
        self.factors = ()
        self.extra = frozenset()
        self.ordinals = np.arange(1 << num_qubits, dtype=np.int64)
        self._index = None
        self.labels = _LazyBitstrings(num_qubits)

    def index(self, label: str) -> int:
        if len(label) != self.num_qubits:
            raise CircuitError(f"bitstring {label!r} is not {self.num_qubits} bits")
        return int(label, 2) if self.num_qubits else 0

    def __eq__(self, other):
        return isinstance(other, QubitBasis) and other.num_qubits == self.num_qubits

    def __hash__(self):
        return hash(("qubits", self.num_qubits))


class _LazyBitstrings(Sequence):
    def __init__(self, q: int):
        self.q = q

    def __len__(self):
        return 1 << self.q

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        return format(i, f"0{self.q}b") if self.q else ""

    def __eq__(self, other):
        if isinstance(other, _LazyBitstrings):
            return other.q == self.q
        return list(self) == list(other)

    def __hash__(self):
        return hash(self.q)


def product_state(values: Sequence[float]) -> np.ndarray:
    state = np.ones(1, dtype=complex)
    for m in values:
        if not 0.0 <= m <= 1.0:
            raise ValueError("membership values must lie in [0, 1]")
        state = np.kron(state, [math.sqrt(1.0 - m * m), m])
    return state


def simulate_statevector(
    c: GateCircuit,
    inputs: Sequence[float] | MembershipVector,
    cap: int = STATEVECTOR_CAP,
) -> AmplitudeVector:
    """Dense state-vector run from the product of per-qubit membership states."""
    if c.num_qubits > cap:
        raise CircuitError(f"{c.num_qubits} qubits exceeds the state-vector cap of {cap}")
    vals = inputs.values if isinstance(inputs, MembershipVector) else tuple(inputs)
    if len(vals) != c.num_qubits:
        raise CircuitError(f"{len(vals)} membership values for {c.num_qubits} qubits")
    psi = product_state(vals)
    out = np.zeros_like(psi)
    out[basis_permutation(c, cap)] = psi
    return AmplitudeVector(QubitBasis(c.num_qubits), out)


def qubit_probability(v: AmplitudeVector, q: int) -> float:
    """Probability of reading ``|1>`` on qubit ``q``."""
    nq = v.basis.num_qubits
    idx = np.arange(len(v.amplitudes))
    sel = ((idx >> (nq - 1 - q)) & 1) == 1
    return float(np.sum(np.abs(v.amplitudes[sel]) ** 2))


def circuit_operator(c: GateCircuit, cap: int = STATEVECTOR_CAP) -> BasisMapOperator:
    """Permutation matrix of a circuit on its ``2**q`` basis states."""
    perm = basis_permutation(c, cap)
    size = len(perm)
    mat = sp.coo_matrix((np.ones(size), (perm, np.arange(size))), shape=(size, size))
    basis = QubitBasis(c.num_qubits)
    return BasisMapOperator(basis, basis, store(mat), name="circuit")


# --- constructions --------------------------------------------------------


def or2_circuit(q1: int, q2: int, anc: int, num_qubits: int | None = None) -> GateCircuit:
    """OR of ``q1, q2`` into ``anc`` (which must start in ``|1>``); inputs end negated."""
    if len({q1, q2, anc}) != 3:
        raise CircuitError(f"OR2 needs three distinct qubits, got {(q1, q2, anc)}")
    q = num_qubits if num_qubits is not None else max(q1, q2, anc) + 1
    return GateCircuit(q, (X(q1), X(q2), CCNOT(q1, q2, anc)))


def _or_gates(inputs: Sequence[int], ancs: Sequence[int]) -> tuple[list[Gate], int, list[int]]:
    """Left-fold cascade; returns gates, result qubit and garbage qubits."""
    gates: list[Gate] = []
    garbage: list[int] = []
    acc = inputs[0]
    for q, a in zip(inputs[1:], ancs):
        gates += [X(acc), X(q), CCNOT(acc, q, a)]
        garbage += [acc, q]
        acc = a
    return gates, acc, garbage


def orn_circuit(inputs: Sequence[int], ancs: Sequence[int], num_qubits: int | None = None) -> GateCircuit:
    if not inputs:
        raise CircuitError("OR needs at least one input")
    if len(ancs) != len(inputs) - 1:
        raise CircuitError(f"OR of {len(inputs)} inputs needs {len(inputs) - 1} ancillae, got {len(ancs)}")
    if len(set(inputs) | set(ancs)) != len(inputs) + len(ancs):
        raise CircuitError("OR qubits must be distinct")
    q = num_qubits if num_qubits is not None else max([*inputs, *ancs]) + 1
    gates, _, _ = _or_gates(inputs, ancs)
    return GateCircuit(q, gates)


@dataclass
class _MapWiring:
    gates: list[Gate]
    outputs: list[int]  # wire per codomain ordinal
    garbage: list[int]
    zeros: list[int]
    ones: list[int]


def _wire_map(f: FiniteFunction, dom_wires: Sequence[int], first_free: int) -> _MapWiring:
    """Route domain wires to codomain wires: pass singletons, OR the rest.

    Ancilla-0 wires (one per non-range value) come first, then the
    ancilla-1 wires for the OR cascades.
    """
    zeros = list(range(first_free, first_free + f.m_nr))
    n_ones = sum(k - 1 for k in f.multiplicities if k > 1)
    ones = list(range(first_free + f.m_nr, first_free + f.m_nr + n_ones))
    z_iter, o_iter = iter(zeros), iter(ones)
    gates: list[Gate] = []
    outputs: list[int] = []
    garbage: list[int] = []
    for i in range(f.m):
        pre = f.preimages[i]
        if not pre:
            outputs.append(next(z_iter))
        elif len(pre) == 1:
            outputs.append(dom_wires[pre[0]])
        else:
            anc = [next(o_iter) for _ in pre[1:]]
            g, res, junk = _or_gates([dom_wires[j] for j in pre], anc)
            gates += g
            garbage += junk
            outputs.append(res)
    return _MapWiring(gates, outputs, garbage, zeros, ones)


def _layout(q: int, args: list[tuple[list[int], tuple[str, ...]]], zeros, ones, outputs, codomain,
            garbage, passthrough=()) -> RegisterLayout:
    inputs = [None] * q
    in_labels: list = [None] * q
    for a, (wires, labels) in enumerate(args):
        for w, lab in zip(wires, labels):
            inputs[w] = INPUT_MAP
            in_labels[w] = (a, lab)
    for w in zeros:
        inputs[w] = ANCILLA_0
    for w in ones:
        inputs[w] = ANCILLA_1
    outs = [None] * q
    out_labels: list = [None] * q
    for w, lab in zip(outputs, codomain):
        outs[w] = OUTPUT_MAP
        out_labels[w] = lab
    for w in garbage:
        outs[w] = GARBAGE
    for w in passthrough:
        outs[w] = PASSTHROUGH
        out_labels[w] = in_labels[w][1] if in_labels[w] else None
    if None in inputs or None in outs:
        raise AssertionError("layout roles do not cover every qubit")
    return RegisterLayout(tuple(inputs), tuple(outs), tuple(in_labels), tuple(out_labels),
                          codomain=tuple(codomain), arguments=tuple(lab for _, lab in args))


def unary_map_circuit(f: FiniteFunction) -> tuple[GateCircuit, RegisterLayout]:
    """Circuit computing ``f`` on qubit maps; ``2n_n + n_b + m_nr - m_n`` qubits."""
    if f.is_binary:
        raise FunctionError("two-argument table: use binary_map_circuit")
    if f.n != f.m:
        raise FunctionError(
            f"qubit-map construction needs |domain| == |codomain| (got {f.n} and {f.m}); pad the smaller space with pad_square"
        )
    dom = list(range(f.n))
    w = _wire_map(f, dom, f.n)
    q = f.n + len(w.zeros) + len(w.ones)
    layout = _layout(q, [(dom, f.domain)], w.zeros, w.ones, w.outputs, f.codomain, w.garbage)
    return GateCircuit(q, w.gates), layout


def outer_product_circuit(n: int, labels: Sequence[str] | None = None) -> tuple[GateCircuit, RegisterLayout]:
    """``n**2`` Toffolis writing ``a_j AND b_k`` into pair qubit ``2n + j*n + k``."""
    if n < 1:
        raise CircuitError("outer product needs n >= 1")
    labels = tuple(labels) if labels is not None else tuple(str(j) for j in range(n))
    a, b = list(range(n)), list(range(n, 2 * n))
    pairs = [2 * n + j * n + k for j in range(n) for k in range(n)]
    gates = [CCNOT(a[j], b[k], 2 * n + j * n + k) for j in range(n) for k in range(n)]
    pair_labels = [f"{x}⊗{y}" for x in labels for y in labels]
    layout = _layout(2 * n + n * n, [(a, labels), (b, labels)], pairs, [], pairs, pair_labels, [], a + b)
    return GateCircuit(2 * n + n * n, gates), layout


def binary_map_circuit(f: FiniteFunction) -> tuple[GateCircuit, RegisterLayout]:
    """Outer product followed by the map wiring on the pair qubits.

    ``2n**2 + n + 2 m_nr`` qubits: 2n arguments, ``n**2 + m_nr`` ancilla-0,
    ``n**2 - n + m_nr`` ancilla-1.
    """
    if not f.is_binary:
        raise FunctionError("binary_map_circuit needs a two-argument table")
    n = len(f.arguments)
    if f.m != n:
        raise FunctionError(f"arguments and result must share one grid size (got {n} and {f.m})")
    op, _ = outer_product_circuit(n)
    pairs = list(range(2 * n, 2 * n + n * n))
    w = _wire_map(f, pairs, 2 * n + n * n)
    q = 2 * n + n * n + len(w.zeros) + len(w.ones)
    args = [(list(range(n)), f.arguments), (list(range(n, 2 * n)), f.arguments)]
    garbage = w.garbage + [p for p in pairs if p not in w.outputs and p not in w.garbage]
    layout = _layout(q, args, pairs + w.zeros, w.ones, w.outputs, f.codomain, garbage, list(range(2 * n)))
    return GateCircuit(q, list(op.gates) + w.gates), layout


def demux_circuit(m_bits: int) -> tuple[GateCircuit, RegisterLayout]:
    """Fredkin tree routing a ``|1>`` token to map position ``k`` (binary register, MSB first)."""
    if m_bits < 1:
        raise CircuitError("demux needs at least one address bit")
    n = 1 << m_bits
    q = m_bits + n
    gates = []
    for level in range(m_bits):
        width = 1 << level
        ctrl = m_bits - 1 - level  # weight 2**level
        for p in range(width):
            gates.append(CSWAP(ctrl, m_bits + p, m_bits + p + width))
    bits = list(range(m_bits))
    mapq = list(range(m_bits, q))
    layout = _layout(q, [(bits, tuple(f"b{i}" for i in bits))], mapq[1:], mapq[:1], mapq,
                     tuple(str(k) for k in range(n)), [], bits)
    return GateCircuit(q, gates), layout


def copy_crisp_map(n: int) -> GateCircuit:
    """CNOT fan-out of qubits ``0..n-1`` onto fresh ``|0>`` qubits ``n..2n-1``."""
    return GateCircuit(2 * n, tuple(CNOT(j, n + j) for j in range(n)))


# --- text format ------------------------------------------------------------


def _q(label: str) -> str:
    return shlex.quote(label)


def export_gates(c: GateCircuit, layout: RegisterLayout | None = None) -> str:
    lines = [f"qubits,{c.num_qubits}"]
    lines += [str(g) for g in c.gates]
    if layout is not None:
        if layout.codomain:
            lines.append("# codomain " + " ".join(_q(s) for s in layout.codomain))
        for a, labels in enumerate(layout.arguments):
            lines.append(f"# argument {a} " + " ".join(_q(s) for s in labels))
        for i, (r, il) in enumerate(zip(layout.inputs, layout.in_labels)):
            tail = f" {il[0]} {_q(il[1])}" if il is not None else ""
            lines.append(f"# input {i} {r}{tail}")
        for i, (r, lab) in enumerate(zip(layout.outputs, layout.out_labels)):
            tail = f" {_q(lab)}" if r == OUTPUT_MAP else ""
            lines.append(f"# role {i} {r}{tail}")
    return "\n".join(lines) + "\n"


def parse_gates(text: str) -> tuple[GateCircuit, RegisterLayout | None]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("qubits,"):
        raise CircuitError("circuit file must start with 'qubits,<q>'")
    try:
        q = int(lines[0].split(",", 1)[1])
    except ValueError:
        raise CircuitError(f"bad qubit count line {lines[0]!r}") from None
    gates = []
    codomain: list[str] = []
    arguments: dict[int, list[str]] = {}
    inputs: dict[int, tuple[str, tuple[int, str] | None]] = {}
    outputs: dict[int, tuple[str, str | None]] = {}
    for ln in lines[1:]:
        if ln.startswith("#"):
            parts = shlex.split(ln[1:])
            if not parts:
                continue
            tag = parts[0]
            if tag == "codomain":
                codomain = parts[1:]
            elif tag == "argument":
                arguments[int(parts[1])] = parts[2:]
            elif tag == "input":
                il = (int(parts[3]), parts[4]) if len(parts) > 3 else None
                inputs[int(parts[1])] = (parts[2], il)
            elif tag == "role":
                outputs[int(parts[1])] = (parts[2], parts[3] if len(parts) > 3 else None)
            continue
        kind, *qs = ln.split()
        try:
            gates.append(Gate(kind, tuple(int(x) for x in qs)))
        except ValueError as exc:
            raise CircuitError(f"bad gate line {ln!r}: {exc}") from None
    circuit = GateCircuit(q, gates)
    if not inputs and not outputs:
        return circuit, None
    if set(inputs) != set(range(q)) or set(outputs) != set(range(q)):
        raise CircuitError("layout comments must give an input and an output role for every qubit")
    out_labels = []
    for i in range(q):
        r, lab = outputs[i]
        if r == PASSTHROUGH and inputs[i][1] is not None:
            lab = inputs[i][1][1]
        out_labels.append(lab)
    layout = RegisterLayout(
        tuple(inputs[i][0] for i in range(q)),
        tuple(outputs[i][0] for i in range(q)),
        tuple(inputs[i][1] for i in range(q)),
        tuple(out_labels),
        codomain=tuple(codomain),
        arguments=tuple(tuple(arguments[a]) for a in sorted(arguments)),
    )
    return circuit, layout
