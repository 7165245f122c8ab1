"""State-vector simulator for the oracle query model.

The input register stays classical throughout (inter-query unitaries never
touch it), so a run simulates only the pointer/answer/workspace space: a
pointer of ceil(log2 n) qubits, one answer qubit, and r optional workspace
qubits.  The oracle permutes basis states by XOR-ing the addressed input bit
into the answer qubit; pointer values >= n act as the identity so the gate
stays unitary for every n.

Basis convention: qubit j is bit j of the basis index; qubits 0..p-1 hold the
pointer value, qubit p the answer bit, higher qubits the workspace.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .boolfunc import MAX_ARITY, RealFunction
from .fourier import MultilinearPoly, interpolate

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
MAX_WORKSPACE = 16
MAX_EXTRACT_ARITY = 12

GATE_KINDS = ("h", "x", "z", "phase", "cx", "reflect0", "perm", "matrix")

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class Registers:
    """Pointer + answer (+ workspace) register shape for inputs of arity n."""

    n: int
    r: int = 0

    def __post_init__(self):
        if not (1 <= self.n <= MAX_ARITY):
            raise ValueError(f"input arity {self.n} outside 1..{MAX_ARITY}")
        if not (0 <= self.r <= MAX_WORKSPACE):
            raise ValueError(f"workspace size {self.r} outside 0..{MAX_WORKSPACE}")

    @property
    def pointer_bits(self) -> int:
        return max(0, (self.n - 1).bit_length())

    @property
    def answer_qubit(self) -> int:
        return self.pointer_bits

    @property
    def num_qubits(self) -> int:
        return self.pointer_bits + 1 + self.r

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@dataclass(frozen=True, eq=False)
class Gate:
    """A named primitive on designated qubits.

    h/x/z apply per listed qubit; phase rotates |1> of one qubit; cx is
    (control, target); reflect0 negates every branch where the listed qubits
    are not all zero; perm/matrix act on the joint space of up to 3 qubits.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    perm: tuple[int, ...] | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits) or not self.qubits:
            raise ValueError("qubits must be nonempty and distinct")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be nonnegative")
        if self.kind == "phase":
            if len(self.qubits) != 1 or self.angle is None:
                raise ValueError("phase takes one qubit and an angle")
        if self.kind == "cx" and len(self.qubits) != 2:
            raise ValueError("cx takes (control, target)")
        if self.kind == "perm":
            if not 1 <= len(self.qubits) <= 3 or self.perm is None:
                raise ValueError("perm takes 1..3 qubits and a permutation")
            perm = tuple(int(p) for p in self.perm)
            if sorted(perm) != list(range(1 << len(self.qubits))):
                raise ValueError("perm is not a permutation of the block")
            object.__setattr__(self, "perm", perm)
        if self.kind == "matrix":
            if not 1 <= len(self.qubits) <= 3 or self.matrix is None:
                raise ValueError("matrix takes 1..3 qubits and a block")
            block = np.asarray(self.matrix, dtype=complex)
            side = 1 << len(self.qubits)
            if block.shape != (side, side):
                raise ValueError(f"matrix block must be {side}x{side}")
            defect = np.abs(block.conj().T @ block - np.eye(side)).max()
            if defect > UNITARY_TOL:
                raise ValueError(f"matrix block is not unitary (defect {defect:.2e})")
            block = block.copy()
            block.setflags(write=False)
            object.__setattr__(self, "matrix", block)


@dataclass(frozen=True, eq=False)
class QueryAlgorithm:
    """Gate layers U_0..U_T, with the oracle applied between layers."""

    regs: Registers
    layers: tuple[tuple[Gate, ...], ...]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("need at least the initial layer U_0")
        layers = tuple(tuple(layer) for layer in self.layers)
        for layer in layers:
            for gate in layer:
                if max(gate.qubits) >= self.regs.num_qubits:
                    raise ValueError(f"gate on qubit {max(gate.qubits)} exceeds "
                                     f"{self.regs.num_qubits} qubits")
        object.__setattr__(self, "layers", layers)

    @property
    def queries(self) -> int:
        return len(self.layers) - 1

    def layer_unitary(self, t: int) -> np.ndarray:
        """Dense matrix of layer t (small registers only; used by checks)."""
        dim = self.regs.dim
        mat = np.eye(dim, dtype=complex)
        for col in range(dim):
            state = np.zeros(dim, dtype=complex)
            state[col] = 1.0
            mat[:, col] = _apply_layer_unchecked(state, self.layers[t], self.regs.num_qubits)
        return mat


@dataclass(frozen=True)
class Measurement:
    """Readout of designated qubits; outcomes outside the valid set abstain."""

    output_qubits: tuple[int, ...]
    valid_outcomes: frozenset[int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "output_qubits", tuple(int(q) for q in self.output_qubits))
        if len(set(self.output_qubits)) != len(self.output_qubits):
            raise ValueError("output qubits must be distinct")
        if self.valid_outcomes is not None:
            object.__setattr__(self, "valid_outcomes", frozenset(int(y) for y in self.valid_outcomes))

    def outcome_of_basis(self, basis: int) -> int | None:
        y = 0
        for j, q in enumerate(self.output_qubits):
            y |= ((basis >> q) & 1) << j
        if self.valid_outcomes is not None and y not in self.valid_outcomes:
            return None
        return y


def zero_state(regs: Registers) -> np.ndarray:
    state = np.zeros(regs.dim, dtype=complex)
    state[0] = 1.0
    return state


def _check_norm(state: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > NORM_TOL:
        raise RuntimeError(f"state norm drifted to {norm}")
    return state


def _apply_single(state: np.ndarray, mat: np.ndarray, qubit: int) -> np.ndarray:
    idx = np.arange(state.size)
    lo = idx[(idx >> qubit) & 1 == 0]
    hi = lo | (1 << qubit)
    out = np.empty_like(state)
    out[lo] = mat[0, 0] * state[lo] + mat[0, 1] * state[hi]
    out[hi] = mat[1, 0] * state[lo] + mat[1, 1] * state[hi]
    return out


def _apply_block(state: np.ndarray, block: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    k = len(qubits)
    idx = np.arange(state.size)
    mask = 0
    for q in qubits:
        mask |= 1 << q
    rest = idx[(idx & mask) == 0]
    offsets = [sum(((a >> l) & 1) << qubits[l] for l in range(k)) for a in range(1 << k)]
    sub = np.vstack([state[rest | off] for off in offsets])
    new = block @ sub
    out = state.copy()
    for a, off in enumerate(offsets):
        out[rest | off] = new[a]
    return out


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    if gate.kind == "h":
        for q in gate.qubits:
            state = _apply_single(state, _H, q)
        return state
    if gate.kind == "x":
        idx = np.arange(state.size)
        for q in gate.qubits:
            state = state[idx ^ (1 << q)]
        return state
    if gate.kind == "z":
        out = state.copy()
        idx = np.arange(state.size)
        for q in gate.qubits:
            out[(idx >> q) & 1 == 1] *= -1.0
        return out
    if gate.kind == "phase":
        out = state.copy()
        idx = np.arange(state.size)
        out[(idx >> gate.qubits[0]) & 1 == 1] *= cmath.exp(1j * gate.angle)
        return out
    if gate.kind == "cx":
        control, target = gate.qubits
        idx = np.arange(state.size)
        src = np.where((idx >> control) & 1 == 1, idx ^ (1 << target), idx)
        return state[src]
    if gate.kind == "reflect0":
        mask = 0
        for q in gate.qubits:
            mask |= 1 << q
        out = state.copy()
        out[(np.arange(state.size) & mask) != 0] *= -1.0
        return out
    if gate.kind == "perm":
        side = 1 << len(gate.qubits)
        block = np.zeros((side, side), dtype=complex)
        for a, target in enumerate(gate.perm):
            block[target, a] = 1.0
        return _apply_block(state, block, gate.qubits)
    return _apply_block(state, gate.matrix, gate.qubits)


def _apply_layer_unchecked(state: np.ndarray, layer: tuple[Gate, ...], num_qubits: int) -> np.ndarray:
    for gate in layer:
        state = apply_gate(state, gate)
    return state


def oracle_apply(state: np.ndarray, x: int, regs: Registers) -> np.ndarray:
    """XOR the addressed input bit into the answer qubit, per basis branch."""
    if not 0 <= x < (1 << regs.n):
        raise ValueError(f"input {x} outside arity-{regs.n} range")
    if state.shape != (regs.dim,):
        raise ValueError(f"state dimension {state.shape} does not match {regs.dim}")
    idx = np.arange(regs.dim)
    ptr = idx & ((1 << regs.pointer_bits) - 1)
    bit = np.where(ptr < regs.n, (x >> ptr) & 1, 0)
    return state[idx ^ (bit << regs.answer_qubit)]


def run(alg: QueryAlgorithm, x: int, upto: int | None = None) -> np.ndarray:
    """State after layer U_t (t = upto, default all T queries) on input x."""
    t_end = alg.queries if upto is None else upto
    if not 0 <= t_end <= alg.queries:
        raise ValueError(f"query count {t_end} outside 0..{alg.queries}")
    state = zero_state(alg.regs)
    for gate in alg.layers[0]:
        state = _check_norm(apply_gate(state, gate))
    for t in range(1, t_end + 1):
        state = _check_norm(oracle_apply(state, x, alg.regs))
        for gate in alg.layers[t]:
            state = _check_norm(apply_gate(state, gate))
    return state


def outcome_distribution(state: np.ndarray, meas: Measurement) -> tuple[dict[int, float], float]:
    """(probability per outcome, abstain mass) for a measured state."""
    probs = np.abs(state) ** 2
    dist: dict[int, float] = {}
    abstain = 0.0
    for basis in range(state.size):
        y = meas.outcome_of_basis(basis)
        if y is None:
            abstain += float(probs[basis])
        else:
            dist[y] = dist.get(y, 0.0) + float(probs[basis])
    return dist, abstain


def acceptance_prob(alg: QueryAlgorithm, meas: Measurement, x: int, y: int) -> float:
    """Probability that outcome y is observed on input x."""
    dist, _ = outcome_distribution(run(alg, x), meas)
    return dist.get(y, 0.0)


# -- demonstration circuits --------------------------------------------------


def _require_power_of_two(n: int) -> int:
    if n < 2 or n & (n - 1):
        raise ValueError(f"n must be a power of 2 with n >= 2, got {n}")
    return n.bit_length() - 1


def build_example1(n: int) -> tuple[QueryAlgorithm, Measurement]:
    """One-query algorithm recovering the hidden mask of a parity-mask input.

    The answer qubit is prepared in (|0> - |1>)/sqrt(2); the query then turns
    the addressed bit into a sign on each pointer branch, and the pointer
    Hadamards collapse those signs to the mask value exactly.
    """
    k = _require_power_of_two(n)
    regs = Registers(n)
    pointers = tuple(range(k))
    ans = regs.answer_qubit
    prepare = (Gate("x", (ans,)), Gate("h", (ans,)), Gate("h", pointers))
    finish = (Gate("h", pointers), Gate("h", (ans,)), Gate("x", (ans,)))
    alg = QueryAlgorithm(regs, (prepare, finish))
    return alg, Measurement(pointers)


def build_grover(n: int, iterations: int = 1) -> tuple[QueryAlgorithm, Measurement]:
    """Grover search for the position of the single 1 in the input string."""
    k = _require_power_of_two(n)
    if iterations < 1:
        raise ValueError("need at least one iteration")
    regs = Registers(n)
    pointers = tuple(range(k))
    ans = regs.answer_qubit
    prepare = (Gate("x", (ans,)), Gate("h", (ans,)), Gate("h", pointers))
    diffusion = (Gate("h", pointers), Gate("reflect0", pointers), Gate("h", pointers))
    layers = [prepare] + [diffusion] * (iterations - 1)
    layers.append(diffusion + (Gate("h", (ans,)), Gate("x", (ans,))))
    alg = QueryAlgorithm(regs, tuple(layers))
    return alg, Measurement(pointers)


def one_hot_input(n: int, marked: int) -> int:
    """Input index whose only 1 sits at (0-based) position ``marked``."""
    if not 0 <= marked < n:
        raise ValueError(f"marked position {marked} outside 0..{n - 1}")
    return 1 << marked


# -- amplitude polynomials ----------------------------------------------------


def amplitude_table(alg: QueryAlgorithm, t: int) -> np.ndarray:
    """2^n x dim matrix of amplitudes after t queries, one row per input."""
    n = alg.regs.n
    if n > MAX_EXTRACT_ARITY:
        raise ValueError(f"exhaustive extraction capped at n <= {MAX_EXTRACT_ARITY}")
    table = np.empty((1 << n, alg.regs.dim), dtype=complex)
    for x in range(1 << n):
        table[x] = run(alg, x, upto=t)
    return table


def extract_amplitude_polys(alg: QueryAlgorithm, t: int,
                            zero_tol: float = 1e-8) -> list[tuple[MultilinearPoly, MultilinearPoly]]:
    """Per basis state, multilinear interpolants of the (re, im) amplitude parts."""
    table = amplitude_table(alg, t)
    n = alg.regs.n
    return [
        (interpolate(RealFunction(n, table[:, psi].real), zero_tol),
         interpolate(RealFunction(n, table[:, psi].imag), zero_tol))
        for psi in range(alg.regs.dim)
    ]


# -- serialization ------------------------------------------------------------


def circuit_to_json_dict(alg: QueryAlgorithm) -> dict:
    gates = []
    for t, layer in enumerate(alg.layers):
        for gate in layer:
            entry: dict = {"t": t, "kind": gate.kind, "qubits": list(gate.qubits)}
            if gate.angle is not None:
                entry["angle"] = gate.angle
            if gate.perm is not None:
                entry["perm"] = list(gate.perm)
            if gate.matrix is not None:
                entry["matrix"] = [[[z.real, z.imag] for z in row] for row in gate.matrix]
            gates.append(entry)
    return {"n": alg.regs.n, "r": alg.regs.r, "gates": gates}


def circuit_from_json_dict(doc: dict) -> QueryAlgorithm:
    for field_name in ("n", "r", "gates"):
        if field_name not in doc:
            raise ValueError(f"circuit JSON missing field {field_name!r}")
    regs = Registers(int(doc["n"]), int(doc["r"]))
    layered: dict[int, list[Gate]] = {}
    max_t = 0
    for pos, entry in enumerate(doc["gates"]):
        try:
            t = int(entry["t"])
            kind = entry["kind"]
            qubits = tuple(entry["qubits"])
            matrix = entry.get("matrix")
            if matrix is not None:
                matrix = np.array([[complex(re, im) for re, im in row] for row in matrix])
            gate = Gate(kind, qubits, angle=entry.get("angle"),
                        perm=tuple(entry["perm"]) if "perm" in entry else None,
                        matrix=matrix)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"gate {pos}: {exc}") from None
        if t < 0:
            raise ValueError(f"gate {pos}: negative layer index")
        layered.setdefault(t, []).append(gate)
        max_t = max(max_t, t)
    layers = tuple(tuple(layered.get(t, ())) for t in range(max_t + 1))
    return QueryAlgorithm(regs, layers)


def circuit_from_json(text: str) -> QueryAlgorithm:
    return circuit_from_json_dict(json.loads(text))


def measurement_from_json_dict(doc: dict) -> Measurement:
    if "output_qubits" not in doc:
        raise ValueError("measurement JSON missing field 'output_qubits'")
    valid = doc.get("valid_outcomes")
    return Measurement(tuple(doc["output_qubits"]),
                       frozenset(valid) if valid is not None else None)


def measurement_to_json_dict(meas: Measurement) -> dict:
    doc: dict = {"output_qubits": list(meas.output_qubits)}
    if meas.valid_outcomes is not None:
        doc["valid_outcomes"] = sorted(meas.valid_outcomes)
    return doc
