"""Dense truth-table representations of total and partial Boolean functions.

Everything downstream (transforms, metrics, LPs, the simulator) indexes the
cube through one fixed bijection: an input x = (x_1, ..., x_n) is stored at

    idx = sum_i x_i * 2**(i-1)

so x_1 is the least significant bit.  Bitstrings in text formats are written
x_1 first, i.e. character position i-1 holds x_i.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

MAX_ARITY = 24

CATALOG_NAMES = (
    "OR", "AND", "PARITY", "MAJ", "CONST0", "CONST1",
    "IDENTITY", "ADDRESS", "BV",
)


def index_of_bits(bits) -> int:
    """Pack a bit sequence (x_1, ..., x_n) into its table index."""
    idx = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit value {b!r} is not 0/1")
        idx |= int(b) << i
    return idx


def bits_of_index(idx: int, n: int) -> tuple[int, ...]:
    """Unpack a table index into (x_1, ..., x_n)."""
    return tuple((idx >> i) & 1 for i in range(n))


def bitstring_of_index(idx: int, n: int) -> str:
    """Render an index as a bitstring written x_1 first."""
    return "".join(str((idx >> i) & 1) for i in range(n))


def index_of_bitstring(s: str) -> int:
    """Parse a bitstring written x_1 first back into a table index."""
    for pos, ch in enumerate(s):
        if ch not in "01":
            raise ValueError(f"bad character {ch!r} at position {pos}")
    return index_of_bits(int(ch) for ch in s)


@dataclass(frozen=True, eq=False)
class RealFunction:
    """A real-valued function on {0,1}^n as a dense array of 2^n values."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if not (1 <= self.n <= MAX_ARITY):
            raise ValueError(f"arity {self.n} outside 1..{MAX_ARITY}")
        if values.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} values, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        return (isinstance(other, RealFunction) and self.n == other.n
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True, eq=False)
class BoolFunction:
    """A function {0,1}^n ⊇ A → {0,1}^m stored as dense tables.

    ``domain_mask[idx]`` marks membership of x in A; ``outputs[idx]`` holds
    the output value (an integer below 2^m) and is meaningful only where the
    mask is set.
    """

    n: int
    m: int
    domain_mask: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        if not (1 <= self.n <= MAX_ARITY):
            raise ValueError(f"input arity {self.n} outside 1..{MAX_ARITY}")
        if not (1 <= self.m <= self.n):
            raise ValueError(f"output arity {self.m} outside 1..{self.n}")
        size = 1 << self.n
        mask = np.asarray(self.domain_mask, dtype=bool)
        outs = np.asarray(self.outputs, dtype=np.int64)
        if mask.shape != (size,) or outs.shape != (size,):
            raise ValueError("tables must have exactly 2^n entries")
        if not mask.any():
            raise ValueError("domain is empty")
        if outs[mask].min(initial=0) < 0 or outs[mask].max(initial=0) >= (1 << self.m):
            raise ValueError("output value out of range for m bits")
        outs = outs.copy()
        outs[~mask] = 0  # canonical filler keeps serialization deterministic
        mask = mask.copy()
        mask.setflags(write=False)
        outs.setflags(write=False)
        object.__setattr__(self, "domain_mask", mask)
        object.__setattr__(self, "outputs", outs)

    def __eq__(self, other):
        return (isinstance(other, BoolFunction)
                and self.n == other.n and self.m == other.m
                and np.array_equal(self.domain_mask, other.domain_mask)
                and np.array_equal(self.outputs, other.outputs))

    @property
    def is_total(self) -> bool:
        return bool(self.domain_mask.all())

    @property
    def domain_size(self) -> int:
        return int(self.domain_mask.sum())

    def image(self) -> np.ndarray:
        """Sorted array of output values attained on A."""
        return np.unique(self.outputs[self.domain_mask])

    def value(self, idx: int) -> int:
        if not self.domain_mask[idx]:
            raise ValueError(f"function undefined at index {idx}")
        return int(self.outputs[idx])

    def as_real(self) -> RealFunction:
        """The 0/1 value table as a real function (total, single-output only)."""
        if self.m != 1 or not self.is_total:
            raise ValueError("as_real requires a total function with m=1")
        return RealFunction(self.n, self.outputs.astype(np.float64))

    # -- serialization ----------------------------------------------------

    def to_table_text(self) -> str:
        """2^n character truth table (total, m=1 only)."""
        if self.m != 1 or not self.is_total:
            raise ValueError("table text requires a total function with m=1")
        return "".join("01"[v] for v in self.outputs)

    def to_json_dict(self) -> dict:
        entries = [
            {"x": bitstring_of_index(idx, self.n),
             "y": bitstring_of_index(int(self.outputs[idx]), self.m)}
            for idx in range(1 << self.n) if self.domain_mask[idx]
        ]
        return {"n": self.n, "m": self.m, "entries": entries}

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def total_function(n: int, m: int, outputs) -> BoolFunction:
    """Build a total function from its dense output table."""
    return BoolFunction(n, m, np.ones(1 << n, dtype=bool), np.asarray(outputs))


def partial_function(n: int, m: int, points: dict[int, int]) -> BoolFunction:
    """Build a partial function from an {index: output} mapping."""
    mask = np.zeros(1 << n, dtype=bool)
    outs = np.zeros(1 << n, dtype=np.int64)
    for idx, y in points.items():
        mask[idx] = True
        outs[idx] = y
    return BoolFunction(n, m, mask, outs)


def indicator(f: BoolFunction, y: int) -> RealFunction:
    """0/1 table of the fiber f^{-1}(y); undefined points contribute 0."""
    hit = f.domain_mask & (f.outputs == y)
    if not hit.any():
        raise ValueError(f"empty fiber: {y} is not attained on the domain")
    return RealFunction(f.n, hit.astype(np.float64))


# -- catalog ---------------------------------------------------------------


def _popcounts(size: int) -> np.ndarray:
    return np.bitwise_count(np.arange(size, dtype=np.uint32)).astype(np.int64)


def _bv(n: int) -> BoolFunction:
    if n < 2 or n & (n - 1):
        raise ValueError(f"BV requires n a power of 2 with n >= 2, got {n}")
    k = n.bit_length() - 1
    points = {}
    for z in range(n):
        idx = 0
        for i in range(n):
            if ((i & z).bit_count()) & 1:
                idx |= 1 << i
        points[idx] = z
    if len(points) != n:
        raise AssertionError("mask-parity encoding must be injective")
    return partial_function(n, k, points)


def _address(n: int) -> BoolFunction:
    k = next((k for k in range(1, 5) if k + (1 << k) == n), None)
    if k is None:
        raise ValueError(f"ADDRESS requires n = k + 2^k (3, 6, 11, 20), got {n}")
    outs = np.zeros(1 << n, dtype=np.int64)
    for idx in range(1 << n):
        addr = idx & ((1 << k) - 1)
        outs[idx] = (idx >> (k + addr)) & 1
    return total_function(n, 1, outs)


def catalog(name: str, n: int) -> BoolFunction:
    """One of the standard test functions, by name."""
    key = name.upper()
    if key not in CATALOG_NAMES:
        raise ValueError(f"unknown catalog function {name!r}; "
                         f"choose from {', '.join(CATALOG_NAMES)}")
    if not (1 <= n <= MAX_ARITY):
        raise ValueError(f"arity {n} outside 1..{MAX_ARITY}")
    size = 1 << n
    pc = _popcounts(size)
    if key == "OR":
        return total_function(n, 1, (pc > 0).astype(np.int64))
    if key == "AND":
        return total_function(n, 1, (pc == n).astype(np.int64))
    if key == "PARITY":
        return total_function(n, 1, (pc & 1).astype(np.int64))
    if key == "MAJ":
        return total_function(n, 1, (2 * pc > n).astype(np.int64))
    if key == "CONST0":
        return total_function(n, 1, np.zeros(size, dtype=np.int64))
    if key == "CONST1":
        return total_function(n, 1, np.ones(size, dtype=np.int64))
    if key == "IDENTITY":
        return total_function(n, n, np.arange(size, dtype=np.int64))
    if key == "ADDRESS":
        return _address(n)
    return _bv(n)


# -- parsing ---------------------------------------------------------------


def _parse_json_function(text: str) -> BoolFunction:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValueError("JSON function must be an object")
    for field_name in ("n", "m", "entries"):
        if field_name not in doc:
            raise ValueError(f"JSON function missing field {field_name!r}")
    n, m = doc["n"], doc["m"]
    if not isinstance(n, int) or not isinstance(m, int):
        raise ValueError("n and m must be integers")
    points: dict[int, int] = {}
    for pos, entry in enumerate(doc["entries"]):
        if not isinstance(entry, dict) or "x" not in entry or "y" not in entry:
            raise ValueError(f"entry {pos} must be an object with 'x' and 'y'")
        xs, ys = entry["x"], entry["y"]
        if len(xs) != n:
            raise ValueError(f"entry {pos}: 'x' must have {n} bits, got {len(xs)}")
        if len(ys) != m:
            raise ValueError(f"entry {pos}: 'y' must have {m} bits, got {len(ys)}")
        try:
            idx = index_of_bitstring(xs)
            y = index_of_bitstring(ys)
        except ValueError as exc:
            raise ValueError(f"entry {pos}: {exc}") from None
        if idx in points:
            raise ValueError(f"entry {pos}: duplicate input {xs!r}")
        points[idx] = y
    return partial_function(n, m, points)


def parse_truth_table(text: str) -> BoolFunction:
    """Parse a 2^n-character 0/1 table or the JSON partial-function format."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return _parse_json_function(stripped)
    length = len(stripped)
    if length < 2 or length & (length - 1):
        raise ValueError(f"table length {length} is not a power of two (>= 2)")
    for pos, ch in enumerate(stripped):
        if ch not in "01":
            raise ValueError(f"bad character {ch!r} at position {pos}")
    n = length.bit_length() - 1
    return total_function(n, 1, np.frombuffer(stripped.encode(), dtype=np.uint8) - ord("0"))
