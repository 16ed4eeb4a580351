"""Measurement-based computation with Z2-linear classical control (l2-MBQC).

Bit vectors are little-endian: input ``i`` and output ``o`` are integers
whose bit ``k`` is the ``k``-th coordinate.  Resource measurement outcomes
``"0"``/``"1"`` are read as bits 0/1, and setting bit ``q_j`` selects
the second measurement of party ``j`` on the (n,2,2) scenario.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .empirical import EmpiricalModel, deterministic_model
from .errors import (InvalidModel, ResourceScenarioMismatch, SizeLimitExceeded,
                     WidthMismatch)
from .fraction import noncontextual_fraction
from .scenario import bell_scenario

#: Guard on l*(m+1), the log2 of the number of affine maps searched.
NU_TILDE_LIMIT = 20


def _z2(matrix, rows, cols, name):
    arr = np.asarray(matrix, dtype=np.int64)
    if arr.size == 0 and rows * cols == 0:
        arr = np.zeros((rows, cols), dtype=np.int64)
    if arr.shape != (rows, cols):
        raise InvalidModel(f"{name} must be {rows}x{cols}, got shape {arr.shape}")
    if np.any((arr != 0) & (arr != 1)):
        raise InvalidModel(f"{name} must have 0/1 entries")
    return arr.astype(np.uint8)


@dataclass(frozen=True, eq=False)
class L2MBQC:
    """Classical control (Q, T, Z) plus a resource model on the (n,2,2) scenario.

    Settings are ``q = Q i + T s`` and the output is ``o = Z s`` (mod 2).
    ``T`` must be strictly lower triangular so that ``q_j`` depends only on
    outcomes already observed.
    """

    m: int
    l: int
    n: int
    Q: np.ndarray
    T: np.ndarray
    Z: np.ndarray
    resource: EmpiricalModel

    def __post_init__(self):
        if min(self.m, self.l, self.n) < 0 or self.n < 1:
            raise InvalidModel("widths must be nonnegative and n >= 1")
        object.__setattr__(self, "Q", _z2(self.Q, self.n, self.m, "Q"))
        object.__setattr__(self, "T", _z2(self.T, self.n, self.n, "T"))
        object.__setattr__(self, "Z", _z2(self.Z, self.l, self.n, "Z"))
        if np.any(np.triu(self.T)):
            raise InvalidModel("T must be strictly lower triangular")
        if self.resource.scenario != bell_scenario(self.n, 2, 2):
            raise ResourceScenarioMismatch(
                f"resource must live on the ({self.n},2,2) scenario with outcomes '0','1'")


@dataclass(frozen=True)
class BooleanFunctionTable:
    """Explicit truth table of f: 2^m -> 2^l; ``values[i]`` is f(i) as an integer."""

    m: int
    l: int
    values: tuple

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if len(values) != 2**self.m:
            raise InvalidModel(f"truth table needs {2**self.m} entries, got {len(values)}")
        if any(not 0 <= v < 2**self.l for v in values):
            raise InvalidModel(f"values must lie in [0, 2^{self.l})")
        object.__setattr__(self, "values", values)

    def __call__(self, i: int) -> int:
        return self.values[i]

    @classmethod
    def from_hex(cls, text: str, m: int, l: int) -> "BooleanFunctionTable":
        """Entry ``i`` occupies bits ``i*l .. i*l + l - 1`` of the hex number (OR is ``e``)."""
        number = int(text, 16)
        if number >> (l * 2**m):
            raise InvalidModel("hex truth table has bits beyond 2^m entries")
        mask = 2**l - 1
        return cls(m, l, tuple((number >> (i * l)) & mask for i in range(2**m)))

    def to_hex(self) -> str:
        return format(sum(v << (i * self.l) for i, v in enumerate(self.values)), "x")

    @classmethod
    def from_function(cls, fn, m: int, l: int) -> "BooleanFunctionTable":
        return cls(m, l, tuple(fn(i) for i in range(2**m)))


def bits(x: int, width: int) -> np.ndarray:
    return np.array([(x >> k) & 1 for k in range(width)], dtype=np.uint8)


def from_bits(vec) -> int:
    return int(sum(int(b) << k for k, b in enumerate(vec)))


def run_distribution(K: L2MBQC, i: int) -> np.ndarray:
    """Exact output distribution over 2^l for input ``i`` (enumerates all 2^n outcome strings)."""
    if not 0 <= i < 2**K.m:
        raise WidthMismatch(f"input {i} does not fit in {K.m} bits")
    qi = (K.Q.astype(np.int64) @ bits(i, K.m)) % 2
    exact = K.resource.exact
    dist = np.empty(2**K.l, dtype=object) if exact else np.zeros(2**K.l)
    if exact:
        dist[:] = Fraction(0)
    n = K.n
    for s in itertools.product((0, 1), repeat=n):
        s_vec = np.array(s, dtype=np.int64)
        q = (qi + K.T.astype(np.int64) @ s_vec) % 2  # row j only sees s_<j
        context = int("".join(map(str, q)), 2)
        p = K.resource.tables[context][int("".join(map(str, s)), 2)]
        if p:
            o = (K.Z.astype(np.int64) @ s_vec) % 2
            dist[from_bits(o)] += p
    return dist


def average_success(K: L2MBQC, f: BooleanFunctionTable):
    """2^-m sum_i P(output = f(i) | input i)."""
    if (f.m, f.l) != (K.m, K.l):
        raise WidthMismatch(f"function is {f.m}->{f.l} bits, computation is {K.m}->{K.l}")
    total = sum(run_distribution(K, i)[f(i)] for i in range(2**K.m))
    return total / 2**K.m if K.resource.exact else float(total) / 2**K.m


def distance(f: BooleanFunctionTable, g: BooleanFunctionTable) -> Fraction:
    """Fraction of inputs on which f and g differ."""
    return Fraction(sum(a != b for a, b in zip(f.values, g.values)), 2**f.m)


def _linear_parts(m, l):
    # every l x m matrix as the list of its column images, evaluated on all inputs
    cols = np.array(list(itertools.product(range(2**l), repeat=m)), dtype=np.int64).reshape(-1, m)
    values = np.zeros((cols.shape[0], 2**m), dtype=np.int64)
    for i in range(2**m):
        for k in range(m):
            if (i >> k) & 1:
                values[:, i] ^= cols[:, k]
    return values


def nu_tilde(f: BooleanFunctionTable, homogeneous: bool = False, method: str = "auto") -> Fraction:
    """Distance from ``f`` to the nearest affine map i -> A i + c.

    With ``homogeneous`` only linear maps (c = 0) are considered.  For a
    single output bit the Walsh-Hadamard spectrum gives the answer directly;
    ``method="brute"`` forces enumeration of every map.
    """
    if f.l * (f.m + 1) > NU_TILDE_LIMIT:
        raise SizeLimitExceeded(f"l(m+1) = {f.l * (f.m + 1)} exceeds {NU_TILDE_LIMIT}")
    size = 2**f.m
    if f.l == 0:
        return Fraction(0)
    if method == "auto" and f.l == 1:
        signs = np.array([1 - 2 * v for v in f.values], dtype=np.int64)
        walsh = _walsh_hadamard(signs)
        best = int(walsh.max() if homogeneous else np.abs(walsh).max())
        return Fraction(size - best, 2 * size)
    target = np.array(f.values, dtype=np.int64)
    linear = _linear_parts(f.m, f.l)
    offsets = [0] if homogeneous else range(2**f.l)
    best = size
    for c in offsets:
        agree = np.count_nonzero((linear ^ c) == target, axis=1)
        best = min(best, size - int(agree.max()))
    return Fraction(best, size)


def _walsh_hadamard(vec: np.ndarray) -> np.ndarray:
    out = vec.copy()
    h = 1
    while h < out.size:
        out = out.reshape(-1, 2, h)
        out = np.stack([out[:, 0] + out[:, 1], out[:, 0] - out[:, 1]], axis=1).reshape(-1)
        h *= 2
    return out


def is_affine(f: BooleanFunctionTable) -> bool:
    """Whether f(i) = A i + c for some Z2 matrix A and vector c."""
    c = f(0)
    cols = [f(1 << k) ^ c for k in range(f.m)]
    for i in range(2**f.m):
        expect = c
        for k in range(f.m):
            if (i >> k) & 1:
                expect ^= cols[k]
        if f(i) != expect:
            return False
    return True


def induced_function(K: L2MBQC) -> BooleanFunctionTable:
    """Input-output map of a computation whose resource is deterministic."""
    values = []
    for i in range(2**K.m):
        dist = run_distribution(K, i)
        hits = [o for o, p in enumerate(dist) if p > 1 - 1e-9]
        if len(hits) != 1:
            raise InvalidModel("resource does not yield a deterministic computation")
        values.append(hits[0])
    return BooleanFunctionTable(K.m, K.l, tuple(values))


def with_resource(K: L2MBQC, resource: EmpiricalModel) -> L2MBQC:
    return L2MBQC(K.m, K.l, K.n, K.Q, K.T, K.Z, resource)


def deterministic_resource(n: int, g) -> EmpiricalModel:
    """delta_g on the (n,2,2) scenario; ``g`` lists outcomes for a1, a2, b1, b2, ..."""
    return deterministic_model(bell_scenario(n, 2, 2), [str(int(x)) for x in g])


def or_gadget(resource: EmpiricalModel) -> L2MBQC:
    """Three-party computation of OR(i1, i2) from GHZ(3) with X/Y settings."""
    return L2MBQC(2, 1, 3, [[1, 0], [0, 1], [1, 1]], np.zeros((3, 3), dtype=int),
                  [[1, 1, 1]], resource)


OR = BooleanFunctionTable(2, 1, (0, 1, 1, 1))


@dataclass
class MBQCBoundReport:
    success: object
    failure: object
    ncf: object
    nu_tilde: Fraction
    tol: float = 1e-6

    @property
    def bound(self):
        return self.ncf * self.nu_tilde if not isinstance(self.ncf, float) \
            else self.ncf * float(self.nu_tilde)

    @property
    def slack(self):
        return self.failure - self.bound

    @property
    def holds(self) -> bool:
        return float(self.slack) >= -self.tol

    def to_dict(self) -> dict:
        return {"p_success": float(self.success), "p_failure": float(self.failure),
                "ncf": float(self.ncf), "nu_tilde": float(self.nu_tilde),
                "bound": float(self.bound), "slack": float(self.slack), "holds": self.holds}


def check_mbqc_bound(K: L2MBQC, f: BooleanFunctionTable, homogeneous: bool = False,
                   backend: str | None = None) -> MBQCBoundReport:
    """Average failure against NCF(resource) * nu_tilde(f)."""
    success = average_success(K, f)
    ncf = noncontextual_fraction(K.resource, backend).ncf
    if isinstance(success, float) or isinstance(ncf, float):
        success, ncf = float(success), float(ncf)
    return MBQCBoundReport(success, 1 - success, ncf, nu_tilde(f, homogeneous))
