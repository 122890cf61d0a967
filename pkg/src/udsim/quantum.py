"""Small statevector simulation and GF(2) subspace algebra.

Supplies the substrate for the subspace-state copy-protection backend:
canonical (RREF) subspace representations, dual subspaces, the uniform
superposition |A> over a subspace, the n-qubit Hadamard transform, and
computational-basis measurement.  Capped at 16 qubits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge, NotNormalized

MAX_QUBITS = 16
_ATOL = 1e-9


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_2^n with a canonical RREF basis (tuple of bit tuples)."""

    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class Statevector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if abs(float(np.sum(np.abs(self.amplitudes) ** 2)) - 1.0) > _ATOL:
            raise NotNormalized("statevector norm differs from 1 beyond 1e-9")


def _rref(rows: list[list[int]], n: int) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon form over GF(2); returns the nonzero rows."""
    mat = [row[:] for row in rows]
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                mat[i] = [a ^ b for a, b in zip(mat[i], mat[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r])


def subspace_from_vectors(n: int, vectors: list[tuple[int, ...]]) -> Subspace:
    """Span of the given n-bit vectors, in canonical RREF."""
    if n < 1 or n > MAX_QUBITS:
        raise DimensionTooLarge(f"ambient dimension {n} outside 1..{MAX_QUBITS}")
    for v in vectors:
        if len(v) != n:
            raise DimensionMismatch(f"vector of length {len(v)}, ambient {n}")
    return Subspace(n, _rref([list(v) for v in vectors], n))


def dual_subspace(A: Subspace) -> Subspace:
    """A-perp = {y : x . y = 0 mod 2 for all x in A}; dim A + dim A-perp = n."""
    n = A.ambient_dim
    # Nullspace of the basis matrix: free columns parameterize the dual.
    rows = [list(r) for r in A.basis]
    pivots = [next(c for c in range(n) if row[c]) for row in rows]
    free = [c for c in range(n) if c not in pivots]
    duals = []
    for fc in free:
        y = [0] * n
        y[fc] = 1
        for row, pc in zip(rows, pivots):
            if row[fc]:
                y[pc] = 1
        duals.append(tuple(y))
    return subspace_from_vectors(n, duals)


def elements(A: Subspace):
    """All 2^dim elements of A, as bit tuples."""
    n = A.ambient_dim
    for mask in range(1 << A.dim):
        v = [0] * n
        for i in range(A.dim):
            if (mask >> i) & 1:
                v = [a ^ b for a, b in zip(v, A.basis[i])]
        yield tuple(v)


def _index(v: tuple[int, ...]) -> int:
    """Basis-state index of a bit tuple; first component is the MSB."""
    idx = 0
    for b in v:
        idx = (idx << 1) | b
    return idx


def subspace_state(A: Subspace) -> Statevector:
    """Uniform superposition over the elements of A."""
    n = A.ambient_dim
    if n > MAX_QUBITS:
        raise DimensionTooLarge(f"{n} qubits exceeds cap {MAX_QUBITS}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amp = 2.0 ** (-A.dim / 2)
    for v in elements(A):
        amps[_index(v)] = amp
    return Statevector(n, amps)


def hadamard_all(sv: Statevector) -> Statevector:
    """Apply H on every qubit (fast Walsh-Hadamard transform)."""
    amps = sv.amplitudes.copy()
    h = 1
    size = amps.size
    while h < size:
        amps = amps.reshape(-1, 2 * h)
        a = amps[:, :h].copy()
        b = amps[:, h:].copy()
        amps[:, :h] = a + b
        amps[:, h:] = a - b
        amps = amps.reshape(size)
        h *= 2
    amps = amps / np.sqrt(size)
    return Statevector(sv.num_qubits, amps)


def measure_computational(sv: Statevector, rng: random.Random) -> str:
    """Sample a basis state with Born probabilities; returns its bitstring."""
    probs = np.abs(sv.amplitudes) ** 2
    if abs(float(probs.sum()) - 1.0) > _ATOL:
        raise NotNormalized("cannot measure an unnormalized state")
    u = rng.random()
    acc = 0.0
    idx = probs.size - 1
    for i, p in enumerate(probs):
        acc += float(p)
        if u < acc:
            idx = i
            break
    return format(idx, f"0{sv.num_qubits}b")


def membership(A: Subspace, x) -> int:
    """1 iff x is in A; x is an n-bit string or tuple."""
    if isinstance(x, str):
        x = tuple(int(c) for c in x)
    if len(x) != A.ambient_dim:
        raise DimensionMismatch(f"vector of length {len(x)}, ambient {A.ambient_dim}")
    v = list(x)
    for row in A.basis:
        pc = next(c for c in range(A.ambient_dim) if row[c])
        if v[pc]:
            v = [a ^ b for a, b in zip(v, row)]
    return int(not any(v))


def fidelity(a: Statevector, b: Statevector) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def random_subspace(n: int, dim: int, rng: random.Random) -> Subspace:
    """Uniformly-keyed random subspace of the given dimension."""
    while True:
        vecs = [tuple(rng.getrandbits(1) for _ in range(n)) for _ in range(dim)]
        A = subspace_from_vectors(n, vecs)
        if A.dim == dim:
            return A


def serialize_subspace(A: Subspace) -> bytes:
    """n (1B) || dim (1B) || row-major packed basis bits."""
    bits = [b for row in A.basis for b in row]
    packed = bytearray((len(bits) + 7) // 8)
    for j, bit in enumerate(bits):
        if bit:
            packed[j // 8] |= 1 << (j % 8)
    return bytes([A.ambient_dim, A.dim]) + bytes(packed)


def deserialize_subspace(data: bytes) -> Subspace:
    n, dim = data[0], data[1]
    bits = []
    for j in range(n * dim):
        bits.append((data[2 + j // 8] >> (j % 8)) & 1)
    rows = [tuple(bits[i * n : (i + 1) * n]) for i in range(dim)]
    return subspace_from_vectors(n, rows)
