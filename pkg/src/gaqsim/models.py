"""Spin-chain Hamiltonians, exact and Trotterized evolutions, block decomposition.

Open-chain Ising and Heisenberg models with a transverse field:

    H_ising      = J sum_<i,i+1> sz_i sz_{i+1} + B sum_i sx_i
    H_heisenberg = J sum_<i,i+1> (sx sx + sy sy + sz sz) + B sum_i sx_i

The chain is cut into ``alpha = ceil((N-1)/(k-1))`` blocks of (up to) k
adjacent qubits; block j starts at qubit j*(k-1). Every bond belongs to
exactly one block, each qubit's field term is attached to the block owning
the bond it is the left end of, and the last block also carries the final
qubit's field, so that sum_j embed(H_j) = H exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import herm_expm, kron
from .gates import IDENTITY, PAULIS

MODELS = ("ising", "heisenberg")
MAX_SPINS = 12


@dataclass(frozen=True)
class ModelSpec:
    model: str
    n_spins: int
    coupling: float  # J
    field: float  # B

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.n_spins < 2:
            raise ValueError("need at least 2 spins")


@dataclass(frozen=True)
class TrotterPlan:
    time: float
    steps: int  # l
    block_size: int = 2  # k

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.block_size < 2:
            raise ValueError("block_size must be >= 2")

    def num_blocks(self, n_spins: int) -> int:
        if self.block_size > n_spins:
            raise ValueError("block_size exceeds chain length")
        return math.ceil((n_spins - 1) / (self.block_size - 1))


@dataclass(frozen=True)
class Block:
    """One local piece of the chain: qubits [start, start+width)."""

    start: int
    width: int
    hamiltonian: np.ndarray  # 2**width square, local indices


def _pauli_on(gamma: str, i: int, n: int) -> np.ndarray:
    op = np.array([[1.0]], dtype=complex)
    for q in range(n):
        op = kron(op, PAULIS[gamma] if q == i else IDENTITY)
    return op


def _bond_term(model: str, i: int, j: int, n: int) -> np.ndarray:
    if model == "ising":
        return _pauli_on("z", i, n) @ _pauli_on("z", j, n)
    term = np.zeros((2**n, 2**n), dtype=complex)
    for gamma in "xyz":
        term += _pauli_on(gamma, i, n) @ _pauli_on(gamma, j, n)
    return term


def build_hamiltonian(spec: ModelSpec, max_spins: int = MAX_SPINS) -> np.ndarray:
    """Dense 2**N Hamiltonian of the chain."""
    n = spec.n_spins
    if n > max_spins:
        raise ValueError(f"{n} spins exceed the dense-matrix cap of {max_spins}")
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n - 1):
        h += spec.coupling * _bond_term(spec.model, i, i + 1, n)
    for i in range(n):
        h += spec.field * _pauli_on("x", i, n)
    return h


def chain_blocks(spec: ModelSpec, plan: TrotterPlan) -> list[Block]:
    """The local block Hamiltonians whose embedded sum equals H."""
    n, k = spec.n_spins, plan.block_size
    alpha = plan.num_blocks(n)
    blocks = []
    for j in range(alpha):
        start = j * (k - 1)
        width = min(k, n - start)
        h = np.zeros((2**width, 2**width), dtype=complex)
        for b in range(width - 1):
            h += spec.coupling * _bond_term(spec.model, b, b + 1, width)
            h += spec.field * _pauli_on("x", b, width)
        if j == alpha - 1:
            h += spec.field * _pauli_on("x", width - 1, width)
        blocks.append(Block(start=start, width=width, hamiltonian=h))
    return blocks


def embed_block(op: np.ndarray, block: Block, n_spins: int) -> np.ndarray:
    """Pad a local block operator with identities on both sides."""
    left = np.eye(2**block.start, dtype=complex)
    right = np.eye(2 ** (n_spins - block.start - block.width), dtype=complex)
    return kron(kron(left, op), right)


def block_targets(spec: ModelSpec, plan: TrotterPlan) -> list[np.ndarray]:
    """The per-block step unitaries U_j = exp(-i H_j t / l)."""
    dt = plan.time / plan.steps
    return [herm_expm(b.hamiltonian, -1j * dt) for b in chain_blocks(spec, plan)]


def step_from_block_unitaries(unitaries, blocks, n_spins: int) -> np.ndarray:
    """One step of the blocked evolution; block 0 acts first in time."""
    dim = 2**n_spins
    step = np.eye(dim, dtype=complex)
    for u, b in zip(unitaries, blocks):
        step = embed_block(u, b, n_spins) @ step
    return step


def exact_evolution(spec: ModelSpec, t: float) -> np.ndarray:
    """U = exp(-i H t)."""
    return herm_expm(build_hamiltonian(spec), -1j * t)


def trotter_evolution(spec: ModelSpec, plan: TrotterPlan) -> np.ndarray:
    """Blocked first-order Trotter approximation (product of block steps)**l."""
    blocks = chain_blocks(spec, plan)
    step = step_from_block_unitaries(block_targets(spec, plan), blocks, spec.n_spins)
    return np.linalg.matrix_power(step, plan.steps)


def reference_gate_counts(model: str, n_spins: int) -> tuple[int, int]:
    """(CPHASE, single-qubit) gate counts per Trotter step for the standard
    nearest-neighbour decomposition of each model."""
    if n_spins < 2:
        raise ValueError("need at least 2 spins")
    if model == "ising":
        return (n_spins - 1, 3 * n_spins - 2)
    if model == "heisenberg":
        return (3 * (n_spins - 1), 11 * n_spins - 6)
    raise ValueError(f"model must be one of {MODELS}, got {model!r}")
