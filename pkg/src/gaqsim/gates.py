"""Ideal gate library and the imperfect-CNOT generator.

Single-qubit rotations R_g(theta) = exp(-i theta sigma_g / 2), the
controlled-PHASE family diag(1,1,1,e^{i phi}), CNOT, and imperfect CNOTs
obtained by perturbing the CNOT generator with a random Hermitian matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .linalg import (
    QuantumChannel,
    as_rng,
    channel_distance,
    herm_expm,
    random_hermitian,
    superop_from_unitary,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

PAULIS = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def rotation(axis: str, theta: float) -> np.ndarray:
    """R_axis(theta) = exp(-i theta sigma_axis / 2)."""
    sigma = PAULIS[axis]
    return np.cos(theta / 2) * IDENTITY - 1j * np.sin(theta / 2) * sigma


def cphase(phi: float) -> np.ndarray:
    """Controlled-PHASE diag(1, 1, 1, e^{i phi}); cphase(pi) is CZ."""
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * phi)]).astype(complex)


def cnot() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )


def cnot_hamiltonian() -> np.ndarray:
    """Generator H with CNOT = exp(i pi/2 H) up to a global phase.

    H = [(1 + sigma_z) (x) 1 + (1 - sigma_z) (x) sigma_x] / 2: identity on
    the control-|0> block, sigma_x on the control-|1> block.
    """
    return (
        np.kron(IDENTITY + SIGMA_Z, IDENTITY) + np.kron(IDENTITY - SIGMA_Z, SIGMA_X)
    ) / 2.0


def cnot_channel() -> QuantumChannel:
    return superop_from_unitary(cnot())


@dataclass(frozen=True)
class ImperfectGate:
    """A 4x4 unitary W = exp(i(pi/2 H_cnot + delta H_R)) with its channel error.

    ``eta`` is the distance between the channel of W and the ideal CNOT
    channel; it is 0 exactly when delta is 0.
    """

    matrix: np.ndarray
    delta: float
    seed: tuple
    eta: float

    def channel(self) -> QuantumChannel:
        return superop_from_unitary(self.matrix)


def _seed_tuple(seed) -> tuple:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def imperfect_cnot(delta: float, seed, norm: str = "fro") -> ImperfectGate:
    """Draw one imperfect CNOT.

    The perturbation delta * H_R sits inside the anti-Hermitian exponent so
    the gate stays exactly unitary; H_R is a GUE draw with unit spectral
    norm, deterministic given the seed.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    seed = _seed_tuple(seed)
    h_r = random_hermitian(4, seed)
    generator = (np.pi / 2) * cnot_hamiltonian() + delta * h_r
    w = herm_expm(generator, 1j)
    eta = channel_distance(superop_from_unitary(w), cnot_channel(), norm)
    return ImperfectGate(matrix=w, delta=float(delta), seed=seed, eta=eta)


def draw_gate_set(n: int, delta: float, seed, norm: str = "fro") -> list[ImperfectGate]:
    """n imperfect CNOTs with independent perturbations, one derived seed each."""
    base = _seed_tuple(seed)
    return [imperfect_cnot(delta, base + (k,), norm) for k in range(n)]


def gate_set_to_json(gates: list[ImperfectGate], q: int | None = None) -> str:
    """Serialise a gate set so an experiment is replayable bit-exactly."""
    doc = {
        "n": len(gates),
        "q": q,
        "delta": gates[0].delta if gates else 0.0,
        "gates": [{"seed": list(g.seed), "delta": g.delta, "eta": g.eta} for g in gates],
    }
    return json.dumps(doc, indent=2)


def gate_set_from_json(text: str, norm: str = "fro") -> list[ImperfectGate]:
    doc = json.loads(text)
    return [imperfect_cnot(g["delta"], tuple(g["seed"]), norm) for g in doc["gates"]]


def eta_batch(deltas: np.ndarray, h_rs: np.ndarray, norm: str = "fro") -> np.ndarray:
    """Channel errors for a batch of perturbed CNOTs.

    ``h_rs`` has shape (..., 4, 4); ``deltas`` broadcasts against its
    leading axes. Vectorised equivalent of imperfect_cnot(...).eta, used by
    the delta calibration sweep.
    """
    deltas = np.asarray(deltas, dtype=float)
    gen = (np.pi / 2) * cnot_hamiltonian() + deltas[..., None, None] * h_rs
    w_eig, v = np.linalg.eigh(gen)
    w = (v * np.exp(1j * w_eig)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    superops = np.einsum("...ij,...kl->...ikjl", w, w.conj())
    shape = superops.shape[:-4] + (16, 16)
    diff = superops.reshape(shape) - cnot_channel().superop()
    if norm == "fro":
        return np.linalg.norm(diff, axis=(-2, -1))
    return np.linalg.norm(diff, ord=2, axis=(-2, -1))
