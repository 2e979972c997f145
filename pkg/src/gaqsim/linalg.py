"""Dense complex linear algebra and quantum-channel primitives.

Everything in here works on plain ``numpy`` arrays of ``complex128``.
Conventions used throughout the package:

* qubit 0 is the most significant bit of a basis-state index,
* system qubits come before ancillary qubits,
* superoperators act on column-vectorised density matrices,
  ``vec(rho)[i*d + j] = rho[i, j]``.
"""

from __future__ import annotations

import numpy as np

UNITARY_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10


class NonHermitianError(ValueError):
    """Input matrix fails the Hermiticity check."""


class NotUnitaryError(ValueError):
    """Input matrix fails the unitarity check."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible dimensions."""


class DuplicateTargetError(ValueError):
    """A qubit index appears more than once in an embedding target list."""


def as_rng(seed) -> np.random.Generator:
    """Return ``seed`` unchanged if it is already a Generator, else seed one.

    ``seed`` may be an int or a tuple of ints (a derived stream key).
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def fro_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def spectral_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def mat_norm(a: np.ndarray, norm: str = "fro") -> float:
    """Matrix norm dispatch; ``norm`` is ``"fro"`` or ``"spectral"``."""
    if norm == "fro":
        return fro_norm(a)
    if norm == "spectral":
        return spectral_norm(a)
    raise ValueError(f"unknown norm {norm!r}")


def is_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    return fro_norm(a - a.conj().T) < atol


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    d = u.shape[0]
    return fro_norm(u.conj().T @ u - np.eye(d)) < atol


def require_unitary(u: np.ndarray, what: str = "matrix") -> None:
    if not is_unitary(u):
        raise NotUnitaryError(f"{what} is not unitary to {UNITARY_ATOL:g}")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; index of the left factor is the most significant."""
    return np.kron(a, b)


def herm_expm(h: np.ndarray, scale: complex) -> np.ndarray:
    """exp(scale * h) for Hermitian h, via eigendecomposition.

    Exact (to eigensolver precision) for the dense, small matrices used
    here; unitary whenever ``scale`` is purely imaginary.

    Raises:
        NonHermitianError: if ``h`` is not Hermitian to 1e-10.
    """
    if not is_hermitian(h):
        raise NonHermitianError("herm_expm requires a Hermitian generator")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def embed_gate(u: np.ndarray, targets, num_qubits: int) -> np.ndarray:
    """Embed gate ``u`` acting on the listed qubits into a 2**num_qubits space.

    ``targets`` is an ordered list of qubit indices; ``u`` must act on
    ``2**len(targets)`` dimensions. All other qubits get the identity.
    """
    targets = list(targets)
    m = len(targets)
    if len(set(targets)) != m:
        raise DuplicateTargetError(f"duplicate target in {targets}")
    for t in targets:
        if not 0 <= t < num_qubits:
            raise IndexError(f"target {t} out of range for {num_qubits} qubits")
    if u.shape != (2**m, 2**m):
        raise DimensionMismatchError(
            f"gate of shape {u.shape} cannot act on {m} qubits"
        )
    rest = [q for q in range(num_qubits) if q not in targets]
    full = np.kron(u, np.eye(2 ** (num_qubits - m), dtype=complex))
    # Axis j of the reshaped tensor currently addresses qubit (targets+rest)[j];
    # transpose so axis j addresses qubit j.
    order = targets + rest
    perm = [order.index(q) for q in range(num_qubits)]
    tensor = full.reshape((2,) * (2 * num_qubits))
    tensor = tensor.transpose(perm + [num_qubits + p for p in perm])
    dim = 2**num_qubits
    return np.ascontiguousarray(tensor.reshape(dim, dim))


def basis_state(index: int, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def random_hermitian(dim: int, seed) -> np.ndarray:
    """GUE draw normalised to unit spectral norm; deterministic given seed."""
    rng = as_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (a + a.conj().T) / 2.0
    return h / spectral_norm(h)


class QuantumChannel:
    """A channel on a ``system_dim``-dimensional system.

    Stored either as a list of Kraus operators or as a superoperator
    matrix (``system_dim**2`` square); the superoperator form is derived
    lazily from Kraus operators as sum_m K_m (x) conj(K_m).
    """

    def __init__(self, system_dim: int, kraus=None, superop=None):
        if (kraus is None) == (superop is None):
            raise ValueError("provide exactly one of kraus= or superop=")
        self.system_dim = int(system_dim)
        if kraus is not None:
            kraus = np.asarray(kraus, dtype=complex)
            if kraus.ndim != 3 or kraus.shape[1:] != (system_dim, system_dim):
                raise DimensionMismatchError(
                    f"Kraus stack of shape {kraus.shape} does not match "
                    f"system_dim {system_dim}"
                )
            completeness = np.einsum("mij,mik->jk", kraus.conj(), kraus)
            if fro_norm(completeness - np.eye(system_dim)) >= UNITARY_ATOL:
                raise NotUnitaryError("Kraus operators are not trace preserving")
        else:
            superop = np.asarray(superop, dtype=complex)
            if superop.shape != (system_dim**2, system_dim**2):
                raise DimensionMismatchError(
                    f"superoperator of shape {superop.shape} does not match "
                    f"system_dim {system_dim}"
                )
        self.kraus = kraus
        self._superop = superop

    def superop(self) -> np.ndarray:
        if self._superop is None:
            k = self.kraus
            d = self.system_dim
            s = np.einsum("mij,mkl->ikjl", k, k.conj())
            self._superop = np.ascontiguousarray(s.reshape(d**2, d**2))
        return self._superop

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply the channel to a density matrix."""
        d = self.system_dim
        out = self.superop() @ rho.reshape(d**2)
        return out.reshape(d, d)


def superop_from_unitary(u: np.ndarray) -> QuantumChannel:
    """The unital channel U (x) conj(U) of a unitary; global-phase free."""
    require_unitary(u, "channel input")
    return QuantumChannel(u.shape[0], superop=np.kron(u, u.conj()))


def kraus_from_ancilla_circuit(v: np.ndarray, q: int, system_qubits: int = 2) -> QuantumChannel:
    """Channel on the first ``system_qubits`` qubits of a q-qubit unitary.

    Ancillary qubits (indices ``system_qubits``..q-1) start in |0> and are
    traced out: K_m = (I (x) <m|) v (I (x) |0...0>) for every ancilla basis
    state m.
    """
    ds = 2**system_qubits
    da = 2 ** (q - system_qubits)
    if v.shape != (ds * da, ds * da):
        raise DimensionMismatchError(
            f"circuit of shape {v.shape} does not act on {q} qubits"
        )
    blocks = v.reshape(ds, da, ds, da)
    kraus = np.ascontiguousarray(blocks[:, :, :, 0].transpose(1, 0, 2))
    return QuantumChannel(ds, kraus=kraus)


def channel_distance(e1: QuantumChannel, e2: QuantumChannel, norm: str = "fro") -> float:
    """Norm of the superoperator difference between two channels."""
    if e1.system_dim != e2.system_dim:
        raise DimensionMismatchError("channels act on different system dimensions")
    return mat_norm(e1.superop() - e2.superop(), norm)


def phase_aligned(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``w`` multiplied by the global phase that best matches ``u``."""
    tr = np.trace(u.conj().T @ w)
    if abs(tr) < 1e-300:
        return w
    return (tr.conjugate() / abs(tr)) * w


def phase_invariant_distance(u: np.ndarray, w: np.ndarray, norm: str = "fro") -> float:
    """min over a global phase of ||u - e^{i phi} w||.

    The optimal phase is the argument of tr(u^dagger w); for the Frobenius
    norm this is the exact minimiser.
    """
    return mat_norm(u - phase_aligned(u, w), norm)
