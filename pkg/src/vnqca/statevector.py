"""Dense statevector simulation with bit-indexed gate kernels.

Qubit k corresponds to bit k of the amplitude index.  The site-to-qubit map
is the position in the (row-major sorted) site list handed to
``init_product_state``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .errors import ConfigError, SimulationCapError, VerificationError
from .lattice import Site
from .rules import InputStateParams, rotation_matrix

DENSE_QUBIT_CAP = 28


@dataclass
class StateVector:
    n: int
    psi: np.ndarray  # 2^n complex amplitudes
    site_map: dict[Site, int]

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi))

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.psi.copy(), dict(self.site_map))


def init_product_state(delta: InputStateParams, sites: list[Site]) -> StateVector:
    """Every site carries V(delta)|0>."""
    n = len(sites)
    if n > DENSE_QUBIT_CAP:
        raise SimulationCapError(
            f"{n} qubits exceed the dense cap of {DENSE_QUBIT_CAP}"
        )
    v = rotation_matrix(delta.delta)[:, 0]
    psi = np.array([1.0 + 0.0j])
    for _ in range(n):
        psi = np.kron(v, psi)
    return StateVector(n=n, psi=psi, site_map={z: k for k, z in enumerate(sites)})


def _apply_1q(psi: np.ndarray, n: int, k: int, u: np.ndarray):
    view = psi.reshape(-1, 2, 2**k)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    view[:, 1, :] = u[1, 0] * a + u[1, 1] * b


def _axes_view(psi: np.ndarray, n: int, j: int, k: int):
    """Reshape so the two qubit axes j > k are explicit."""
    hi, lo = max(j, k), min(j, k)
    return psi.reshape(-1, 2, 2 ** (hi - lo - 1), 2, 2**lo)


def _apply_cphase(psi: np.ndarray, n: int, j: int, k: int, phi: float):
    view = _axes_view(psi, n, j, k)
    view[:, 1, :, 1, :] *= np.exp(1j * phi)


def _apply_swap(psi: np.ndarray, n: int, j: int, k: int):
    view = _axes_view(psi, n, j, k)
    tmp = view[:, 0, :, 1, :].copy()
    view[:, 0, :, 1, :] = view[:, 1, :, 0, :]
    view[:, 1, :, 0, :] = tmp


def _apply_block(psi: np.ndarray, n: int, qubits: list[int], u: np.ndarray
                 ) -> np.ndarray:
    m = len(qubits)
    t = psi.reshape((2,) * n)
    # axis of qubit k is n-1-k; gate bit a (least significant) is its last axis
    axes = [n - 1 - q for q in qubits]
    ut = u.reshape((2,) * (2 * m))
    # ut axes: row bits (msb..lsb) then col bits (msb..lsb)
    t = np.tensordot(ut, t, axes=(list(range(2 * m - 1, m - 1, -1)), axes))
    # tensordot put the row-bit axes first, msb..lsb; move them back
    t = np.moveaxis(t, list(range(m)), axes[::-1])
    return np.ascontiguousarray(t).reshape(-1)


def apply_gate(state: StateVector, gate: Gate):
    n = state.n
    try:
        qubits = [state.site_map[z] for z in gate.sites]
    except KeyError as exc:
        raise ConfigError(f"gate site {exc.args[0]} not in the state") from exc
    if gate.kind == "rotation":
        _apply_1q(state.psi, n, qubits[0], rotation_matrix(gate.theta))
    elif gate.kind == "cphase":
        _apply_cphase(state.psi, n, qubits[0], qubits[1], gate.phi)
    elif gate.kind == "swap":
        _apply_swap(state.psi, n, qubits[0], qubits[1])
    elif gate.kind == "block":
        # gate bit a corresponds to gate.sites[a]; tensordot wants msb-first
        state.psi = _apply_block(state.psi, n, qubits, gate.matrix)
    else:  # pragma: no cover
        raise ConfigError(f"unknown gate kind {gate.kind}")


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    for layer in circuit.layers:
        for gate in layer:
            apply_gate(state, gate)
    return state


@dataclass
class DensityMatrix2:
    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (2, 2):
            raise ConfigError("DensityMatrix2 must be 2x2")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise VerificationError("density matrix not Hermitian to 1e-12")
        if abs(m.trace().real - 1.0) > 1e-12:
            raise VerificationError("density matrix trace differs from 1")
        self.mat = m

    def eigenvalues(self) -> tuple[float, float]:
        """Closed-form eigenvalues of the 2x2 Hermitian trace-1 matrix."""
        det = float(np.linalg.det(self.mat).real)
        disc = max(1.0 - 4.0 * det, 0.0)
        r = math.sqrt(disc) / 2.0
        return (0.5 - r, 0.5 + r)


def reduced_density(state: StateVector, site: Site) -> DensityMatrix2:
    """Partial trace onto one site."""
    if site not in state.site_map:
        raise ConfigError(f"site {site} not in the state")
    k = state.site_map[site]
    a = np.moveaxis(state.psi.reshape(-1, 2, 2**k), 1, 0).reshape(2, -1)
    return DensityMatrix2(a @ a.conj().T)


def reduced_density_region(state: StateVector, sites: list[Site]) -> np.ndarray:
    """Dense reduced density matrix on a small set of sites (test helper).

    Row/column bit k of the result corresponds to sites[k].
    """
    qubits = [state.site_map[z] for z in sites]
    m = len(qubits)
    if m > 12:
        raise SimulationCapError("region partial trace limited to 12 qubits")
    t = state.psi.reshape((2,) * state.n)
    axes = [state.n - 1 - q for q in qubits]
    rest = [ax for ax in range(state.n) if ax not in axes]
    t = np.transpose(t, axes + rest)  # kept axes msb-first w.r.t. result bits?
    # axes[j] corresponds to sites[j]; make sites[0] the least significant bit
    t = t.reshape((2,) * m + (-1,))
    t = np.transpose(t, list(range(m - 1, -1, -1)) + [m])
    a = t.reshape(2**m, -1)
    return a @ a.conj().T


def entropy(rho: DensityMatrix2) -> float:
    """Von Neumann entropy in bits with eigenvalue clamping."""
    out = 0.0
    for p in rho.eigenvalues():
        if p < -1e-10 or p > 1 + 1e-10:
            raise VerificationError(f"eigenvalue {p} outside [0,1] beyond tolerance")
        p = min(max(p, 0.0), 1.0)
        if p > 0.0:
            out -= p * math.log2(p)
    return out


def entropy_of_probs(probs) -> float:
    out = 0.0
    for p in probs:
        p = min(max(float(p), 0.0), 1.0)
        if p > 0.0:
            out -= p * math.log2(p)
    return out
