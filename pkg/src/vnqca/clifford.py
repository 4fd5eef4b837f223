"""Stabilizer fast path for Clifford rules.

Paulis are stored as per-site (x, z) bits with a global power-of-i phase:
P = i^phase * prod_site X^x Z^z (X factors left of Z within a site).  The
conjugation tables for rotation gates are derived numerically once per angle
triple, so any multiple-of-pi/2 rotation works without hand-written cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .errors import ConfigError, VerificationError
from .lattice import Site, von_neumann_neighborhood
from .rules import InputStateParams, RuleParams, is_clifford, rotation_matrix

_PAULI_1Q = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),  # X
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),  # Z
    (1, 1): np.array([[0, 1], [1, 0]], dtype=complex)
    @ np.array([[1, 0], [0, -1]], dtype=complex),  # XZ = -iY
}


def _match_pauli_1q(m: np.ndarray):
    """Identify m as i^p X^x Z^z or raise."""
    for (x, z), basis in _PAULI_1Q.items():
        for p in range(4):
            if np.abs(m - (1j**p) * basis).max() < 1e-9:
                return p, x, z
    raise VerificationError("matrix is not a Pauli: non-Clifford conjugation")


def clifford_1q_tables(u: np.ndarray, heisenberg: bool):
    """Images of X and Z under conjugation by u.

    heisenberg=True gives u! P u (rule propagation); False gives u P u!
    (Schroedinger tableau evolution).  Returns ((pX,xX,zX), (pZ,xZ,zZ)).
    """
    conj = (lambda p: u.conj().T @ p @ u) if heisenberg else (lambda p: u @ p @ u.conj().T)
    return _match_pauli_1q(conj(_PAULI_1Q[(1, 0)])), _match_pauli_1q(conj(_PAULI_1Q[(0, 1)]))


@dataclass
class PauliString:
    """Sparse multi-site Pauli with phase exponent in Z_4 (powers of i)."""

    phase: int = 0
    bits: dict[Site, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        self.phase %= 4
        self.bits = {z: b for z, b in self.bits.items() if b != (0, 0)}

    def support(self) -> list[Site]:
        return sorted(self.bits)

    def mul_site(self, site: Site, x2: int, z2: int, phase2: int = 0):
        """Right-multiply by i^phase2 X^x2 Z^z2 at one site."""
        x1, z1 = self.bits.get(site, (0, 0))
        self.phase = (self.phase + phase2 + 2 * z1 * x2) % 4
        new = ((x1 ^ x2), (z1 ^ z2))
        if new == (0, 0):
            self.bits.pop(site, None)
        else:
            self.bits[site] = new

    def matrix(self, region: list[Site]) -> np.ndarray:
        from .rules import kron_chain

        factors = [_PAULI_1Q[self.bits.get(z, (0, 0))] for z in region]
        return (1j**self.phase) * kron_chain(factors)

    @classmethod
    def sigma(cls, j: int, site: Site) -> "PauliString":
        bits, phase = {1: ((1, 0), 0), 2: ((1, 1), 1), 3: ((0, 1), 0)}[j]
        return cls(phase=phase, bits={site: bits})


def _near(a: float, b: float, tol: float = 1e-9) -> bool:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d) < tol


def propagate_pauli(params: RuleParams, p: PauliString, t: int) -> PauliString:
    """t-fold Heisenberg application of a Clifford local rule to a Pauli."""
    if not is_clifford(params):
        raise ConfigError("propagate_pauli needs Clifford parameters")
    s = params.s
    nbrs = von_neumann_neighborhood(s)[1:]
    tx, tz = clifford_1q_tables(rotation_matrix(params.theta), heisenberg=True)
    cz_axes = [i for i in range(s) if _near(params.phi[i], math.pi)] if params.kind == "cphase" else []
    cur = PauliString(p.phase, dict(p.bits))
    for _ in range(t):
        if params.kind == "shift":
            moved = {
                tuple(a + c for a, c in zip(site, params.shift)): b
                for site, b in cur.bits.items()
            }
            mid = PauliString(cur.phase, moved)
        else:
            # entangler conjugation, rebuilt as an ordered product so that the
            # Z dressings merge into the string with the correct signs
            mid = PauliString(cur.phase, {})
            for site in sorted(cur.bits):
                x, z = cur.bits[site]
                mid.mul_site(site, x, z)
                if x:
                    for j, y in enumerate(nbrs):
                        if j // 2 in cz_axes:
                            mid.mul_site(tuple(a + c for a, c in zip(site, y)), 0, 1)
        out = PauliString(mid.phase, {})
        for site in sorted(mid.bits):
            x, z = mid.bits[site]
            _apply_rot(out, site, x, z, tx, tz)
        cur = out
    return cur


def _apply_rot(out: PauliString, site: Site, x: int, z: int, tx, tz):
    """Multiply the image of X^x Z^z under the rotation table onto out."""
    px, xx, zx = tx
    pz, xz, zz = tz
    if x:
        out.mul_site(site, xx, zx, px)
    if z:
        out.mul_site(site, xz, zz, pz)


# ---------------------------------------------------------------------------
# Stabilizer tableau
# ---------------------------------------------------------------------------


@dataclass
class StabilizerTableau:
    sites: tuple[Site, ...]
    x: np.ndarray  # (g, n) uint8
    z: np.ndarray
    phase: np.ndarray  # (g,) int8, power of i (even for Hermitian generators)

    @property
    def n(self) -> int:
        return len(self.sites)

    def qubit(self, site: Site) -> int:
        return self.sites.index(site)

    @classmethod
    def product_state(cls, delta: InputStateParams, sites: list[Site]
                      ) -> "StabilizerTableau":
        """Stabilizers of the site-wise V(delta)|0> state (Clifford delta)."""
        v = rotation_matrix(delta.delta)
        # the image of Z under v . v! stabilizes v|0>
        pz, xz, zz = clifford_1q_tables(v, heisenberg=False)[1]
        n = len(sites)
        x = np.zeros((n, n), dtype=np.uint8)
        z = np.zeros((n, n), dtype=np.uint8)
        ph = np.zeros(n, dtype=np.int8)
        for k in range(n):
            x[k, k] = xz
            z[k, k] = zz
            ph[k] = pz % 4
        return cls(tuple(sites), x, z, ph)

    def check(self, tol_none=None):
        """Generators must commute pairwise and be independent over GF(2)."""
        g = self.x.shape[0]
        sym = (self.x @ self.z.T + self.z @ self.x.T) % 2
        if np.any(sym != np.diag(np.diag(sym))):
            raise VerificationError("stabilizer generators do not commute")
        m = np.concatenate([self.x, self.z], axis=1).astype(np.uint8)
        if gf2_rank(m) != g:
            raise VerificationError("stabilizer generators are dependent")


def evolve_tableau(tab: StabilizerTableau, circuit: Circuit) -> StabilizerTableau:
    """Schroedinger update g -> U g U! for Clifford circuits."""
    x = tab.x.copy()
    z = tab.z.copy()
    ph = tab.phase.copy().astype(np.int64)
    qidx = {site: k for k, site in enumerate(tab.sites)}
    for gate in circuit.gates():
        qs = [qidx[site] for site in gate.sites]
        if gate.kind == "rotation":
            (pxp, xx, zx), (pzp, xz, zz) = clifford_1q_tables(
                rotation_matrix(gate.theta), heisenberg=False
            )
            k = qs[0]
            xk = x[:, k].copy()
            zk = z[:, k].copy()
            # ordered product img(X)^x . img(Z)^z
            ph += xk * pxp + zk * pzp + 2 * (xk * zx) * (zk * xz)
            x[:, k] = (xk * xx) ^ (zk * xz)
            z[:, k] = (xk * zx) ^ (zk * zz)
        elif gate.kind == "cphase":
            if _near(gate.phi, 0.0):
                continue
            if not _near(gate.phi, math.pi):
                raise ConfigError("non-Clifford cphase angle in tableau evolution")
            a, b = qs
            ph += 2 * (x[:, a] * x[:, b]).astype(np.int64)
            z[:, a] ^= x[:, b]
            z[:, b] ^= x[:, a]
        elif gate.kind == "swap":
            a, b = qs
            x[:, [a, b]] = x[:, [b, a]]
            z[:, [a, b]] = z[:, [b, a]]
        else:
            raise ConfigError(f"gate kind {gate.kind!r} is not Clifford-evolvable")
    return StabilizerTableau(tab.sites, x, z, (ph % 4).astype(np.int8))


def gf2_rank(rows: np.ndarray) -> int:
    """Rank over GF(2) of a (g, m) 0/1 matrix, bit-packed into uint64 words."""
    g, m = rows.shape
    words = (m + 63) // 64
    packed = np.zeros((g, words), dtype=np.uint64)
    for j in range(m):
        packed[:, j // 64] |= rows[:, j].astype(np.uint64) << np.uint64(j % 64)
    rank = 0
    rlist = list(packed)
    for col in range(m):
        w, b = col // 64, np.uint64(1) << np.uint64(col % 64)
        piv = None
        for i in range(rank, len(rlist)):
            if rlist[i][w] & b:
                piv = i
                break
        if piv is None:
            continue
        rlist[rank], rlist[piv] = rlist[piv], rlist[rank]
        for i in range(len(rlist)):
            if i != rank and (rlist[i][w] & b):
                rlist[i] = rlist[i] ^ rlist[rank]
        rank += 1
    return rank


def stabilizer_entropy(tab: StabilizerTableau, region: list[Site]) -> int:
    """S(region) = |region| - log2 |G_region| via GF(2) rank, in integer bits."""
    idx = {site: k for k, site in enumerate(tab.sites)}
    inside = [idx[z] for z in region]
    outside = [k for k in range(tab.n) if k not in set(inside)]
    m = np.concatenate([tab.x[:, outside], tab.z[:, outside]], axis=1)
    rank_outside = gf2_rank(m.astype(np.uint8))
    log_g_region = tab.x.shape[0] - rank_outside
    return len(inside) - log_g_region
