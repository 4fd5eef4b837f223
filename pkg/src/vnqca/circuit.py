"""Finite-depth circuits on the periodic lattice.

A circuit is a list of layers; each layer a list of gates on pairwise disjoint
site sets.  ``compile_step`` emits one Schroedinger step of a cphase rule
(rotation layer, then 2s commuting controlled-phase sublayers), ``compile_shift``
a swap-chain translation, and ``compile_margolus`` the equivalent depth-2
block-partition circuit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GeometryError
from .lattice import LatticeSpec, Site, margolus_partitions, unit_vector
from .rules import RuleParams, cphase_matrix, kron_chain, rotation_matrix

GATE_KINDS = ("rotation", "cphase", "swap", "block")


@dataclass(frozen=True)
class Gate:
    kind: str
    sites: tuple[Site, ...]
    theta: tuple[float, float, float] | None = None  # rotation payload
    phi: float | None = None  # cphase payload
    matrix: np.ndarray | None = None  # block payload

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ConfigError(f"unknown gate kind {self.kind!r}")
        if self.kind in ("cphase", "swap") and (
            len(self.sites) != 2 or self.sites[0] == self.sites[1]
        ):
            raise ConfigError(f"{self.kind} gate needs two distinct sites")
        if self.kind == "rotation" and len(self.sites) != 1:
            raise ConfigError("rotation gate acts on one site")
        if self.kind == "block":
            m = np.asarray(self.matrix, dtype=complex)
            d = 2 ** len(self.sites)
            if m.shape != (d, d):
                raise ConfigError("block matrix size does not match its sites")
            object.__setattr__(self, "matrix", m)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "sites": [list(z) for z in self.sites]}
        if self.kind == "rotation":
            d["angles"] = list(self.theta)
        elif self.kind == "cphase":
            d["angles"] = [self.phi]
        elif self.kind == "block":
            d["matrix"] = [[[c.real, c.imag] for c in row] for row in self.matrix]
        return d


@dataclass(frozen=True)
class Circuit:
    layers: tuple[tuple[Gate, ...], ...]
    block_bound: int = field(default=2)

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        for layer in layers:
            seen: set[Site] = set()
            for g in layer:
                if len(g.sites) > self.block_bound:
                    raise ConfigError(
                        f"gate block size {len(g.sites)} exceeds bound {self.block_bound}"
                    )
                for z in g.sites:
                    if z in seen:
                        raise ConfigError(f"overlapping gates at site {z} in one layer")
                    seen.add(z)
        object.__setattr__(self, "layers", layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def to_json(self) -> list:
        return [[g.to_json() for g in layer] for layer in self.layers]

    def dump(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)


def lattice_bonds(spec: LatticeSpec) -> list[tuple[Site, Site, int]]:
    """All directed nearest-neighbor bonds (x, x+e_i, axis).

    Each undirected bond appears once, except on extent-2 rings where the pair
    is genuinely double-bonded (both +e and -e point to the same neighbor).
    """
    bonds = []
    for x in spec.sites():
        for i in range(spec.s):
            bonds.append((x, spec.translate(x, unit_vector(spec.s, i)), i))
    return bonds


def compile_step(params: RuleParams, spec: LatticeSpec) -> Circuit:
    """One Schroedinger step of a cphase rule: rotations, then controlled
    phases tiled into 2s disjoint sublayers (axis, parity of the lower
    endpoint)."""
    if params.kind != "cphase":
        raise ConfigError("compile_step expects a cphase rule")
    if spec.s != params.s:
        raise GeometryError("rule and lattice dimension differ")
    if any(e % 2 for e in spec.extents):
        raise GeometryError("compile_step needs even extents")
    layers = [tuple(Gate("rotation", (x,), theta=params.theta) for x in spec.sites())]
    bonds = lattice_bonds(spec)
    for i in range(spec.s):
        for parity in (0, 1):
            sub = tuple(
                Gate("cphase", (x, y), phi=params.phi[i])
                for x, y, ax in bonds
                if ax == i and x[i] % 2 == parity
            )
            layers.append(sub)
    return Circuit(tuple(layers))


def rotation_layer(spec: LatticeSpec, theta) -> tuple[Gate, ...]:
    return tuple(Gate("rotation", (x,), theta=tuple(theta)) for x in spec.sites())


def compile_shift(y: Site, spec: LatticeSpec) -> Circuit:
    """Swap-chain translation along +-e_i: depth exactly N-1 on a ring of N.

    The emitted circuit is the Schroedinger unitary of the shift QCA with
    Heisenberg rule alpha(O_0) = O_y, i.e. it moves qubit content by -y.
    """
    s = spec.s
    axis = None
    for i in range(s):
        if abs(y[i]) == 1 and all(y[j] == 0 for j in range(s) if j != i):
            axis = i
    if axis is None:
        raise ConfigError(f"shift vector must be +-e_i, got {y}")
    n = spec.extents[axis]
    if n == 1:
        return Circuit(())
    positions = list(range(n)) if y[axis] > 0 else list(range(n - 1, -1, -1))
    transverse = [x for x in spec.sites() if x[axis] == 0]
    layers = []
    for k in range(n - 1):
        a, b = positions[k], positions[k + 1]
        gates = []
        for base in transverse:
            xa = list(base)
            xa[axis] = a
            xb = list(base)
            xb[axis] = b
            gates.append(Gate("swap", (tuple(xa), tuple(xb))))
        layers.append(tuple(gates))
    return Circuit(tuple(layers))


def compile_rule_step(params: RuleParams, spec: LatticeSpec) -> Circuit:
    """One step of either rule kind: rotations plus the entangler layers."""
    if params.kind == "cphase":
        return compile_step(params, spec)
    layers = [rotation_layer(spec, params.theta)]
    if any(params.shift):
        layers.extend(compile_shift(params.shift, spec).layers)
    return Circuit(tuple(layers))


def _block_matrix(block: list[Site], theta, bond_list) -> np.ndarray:
    """Dense unitary on a 2^s block: internal controlled phases times
    (optionally) site-wise rotations.  Qubit k = bit k = block[k]."""
    m = len(block)
    dim = 2**m
    bits = (np.arange(dim)[:, None] >> np.arange(m)[None, :]) & 1
    phase = np.zeros(dim)
    for a, b, phi in bond_list:
        phase += phi * bits[:, a] * bits[:, b]
    diag = np.exp(1j * phase)
    if theta is None:
        return np.diag(diag)
    rot = kron_chain([rotation_matrix(theta)] * m)
    return diag[:, None] * rot


def compile_margolus(params: RuleParams, spec: LatticeSpec, q: Site) -> Circuit:
    """Depth-2 block circuit equal to compile_step's unitary.

    Every lattice bond along axis i lies inside exactly one 2^s block: inside
    an even block c+2j when the lower endpoint has even i-coordinate, else
    inside a q-shifted block.  Layer 1 applies, per even block, the internal
    controlled phases times the site rotations; layer 2 the internal
    controlled phases of the shifted blocks.  The product reproduces the
    rotation layer followed by all controlled phases exactly.
    """
    if params.kind != "cphase":
        raise ConfigError("compile_margolus expects a cphase rule")
    even_blocks, odd_blocks = margolus_partitions(spec, q)
    even_pos = {z: (bi, k) for bi, blk in enumerate(even_blocks) for k, z in enumerate(blk)}
    odd_pos = {z: (bi, k) for bi, blk in enumerate(odd_blocks) for k, z in enumerate(blk)}
    even_bonds: dict[int, list] = {i: [] for i in range(len(even_blocks))}
    odd_bonds: dict[int, list] = {i: [] for i in range(len(odd_blocks))}
    for x, ynb, ax in lattice_bonds(spec):
        if x[ax] % 2 == 0:
            bi, a = even_pos[x]
            bj, b = even_pos[ynb]
            assert bi == bj, "even bond endpoints must share a block"
            even_bonds[bi].append((a, b, params.phi[ax]))
        else:
            bi, a = odd_pos[x]
            bj, b = odd_pos[ynb]
            assert bi == bj, "odd bond endpoints must share a block"
            odd_bonds[bi].append((a, b, params.phi[ax]))
    layer1 = tuple(
        Gate("block", tuple(blk), matrix=_block_matrix(blk, params.theta, even_bonds[bi]))
        for bi, blk in enumerate(even_blocks)
    )
    layer2 = tuple(
        Gate("block", tuple(blk), matrix=_block_matrix(blk, None, odd_bonds[bi]))
        for bi, blk in enumerate(odd_blocks)
    )
    return Circuit((layer1, layer2), block_bound=2**spec.s)
