"""Entanglement sweeps over the rule parameters.

The single-site output entropy S(rho_0^t) is evaluated exactly without
simulating the full light cone.  Writing the t-step evolution as
W^t = (C R C)(R C R)... and pushing the outer step-and-a-half onto the
operator O_0, the expectation value becomes a contraction of

  - B = alpha(O) (the one-step Heisenberg image, a small matrix on the
    origin's neighborhood),
  - controlled-phase dressings between the neighborhood and the next shell,
  - the reduced state of the remaining evolution on cone(t-2), which for a
    product input is either a product state (t <= 2) or a boundary-dephased
    one-step state (t = 3).

For t <= 2 the contraction is a vectorized sum over neighborhood
configuration pairs; for (s=2, t=3) it is a transfer-matrix sweep around the
second shell (an 8-cycle), with the rank-2 structure of the dephasing
factors keeping the bond dimension at 2.  Either way a single entropy
evaluation costs milliseconds, which is what makes optimizing over ~50 input
states per grid pixel affordable.

``entropy_at`` is the direct oracle: dense simulation of every gate inside
the light cone (exact for the commuting-entangler step).
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit
from scipy.optimize import minimize
from scipy.stats import qmc

from .circuit import Gate, compile_rule_step
from .errors import ConfigError, SimulationCapError
from .lattice import LatticeSpec, Site, cone_size, future_cone, unit_vector
from .rules import (
    InputStateParams,
    RuleParams,
    is_clifford,
    local_rule_image,
    materialize_terms,
    rotation_matrix,
)
from .statevector import (
    DENSE_QUBIT_CAP,
    DensityMatrix2,
    apply_gate,
    entropy,
    init_product_state,
    reduced_density,
)

SEED_P1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)  # |1><1|
SEED_C = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0|


# ---------------------------------------------------------------------------
# Dense light-cone oracle
# ---------------------------------------------------------------------------


def entropy_at(params: RuleParams, delta: InputStateParams, t: int,
               s: int | None = None) -> float:
    """S(rho_0^t) by dense simulation of all gates inside the light cone.

    Applying, at every step, the rotations on all cone sites and every
    entangler bond internal to the cone reproduces the infinite-lattice
    reduced state at the origin exactly: gates outside cancel against their
    adjoints under the partial trace.
    """
    if s is not None and s != params.s:
        raise ConfigError(f"s={s} does not match params.s={params.s}")
    s = params.s
    if t < 1:
        raise ConfigError("t must be >= 1")
    if params.kind == "shift":
        # shift-and-rotate maps product states to product states
        return 0.0
    origin = (0,) * s
    sites = future_cone(origin, t)
    if len(sites) > DENSE_QUBIT_CAP:
        raise SimulationCapError(
            f"cone of {len(sites)} qubits exceeds the dense cap of "
            f"{DENSE_QUBIT_CAP}"
        )
    site_set = set(sites)
    bonds = []
    for z in sites:
        for ax in range(s):
            y = tuple(a + c for a, c in zip(z, unit_vector(s, ax)))
            if y in site_set:
                bonds.append((z, y, ax))
    state = init_product_state(delta, sites)
    for _ in range(t):
        for z in sites:
            apply_gate(state, Gate(kind="rotation", sites=(z,), theta=params.theta))
        for z, y, ax in bonds:
            apply_gate(state, Gate(kind="cphase", sites=(z, y), phi=params.phi[ax]))
    return entropy(reduced_density(state, origin))


# ---------------------------------------------------------------------------
# Fast cone evaluator
# ---------------------------------------------------------------------------


def _bit_table(n: int) -> np.ndarray:
    """(2^n, n) array of bits, bit k = site k."""
    idx = np.arange(2**n)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.int64)


@lru_cache(maxsize=None)
def _geometry(s: int, t: int):
    """Shell geometry around the origin neighborhood, independent of angles."""
    origin = (0,) * s
    c1 = future_cone(origin, 1)
    c1_set = set(c1)
    o_idx = c1.index(origin)
    ring1 = [i for i, z in enumerate(c1) if z != origin]
    ring1_ax = [next(ax for ax in range(s) if c1[i][ax] != 0) for i in ring1]
    r2 = [z for z in future_cone(origin, 2) if z not in c1_set]
    # for each second-shell site: its neighbors in ring1 with bond axes
    r2_nbrs = []
    for y in r2:
        nb = []
        for pos, i in enumerate(ring1):
            z = c1[i]
            diff = tuple(a - b for a, b in zip(y, z))
            if sum(abs(d) for d in diff) == 1:
                nb.append((pos, next(ax for ax in range(s) if diff[ax] != 0)))
        r2_nbrs.append(nb)
    return c1, o_idx, ring1, ring1_ax, r2, r2_nbrs


@lru_cache(maxsize=None)
def _cycle_geometry():
    """s=2 second/third-shell structure: the 8-cycle used at t=3."""
    c1, o_idx, ring1, ring1_ax, r2, r2_nbrs = _geometry(2, 3)
    order = sorted(range(len(r2)), key=lambda i: math.atan2(r2[i][1], r2[i][0]))
    cyc = [r2[i] for i in order]
    nbrs = [r2_nbrs[i] for i in order]
    r3 = [z for z in future_cone((0, 0), 3) if z not in set(future_cone((0, 0), 2))]
    used = set()
    corner_ax = [-1] * 8
    edge_ax = []  # per cycle edge k: (axis to y_k, axis to y_{k+1})
    adj = {}
    for y3 in r3:
        touching = []
        for k, y in enumerate(cyc):
            diff = tuple(a - b for a, b in zip(y3, y))
            if sum(abs(d) for d in diff) == 1:
                touching.append((k, next(ax for ax in range(2) if diff[ax] != 0)))
        adj[y3] = touching
    for k in range(8):
        y_a, y_b = cyc[k], cyc[(k + 1) % 8]
        found = None
        for y3, touching in adj.items():
            ks = {kk for kk, _ in touching}
            if len(touching) == 2 and ks == {k, (k + 1) % 8}:
                found = (y3, dict(touching))
                break
        if found is None:
            raise ConfigError("third-shell geometry does not close into a cycle")
        y3, axes = found
        used.add(y3)
        edge_ax.append((axes[k], axes[(k + 1) % 8]))
    for y3, touching in adj.items():
        if len(touching) == 1:
            k, ax = touching[0]
            if corner_ax[k] != -1:
                raise ConfigError("second-shell corner has two outer spurs")
            corner_ax[k] = ax
            used.add(y3)
    if used != set(r3):
        raise ConfigError("unclassified third-shell sites")
    return c1, o_idx, ring1, ring1_ax, cyc, nbrs, corner_ax, edge_ax


@njit(cache=True)
def _ring_kernel(base, e1, e2, j1, j2, fk, hk, p0, p1, out):
    """out[cls, cfg] = trace of the dephasing transfer cycle.

    cls enumerates the 3^4 classes of ring-1 occupation differences (they set
    the controlled-phase dressing angles), cfg the 4^4 ring-1 ket/bra pairs.
    Each cycle coupling g = p0 + p1 f h is rank 2, so the transfer runs in a
    2-dimensional auxiliary space.  Stage one tabulates the 2x2 transfer
    matrix of every cycle site over (cls, neighbor pair); stage two chains
    them.
    """
    atab = np.empty((8, 81, 4, 4, 4), dtype=np.complex128)
    lk = np.empty(4, dtype=np.complex128)
    for k in range(8):
        kp = (k + 7) % 8
        for cls in range(81):
            for o1 in range(4):
                for o2 in range(4):
                    for w in range(4):
                        lk[w] = base[k, cls, w] * e1[k, o1, w] * e2[k, o2, w]
                    d00 = 0.0 + 0.0j
                    d01 = 0.0 + 0.0j
                    d10 = 0.0 + 0.0j
                    d11 = 0.0 + 0.0j
                    for w in range(4):
                        v = lk[w]
                        d00 += v
                        d01 += v * fk[k, w]
                        vh = v * hk[kp, w]
                        d10 += vh
                        d11 += vh * fk[k, w]
                    atab[k, cls, o1, o2, 0] = p0 * d00
                    atab[k, cls, o1, o2, 1] = p1 * d01
                    atab[k, cls, o1, o2, 2] = p0 * d10
                    atab[k, cls, o1, o2, 3] = p1 * d11
    for cls in range(81):
        for cfg in range(256):
            m00 = 1.0 + 0.0j
            m01 = 0.0 + 0.0j
            m10 = 0.0 + 0.0j
            m11 = 1.0 + 0.0j
            for k in range(8):
                o1 = (cfg >> (2 * j1[k])) & 3
                o2 = (cfg >> (2 * j2[k])) & 3
                a00 = atab[k, cls, o1, o2, 0]
                a01 = atab[k, cls, o1, o2, 1]
                a10 = atab[k, cls, o1, o2, 2]
                a11 = atab[k, cls, o1, o2, 3]
                n00 = m00 * a00 + m01 * a10
                n01 = m00 * a01 + m01 * a11
                n10 = m10 * a00 + m11 * a10
                n11 = m10 * a01 + m11 * a11
                m00, m01, m10, m11 = n00, n01, n10, n11
            out[cls, cfg] = m00 + m11


@njit(cache=True)
def _assemble_kernel(of, az, ringsum, ring1_bits, o_bit, out):
    """out[a, b] = boundary-contracted weight of the matrix unit |a><b|."""
    wv = np.empty(256, dtype=np.complex128)
    for rp in range(256):
        cls = 0
        p3 = 1
        for j in range(4):
            ab = (rp >> (2 * j)) & 3
            cls += ((ab & 1) - (ab >> 1) + 1) * p3
            p3 *= 3
        for cfg in range(256):
            val = ringsum[cls, cfg]
            for j in range(4):
                val *= az[j, (rp >> (2 * j)) & 3, (cfg >> (2 * j)) & 3]
            wv[cfg] = val
        base_a = 0
        base_b = 0
        for j in range(4):
            ab = (rp >> (2 * j)) & 3
            base_a += (ab >> 1) << ring1_bits[j]
            base_b += (ab & 1) << ring1_bits[j]
        for ab0 in range(4):
            acc = 0.0 + 0.0j
            for cfg in range(256):
                acc += of[ab0, cfg] * wv[cfg]
            out[base_a + ((ab0 >> 1) << o_bit), base_b + ((ab0 & 1) << o_bit)] = acc


class ConeEvaluator:
    """Exact S(rho_0^t) evaluator for a controlled-phase rule.

    Supports t <= 2 for any s with a dense cone, and t = 3 for s = 2 via the
    cycle transfer contraction.  One instance is bound to (phi, theta); the
    input-state angles vary per call.
    """

    def __init__(self, params: RuleParams, t: int):
        if params.kind != "cphase":
            raise ConfigError("ConeEvaluator handles controlled-phase rules")
        if t < 1:
            raise ConfigError("t must be >= 1")
        if t > 3 or (t == 3 and params.s != 2):
            raise SimulationCapError(
                f"fast evaluation limited to t <= 2 (any s) and t = 3 (s = 2); "
                f"got s={params.s}, t={t}"
            )
        self.params = params
        self.t = t
        self.v = rotation_matrix(params.theta)
        self._b_ops = [
            materialize_terms(local_rule_image(params, op), self._c1())
            for op in (SEED_P1, SEED_C)
        ]
        if t >= 2:
            self._prep_shell()
        if t == 3:
            self._prep_cycle()

    def _c1(self) -> list[Site]:
        return future_cone((0,) * self.params.s, 1)

    # -- shared t >= 2 tables -------------------------------------------------

    def _prep_shell(self):
        s = self.params.s
        c1, o_idx, ring1, ring1_ax, r2, r2_nbrs = _geometry(s, self.t)
        self._o_idx = o_idx
        self._ring1 = ring1
        self._ring1_ax = ring1_ax
        n = len(c1)
        bits = _bit_table(n)
        # phases of the neighborhood-internal bonds (origin to each neighbor)
        gamma = np.zeros((2**n, 2**n))
        for pos, i in enumerate(ring1):
            prod = bits[:, o_idx] * bits[:, i]
            gamma += self.params.phi[ring1_ax[pos]] * (prod[None, :] - prod[:, None])
        phase = np.exp(1j * gamma)
        self._b_hat = [b * phase for b in self._b_ops]
        if self.t == 2:
            # per second-shell site: integer dressing exponents nu[a, b]
            self._shell_nu = []
            for nb in r2_nbrs:
                nu = np.zeros((2**n, 2**n))
                for pos, ax in nb:
                    d = bits[:, ring1[pos]].astype(float)
                    nu += self.params.phi[ax] * (d[None, :] - d[:, None])
                self._shell_nu.append(np.exp(1j * nu))

    # -- t = 3 tables ---------------------------------------------------------

    def _prep_cycle(self):
        phi = self.params.phi
        v = self.v
        c1, o_idx, ring1, ring1_ax, cyc, nbrs, corner_ax, edge_ax = _cycle_geometry()
        w_of = np.arange(4) >> 1
        wp_of = np.arange(4) & 1
        # P_ax[omega_a, omega_b] = exp(i phi (w_a w_b - w'_a w'_b))
        self._p_tab = [
            np.exp(
                1j * phi[ax] * (np.outer(w_of, w_of) - np.outer(wp_of, wp_of))
            )
            for ax in range(2)
        ]
        # e^{i phi (w - w')} per axis
        self._ephi = [np.exp(1j * phi[ax] * (w_of - wp_of)) for ax in range(2)]
        # dressing kernels Q[k, cls, omega]
        deltas = np.array(
            list(itertools.product((-1, 0, 1), repeat=4))
        )  # index = sum (d_j + 1) 3^j with j least significant
        cls_delta = np.zeros((81, 4))
        for c in range(81):
            rem = c
            for j in range(4):
                cls_delta[c, j] = (rem % 3) - 1
                rem //= 3
        q81 = np.empty((8, 81, 4), dtype=complex)
        for k in range(8):
            mu = np.zeros(81)
            for pos, ax in nbrs[k]:
                mu += phi[ax] * cls_delta[:, pos]
            term0 = v[0, w_of] * np.conj(v[0, wp_of])
            term1 = v[1, w_of] * np.conj(v[1, wp_of])
            q81[k] = term0[None, :] + np.exp(1j * mu)[:, None] * term1[None, :]
        self._q81 = q81
        self._corner_ax = corner_ax
        # per cycle site: bond tables to its one or two ring-1 neighbors,
        # indexed [ring1 omega, own omega]; absent second neighbors are
        # padded with an all-ones table
        j1 = np.zeros(8, dtype=np.int64)
        j2 = np.zeros(8, dtype=np.int64)
        e1 = np.ones((8, 4, 4), dtype=np.complex128)
        e2 = np.ones((8, 4, 4), dtype=np.complex128)
        for k in range(8):
            pos, ax = nbrs[k][0]
            j1[k] = pos
            e1[k] = self._p_tab[ax]
            if len(nbrs[k]) > 1:
                pos, ax = nbrs[k][1]
                j2[k] = pos
                e2[k] = self._p_tab[ax]
            else:
                j2[k] = j1[k]
        self._j1, self._j2, self._e1, self._e2 = j1, j2, e1, e2
        self._fk = np.stack([self._ephi[edge_ax[k][0]] for k in range(8)])
        self._hk = np.stack([self._ephi[edge_ax[k][1]] for k in range(8)])
        self._p0_tabs = np.stack(
            [self._p_tab[ring1_ax[pos]] for pos in range(4)]
        )  # origin-to-neighbor bond tables, indexed by ring1 position
        # cfg -> per-position omega lookup for the origin factor
        cfgs = np.arange(256)
        self._cfg_om = np.stack([(cfgs >> (2 * j)) & 3 for j in range(4)])
        self._ring1_bits = np.array(ring1, dtype=np.int64)
        self._o_bit = o_idx

    # -- evaluation -----------------------------------------------------------

    def rho0(self, delta: InputStateParams) -> DensityMatrix2:
        chi = rotation_matrix(delta.delta)[:, 0]
        if self.t == 1:
            n = len(self._c1())
            vec = np.array([1.0 + 0.0j])
            for _ in range(n):
                vec = np.kron(chi, vec)
            vals = [np.vdot(vec, b @ vec) for b in self._b_ops]
        elif self.t == 2:
            u = self.v @ chi
            n = len(self._c1())
            bits = _bit_table(n)
            uvec = np.prod(np.where(bits == 1, u[1], u[0]), axis=1)
            p0, p1 = abs(u[0]) ** 2, abs(u[1]) ** 2
            weight = np.outer(np.conj(uvec), uvec)
            for ey in self._shell_nu:
                weight = weight * (p0 + p1 * ey)
            vals = [np.sum(bh * weight) for bh in self._b_hat]
        else:
            vals = self._eval_t3(chi)
        p = float(np.real(vals[0]))
        c = complex(vals[1])
        if abs(np.imag(vals[0])) > 1e-8:
            raise ConfigError("population acquired an imaginary part")
        mat = np.array([[1.0 - p, c], [np.conj(c), p]])
        return DensityMatrix2(0.5 * (mat + mat.conj().T))

    def _eval_t3(self, chi: np.ndarray):
        v = self.v
        u = v @ chi
        p0, p1 = abs(u[0]) ** 2, abs(u[1]) ** 2
        w_of = np.arange(4) >> 1
        wp_of = np.arange(4) & 1
        uu = u[w_of] * np.conj(u[wp_of])
        cgk = np.ones((8, 4), dtype=complex)
        for k in range(8):
            ax = self._corner_ax[k]
            if ax >= 0:
                cgk[k] = p0 + p1 * self._ephi[ax]
        base = (uu[None, None, :] * self._q81 * cgk[:, None, :]).astype(
            np.complex128
        )
        ringsum = np.empty((81, 256), dtype=np.complex128)
        _ring_kernel(
            base, self._e1, self._e2, self._j1, self._j2,
            self._fk, self._hk, p0, p1, ringsum,
        )
        # site factor tables A[(2a+b), omega] = u_w conj(u_w') V[b,w] conj(V[a,w'])
        a_tab = np.empty((4, 4), dtype=complex)
        for ab in range(4):
            a, b = ab >> 1, ab & 1
            a_tab[ab] = uu * v[b, w_of] * np.conj(v[a, wp_of])
        az = np.broadcast_to(a_tab, (4, 4, 4)).copy()
        # origin factor summed against its four bond tables
        pmat = np.ones((4, 256), dtype=complex)
        for j in range(4):
            pmat = pmat * self._p0_tabs[j][:, self._cfg_om[j]]
        of = a_tab @ pmat
        t_mat = np.empty((32, 32), dtype=np.complex128)
        _assemble_kernel(
            of.astype(np.complex128), az.astype(np.complex128), ringsum,
            self._ring1_bits, self._o_bit, t_mat,
        )
        return [np.sum(bh * t_mat) for bh in self._b_hat]

    def entropy(self, delta: InputStateParams) -> float:
        return entropy(self.rho0(delta))


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

CSV_HEADER = "axis1,axis2,s_max,s_min,delta_s,theta1_star,evals"


@dataclass(frozen=True)
class SweepSpec:
    s: int
    t: int
    mode: str = "phi-theta"  # or "phi-phi"
    grid_n: int = 25
    theta1_points: int = 13
    theta2_points: int = 13
    delta_samples: int = 50
    seed: int = 7
    refine: str = "full"  # "full" | "top" | "off"
    refine_budget: int = 200

    def __post_init__(self):
        if self.t < 1:
            raise ConfigError("t must be >= 1")
        if self.grid_n < 2:
            raise ConfigError("grid resolution must be >= 2")
        if self.mode not in ("phi-theta", "phi-phi"):
            raise ConfigError(f"unknown sweep mode {self.mode!r}")
        if self.refine not in ("full", "top", "off"):
            raise ConfigError(f"unknown refine mode {self.refine!r}")
        if cone_size(self.s, self.t) > DENSE_QUBIT_CAP:
            raise SimulationCapError(
                f"cone of {cone_size(self.s, self.t)} qubits exceeds the "
                f"dense cap of {DENSE_QUBIT_CAP}"
            )
        if self.t == 3 and self.s != 2:
            raise SimulationCapError("t = 3 sweeps are limited to s = 2")

    def fingerprint(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass
class SweepRow:
    axis1: float
    axis2: float
    s_max: float
    s_min: float
    delta_s: float
    theta1_star: float
    evals: int

    def csv(self) -> str:
        return ",".join(
            ["%.9g" % x for x in (self.axis1, self.axis2, self.s_max,
                                  self.s_min, self.delta_s, self.theta1_star)]
            + [str(self.evals)]
        )


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[SweepRow]

    def grid_max(self) -> float:
        return max(r.s_max for r in self.rows)


def delta_grid(spec: SweepSpec) -> np.ndarray:
    """Seeded low-discrepancy input-state samples over [0, 2pi)^2, delta3=0."""
    sampler = qmc.Halton(d=2, scramble=True, seed=spec.seed)
    return 2.0 * math.pi * sampler.random(spec.delta_samples)


def _axis_values(n: int) -> np.ndarray:
    return np.linspace(0.0, 2.0 * math.pi, n)


def _angle_grid(n: int) -> list[float]:
    if n <= 1:
        return [0.0]
    return list(np.linspace(0.0, 2.0 * math.pi, n, endpoint=False))


def _params_for(spec: SweepSpec, ax1: float, ax2: float, th1: float,
                th2: float) -> RuleParams:
    if spec.mode == "phi-theta":
        phi = (ax1,) * spec.s
        return RuleParams(s=spec.s, kind="cphase", phi=phi, theta=(th1, ax2, 0.0))
    phi = (ax1,) + (ax2,) * (spec.s - 1)
    return RuleParams(s=spec.s, kind="cphase", phi=phi, theta=(th1, th2, 0.0))


def _free_theta(spec: SweepSpec) -> tuple[list[float], list[float]]:
    """Grids for the free rotation angles: theta1 (t >= 3 only) and, in
    phi-phi mode, theta2."""
    th1 = _angle_grid(spec.theta1_points) if spec.t >= 3 else [0.0]
    th2 = _angle_grid(spec.theta2_points) if spec.mode == "phi-phi" else [None]
    return th1, th2


def _pixel(spec: SweepSpec, ax1: float, ax2: float, deltas: np.ndarray
           ) -> SweepRow:
    th1_grid, th2_grid = _free_theta(spec)
    evals = 0
    best = None  # (s, th1, th2, delta_idx)
    best_entropies = None
    for th1 in th1_grid:
        for th2 in th2_grid:
            ev = ConeEvaluator(_params_for(spec, ax1, ax2, th1, th2), spec.t)
            ss = [ev.entropy(InputStateParams((d[0], d[1], 0.0))) for d in deltas]
            evals += len(ss)
            k = int(np.argmax(ss))
            if best is None or ss[k] > best[0]:
                best = (ss[k], th1, th2, k)
                best_entropies = ss
    s_max, th1_star, th2_star, k_star = best
    s_min = min(best_entropies)
    if spec.refine == "full":
        s_max, th1_star = _refine_max(
            spec, ax1, ax2, th1_star, th2_star, deltas[k_star], s_max
        )
        evals += spec.refine_budget
    return SweepRow(ax1, ax2, s_max, s_min, s_max - s_min, th1_star, evals)


def _refine_max(spec: SweepSpec, ax1: float, ax2: float, th1: float,
                th2, d0: np.ndarray, s0: float) -> tuple[float, float]:
    """Simplex descent over the free continuous angles from the grid argmax."""
    vary_th1 = spec.t >= 3
    vary_th2 = spec.mode == "phi-phi"
    x0 = []
    if vary_th1:
        x0.append(th1)
    if vary_th2:
        x0.append(th2)
    x0 += [d0[0], d0[1]]

    def objective(x):
        i = 0
        t1 = x[i] if vary_th1 else th1
        i += vary_th1
        t2 = x[i] if vary_th2 else th2
        i += vary_th2
        ev = ConeEvaluator(_params_for(spec, ax1, ax2, t1, t2), spec.t)
        return -ev.entropy(InputStateParams((x[i], x[i + 1], 0.0)))

    res = minimize(
        objective, np.array(x0), method="Nelder-Mead",
        options={"maxfev": spec.refine_budget, "xatol": 1e-6, "fatol": 1e-10},
    )
    s_ref = -float(res.fun)
    if s_ref <= s0:
        return s0, th1
    th1_new = float(res.x[0]) if vary_th1 else th1
    return s_ref, th1_new


def run_sweep(spec: SweepSpec, csv_path: str | None = None,
              resume: bool = False) -> SweepResult:
    """Evaluate the sweep grid row by row; optionally stream to CSV.

    With ``resume``, rows already present in the CSV are kept and only the
    missing tail of the grid is computed.  The delta samples are drawn once
    from the seeded sequence, so resumed runs produce identical output.
    """
    deltas = delta_grid(spec)
    ax1_vals = _axis_values(spec.grid_n)
    ax2_vals = _axis_values(spec.grid_n)
    grid = [(a1, a2) for a1 in ax1_vals for a2 in ax2_vals]
    rows: list[SweepRow] = []
    if resume and csv_path and os.path.exists(csv_path):
        rows = read_csv(csv_path)[: len(grid)]
    for a1, a2 in grid[len(rows):]:
        rows.append(_pixel(spec, a1, a2, deltas))
        if csv_path:
            _write_rows(csv_path, spec, rows)
    if spec.refine == "top":
        k = int(np.argmax([r.s_max for r in rows]))
        r = rows[k]
        th1_grid, th2_grid = _free_theta(spec)
        # recover the argmax delta for the refinement start
        best = (r.s_max, r.theta1_star, th2_grid[0], deltas[0])
        for th2 in th2_grid:
            ev = ConeEvaluator(
                _params_for(spec, r.axis1, r.axis2, r.theta1_star, th2), spec.t
            )
            for d in deltas:
                sv = ev.entropy(InputStateParams((d[0], d[1], 0.0)))
                if sv >= best[0] - 1e-12:
                    best = (max(sv, best[0]), r.theta1_star, th2, d)
        s_ref, th1_ref = _refine_max(
            spec, r.axis1, r.axis2, best[1], best[2], best[3], r.s_max
        )
        rows[k] = SweepRow(
            r.axis1, r.axis2, s_ref, r.s_min, s_ref - r.s_min, th1_ref,
            r.evals + spec.refine_budget,
        )
        if csv_path:
            _write_rows(csv_path, spec, rows)
    result = SweepResult(spec, rows)
    for r in rows:
        if not (-1e-9 <= r.s_min <= r.s_max <= 1.0 + 1e-9):
            raise ConfigError(f"entropy bound violated in row {r}")
    return result


def smax_phi_theta(spec: SweepSpec, csv_path: str | None = None,
                   resume: bool = False) -> SweepResult:
    if spec.mode != "phi-theta":
        raise ConfigError("spec.mode must be 'phi-theta'")
    return run_sweep(spec, csv_path, resume)


def smax_phi_phi(spec: SweepSpec, csv_path: str | None = None,
                 resume: bool = False) -> SweepResult:
    if spec.mode != "phi-phi":
        raise ConfigError("spec.mode must be 'phi-phi'")
    return run_sweep(spec, csv_path, resume)


def delta_S(spec: SweepSpec, csv_path: str | None = None,
            resume: bool = False) -> SweepResult:
    """Input-state sensitivity Delta S = S_max - min_delta S at theta1*.

    The quantity is computed inside every sweep row (the minimum runs over
    the same seeded delta samples at the argmax theta1), so this shares its
    implementation with smax_phi_theta.  The reported surface is insensitive
    to the particular argmax chosen when several theta1 tie.
    """
    return run_sweep(spec, csv_path, resume)


# ---------------------------------------------------------------------------
# CSV artifacts
# ---------------------------------------------------------------------------


def _sidecar_path(csv_path: str) -> str:
    base, _ = os.path.splitext(csv_path)
    return base + ".json"


def _write_rows(csv_path: str, spec: SweepSpec, rows: list[SweepRow]):
    tmp = csv_path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(r.csv() + "\n")
    os.replace(tmp, csv_path)
    with open(_sidecar_path(csv_path), "w") as fh:
        json.dump(
            {"spec": asdict(spec), "fingerprint": spec.fingerprint()},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")


def write_csv(result: SweepResult, csv_path: str):
    _write_rows(csv_path, result.spec, result.rows)


def read_csv(csv_path: str) -> list[SweepRow]:
    rows = []
    with open(csv_path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ConfigError(f"unexpected CSV header {header!r}")
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != 7:
                raise ConfigError(f"malformed CSV row {line!r}")
            rows.append(
                SweepRow(*(float(x) for x in parts[:6]), int(parts[6]))
            )
    return rows


# ---------------------------------------------------------------------------
# Clifford grid sweep
# ---------------------------------------------------------------------------


def clifford_sweep(s: int, t: int, extent: int = 6) -> list[dict]:
    """Stabilizer entropies over the Clifford parameter grid on a torus.

    Rows mirror the dense CSV schema plus an integer-entropy column.
    """
    from .clifford import StabilizerTableau, evolve_tableau, stabilizer_entropy

    spec = LatticeSpec((extent,) * s)
    origin = (0,) * s
    quarter = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    deltas = [(d1, d2, 0.0) for d1 in quarter for d2 in quarter]
    rows = []
    for phi1 in (0.0, math.pi):
        for th2 in quarter:
            params = RuleParams(
                s=s, kind="cphase", phi=(phi1,) * s, theta=(0.0, th2, 0.0)
            )
            assert is_clifford(params)
            circuit = compile_rule_step(params, spec)
            ents = []
            for d in deltas:
                tab = StabilizerTableau.product_state(
                    InputStateParams(d), spec.sites()
                )
                for _ in range(t):
                    tab = evolve_tableau(tab, circuit)
                ents.append(stabilizer_entropy(tab, [origin]))
            rows.append(
                {
                    "axis1": phi1,
                    "axis2": th2,
                    "s_max": float(max(ents)),
                    "s_min": float(min(ents)),
                    "delta_s": float(max(ents) - min(ents)),
                    "theta1_star": 0.0,
                    "evals": len(ents),
                    "s_int": int(max(ents)),
                }
            )
    return rows
