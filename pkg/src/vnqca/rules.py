"""Classified local rules: parameter records, gate matrices, Heisenberg images.

A rule is either ``cphase`` (site-wise rotation followed by controlled phases
to the 2s axis neighbors) or ``shift`` (site-wise rotation followed by a
translation along a neighborhood vector).  One Heisenberg step of the local
rule on a single-site operator O is

    alpha_0(O) = R! E! (O (x) I) E R

where R is the site-wise rotation layer on the neighborhood, E the entangler
(controlled phases at the origin, or the swap realizing the shift), and X!
denotes the adjoint.  Images of single-site operators stay in sum-of-product
form, which this module exploits to verify well-posedness quickly.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ConfigError, SimulationCapError, VerificationError
from .lattice import Site, von_neumann_neighborhood

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SIGMA = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}
# single-site matrix units |ket><bra|
E_KB = {
    (k, b): np.array([[0.0] * 2] * 2, dtype=complex)
    for k in (0, 1)
    for b in (0, 1)
}
for (k, b), m in E_KB.items():
    m[k, b] = 1.0


def _reduce_angle(a: float) -> float:
    a = float(a) % TWO_PI
    # snap values that are 2*pi within tolerance back to 0
    if a > TWO_PI - ANGLE_TOL:
        a = 0.0
    return a


@dataclass(frozen=True)
class RuleParams:
    """Free parameters of a classified rule."""

    s: int
    kind: str  # "cphase" | "shift"
    phi: tuple[float, ...] = ()
    theta: tuple[float, float, float] = (0.0, 0.0, 0.0)
    shift: Site | None = None

    def __post_init__(self):
        if self.s < 1:
            raise ConfigError("s must be >= 1")
        if self.kind not in ("cphase", "shift"):
            raise ConfigError(f"unknown rule kind {self.kind!r}")
        phi = tuple(_reduce_angle(a) for a in self.phi)
        if self.kind == "cphase":
            if len(phi) != self.s:
                raise ConfigError(f"need {self.s} phi angles, got {len(phi)}")
            if self.shift is not None:
                raise ConfigError("cphase rule cannot carry a shift vector")
        else:
            if any(abs(a) > ANGLE_TOL for a in phi):
                raise ConfigError("shift rule cannot carry phi angles")
            phi = (0.0,) * self.s
            shift = tuple(int(c) for c in (self.shift or (0,) * self.s))
            if shift not in von_neumann_neighborhood(self.s):
                raise ConfigError(f"shift {shift} not in the von Neumann neighborhood")
            object.__setattr__(self, "shift", shift)
        theta = tuple(_reduce_angle(a) for a in self.theta)
        if len(theta) != 3:
            raise ConfigError("theta must have 3 components")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)

    def to_json(self) -> dict:
        d = {"s": self.s, "kind": self.kind, "phi": list(self.phi),
             "theta": list(self.theta)}
        if self.kind == "shift":
            d["shift"] = list(self.shift)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "RuleParams":
        return cls(
            s=int(d["s"]),
            kind=d["kind"],
            phi=tuple(d.get("phi", ())),
            theta=tuple(d.get("theta", (0.0, 0.0, 0.0))),
            shift=tuple(d["shift"]) if d.get("shift") is not None else None,
        )

    @classmethod
    def load(cls, path: str) -> "RuleParams":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class InputStateParams:
    """Euler angles of the site-wise input preparation V(delta)|0>."""

    delta: tuple[float, float, float]

    def __post_init__(self):
        d = tuple(_reduce_angle(a) for a in self.delta)
        if len(d) != 3:
            raise ConfigError("delta must have 3 components")
        object.__setattr__(self, "delta", d)


def rotation_matrix(theta) -> np.ndarray:
    """V(theta) = R_z(t1) R_y(t2) R_z(t3) with R_j(a) = exp(-i a sigma_j / 2)."""
    t1, t2, t3 = (float(a) for a in theta)

    def rz(a):
        return np.array([[np.exp(-0.5j * a), 0], [0, np.exp(0.5j * a)]])

    def ry(a):
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)

    return rz(t1) @ ry(t2) @ rz(t3)


def cphase_matrix(phi: float) -> np.ndarray:
    """diag(1, 1, 1, e^{i phi}): phase on |11>, symmetric in the two qubits."""
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * float(phi))])


def kron_chain(factors) -> np.ndarray:
    """Tensor product with qubit k = bit k of the index (factors[0] least
    significant)."""
    return reduce(lambda acc, m: np.kron(m, acc), factors)


@dataclass(frozen=True)
class LocalRuleMatrix:
    """One-step unitary on the 2s+1 neighborhood qubits.

    ``sites`` fixes the qubit order (qubit k = bit k of the index); the rule
    acts on a single-site operator O at the origin as U! (O (x) I) U.
    """

    s: int
    sites: tuple[Site, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = len(self.sites)
        if m.shape != (2**n, 2**n):
            raise ConfigError("matrix size does not match site count")
        if np.linalg.norm(m @ m.conj().T - np.eye(2**n), ord=2) > 1e-12:
            raise VerificationError("local rule matrix is not unitary to 1e-12")
        object.__setattr__(self, "matrix", m)


def local_rule_matrix(params: RuleParams) -> LocalRuleMatrix:
    """Materialize the neighborhood unitary U = E . (V tensor ... tensor V)."""
    sites = von_neumann_neighborhood(params.s)
    n = len(sites)
    rot = kron_chain([rotation_matrix(params.theta)] * n)
    if params.kind == "cphase":
        # diagonal entangler: phase sum_i phi_i * b_0 * (b_{+e_i} + b_{-e_i})
        b = ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1)
        phase = np.zeros(2**n)
        for i in range(params.s):
            phase += params.phi[i] * b[:, 0] * (b[:, 1 + 2 * i] + b[:, 2 + 2 * i])
        ent = np.diag(np.exp(1j * phase))
    else:
        y = params.shift
        if all(c == 0 for c in y):
            ent = np.eye(2**n, dtype=complex)
        else:
            k = sites.index(y)
            perm = np.arange(2**n)
            b0 = (perm >> 0) & 1
            bk = (perm >> k) & 1
            swapped = perm ^ ((b0 ^ bk) * (1 + (1 << k)))
            ent = np.zeros((2**n, 2**n), dtype=complex)
            ent[swapped, perm] = 1.0
    return LocalRuleMatrix(s=params.s, sites=tuple(sites), matrix=ent @ rot)


# ---------------------------------------------------------------------------
# Heisenberg images in sum-of-product form
# ---------------------------------------------------------------------------

ProductTerm = dict  # Site -> 2x2 ndarray; implicit identity elsewhere


def local_rule_image(params: RuleParams, op: np.ndarray, site: Site | None = None
                     ) -> list[ProductTerm]:
    """alpha_site(op) for a single-site operator, as a sum of product terms.

    Each term maps absolute lattice sites to 2x2 factors.  The image of a
    matrix unit |k><b| is a single product term, so a general operator yields
    at most four terms.
    """
    s = params.s
    if site is None:
        site = (0,) * s
    op = np.asarray(op, dtype=complex)
    v = rotation_matrix(params.theta)
    nbrs = von_neumann_neighborhood(s)[1:]  # the 2s axis neighbors
    terms: list[ProductTerm] = []
    for (k, b), unit in E_KB.items():
        coeff = op[k, b]
        if abs(coeff) == 0.0:
            continue
        term: ProductTerm = {}
        if params.kind == "cphase":
            term[site] = coeff * unit
            if k != b:
                for j, y in enumerate(nbrs):
                    phi = params.phi[j // 2]
                    dress = np.diag([1.0, np.exp(1j * phi * (b - k))])
                    abs_y = tuple(a + c for a, c in zip(site, y))
                    term[abs_y] = term.get(abs_y, I2) @ dress
            # diagonal units (k == b) commute with the controlled phases
        else:
            dest = tuple(a + c for a, c in zip(site, params.shift))
            term[dest] = coeff * unit
        # site-wise rotation conjugation keeps the product structure
        terms.append({z: v.conj().T @ m @ v for z, m in term.items()})
    return terms


def materialize_terms(terms: list[ProductTerm], region: list[Site]) -> np.ndarray:
    """Dense matrix of a sum of product terms on ``region`` (qubit k = bit k =
    region[k])."""
    n = len(region)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for term in terms:
        for z in term:
            if z not in region:
                raise ConfigError(f"term site {z} outside region")
        out += kron_chain([term.get(z, I2) for z in region])
    return out


# ---------------------------------------------------------------------------
# Well-posedness verification
# ---------------------------------------------------------------------------


def overlap_offsets(s: int) -> list[Site]:
    """All x != 0 with (x + N) intersecting N: +-2e_i, +-e_i, +-e_i +- e_j."""
    offs: list[Site] = []
    for i in range(s):
        for sign in (1, -1):
            v = [0] * s
            v[i] = 2 * sign
            offs.append(tuple(v))
            v = [0] * s
            v[i] = sign
            offs.append(tuple(v))
    for i, j in itertools.combinations(range(s), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            v = [0] * s
            v[i], v[j] = si, sj
            offs.append(tuple(v))
    return offs


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violations: tuple  # (offset, label_A, label_B, commutator_norm)

    def __bool__(self):
        return self.ok


def _shift_terms(terms: list[ProductTerm], x: Site) -> list[ProductTerm]:
    return [
        {tuple(a + c for a, c in zip(z, x)): m for z, m in t.items()} for t in terms
    ]


def _schmidt_from_terms(terms: list[ProductTerm], overlap: list[Site]):
    """Rewrite a sum of product terms as sum_j P_j (x) F_j with the P_j
    orthonormal on the non-overlap sites; returns the overlap factors F_j.

    Orthonormality of the discarded factors makes commutator-norm cross terms
    vanish analytically, so no large cancelling sums ever appear.
    """
    rest = sorted({z for t in terms for z in t} - set(overlap))
    gram = np.empty((len(terms), len(terms)), dtype=complex)
    for a, ta in enumerate(terms):
        for b, tb in enumerate(terms):
            acc = 1.0 + 0.0j
            for z in rest:
                acc *= np.vdot(ta.get(z, I2), tb.get(z, I2))
            gram[a, b] = acc
    lam, u = np.linalg.eigh(gram)
    f_small = [kron_chain([t.get(z, I2) for z in overlap]) for t in terms]
    factors = []
    for j in range(len(terms)):
        if lam[j] > 1e-24 * max(lam.max(), 1.0):
            f = sum(np.conj(u[k, j]) * f_small[k] for k in range(len(terms)))
            factors.append(math.sqrt(lam[j]) * f)
    return factors


def _sum_commutator_norm(terms_a: list[ProductTerm], terms_b: list[ProductTerm],
                         overlap: list[Site]) -> float:
    """Frobenius norm of [sum A_k, sum B_l] for sums of product terms whose
    supports intersect inside ``overlap`` only."""
    fa = _schmidt_from_terms(terms_a, overlap)
    fb = _schmidt_from_terms(terms_b, overlap)
    norm_sq = 0.0
    for f in fa:
        for g in fb:
            c = f @ g - g @ f
            norm_sq += float(np.vdot(c, c).real)
    return math.sqrt(max(norm_sq, 0.0))


def _dense_images(rule: LocalRuleMatrix) -> dict[int, np.ndarray]:
    n = len(rule.sites)
    u = rule.matrix
    out = {}
    for j in (1, 2):
        emb = kron_chain([SIGMA[j]] + [I2] * (n - 1))
        out[j] = u.conj().T @ emb @ u
    return out


def _schmidt_split(mat: np.ndarray, site_order: list[Site], keep: list[Site],
                   tol: float = 1e-12):
    """Operator-Schmidt factors of ``mat`` across (rest | keep).

    Returns overlap-side factors (weights folded in) such that
    mat = sum_k P_k (x) F_k with the rest-side P_k orthonormal.
    """
    n = len(site_order)
    keep_idx = [site_order.index(z) for z in keep]
    rest_idx = [i for i in range(n) if i not in keep_idx]
    t = mat.reshape((2,) * (2 * n))
    # axis layout: row bits then col bits; bit k of the row index is axis n-1-k
    row_ax = {k: n - 1 - k for k in range(n)}
    col_ax = {k: 2 * n - 1 - k for k in range(n)}
    order = (
        [row_ax[i] for i in rest_idx] + [col_ax[i] for i in rest_idx]
        + [row_ax[i] for i in keep_idx] + [col_ax[i] for i in keep_idx]
    )
    t = np.transpose(t, order)
    dr, dk = 2 ** len(rest_idx), 2 ** len(keep_idx)
    m = t.reshape(dr * dr, dk * dk)
    u_svd, sv, vh = np.linalg.svd(m, full_matrices=False)
    factors = []
    for k, w in enumerate(sv):
        if w > tol * max(sv[0], 1.0):
            factors.append(w * vh[k].reshape(dk, dk))
    return factors


def verify_local_rule(rule, spec=None, tol: float = 1e-10) -> Verdict:
    """Check the well-posedness commutators of a candidate local rule.

    ``rule`` may be a ``RuleParams`` (fast sum-of-product path, any s) or a
    ``LocalRuleMatrix`` (dense operator-Schmidt path, s <= 2).  For every
    overlap offset x and generator pair A, B in {sigma_1, sigma_2}, the norm
    || [alpha_0(A), alpha_x(B)] || must vanish to ``tol``.
    """
    if isinstance(rule, RuleParams):
        s = rule.s
        images = {j: local_rule_image(rule, SIGMA[j]) for j in (1, 2)}
        nbhd = set(von_neumann_neighborhood(s))
        violations = []
        for x in overlap_offsets(s):
            shifted_nbhd = {tuple(a + c for a, c in zip(z, x)) for z in nbhd}
            ov = sorted(nbhd & shifted_nbhd)
            for ja, jb in itertools.product((1, 2), repeat=2):
                norm = _sum_commutator_norm(
                    images[ja], _shift_terms(images[jb], x), ov
                )
                if norm > tol:
                    violations.append((x, f"sigma{ja}", f"sigma{jb}", norm))
        return Verdict(ok=not violations, violations=tuple(violations))

    if not isinstance(rule, LocalRuleMatrix):
        raise ConfigError("rule must be RuleParams or LocalRuleMatrix")
    s = rule.s
    if s > 2:
        raise SimulationCapError(
            "dense verification supports s <= 2; pass RuleParams for larger s"
        )
    images = _dense_images(rule)
    nbhd = list(rule.sites)
    violations = []
    for x in overlap_offsets(s):
        shifted = [tuple(a + c for a, c in zip(z, x)) for z in nbhd]
        ov = sorted(set(nbhd) & set(shifted))
        for ja, jb in itertools.product((1, 2), repeat=2):
            fa = _schmidt_split(images[ja], nbhd, ov)
            fb = _schmidt_split(images[jb], shifted, ov)
            norm_sq = 0.0
            for f in fa:
                for g in fb:
                    c = f @ g - g @ f
                    norm_sq += float(np.vdot(c, c).real)
            norm = math.sqrt(max(norm_sq, 0.0))
            if norm > tol:
                violations.append((x, f"sigma{ja}", f"sigma{jb}", norm))
    return Verdict(ok=not violations, violations=tuple(violations))


def is_clifford(params: RuleParams) -> bool:
    """True iff all phi in {0, pi} and all theta multiples of pi/2 (mod 2pi)."""

    def near_multiple(a: float, step: float) -> bool:
        r = a % step
        return min(r, step - r) <= ANGLE_TOL * 10

    return all(near_multiple(a, math.pi) for a in params.phi) and all(
        near_multiple(a, math.pi / 2) for a in params.theta
    )
