"""Support-algebra machinery and the information-flow index.

A support algebra S^L_O is the smallest subalgebra of region O's operator
algebra through which the images of region L's algebra factor.  Numerically:
expand each image in an operator-Schmidt decomposition across (rest | O),
collect the O-side factors, and close under span, product, and adjoint with a
global singular-value threshold of 1e-10.

Quadrant supports of the super-cell algebra are assembled from single-site
image factors (the super-cell support is the algebra generated by the
single-site supports), which keeps every dense object at most 16-dimensional.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ClosureError, ConfigError, VerificationError
from .lattice import (
    Site,
    quadrants,
    super_cell,
    von_neumann_neighborhood,
)
from .rules import SIGMA, I2, RuleParams, local_rule_image, materialize_terms

SV_TOL = 1e-10


def _dims(region: list[Site], site_dims) -> list[int]:
    if site_dims is None:
        return [2] * len(region)
    if isinstance(site_dims, int):
        return [site_dims] * len(region)
    return list(site_dims)


def orthonormalize(mats: list[np.ndarray], tol: float = SV_TOL) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal basis of the span, rank cut at ``tol``."""
    if not mats:
        return []
    d = mats[0].shape[0]
    stack = np.stack([m.reshape(-1) for m in mats])
    u, sv, vh = np.linalg.svd(stack, full_matrices=False)
    keep = sv > tol * max(sv[0], 1.0)
    return [vh[k].reshape(d, d) for k in range(len(sv)) if keep[k]]


@dataclass
class MatrixAlgebra:
    """Operator algebra on a region, given by an orthonormal matrix basis."""

    region: tuple[Site, ...]
    site_dims: tuple[int, ...]
    basis: list[np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.site_dims)) if self.site_dims else 1

    def contains(self, mat: np.ndarray, tol: float = 1e-9) -> bool:
        v = mat.reshape(-1)
        proj = sum(np.vdot(b.reshape(-1), v) * b.reshape(-1) for b in self.basis)
        return bool(np.linalg.norm(v - proj) <= tol * max(np.linalg.norm(v), 1.0))

    def center_dim(self, tol: float = SV_TOL) -> int:
        """Dimension of the center (elements commuting with the whole basis)."""
        k = self.dim
        rows = np.empty((k, k * self.basis[0].size), dtype=complex)
        for a, ba in enumerate(self.basis):
            rows[a] = np.concatenate(
                [(ba @ bi - bi @ ba).reshape(-1) for bi in self.basis]
            )
        sv = np.linalg.svd(rows, compute_uv=False)
        return int(np.sum(sv <= SV_TOL * max(sv[0], 1.0))) if k else 0

    def is_simple(self) -> bool:
        return self.center_dim() == 1

    @property
    def sqrt_dim(self) -> int:
        """d with d^2 = dim; only defined for simple algebras."""
        if not self.is_simple():
            raise VerificationError(
                "sqrt_dim undefined: direct sum / nonprime ambiguity "
                "(algebra has nontrivial center)"
            )
        d = round(math.isqrt(self.dim))
        if d * d != self.dim:
            raise VerificationError(f"algebra dimension {self.dim} is not a square")
        return d

    def bloch_axis(self, tol: float = 1e-8) -> np.ndarray | None:
        """For an abelian dim-2 single-qubit algebra D(n): the axis n."""
        if self.dim != 2 or self.total_dim != 2:
            return None
        for b in self.basis:
            for cand in (b + b.conj().T, 1j * (b - b.conj().T)):
                cand = cand - (np.trace(cand) / 2.0) * np.eye(2)
                n = np.array([np.trace(cand @ SIGMA[j]).real / 2.0 for j in (1, 2, 3)])
                if np.linalg.norm(n) > tol:
                    return n / np.linalg.norm(n)
        return None


def trivial_algebra(region: list[Site], site_dims=None) -> MatrixAlgebra:
    dims = _dims(region, site_dims)
    d = int(np.prod(dims)) if dims else 1
    return MatrixAlgebra(
        tuple(region), tuple(dims), [np.eye(d, dtype=complex) / math.sqrt(d)]
    )


def close_algebra(generators: list[np.ndarray], region: list[Site], site_dims=None,
                  tol: float = SV_TOL) -> MatrixAlgebra:
    """Close a generating set under span, product, and adjoint."""
    dims = _dims(region, site_dims)
    d = int(np.prod(dims)) if dims else 1
    basis = orthonormalize(
        [np.eye(d, dtype=complex)] + list(generators)
        + [g.conj().T for g in generators],
        tol,
    )
    for _ in range(d * d + 1):
        prods = [a @ b for a, b in itertools.product(basis, repeat=2)]
        new_basis = orthonormalize(basis + prods + [b.conj().T for b in basis], tol)
        if len(new_basis) == len(basis):
            return MatrixAlgebra(tuple(region), tuple(dims), new_basis)
        basis = new_basis
    raise ClosureError("algebra closure did not stabilize")


def op_schmidt_factors(op: np.ndarray, region: list[Site], keep: list[Site],
                       site_dims=None, tol: float = 1e-12) -> list[np.ndarray]:
    """Operator-Schmidt factors of ``op`` on the ``keep`` sites.

    ``op`` lives on ``region`` with index factor k = region[k] least
    significant.  Returns the keep-side factors with singular values above
    ``tol`` (weights folded in).
    """
    dims = _dims(region, site_dims)
    n = len(region)
    keep_idx = [region.index(z) for z in keep]
    rest_idx = [i for i in range(n) if i not in keep_idx]
    shape = tuple(reversed(dims)) * 2
    t = op.reshape(shape)
    row_ax = {k: n - 1 - k for k in range(n)}
    col_ax = {k: 2 * n - 1 - k for k in range(n)}
    keep_ms = list(reversed(keep_idx))  # most-significant first after flatten
    order = (
        [row_ax[i] for i in rest_idx] + [col_ax[i] for i in rest_idx]
        + [row_ax[i] for i in keep_ms] + [col_ax[i] for i in keep_ms]
    )
    t = np.transpose(t, order)
    dr = int(np.prod([dims[i] for i in rest_idx])) if rest_idx else 1
    dk = int(np.prod([dims[i] for i in keep_idx])) if keep_idx else 1
    m = t.reshape(dr * dr, dk * dk)
    _, sv, vh = np.linalg.svd(m, full_matrices=False)
    out = []
    for k, w in enumerate(sv):
        if w > tol * max(sv[0], 1.0):
            out.append(w * vh[k].reshape(dk, dk))
    return out


def support_on(images: list[np.ndarray], region: list[Site], keep: list[Site],
               site_dims=None, tol: float = SV_TOL) -> MatrixAlgebra:
    """Support algebra of a set of images on the ``keep`` subregion."""
    keep = [z for z in keep if z in region]
    if not keep:
        return trivial_algebra([])
    dims = _dims(region, site_dims)
    keep_dims = [dims[region.index(z)] for z in keep]
    factors = []
    for im in images:
        factors.extend(op_schmidt_factors(im, region, keep, site_dims=dims))
    return close_algebra(factors, keep, site_dims=keep_dims, tol=tol)


def embed_operator(mat: np.ndarray, sub: list[Site], region: list[Site],
                   site_dims=None) -> np.ndarray:
    """Tensor ``mat`` (on sub) with identity on region \\ sub, in region order."""
    dims = _dims(region, site_dims)
    n = len(region)
    sub_idx = [region.index(z) for z in sub]
    rest_idx = [i for i in range(n) if i not in sub_idx]
    d_rest = int(np.prod([dims[i] for i in rest_idx])) if rest_idx else 1
    big = np.kron(np.eye(d_rest, dtype=complex), mat)
    # significance order of big's index, least first: sub sites (per mat's
    # own convention), then the identity sites
    sig = list(sub) + [region[i] for i in rest_idx]
    sig_dims = [dims[region.index(z)] for z in sig]
    t = big.reshape(tuple(reversed(sig_dims)) * 2)
    pos = {z: k for k, z in enumerate(sig)}
    row_src = [n - 1 - pos[region[n - 1 - j]] for j in range(n)]
    order = row_src + [n + a for a in row_src]
    d = int(np.prod(dims))
    return np.ascontiguousarray(np.transpose(t, order)).reshape(d, d)


# ---------------------------------------------------------------------------
# Rule-driven supports
# ---------------------------------------------------------------------------


def _site_images(params: RuleParams, x: Site) -> tuple[list[Site], list[np.ndarray]]:
    """Dense images of the sigma generators at site x, on x + N."""
    region = sorted(
        tuple(a + c for a, c in zip(x, y)) for y in von_neumann_neighborhood(params.s)
    )
    images = [
        materialize_terms(local_rule_image(params, SIGMA[j], site=x), region)
        for j in (1, 2, 3)
    ]
    return region, images


def single_site_support(params: RuleParams, x: Site, keep: list[Site]
                        ) -> MatrixAlgebra:
    """S^x_keep: support of the images of site x's algebra on ``keep``."""
    region, images = _site_images(params, x)
    return support_on(images, region, keep)


@dataclass(frozen=True)
class CaseTag:
    kind: str  # "CASE_I" | "CASE_II" | "UNCLASSIFIED"
    x: Site | None = None
    axes: tuple | None = None  # per lattice axis: Bloch axis of D(n_i) or None

    def __str__(self):
        if self.kind == "CASE_I":
            return f"CASE_I({self.x})"
        return self.kind


def classify_configuration(params: RuleParams, tol: float = SV_TOL) -> CaseTag:
    """Support-configuration dichotomy of a verified local rule.

    CASE_I(x): the whole image sits at a single neighborhood site (shift or
    pure rotation).  CASE_II: full single-site algebra at the origin plus
    isomorphic abelian (or trivial) pairs on each +-e_i axis.
    """
    s = params.s
    origin = (0,) * s
    nbhd = von_neumann_neighborhood(s)
    sup = {y: single_site_support(params, origin, [y]) for y in nbhd}
    dims = {y: sup[y].dim for y in nbhd}
    full = [y for y in nbhd if dims[y] == 4]
    nontrivial = [y for y in nbhd if dims[y] > 1]
    if len(full) == 1 and len(nontrivial) == 1:
        return CaseTag(kind="CASE_I", x=full[0])
    if dims[origin] == 4:
        axes = []
        for i in range(s):
            plus, minus = nbhd[1 + 2 * i], nbhd[2 + 2 * i]
            dp, dm = dims[plus], dims[minus]
            if dp == 1 and dm == 1:
                axes.append(None)
                continue
            if dp != 2 or dm != 2:
                return CaseTag(kind="UNCLASSIFIED")
            np_axis = sup[plus].bloch_axis()
            nm_axis = sup[minus].bloch_axis()
            if np_axis is None or nm_axis is None:
                return CaseTag(kind="UNCLASSIFIED")
            if min(
                np.linalg.norm(np_axis - nm_axis), np.linalg.norm(np_axis + nm_axis)
            ) > 1e-8:
                return CaseTag(kind="UNCLASSIFIED")
            axes.append(tuple(np_axis))
        return CaseTag(kind="CASE_II", axes=tuple(axes))
    return CaseTag(kind="UNCLASSIFIED")


def quadrant_regions(s: int) -> dict[Site, list[Site]]:
    """For each sign vector q: the quadrant sites that meet c + N."""
    cell = super_cell(s)
    cn = set()
    for x in cell:
        for y in von_neumann_neighborhood(s):
            cn.add(tuple(a + c for a, c in zip(x, y)))
    return {q: sorted(set(sites) & cn) for q, sites in quadrants(s)}


def quadrant_supports(params: RuleParams, tol: float = SV_TOL
                      ) -> dict[Site, MatrixAlgebra]:
    """S^c_{q(q)} for all quadrants, via the single-site factor decomposition.

    The super-cell support on a partition element equals the algebra generated
    by the single-site supports, so we collect operator-Schmidt factors of the
    images of every cell site and close once per quadrant.
    """
    s = params.s
    cell = super_cell(s)
    regions = quadrant_regions(s)
    gens: dict[Site, list[np.ndarray]] = {q: [] for q in regions}
    for x in cell:
        region, images = _site_images(params, x)
        for q, omega in regions.items():
            keep = [z for z in omega if z in region]
            if not keep:
                continue
            factors = []
            for im in images:
                factors.extend(op_schmidt_factors(im, region, keep))
            gens[q].extend(
                embed_operator(f, keep, omega) for f in factors
            )
    out = {}
    for q, omega in regions.items():
        if gens[q]:
            out[q] = close_algebra(gens[q], omega, tol=tol)
        else:
            out[q] = trivial_algebra(omega)
    return out


def quadrant_dims(params: RuleParams) -> dict[Site, int]:
    """d(q(q)) = sqrt dimension of each quadrant support; validates the
    dimension identity and the fixed-parity constraint."""
    sups = quadrant_supports(params)
    d = {q: alg.sqrt_dim for q, alg in sups.items()}
    s = params.s
    total = int(np.prod(list(d.values())))
    if total != 2 ** (2**s):
        raise VerificationError(
            f"quadrant dimension identity failed: prod d = {total} != 2^(2^{s})"
        )
    exps = [int(round(math.log2(v))) for v in d.values()]
    if len({e % 2 for e in exps}) > 1:
        raise VerificationError(f"quadrant exponents {exps} have mixed parity")
    return d


def check_quadrant_commutation(algebras: dict[Site, MatrixAlgebra],
                               site_dims=None, tol: float = 1e-10) -> bool:
    """[tau^-q S_q, tau^-p S_p] = 0 for all quadrant pairs, elementwise.

    Each quadrant support is translated back onto the super-cell and embedded
    there; all pairwise basis commutators must vanish to ``tol``.
    """
    qs = list(algebras)
    s = len(qs[0])
    cell = super_cell(s)
    cell_dims = _dims(cell, site_dims)
    embedded = {}
    for q, alg in algebras.items():
        back = [tuple(a - c for a, c in zip(z, q)) for z in alg.region]
        if any(z not in cell for z in back):
            raise ConfigError("translated quadrant support leaves the super-cell")
        embedded[q] = [
            embed_operator(b, back, cell, site_dims=cell_dims) for b in alg.basis
        ]
    for qa, qb in itertools.combinations(qs, 2):
        for a in embedded[qa]:
            for b in embedded[qb]:
                if np.linalg.norm(a @ b - b @ a) > tol:
                    return False
    return True


@dataclass(frozen=True)
class IndexVector:
    components: tuple[Fraction, ...]

    def __str__(self):
        return ",".join(f"{c.numerator}/{c.denominator}" for c in self.components)

    def is_trivial(self) -> bool:
        return all(c == 1 for c in self.components)


def index_vector(params: RuleParams) -> IndexVector:
    """The s-component index: per axis, the 2^(s-1)-th root of
    prod_{q_i = -1} d(q(q)) / 2^(2^(s-1)), exact in rational arithmetic."""
    s = params.s
    d = quadrant_dims(params)
    half = 2 ** (s - 1)
    comps = []
    for i in range(s):
        exps = sum(
            int(round(math.log2(dq))) for q, dq in d.items() if q[i] == -1
        )
        num = exps - half  # exponent of 2, times half in the denominator
        if num % half:
            raise VerificationError(
                f"index exponent {num}/{half} is not an integer power of 2"
            )
        e = num // half
        comps.append(Fraction(2) ** e)
    return IndexVector(tuple(comps))
