"""Finite periodic hypercubic lattice geometry.

Sites are s-tuples of integers.  A ``LatticeSpec`` fixes per-axis extents with
periodic wrap; site indices come from row-major flattening of the wrapped
coordinates.  Free-standing helpers (neighborhoods, causal cones, quadrants,
Margolus partitions) operate on plain tuples so they can also be used on the
effectively infinite lattice (``spec=None``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, prod

from .errors import GeometryError

Site = tuple[int, ...]


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic hypercubic lattice: dimension ``s`` and per-axis extents."""

    extents: tuple[int, ...]
    s: int = field(init=False)
    site_count: int = field(init=False)

    def __post_init__(self):
        extents = tuple(int(e) for e in self.extents)
        if not extents or any(e < 1 for e in extents):
            raise GeometryError(f"extents must be positive, got {extents}")
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "s", len(extents))
        object.__setattr__(self, "site_count", prod(extents))

    def wrap(self, site: Site) -> Site:
        return tuple(int(c) % e for c, e in zip(site, self.extents))

    def flatten(self, site: Site) -> int:
        """Row-major site index of (the wrap of) ``site``."""
        idx = 0
        for c, e in zip(site, self.extents):
            idx = idx * e + (int(c) % e)
        return idx

    def unflatten(self, idx: int) -> Site:
        coords = []
        for e in reversed(self.extents):
            coords.append(idx % e)
            idx //= e
        return tuple(reversed(coords))

    def sites(self) -> list[Site]:
        """All sites in row-major (flatten) order."""
        return [self.unflatten(i) for i in range(self.site_count)]

    def translate(self, site: Site, vec: Site) -> Site:
        return self.wrap(tuple(c + v for c, v in zip(site, vec)))


def unit_vector(s: int, axis: int, sign: int = 1) -> Site:
    """``sign * e_axis`` with 0-based axis."""
    v = [0] * s
    v[axis] = sign
    return tuple(v)


def von_neumann_neighborhood(s: int) -> list[Site]:
    """{0} union {+-e_i}: the origin first, then +e_i, -e_i per axis."""
    if s < 1:
        raise GeometryError("dimension must be >= 1")
    sites = [tuple([0] * s)]
    for i in range(s):
        sites.append(unit_vector(s, i, +1))
        sites.append(unit_vector(s, i, -1))
    return sites


def cone_size(s: int, t: int) -> int:
    """Closed-form cardinality of the t-step causal cone on Z^s."""
    return sum(comb(s, k) * comb(t, k) * 2**k for k in range(min(s, t) + 1))


def future_cone(origin: Site, t: int, spec: LatticeSpec | None = None) -> list[Site]:
    """Sites reachable by <= t von Neumann expansions from ``origin``.

    With a ``spec``, coordinates are wrapped; a wrap that would make the cone
    self-intersect (extent < 2t+1 on some axis) raises ``GeometryError``.
    """
    if t < 0:
        raise GeometryError("t must be >= 0")
    s = len(origin)
    if spec is not None:
        if spec.s != s:
            raise GeometryError("origin dimension does not match lattice")
        for e in spec.extents:
            if t > 0 and e < 2 * t + 1:
                raise GeometryError(
                    f"extent {e} < 2t+1 = {2 * t + 1}: cone wraps onto itself"
                )
    cone = []
    for offs in itertools.product(range(-t, t + 1), repeat=s):
        if sum(abs(o) for o in offs) <= t:
            site = tuple(c + o for c, o in zip(origin, offs))
            cone.append(spec.wrap(site) if spec is not None else site)
    return sorted(cone)


def super_cell(s: int) -> list[Site]:
    """The 2^s-site block {0,1}^s, in lexicographic order."""
    return [tuple(c) for c in itertools.product((0, 1), repeat=s)]


def quadrants(s: int) -> list[tuple[Site, list[Site]]]:
    """All (q, super_cell + q) for sign vectors q in {-1,+1}^s (lex order)."""
    cell = super_cell(s)
    out = []
    for q in itertools.product((-1, 1), repeat=s):
        out.append((q, [tuple(c + d for c, d in zip(x, q)) for x in cell]))
    return out


def quadrant_signs_with_minus(s: int, axis: int) -> list[Site]:
    """R_i selector: the sign vectors q with q_axis = -1 (0-based axis)."""
    return [q for q, _ in quadrants(s) if q[axis] == -1]


def margolus_partitions(
    spec: LatticeSpec, q: Site
) -> tuple[list[list[Site]], list[list[Site]]]:
    """The two Margolus partitions: blocks c+2j and (c+q)+2j.

    Each partition tiles the lattice with disjoint 2^s blocks; requires all
    extents even.
    """
    if any(e % 2 for e in spec.extents):
        raise GeometryError(f"Margolus partitioning needs even extents, got {spec.extents}")
    if len(q) != spec.s or any(c not in (-1, 1) for c in q):
        raise GeometryError(f"q must be a sign vector of length {spec.s}, got {q}")
    cell = super_cell(spec.s)
    shifted = [tuple(c + d for c, d in zip(x, q)) for x in cell]

    def blocks(base: list[Site]) -> list[list[Site]]:
        out = []
        for j in itertools.product(*(range(e // 2) for e in spec.extents)):
            off = tuple(2 * c for c in j)
            out.append([spec.wrap(tuple(a + b for a, b in zip(x, off))) for x in base])
        return out

    return blocks(cell), blocks(shifted)
