"""Support algebras, the case dichotomy, and the index vector."""

from fractions import Fraction

import numpy as np
import pytest

from vnqca.errors import VerificationError
from vnqca.rules import RuleParams
from vnqca.support_algebra import (
    classify_configuration,
    close_algebra,
    embed_operator,
    index_vector,
    op_schmidt_factors,
    orthonormalize,
    quadrant_dims,
    quadrant_supports,
    check_quadrant_commutation,
    single_site_support,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
EYE = np.eye(2, dtype=complex)


def test_orthonormalize_rank():
    basis = orthonormalize([EYE, SX, SX + 1e-14 * SZ, 2 * EYE])
    assert len(basis) == 2


def test_op_schmidt_factors_of_product():
    op = np.kron(SZ, SX)  # site 0 = X (least significant), site 1 = Z
    region = [(0,), (1,)]
    fac0 = op_schmidt_factors(op, region, [(0,)])
    assert len(fac0) == 1
    f = fac0[0]
    assert min(np.abs(f - f[0, 1] * SX).max() for _ in [0]) < 1e-12 or \
        np.abs(np.abs(f) - np.abs(SX)).max() < 1e-12


def test_embed_operator_positions():
    region = [(0,), (1,), (2,)]
    full = embed_operator(SX, [(1,)], region)
    ref = np.kron(EYE, np.kron(SX, EYE))
    assert np.abs(full - ref).max() < 1e-12


def test_pauli_closure_is_full_algebra():
    alg = close_algebra([SX, SZ], [(0,)])
    assert alg.dim == 4
    assert alg.is_simple()
    assert alg.sqrt_dim == 2


def test_sqrt_dim_rejects_nonsimple_algebra():
    alg = close_algebra([SZ], [(0,)])  # abelian diagonal algebra
    assert alg.dim == 2
    assert not alg.is_simple()
    with pytest.raises(VerificationError):
        _ = alg.sqrt_dim


def test_classification_cases():
    cz = RuleParams(s=1, kind="cphase", phi=(np.pi,), theta=(0.1, 0.2, 0.3))
    tag = classify_configuration(cz)
    assert tag.kind == "CASE_II"
    shift = RuleParams(s=1, kind="shift", shift=(1,), theta=(0.4, 0.5, 0.6))
    tag = classify_configuration(shift)
    assert tag.kind == "CASE_I"
    assert tag.x == (1,)
    ident = RuleParams(s=2, kind="cphase", phi=(0.0, 0.0), theta=(0.2, 0.9, 0.0))
    tag = classify_configuration(ident)
    assert tag.kind == "CASE_I"
    assert tag.x == (0, 0)


def test_case_ii_axis_pairs_share_bloch_axis():
    p = RuleParams(s=2, kind="cphase", phi=(1.1, 2.3), theta=(0.5, 1.2, 0.7))
    tag = classify_configuration(p)
    assert tag.kind == "CASE_II"
    assert len(tag.axes) == 2
    for axis in tag.axes:
        assert axis is not None
        assert abs(np.linalg.norm(axis) - 1.0) < 1e-8


def test_single_site_support_dims():
    p = RuleParams(s=1, kind="cphase", phi=(np.pi,), theta=(0.0, 0.0, 0.0))
    assert single_site_support(p, (0,), [(0,)]).dim == 4
    assert single_site_support(p, (0,), [(1,)]).dim == 2


def test_quadrant_dims_and_commutation():
    cz = RuleParams(s=1, kind="cphase", phi=(np.pi,), theta=(0.3, 0.8, 0.1))
    dims = quadrant_dims(cz)
    assert dims == {(-1,): 2, (1,): 2}
    assert check_quadrant_commutation(quadrant_supports(cz))
    shift = RuleParams(s=2, kind="shift", shift=(-1, 0))
    dims = quadrant_dims(shift)
    assert sorted(dims.values()) == [1, 1, 4, 4]


def test_index_values():
    assert index_vector(
        RuleParams(s=1, kind="shift", shift=(1,))
    ).components == (Fraction(1, 2),)
    assert index_vector(
        RuleParams(s=2, kind="shift", shift=(-1, 0))
    ).components == (Fraction(2), Fraction(1))
    iv = index_vector(RuleParams(s=2, kind="cphase", phi=(1.0, 2.0),
                                 theta=(0.3, 0.6, 0.9)))
    assert iv.is_trivial()
    assert str(iv) == "1/1,1/1"
