"""Rule parameters, local-rule images, and well-posedness verification."""

import numpy as np
import pytest

from vnqca.lattice import future_cone, von_neumann_neighborhood
from vnqca.errors import ConfigError, VerificationError
from vnqca.rules import (
    InputStateParams,
    LocalRuleMatrix,
    RuleParams,
    cphase_matrix,
    is_clifford,
    kron_chain,
    local_rule_image,
    local_rule_matrix,
    materialize_terms,
    rotation_matrix,
    verify_local_rule,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def test_rotation_matrix_structure():
    rng = np.random.default_rng(0)
    for _ in range(5):
        th = rng.uniform(0, 2 * np.pi, 3)
        v = rotation_matrix(th)
        assert np.allclose(v @ v.conj().T, np.eye(2), atol=1e-12)
    # pure y rotation by pi maps |0> to |1> up to phase
    v = rotation_matrix((0.0, np.pi, 0.0))
    assert abs(abs(v[1, 0]) - 1.0) < 1e-12


def test_cphase_matrix():
    m = cphase_matrix(0.7)
    assert np.allclose(np.diag(m), [1, 1, 1, np.exp(0.7j)])
    assert np.allclose(m, np.diag(np.diag(m)))


def test_rule_params_validation():
    with pytest.raises(ConfigError):
        RuleParams(s=2, kind="cphase", phi=(1.0,))
    with pytest.raises(ConfigError):
        RuleParams(s=2, kind="shift", shift=(1, -1))
    with pytest.raises(ConfigError):
        RuleParams(s=1, kind="wat", phi=(0.0,))
    p = RuleParams(s=2, kind="shift", shift=(-1, 0))
    assert p.shift == (-1, 0)


def test_local_rule_image_matches_dense_conjugation():
    """Sum-of-products image equals U! (O (x) I) U on the neighborhood."""
    rng = np.random.default_rng(1)
    for s in (1, 2):
        params = RuleParams(
            s=s, kind="cphase", phi=tuple(rng.uniform(0, 2 * np.pi, s)),
            theta=tuple(rng.uniform(0, 2 * np.pi, 3)),
        )
        lrm = local_rule_matrix(params)
        region = list(lrm.sites)
        n = len(region)
        for op in (SX, SZ):
            dense = materialize_terms(local_rule_image(params, op), region)
            big = kron_chain([op] + [np.eye(2, dtype=complex)] * (n - 1))
            ref = lrm.matrix.conj().T @ big @ lrm.matrix
            assert np.abs(dense - ref).max() < 1e-12


def test_shift_rule_image_relocates_operator():
    params = RuleParams(s=1, kind="shift", shift=(1,))
    terms = local_rule_image(params, SX)
    support = {z for t in terms for z in t}
    assert support == {(1,)}


def test_is_clifford():
    assert is_clifford(RuleParams(s=2, kind="cphase", phi=(np.pi, 0.0),
                                  theta=(0.0, np.pi / 2, 0.0)))
    assert not is_clifford(RuleParams(s=2, kind="cphase", phi=(1.0, 0.0)))
    assert not is_clifford(RuleParams(s=1, kind="cphase", phi=(np.pi,),
                                      theta=(0.3, 0.0, 0.0)))


def test_verify_accepts_classified_rules():
    rng = np.random.default_rng(2)
    for s in (1, 2):
        p = RuleParams(s=s, kind="cphase", phi=tuple(rng.uniform(0, 6.2, s)),
                       theta=tuple(rng.uniform(0, 6.2, 3)))
        assert verify_local_rule(p).ok
    assert verify_local_rule(RuleParams(s=2, kind="shift", shift=(0, 1))).ok


def _cnot_rule() -> LocalRuleMatrix:
    """Origin-controlled NOT onto the +e1 neighbor, identity elsewhere."""
    cnot = np.eye(4, dtype=complex)
    cnot[[1, 3]] = cnot[[3, 1]]  # control = bit 0 (origin), target = bit 1
    mat = np.kron(np.eye(2, dtype=complex), cnot)
    return LocalRuleMatrix(s=1, sites=((0,), (1,), (-1,)), matrix=mat)


def test_cnot_rule_fails_verification():
    verdict = verify_local_rule(_cnot_rule())
    assert not verdict.ok
    assert len(verdict.violations) > 0


def test_local_rule_matrix_rejects_nonunitary():
    with pytest.raises(VerificationError):
        LocalRuleMatrix(s=1, sites=((0,), (1,), (-1,)),
                        matrix=np.ones((8, 8), dtype=complex))


def test_input_state_params():
    d = InputStateParams((0.1, 0.2, 0.3))
    chi = rotation_matrix(d.delta)[:, 0]
    assert abs(np.linalg.norm(chi) - 1.0) < 1e-12
