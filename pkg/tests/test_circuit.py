"""Circuit compilation: step layers, shift chains, and Margolus blocks."""

import numpy as np

from vnqca.circuit import (
    compile_margolus,
    compile_rule_step,
    compile_shift,
    compile_step,
    lattice_bonds,
)
from vnqca.lattice import LatticeSpec
from vnqca.rules import InputStateParams, RuleParams
from vnqca.statevector import apply_circuit, init_product_state


def _random_state(spec, rng):
    state = init_product_state(InputStateParams((0.0, 0.0, 0.0)), spec.sites())
    amps = rng.normal(size=2**state.n) + 1j * rng.normal(size=2**state.n)
    state.psi = amps / np.linalg.norm(amps)
    return state


def test_step_depth_bound():
    for s, extent in ((1, 4), (2, 4), (3, 4)):
        params = RuleParams(s=s, kind="cphase", phi=(1.0,) * s,
                           theta=(0.2, 0.3, 0.4))
        circ = compile_step(params, LatticeSpec((extent,) * s))
        assert circ.depth <= 2**s + 1


def test_shift_depth_and_permutation():
    for n in range(2, 9):
        spec = LatticeSpec((n,))
        circ = compile_shift((1,), spec)
        assert circ.depth == n - 1
        rng = np.random.default_rng(n)
        state = _random_state(spec, rng)
        before = state.psi.copy()
        apply_circuit(state, circ)
        # Heisenberg images move by +e1, so occupations move by -e1
        for idx in range(2**n):
            bits = [(idx >> k) & 1 for k in range(n)]
            moved = sum(b << ((k - 1) % n) for k, b in enumerate(bits))
            assert abs(state.psi[moved] - before[idx]) < 1e-12


def test_rule_step_equals_margolus():
    rng = np.random.default_rng(5)
    spec = LatticeSpec((4, 4))
    params = RuleParams(s=2, kind="cphase",
                        phi=tuple(rng.uniform(0, 6.2, 2)),
                        theta=tuple(rng.uniform(0, 6.2, 3)))
    step = compile_rule_step(params, spec)
    blocks = compile_margolus(params, spec, (1, 1))
    assert blocks.depth == 2
    for trial in range(3):
        s1 = _random_state(spec, rng)
        s2 = init_product_state(InputStateParams((0, 0, 0)), spec.sites())
        s2.psi = s1.psi.copy()
        apply_circuit(s1, step)
        apply_circuit(s2, blocks)
        assert np.abs(s1.psi - s2.psi).max() < 1e-10


def test_lattice_bonds_count():
    spec = LatticeSpec((4, 4))
    bonds = lattice_bonds(spec)
    assert len(bonds) == 2 * 16  # one bond per site per axis on the torus


def test_shift_rule_step():
    spec = LatticeSpec((5,))
    params = RuleParams(s=1, kind="shift", shift=(1,), theta=(0.0, 0.0, 0.0))
    circ = compile_rule_step(params, spec)
    rng = np.random.default_rng(3)
    state = _random_state(spec, rng)
    before = state.psi.copy()
    apply_circuit(state, circ)
    n = state.n
    for idx in range(2**n):
        bits = [(idx >> k) & 1 for k in range(n)]
        moved = sum(b << ((k - 1) % n) for k, b in enumerate(bits))
        assert abs(state.psi[moved] - before[idx]) < 1e-12
