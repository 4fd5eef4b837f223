"""Qubit cellular automata on hypercubic lattices.

Simulation and verification toolkit for the classified nearest-neighbor qubit
QCA rule families: circuit compilation, dense and stabilizer simulation,
support-algebra machinery, the information-flow index, and entanglement
sweeps.
"""

from .lattice import (
    LatticeSpec,
    cone_size,
    future_cone,
    margolus_partitions,
    quadrants,
    super_cell,
    von_neumann_neighborhood,
)
from .rules import (
    InputStateParams,
    LocalRuleMatrix,
    RuleParams,
    cphase_matrix,
    is_clifford,
    local_rule_image,
    local_rule_matrix,
    rotation_matrix,
    verify_local_rule,
)
from .circuit import Circuit, Gate, compile_margolus, compile_rule_step, compile_shift, compile_step
from .statevector import (
    StateVector,
    apply_circuit,
    entropy,
    init_product_state,
    reduced_density,
)
from .support_algebra import (
    CaseTag,
    IndexVector,
    MatrixAlgebra,
    classify_configuration,
    close_algebra,
    index_vector,
    quadrant_dims,
    quadrant_supports,
)
from .sweeps import (
    ConeEvaluator,
    SweepResult,
    SweepSpec,
    clifford_sweep,
    delta_S,
    entropy_at,
    run_sweep,
    smax_phi_phi,
    smax_phi_theta,
)

__version__ = "0.1.0"
