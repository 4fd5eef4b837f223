"""Acceptance suite: one pass/fail line per top-level criterion."""

import time
from fractions import Fraction

import numpy as np
from scipy.stats import qmc

from vnqca.circuit import compile_margolus, compile_rule_step, compile_shift, compile_step
from vnqca.clifford import StabilizerTableau, evolve_tableau, stabilizer_entropy
from vnqca.lattice import LatticeSpec, cone_size
from vnqca.rules import (
    InputStateParams,
    LocalRuleMatrix,
    RuleParams,
    local_rule_image,
    materialize_terms,
    verify_local_rule,
)
from vnqca.statevector import (
    apply_circuit,
    entropy,
    init_product_state,
    reduced_density,
)
from vnqca.support_algebra import (
    classify_configuration,
    close_algebra,
    embed_operator,
    index_vector,
    single_site_support,
    support_on,
)
from vnqca.sweeps import ConeEvaluator, SweepSpec, entropy_at, run_sweep

TOL = 1e-10


def _report(name: str, ok: bool, detail: str = ""):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name} {detail}"


def _random_rules(n_each: int = 50, seed: int = 1234):
    """Seeded entangler+rotation rules, half 1D and half 2D."""
    rng = np.random.default_rng(seed)
    rules = []
    for s in (1, 2):
        for _ in range(n_each):
            rules.append(RuleParams(
                s=s, kind="cphase",
                phi=tuple(rng.uniform(0.2, 2 * np.pi - 0.2, s)),
                theta=tuple(rng.uniform(0.0, 2 * np.pi, 3)),
            ))
    return rules


RULES = _random_rules()


def _deltas(n, seed=99):
    pts = 2 * np.pi * qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    return [InputStateParams((a, b, 0.0)) for a, b in pts]


def test_criterion_separability_loci():
    t0 = time.time()
    rng = np.random.default_rng(2)
    deltas = _deltas(50)
    worst = 0.0
    for t in (1, 2, 3):
        for _ in range(5):
            theta = tuple(rng.uniform(0, 2 * np.pi, 3))
            full_twist = ConeEvaluator(
                RuleParams(s=2, kind="cphase", phi=(2 * np.pi,) * 2,
                           theta=theta), t)
            resonant = ConeEvaluator(
                RuleParams(s=2, kind="cphase", phi=(2 * np.pi / t,) * 2,
                           theta=(theta[0], np.pi, theta[2])), t)
            for d in deltas:
                worst = max(worst, full_twist.entropy(d), resonant.entropy(d))
    wall = time.time() - t0
    _report("separability loci", worst <= 1e-6 and wall < 120,
            f"max entropy {worst:.3g}, {wall:.1f}s")


def test_criterion_index_values():
    t0 = time.time()
    ok = True
    for s in (1, 2, 3):
        ident = RuleParams(s=s, kind="cphase", phi=(0.0,) * s,
                           theta=(0.0, 0.0, 0.0))
        ok &= index_vector(ident).components == (Fraction(1),) * s
    ok &= index_vector(
        RuleParams(s=2, kind="shift", shift=(-1, 0))
    ).components == (Fraction(2), Fraction(1))
    ok &= index_vector(
        RuleParams(s=1, kind="shift", shift=(1,))
    ).components == (Fraction(1, 2),)
    wall = time.time() - t0
    _report("index values", ok and wall < 60, f"{wall:.1f}s")


def test_criterion_cone_sizes():
    expected = {(2, 1): 5, (2, 2): 13, (2, 3): 25, (3, 2): 25}
    ok = all(cone_size(s, t) == v for (s, t), v in expected.items())
    _report("cone sizes", ok)


def test_criterion_depth_accounting():
    ok = True
    for s in (1, 2, 3):
        p = RuleParams(s=s, kind="cphase", phi=(1.0,) * s,
                       theta=(0.1, 0.2, 0.3))
        ok &= compile_step(p, LatticeSpec((4,) * s)).depth <= 2**s + 1
    for n in range(2, 9):
        spec = LatticeSpec((n,))
        circ = compile_shift((1,), spec)
        ok &= circ.depth == n - 1
        rng = np.random.default_rng(n)
        st = init_product_state(InputStateParams((0, 0, 0)), spec.sites())
        amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        st.psi = amps / np.linalg.norm(amps)
        before = st.psi.copy()
        apply_circuit(st, circ)
        for idx in range(2**n):
            bits = [(idx >> k) & 1 for k in range(n)]
            moved = sum(b << ((k - 1) % n) for k, b in enumerate(bits))
            ok &= abs(st.psi[moved] - before[idx]) < 1e-12
    _report("depth accounting", ok)


def _cnot_rule():
    cnot = np.eye(4, dtype=complex)
    cnot[[1, 3]] = cnot[[3, 1]]
    mat = np.kron(np.eye(2, dtype=complex), cnot)
    return LocalRuleMatrix(s=1, sites=((0,), (1,), (-1,)), matrix=mat)


def test_criterion_classification_dichotomy():
    t0 = time.time()
    ok = True
    for p in RULES:
        tag = classify_configuration(p, tol=TOL)
        ok &= tag.kind == "CASE_II"
        ok &= single_site_support(p, (0,) * p.s, [(0,) * p.s]).dim == 4
        ok &= all(a is not None and abs(np.linalg.norm(a) - 1.0) < 1e-8
                  for a in tag.axes)
        ok &= verify_local_rule(p, tol=TOL).ok
    for shift in ((1,), (-1, 0), (0, 0, 1)):
        tag = classify_configuration(
            RuleParams(s=len(shift), kind="shift", shift=shift), tol=TOL)
        ok &= tag.kind == "CASE_I"
    ok &= not verify_local_rule(_cnot_rule(), tol=TOL).ok
    wall = time.time() - t0
    _report("classification dichotomy", ok and wall < 300, f"{wall:.1f}s")


def test_criterion_index_and_margolus():
    rng = np.random.default_rng(77)
    ok = True
    for p in RULES:
        ok &= index_vector(p).is_trivial()
    for shift in ((1,), (-1,), (-1, 0), (0, 1), (0, 0, 1)):
        p = RuleParams(s=len(shift), kind="shift", shift=shift)
        ok &= not index_vector(p).is_trivial()
    spec = LatticeSpec((4, 4))
    for p in [r for r in RULES if r.s == 2][:20]:
        step = compile_rule_step(p, spec)
        blocks = compile_margolus(p, spec, (1, 1))
        ok &= blocks.depth == 2
        st = init_product_state(InputStateParams((0, 0, 0)), spec.sites())
        amps = rng.normal(size=2**16) + 1j * rng.normal(size=2**16)
        st.psi = amps / np.linalg.norm(amps)
        st2 = init_product_state(InputStateParams((0, 0, 0)), spec.sites())
        st2.psi = st.psi.copy()
        apply_circuit(st, step)
        apply_circuit(st2, blocks)
        ok &= bool(np.abs(st.psi - st2.psi).max() < 1e-10)
    _report("index triviality and block implementation", ok)


def test_criterion_oracle_equivalence():
    quarter = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]
    spec2 = LatticeSpec((4, 4))
    worst_clifford = 0.0
    for phi1 in (0.0, np.pi):
        for phi2 in (0.0, np.pi):
            for th2 in quarter:
                p = RuleParams(s=2, kind="cphase", phi=(phi1, phi2),
                               theta=(0.0, th2, 0.0))
                circ = compile_rule_step(p, spec2)
                for d1 in quarter:
                    for d2 in quarter:
                        delta = InputStateParams((d1, d2, 0.0))
                        tab = StabilizerTableau.product_state(
                            delta, spec2.sites())
                        st = init_product_state(delta, spec2.sites())
                        for _ in range(2):
                            tab = evolve_tableau(tab, circ)
                            apply_circuit(st, circ)
                            s_tab = stabilizer_entropy(tab, [(0, 0)])
                            s_dense = entropy(reduced_density(st, (0, 0)))
                            worst_clifford = max(worst_clifford,
                                                 abs(s_tab - s_dense))
    rng = np.random.default_rng(5)
    worst_cone = 0.0
    points = []
    for k in range(20):
        s = 1 if k < 15 else 2
        t = (k % 3) + 1 if s == 1 else 1
        points.append((RuleParams(
            s=s, kind="cphase", phi=tuple(rng.uniform(0, 2 * np.pi, s)),
            theta=tuple(rng.uniform(0, 2 * np.pi, 3))),
            InputStateParams(tuple(rng.uniform(0, 2 * np.pi, 2)) + (0.0,)), t))
    for p, delta, t in points:
        spec = LatticeSpec((8,)) if p.s == 1 else LatticeSpec((4, 4))
        st = init_product_state(delta, spec.sites())
        circ = compile_rule_step(p, spec)
        for _ in range(t):
            apply_circuit(st, circ)
        s_full = entropy(reduced_density(st, (0,) * p.s))
        s_cone = entropy_at(p, delta, t)
        worst_cone = max(worst_cone, abs(s_full - s_cone))
    ok = worst_clifford < 1e-9 and worst_cone < 1e-10
    _report("oracle equivalence", ok,
            f"clifford {worst_clifford:.2g}, cone {worst_cone:.2g}")


def test_criterion_entanglement_growth():
    t0 = time.time()
    common = dict(grid_n=25, theta2_points=12, delta_samples=24)
    m1 = run_sweep(SweepSpec(s=2, t=1, refine="off", **common)).grid_max()
    m2 = run_sweep(SweepSpec(s=2, t=2, refine="off", **common)).grid_max()
    m3_t0 = time.time()
    m3 = run_sweep(SweepSpec(s=2, t=3, theta1_points=9, refine="top",
                             **common)).grid_max()
    m3_wall = time.time() - m3_t0
    m2_3d = run_sweep(SweepSpec(s=3, t=2, refine="off", **common)).grid_max()
    wall = time.time() - t0
    ok = (m3 >= 0.99 and m2 >= m1 - 1e-6 and m3 >= m2 - 1e-6
          and m2_3d >= m2 - 1e-6 and m3_wall < 1800)
    _report("entanglement growth",
            ok, f"max t=1..3: {m1:.4f} {m2:.4f} {m3:.4f}, "
                f"s=3 t=2: {m2_3d:.4f}, t=3 sweep {m3_wall:.0f}s")


def _images_on(p, x, region):
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return [materialize_terms(local_rule_image(p, op, site=x), region)
            for op in (sx, sy, sz)]


def test_criterion_support_algebra_properties():
    rng = np.random.default_rng(321)
    ok = True
    for k in range(20):
        s = 1 if k % 2 == 0 else 2
        p = RuleParams(s=s, kind="cphase",
                       phi=tuple(rng.uniform(0.2, 2 * np.pi - 0.2, s)),
                       theta=tuple(rng.uniform(0, 2 * np.pi, 3)))
        e1 = (1,) + (0,) * (s - 1)
        origin = (0,) * s
        far = tuple(2 * c for c in e1)
        # refinement: support on a two-site block sits inside the product
        # of the single-site supports
        keep = [origin, e1]
        coarse = single_site_support(p, origin, keep)
        fine_parts = [single_site_support(p, origin, [z]) for z in keep]
        gens = []
        for part, z in zip(fine_parts, keep):
            gens.extend(embed_operator(b, [z], keep) for b in part.basis)
        fine = close_algebra(gens, keep)
        ok &= coarse.dim <= fine.dim
        ok &= all(fine.contains(b, tol=1e-8) for b in coarse.basis)
        # disjoint-site images commute on the overlap of their cones
        a = single_site_support(p, origin, [e1])
        b = single_site_support(p, far, [e1])
        for ma in a.basis:
            for mb in b.basis:
                ok &= bool(np.abs(ma @ mb - mb @ ma).max() < TOL)
        # translation invariance of support dimensions
        shift_keep = [tuple(c + e for c, e in zip(z, e1)) for z in keep]
        ok &= (single_site_support(p, e1, shift_keep).dim
               == single_site_support(p, origin, keep).dim)
        # two-site support equals the algebra generated by the single-site
        # supports on the same window
        union = sorted({tuple(a_ + b_ for a_, b_ in zip(x, y))
                        for x in (origin, e1)
                        for y in [tuple(z) for z in
                                  np.vstack([np.zeros((1, s), int),
                                             np.eye(s, dtype=int),
                                             -np.eye(s, dtype=int)])]})
        images = (_images_on(p, origin, union) + _images_on(p, e1, union))
        joint = support_on(images, union, keep)
        single_gens = []
        for x in (origin, e1):
            alg = single_site_support(p, x, keep)
            single_gens.extend(alg.basis)
        generated = close_algebra(single_gens, keep)
        ok &= joint.dim == generated.dim
    _report("support-algebra properties", ok)
