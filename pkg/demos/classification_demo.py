"""Walk through the support-algebra classification of nearest-neighbor rules.

Every translation-invariant rule built from a controlled-phase entangler and
a single-qubit rotation lands in one of two structural cases:

* CASE_I  -- the origin algebra is carried to a single neighbor (shifts and
  trivial couplings), and the rule can transport information ballistically.
* CASE_II -- the origin keeps a full single-qubit factor and each neighbor
  receives an abelian (axis) factor; these rules are finite-depth circuits.

Run:  python3 demos/classification_demo.py
"""

import numpy as np

from vnqca import (
    RuleParams,
    classify_configuration,
    index_vector,
    quadrant_dims,
)
from vnqca.rules import verify_local_rule


def describe(name: str, params: RuleParams) -> None:
    tag = classify_configuration(params)
    iv = index_vector(params)
    verdict = verify_local_rule(params)
    print(f"--- {name}")
    print(f"    case:    {tag.kind}" + (f"  x = {tag.x}" if tag.x else ""))
    if tag.axes:
        axes = ", ".join(
            np.array2string(np.asarray(a), precision=3) for a in tag.axes
        )
        print(f"    axes:    {axes}")
    dims = quadrant_dims(params)
    print("    quadrant dims:",
          {"".join("+-"[c < 0] for c in q): d for q, d in dims.items()})
    print(f"    index:   {iv}   well-posed: {verdict.ok}")


def main() -> None:
    describe("1D entangling rule (CZ + generic rotation)",
             RuleParams(s=1, kind="cphase", phi=(np.pi,),
                        theta=(0.3, 1.1, 0.4)))
    describe("2D entangling rule (generic angles)",
             RuleParams(s=2, kind="cphase", phi=(1.2, 2.5),
                        theta=(0.7, 0.9, 0.2)))
    describe("2D decoupled rule (zero coupling)",
             RuleParams(s=2, kind="cphase", phi=(0.0, 0.0),
                        theta=(0.5, 0.5, 0.5)))
    describe("1D left shift", RuleParams(s=1, kind="shift", shift=(-1,)))
    describe("2D shift along -x", RuleParams(s=2, kind="shift", shift=(-1, 0)))
    print()
    print("Entangling rules have trivial index (implementable as depth-2")
    print("block circuits); shifts have a nontrivial rational index and")
    print("cannot be realized by any finite-depth local circuit.")


if __name__ == "__main__":
    main()
