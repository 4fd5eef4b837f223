"""Command-line interface.

Exit-code contract: 0 success, 2 configuration/usage error, 3 resource cap
exceeded, 4 verification failure.  All JSON outputs carry a sha256 fingerprint
of the resolved configuration for provenance.  Angles are radians unless
``--degrees`` is given.
"""

from __future__ import annotations

import functools
import hashlib
import json
import math
import sys
import time

import click

from .circuit import compile_rule_step
from .errors import ConfigError, SimulationCapError, VerificationError
from .lattice import LatticeSpec, cone_size, future_cone
from .rules import InputStateParams, RuleParams, verify_local_rule
from .support_algebra import classify_configuration, index_vector, quadrant_dims
from .sweeps import (
    CSV_HEADER,
    SweepSpec,
    clifford_sweep,
    entropy_at,
    run_sweep,
)

EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_VERIFY = 4


def _fingerprint(config: dict) -> str:
    payload = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def _emit(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)


def _angles(raw: str | None, degrees: bool, n: int | None = None):
    if raw is None:
        return None
    vals = tuple(float(x) for x in raw.split(","))
    if degrees:
        vals = tuple(math.radians(x) for x in vals)
    if n is not None and len(vals) != n:
        raise ConfigError(f"expected {n} comma-separated angles, got {len(vals)}")
    return vals


def _merge_config(kwargs: dict) -> dict:
    """Flag values overlaid on the optional --config JSON file."""
    merged = {}
    path = kwargs.pop("config", None)
    if path:
        with open(path) as fh:
            merged.update(json.load(fh))
    for key, val in kwargs.items():
        if val is not None:
            merged[key] = val
    return merged


def _build_rule(cfg: dict) -> RuleParams:
    degrees = bool(cfg.get("degrees"))
    kind = cfg.get("kind", "cphase")
    s = int(cfg.get("s", 2))
    theta = cfg.get("theta", (0.0, 0.0, 0.0))
    if isinstance(theta, str):
        theta = _angles(theta, degrees, 3)
    phi = cfg.get("phi", ())
    if isinstance(phi, str):
        phi = _angles(phi, degrees)
    shift = cfg.get("shift")
    if isinstance(shift, str):
        shift = tuple(int(x) for x in shift.split(","))
    elif shift is not None:
        shift = tuple(int(x) for x in shift)
    return RuleParams(s=s, kind=kind, phi=tuple(phi), theta=tuple(theta),
                      shift=shift)


def _handled(func):
    """Map library exceptions onto the exit-code contract."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SimulationCapError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_RESOURCE)
        except VerificationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VERIFY)
        except (ConfigError, FileNotFoundError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)

    return wrapper


def rule_options(func):
    for deco in reversed([
        click.option("--s", "s", type=int, default=None, help="lattice dimension"),
        click.option("--kind", type=click.Choice(["cphase", "shift"]), default=None),
        click.option("--phi", default=None, help="comma-separated entangler angles"),
        click.option("--theta", default=None, help="comma-separated rotation angles"),
        click.option("--shift", default=None, help="shift vector, e.g. -1,0"),
        click.option("--degrees", is_flag=True, default=None,
                     help="interpret angles as degrees"),
        click.option("--config", type=click.Path(), default=None,
                     help="JSON file with defaults for any option"),
    ]):
        func = deco(func)
    return func


@click.group()
def main():
    """Simulation and verification toolkit for nearest-neighbor qubit
    cellular automata."""


@main.command()
@rule_options
@click.option("--t", "t", type=int, default=None)
@click.option("--delta", default=None, help="comma-separated input-state angles")
@click.option("--out", type=click.Path(), default=None)
@_handled
def simulate(out, **kwargs):
    """Dense light-cone simulation; reports the origin entropy after t steps."""
    cfg = _merge_config(kwargs)
    params = _build_rule(cfg)
    t = int(cfg.get("t", 1))
    delta = cfg.get("delta", (0.0, 0.0, 0.0))
    if isinstance(delta, str):
        delta = _angles(delta, bool(cfg.get("degrees")), 3)
    t0 = time.time()
    ent = entropy_at(params, InputStateParams(tuple(delta)), t)
    wall = time.time() - t0
    step = compile_rule_step(params, LatticeSpec((4,) * params.s))
    _emit(
        {
            "entropy": ent,
            "cone_sites": cone_size(params.s, t),
            "depth": step.depth,
            "wall_time": wall,
            "fingerprint": _fingerprint(cfg),
        },
        out,
    )


@main.command()
@click.option("--s", "s", type=int, default=None)
@click.option("--t", "t", type=int, default=None)
@click.option("--mode", type=click.Choice(["phi-theta", "phi-phi"]), default=None)
@click.option("--grid-n", type=int, default=None)
@click.option("--theta1-points", type=int, default=None)
@click.option("--theta2-points", type=int, default=None)
@click.option("--delta-samples", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--refine", type=click.Choice(["full", "top", "off"]), default=None)
@click.option("--refine-budget", type=int, default=None)
@click.option("--out", type=click.Path(), required=True, help="output CSV path")
@click.option("--resume", is_flag=True, default=None,
              help="keep completed rows from an existing CSV")
@click.option("--threads", type=int, default=None,
              help="worker count (work items run in grid order; default 1)")
@click.option("--config", type=click.Path(), default=None)
@_handled
def sweep(out, **kwargs):
    """Entanglement sweep over the rule-parameter grid, streamed to CSV."""
    cfg = _merge_config(kwargs)
    resume = bool(cfg.pop("resume", False))
    cfg.pop("threads", None)  # sequential execution keeps output deterministic
    fields = {k: cfg[k] for k in (
        "s", "t", "mode", "grid_n", "theta1_points", "theta2_points",
        "delta_samples", "seed", "refine", "refine_budget") if k in cfg}
    spec = SweepSpec(**fields)
    t0 = time.time()
    result = run_sweep(spec, csv_path=out, resume=resume)
    _emit(
        {
            "csv": out,
            "rows": len(result.rows),
            "grid_max": result.grid_max(),
            "wall_time": time.time() - t0,
            "fingerprint": spec.fingerprint(),
        },
        None,
    )


@main.command("clifford-sweep")
@click.option("--s", "s", type=int, default=2)
@click.option("--t", "t", type=int, default=1)
@click.option("--extent", type=int, default=6)
@click.option("--out", type=click.Path(), required=True)
@_handled
def clifford_sweep_cmd(s, t, extent, out):
    """Stabilizer-tableau entropies over the Clifford parameter grid."""
    rows = clifford_sweep(s, t, extent=extent)
    with open(out, "w") as fh:
        fh.write(CSV_HEADER + ",s_int\n")
        for r in rows:
            fh.write(
                ",".join(["%.9g" % r[k] for k in (
                    "axis1", "axis2", "s_max", "s_min", "delta_s",
                    "theta1_star")] + [str(r["evals"]), str(r["s_int"])])
                + "\n"
            )
    _emit({"csv": out, "rows": len(rows),
           "fingerprint": _fingerprint({"s": s, "t": t, "extent": extent})},
          None)


@main.command()
@rule_options
@_handled
def index(**kwargs):
    """Information-flow index of the rule, printed as exact rationals."""
    cfg = _merge_config(kwargs)
    click.echo(str(index_vector(_build_rule(cfg))))


@main.command()
@rule_options
@click.option("--out", type=click.Path(), default=None)
@_handled
def classify(out, **kwargs):
    """Support-configuration case tag, quadrant dimensions, and index."""
    cfg = _merge_config(kwargs)
    params = _build_rule(cfg)
    tag = classify_configuration(params)
    dims = quadrant_dims(params)
    _emit(
        {
            "case": tag.kind,
            "x": list(tag.x) if tag.x is not None else None,
            "axes": [list(a) if a is not None else None
                     for a in (tag.axes or [])],
            "dims": {",".join(map(str, q)): d for q, d in dims.items()},
            "index": str(index_vector(params)),
            "fingerprint": _fingerprint(cfg),
        },
        out,
    )


@main.command()
@rule_options
@click.option("--tol", type=float, default=1e-10)
@click.option("--out", type=click.Path(), default=None)
@_handled
def verify(tol, out, **kwargs):
    """Well-posedness commutator checks; exit 4 on failure."""
    cfg = _merge_config(kwargs)
    params = _build_rule(cfg)
    verdict = verify_local_rule(params, tol=tol)
    _emit(
        {
            "ok": verdict.ok,
            "checks": len(verdict.violations),
            "violations": [
                [list(off), la, lb, norm]
                for off, la, lb, norm in verdict.violations
            ],
            "fingerprint": _fingerprint(cfg),
        },
        out,
    )
    if not verdict.ok:
        sys.exit(EXIT_VERIFY)


@main.command()
@click.option("--s", "s", type=int, default=2)
@click.option("--t", "t", type=int, default=1)
@click.option("--sites", is_flag=True, help="also list the cone sites")
@_handled
def cone(s, t, sites):
    """Causal cone size (and optionally the site list) for (s, t)."""
    payload = {"s": s, "t": t, "cone_sites": cone_size(s, t)}
    if sites:
        payload["sites"] = [list(z) for z in future_cone((0,) * s, t)]
    _emit(payload, None)


@main.command("emit-circuit")
@rule_options
@click.option("--extent", type=int, default=4)
@click.option("--out", type=click.Path(), required=True)
@_handled
def emit_circuit(extent, out, **kwargs):
    """Compile one automaton step on a periodic lattice and write gate JSON."""
    cfg = _merge_config(kwargs)
    params = _build_rule(cfg)
    circuit = compile_rule_step(params, LatticeSpec((extent,) * params.s))
    with open(out, "w") as fh:
        json.dump(
            {
                "rule": params.to_json(),
                "extent": extent,
                "depth": circuit.depth,
                "layers": circuit.to_json(),
                "fingerprint": _fingerprint(cfg),
            },
            fh, indent=2,
        )
        fh.write("\n")
    _emit({"out": out, "depth": circuit.depth}, None)


if __name__ == "__main__":
    main()
