"""potts-flow: sample, count and verify from the command line.

Every command writes JSON (tv-curve writes CSV) carrying a manifest of its
inputs and derived quantities. Exit codes: 0 success, 1 I/O error,
2 inadmissible parameters, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np
import scipy

from . import __version__, couplings, diagnostics, flow_chain, joint_chain, lattices, oracle
from .counting import EstimateConfig, estimate_z_flow, estimate_z_potts
from .cycles import EvenGenSet, GenParams, NotAFlowError, make_gen_set, parse_gens, verify_generates
from .flow_chain import FlowChainConfig, OutOfRange
from .flows import flow_to_json
from .graph import GraphError, OrientedMultigraph, fundamental_cycles
from .rng import Purpose, stream

SCHEMA = 1
EXIT_OK, EXIT_IO, EXIT_PARAMS, EXIT_FAILED = 0, 1, 2, 3

DEFAULTS = {
    "gens": "auto",
    "q": 2,
    "delta": 0.01,
    "epsilon": 0.1,
    "seed": 0,
    "chain": "flow",
    "threads": 1,
    "median_of": 1,
    "model": "flow",
    "suite": "all",
    "xs": "0.3,0.6,0.9",
    "t_max": 100,
    "start": "zero",
}


class InadmissibleError(ValueError):
    def __init__(self, message: str, threshold: float | None = None):
        super().__init__(message)
        self.threshold = threshold


@dataclass
class Instance:
    source: str
    gens_source: str
    graph: OrientedMultigraph
    gens: EvenGenSet
    bound_params: GenParams


def _clamped(p: GenParams) -> GenParams:
    return GenParams(d=max(2, p.d), iota=max(1, p.iota), ell=max(3, p.ell), s=max(2, p.s))


def load_instance(args) -> Instance:
    if not args.graph:
        raise InadmissibleError("--graph is required for this command")
    g, lat = lattices.load_source(args.graph)
    if args.gens == "auto":
        if lat is not None:
            gens, src, bp = lat.gens, f"lattice:{lat.kind}", lat.class_params
        else:
            gens = make_gen_set(g, fundamental_cycles(g))
            src, bp = "fundamental-cycles", _clamped(gens.params)
    else:
        gens = parse_gens(Path(args.gens).read_text(), g)
        if not verify_generates(gens, g):
            raise InadmissibleError(f"{args.gens} does not generate the flow space of the graph")
        src, bp = args.gens, _clamped(gens.params)
    if args.bound_params:
        bp = GenParams(*(int(v) for v in args.bound_params.split(",")))
    return Instance(args.graph, src, g, gens, bp)


def _versions() -> dict:
    return {
        "pottsflow": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
        "python": platform.python_version(),
    }


def manifest(args, inst: Instance | None = None, **derived) -> dict:
    inputs = {k: getattr(args, k, None) for k in ("q", "x", "w", "delta", "epsilon", "seed", "chain", "steps")}
    out = {
        "command": args.command,
        "graph": inst.source if inst else args.graph,
        "gens": inst.gens_source if inst else None,
        "inputs": {k: v for k, v in inputs.items() if v is not None},
    }
    if inst is not None:
        p = inst.gens.params
        out["derived"] = {
            "n": inst.graph.n_vertices,
            "m": inst.graph.n_edges,
            "r": inst.gens.r,
            "instance_params": p._asdict(),
            "bound_params": inst.bound_params._asdict(),
            **derived,
        }
    out["versions"] = _versions()
    return out


def _require_x(args) -> float:
    if args.x is None and args.w is None:
        raise InadmissibleError("give --x or --w")
    if args.x is not None:
        return float(args.x)
    x = couplings.x_from_potts(float(args.w), args.q)
    if not 0 < x < 1:
        raise InadmissibleError(f"w = {args.w} maps to x = {x:.6g}, outside (0, 1)")
    return x


def _flow_sample(args, inst: Instance, x: float, rng):
    cfg = FlowChainConfig(x, args.q, inst.gens, args.seed)
    bp = inst.bound_params
    th = flow_chain.threshold(bp.d, bp.iota)
    bound = flow_chain.mixing_time_bound(cfg, bp.d, bp.iota, args.delta)
    if bound is None and args.steps is None:
        raise InadmissibleError(f"x = {x:g} must exceed the flow chain threshold 1 - 2/((d+1)·iota) = {th:.6g}", th)
    steps = bound if args.steps is None else args.steps
    f = flow_chain.run(flow_chain.zero_flow(inst.graph, args.q), cfg, steps, rng)
    return f, {"threshold": th, "xi": x - th, "bound": bound, "steps": steps}


def _joint_sample(args, inst: Instance, x: float, rng):
    bp = inst.bound_params
    th = joint_chain.threshold(args.q, bp.ell, bp.s)
    try:
        p, alpha = joint_chain.compute_p(x, args.q, bp.ell, bp.s, inst.graph.n_edges, inst.gens.r)
    except OutOfRange as exc:
        raise InadmissibleError(str(exc), exc.threshold) from None
    cfg = joint_chain.JointChainConfig(x, args.q, inst.gens, p, args.seed)
    bound = joint_chain.mixing_time_bound(inst.graph, cfg, bp.ell, bp.s, args.delta)
    steps = bound if args.steps is None else args.steps
    st = joint_chain.run(joint_chain.initial_state(inst.graph, args.q), inst.graph, cfg, steps, rng)
    return st, {"threshold": th, "xi": x - th, "p": p, "alpha": alpha, "bound": bound, "steps": steps}


# -- commands ---------------------------------------------------------------------------


def cmd_sample_flow(args) -> tuple[int, dict]:
    inst = load_instance(args)
    x = _require_x(args)
    f, d = _flow_sample(args, inst, x, stream(args.seed, 0, Purpose.CHAIN))
    return EXIT_OK, {"flow": flow_to_json(f, inst.graph), "manifest": manifest(args, inst, **d)}


def cmd_sample_joint(args) -> tuple[int, dict]:
    inst = load_instance(args)
    x = _require_x(args)
    st, d = _joint_sample(args, inst, x, stream(args.seed, 0, Purpose.CHAIN))
    out = {
        "flow": flow_to_json(st.f, inst.graph),
        "edge_set": sorted(st.F),
        "p": d["p"],
        "alpha": d["alpha"],
        "steps": d["steps"],
        "manifest": manifest(args, inst, **d),
    }
    return EXIT_OK, out


def _rc_sample(args, inst: Instance, x: float):
    rng = stream(args.seed, 0, Purpose.CHAIN)
    if args.chain == "joint":
        st, d = _joint_sample(args, inst, x, rng)
        return st.F, d
    f, d = _flow_sample(args, inst, x, rng)
    return couplings.flow_to_rc(inst.graph, f, x, stream(args.seed, 0, Purpose.COUPLING)), d


def cmd_sample_rc(args) -> tuple[int, dict]:
    inst = load_instance(args)
    x = _require_x(args)
    F, d = _rc_sample(args, inst, x)
    out = {
        "edge_set": sorted(F),
        "param_map": couplings.ParamMap(args.q, x).as_dict(),
        "manifest": manifest(args, inst, **d),
    }
    return EXIT_OK, out


def cmd_sample_potts(args) -> tuple[int, dict]:
    inst = load_instance(args)
    x = _require_x(args)
    F, d = _rc_sample(args, inst, x)
    sigma = couplings.rc_to_potts(inst.graph, F, args.q, stream(args.seed, 1, Purpose.COUPLING))
    out = {
        "spins": list(sigma.spins),
        "monochromatic_edges": couplings.monochromatic_edges(inst.graph, sigma),
        "param_map": couplings.ParamMap(args.q, x).as_dict(),
        "manifest": manifest(args, inst, **d),
    }
    return EXIT_OK, out


def cmd_estimate_z(args) -> tuple[int, dict]:
    inst = load_instance(args)
    cfg = EstimateConfig(
        epsilon=args.epsilon,
        chain=args.chain,
        samples_per_ratio=args.samples_per_ratio,
        delta_per_sample=args.delta_per_sample,
        seed=args.seed,
        median_of=args.median_of,
        threads=args.threads,
        bound_params=inst.bound_params,
    )
    try:
        if args.model == "flow":
            if args.x is None:
                raise InadmissibleError("--model flow needs --x")
            rep = estimate_z_flow(inst.graph, inst.gens, args.q, float(args.x), cfg)
        else:
            w = args.w if args.w is not None else couplings.potts_param(float(args.x), args.q)
            rep = estimate_z_potts(inst.graph, inst.gens, args.q, float(w), cfg)
    except OutOfRange as exc:
        raise InadmissibleError(str(exc), exc.threshold) from None
    bp = inst.bound_params
    if args.chain == "flow":
        th = flow_chain.threshold(bp.d, bp.iota)
    else:
        th = joint_chain.threshold(args.q, bp.ell, bp.s)
    out = rep.as_dict(timings=args.timings)
    out["manifest"] = manifest(args, inst, threshold=th, xi=rep.x - th)
    return EXIT_OK, out


def _check(name: str, ok: bool | None, **details) -> dict:
    return {"name": name, "status": "skipped" if ok is None else ("pass" if ok else "fail"), **details}


def _suite_identities(args, inst: Instance) -> list[dict]:
    x = _require_x(args)
    m = inst.graph.n_edges
    rep = oracle.identity_suite(inst.graph, args.q, x, check_flow_count=2**m <= 4096)
    return [
        _check("potts-identity", rep.potts_rel_err <= 1e-9, rel_err=rep.potts_rel_err),
        _check("rc-identity", rep.rc_rel_err <= 1e-9, rel_err=rep.rc_rel_err),
        _check(
            "flow-count",
            (not rep.flow_count_failures) if rep.flow_count_checked else None,
            subsets=rep.flow_count_checked,
            failures=len(rep.flow_count_failures),
        ),
    ]


def _chain_check(name: str, build) -> dict:
    try:
        ch = build()
    except oracle.TooLarge as exc:
        return _check(name, None, reason=str(exc))
    rs, db, fp = ch.row_sum_error, ch.detailed_balance_error, ch.fixed_point_residual
    ok = rs <= 1e-12 and db <= 1e-12 and fp <= 1e-10
    return _check(name, ok, states=len(ch.states), row_sum_error=rs, detailed_balance_error=db, fixed_point_residual=fp)


def _suite_chains(args, inst: Instance) -> list[dict]:
    x = _require_x(args)
    g, gens, q, bp = inst.graph, inst.gens, args.q, inst.bound_params
    try:
        p, _ = joint_chain.compute_p(x, q, bp.ell, bp.s, g.n_edges, gens.r)
    except OutOfRange:
        p = 0.5  # stationarity holds for every p in (0, 1)
    return [
        _chain_check("flow-chain", lambda: oracle.flow_chain_matrix(g, FlowChainConfig(x, q, gens))),
        _chain_check("joint-chain", lambda: oracle.joint_chain_matrix(g, joint_chain.JointChainConfig(x, q, gens, p))),
    ]


def _suite_lemma34(args) -> list[dict]:
    res = oracle.lemma34_sweep()
    S, bound, _ = oracle.lemma34_check(0.5, 1, (1, 0), (0, 1))
    return [
        _check("sum-of-minima", res.failures == 0, cases=res.cases, worst_slack=res.worst_slack),
        _check("sum-of-minima-equality", abs(S - bound) <= 1e-12, gap=abs(S - bound)),
    ]


def cmd_verify(args) -> tuple[int, dict]:
    suites = ["identities", "chains", "lemma34"] if args.suite == "all" else [args.suite]
    inst = load_instance(args) if set(suites) - {"lemma34"} else None
    checks = []
    for s in suites:
        if s == "identities":
            checks += [dict(c, suite=s) for c in _suite_identities(args, inst)]
        elif s == "chains":
            checks += [dict(c, suite=s) for c in _suite_chains(args, inst)]
        else:
            checks += [dict(c, suite=s) for c in _suite_lemma34(args)]
    for c in checks:
        print(f"{c['status'].upper():7s} {c['suite']}/{c['name']}", file=sys.stderr)
    failed = any(c["status"] == "fail" for c in checks)
    out = {"ok": not failed, "checks": checks, "manifest": manifest(args, inst)}
    return (EXIT_FAILED if failed else EXIT_OK), out


def cmd_duality(args) -> tuple[int, dict]:
    if args.L is None or args.x is None:
        raise InadmissibleError("duality needs --L and --x")
    rep = diagnostics.verify_duality(args.L, args.q, float(args.x))
    out = {
        "ok": rep.ok,
        "L": rep.L,
        "q": rep.q,
        "x": rep.x,
        "states": rep.states,
        "bijective": rep.bijective,
        "max_entry_diff": rep.max_entry_diff,
        "manifest": manifest(args),
    }
    return (EXIT_OK if rep.ok else EXIT_FAILED), out


def cmd_tv_curve(args) -> tuple[int, str]:
    inst = load_instance(args)
    xs = [float(v) for v in args.xs.split(",")]
    rows = diagnostics.tv_curve(inst.graph, inst.gens, args.q, xs, args.t_max, args.start)
    return EXIT_OK, diagnostics.tv_curve_csv(rows)


COMMANDS = {
    "sample-flow": cmd_sample_flow,
    "sample-joint": cmd_sample_joint,
    "sample-rc": cmd_sample_rc,
    "sample-potts": cmd_sample_potts,
    "estimate-z": cmd_estimate_z,
    "verify": cmd_verify,
    "duality": cmd_duality,
    "tv-curve": cmd_tv_curve,
}


# -- argument handling ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults (keys as option names)")
    common.add_argument("--graph", help='lattice spec ("grid:WxH", "grid3:WxHxD", "tri:WxH", "hex:WxH") or graph file')
    common.add_argument("--gens", help='"auto" or a generating-set file')
    common.add_argument("--bound-params", help="override d,iota,ell,s used in the mixing bounds")
    common.add_argument("--q", type=int)
    common.add_argument("--x", type=float)
    common.add_argument("--w", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--steps", type=int)
    common.add_argument("--chain", choices=["flow", "joint"])
    common.add_argument("--samples-per-ratio", type=int)
    common.add_argument("--delta-per-sample", type=float)
    common.add_argument("--median-of", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--model", choices=["flow", "potts"])
    common.add_argument("--suite", choices=["identities", "chains", "lemma34", "all"])
    common.add_argument("--L", type=int)
    common.add_argument("--xs", help="comma-separated x values for tv-curve")
    common.add_argument("--t-max", type=int)
    common.add_argument("--start", choices=["zero", "worst"], help="tv-curve starting state")
    common.add_argument("--timings", action="store_true", default=None, help="include wall-clock times")
    common.add_argument("--out", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="potts-flow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _apply_defaults(args) -> None:
    cfg = {}
    if args.config:
        cfg = {k.replace("-", "_"): v for k, v in json.loads(Path(args.config).read_text()).items()}
    for key, value in {**DEFAULTS, **cfg}.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    args.timings = bool(args.timings)


def _emit(payload, out: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps({"schema": SCHEMA, **payload}, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, exc: Exception, **extra) -> None:
    body = {"schema": SCHEMA, "error": kind, "message": str(exc), **extra}
    if extra.get("threshold") is not None:
        print(f"error: {exc} (threshold {extra['threshold']:.6g})", file=sys.stderr)
    print(json.dumps(body), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        _apply_defaults(args)
        code, payload = COMMANDS[args.command](args)
        if args.timings and isinstance(payload, dict):
            payload["manifest"]["timings"] = {"wall_time": time.perf_counter() - start}
        _emit(payload, args.out)
        return code
    except (InadmissibleError, OutOfRange) as exc:
        _error("inadmissible", exc, threshold=getattr(exc, "threshold", None))
        return EXIT_PARAMS
    except OSError as exc:
        _error("io", exc)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        _error("io", exc)
        return EXIT_IO
    except (GraphError, NotAFlowError, oracle.TooLarge, ValueError) as exc:
        _error("inadmissible", exc)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
