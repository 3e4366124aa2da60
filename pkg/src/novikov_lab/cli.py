"""Batch front door: ingest JSON specs, run the computations, emit reports.

Exit codes: 0 when the computation ran and every checked identity held,
1 when a verdict failed (the report carries the witness), 2 for input or
validation problems.  Reports are deterministic for a fixed seed; JSON
output is sorted and indented so golden-file comparisons are byte-exact.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .chain_graph import build_chain_graph, detect_gradient_like, pi_morse_report
from .complexes import ComplexError, homology
from .conley import ConleyError
from .flows import AlphaFlowParams, FlowError, SamplingPlan, certify_alpha_flow
from .report import (
    ReportError,
    euler_check,
    main_equality_check,
    morse_smale_check,
    novikov_inequality_check,
    vanishing_check,
)
from .schemas import (
    SchemaError,
    load_complex,
    load_descriptors,
    load_flow,
    parse_counts,
    parse_point,
)
from .twisted import TwistError, build_twisted, novikov_numbers, torsion_numbers

EXIT_OK = 0
EXIT_VERDICT_FAILED = 1
EXIT_INPUT_ERROR = 2


def _poly_dict(poly):
    return {"coeffs": list(poly.coeffs), "text": poly.pretty()}


def _verdict_dict(verdict):
    return {
        "identity": verdict.identity_name,
        "lhs": _poly_dict(verdict.lhs),
        "rhs": _poly_dict(verdict.rhs),
        "q_polys": [_poly_dict(q) for q in verdict.q_polys],
        "holds": verdict.holds,
        "witness": verdict.witness,
        "declared_hypotheses": list(verdict.declared_hypotheses),
    }


def _verdict_text(verdict, lhs_label="p(h;t)", rhs_label="p(X;t)"):
    lines = [
        "identity: %s" % verdict.identity_name,
        "%s = %s" % (lhs_label, verdict.lhs.pretty()),
        "%s = %s" % (rhs_label, verdict.rhs.pretty()),
    ]
    for q in verdict.q_polys:
        lines.append("Q(t) = %s" % q.pretty())
    lines.append("holds: %s" % ("yes" if verdict.holds else "no"))
    if verdict.witness is not None:
        lines.append("witness: %s" % (verdict.witness,))
    return lines


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NOVIKOV_LAB_SEED")
    return int(env) if env else 0


def _emit(args, payload, text_lines):
    if args.format == "json":
        body = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        body = "\n".join(text_lines) + "\n"
    if args.output:
        directory = os.path.dirname(os.path.abspath(args.output))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".novikov-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(body)
            os.replace(tmp, args.output)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    else:
        sys.stdout.write(body)


def _load_bundle(args):
    if getattr(args, "flow", None):
        return load_flow(args.flow)
    if getattr(args, "model", None):
        from .flows import load_model

        return load_model(args.model)
    raise SchemaError("/", "either --flow FILE or --model NAME is required")


def _alpha_params(args, bundle):
    params = bundle.params
    overrides = {
        "r": args.r,
        "rho": args.rho,
        "lam": getattr(args, "lam", None),
        "t0": args.t0,
    }
    if params is None and any(v is None for v in overrides.values()):
        raise SchemaError(
            "/params",
            "model %r has no default carrying parameters; pass --r --rho "
            "--lambda --t0" % bundle.model.name,
        )
    if params is None:
        return AlphaFlowParams(
            r=args.r, rho=args.rho, lam=args.lam, t0=args.t0
        )
    return AlphaFlowParams(
        r=overrides["r"] if overrides["r"] is not None else params.r,
        rho=overrides["rho"] if overrides["rho"] is not None else params.rho,
        lam=overrides["lam"] if overrides["lam"] is not None else params.lam,
        t0=overrides["t0"] if overrides["t0"] is not None else params.t0,
    )


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def cmd_homology(args):
    X, E = load_complex(args.complex)
    D = build_twisted(X, E)
    if not all(
        e.is_constant()
        for j in range(1, len(D.base.ranks))
        for row in D.base.boundary(j).entries
        for e in row
    ):
        raise SchemaError(
            "/boundary",
            "complex carries nonzero weights; use the novikov command for "
            "generic evaluated dimensions",
        )
    if args.ring == "Zp":
        if not args.p:
            raise SchemaError("/p", "--p is required with --ring Zp")
        coeff = args.p
    else:
        coeff = args.ring
    ranks = homology(D.base, coeff)
    payload = {
        "command": "homology",
        "complex": X.name,
        "ring": args.ring if args.ring != "Zp" else "Z%d" % args.p,
        "betti": [b for b, _ in ranks],
        "torsion": [list(t) for _, t in ranks],
    }
    text = ["complex: %s" % X.name, "ring: %s" % payload["ring"]]
    for j, (b, tor) in enumerate(ranks):
        line = "H_%d: rank %d" % (j, b)
        if tor:
            line += "  torsion " + " + ".join("Z/%d" % d for d in tor)
        text.append(line)
    return EXIT_OK, payload, text


def cmd_novikov(args):
    X, E = load_complex(args.complex)
    D = build_twisted(X, E)
    report = novikov_numbers(D, trials=args.trials, seed=_seed(args))
    payload = {
        "command": "novikov",
        "complex": X.name,
        "b": report.b,
        "trials": report.trials,
        "seed": report.seed,
        "witnesses": [[str(c) for c in a] for a in report.witnesses],
        "jumps": [
            {"point": [str(c) for c in a], "degree": j, "dim": d}
            for a, j, d in report.jumps
        ],
    }
    text = ["complex: %s" % X.name]
    text.append("b = (%s)" % ", ".join(str(b) for b in report.b))
    for a, j, d in report.jumps:
        text.append(
            "jump at a = (%s): dim H_%d = %d"
            % (", ".join(str(c) for c in a), j, d)
        )
    return EXIT_OK, payload, text


def cmd_torsion(args):
    X, E = load_complex(args.complex)
    D = build_twisted(X, E)
    point = parse_point(args.a, X.s)
    q = torsion_numbers(D, point, args.p)
    payload = {
        "command": "torsion",
        "complex": X.name,
        "a": [str(c) for c in point],
        "p": args.p,
        "q": q,
    }
    text = [
        "complex: %s" % X.name,
        "q = (%s) at a = (%s), p = %d"
        % (", ".join(map(str, q)), ", ".join(map(str, point)), args.p),
    ]
    return EXIT_OK, payload, text


def cmd_flow_certify(args):
    bundle = _load_bundle(args)
    params = _alpha_params(args, bundle)
    rep = bundle.cocycles[args.cocycle]
    plan = SamplingPlan(seed=_seed(args))
    report = certify_alpha_flow(bundle.model, rep, params, plan)
    payload = {
        "command": "flow-certify",
        "model": report.model,
        "cocycle": report.cocycle,
        "fixed_point_free": report.fixed_point_free,
        "params": {
            "r": params.r,
            "rho": params.rho,
            "lambda": params.lam,
            "t0": params.t0,
        },
        "conditions": report.conditions,
        "verdict": report.verdict,
        "witness": repr(report.witness) if report.witness else None,
        "low_coverage": report.low_coverage,
    }
    text = [
        "model: %s" % report.model,
        "cocycle: %s" % report.cocycle,
        "verdict: %s" % report.verdict,
    ]
    for name, cond in report.conditions.items():
        text.append("  %s: %s" % (name, cond))
    code = EXIT_OK if report.verdict == "CERTIFIED_ON_SAMPLES" else EXIT_VERDICT_FAILED
    return code, payload, text


def cmd_flow_detect(args):
    bundle = _load_bundle(args)
    graph = build_chain_graph(
        bundle.model, bundle.cocycles, args.grid, args.t_edge
    )
    report = detect_gradient_like(graph, gain_threshold=args.threshold)
    payload = {
        "command": "flow-detect",
        "model": bundle.model.name,
        "grid": args.grid,
        "t_edge": args.t_edge,
        "verdict": report.verdict,
        "coordinate": report.coordinate,
        "gain": report.gain,
        "cycle_bound": report.bound,
        "cycle": report.cycle[:50] if report.cycle else None,
    }
    text = ["model: %s" % bundle.model.name, "verdict: %s" % report.verdict]
    if report.verdict == "NOT_GRADIENT_LIKE":
        text.append(
            "witness cycle gain %.6f on cocycle %d (%d nodes)"
            % (report.gain, report.coordinate, len(report.cycle))
        )
    else:
        text.append("all cycle gains bounded by %.2e" % report.bound)
    # detection outcomes are findings, not failures
    return EXIT_OK, payload, text


def cmd_chain_graph(args):
    bundle = _load_bundle(args)
    graph = build_chain_graph(
        bundle.model, bundle.cocycles, args.grid, args.t_edge
    )
    components, order = pi_morse_report(graph)
    payload = {
        "command": "chain-graph",
        "model": bundle.model.name,
        "grid": args.grid,
        "t_edge": args.t_edge,
        "nodes": graph.n_nodes,
        "flow_edges": len(graph.flow_edges),
        "jump_edges": len(graph.jump_edges),
        "components": [
            {
                "size": len(c.nodes),
                "fixed_point": c.is_fixed_point,
                "internal_gains": c.internal_gains,
                "pi_stable": c.pi_stable,
            }
            for c in components
        ],
        "order_pairs": order,
    }
    text = [
        "model: %s" % bundle.model.name,
        "nodes: %d  flow edges: %d  jump edges: %d"
        % (graph.n_nodes, len(graph.flow_edges), len(graph.jump_edges)),
        "components:",
    ]
    for i, c in enumerate(components):
        text.append(
            "  #%d size %d%s gains %s -> %s"
            % (
                i,
                len(c.nodes),
                " (fixed point)" if c.is_fixed_point else "",
                c.internal_gains,
                "pi-stable" if c.pi_stable else "unties in the cover",
            )
        )
    return EXIT_OK, payload, text


def cmd_report_main(args):
    descriptors = load_descriptors(args.descriptors)
    X, E = load_complex(args.complex)
    D = build_twisted(X, E)
    point = parse_point(args.a, X.s)
    verdict = main_equality_check(descriptors, D, point, args.p)
    payload = {"command": "report-main", "complex": X.name}
    payload.update(_verdict_dict(verdict))
    text = _verdict_text(verdict, "p(h;t)      ", "p(X;t,a^w)  ")
    return (EXIT_OK if verdict.holds else EXIT_VERDICT_FAILED), payload, text


def cmd_report_euler(args):
    descriptors = load_descriptors(args.descriptors)
    X, E = load_complex(args.complex)
    D = build_twisted(X, E)
    from .conley import sum_index_poincare

    value = sum_index_poincare(descriptors, "Q")(-1)
    chi = sum((-1) ** j * c for j, c in enumerate(D.cell_counts))
    holds = euler_check(descriptors, D)
    payload = {
        "command": "report-euler",
        "complex": X.name,
        "index_sum_at_minus_one": value,
        "euler_characteristic": chi,
        "holds": holds,
    }
    text = [
        "complex: %s" % X.name,
        "sum p(h(A); -1) = %d" % value,
        "chi(X) = %d" % chi,
        "holds: %s" % ("yes" if holds else "no"),
    ]
    return (EXIT_OK if holds else EXIT_VERDICT_FAILED), payload, text


def cmd_report_novikov(args):
    X, E = load_complex(args.complex)
    D = build_twisted(X, E)
    counts = parse_counts(args.counts)
    nr = novikov_numbers(D, trials=args.trials, seed=_seed(args))
    point = parse_point(args.a, X.s)
    q = torsion_numbers(D, point, args.p)
    verdict = novikov_inequality_check(counts, nr, q)
    payload = {
        "command": "report-novikov",
        "complex": X.name,
        "counts": counts,
        "b": nr.b,
        "q": q,
    }
    payload.update(_verdict_dict(verdict))
    text = _verdict_text(verdict, "c(t)", "b(t)")
    return (EXIT_OK if verdict.holds else EXIT_VERDICT_FAILED), payload, text


def cmd_report_morse_smale(args):
    X, E = load_complex(args.complex)
    D = build_twisted(X, E)
    counts = parse_counts(args.counts)
    orbits = parse_counts(args.orbits)
    nr = novikov_numbers(D, trials=args.trials, seed=_seed(args))
    verdict = morse_smale_check(counts, orbits, nr)
    payload = {
        "command": "report-morse-smale",
        "complex": X.name,
        "counts": counts,
        "orbits": orbits,
        "b": nr.b,
    }
    payload.update(_verdict_dict(verdict))
    text = _verdict_text(verdict, "mu(t)", "b(t)")
    return (EXIT_OK if verdict.holds else EXIT_VERDICT_FAILED), payload, text


def cmd_report_vanishing(args):
    bundle = _load_bundle(args)
    params = _alpha_params(args, bundle)
    rep = bundle.cocycles[args.cocycle]
    cert = certify_alpha_flow(
        bundle.model, rep, params, SamplingPlan(seed=_seed(args))
    )
    X, E = load_complex(args.complex)
    D = build_twisted(X, E)
    nr = novikov_numbers(D, trials=args.trials, seed=_seed(args))
    verdict = vanishing_check(cert, nr)
    payload = {
        "command": "report-vanishing",
        "model": bundle.model.name,
        "complex": X.name,
        "certificate": cert.verdict,
        "b": verdict.b,
        "holds": verdict.holds,
        "contradiction": verdict.contradiction,
    }
    text = [
        "model: %s (certificate: %s)" % (bundle.model.name, cert.verdict),
        "complex: %s" % X.name,
        "b = (%s)" % ", ".join(str(b) for b in verdict.b),
        "holds: %s" % ("yes" if verdict.holds else "no"),
    ]
    if verdict.contradiction:
        text.append("CONTRADICTION: certified carrier with nonzero numbers")
    return (EXIT_OK if verdict.holds else EXIT_VERDICT_FAILED), payload, text


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--output", help="write the report to this path")
    sub.add_argument(
        "--format", choices=("json", "text"), default="text", help="report format"
    )
    sub.add_argument("--seed", type=int, default=None, help="sampling seed")


def _add_flow_source(sub):
    sub.add_argument("--flow", help="flow spec JSON file")
    sub.add_argument("--model", help="registry model name")
    sub.add_argument("--cocycle", type=int, default=0, help="cocycle index")


def _add_alpha_params(sub):
    sub.add_argument("--r", type=float, default=None)
    sub.add_argument("--rho", type=float, default=None)
    sub.add_argument("--lambda", dest="lam", type=float, default=None)
    sub.add_argument("--T0", dest="t0", type=float, default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="novikov-lab",
        description="Twisted-complex homology and cocycle-carrying flow reports",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("homology", help="homology of a complex")
    sub.add_argument("--complex", required=True)
    sub.add_argument("--ring", choices=("Z", "Q", "Zp"), default="Z")
    sub.add_argument("--p", type=int, default=None)
    _add_common(sub)
    sub.set_defaults(handler=cmd_homology)

    sub = subs.add_parser("novikov", help="generic evaluated dimensions")
    sub.add_argument("--complex", required=True)
    sub.add_argument("--trials", type=int, default=20)
    _add_common(sub)
    sub.set_defaults(handler=cmd_novikov)

    sub = subs.add_parser("torsion", help="torsion numbers at (a, p)")
    sub.add_argument("--complex", required=True)
    sub.add_argument("--a", required=True)
    sub.add_argument("--p", type=int, required=True)
    _add_common(sub)
    sub.set_defaults(handler=cmd_torsion)

    sub = subs.add_parser("flow-certify", help="carrying-condition certification")
    _add_flow_source(sub)
    _add_alpha_params(sub)
    _add_common(sub)
    sub.set_defaults(handler=cmd_flow_certify)

    sub = subs.add_parser("flow-detect", help="gradient-like detection")
    _add_flow_source(sub)
    sub.add_argument("--grid", type=int, default=360)
    sub.add_argument("--T", dest="t_edge", type=float, default=0.5)
    sub.add_argument("--threshold", type=float, default=0.5)
    _add_common(sub)
    sub.set_defaults(handler=cmd_flow_detect)

    sub = subs.add_parser("chain-graph", help="grid graph and recurrence summary")
    _add_flow_source(sub)
    sub.add_argument("--grid", type=int, default=360)
    sub.add_argument("--T", dest="t_edge", type=float, default=0.5)
    _add_common(sub)
    sub.set_defaults(handler=cmd_chain_graph)

    sub = subs.add_parser("report-main", help="index sum vs evaluated homology")
    sub.add_argument("--descriptors", required=True)
    sub.add_argument("--complex", required=True)
    sub.add_argument("--a", required=True)
    sub.add_argument("--p", type=int, required=True)
    _add_common(sub)
    sub.set_defaults(handler=cmd_report_main)

    sub = subs.add_parser("report-euler", help="index sum at t = -1 vs chi")
    sub.add_argument("--descriptors", required=True)
    sub.add_argument("--complex", required=True)
    _add_common(sub)
    sub.set_defaults(handler=cmd_report_euler)

    sub = subs.add_parser("report-novikov", help="zero counts vs generic numbers")
    sub.add_argument("--counts", required=True)
    sub.add_argument("--complex", required=True)
    sub.add_argument("--a", required=True)
    sub.add_argument("--p", type=int, required=True)
    sub.add_argument("--trials", type=int, default=20)
    _add_common(sub)
    sub.set_defaults(handler=cmd_report_novikov)

    sub = subs.add_parser("report-morse-smale", help="orbit bookkeeping inequality")
    sub.add_argument("--counts", required=True)
    sub.add_argument("--orbits", required=True)
    sub.add_argument("--complex", required=True)
    sub.add_argument("--trials", type=int, default=20)
    _add_common(sub)
    sub.set_defaults(handler=cmd_report_morse_smale)

    sub = subs.add_parser("report-vanishing", help="fixed-point-free vanishing")
    _add_flow_source(sub)
    _add_alpha_params(sub)
    sub.add_argument("--complex", required=True)
    sub.add_argument("--trials", type=int, default=20)
    _add_common(sub)
    sub.set_defaults(handler=cmd_report_vanishing)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload, text = args.handler(args)
    except json.JSONDecodeError as exc:
        sys.stderr.write(
            "error: malformed JSON at line %d column %d: %s\n"
            % (exc.lineno, exc.colno, exc.msg)
        )
        return EXIT_INPUT_ERROR
    except SchemaError as exc:
        sys.stderr.write("error: schema violation at %s: %s\n" % (exc.pointer, exc.message))
        return EXIT_INPUT_ERROR
    except (
        ComplexError,
        ConleyError,
        FlowError,
        ReportError,
        TwistError,
        OSError,
        ValueError,
    ) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_INPUT_ERROR
    payload["schema_version"] = 1
    payload["exit_code"] = code
    _emit(args, payload, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
