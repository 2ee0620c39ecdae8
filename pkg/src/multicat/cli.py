"""Command-line interface: ``multicat <subcommand> ...``.

Exit codes: 0 success, 1 a check ran and failed, 2 bad arguments or
inputs, 3 numerical failure. Errors are reported as one JSON object on
standard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from .errors import MulticatError, NumericalFailure

log = logging.getLogger("multicat")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_complex(text: str) -> complex:
    """``"RE"`` or ``"RE,IM"`` to a complex number."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number in {text!r}") from exc
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _photons(text: str):
    try:
        m, n = (int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected M,N, got {text!r}") from exc
    return m, n


def _cx(z: complex) -> list:
    return [z.real, z.imag]


def _emit(obj, stream=None):
    stream = sys.stdout if stream is None else stream
    stream.write(json.dumps(obj, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, complex):
        return _cx(o)
    if isinstance(o, np.ndarray):
        if np.iscomplexobj(o):
            return np.stack([o.real, o.imag], axis=-1).tolist()
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


# ------------------------------------------------------------------ commands


def cmd_build(args) -> int:
    from .codes import covariance_check, coherent_code, save_code

    code = coherent_code(args.group, args.alpha, args.beta, args.cutoff)
    save_code(code, args.out)
    _emit({
        "group": code.group.name, "alpha": _cx(args.alpha), "beta": _cx(args.beta),
        "cutoff": code.space.cutoff, "normalization": code.normalization,
        "projector_norm": code.projector_norm, "covariance_residual": covariance_check(code),
        "out": args.out,
    })
    return 0


def cmd_check_design(args) -> int:
    from .groups import builtin_group, frame_potential, is_unitary_1_design

    g = builtin_group(args.group)
    ok, resid = is_unitary_1_design(g)
    _emit({"group": g.name, "order": g.order, "residual": resid,
           "frame_potential": frame_potential(g), "is_1_design": ok})
    return 0 if ok else 1


def cmd_kl(args) -> int:
    from .channels import kl_matrix, kl_theta_scan, kraus
    from .codes import load_code

    code = load_code(args.code)
    if args.theta_scan is not None:
        if args.theta_scan < 2:
            raise UsageError("--theta-scan needs at least 2 points")
        thetas = np.linspace(0, math.pi / 2, args.theta_scan)
        scan = kl_theta_scan(code.group.name, abs(code.alpha), thetas, args.gamma, args.pmax,
                             cutoff=code.space.cutoff)
        scan["pmax"] = args.pmax
        scan["cutoff"] = code.space.cutoff
        _emit(scan)
        return 0
    K = kraus(args.gamma, args.pmax, code.space)
    rep = kl_matrix(code, K)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p1", "q1", "p2", "q2", "entry_re", "entry_im", "k", "l"])
    for p, q, k, l, z in rep.rows():
        w.writerow([p[0], q[0], p[1], q[1], repr(z.real), repr(z.imag), k, l])
    summary = {
        "code": args.code, "group": code.group.name, "gamma": args.gamma, "pmax": args.pmax,
        "cutoff": code.space.cutoff, "tail_bound": K.tail_bound, "off_diagonal": rep.off_diagonal,
        "diagonal": rep.diagonal, "diagonal_cross": rep.diagonal_cross, "score": rep.score,
    }
    if args.summary:
        with open(args.summary, "w") as fh:
            _emit(summary, fh)
    else:
        _emit({"summary": summary}, sys.stderr)
    return 0


def cmd_fidelity(args) -> int:
    from .channels import kraus
    from .codes import load_code
    from .recovery import effective_channel, fidelity_optimal, fidelity_transpose

    code = load_code(args.code)
    K = kraus(args.gamma, args.pmax, code.space)
    eff = effective_channel(code, K)
    out = {"code": args.code, "group": code.group.name, "alpha": _cx(code.alpha), "beta": _cx(code.beta),
           "gamma": args.gamma, "pmax": args.pmax, "cutoff": code.space.cutoff, "method": args.method,
           "support_dim": eff.support_dim, "tail_bound": K.tail_bound}
    F_tc = fidelity_transpose(eff)
    out["F_transpose"] = F_tc
    out["infidelity_transpose"] = max(0.0, 1 - F_tc)
    if args.method in ("sdp", "both"):
        res = fidelity_optimal(eff, tol=args.tol)
        out.update(F_opt=res.F_opt, infidelity_opt=res.infidelity_opt, duality_gap=res.duality_gap,
                   iterations=res.iterations, upper_bound=res.upper_bound)
    if args.method == "sdp":
        del out["F_transpose"], out["infidelity_transpose"]
    _emit(out)
    return 0


def cmd_sweep(args) -> int:
    from .recovery import rows_to_csv, sweep

    if args.alpha_steps < 1:
        raise UsageError("--alpha-steps must be >= 1")
    alphas = np.linspace(args.alpha_start, args.alpha_stop, args.alpha_steps)
    variant = f"{args.group}_theta{args.theta:g}"
    rows = sweep(alphas, args.gamma, {variant: (args.group, args.theta)}, pmax=args.pmax,
                 method=args.method, tol=args.tol, jobs=args.jobs)
    text = rows_to_csv(rows)
    with open(args.out, "w") as fh:
        fh.write(text)
    _emit({"out": args.out, "rows": len(rows), "group": args.group, "theta": args.theta,
           "gamma": args.gamma, "pmax": args.pmax, "jobs": args.jobs})
    return 0


def cmd_gates(args) -> int:
    from .codes import load_code
    from .gates import single_qubit_gate, verify_cp_omega

    code = load_code(args.code)
    out = {"code": args.code, "group": code.group.name, "results": []}
    if args.gate is None and args.crot is None:
        gates = [g for g in ("X", "Z", "H", "S") if code.group.contains(_named(g))]
        crots = [2]
    else:
        gates = [args.gate] if args.gate else []
        crots = [args.crot] if args.crot else []
    ok = True
    for g in gates:
        r = single_qubit_gate(code, g)
        r["pass"] = bool(r["deviation"] < 1e-6 and r["leakage"] < 1e-7)
        ok &= r["pass"]
        out["results"].append(r)
    for m in crots:
        r = verify_cp_omega(code, m)
        r["pass"] = bool(r["pass"] and r["leakage"] < 1e-7)
        ok &= r["pass"]
        out["results"].append(r)
    _emit(out)
    return 0 if ok else 1


def _named(name):
    from .gates import NAMED_GATES

    return NAMED_GATES[name]


def cmd_transversal(args) -> int:
    from .groups import builtin_group
    from .transversal import transversal_code, transversal_projector

    g = builtin_group(args.group)
    P = transversal_projector(g, args.copies)
    out = {"group": g.name, "m": args.copies, "norm": P.norm,
           "idempotence_residual": None if math.isnan(P.idempotence_residual) else P.idempotence_residual}
    if P.nonzero:
        code = transversal_code(g, args.copies, seed=args.seed)
        out.update(seed_state=code.seed_label, covariance_residual=code.covariance_residual())
    _emit(out)
    return 0


def cmd_haar(args) -> int:
    from .transversal import haar_projector_estimate

    m, n = args.photons
    est = haar_projector_estimate((m, n), args.samples, args.seed)
    _emit(est.to_dict())
    return 0


# ------------------------------------------------------------------ parser


GROUP_CHOICES = ("pauli8", "pauli_ixiz", "pauli16", "clifford96")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="multicat", description="Group-covariant multimode bosonic codes.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="encode a coherent seed and save the code")
    b.add_argument("--group", required=True, choices=GROUP_CHOICES)
    b.add_argument("--alpha", required=True, type=parse_complex)
    b.add_argument("--beta", required=True, type=parse_complex)
    b.add_argument("--cutoff", type=int)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check-design", help="unitary 1-design test")
    c.add_argument("--group", required=True)
    c.set_defaults(func=cmd_check_design)

    k = sub.add_parser("kl", help="Knill-Laflamme matrix under pure loss")
    k.add_argument("--code", required=True)
    k.add_argument("--gamma", required=True, type=float)
    k.add_argument("--pmax", required=True, type=int)
    k.add_argument("--theta-scan", type=int, metavar="N")
    k.add_argument("--summary", help="write the summary JSON here instead of stderr")
    k.set_defaults(func=cmd_kl)

    f = sub.add_parser("fidelity", help="entanglement fidelity after recovery")
    f.add_argument("--code", required=True)
    f.add_argument("--gamma", required=True, type=float)
    f.add_argument("--method", choices=("sdp", "transpose", "both"), default="both")
    f.add_argument("--tol", type=float, default=1e-8)
    f.add_argument("--pmax", type=int, default=8)
    f.set_defaults(func=cmd_fidelity)

    s = sub.add_parser("sweep", help="infidelity over a grid of amplitudes")
    s.add_argument("--group", required=True, choices=GROUP_CHOICES)
    s.add_argument("--alpha-start", required=True, type=float)
    s.add_argument("--alpha-stop", required=True, type=float)
    s.add_argument("--alpha-steps", required=True, type=int)
    s.add_argument("--theta", required=True, type=float)
    s.add_argument("--gamma", required=True, type=float)
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    s.add_argument("--pmax", type=int, default=8)
    s.add_argument("--method", choices=("sdp", "transpose", "both"), default="both")
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_sweep)

    g = sub.add_parser("gates", help="logical action of physical gates")
    g.add_argument("--code", required=True)
    g.add_argument("--gate", choices=("X", "Z", "H", "S"))
    g.add_argument("--crot", type=int, metavar="M")
    g.set_defaults(func=cmd_gates)

    t = sub.add_parser("transversal", help="transversal projector for m copies")
    t.add_argument("--group", required=True)
    t.add_argument("--copies", required=True, type=int)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_transversal)

    h = sub.add_parser("haar-test", help="Monte-Carlo Haar projector estimate")
    h.add_argument("--photons", required=True, type=_photons)
    h.add_argument("--samples", required=True, type=int)
    h.add_argument("--seed", required=True, type=int)
    h.set_defaults(func=cmd_haar)
    return p


def _fail(kind: str, exc: BaseException, code: int) -> int:
    payload = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    result = getattr(exc, "result", None)
    if result is not None and hasattr(result, "to_dict"):
        payload["result"] = result.to_dict()
    _emit(payload, sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail("usage", exc, 2)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalFailure as exc:
        return _fail("numerical", exc, 3)
    except (UsageError, MulticatError, ValueError, OSError, KeyError) as exc:
        return _fail("input", exc, 2)


if __name__ == "__main__":
    sys.exit(main())
