"""``qsr`` command-line interface.

Every subcommand reads one JSON document (``-`` for standard input), calls
the library and writes one JSON document to standard output, or to ``-o``.
A one-line human summary goes to standard error.

Exit codes: 0 success/pass, 1 verdict fail or inconclusive, 2 usage or input
error, 3 numerical failure (singular fast block, singular resolvent).
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import cavity
from .errors import NumericalError, QsrError
from .io import (
    Document,
    ReportDocument,
    SystemDocument,
    document_digest,
    dumps_document,
    encode_complex,
    encode_matrix,
    encode_payload,
    load_document,
    loads_document,
    save_document,
)
from .perturbation import PerturbedSystem, convergence_probe, reduce
from .special_class import SpecialClassParams, to_perturbed, verify_decomposition
from .system import (
    DEFAULT_SAMPLE_COUNT,
    DEFAULT_SEED,
    QuantumLinearSystem,
    check_physical_realizability,
    default_samples,
    realize,
    transfer_function,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(QsrError):
    pass


def parse_complex(text: str) -> complex:
    """``"RE,IM"`` or ``"RE"``."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}")


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _read(path: str) -> Document:
    if path == "-":
        return loads_document(sys.stdin.read())
    return load_document(path)


def _emit(doc: Document, out: str | None) -> None:
    if out:
        save_document(doc, out)
    else:
        sys.stdout.write(dumps_document(doc))
        sys.stdout.flush()


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _as_system(doc: Document) -> QuantumLinearSystem:
    if isinstance(doc, SystemDocument):
        if doc.kind == "system":
            return doc.payload
        if doc.kind == "physical_params":
            return realize(doc.payload)
        if doc.kind == "cavity_squeezer":
            return cavity.build_full(doc.payload)
    raise UsageError(f"expected a system document, got kind {getattr(doc, 'kind', 'report')!r}")


def _as_perturbed(doc: Document) -> PerturbedSystem:
    if isinstance(doc, SystemDocument):
        if doc.kind == "perturbed":
            return doc.payload
        if doc.kind == "special_class":
            return to_perturbed(doc.payload)
        if doc.kind == "cavity_squeezer":
            return cavity.build_perturbed(doc.payload)
    raise UsageError(f"expected a perturbed document, got kind {getattr(doc, 'kind', 'report')!r}")


def _as_special(doc: Document) -> SpecialClassParams:
    if isinstance(doc, SystemDocument):
        if doc.kind == "special_class":
            return doc.payload
        if doc.kind == "cavity_squeezer":
            return cavity.special_params(doc.payload)
    raise UsageError(f"expected a special_class document, got kind {getattr(doc, 'kind', 'report')!r}")


def _system_doc(system: QuantumLinearSystem, **meta: str) -> SystemDocument:
    return SystemDocument("system", system, meta)


# ------------------------------------------------------------------ commands


def cmd_realize(args) -> int:
    doc = _read(args.params)
    if not (isinstance(doc, SystemDocument) and doc.kind == "physical_params"):
        raise UsageError("realize expects a physical_params document")
    system = realize(doc.payload)
    _emit(_system_doc(system, source="realize", input=document_digest(doc)), args.output)
    _note(f"realize: n={system.n_modes} m={system.m_fields}")
    return EXIT_OK


def cmd_check(args) -> int:
    doc = _read(args.system)
    system = _as_system(doc)
    samples = default_samples(system, args.samples, args.seed)
    rep = check_physical_realizability(system, samples, args.tol)
    report = ReportDocument(
        command="check",
        inputs=document_digest(doc),
        residuals=rep.residuals(),
        verdict=rep.verdict,
        samples_used=rep.samples,
        tolerance=args.tol,
        details={
            "minimal": rep.minimal,
            "controllability_rank": rep.controllability_rank,
            "observability_rank": rep.observability_rank,
            "state_dimension": 2 * system.n_modes,
            "eig_condition": rep.eig_condition,
            "jj_unitary": rep.jj_unitary,
            "scattering_form_ok": rep.scattering_form_ok,
            "seed": args.seed,
        },
    )
    _emit(report, args.output)
    _note(f"check: verdict {rep.verdict} (jj residual {rep.jj_residual_max:.3e}, ranks {rep.controllability_rank}/{rep.observability_rank})")
    return EXIT_OK if rep.verdict == "pass" else EXIT_FAIL


def cmd_reduce(args) -> int:
    doc = _read(args.perturbed)
    system = reduce(_as_perturbed(doc))
    _emit(_system_doc(system, source="reduce", input=document_digest(doc)), args.output)
    _note(f"reduce: reduced model has n={system.n_modes} m={system.m_fields}")
    return EXIT_OK


def cmd_respond(args) -> int:
    doc = _read(args.system)
    system = _as_system(doc)
    points = args.s or [0j]
    values = [{"s": encode_complex(s), "phi": encode_matrix(transfer_function(system, s))} for s in points]
    report = ReportDocument(
        command="respond",
        inputs=document_digest(doc),
        residuals={},
        verdict="pass",
        samples_used=list(points),
        details={"response": values},
    )
    _emit(report, args.output)
    _note(f"respond: evaluated the transfer function at {len(points)} point(s)")
    return EXIT_OK


def cmd_decompose(args) -> int:
    doc = _read(args.special)
    rep = verify_decomposition(_as_special(doc), args.tol)
    dec = rep.decomposition
    report = ReportDocument(
        command="decompose",
        inputs=document_digest(doc),
        residuals=rep.residuals,
        verdict="pass" if rep.passed else "fail",
        tolerance=args.tol,
        details={
            "physically_realizable_part": encode_payload("physical_params", dec.pr_params),
            "static_part": encode_payload("bogoliubov", dec.static_part),
        },
    )
    _emit(report, args.output)
    worst = max(rep.residuals.values())
    _note(f"decompose: {'pass' if rep.passed else 'fail'} (worst residual {worst:.3e})")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _order_json(order):
    return order if order is None or isinstance(order, str) else float(order)


def cmd_converge(args) -> int:
    doc = _read(args.perturbed)
    rows = convergence_probe(_as_perturbed(doc), args.s, args.eps)
    table = [
        {
            "eps": r.eps,
            "residual": r.residual,
            "order": _order_json(r.order),
            "raw_residual": r.raw_residual,
            "raw_order": _order_json(r.raw_order),
        }
        for r in rows
    ]
    # the limit Phi_eps -> Phi_0 must show in the tail of the sweep
    converging = rows[-1].raw_residual < rows[0].raw_residual or rows[-1].raw_order == "exact"
    report = ReportDocument(
        command="converge",
        inputs=document_digest(doc),
        residuals={"final_residual": rows[-1].residual, "final_raw_residual": rows[-1].raw_residual},
        verdict="pass" if converging else "fail",
        samples_used=[args.s],
        details={"table": table},
    )
    _emit(report, args.output)
    _note("converge: " + ", ".join(f"eps={r.eps:g} order={r.order}" for r in rows[1:]))
    return EXIT_OK if converging else EXIT_FAIL


def cmd_example(args) -> int:
    params = cavity.CavitySqueezerParams(args.k1, args.k2, args.gamma, args.chi)
    meta = {"source": "example cavity-squeezer"}
    if args.form == "params":
        doc = SystemDocument("cavity_squeezer", params, meta)
    elif args.form == "perturbed":
        doc = SystemDocument("perturbed", cavity.build_perturbed(params), meta)
    elif args.form == "special":
        doc = SystemDocument("special_class", cavity.special_params(params), meta)
    elif args.form == "reduced":
        doc = _system_doc(cavity.reduced_reference(params).system, **meta)
    else:
        physical = params if args.epsilon is None else params.at_eps(args.epsilon)
        if args.epsilon is not None:
            meta["epsilon"] = repr(float(args.epsilon))
        doc = _system_doc(cavity.build_full(physical), **meta)
    _emit(doc, args.output)
    _note(f"example: cavity-squeezer ({args.form}) k1={args.k1:g} k2={args.k2:g} gamma={args.gamma:g} chi={args.chi}")
    return EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsr", description="Linear quantum system realizability and reduction tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize", help="build a system from physical parameters")
    p.add_argument("params", help="physical_params document ('-' for stdin)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("check", help="test physical realizability")
    p.add_argument("system", nargs="?", default="-", help="system document ('-' for stdin)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLE_COUNT)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="eliminate the fast subsystem")
    p.add_argument("perturbed", help="perturbed, special_class or cavity_squeezer document")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("respond", help="evaluate the transfer function")
    p.add_argument("system")
    p.add_argument("--s", type=parse_complex, action="append", metavar="RE,IM")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("decompose", help="split a reduced special-class model into realizable + static parts")
    p.add_argument("special", help="special_class or cavity_squeezer document")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("converge", help="empirical convergence order of the first-order expansion")
    p.add_argument("perturbed")
    p.add_argument("--s", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--eps", type=parse_float_list, required=True, metavar="E1,E2,...")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("example", help="built-in example systems")
    ex = p.add_subparsers(dest="example", required=True)
    c = ex.add_parser("cavity-squeezer", help="cavity coupled to a fast squeezer")
    c.add_argument("--k1", type=float, required=True)
    c.add_argument("--k2", type=float, required=True)
    c.add_argument("--gamma", type=float, required=True)
    c.add_argument("--chi", type=parse_complex, default=0j, metavar="RE,IM")
    c.add_argument("--epsilon", type=float, help="emit the full system at gamma/eps, chi/eps")
    c.add_argument(
        "--form",
        choices=("full", "params", "perturbed", "special", "reduced"),
        default="full",
        help="which document to emit (default: full system)",
    )
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_example)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        _note(f"error: {type(exc).__name__}: {exc}")
        return EXIT_NUMERIC
    except QsrError as exc:
        _note(f"error: {type(exc).__name__}: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
