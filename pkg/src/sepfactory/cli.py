"""Command-line shell: gen | certify | decompose | witness | truncate-study.

Every invocation prints exactly one JSON run report to stdout and exits with
0 (all requested verdicts true), 1 (a mathematically meaningful negative
verdict) or 2 (input or format error).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import fileio, linalg
from .bipartite import check_state, embed, is_ppt, trace_distance, truncate
from .cholesky import (
    assemble_state,
    block_cholesky,
    extract_operators,
    grid_matrix,
    verify_semi_ssppt,
)
from .decompose import extract_ensemble, qubit_pathway, reconstruct
from .errors import (
    DimensionMismatch,
    FormatError,
    RangeMismatch,
    SepfactoryError,
)
from .generators import GeneratorSpec, generate
from .witnesses import npt_witness

_KINDS = (
    "example1",
    "example2",
    "random_ssppt",
    "random_density",
    "maximally_entangled",
)

RECONSTRUCTION_GATE = 1e-8


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepfactory",
        description="Construct, certify and decompose separable bipartite states.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8,
                        help="commutator and reconstruction tolerance")
    common.add_argument("--ppt-tol", type=float, default=1e-9,
                        help="partial-transpose eigenvalue tolerance")
    common.add_argument("--rank-tol", type=float, default=1e-10,
                        help="singular-value cutoff, relative to the largest")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generate a state file")
    gen.add_argument("--kind", required=True, choices=_KINDS)
    gen.add_argument("--dim-a", type=int, default=0)
    gen.add_argument("--dim-b", type=int, default=0)
    gen.add_argument("--n", type=int, default=0, help="example1 row count")
    gen.add_argument("--d", type=int, default=0,
                     help="maximally_entangled local dimension")
    gen.add_argument("--rank", type=int, default=0)
    gen.add_argument("--mode", choices=("finite", "geometric"), default="finite")
    gen.add_argument("--contraction", type=float, default=1.0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--cert-out", default=None)

    certify = sub.add_parser("certify", parents=[common],
                             help="factor a state and verify the row condition")
    certify.add_argument("state")

    decompose = sub.add_parser("decompose", parents=[common],
                               help="emit an explicit product ensemble")
    decompose.add_argument("input", help="state or certificate file")
    decompose.add_argument("--out", required=True)
    decompose.add_argument("--qubit-pathway", action="store_true",
                           help="use the 2 (x) n block-ordering construction")

    witness = sub.add_parser("witness", parents=[common],
                             help="search for a negative partial-transpose witness")
    witness.add_argument("state")
    witness.add_argument("--samples", type=int, default=10000,
                         help="product-pairing samples (0 skips the check)")
    witness.add_argument("--out", default=None)

    study = sub.add_parser("truncate-study", parents=[common],
                           help="trace-distance table of leading-basis truncations")
    study.add_argument("state")
    study.add_argument("--steps", type=int, default=0,
                       help="number of truncation levels (default: all)")
    study.add_argument("--out", default=None)
    return parser


def _derived_path(base: str, suffix: str) -> str:
    stem = base[:-5] if base.endswith(".json") else base
    return f"{stem}.{suffix}"


def _cmd_gen(args, report) -> int:
    spec = GeneratorSpec(
        kind=args.kind,
        dim_a=args.d if args.kind == "maximally_entangled" and args.d else args.dim_a,
        dim_b=args.dim_b,
        seed=args.seed,
        n=args.n,
        rank=args.rank,
        mode=args.mode,
        contraction=args.contraction,
    )
    rho, cert, meta = generate(spec)
    fileio.save_state(args.out, rho, metadata=meta)
    report["outputs"]["state"] = args.out
    check = check_state(rho, tol=1e-10)
    report["verdicts"]["state_check"] = check.verdict
    report["residuals"]["min_eigenvalue"] = check.min_eigenvalue
    if cert is not None:
        cert_path = args.cert_out or _derived_path(args.out, "cert.json")
        fileio.save_certificate(cert_path, cert, metadata=meta)
        report["outputs"]["certificate"] = cert_path
        vr = verify_semi_ssppt(cert, args.tol)
        report["verdicts"]["semi_ssppt"] = vr.verdict
        report["residuals"]["worst_commutator"] = vr.worst_residual()
        report["residuals"]["factor_mass"] = sum(cert.row_norms)
    return 0 if check.verdict == "valid_state" else 1


def _cmd_certify(args, report) -> int:
    report["inputs"][args.state] = fileio.file_digest(args.state)
    rho, _ = fileio.load_state(args.state)
    check = check_state(rho, tol=args.tol)
    report["verdicts"]["state_check"] = check.verdict
    if check.verdict != "valid_state":
        return 1
    ppt, min_ta, min_tb = is_ppt(rho, args.ppt_tol)
    report["verdicts"]["ppt"] = ppt
    report["residuals"]["min_eig_ta"] = min_ta
    report["residuals"]["min_eig_tb"] = min_tb
    grid = block_cholesky(rho, tol=args.tol)
    u = grid_matrix(grid, rho.dim_b)
    report["residuals"]["factor_residual"] = linalg.fro_norm(
        u.conj().T @ u - rho.matrix
    )
    try:
        cert = extract_operators(grid, args.rank_tol)
    except RangeMismatch as exc:
        report["verdicts"]["semi_ssppt"] = False
        report["range_mismatch"] = {"i": exc.i, "j": exc.j, "residual": exc.residual}
        return 1
    vr = verify_semi_ssppt(cert, args.tol)
    report["verdicts"]["semi_ssppt"] = vr.verdict
    report["residuals"]["worst_commutator"] = vr.worst_residual()
    if not vr.verdict:
        worst = max(
            vr.rows, key=lambda r: max(r.max_normality, r.max_cross), default=None
        )
        if worst is not None:
            report["offending_row"] = worst.k
    return 0 if (vr.verdict and ppt) else 1


def _cmd_decompose(args, report) -> int:
    report["inputs"][args.input] = fileio.file_digest(args.input)
    kind, payload, _ = fileio.load_document(args.input)
    if kind == "state":
        rho, cert = payload, None
    elif kind == "certificate":
        cert = payload
        rho, _ = assemble_state(cert)
    else:
        raise FormatError(f"{args.input}: need a state or certificate file")
    check = check_state(rho, tol=max(args.tol, 1e-8))
    report["verdicts"]["state_check"] = check.verdict
    if check.verdict != "valid_state":
        return 1
    if args.qubit_pathway:
        cert, ens = qubit_pathway(
            rho, tol=args.tol, rank_tol=args.rank_tol, seed=args.seed
        )
        report["verdicts"]["semi_ssppt"] = True
    else:
        if cert is None:
            grid = block_cholesky(rho, tol=args.tol)
            cert = extract_operators(grid, args.rank_tol)
        vr = verify_semi_ssppt(cert, args.tol)
        report["verdicts"]["semi_ssppt"] = vr.verdict
        report["residuals"]["worst_commutator"] = vr.worst_residual()
        if not vr.verdict:
            return 1
        ens = extract_ensemble(cert, tol=args.tol, seed=args.seed)
    fileio.save_ensemble(args.out, ens, metadata={"source": args.input})
    report["outputs"]["ensemble"] = args.out
    residual = trace_distance(reconstruct(ens), rho)
    report["verdicts"]["ensemble_size"] = len(ens.terms)
    report["residuals"]["reconstruction_trace_norm"] = residual
    return 0 if residual <= RECONSTRUCTION_GATE else 1


def _cmd_witness(args, report) -> int:
    report["inputs"][args.state] = fileio.file_digest(args.state)
    rho, _ = fileio.load_state(args.state)
    check = check_state(rho, tol=max(args.tol, 1e-8))
    report["verdicts"]["state_check"] = check.verdict
    if check.verdict != "valid_state":
        raise DimensionMismatch(f"witness input is {check.verdict}")
    found = npt_witness(rho, tol=args.ppt_tol, samples=args.samples,
                        seed=args.seed)
    report["verdicts"]["entangled"] = found is not None
    report["verdicts"]["pairing_checked"] = args.samples > 0
    if found is None:
        return 1
    report["verdicts"]["witness_side"] = found.side
    report["residuals"]["value_on_target"] = found.value_on_target
    if found.pairing_min is not None:
        report["residuals"]["pairing_min"] = found.pairing_min
    out = args.out or _derived_path(args.state, "witness.json")
    fileio.save_state(
        out, found.witness,
        metadata={"kind": "witness", "side": found.side,
                  "value_on_target": found.value_on_target},
    )
    report["outputs"]["witness"] = out
    return 0


def _cmd_truncate_study(args, report) -> int:
    report["inputs"][args.state] = fileio.file_digest(args.state)
    rho, _ = fileio.load_state(args.state)
    if rho.dim_a < 2 or rho.dim_b < 2:
        raise ValueError("truncation study needs dims at least 2 (x) 2")
    k_max = max(rho.dim_a, rho.dim_b)
    if args.steps > 0:
        k_max = min(k_max, args.steps)
    rows = []
    for k in range(1, k_max + 1):
        k_a = min(k, rho.dim_a)
        k_b = min(k, rho.dim_b)
        compressed = truncate(rho, k_a, k_b)
        dist = trace_distance(rho, embed(compressed, rho.dim_a, rho.dim_b))
        rows.append({"k": k, "k_a": k_a, "k_b": k_b, "trace_distance": dist})
    lines = ["k,k_a,k_b,trace_distance"]
    lines += [
        f"{r['k']},{r['k_a']},{r['k_b']},{format(r['trace_distance'], '.17g')}"
        for r in rows
    ]
    out = args.out or _derived_path(args.state, "truncation.csv")
    fileio._write_atomic(out, "\n".join(lines) + "\n")
    report["outputs"]["table"] = out
    report["table"] = rows
    return 0


_COMMANDS = {
    "gen": (_cmd_gen, 2),
    "certify": (_cmd_certify, 1),
    "decompose": (_cmd_decompose, 1),
    "witness": (_cmd_witness, 1),
    "truncate-study": (_cmd_truncate_study, 1),
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = _build_parser().parse_args(argv)
    body, negative_code = _COMMANDS[args.command]
    report = {
        "command": "sepfactory " + " ".join(argv),
        "inputs": {},
        "outputs": {},
        "verdicts": {},
        "residuals": {},
    }
    start = time.perf_counter()
    try:
        code = body(args, report)
    except (FormatError, OSError, ValueError, DimensionMismatch) as exc:
        report["error"] = str(exc)
        code = 2
    except SepfactoryError as exc:
        report["error"] = str(exc)
        code = negative_code
    report["timing_ms"] = round((time.perf_counter() - start) * 1e3, 3)
    report["exit_code"] = code
    print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
