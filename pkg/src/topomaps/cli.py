"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 validation, 3 numerical-check failure.
Operators are written as sparse CSV plus a ``<path>.basis.json`` sidecar
holding the labeled bases; circuits as gate lists with layout comments.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

import numpy as np

from . import basis_maps as bm
from . import pipelines, qubit_maps as qm
from .functions import FiniteFunction, load_function, load_set, pad_square
from .state import (UNITARY_TOL, AmplitudeVector, Basis, BasisMapOperator, apply, export_csv, parse_csv,
                    unitarity_residual)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
OPERATOR_KINDS = ("bijection", "injection", "surjection", "arbitrary")
CIRCUIT_KINDS = ("qubit-unary", "qubit-binary")
SIDECAR = ".basis.json"
REVERSIBILITY_EXHAUSTIVE = 12
REVERSIBILITY_SAMPLES = 10_000


class UsageError(Exception):
    pass


class ValidationError(Exception):
    pass


class NumericError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.17g}"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- artifacts ------------------------------------------------------------


def write_operator(op: BasisMapOperator, path: Path, kind: str) -> None:
    path.write_text(export_csv(op))
    meta = {"kind": kind, "in_basis": op.in_basis.to_dict(), "out_basis": op.out_basis.to_dict(),
            "components": op.components}
    Path(str(path) + SIDECAR).write_text(json.dumps(meta, ensure_ascii=False, indent=1) + "\n")


def read_artifact(path: Path):
    """``("operator", op, kind)`` or ``("circuit", circuit, layout)``."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    head = text.lstrip().split("\n", 1)[0]
    try:
        if head.startswith("qubits,"):
            circuit, layout = qm.parse_gates(text)
            return "circuit", circuit, layout
        if head.startswith("dims,"):
            side = Path(str(path) + SIDECAR)
            if side.exists():
                meta = json.loads(side.read_text())
                op = parse_csv(text, Basis.from_dict(meta["in_basis"]), Basis.from_dict(meta["out_basis"]))
                op = BasisMapOperator(op.in_basis, op.out_basis, op.matrix,
                                      components=meta.get("components", {}), name=meta.get("kind", ""))
                return "operator", op, meta.get("kind", "")
            return "operator", parse_csv(text), ""
    except (ValueError, KeyError) as exc:
        raise ValidationError(f"{path}: {exc}") from None
    raise ValidationError(f"{path}: unrecognised artifact header {head!r}")


# --- subcommands ------------------------------------------------------------


def _build_operator(f: FiniteFunction, kind: str) -> BasisMapOperator:
    if f.is_binary:
        f = FiniteFunction(f.domain, f.codomain, f.mapping)
    return {
        "bijection": bm.bijection_kernel,
        "injection": bm.injection_unitary,
        "surjection": bm.surjection_unitary,
        "arbitrary": bm.arbitrary_unitary,
    }[kind](f)


def cmd_compile(args) -> int:
    f = load_function(args.fn)
    out = Path(args.out)
    if args.kind in OPERATOR_KINDS:
        op = _build_operator(f, args.kind)
        write_operator(op, out, args.kind)
        res = unitarity_residual(op)
        print(f"kind {args.kind}")
        print(f"dimension {op.shape[0]}")
        print("components " + " ".join(f"{k}={v}" for k, v in op.components.items()))
        print(f"unitarity-residual {fmt(res)}")
        if res > UNITARY_TOL:
            raise NumericError(f"unitarity residual {res:.3g} exceeds {UNITARY_TOL:g}")
        return EXIT_OK
    if args.kind == "qubit-unary":
        if args.pad:
            f = pad_square(f)
        circuit, layout = qm.unary_map_circuit(f)
    else:
        circuit, layout = qm.binary_map_circuit(f)
    out.write_text(qm.export_gates(circuit, layout))
    print(f"kind {args.kind}")
    print(f"qubits {circuit.num_qubits}")
    print("gates " + " ".join(f"{k}={v}" for k, v in sorted(circuit.counts().items())))
    for role in qm.INPUT_ROLES + qm.OUTPUT_ROLES:
        print(f"{role} {layout.count(role)}")
    print(f"unitarity-residual {_circuit_residual(circuit)}")
    return EXIT_OK


def _circuit_residual(circuit: qm.GateCircuit) -> str:
    if circuit.num_qubits > qm.STATEVECTOR_CAP:
        return "n/a"
    perm = qm.basis_permutation(circuit)
    if len(np.unique(perm)) != len(perm):
        raise NumericError("circuit does not permute the basis")
    return fmt(0.0)


def _set_state(register: Basis, sf) -> AmplitudeVector:
    comp = [register.label(i) for i in register.computational()]
    if list(sf.space) != comp:
        raise ValidationError(f"set space {list(sf.space)} does not match operator input labels {comp}")
    return bm.represent_set(sf.ordinals(), register)


def cmd_apply(args) -> int:
    kind, art, extra = read_artifact(Path(args.op))
    sets = [load_set(p) for p in args.input]
    if kind == "operator":
        if len(sets) != 1:
            raise ValidationError("an operator takes exactly one --input set")
        op = art
        v = bm.prepare_input(op, _set_state(bm.input_register(op), sets[0]))
        w = apply(op, v)
        for i, z in enumerate(w.amplitudes):
            if z != 0:
                print(f"amp {w.basis.label(i)} {fmt(z.real)} {fmt(z.imag)}")
        out_labels = _result_labels(w.basis)
        print("set {" + ", ".join(out_labels[k] for k in sorted(bm.extract_set(w))) + "}")
        print(f"garbage-norm {fmt(bm.garbage_norm(w))}")
        return EXIT_OK
    circuit, layout = art, extra
    if layout is None:
        raise ValidationError("circuit file has no layout comments")
    if len(sets) != len(layout.arguments):
        raise ValidationError(f"circuit takes {len(layout.arguments)} input set(s), got {len(sets)}")
    for a, sf in enumerate(sets):
        if tuple(sf.space) != layout.arguments[a]:
            raise ValidationError(f"set space for argument {a} does not match circuit labels")
    if all(sf.membership is None for sf in sets):
        bits = layout.initial_bits(*[sf.ordinals() for sf in sets])
        out = qm.simulate_basis(circuit, bits)
        print(f"in  {bits}")
        print(f"out {out}")
        got = sorted(layout.read_set(out))
    else:
        v = qm.simulate_statevector(circuit, layout.initial_values(*[sf.values() for sf in sets]))
        probs = [qm.qubit_probability(v, q) for q in layout.output_qubits]
        for lab, p in zip(layout.codomain, probs):
            print(f"prob {lab} {fmt(p)}")
        got = [i for i, p in enumerate(probs) if p > bm.EXTRACT_EPS]
    print("set {" + ", ".join(layout.codomain[i] for i in got) + "}")
    return EXIT_OK


def _result_labels(basis: Basis) -> dict[int, str]:
    reg = basis.factors[0] if basis.factors else basis
    return {int(reg.ordinals[i]): reg.label(i) for i in range(len(reg)) if reg.ordinals[i] >= 0}


def cmd_verify(args) -> int:
    kind, art, extra = read_artifact(Path(args.op))
    if kind == "operator":
        res = unitarity_residual(art)
        print(f"unitarity-residual {fmt(res)}")
        if res > UNITARY_TOL:
            raise NumericError(f"unitarity residual {res:.3g} exceeds {UNITARY_TOL:g}")
        print("ok")
        return EXIT_OK
    circuit = art
    inv = circuit.inverse()
    q = circuit.num_qubits
    if q <= REVERSIBILITY_EXHAUSTIVE:
        cases = [format(i, f"0{q}b") for i in range(1 << q)]
    else:
        rng = random.Random(0)
        cases = ["".join(rng.choice("01") for _ in range(q)) for _ in range(REVERSIBILITY_SAMPLES)]
    bad = sum(1 for b in cases if qm.simulate_basis(inv, qm.simulate_basis(circuit, b)) != b)
    print(f"reversibility-cases {len(cases)} failures {bad}")
    if bad:
        raise NumericError(f"{bad} inputs not restored by inverse replay")
    print("ok")
    return EXIT_OK


def stats_lines(f: FiniteFunction) -> list[str]:
    lines = [
        f"n {f.n}",
        f"m {f.m}",
        f"image {f.m_r}",
        f"m_nr {f.m_nr}",
        f"n_b {f.n_b}",
        f"n_n {f.n_n}",
        f"m_n {f.m_n}",
        "multiplicities " + " ".join(f"{lab}={k}" for lab, k in zip(f.codomain, f.multiplicities)),
    ]
    n, m = f.n, f.m
    dims = {
        "bijection": str(n) if f.is_bijective else "n/a (not bijective)",
        "injection": str(m * n) if f.is_injective and n < m else "n/a (needs an injection with n < m)",
        "surjection": str(n) if f.is_surjective else "n/a (not surjective)",
        "arbitrary": str((m + 1) * (n + 1)),
    }
    for k, v in dims.items():
        lines.append(f"dimension {k} {v}")
    if f.is_binary:
        k = len(f.arguments)
        q = f"{2 * k * k + k + 2 * f.m_nr}" if f.m == k else "n/a (result grid differs from arguments)"
        lines.append(f"qubits qubit-binary {q}")
    elif n == m:
        lines.append(f"qubits qubit-unary {2 * f.n_n + f.n_b + f.m_nr - f.m_n}")
    else:
        lines.append("qubits qubit-unary n/a (needs n == m; use --pad)")
    return lines


def cmd_stats(args) -> int:
    print("\n".join(stats_lines(load_function(args.fn))))
    return EXIT_OK


def cmd_demux(args) -> int:
    if args.bits < 1:
        raise ValidationError("--bits must be at least 1")
    if not 0 <= args.k < (1 << args.bits):
        raise ValidationError(f"--k must lie in [0, {1 << args.bits})")
    circuit, layout = qm.demux_circuit(args.bits)
    addr = format(args.k, f"0{args.bits}b")
    bits = layout.initial_bits({i for i, b in enumerate(addr) if b == "1"})
    out = qm.simulate_basis(circuit, bits)
    print(f"qubits {circuit.num_qubits}")
    print(f"cswap {len(circuit)}")
    print(f"binary {out[:args.bits]}")
    print(f"map {out[args.bits:]}")
    print("position " + " ".join(str(k) for k in sorted(layout.read_set(out))))
    return EXIT_OK


def cmd_estimate(args) -> int:
    if args.layer:
        M, N, n = args.layer
        try:
            est = pipelines.estimate_layer(M, N, n)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        for name in ("M", "N", "n", "multiply_qubits", "add_qubits", "copy_ancillae", "copy_cnots"):
            print(f"{name.replace('_', '-')} {getattr(est, name)}")
        print(f"total-leading-order {est.total}")
        print(f"total-itemized {est.itemized}")
    if args.inner:
        N, n = args.inner
        try:
            plan = pipelines.inner_product_plan(N, pipelines.GridSpec(n, 0.0, 1.0))
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        sys.stdout.write(plan.manifest())
    if not (args.layer or args.inner):
        raise UsageError("estimate needs --layer M N n or --inner N n")
    return EXIT_OK


def cmd_export(args) -> int:
    kind, art, extra = read_artifact(Path(args.op))
    dest = Path(args.out) if args.out else None
    if args.format == "csv":
        op = art if kind == "operator" else qm.circuit_operator(art)
        if dest is not None:
            write_operator(op, dest, extra if kind == "operator" else "circuit")
        else:
            sys.stdout.write(export_csv(op))
        return EXIT_OK
    if kind != "circuit":
        raise ValidationError("only circuits can be exported as gate lists")
    text = qm.export_gates(art, extra)
    if dest is not None:
        dest.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="topomaps", description="Compile finite functions to unitaries and reversible circuits.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("compile", help="build an operator or circuit from a function table")
    c.add_argument("--kind", required=True, choices=OPERATOR_KINDS + CIRCUIT_KINDS)
    c.add_argument("--fn", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--pad", action="store_true", help="pad domain/codomain to equal size (qubit-unary)")
    c.set_defaults(func=cmd_compile)

    a = sub.add_parser("apply", help="push a set through an operator or circuit")
    a.add_argument("--op", required=True)
    a.add_argument("--input", required=True, action="append", help="set file; repeat for two-argument circuits")
    a.set_defaults(func=cmd_apply)

    v = sub.add_parser("verify", help="check unitarity or reversibility")
    v.add_argument("--op", required=True)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="function statistics and resource formulas")
    s.add_argument("--fn", required=True)
    s.set_defaults(func=cmd_stats)

    d = sub.add_parser("demux", help="route a binary address to a qubit map")
    d.add_argument("--bits", required=True, type=int)
    d.add_argument("--k", required=True, type=int)
    d.set_defaults(func=cmd_demux)

    e = sub.add_parser("estimate", help="qubit estimates for inner products and layers")
    e.add_argument("--layer", nargs=3, type=int, metavar=("M", "N", "n"))
    e.add_argument("--inner", nargs=2, type=int, metavar=("N", "n"))
    e.set_defaults(func=cmd_estimate)

    x = sub.add_parser("export", help="re-emit an artifact as CSV or gate list")
    x.add_argument("--op", required=True)
    x.add_argument("--format", required=True, choices=("csv", "gates"))
    x.add_argument("--out")
    x.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
