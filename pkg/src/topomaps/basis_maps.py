"""Graph-kernel unitaries on topographic basis maps.

Each value of a finite domain is one basis vector.  A function is realised
as a unitary that permutes (or, for many-to-one functions, rotates) those
basis vectors, with ancilla and garbage registers where the shapes demand
it.  Sets of values are states with equal positive amplitudes on their
members.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .functions import FiniteFunction, FunctionError, fresh_label
from .state import AmplitudeVector, Basis, BasisMapOperator, store, tensor

EXTRACT_EPS = 1e-9
GARBAGE_STEM = "γ"
EMPTY_IN = "x0"
EMPTY_OUT = "y0"

# A component is a list of dyads (output index, {input index: coefficient});
# every construction below sends ON input vectors to output basis vectors.
Dyad = tuple[int, dict[int, float]]


def _missing(f: FiniteFunction) -> list[str]:
    return [f.codomain[i] for i in f.non_range]


def _collisions(f: FiniteFunction) -> list[str]:
    return [f.codomain[i] for i in f.image if f.multiplicities[i] > 1]


def require_bijective(f: FiniteFunction) -> None:
    if f.n != f.m:
        raise FunctionError(f"not bijective: domain has {f.n} elements, codomain {f.m}")
    require_injective(f)


def require_injective(f: FiniteFunction) -> None:
    if not f.is_injective:
        raise FunctionError(f"not injective: codomain elements with several preimages: {_collisions(f)}")


def require_surjective(f: FiniteFunction) -> None:
    if not f.is_surjective:
        raise FunctionError(f"not surjective: codomain elements missing from the range: {_missing(f)}")


def _assemble(in_basis: Basis, out_basis: Basis, parts: dict[str, list[Dyad]], name: str) -> BasisMapOperator:
    rows, cols, vals = [], [], []
    for dyads in parts.values():
        for r, coeffs in dyads:
            for c, v in coeffs.items():
                rows.append(r)
                cols.append(c)
                vals.append(v)
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(len(out_basis), len(in_basis)), dtype=complex)
    counts = {k: len(d) for k, d in parts.items()}
    return BasisMapOperator(in_basis, out_basis, store(mat), components=counts, name=name)


def _split(op_in: Basis, op_out: Basis, parts: dict[str, list[Dyad]], name: str) -> dict[str, BasisMapOperator]:
    return {k: _assemble(op_in, op_out, {k: d}, f"{name}.{k}") for k, d in parts.items()}


# --- bijections -----------------------------------------------------------


def bijection_kernel(f: FiniteFunction) -> BasisMapOperator:
    """Permutation matrix ``sum_i |f(x_i)><x_i|``."""
    require_bijective(f)
    parts = {"T": [(f(j), {j: 1.0}) for j in range(f.n)]}
    return _assemble(Basis(f.domain), Basis(f.codomain), parts, "bijection")


# --- injections -----------------------------------------------------------


def _injection_spaces(f: FiniteFunction) -> tuple[Basis, Basis]:
    dom, cod = Basis(f.domain), Basis(f.codomain)
    # ancilla register uses the codomain basis, garbage register the domain basis
    return Basis.product(dom, cod, result_minor=f.codomain[0]), Basis.product(cod, dom, result_minor=f.domain[0])


def _injection_parts(f: FiniteFunction) -> dict[str, list[Dyad]]:
    require_injective(f)
    if f.n >= f.m:
        raise FunctionError(
            f"injection construction needs n < m (got n={f.n}, m={f.m}); use the bijection kernel when n == m"
        )
    n, m = f.n, f.m

    def src(j, i):  # |x_j>|w_i>
        return j * m + i

    def dst(i, j):  # |y_i>|v_j>
        return i * n + j

    z = f.non_range
    return {
        "T": [(dst(f(j), 0), {src(j, 0): 1.0}) for j in range(n)],
        "S": [(dst(z[i - 1], 0), {src(0, i): 1.0}) for i in range(1, f.m_nr + 1)],
        "R": [(dst(i, j), {src(j, i): 1.0}) for i in range(1, m) for j in range(1, n)],
        "Q": [(dst(0, t), {src(0, f.m_nr + t): 1.0}) for t in range(1, n)],
    }


def injection_unitary(f: FiniteFunction) -> BasisMapOperator:
    """``U = T + S + R + Q`` on the ``mn``-dimensional ancilla-extended space.

    ``U(|x>|y_1>) = |f(x)>|x_1>``: the first codomain label serves as the
    ancilla constant and the first domain label as the garbage value.
    """
    parts = _injection_parts(f)
    return _assemble(*_injection_spaces(f), parts, "injection")


def injection_components(f: FiniteFunction) -> dict[str, BasisMapOperator]:
    return _split(*_injection_spaces(f), _injection_parts(f), "injection")


# --- surjections ----------------------------------------------------------


@dataclass(frozen=True)
class SurjectionDecomposition:
    """ON bases of the non-null and null spaces of a graph kernel.

    ``nonnull[i]`` is ``u_i`` for the ``i``-th range element (codomain
    order); ``null`` rows are the ``v_k``; ``garbage`` labels the extra
    output coordinates that receive them.
    """

    nonnull: np.ndarray
    null: np.ndarray
    garbage: tuple[str, ...]
    multiplicities: tuple[int, ...]
    range_elements: tuple[int, ...]


def _decompose(f: FiniteFunction) -> SurjectionDecomposition:
    n = f.n
    us, vs = [], []
    for i in f.image:
        block = f.preimages[i]
        u = np.zeros(n)
        u[list(block)] = 1.0 / math.sqrt(len(block))
        us.append(u)
        # Gram-Schmidt over e_first - e_t, t in block order
        local: list[np.ndarray] = []
        for t in block[1:]:
            d = np.zeros(n)
            d[block[0]], d[t] = 1.0, -1.0
            for q in local:
                d -= (q @ d) * q
            d /= np.linalg.norm(d)
            local.append(d)
        vs.extend(local)
    garbage: list[str] = []
    for _ in range(len(vs)):
        garbage.append(fresh_label(GARBAGE_STEM, list(f.codomain) + garbage))
    return SurjectionDecomposition(
        nonnull=np.array(us).reshape(len(us), n),
        null=np.array(vs).reshape(len(vs), n),
        garbage=tuple(garbage),
        multiplicities=tuple(f.multiplicities[i] for i in f.image),
        range_elements=f.image,
    )


def surjection_decomposition(f: FiniteFunction) -> SurjectionDecomposition:
    require_surjective(f)
    return _decompose(f)


def _surjection_spaces(f: FiniteFunction, dec: SurjectionDecomposition) -> tuple[Basis, Basis]:
    out = Basis(f.codomain + dec.garbage, extra=range(f.m, f.n))
    return Basis(f.domain), out


def _surjection_parts(f: FiniteFunction, dec: SurjectionDecomposition) -> dict[str, list[Dyad]]:
    def row(vec):
        return {j: float(c) for j, c in enumerate(vec) if c != 0.0}

    return {
        "M": [(i, row(dec.nonnull[i])) for i in range(f.m)],
        "N": [(f.m + k, row(dec.null[k])) for k in range(len(dec.null))],
    }


def surjection_unitary(f: FiniteFunction) -> BasisMapOperator:
    """``T = M + N``: ``T|x> = |f(x)>/sqrt(n_x) + |garbage>``.

    The output space lists the codomain first and then ``n - m`` garbage
    coordinates (flagged extra).
    """
    dec = surjection_decomposition(f)
    return _assemble(*_surjection_spaces(f, dec), _surjection_parts(f, dec), "surjection")


def surjection_components(f: FiniteFunction) -> dict[str, BasisMapOperator]:
    dec = surjection_decomposition(f)
    return _split(*_surjection_spaces(f, dec), _surjection_parts(f, dec), "surjection")


# --- arbitrary functions --------------------------------------------------


def _arbitrary_spaces(f: FiniteFunction) -> tuple[Basis, Basis, Basis, Basis]:
    x0 = EMPTY_IN if EMPTY_IN not in f.domain else fresh_label(EMPTY_IN + "_", f.domain)
    y0 = EMPTY_OUT if EMPTY_OUT not in f.codomain else fresh_label(EMPTY_OUT + "_", f.codomain)
    ext_dom = Basis((x0,) + f.domain, extra=[0])
    ext_cod = Basis((y0,) + f.codomain, extra=[0])
    return (
        Basis.product(ext_dom, ext_cod, result_minor=y0),
        Basis.product(ext_cod, ext_dom, result_minor=x0),
        ext_dom,
        ext_cod,
    )


def _arbitrary_parts(f: FiniteFunction) -> dict[str, list[Dyad]]:
    n, m = f.n, f.m
    dec = _decompose(f)

    def src(a, c):  # |x_a>|y_c>, index 0 is the extra value
        return a * (m + 1) + c

    def dst(b, g):  # |y_b>|x_g>
        return b * (n + 1) + g

    def lift(vec):
        return {src(j + 1, 0): float(c) for j, c in enumerate(vec) if c != 0.0}

    z, r = f.non_range, f.image
    return {
        "M": [(dst(r[i] + 1, 0), lift(dec.nonnull[i])) for i in range(f.m_r)],
        "N": [(dst(0, k + 1), lift(dec.null[k])) for k in range(f.n_o)],
        "S": [(dst(z[i - 1] + 1, 0), {src(0, i): 1.0}) for i in range(1, f.m_nr + 1)],
        "R": [(dst(i, j), {src(j, i): 1.0}) for i in range(1, m + 1) for j in range(1, n + 1)],
        "Q": [(dst(0, f.n_o + k), {src(0, f.m_nr + k): 1.0}) for k in range(1, f.m_r + 1)],
        "P": [(dst(0, 0), {src(0, 0): 1.0})],
    }


def arbitrary_unitary(f: FiniteFunction) -> BasisMapOperator:
    """``U = M + N + S + R + Q + P`` on ``(m+1)(n+1)`` dimensions.

    The domain and codomain are each extended by one empty value; the
    ancilla register starts in the empty codomain value and garbage lands
    on coordinates whose first register holds the empty codomain value.
    """
    ins, outs, _, _ = _arbitrary_spaces(f)
    return _assemble(ins, outs, _arbitrary_parts(f), "arbitrary")


def arbitrary_components(f: FiniteFunction) -> dict[str, BasisMapOperator]:
    ins, outs, _, _ = _arbitrary_spaces(f)
    return _split(ins, outs, _arbitrary_parts(f), "arbitrary")


# --- set semantics --------------------------------------------------------


def represent_set(members: Iterable[int], space: Basis) -> AmplitudeVector:
    """Equal amplitudes ``1/sqrt(|S|)`` on the members; empty set is the zero vector.

    ``members`` are value ordinals, i.e. positions among the computational
    coordinates of ``space``.
    """
    members = sorted(set(members))
    amps = np.zeros(len(space), dtype=complex)
    if members:
        w = 1.0 / math.sqrt(len(members))
        for k in members:
            amps[space.position_of_ordinal(k)] = w
    return AmplitudeVector(space, amps)


def prepare_input(op: BasisMapOperator, v: AmplitudeVector) -> AmplitudeVector:
    """Attach the ancilla constant when ``v`` lives on the first input register only."""
    if v.basis.labels == op.in_basis.labels:
        return v
    ins = op.in_basis
    if len(ins.factors) == 2 and v.basis.labels == ins.factors[0].labels:
        anc = ins.factors[1]
        minor = ins.computational()[0] % len(anc)
        return tensor(v, AmplitudeVector.basis_state(anc, anc.label(minor)))
    raise FunctionError(f"input of dimension {len(v.basis)} does not fit operator input {ins!r}")


def input_register(op: BasisMapOperator) -> Basis:
    """Basis that input sets are drawn from."""
    return op.in_basis.factors[0] if len(op.in_basis.factors) == 2 else op.in_basis


def extract_set(v: AmplitudeVector, eps: float = EXTRACT_EPS) -> set[int]:
    """Ordinals of computational coordinates with ``|amplitude| > eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    hit = (np.abs(v.amplitudes) > eps) & (v.basis.ordinals >= 0)
    return {int(k) for k in v.basis.ordinals[hit]}


def garbage_norm(v: AmplitudeVector) -> float:
    """Norm of the component outside the computational sub-basis."""
    mask = v.basis.ordinals < 0
    return float(np.linalg.norm(v.amplitudes[mask]))
