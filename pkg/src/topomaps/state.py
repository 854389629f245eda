"""Complex linear algebra over labeled bases.

A :class:`Basis` is an ordered list of unique labels.  Product bases keep
their factors so that registers can be told apart after a tensor product.
Some coordinates of a basis can be flagged *extra* (padding values such as
an empty-input marker, or garbage coordinates); everything else is the
computational sub-basis, and each computational coordinate carries the
ordinal of the value it stands for.

Operators are dense ``numpy`` arrays up to :data:`DENSE_LIMIT` and
``scipy.sparse`` CSR matrices above it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

UNITARY_TOL = 1e-12
NORM_TOL = 1e-12
DENSE_LIMIT = 4096
TENSOR_SEP = "⊗"


class BasisError(ValueError):
    """Raised when two labeled spaces do not line up."""


class Basis:
    """Ordered, uniquely labeled orthonormal basis.

    ``extra`` holds indices that are not part of the computational
    sub-basis.  ``ordinals[i]`` is the value ordinal of coordinate ``i``
    (``-1`` for extra coordinates).
    """

    __slots__ = ("labels", "factors", "extra", "ordinals", "_index")

    def __init__(
        self,
        labels: Iterable[str],
        factors: Sequence["Basis"] = (),
        extra: Iterable[int] = (),
        ordinals: Sequence[int] | None = None,
    ):
        self.labels = tuple(str(lab) for lab in labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            dupes = sorted({lab for lab in self.labels if self.labels.count(lab) > 1})
            raise BasisError(f"duplicate basis labels: {dupes}")
        self.factors = tuple(factors)
        self.extra = frozenset(int(i) for i in extra)
        if any(i < 0 or i >= len(self.labels) for i in self.extra):
            raise BasisError("extra index out of range")
        if ordinals is None:
            ords, k = [], 0
            for i in range(len(self.labels)):
                if i in self.extra:
                    ords.append(-1)
                else:
                    ords.append(k)
                    k += 1
            ordinals = ords
        self.ordinals = np.asarray(ordinals, dtype=np.int64)
        if self.ordinals.shape != (len(self.labels),):
            raise BasisError("ordinals must have one entry per label")

    @classmethod
    def product(cls, a: "Basis", b: "Basis", result_minor: str | None = None) -> "Basis":
        """Row-major product basis, ``a`` major.

        A coordinate is computational when its ``a`` part is computational
        and, if ``result_minor`` is given, its ``b`` part is that label.  Its
        ordinal is the ordinal of the ``a`` part.
        """
        labels = [f"{la}{TENSOR_SEP}{lb}" for la in a.labels for lb in b.labels]
        minor = None if result_minor is None else b.index(result_minor)
        extra, ords = [], []
        for i in range(len(a)):
            for j in range(len(b)):
                ok = a.ordinals[i] >= 0 and (minor is None or j == minor)
                ords.append(int(a.ordinals[i]) if ok else -1)
                if not ok:
                    extra.append(i * len(b) + j)
        return cls(labels, factors=(a, b), extra=extra, ordinals=ords)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise BasisError(f"label {label!r} not in basis") from None

    def label(self, i: int) -> str:
        return self.labels[i]

    def computational(self) -> list[int]:
        return [i for i in range(len(self.labels)) if i not in self.extra]

    def position_of_ordinal(self, ordinal: int) -> int:
        hits = np.flatnonzero(self.ordinals == ordinal)
        if len(hits) != 1:
            raise BasisError(f"ordinal {ordinal} does not name a unique coordinate")
        return int(hits[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Basis):
            return NotImplemented
        return self.labels == other.labels and self.extra == other.extra

    def __hash__(self) -> int:
        return hash((self.labels, self.extra))

    def __repr__(self) -> str:
        shown = ", ".join(self.labels[:6]) + (", ..." if len(self.labels) > 6 else "")
        return f"Basis([{shown}], dim={len(self.labels)})"

    def to_dict(self) -> dict:
        d: dict = {"labels": list(self.labels)}
        if self.factors:
            d["factors"] = [f.to_dict() for f in self.factors]
        if self.extra:
            d["extra"] = sorted(self.extra)
            d["ordinals"] = self.ordinals.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Basis":
        factors = [cls.from_dict(f) for f in d.get("factors", [])]
        return cls(d["labels"], factors=factors, extra=d.get("extra", ()), ordinals=d.get("ordinals"))


@dataclass(frozen=True, eq=False)
class AmplitudeVector:
    """Complex amplitudes over a labeled basis; squared norm at most one."""

    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != len(self.basis):
            raise BasisError(f"{amps.shape[0]} amplitudes for a basis of dimension {len(self.basis)}")
        if float(np.vdot(amps, amps).real) > 1 + NORM_TOL:
            raise ValueError("state has squared norm above one")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, basis: Basis, label: str) -> "AmplitudeVector":
        amps = np.zeros(len(basis), dtype=complex)
        amps[basis.index(label)] = 1.0
        return cls(basis, amps)

    @classmethod
    def zeros(cls, basis: Basis) -> "AmplitudeVector":
        return cls(basis, np.zeros(len(basis), dtype=complex))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis.index(label)])

    def inner(self, other: "AmplitudeVector") -> complex:
        """``<self|other>``."""
        _same_basis(self.basis, other.basis)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __len__(self) -> int:
        return len(self.basis)


def _same_basis(a: Basis, b: Basis) -> None:
    if a.labels != b.labels:
        raise BasisError(f"basis mismatch: {a!r} vs {b!r}")


@dataclass(frozen=True, eq=False)
class BasisMapOperator:
    """Matrix between labeled bases, shape ``(dim out, dim in)``.

    ``components`` optionally records how many input basis vectors each
    named summand of a construction maps.
    """

    in_basis: Basis
    out_basis: Basis
    matrix: np.ndarray | sp.csr_matrix
    components: dict[str, int] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        mat = self.matrix
        if sp.issparse(mat):
            mat = sp.csr_matrix(mat, dtype=complex)
        else:
            mat = np.asarray(mat, dtype=complex)
            if mat.ndim != 2:
                raise ValueError("operator matrix must be two-dimensional")
            mat.setflags(write=False)
        if mat.shape != (len(self.out_basis), len(self.in_basis)):
            raise BasisError(
                f"matrix shape {mat.shape} does not match bases ({len(self.out_basis)}, {len(self.in_basis)})"
            )
        object.__setattr__(self, "matrix", mat)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.array(self.matrix)

    def entries(self) -> list[tuple[int, int, complex]]:
        """Nonzero entries in row-major order."""
        coo = sp.coo_matrix(self.matrix)
        order = np.lexsort((coo.col, coo.row))
        return [
            (int(coo.row[k]), int(coo.col[k]), complex(coo.data[k]))
            for k in order
            if coo.data[k] != 0
        ]


def store(mat: np.ndarray | sp.spmatrix) -> np.ndarray | sp.csr_matrix:
    """Dense up to :data:`DENSE_LIMIT`, CSR above."""
    if max(mat.shape) > DENSE_LIMIT:
        return sp.csr_matrix(mat, dtype=complex)
    return mat.toarray() if sp.issparse(mat) else np.asarray(mat, dtype=complex)


def tensor(a: AmplitudeVector, b: AmplitudeVector) -> AmplitudeVector:
    """Product state, ``a`` major: ``tensor(e_i, e_j)`` is ``e_{i*dim(b)+j}``."""
    return AmplitudeVector(Basis.product(a.basis, b.basis), np.kron(a.amplitudes, b.amplitudes))


def apply(op: BasisMapOperator, v: AmplitudeVector) -> AmplitudeVector:
    _same_basis(op.in_basis, v.basis)
    out = op.matrix @ v.amplitudes
    return AmplitudeVector(op.out_basis, np.asarray(out).reshape(-1))


def adjoint(op: BasisMapOperator) -> BasisMapOperator:
    mat = op.matrix.conj().T
    return BasisMapOperator(op.out_basis, op.in_basis, sp.csr_matrix(mat) if op.is_sparse else mat,
                            name=f"{op.name}†" if op.name else "")


def compose(g: BasisMapOperator, f: BasisMapOperator) -> BasisMapOperator:
    """``g ∘ f`` (apply ``f`` first)."""
    _same_basis(f.out_basis, g.in_basis)
    mat = g.matrix @ f.matrix
    return BasisMapOperator(f.in_basis, g.out_basis, store(mat))


def identity(basis: Basis) -> BasisMapOperator:
    n = len(basis)
    mat = sp.identity(n, dtype=complex, format="csr") if n > DENSE_LIMIT else np.eye(n, dtype=complex)
    return BasisMapOperator(basis, basis, mat, name="I")


def unitarity_residual(op: BasisMapOperator) -> float:
    """``max(|U†U - I|_max, |UU† - I|_max)``."""
    rows, cols = op.shape
    if rows != cols:
        raise BasisError(f"unitarity needs a square operator, got {rows}x{cols}")
    u = op.matrix
    if sp.issparse(u):
        eye = sp.identity(rows, dtype=complex, format="csr")
        res = 0.0
        for prod in (u.conj().T @ u, u @ u.conj().T):
            diff = (prod - eye).tocoo()
            if diff.nnz:
                res = max(res, float(np.abs(diff.data).max()))
        return res
    eye = np.eye(rows)
    return float(max(np.abs(u.conj().T @ u - eye).max(), np.abs(u @ u.conj().T - eye).max()))


def export_csv(op: BasisMapOperator) -> str:
    """``dims,<rows>,<cols>`` then ``row,col,re,im`` per nonzero entry."""
    rows, cols = op.shape
    lines = [f"dims,{rows},{cols}"]
    lines += [f"{r},{c},{z.real:.17g},{z.imag:.17g}" for r, c, z in op.entries()]
    return "\n".join(lines) + "\n"


def parse_csv(text: str, in_basis: Basis | None = None, out_basis: Basis | None = None) -> BasisMapOperator:
    """Inverse of :func:`export_csv`; bases default to ``0..dim-1`` labels."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty operator file")
    head = lines[0].split(",")
    if len(head) != 3 or head[0] != "dims":
        raise ValueError(f"bad operator header: {lines[0]!r}")
    rows, cols = int(head[1]), int(head[2])
    r_idx, c_idx, vals = [], [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 4:
            raise ValueError(f"bad operator entry: {ln!r}")
        r, c = int(parts[0]), int(parts[1])
        if not (0 <= r < rows and 0 <= c < cols):
            raise ValueError(f"entry ({r},{c}) outside {rows}x{cols}")
        r_idx.append(r)
        c_idx.append(c)
        vals.append(complex(float(parts[2]), float(parts[3])))
    mat = sp.coo_matrix((vals, (r_idx, c_idx)), shape=(rows, cols), dtype=complex)
    in_basis = in_basis or Basis(str(i) for i in range(cols))
    out_basis = out_basis or Basis(str(i) for i in range(rows))
    return BasisMapOperator(in_basis, out_basis, store(mat))


def permutation_operator(in_basis: Basis, out_basis: Basis, target: Sequence[int], name: str = "") -> BasisMapOperator:
    """Operator sending input coordinate ``j`` to output coordinate ``target[j]``."""
    n = len(in_basis)
    if sorted(target) != list(range(len(out_basis))) or len(target) != n:
        raise ValueError("target is not a permutation of the output coordinates")
    mat = sp.coo_matrix((np.ones(n), (np.asarray(target), np.arange(n))), shape=(len(out_basis), n))
    return BasisMapOperator(in_basis, out_basis, store(mat), name=name)
