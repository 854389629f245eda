"""Function tables and pipelines for neural-network style computation.

Real-valued functions are discretised onto grids: every output value is
rounded to the nearest grid point, ties going to the lower point, and
values beyond the grid are clamped to its ends.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .functions import FiniteFunction, FunctionError
from .qubit_maps import GateCircuit, RegisterLayout, binary_map_circuit, simulate_basis

TIE_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    n: int
    lower: float
    upper: float
    spacing: str = "uniform"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a grid needs at least two points")
        if not self.upper > self.lower:
            raise ValueError("grid upper bound must exceed the lower bound")
        if self.spacing not in ("uniform", "logarithmic"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "logarithmic" and self.lower <= 0:
            raise ValueError("logarithmic grids need a positive lower bound")

    @cached_property
    def points(self) -> np.ndarray:
        if self.spacing == "uniform":
            pts = self.lower + (self.upper - self.lower) * np.arange(self.n) / (self.n - 1)
        else:
            pts = np.geomspace(self.lower, self.upper, self.n)
        pts[0], pts[-1] = self.lower, self.upper
        return pts

    @property
    def step(self) -> float:
        if self.spacing != "uniform":
            raise ValueError("step is only defined for uniform grids")
        return (self.upper - self.lower) / (self.n - 1)

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(_label(p) for p in self.points)


def _label(x: float) -> str:
    s = format(float(x), ".12g")
    return "0" if s == "-0" else s


def round_to_grid(value: float, points: Sequence[float]) -> int:
    """Index of the nearest grid point; ties go to the lower point."""
    pts = np.asarray(points, dtype=float)
    if value <= pts[0]:
        return 0
    if value >= pts[-1]:
        return len(pts) - 1
    hi = int(np.searchsorted(pts, value, side="left"))
    lo = hi - 1
    if pts[hi] == value:
        return hi
    d_lo, d_hi = value - pts[lo], pts[hi] - value
    tol = TIE_TOL * (pts[hi] - pts[lo])
    return hi if d_hi < d_lo - tol else lo


def tabulate(fn: Callable[[float], float], grid: GridSpec, out: GridSpec | None = None) -> FiniteFunction:
    out = out or grid
    mapping = [round_to_grid(fn(float(x)), out.points) for x in grid.points]
    return FiniteFunction(grid.labels, out.labels, mapping)


def tabulate2(fn: Callable[[float, float], float], grid: GridSpec, out: GridSpec | None = None) -> FiniteFunction:
    out = out or grid
    table = [[round_to_grid(fn(float(x), float(y)), out.points) for y in grid.points] for x in grid.points]
    return FiniteFunction.binary(grid.labels, out.labels, table)


def squash_table(kind: str, grid: GridSpec) -> FiniteFunction:
    """``tanh-restricted``: ``tanh(x)/tanh(1)`` on ``[-1, 1]``; ``truncation``: clip to ``[-1, 1]``.

    Grid points outside ``[-1, 1]`` saturate.
    """
    if grid.lower > -1 or grid.upper < 1:
        raise FunctionError(f"squashing needs a grid covering [-1, 1], got [{grid.lower}, {grid.upper}]")
    if kind == "tanh-restricted":
        t1 = math.tanh(1.0)
        return tabulate(lambda x: math.tanh(min(max(x, -1.0), 1.0)) / t1, grid)
    if kind == "truncation":
        return tabulate(lambda x: min(max(x, -1.0), 1.0), grid)
    raise ValueError(f"unknown squash kind {kind!r}")


def _require_zero_based(grid: GridSpec) -> None:
    if grid.spacing != "uniform" or grid.lower != 0:
        raise FunctionError("sum and product tables need a uniform grid starting at 0")


def sum_table(kind: str, grid: GridSpec) -> FiniteFunction:
    """``tsum = min(x+y, max)``, ``hsum = (x+y)/2`` or ``wide`` (codomain doubled)."""
    _require_zero_based(grid)
    if kind == "tsum":
        return tabulate2(lambda x, y: min(x + y, grid.upper), grid)
    if kind == "hsum":
        return tabulate2(lambda x, y: (x + y) / 2, grid)
    if kind == "wide":
        wide = GridSpec(2 * grid.n - 1, 0.0, 2 * grid.upper)
        return tabulate2(lambda x, y: x + y, grid, wide)
    raise ValueError(f"unknown sum kind {kind!r}")


def product_table(grid: GridSpec) -> FiniteFunction:
    """``(x, y) -> x*y`` rounded onto the grid and truncated at its top."""
    _require_zero_based(grid)
    return tabulate2(lambda x, y: min(x * y, grid.upper), grid)


# --- pipelines ----------------------------------------------------------------


@dataclass(frozen=True)
class Stage:
    op: str  # "multiply" or "add"
    args: tuple[str, str]
    out: str
    table: FiniteFunction = field(repr=False)

    @cached_property
    def compiled(self) -> tuple[GateCircuit, RegisterLayout]:
        return binary_map_circuit(self.table)

    @property
    def qubits(self) -> int:
        return self.compiled[0].num_qubits

    def run(self, a: set[int], b: set[int]) -> set[int]:
        circuit, layout = self.compiled
        return layout.read_set(simulate_basis(circuit, layout.initial_bits(a, b)))


@dataclass(frozen=True)
class InnerProductPlan:
    """``N`` product stages then ``N - 1`` truncated-sum stages, result wired to argument."""

    N: int
    grid: GridSpec
    stages: tuple[Stage, ...]

    @property
    def leading_order_qubits(self) -> int:
        return 2 * self.N ** 2 * self.grid.n ** 2

    @property
    def itemized_qubits(self) -> int:
        return sum(s.qubits for s in self.stages)

    def run(self, xs: Sequence[set[int]], ws: Sequence[set[int]]) -> set[int]:
        """Execute every stage by basis replay on crisp input sets."""
        if len(xs) != self.N or len(ws) != self.N:
            raise ValueError(f"plan takes {self.N} inputs and {self.N} weights")
        regs: dict[str, set[int]] = {}
        for k in range(self.N):
            regs[f"x{k + 1}"], regs[f"w{k + 1}"] = set(xs[k]), set(ws[k])
        for s in self.stages:
            regs[s.out] = s.run(regs[s.args[0]], regs[s.args[1]])
        return regs[self.stages[-1].out]

    def manifest(self) -> str:
        lines = [f"inner-product N={self.N} n={self.grid.n}"]
        for i, s in enumerate(self.stages, 1):
            lines.append(f"stage {i} {s.op} {s.args[0]} {s.args[1]} -> {s.out} qubits {s.qubits}")
        lines.append(f"qubits leading-order {self.leading_order_qubits} itemized {self.itemized_qubits}")
        return "\n".join(lines) + "\n"


def inner_product_plan(N: int, grid: GridSpec) -> InnerProductPlan:
    if N < 1:
        raise ValueError("inner product needs N >= 1")
    mult, add = product_table(grid), sum_table("tsum", grid)
    stages = [Stage("multiply", (f"x{k}", f"w{k}"), f"p{k}", mult) for k in range(1, N + 1)]
    acc = "p1"
    for k in range(2, N + 1):
        stages.append(Stage("add", (acc, f"p{k}"), f"s{k}", add))
        acc = f"s{k}"
    return InnerProductPlan(N, grid, tuple(stages))


@dataclass(frozen=True)
class LayerEstimate:
    """Qubit budget of one layer of ``M`` inner products of length ``N``.

    ``total`` is the leading-order figure ``2 M N^2 n^2``; ``itemized``
    adds up the exact circuit sizes of every multiply and add plus the
    ancillae used to copy the input map.
    """

    M: int
    N: int
    n: int
    multiply_qubits: int
    add_qubits: int
    copy_ancillae: int
    copy_cnots: int
    total: int

    @property
    def itemized(self) -> int:
        return self.multiply_qubits + self.add_qubits + self.copy_ancillae


def _binary_qubits(f: FiniteFunction) -> int:
    n = len(f.arguments)
    return 2 * n * n + n + 2 * f.m_nr


def estimate_layer(M: int, N: int, n: int, grid: GridSpec | None = None) -> LayerEstimate:
    """Default grid: ``n`` uniform points on ``[0, 1]``."""
    if min(M, N, n) < 1:
        raise ValueError("M, N and n must be at least 1")
    if n >= 2:
        grid = grid or GridSpec(n, 0.0, 1.0)
        if grid.n != n:
            raise ValueError("grid size disagrees with n")
        q_mult = _binary_qubits(product_table(grid))
        q_add = _binary_qubits(sum_table("tsum", grid))
    else:
        q_mult = q_add = 2 * n * n + n
    return LayerEstimate(
        M=M, N=N, n=n,
        multiply_qubits=M * N * q_mult,
        add_qubits=M * (N - 1) * q_add,
        copy_ancillae=(M - 1) * n,
        copy_cnots=(M - 1) * n,
        total=2 * M * N * N * n * n,
    )
