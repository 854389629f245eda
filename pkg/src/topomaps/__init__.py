"""Topographic maps: finite functions compiled to unitaries and reversible circuits."""
from .basis_maps import (arbitrary_unitary, bijection_kernel, extract_set, injection_unitary, represent_set,
                         surjection_decomposition, surjection_unitary)
from .pipelines import GridSpec, estimate_layer, inner_product_plan, product_table, squash_table, sum_table
from .functions import FiniteFunction, load_function, load_set, pad_square
from .qubit_maps import (GateCircuit, MembershipVector, RegisterLayout, binary_map_circuit, copy_crisp_map,
                         demux_circuit, or2_circuit, orn_circuit, outer_product_circuit, simulate_basis,
                         simulate_statevector, unary_map_circuit)
from .state import AmplitudeVector, Basis, BasisMapOperator, adjoint, apply, compose, tensor, unitarity_residual

__all__ = [
    "AmplitudeVector", "Basis", "BasisMapOperator", "FiniteFunction", "GateCircuit", "GridSpec",
    "MembershipVector", "RegisterLayout", "adjoint", "apply", "arbitrary_unitary", "bijection_kernel",
    "binary_map_circuit", "compose", "copy_crisp_map", "demux_circuit", "estimate_layer", "extract_set",
    "injection_unitary", "inner_product_plan", "load_function", "load_set", "or2_circuit", "orn_circuit",
    "outer_product_circuit", "pad_square", "product_table", "represent_set", "simulate_basis",
    "simulate_statevector", "squash_table", "sum_table", "surjection_decomposition", "surjection_unitary",
    "tensor", "unary_map_circuit", "unitarity_residual",
]
