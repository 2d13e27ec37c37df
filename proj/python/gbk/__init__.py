"""Python bindings for the gbk kinetic solver."""

from ._gbk import (
    BathParams,
    WeightParams,
    __version__,
    assemble_operator,
    collision_frequency,
    collision_frequency_quadrature,
    eigenvalues,
    energy_change,
    kernel_k_e,
    post_collision,
    post_collision_sigma,
    power_split_check,
    simulate,
    steady_state,
    stretched_gaussian_check,
    theta_sharp,
)

__all__ = [
    "BathParams",
    "WeightParams",
    "__version__",
    "assemble_operator",
    "collision_frequency",
    "collision_frequency_quadrature",
    "eigenvalues",
    "energy_change",
    "kernel_k_e",
    "post_collision",
    "post_collision_sigma",
    "power_split_check",
    "simulate",
    "steady_state",
    "stretched_gaussian_check",
    "theta_sharp",
]
