"""Exact partition functions of the Z_n vector Potts model on small tori,
computed through the generalized Clifford algebra and cross-checked by
independent routes."""

from .errors import (
    CapacityError,
    CliffpartError,
    DomainWarning,
    IncompatibleOrderError,
    InvalidInputError,
    InvalidOrderError,
    NumericDomainError,
    PreconditionError,
    RepresentationError,
)
from .gca import (
    AlgebraElement,
    AlgebraSignature,
    GammaMonomial,
    exp_unit_monomial,
    k_signum,
    matrix_trace,
    trace_normal_form,
    trace_theorem,
)
from .kernels import BACKEND
from .phase import PhaseExponent, gen_hyperbolic, omega, rho, xi
from .potts import (
    LatticeModel,
    SpinConfiguration,
    brute_force_partition,
    build_transfer,
    decomposed_power,
    energy,
    gamma_forms,
    ising_closed_form,
    multisum_power,
    projector_suite,
)

__version__ = "0.1.0"
