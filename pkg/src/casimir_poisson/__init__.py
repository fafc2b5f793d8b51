"""Poisson brackets with prescribed Casimir functions, computed exactly.

The engine works on a single coordinate chart with rational-function
coefficients. Layers, bottom up:

* :mod:`scalar_field` exact scalars and charts
* :mod:`exterior_calculus` forms, multivectors, wedge, d, contractions
* :mod:`volume_duality` volume duality, Schouten bracket, Poisson tests
* :mod:`symplectic_star` almost symplectic star calculus
* :mod:`casimir_even` / :mod:`casimir_odd` the constructions
* :mod:`applications` Dirac and nonholonomic brackets
* :mod:`fixtures`, :mod:`problem_file`, :mod:`runner`, :mod:`cli`
"""

from .applications import (
    DiracData,
    NonholonomicData,
    dirac_bivector,
    dirac_bracket,
    dirac_sigma,
    nonholonomic_bivector,
    nonholonomic_bracket,
    nonholonomic_factor,
    nonholonomic_kernel_forms,
    nonholonomic_sigma,
)
from .casimir_even import (
    ComplementaryConditionError,
    DegenerateCasimirsError,
    EvenProblem,
    PoissonCandidate,
    bracket,
    bracket_table,
    bracket_with_kernel,
    build_phi,
    build_poisson,
    casimir_factor,
    generic_rank,
    jacobian_bracket,
    verify_casimir_section,
)
from .casimir_odd import (
    AlmostCosymplectic,
    OddProblem,
    bracket_odd,
    build_poisson_odd,
    check_sigma_tau,
    decompose_bivector,
    suspend,
)
from .exterior_calculus import (
    Form,
    Multivector,
    apply_vector,
    differential,
    exterior_derivative,
    interior_by_form,
    interior_by_multivector,
    pair,
    wedge,
    wedge_power,
)
from .fixtures import fixture
from .problem_file import ProblemFileError, load_problem, parse_problem
from .runner import run
from .scalar_field import Chart, ChartMismatchError, ExpressionSyntaxError, ScalarField
from .symplectic_star import AlmostSymplectic, DegenerateFormError, darboux_form
from .volume_duality import (
    SharpMap,
    VolumeStructure,
    is_poisson,
    jacobi_violations,
    koszul_D,
    poisson_bracket,
    psi,
    psi_inverse,
    schouten,
)

__version__ = "0.1.0"
