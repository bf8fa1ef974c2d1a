"""jetwave: pseudo-spectral simulation and verification toolbox for the
motion of a 3D capillary liquid jet under surface tension.

The package is organized around one module per subsystem:

* ``spectral``  -- Fourier analysis on the torus, dealiasing, dyadic blocks
* ``geometry``  -- metric factor, mean curvature, energies of the surface
* ``elliptic``  -- mapped Laplace solve and the Dirichlet-to-Neumann operator
* ``paradiff``  -- Bony paraproducts, paradifferential quantization
* ``symbols``   -- closed-form symbol calculus and the identity report
* ``evolution`` -- time integration, conservation tracking, dispersion
* ``cli``       -- configuration-driven command line entry points
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainViolationError,
    EllipticityError,
    JetwaveError,
)
from .spectral import (
    TAU,
    DyadicDecomposition,
    TorusField,
    TorusGrid,
    band_limited_random,
    dealiased_product,
    dyadic_block,
    forward_transform,
    integrate_product,
    inverse_transform,
    low_pass,
    nonlinear_eval,
    spectral_derivative,
)
from .geometry import (
    SurfaceState,
    enclosed_volume,
    mean_curvature,
    metric_factor,
    modified_gradient,
    potential_energy,
)
from .elliptic import (
    DtnSolver,
    MappedCoefficients,
    PotentialField,
    TraceBundle,
    build_coefficients,
    hamiltonian_variations,
    shape_derivative,
)
from .paradiff import apply_paradiff, bony_remainder, good_unknown, paraproduct
from .symbols import (
    HomogeneousSymbol,
    adjoint_symbol,
    lambda_symbol,
    mollifier_symbol,
    mu_symbol,
    parametrix,
    poisson_bracket,
    sharp_compose,
    symbol_identity_report,
    symmetrizer_symbols,
)
from .evolution import (
    EvolutionConfig,
    Trajectory,
    bessel_dtn_eigenvalue,
    linearized_growth_rate,
    rhs,
    simulate,
    step_rk4,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
