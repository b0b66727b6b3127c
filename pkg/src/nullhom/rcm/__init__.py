"""Random conductance model on the discrete torus."""

from .field import (  # noqa: F401
    ConductanceField,
    constant_field,
    load_field,
    sample_field,
    save_field,
    transition_probs,
)
from .environment import (  # noqa: F401
    CorrectorField,
    EnvironmentChain,
    build_environment,
    limit_gradient,
    local_drift,
    neumann_series,
    regularized_corrector,
    solve_poisson,
)
from .checks import check_harmonic, check_stationary_gradient, verify_field  # noqa: F401
from .walks import (  # noqa: F401
    QuenchedWalk,
    corrected_martingale_check,
    martingale_decomposition,
    simulate_quenched_walk,
)
from .experiments import azuma_check, clt_experiment, corrector_scan, lln_check  # noqa: F401
