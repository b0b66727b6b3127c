"""Null-homology of stationary sequences, made computational.

Subpackages and modules:

``sequences``    finite windows, shift, difference map, two-sided partial sums
``mrw``          finite-state Markov random walks: decision, lattice type, simulation
``rcm``          random conductance model on a torus: environment chain, corrector
``diagnostics``  tightness / L^p diagnostics and the equivalence experiment
``maps``         the bivariate sequence maps used for the fixed-point argument
``cli``          batch command line front end
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .rng import RandomSource  # noqa: F401
from .sequences import PathWindow, difference, partial_sums, shift, unshift  # noqa: F401
from .mrw import (  # noqa: F401
    CounterexampleCycle,
    IncrementFunction,
    LatticeReport,
    MarkovChainSpec,
    MRWTrajectory,
    ShiftFunction,
    decide_null_homology,
    lattice_span,
    make_null_homologous,
    recover_shift_function,
    simulate_mrw,
    validate_chain,
)
