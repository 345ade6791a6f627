"""Independent numerical ground truth: Gaussian covariance and truncated Fock simulators."""

from .fock import (
    FockConvergenceError,
    FockExpectations,
    FockState,
    TruncationWarning,
    fock_braid_overlap,
    fock_expectations,
    fock_tfd_state,
    wavefunction_from_fock,
)
from .gaussian import (
    GaussianMode,
    free_evolution,
    gaussian_photon_stats,
    gaussian_tfd_state,
    reduce_physical,
)
from .quad import IntegrationError, quad_integrate
