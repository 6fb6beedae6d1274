"""Mean-field phases and collective modes of the cooperative E x e Jahn-Teller lattice model."""

from .errors import (
    BudgetError,
    CJTError,
    ConvergenceError,
    DomainError,
    UnstableBosonSector,
    UnstableSpectrumError,
    ValidationError,
)
from .fluctuations import (
    BranchSpectrum,
    FluctuationMatrix,
    amplitude_gaps,
    appendix_transform_matrices,
    decoupling_transform_matrices,
    branch_dispersion,
    continuum_dispersion,
    fluctuation_matrix,
    goldstone_slope,
    renormalized_frequency,
    symplectic_oracle,
)
from .lattice import (
    HoppingSpec,
    NormalModeBasis,
    analytic_nn_dispersion,
    build_hopping_matrix,
    coupling_matrix_J,
    normal_modes,
    staggered_transform,
    uniform_chain,
)
from .meanfield import (
    MeanFieldState,
    ModelParams,
    Phase,
    classical_energy,
    critical_coupling,
    evolve_classical,
    general_saddle_point,
    homogeneous_saddle_point,
    saddle_residual,
)

__version__ = "0.1.0"
