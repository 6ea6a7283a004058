"""Time-frequency limiting operators on discrete abelian groups.

Build Toeplitz operators (prolate, periodic prolate, 2-D, symbol- or
impulse-generated), compute their spectra and Slepian bases, and check or
use the eigenvalue-distribution laws they obey.
"""
from .approx import (
    SlepianBasis,
    character_approx_mse,
    dof_convergence_study,
    effective_dimension,
    n_width,
    random_residual,
    random_residual_mc,
    uniform_sinusoid_K,
)
from .estimators import MultitaperPSD, SlepianProjector
from .exceptions import *  # noqa: F401,F403
from .fastapply import multitaper_psd, toeplitz_matvec, truncated_pinv_solve
from .groups import BandSpec, GroupSpec, TimeWindow, band_measure, character_eval
from .io import load_decomposition, load_operator, persist_decomposition, save_operator
from .operators import (
    SymbolGrid,
    ToeplitzOperator,
    autocorrelation_operator,
    bandlimit_kernel,
    periodic_prolate_operator,
    prolate_operator,
    prolate_operator_2d,
    toeplitz_from_impulse,
    toeplitz_from_symbol,
)
from .spectral import (
    EigenDecomposition,
    dpss_basis,
    eig_count,
    eig_hermitian,
    estimate_eigs_circulant,
    estimate_eigs_symbol_sampling,
    szego_report,
    transition_bound_dpss,
)

__version__ = "0.1.0"
