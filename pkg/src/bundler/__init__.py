"""Multiphoton bundle emission from a driven two-level system in a cavity.

Steady-state Lindblad solvers, Liouvillian spectral decomposition,
effective n-photon models, phonon environments and the figures of merit
of frequency-filtered bundle emission, with analytic and numeric
pipelines validating each other.
"""

__version__ = "0.1.0"

from .errors import BundlerError, ValidityWarning
from .hilbert import (
    QOperator,
    DressedBasis,
    annihilation,
    dressed_basis,
    lower_tls,
    tensor_embed,
)
from .liouville import Channel, Superoperator, SystemParams, hamiltonian, liouvillian
from .steady import DensityMatrix, choose_truncation, expectation, steady_state
from .spectra import (
    SpectralLine,
    SpectrumDecomposition,
    decompose,
    filtered_population,
    spectrum_at,
)
from .effective import (
    EffectiveCoupling,
    bundle_liouvillian,
    bundle_population,
    gn_closed,
    gn_numeric,
)
from .onephoton import CorrelatorSet, na1, na1_filtered, qrt_lines, steady_correlators
from .phonon import PhononEnvironment, displacement_B, feeding_rates, spectral_density
from .drive import DriveTransform, coherent_spectrum, displace, rejection_ratio
from .metrics import (
    BundleMetrics,
    optimal_gamma_sigma,
    optimal_omega,
    purity,
    purity_filtered,
    report,
)
from .presets import PRESETS, load_preset, preset_params
