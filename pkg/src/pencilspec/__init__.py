"""Direct and inverse two-spectra problems for energy-dependent Sturm-Liouville pencils."""
from .dirac import DiracPotential, Form, Spectrum, Which, dirac_char, dirac_spectrum, integrate_dirac
from .errors import (NonConvergence, NotHyperbolic, NotInSD, PencilSpecError, QuantizationError,
                     RoundTripFailure)
from .gauge import GaugeAngle, assemble_P, rotation_matrix, solve_theta2
from .gridfn import GridFunction, cumulative_from_right, eval_at, integrate
from .inverse import FitConfig, ReconstructionReport, SpectralInput, augment, fit_akns, reconstruct, validate_sd
from .pencil import (Pencil, PencilPotentials, PencilSpectralPair, check_hyperbolic, integrate_pencil,
                     pencil_char, pencil_spectrum, spectral_pair)
from .reduction import ReductionResult, build_P, compute_v, recover_pr, reduce, verify_spectra_relation

__version__ = "0.1.0"
