"""kerrmech: optomechanics with a position-modulated Kerr-type coupling.

Computes classical steady states (including bistability and
multistability), drift-matrix stability, stationary quantum fluctuations
(phonon occupation and cooling), position-noise spectra, and the
superconducting-circuit estimates of the achievable coupling constants.
"""

__version__ = "0.1.0"

from .circuit import (CircuitParams, GeneralKerrInputs, cancellation_detuning,
                      coresonant_detuning, exchange_coupling, kerr_general,
                      kerr_simplified, kerr_vs_detuning, mutual_capacitance,
                      nonlinear_coupling_dim, optical_cavity_estimate,
                      to_system_couplings)
from .dynamics import (DriftMatrix, StabilityVerdict, classify, drift_matrix,
                       verify_by_integration)
from .errors import (KerrmechError, NoStationaryStateError, ParameterError,
                     PlateCollisionError, UnderdeterminedPolynomialError,
                     UnphysicalAbsorptionError, UnphysicalLossError)
from .fluctuations import (CovarianceMatrix, DiffusionMatrix,
                           diffusion_matrix, integrate_covariance,
                           phonon_number, solve_lyapunov,
                           stationary_occupation)
from .model import (SystemParams, UnitScale, bath_temperature,
                    dimensionless_coupling, mean_occupation, validate)
from .spectrum import (SpectrumPoint, absorption_spectrum, default_nu_grid,
                       effective_susceptibility, find_peaks,
                       radiation_pressure_spectrum, spectrum_point,
                       spectrum_series, thermal_spectrum)
from .steady_state import (PolynomialCoefficients, SteadyState,
                           assemble_state, build_polynomial,
                           enumerate_states, photon_number_roots,
                           polynomial_residual)
from .sweep import (Branch, HysteresisTrace, OptimalDrive, SpectrumMap,
                    SweepAxis, SweepGrid, SweepPoint, evaluate_point,
                    find_root_count_window, grid_sweep, hysteresis_trace,
                    optimal_drive, partition_branches, spectrum_map)
from . import numerics

__all__ = [name for name in dir() if not name.startswith("_")]
