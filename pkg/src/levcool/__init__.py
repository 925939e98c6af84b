"""Cavity cooling of two optically bound levitated nanoparticles."""
from .errors import ConfigError, LevcoolError, NumericalError
from .models import FiveModeParams, LinearModel, ThreeModeParams, build_five_mode, build_three_mode
from .params import DerivedParams, PhysicalConfig, derive_couplings, reference_physical_config
from .steady import CoolingResult, is_stable, solve_lyapunov, steady_state

__all__ = ["ConfigError", "CoolingResult", "DerivedParams", "FiveModeParams", "LevcoolError",
           "LinearModel", "NumericalError", "PhysicalConfig", "ThreeModeParams",
           "build_five_mode", "build_three_mode", "derive_couplings", "is_stable",
           "reference_physical_config", "solve_lyapunov", "steady_state"]
__version__ = "0.1.0"
