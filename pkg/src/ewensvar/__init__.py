"""Variance of additive statistics under the Ewens measure and the sharp
constant (theta+2)/(theta+1), checked in exact rational arithmetic."""

from .esf import b_form, delta_form, mean_A, variance_D
from .spectral import extremal_a, mu_closed, rayleigh_ratio, tau_closed

__all__ = ["b_form", "delta_form", "mean_A", "variance_D", "extremal_a", "mu_closed",
           "rayleigh_ratio", "tau_closed"]
__version__ = "0.1.0"
