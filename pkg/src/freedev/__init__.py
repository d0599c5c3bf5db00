"""Heavy-tailed Wigner spectra, free convolution with the semicircle, and rate functions."""

from .entries import TailLaw, sample_entries, symmetric_real
from .measures import (RealMeasure, distance_d, free_convolve_semicircle,
                       free_deconvolve_semicircle, stieltjes, subordination)
from .network import Network, RootedNetwork, RootLaw, local_distance, projective_distance
from .rates import RateAnswer, RateParams, phi_bounds, rate_J, variational_phi_restricted

__all__ = [
    "TailLaw", "sample_entries", "symmetric_real",
    "RealMeasure", "distance_d", "free_convolve_semicircle", "free_deconvolve_semicircle",
    "stieltjes", "subordination",
    "Network", "RootedNetwork", "RootLaw", "local_distance", "projective_distance",
    "RateAnswer", "RateParams", "phi_bounds", "rate_J", "variational_phi_restricted",
]
