"""Inertial modes of rotating fluid ellipsoids: exact Galerkin spectra, limit measures, rays."""

__version__ = "0.1.0"
