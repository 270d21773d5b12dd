"""Exact formal Poisson isomorphism g* → G* for quasitriangular Lie bialgebras."""

__version__ = "0.1.0"
