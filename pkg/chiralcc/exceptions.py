"""
Exception hierarchy for Chiral Color Codes.

Data-level outcomes (validation reports, infeasible linear systems, decoder
failures) are returned as values. Exceptions are reserved for misuse and for
internal consistency failures.
"""


class ChiralccError(Exception):
    """Base class for all package errors."""


class StructureError(ChiralccError):
    """Mismatched dimensions, site counts or broken incidence data."""


class NotBipartiteError(StructureError):
    """An odd cycle was found while assigning bipartition signs."""

    def __init__(self, cycle_vertex):
        self.cycle_vertex = cycle_vertex
        super().__init__(f"Vertex graph is not bipartite (odd cycle through vertex {cycle_vertex})")


class ParameterError(ChiralccError):
    """Invalid sizes, qudit dimension, chirality or region names."""


class UnsupportedError(ChiralccError):
    """The request lies outside the supported regime (e.g. even d for the Gauss sum)."""


class ConstructionError(ChiralccError):
    """A builder or recipe produced an object that fails its own verification."""
