"""
The deflation construction, the biorthogonal functionals and their projections.

.. currentmodule:: banachsvd.deflation

.. autosummary::
    :toctree:

    extension
    biorthogonal
    construction
    diagnostics

"""
