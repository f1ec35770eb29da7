"""
Dense operators, their norms and the norm-attaining vectors.

.. currentmodule:: banachsvd.operators

.. autosummary::
    :toctree:

    dense
    power
    oracle

"""
